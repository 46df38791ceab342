#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "bflim/common.hpp"

namespace bflim {

// A point in a 1- or 2-dimensional parameter space. Dimension 0 is always
// the AR coefficient rho; dimension 1, when present, is the noise scale
// sigma.
struct ParamPoint {
    std::array<double, 2> coord{0.0, 0.0};
    int dims = 1;

    static ParamPoint d1(double rho) { return ParamPoint{{rho, 0.0}, 1}; }
    static ParamPoint d2(double rho, double sigma) {
        return ParamPoint{{rho, sigma}, 2};
    }

    double rho() const { return coord[0]; }
    double sigma(double fixed_sigma) const {
        return dims >= 2 ? coord[1] : fixed_sigma;
    }
};

// One coordinate range. Open endpoints are excluded by membership tests;
// integration treats both kinds identically (endpoints carry no mass).
struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool open_lo = false;
    bool open_hi = false;

    double width() const { return hi - lo; }
    bool contains(double x) const {
        if (open_lo ? !(x > lo) : !(x >= lo)) return false;
        if (open_hi ? !(x < hi) : !(x <= hi)) return false;
        return true;
    }
};

// Axis-aligned product of intervals.
struct Box {
    std::array<Interval, 2> iv{};

    bool contains(const ParamPoint& p, int dims) const {
        for (int d = 0; d < dims; ++d) {
            if (!iv[static_cast<std::size_t>(d)].contains(
                    p.coord[static_cast<std::size_t>(d)]))
                return false;
        }
        return true;
    }
    double measure(int dims) const {
        double m = 1.0;
        for (int d = 0; d < dims; ++d)
            m *= iv[static_cast<std::size_t>(d)].width();
        return m;
    }
};

// Candidate parameter set for one model: a finite union of boxes with
// pairwise disjoint interiors. Unions let a model exclude a middle range
// (for instance all coefficients with |rho| >= 1 inside a bounded frame).
struct ParameterDomain {
    int dims = 1;
    std::vector<Box> boxes;

    void validate() const;
    bool contains(const ParamPoint& p) const;

    // Total Lebesgue measure; normalizes the uniform prior.
    double measure() const;

    std::string describe() const;
};

ParameterDomain make_domain1(Interval rho);
ParameterDomain make_domain1(std::vector<Interval> rho_pieces);
ParameterDomain make_domain2(Interval rho, Interval sigma);
ParameterDomain make_domain2(std::vector<Interval> rho_pieces, Interval sigma);

}  // namespace bflim
