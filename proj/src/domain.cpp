#include "bflim/domain.hpp"

#include <cmath>
#include <sstream>

namespace bflim {

namespace {

void validate_interval(const Interval& iv, int dim) {
    if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi))
        throw ConfigError("ParameterDomain: endpoints must be finite");
    if (!(iv.lo < iv.hi))
        throw ConfigError("ParameterDomain: empty interval in dim " +
                          std::to_string(dim));
}

bool interiors_overlap(const Interval& a, const Interval& b) {
    return std::max(a.lo, b.lo) < std::min(a.hi, b.hi);
}

void append_interval(std::ostringstream& os, const Interval& iv) {
    os << (iv.open_lo ? '(' : '[') << iv.lo << ", " << iv.hi
       << (iv.open_hi ? ')' : ']');
}

}  // namespace

void ParameterDomain::validate() const {
    if (dims < 1 || dims > 2)
        throw ConfigError("ParameterDomain: dims must be 1 or 2");
    if (boxes.empty())
        throw ConfigError("ParameterDomain: at least one box required");
    for (const Box& b : boxes) {
        for (int d = 0; d < dims; ++d)
            validate_interval(b.iv[static_cast<std::size_t>(d)], d);
        if (dims == 2) {
            const Interval& s = b.iv[1];
            if (s.lo < 0.0 || (s.lo == 0.0 && !s.open_lo))
                throw ConfigError(
                    "ParameterDomain: sigma range must exclude 0");
        }
    }
    for (std::size_t i = 0; i < boxes.size(); ++i) {
        for (std::size_t j = i + 1; j < boxes.size(); ++j) {
            bool overlap = true;
            for (int d = 0; d < dims; ++d) {
                if (!interiors_overlap(
                        boxes[i].iv[static_cast<std::size_t>(d)],
                        boxes[j].iv[static_cast<std::size_t>(d)]))
                    overlap = false;
            }
            if (overlap)
                throw ConfigError(
                    "ParameterDomain: boxes must have disjoint interiors");
        }
    }
}

bool ParameterDomain::contains(const ParamPoint& p) const {
    if (p.dims != dims) return false;
    for (const Box& b : boxes)
        if (b.contains(p, dims)) return true;
    return false;
}

double ParameterDomain::measure() const {
    KahanSum m;
    for (const Box& b : boxes) m.add(b.measure(dims));
    return m.value();
}

std::string ParameterDomain::describe() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < boxes.size(); ++i) {
        if (i > 0) os << " u ";
        append_interval(os, boxes[i].iv[0]);
        if (dims == 2) {
            os << " x ";
            append_interval(os, boxes[i].iv[1]);
        }
    }
    return os.str();
}

ParameterDomain make_domain1(Interval rho) {
    return make_domain1(std::vector<Interval>{rho});
}

ParameterDomain make_domain1(std::vector<Interval> rho_pieces) {
    ParameterDomain d;
    d.dims = 1;
    for (const Interval& iv : rho_pieces) d.boxes.push_back(Box{{iv, {}}});
    d.validate();
    return d;
}

ParameterDomain make_domain2(Interval rho, Interval sigma) {
    return make_domain2(std::vector<Interval>{rho}, sigma);
}

ParameterDomain make_domain2(std::vector<Interval> rho_pieces,
                             Interval sigma) {
    ParameterDomain d;
    d.dims = 2;
    for (const Interval& iv : rho_pieces) d.boxes.push_back(Box{{iv, sigma}});
    d.validate();
    return d;
}

}  // namespace bflim
