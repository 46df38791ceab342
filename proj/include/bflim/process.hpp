#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "bflim/common.hpp"

namespace bflim {

// Data-generating AR(1) process: x_t = rho0 * x_{t-1} + sigma0 * eps_t with
// x_0 = 0 and iid standard normal noise. Stationarity (|rho0| < 1) is
// required so divergence rates and ergodic limits exist.
struct TrueProcess {
    double rho0 = 0.5;
    double sigma0 = 1.0;

    void validate() const {
        if (!(std::abs(rho0) < 1.0))
            throw ConfigError("TrueProcess: |rho0| must be < 1, got " +
                              std::to_string(rho0));
        if (!(sigma0 > 0.0))
            throw ConfigError("TrueProcess: sigma0 must be > 0, got " +
                              std::to_string(sigma0));
    }
};

// Sufficient statistics of an observed path for AR(1) likelihoods:
//   s_xx = sum_{t=1..n} x_{t-1}^2   (lagged squares, x_0 = 0)
//   s_xy = sum_{t=1..n} x_t x_{t-1}
//   s_yy = sum_{t=1..n} x_t^2
struct SuffStats {
    double s_xx = 0.0;
    double s_xy = 0.0;
    double s_yy = 0.0;
    std::size_t n = 0;
};

// An observed path with its provenance (generating process and seed) and
// cached sufficient statistics. Statistics are always accumulated forward
// in time with compensated sums, so the cached full-length values and any
// prefix recomputation agree bit for bit.
class TimeSeries {
  public:
    TimeSeries(std::vector<double> values, std::uint64_t seed,
               const TrueProcess& source)
        : values_(std::move(values)), seed_(seed), source_(source) {
        source_.validate();
        for (double v : values_) {
            if (!std::isfinite(v))
                throw ConfigError("TimeSeries: non-finite observation");
        }
        stats_ = prefix_stats(values_.size());
    }

    const std::vector<double>& values() const { return values_; }
    std::size_t n() const { return values_.size(); }
    std::uint64_t seed() const { return seed_; }
    const TrueProcess& source() const { return source_; }
    const SuffStats& stats() const { return stats_; }

    // Statistics of the first m observations, m <= n.
    SuffStats prefix_stats(std::size_t m) const {
        if (m > values_.size())
            throw ConfigError("TimeSeries: prefix length exceeds series");
        KahanSum xx, xy, yy;
        double prev = 0.0;
        for (std::size_t t = 0; t < m; ++t) {
            const double x = values_[t];
            xx.add(prev * prev);
            xy.add(x * prev);
            yy.add(x * x);
            prev = x;
        }
        return SuffStats{xx.value(), xy.value(), yy.value(), m};
    }

    // The series truncated to its first m observations, same provenance.
    TimeSeries prefix(std::size_t m) const {
        if (m > values_.size())
            throw ConfigError("TimeSeries: prefix length exceeds series");
        return TimeSeries(
            std::vector<double>(values_.begin(),
                                values_.begin() + static_cast<long>(m)),
            seed_, source_);
    }

  private:
    std::vector<double> values_;
    std::uint64_t seed_ = 0;
    TrueProcess source_;
    SuffStats stats_;
};

}  // namespace bflim
