#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>

namespace bflim {

// Raised when a numeric contract cannot be met (refinement cap, non-finite
// likelihood, grid too coarse). Maps to CLI exit code 1.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised on invalid configuration or precondition violations coming from
// user input. Maps to CLI exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Compensated (Kahan) accumulator. Every long sum in this project runs
// through one of these in a fixed forward order so results are bit-stable.
struct KahanSum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double x) {
        const double y = x - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    double value() const { return sum; }
};

// Streaming log-sum-exp accumulator: tracks the running peak and a
// compensated sum of exp(term - peak). Terms more than 746 below the peak
// cannot change a binary64 sum (exp underflows to zero) and are skipped; the
// skip rule depends only on the values, never on threading or chunking.
struct LogSumAcc {
    double peak = kNegInf;
    double sum = 0.0;
    double comp = 0.0;

    void add(double logterm) {
        if (logterm == kNegInf) return;
        if (logterm <= peak) {
            const double d = logterm - peak;
            if (d < -746.0) return;
            kadd(std::exp(d));
        } else {
            const double old_peak = peak;
            const double old_sum = sum;
            peak = logterm;
            sum = 1.0;
            comp = 0.0;
            if (old_peak != kNegInf && old_sum > 0.0) {
                kadd(old_sum * std::exp(old_peak - logterm));
            }
        }
    }

    // Merge must happen in a fixed order (chunk index order) so the parallel
    // and serial reductions stay bit-identical.
    void merge(const LogSumAcc& o) {
        if (o.peak == kNegInf || o.sum <= 0.0) return;
        if (peak == kNegInf) {
            *this = o;
            return;
        }
        if (o.peak <= peak) {
            const double d = o.peak - peak;
            if (d < -746.0) return;
            kadd(o.sum * std::exp(d));
        } else {
            const double carried = sum * std::exp(peak - o.peak);
            peak = o.peak;
            sum = o.sum;
            comp = o.comp;
            kadd(carried);
        }
    }

    double value() const {
        if (peak == kNegInf || sum <= 0.0) return kNegInf;
        return peak + std::log(sum);
    }

  private:
    void kadd(double x) {
        const double y = x - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
};

// Runs chunk indices [0, nchunks) across up to `threads` workers with a
// static partition. Chunk work must be independent; callers combine chunk
// results afterwards in index order, which keeps every reduction
// deterministic regardless of the thread count.
void parallel_chunks(std::size_t nchunks, int threads,
                     const std::function<void(std::size_t)>& chunk_fn);

// Decimal formatting with 17 significant digits: round-trip exact for
// binary64, used for every number written to CSV, JSONL and fixtures.
std::string fmt17(double x);

}  // namespace bflim
