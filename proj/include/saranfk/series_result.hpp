#pragma once

#include <cstddef>
#include <optional>

#include "saranfk/core.hpp"

namespace saranfk {

/// Outcome of a truncated series evaluation.
///
/// `est_trunc_error` is the estimated tail scaled by 1/(1+|value|), so that
/// `converged` implies `est_trunc_error <= tol` for the requested tolerance.
struct SeriesResult {
    Complex value{0.0};
    std::size_t terms_used = 0;
    bool converged = false;
    double est_trunc_error = 0.0;
    /// Relative disagreement between two evaluation routes, when the
    /// operation computes both.
    std::optional<double> cross_check_residual;
};

/// Stopping rule shared by every series engine: stop after three consecutive
/// contributions (terms or shells) each below tol * (1 + |partial sum|), once
/// at least `min_terms` have been summed, and only if the geometric tail
/// estimate is also below tol. Exact zeros do not enter the ratio estimate;
/// a long run of them is read as termination.
class TruncationMonitor {
public:
    explicit TruncationMonitor(double tol, std::size_t min_terms = 8);

    /// Records the next contribution; `partial_sum` already includes it.
    /// Returns true when summation may stop.
    bool add(Complex contribution, Complex partial_sum);

    /// Normalized tail estimate for the sum so far.
    double tail_estimate() const;
    std::size_t count() const { return count_; }
    double tol() const { return tol_; }

    SeriesResult finish(Complex value) const;

private:
    double tol_;
    std::size_t min_terms_;
    std::size_t count_ = 0;
    std::size_t nonzero_ = 0;
    int small_run_ = 0;
    int zero_run_ = 0;
    double last_[3] = {0.0, 0.0, 0.0};
    double scale_ = 1.0;
};

}  // namespace saranfk
