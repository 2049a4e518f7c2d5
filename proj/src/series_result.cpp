#include "saranfk/series_result.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace saranfk {

namespace {
// A run of exact zeros this long is read as termination of the series.
constexpr int kTerminationRun = 8;
}  // namespace

TruncationMonitor::TruncationMonitor(double tol, std::size_t min_terms) : tol_(tol), min_terms_(min_terms) {
    if (!(tol > 0.0)) throw DomainError("series tolerance must be positive");
}

bool TruncationMonitor::add(Complex contribution, Complex partial_sum) {
    const double mag = std::abs(contribution);
    if (!std::isfinite(mag) || !is_finite(partial_sum)) {
        throw Error("series produced a non-finite term");
    }
    ++count_;
    scale_ = 1.0 + std::abs(partial_sum);
    if (mag == 0.0) {
        ++zero_run_;
    } else {
        zero_run_ = 0;
        last_[0] = last_[1];
        last_[1] = last_[2];
        last_[2] = mag;
        ++nonzero_;
    }
    small_run_ = (mag < tol_ * scale_) ? small_run_ + 1 : 0;
    if (small_run_ < 3 || count_ < min_terms_) return false;
    return tail_estimate() <= tol_;
}

double TruncationMonitor::tail_estimate() const {
    if (zero_run_ >= kTerminationRun || nonzero_ == 0) return 0.0;
    if (nonzero_ < 3) return std::numeric_limits<double>::infinity();
    const double ratio = std::max(last_[2] / last_[1], last_[1] / last_[0]);
    if (ratio >= 1.0) return std::numeric_limits<double>::infinity();
    return last_[2] * ratio / (1.0 - ratio) / scale_;
}

SeriesResult TruncationMonitor::finish(Complex value) const {
    SeriesResult r;
    r.value = value;
    r.terms_used = count_;
    r.est_trunc_error = tail_estimate();
    r.converged = r.est_trunc_error <= tol_;
    return r;
}

}  // namespace saranfk
