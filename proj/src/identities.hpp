#pragma once

// Shared pieces of the identity definitions.

#include <initializer_list>
#include <random>
#include <string>
#include <vector>

#include "saranfk/registry.hpp"
#include "saranfk/series_result.hpp"

namespace saranfk::detail {

void add_classical_cases(std::vector<IdentityCase>& out);
void add_q_cases(std::vector<IdentityCase>& out);

class Draw {
public:
    explicit Draw(std::mt19937_64& rng) : rng_(rng) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    double param() { return uniform(0.1, 2.5); }
    /// Random phase, modulus uniform in [rmin, rmax].
    Complex disc(double rmax, double rmin = 0.0);
    int below(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }

private:
    std::mt19937_64& rng_;
};

/// Strictly decreasing chain of real parts, each step at least `gap`.
bool decreasing(std::initializer_list<double> chain, double gap = 0.0);

/// Constraint "chain[0] > chain[1] > ..." built from a text and a function
/// returning the chain.
Constraint chain_constraint(std::string text, std::function<std::vector<Complex>(const ParameterPoint&)> f);

/// True when every value keeps distance `gap` from the non-positive integers.
bool off_poles(std::initializer_list<Complex> xs, double gap = 0.1);

/// Sums over shells i + j = s until the monitor stops; throws
/// ConvergenceError otherwise.
template <class Term>
Complex shell_sum2(Term&& term, double tol, const char* what, int max_shells = 800) {
    TruncationMonitor mon(tol);
    Complex sum = 0.0;
    for (int s = 0; s < max_shells; ++s) {
        Complex shell = 0.0;
        for (int i = 0; i <= s; ++i) shell += term(i, s - i);
        sum += shell;
        if (mon.add(shell, sum)) return sum;
    }
    throw ConvergenceError(std::string(what) + ": double sum did not converge");
}

template <class Term>
Complex index_sum(Term&& term, double tol, const char* what, int max_terms = 5000) {
    TruncationMonitor mon(tol);
    Complex sum = 0.0;
    for (int k = 0; k < max_terms; ++k) {
        const Complex t = term(k);
        sum += t;
        if (mon.add(t, sum)) return sum;
    }
    throw ConvergenceError(std::string(what) + ": series did not converge");
}

/// Lazily built rows of values at the nodes of one axis.
template <class Make>
class Rows {
public:
    explicit Rows(Make make) : make_(std::move(make)) {}
    const std::vector<Complex>& operator()(int k) {
        while (static_cast<int>(rows_.size()) <= k) rows_.push_back(make_(static_cast<int>(rows_.size())));
        return rows_[k];
    }

private:
    Make make_;
    std::vector<std::vector<Complex>> rows_;
};

template <class Axis>
Complex weighted(const Axis& ax, const std::vector<Complex>& f) {
    Complex s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += ax.w[i] * f[i];
    return s;
}

template <class Axis>
Complex weighted(const Axis& ax, const std::vector<Complex>& f, const std::vector<Complex>& g) {
    Complex s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += ax.w[i] * f[i] * g[i];
    return s;
}

/// Moments sum w_i t_i^k, grown on demand.
template <class Axis>
class Moments {
public:
    explicit Moments(const Axis& ax) : ax_(ax), pow_(ax.t.size(), 1.0) {}
    Complex operator()(int k) {
        while (static_cast<int>(m_.size()) <= k) {
            if (!m_.empty()) {
                for (std::size_t i = 0; i < pow_.size(); ++i) pow_[i] *= ax_.t[i];
            }
            Complex s = 0.0;
            for (std::size_t i = 0; i < pow_.size(); ++i) s += ax_.w[i] * pow_[i];
            m_.push_back(s);
        }
        return m_[k];
    }

private:
    const Axis& ax_;
    std::vector<double> pow_;
    std::vector<Complex> m_;
};

}  // namespace saranfk::detail
