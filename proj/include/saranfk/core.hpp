#pragma once

// Scalar building blocks: gamma and Pochhammer symbols, q-shifted factorials,
// q-gamma and q-beta.

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>

namespace saranfk {

using Complex = std::complex<double>;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the region where a series or integral is defined.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Evaluation hits a pole (non-positive integer gamma argument, vanishing
/// q-shifted factorial in a denominator, ...).
class PoleError : public Error {
public:
    using Error::Error;
};

/// A truncation or iteration check failed.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// Integer index outside its admissible range.
class RangeError : public Error {
public:
    using Error::Error;
};

/// Distance to the pole lattice {0,-1,-2,...} below which an argument is
/// treated as a pole.
inline constexpr double kPoleTolerance = 1e-9;

bool is_finite(Complex z);

/// Throws Error when either component is NaN or infinite.
Complex checked(Complex z, const char* what);

bool near_nonpositive_integer(Complex z, double tol = kPoleTolerance);

/// Base q in (0,1) together with the truncation controls shared by every
/// q-evaluation. Immutable once built.
class QContext {
public:
    /// `inf_product_terms == 0` picks the smallest count with q^N below
    /// 1e-17.
    explicit QContext(double q, int inf_product_terms = 0, double jackson_tail_tol = 1e-14);

    double q() const { return q_; }
    double log_q() const { return log_q_; }
    int inf_product_terms() const { return inf_product_terms_; }
    double jackson_tail_tol() const { return jackson_tail_tol_; }

    /// q^e for a complex exponent e (principal branch, q real positive).
    Complex pow(Complex e) const;
    double pow(double e) const;

private:
    double q_;
    double log_q_;
    int inf_product_terms_;
    double jackson_tail_tol_;
};

Complex log_gamma(Complex z);
Complex complex_gamma(Complex z);
/// 1/Gamma(z); entire, returns exactly 0 at the poles of Gamma.
Complex rgamma(Complex z);

/// Rising factorial (a)_n as an explicit product.
Complex pochhammer(Complex a, int n);

/// Principal-branch z^w.
Complex cpow(Complex z, Complex w);

/// (a;q)_n = prod_{j<n} (1 - a q^j).
Complex q_pochhammer(Complex a, int n, const QContext& ctx);

/// (a;q)_inf, truncated at ctx.inf_product_terms() with an a-posteriori
/// tail check.
Complex q_pochhammer_inf(Complex a, const QContext& ctx);

/// log (a;q)_inf as a sum of logarithms; usable where the product itself
/// under- or overflows (q close to 1).
Complex log_q_pochhammer_inf(Complex a, const QContext& ctx);

Complex q_gamma(Complex x, const QContext& ctx);
Complex q_beta(Complex x, Complex y, const QContext& ctx);

/// Gaussian binomial coefficient [k over p]_q.
Complex q_binomial(int k, int p, const QContext& ctx);

/// If `base` equals q^{-N} for a non-negative integer N (relative tolerance
/// 1e-12), returns N. Series with such a numerator parameter terminate.
std::optional<int> terminating_degree(Complex base, double q);

}  // namespace saranfk
