#pragma once

// Classical hypergeometric series: 2F1, pFq, Appell F2, Saran F_K in two
// forms, the L-variable F_K and the two-index convolution family.

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "saranfk/core.hpp"
#include "saranfk/series_result.hpp"

namespace saranfk {

inline constexpr double kDefaultSeriesTol = 1e-15;

struct FkParams {
    Complex alpha1, alpha2, beta1, beta2;
    Complex gamma1, gamma2, gamma3;
};

SeriesResult gauss_2f1(Complex a, Complex b, Complex c, Complex z, double tol = kDefaultSeriesTol);

/// Straight power series, no transformations. |z| < 1 or terminating.
SeriesResult gauss_2f1_direct(Complex a, Complex b, Complex c, Complex z, double tol = kDefaultSeriesTol);

SeriesResult phi_pfq(std::span<const Complex> upper, std::span<const Complex> lower, Complex z,
                     double tol = kDefaultSeriesTol);

SeriesResult appell_f2(Complex a, Complex b1, Complex b2, Complex c1, Complex c2, Complex y, Complex z,
                       double tol = kDefaultSeriesTol);

bool in_domain_fk(Complex x, Complex y, Complex z);

SeriesResult saran_fk_triple(const FkParams& p, Complex x, Complex y, Complex z, double tol = kDefaultSeriesTol);
SeriesResult saran_fk_reexpand(const FkParams& p, Complex x, Complex y, Complex z,
                               double tol = kDefaultSeriesTol);

/// Chain series with (a1)_{n1} (b1)_{n1+n2} ... (b_{L-1})_{n_{L-1}+n_L} (a2)_{nL}
/// over (c1)_{n1}...(cL)_{nL} n1!...nL!, for L in {3,4,5}.
SeriesResult fk_L(Complex a1, Complex a2, std::span<const Complex> b, std::span<const Complex> c,
                  std::span<const Complex> zs, double tol = kDefaultSeriesTol);

class CoeffSequence2D {
public:
    using Evaluator = std::function<Complex(int m, int n)>;

    CoeffSequence2D(Evaluator f, double decay_bound);

    Complex operator()(int m, int n) const { return f_(m, n); }
    double decay_bound() const { return decay_; }

    /// Largest |a(m,n)| / decay^{m+n} over m,n <= range; at most 1 when the
    /// declared bound holds.
    double bound_ratio(int range) const;

    static CoeffSequence2D delta();

private:
    Evaluator f_;
    double decay_;
};

/// (a*b)(m,n) = sum_{i<=m, j<=n} a(m-i,n-j) b(i,j). Thread-safe memo.
CoeffSequence2D convolve2d(const CoeffSequence2D& a, const CoeffSequence2D& b);

struct FaParams {
    Complex alpha1, beta1, gamma1;
    Complex alpha2, beta2, gamma2;
};

SeriesResult generic_f_a(const CoeffSequence2D& a, const FaParams& p, Complex x1, Complex x2, Complex x3,
                         Complex x4, double tol = kDefaultSeriesTol);

}  // namespace saranfk
