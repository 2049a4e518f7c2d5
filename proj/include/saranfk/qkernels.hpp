#pragma once

// Basic hypergeometric series, the q-analogue of F_K, the three-variable
// series phi^(3), Jackson integrals, q-measures and the finite-sum weights of
// the discrete analogue.
//
// Unless a name says otherwise, parameters are exponents: a stands for the
// base q^a. rphis, phi3 and gasper_discrete_3phi2 take raw bases.

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "saranfk/core.hpp"
#include "saranfk/series.hpp"
#include "saranfk/series_result.hpp"

namespace saranfk {

/// The two evaluation routes of a function disagree.
class CrossCheckError : public Error {
public:
    using Error::Error;
};

/// r phi s with the ((-1)^n q^{n(n-1)/2})^{1+s-r} factor. A numerator q^{-N}
/// makes the sum finite and it is then summed exactly.
SeriesResult rphis(std::span<const Complex> upper, std::span<const Complex> lower, Complex z,
                   const QContext& ctx, double tol = kDefaultSeriesTol);

SeriesResult rphis_tilde(std::span<const Complex> upper, std::span<const Complex> lower, Complex z,
                         const QContext& ctx, double tol = kDefaultSeriesTol);

SeriesResult phi21_tilde(Complex a, Complex b, Complex c, Complex z, const QContext& ctx,
                         double tol = kDefaultSeriesTol);

/// q-F_K. Sums the triple series and the 2phi1 re-expansion, returns the
/// latter with the relative gap in cross_check_residual.
SeriesResult phi_k_q(const FkParams& p, Complex x, Complex y, Complex z, const QContext& ctx,
                     double tol = kDefaultSeriesTol);
SeriesResult phi_k_q_triple(const FkParams& p, Complex x, Complex y, Complex z, const QContext& ctx,
                            double tol = kDefaultSeriesTol);
SeriesResult phi_k_q_reexpand(const FkParams& p, Complex x, Complex y, Complex z, const QContext& ctx,
                              double tol = kDefaultSeriesTol);

/// Parameter groups of phi^(3), raw bases. a/e run on m+n+p, b/g on m+n,
/// b1/g1 on n+p, b2/g2 on p+m, c/h on m, c1/h1 on n, c2/h2 on p.
struct Phi3Spec {
    std::vector<Complex> a, b, b1, b2, c, c1, c2;
    std::vector<Complex> e, g, g1, g2, h, h1, h2;
};

SeriesResult phi3(const Phi3Spec& spec, Complex x, Complex y, Complex z, const QContext& ctx,
                  double tol = kDefaultSeriesTol);

using JacksonIntegrand = std::function<Complex(std::span<const double>)>;

/// (1-q)^k sum over n in N^k of f(q^n) q^{n_1+...+n_k}, k <= 3. The per-axis
/// cutoff N is at least 40 and grows until (1-q) q^N sup|f| is below
/// ctx.jackson_tail_tol(); `cutoff_factor` scales the final N.
Complex jackson_integral(const JacksonIntegrand& f, int k, const QContext& ctx, double cutoff_factor = 1.0);

struct QMeasureSpec {
    enum class Kind { QDirichlet, QHypergeometric };
    Kind kind = Kind::QDirichlet;
    Complex alpha, beta, gamma, eta;

    static QMeasureSpec q_dirichlet(Complex a, Complex b);
    static QMeasureSpec q_hypergeometric(Complex a, Complex b, Complex g, Complex e);
    /// The measure whose moments are (q^nu,q^lambda;q)_l / (q^gamma,q^eta;q)_l.
    static QMeasureSpec moment_form(Complex nu, Complex lambda, Complex gamma, Complex eta);

    /// Throws DomainError when the positivity conditions fail.
    void validate() const;
};

/// Density at the lattice point t = q^n.
Complex q_measure_density(const QMeasureSpec& spec, int n, const QContext& ctx);

/// Lattice t_n = q^n with weights w_n = (1-q) q^n m(q^n), so that
/// integral f dmu ~ sum w_n f(t_n).
struct QLattice {
    std::vector<double> t;
    std::vector<Complex> w;
};

/// Truncates once the remaining weight, times `f_bound`, is below
/// `tail_tol` (non-positive picks ctx.jackson_tail_tol()); at least 40
/// points, and `cutoff_factor` scales the count.
QLattice q_measure_lattice(const QMeasureSpec& spec, const QContext& ctx, double f_bound = 1.0,
                           double tail_tol = 0.0, double cutoff_factor = 1.0);

Complex q_integrate(const std::function<Complex(double)>& f, const QLattice& lat);
Complex q_integrate_product(const std::function<Complex(std::span<const double>)>& f,
                            std::span<const QLattice> lats);

/// Closed-form moment integral t^ell dmu.
Complex q_moment(const QMeasureSpec& spec, int ell, const QContext& ctx);

/// Parameters of the q-Erdelyi integral for q-F_K.
struct QErdelyiParams {
    Complex alpha1, alpha2, beta1, beta2, gamma3;
    Complex eta1, eta2, mu2;
    Complex lambda1, lambda2, lambda3;
};

/// Integrand of the q-Erdelyi integral at u = q^a, v = q^b, w = q^c, as the
/// explicit sum over k of the shifted q-F_K values.
SeriesResult qshift_operator_kernel(const QErdelyiParams& p, int a, int b, int c, Complex x, Complex y, Complex z,
                                    const QContext& ctx, double tol = kDefaultSeriesTol);

/// Parameters of the finite-sum analogue.
struct DiscreteParams {
    Complex alpha1, beta2;
    Complex gamma1, gamma2, gamma3;
    Complex lambda1, lambda2;
    Complex mu1, mu2, mu3;
};

enum class WeightKind { W1, W2, W3 };

/// w(idx, bound) for 0 <= idx <= bound.
Complex discrete_weight(WeightKind which, int idx, int bound, const DiscreteParams& p, const QContext& ctx);

/// Limit of w(bound - idx, bound) as bound grows.
Complex discrete_weight_limit(WeightKind which, int idx, const DiscreteParams& p, const QContext& ctx);

/// Right-hand side of Gasper's finite expansion of
/// 3phi2(alpha, beta, q^{-n}; gamma, delta; q, q). Raw bases.
Complex gasper_discrete_3phi2(Complex alpha, Complex beta, Complex gamma, Complex delta, Complex lambda, Complex mu,
                              Complex nu, int n, const QContext& ctx);

}  // namespace saranfk
