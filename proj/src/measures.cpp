#include "saranfk/measures.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <shared_mutex>
#include <tuple>

#include "saranfk/series.hpp"

namespace saranfk {

namespace {

// Rules are built once and cached, so the extra precision is cheap.
using Real = long double;

struct JacobiValue {
    Real p;      // P_n(x)
    Real p_prev; // P_{n-1}(x)
    Real dp;     // P_n'(x)
};

// Jacobi polynomial P_n^{(al,be)} at x = 2u - 1, written in u so that nodes
// close to x = -1 keep their relative accuracy.
JacobiValue jacobi(int n, Real al, Real be, Real u) {
    const Real ab = al + be;
    Real p0 = 1.0;
    Real p1 = 0.5 * (al - be - (ab + 2.0)) + (ab + 2.0) * u;
    for (int j = 1; j < n; ++j) {
        const Real s = 2.0 * j + ab;
        const Real a1 = 2.0 * (j + 1) * (j + ab + 1.0) * s;
        const Real a2 = (s + 1.0) * (al * al - be * be);
        const Real a3 = s * (s + 1.0) * (s + 2.0);
        const Real a4 = 2.0 * (j + al) * (j + be) * (s + 2.0);
        const Real p2 = ((a2 - a3 + 2.0 * a3 * u) * p1 - a4 * p0) / a1;
        p0 = p1;
        p1 = p2;
    }
    const Real s = 2.0 * n + ab;
    const Real x = 2.0 * u - 1.0;
    const Real dp = (n * (al - be - s * x) * p1 + 2.0 * (n + al) * (n + be) * p0) / (s * 4.0 * u * (1.0 - u));
    return {p1, p0, dp};
}

// Newton polish of a root u in (0, 1/2] of P_n^{(al,be)}(2u-1).
Real polish(int n, Real al, Real be, Real u) {
    for (int it = 0; it < 20; ++it) {
        const JacobiValue v = jacobi(n, al, be, u);
        const Real step = v.p / (2.0 * v.dp);
        Real next = u - step;
        if (next <= 0.0) next = 0.5 * u;
        const bool done = std::abs(next - u) <= 4e-19L * u;
        u = next;
        if (done) break;
    }
    return u;
}

QuadratureRule build_rule(double a_exp, double b_exp, int n) {
    // On [-1,1] the weight (1-x)^al (1+x)^be maps to t^a (1-t)^b with t = (1+x)/2.
    const Real al = b_exp;
    const Real be = a_exp;
    std::vector<Real> roots;
    roots.reserve(n);
    for (int k = 0; k < n; ++k) {
        Real x = std::cos(std::numbers::pi_v<Real> * (k + 0.75 + 0.5 * al) / (n + 0.5 * (al + be + 1.0)));
        if (k > 0 && x >= roots.back()) x = roots.back() - 1e-3 * (1.0 + roots.back());
        bool done = false;
        for (int it = 0; it < 100 && !done; ++it) {
            const JacobiValue v = jacobi(n, al, be, 0.5 * (1.0 + x));
            Real defl = 0.0;
            for (Real r : roots) defl += 1.0 / (x - r);
            const Real step = v.p / (v.dp - v.p * defl);
            Real next = x - step;
            if (next <= -1.0) next = 0.5 * (x - 1.0);
            if (next >= 1.0) next = 0.5 * (x + 1.0);
            done = std::abs(next - x) <= 1e-15L * std::max(Real(1), std::abs(x)) || std::abs(step) < 1e-18L;
            x = next;
        }
        if (!done) throw ConvergenceError("gauss_jacobi_rule: Newton iteration did not settle");
        roots.push_back(x);
    }
    const Real ab = al + be;
    // w = G(n+al+1) G(n+be+1) / (G(n+ab+1) n!) 2^{ab+1} / ((1-x^2) P'(x)^2), then
    // divided by 2^{ab+1} for [0,1]; 1-x^2 = 4u(1-u).
    const Real scale = std::exp(std::lgamma(n + al + 1.0L) + std::lgamma(n + be + 1.0) -
                                  std::lgamma(n + ab + 1.0) - std::lgamma(n + 1.0));
    QuadratureRule rule;
    rule.a = a_exp;
    rule.b = b_exp;
    // Increasing t order. Nodes in the lower half are refined in t, those in
    // the upper half in 1 - t through the reflection P^{(al,be)}(-x) = (-1)^n P^{(be,al)}(x);
    // the weight formula is invariant under that reflection.
    for (auto it = roots.rbegin(); it != roots.rend(); ++it) {
        const Real x = *it;
        Real t, w;
        if (x <= 0.0) {
            t = polish(n, al, be, 0.5 * (1.0 + x));
            const JacobiValue v = jacobi(n, al, be, t);
            w = scale / (4.0 * t * (1.0 - t) * v.dp * v.dp);
        } else {
            const Real s = polish(n, be, al, 0.5 * (1.0 - x));
            const JacobiValue v = jacobi(n, be, al, s);
            w = scale / (4.0 * s * (1.0 - s) * v.dp * v.dp);
            t = 1.0 - s;
        }
        rule.nodes.push_back(static_cast<double>(t));
        rule.weights.push_back(static_cast<double>(w));
    }
    Real total = 0.0;
    for (Real w : rule.weights) total += w;
    const Real beta = std::exp(std::lgamma(a_exp + 1.0) + std::lgamma(b_exp + 1.0) - std::lgamma(a_exp + b_exp + 2.0));
    if (std::abs(total / beta - 1.0) > 1e-12) {
        throw ConvergenceError("gauss_jacobi_rule: weights fail the normalization check");
    }
    return rule;
}

struct RuleCache {
    std::shared_mutex mutex;
    std::map<std::tuple<double, double, int>, std::shared_ptr<const QuadratureRule>> rules;
};

RuleCache& rule_cache() {
    static RuleCache cache;
    return cache;
}

}  // namespace

std::shared_ptr<const QuadratureRule> gauss_jacobi_rule(double a_exp, double b_exp, int n) {
    if (!(a_exp > -1.0 && b_exp > -1.0)) throw DomainError("gauss_jacobi_rule: exponents must exceed -1");
    if (n < 1 || n > 256) throw RangeError("gauss_jacobi_rule: order must lie in [1, 256]");
    RuleCache& cache = rule_cache();
    const auto key = std::make_tuple(a_exp, b_exp, n);
    {
        std::shared_lock lock(cache.mutex);
        if (auto it = cache.rules.find(key); it != cache.rules.end()) return it->second;
    }
    auto rule = std::make_shared<const QuadratureRule>(build_rule(a_exp, b_exp, n));
    std::unique_lock lock(cache.mutex);
    return cache.rules.emplace(key, rule).first->second;
}

MeasureSpec MeasureSpec::dirichlet(Complex alpha, Complex beta) {
    MeasureSpec s;
    s.kind = Kind::Dirichlet;
    s.alpha = alpha;
    s.beta = beta;
    s.validate();
    return s;
}

MeasureSpec MeasureSpec::hypergeometric(Complex alpha, Complex beta, Complex gamma, Complex eta) {
    MeasureSpec s;
    s.kind = Kind::Hypergeometric;
    s.alpha = alpha;
    s.beta = beta;
    s.gamma = gamma;
    s.eta = eta;
    s.validate();
    return s;
}

void MeasureSpec::validate() const {
    if (kind == Kind::Dirichlet) {
        if (!(alpha.real() > 0.0 && beta.real() > 0.0)) {
            throw DomainError("Dirichlet measure needs positive real parts");
        }
        return;
    }
    if (!(eta.real() > 0.0 && gamma.real() > 0.0 && (eta + gamma - alpha - beta).real() > 0.0)) {
        throw DomainError("hypergeometric measure needs Re eta, Re gamma, Re(eta+gamma-alpha-beta) > 0");
    }
}

namespace {

bool is_zero(Complex z) { return std::abs(z) < 1e-14; }

// Gamma(e+c-a) Gamma(e+c-b) / (Gamma(e) Gamma(c) Gamma(e+c-a-b))
Complex hyper_prefactor(const MeasureSpec& s) {
    const Complex e = s.eta, c = s.gamma, a = s.alpha, b = s.beta;
    return std::exp(log_gamma(e + c - a) + log_gamma(e + c - b) - log_gamma(e) - log_gamma(c) -
                    log_gamma(e + c - a - b));
}

Complex beta_prefactor(Complex a, Complex b) {
    return std::exp(log_gamma(a + b) - log_gamma(a) - log_gamma(b));
}

void require_interior(double t) {
    if (!(t > 0.0 && t < 1.0)) throw DomainError("density evaluated outside the open interval (0,1)");
}

// Jacobi rule for exponents given as complex numbers; the imaginary remainder
// of each power is folded into the returned weights. `scale` maps [0,1] to
// [0, scale] for the t-side variable.
NodeSet jacobi_nodes(Complex a_exp, Complex b_exp, int order) {
    auto rule = gauss_jacobi_rule(a_exp.real(), b_exp.real(), order);
    NodeSet out;
    out.t = rule->nodes;
    out.w.resize(rule->weights.size());
    for (std::size_t i = 0; i < rule->nodes.size(); ++i) {
        const double t = rule->nodes[i];
        Complex w = rule->weights[i];
        if (a_exp.imag() != 0.0) w *= std::exp(Complex(0.0, a_exp.imag() * std::log(t)));
        if (b_exp.imag() != 0.0) w *= std::exp(Complex(0.0, b_exp.imag() * std::log1p(-t)));
        out.w[i] = w;
    }
    return out;
}

NodeSet hypergeometric_nodes(const MeasureSpec& s, int order) {
    const Complex A = s.alpha, B = s.beta, C = s.gamma, E = s.eta;
    if (is_zero(A) || is_zero(B)) return discretize(MeasureSpec::dirichlet(E, C), order);
    const Complex D = C - A - B;
    if (std::hypot(D.real() - std::round(D.real()), D.imag()) < 1e-6) {
        throw DomainError("hypergeometric measure: gamma-alpha-beta too close to an integer");
    }
    const Complex pref = hyper_prefactor(s);
    NodeSet out;
    // [1/2, 1]: t = 1 - u/2, weight (1-t)^{C-1} = (u/2)^{C-1}, dt = du/2.
    {
        const NodeSet base = jacobi_nodes(C - 1.0, 0.0, order);
        const Complex jac = cpow(0.5, C);
        for (std::size_t i = 0; i < base.t.size(); ++i) {
            const double u = base.t[i];
            const double t = 1.0 - 0.5 * u;
            const Complex f = gauss_2f1(A, B, C, 0.5 * u).value;
            out.t.push_back(t);
            out.w.push_back(base.w[i] * jac * pref * cpow(t, E - 1.0) * f);
        }
    }
    // [0, 1/2]: connection formula splits the 2F1 into a regular piece and a
    // piece carrying t^{C-A-B}.
    const Complex k1 = std::exp(log_gamma(C) + log_gamma(D) - log_gamma(C - A) - log_gamma(C - B));
    const Complex k2 = near_nonpositive_integer(A) || near_nonpositive_integer(B)
                           ? Complex(0.0)
                           : std::exp(log_gamma(C) + log_gamma(-D) - log_gamma(A) - log_gamma(B));
    if (!near_nonpositive_integer(C - A) && !near_nonpositive_integer(C - B)) {
        const NodeSet base = jacobi_nodes(E - 1.0, 0.0, order);
        const Complex jac = cpow(0.5, E);
        for (std::size_t i = 0; i < base.t.size(); ++i) {
            const double t = 0.5 * base.t[i];
            const Complex f = gauss_2f1(A, B, 1.0 - D, t).value;
            out.t.push_back(t);
            out.w.push_back(base.w[i] * jac * pref * k1 * cpow(1.0 - t, C - 1.0) * f);
        }
    }
    if (k2 != 0.0) {
        const NodeSet base = jacobi_nodes(E + D - 1.0, 0.0, order);
        const Complex jac = cpow(0.5, E + D);
        for (std::size_t i = 0; i < base.t.size(); ++i) {
            const double t = 0.5 * base.t[i];
            const Complex f = gauss_2f1(C - A, C - B, 1.0 + D, t).value;
            out.t.push_back(t);
            out.w.push_back(base.w[i] * jac * pref * k2 * cpow(1.0 - t, C - 1.0) * f);
        }
    }
    return out;
}

}  // namespace

Complex dirichlet_density(const MeasureSpec& spec, double t) {
    require_interior(t);
    spec.validate();
    return beta_prefactor(spec.alpha, spec.beta) * cpow(t, spec.alpha - 1.0) * cpow(1.0 - t, spec.beta - 1.0);
}

Complex hypergeometric_density(const MeasureSpec& spec, double t, double tol) {
    require_interior(t);
    spec.validate();
    if ((spec.gamma - spec.alpha - spec.beta).real() <= 0.05 && !is_zero(spec.alpha) && !is_zero(spec.beta)) {
        throw DomainError("hypergeometric density: Re(gamma-alpha-beta) must exceed 0.05");
    }
    const Complex f = gauss_2f1(spec.alpha, spec.beta, spec.gamma, 1.0 - t, tol).value;
    return hyper_prefactor(spec) * cpow(t, spec.eta - 1.0) * cpow(1.0 - t, spec.gamma - 1.0) * f;
}

NodeSet discretize(const MeasureSpec& spec, int order) {
    spec.validate();
    if (spec.kind == MeasureSpec::Kind::Hypergeometric) return hypergeometric_nodes(spec, order);
    NodeSet out = jacobi_nodes(spec.alpha - 1.0, spec.beta - 1.0, order);
    const Complex pref = beta_prefactor(spec.alpha, spec.beta);
    for (Complex& w : out.w) w *= pref;
    return out;
}

Complex integrate_measure(const std::function<Complex(double)>& f, const MeasureSpec& spec, int order) {
    const NodeSet nodes = discretize(spec, order);
    Complex acc = 0.0;
    for (std::size_t i = 0; i < nodes.t.size(); ++i) acc += nodes.w[i] * f(nodes.t[i]);
    return checked(acc, "integrate_measure");
}

Complex integrate_nodes(const std::function<Complex(std::span<const double>)>& f, std::span<const NodeSet> axes) {
    const std::size_t k = axes.size();
    if (k == 0 || k > 4) throw RangeError("integrate_product: between one and four axes");
    std::vector<std::size_t> idx(k, 0);
    std::vector<double> point(k);
    Complex acc = 0.0;
    while (true) {
        Complex w = 1.0;
        for (std::size_t d = 0; d < k; ++d) {
            point[d] = axes[d].t[idx[d]];
            w *= axes[d].w[idx[d]];
        }
        acc += w * f(point);
        std::size_t d = k;
        while (d > 0) {
            --d;
            if (++idx[d] < axes[d].t.size()) break;
            idx[d] = 0;
            if (d == 0) return checked(acc, "integrate_product");
        }
    }
}

Complex integrate_product(const std::function<Complex(std::span<const double>)>& f,
                          std::span<const MeasureSpec> specs, std::span<const int> orders) {
    if (orders.size() != 1 && orders.size() != specs.size()) {
        throw RangeError("integrate_product: orders must have one entry or one per axis");
    }
    std::vector<NodeSet> axes;
    for (std::size_t d = 0; d < specs.size(); ++d) {
        axes.push_back(discretize(specs[d], orders.size() == 1 ? orders[0] : orders[d]));
    }
    return integrate_nodes(f, axes);
}

}  // namespace saranfk
