#include <array>
#include <cmath>
#include <unordered_map>

#include "identities.hpp"
#include "saranfk/measures.hpp"
#include "saranfk/series.hpp"

namespace saranfk::detail {

namespace {

using P = ParameterPoint;

constexpr double kGap = 0.1;

Complex f21(Complex a, Complex b, Complex c, Complex z, const EvalConfig& cfg) {
    return gauss_2f1(a, b, c, z, cfg.series_tol).value;
}

Complex dirichlet_integral(const std::function<Complex(double)>& f, Complex a, Complex b, const EvalConfig& cfg) {
    return integrate_measure(f, MeasureSpec::dirichlet(a, b), cfg.order);
}

Complex double_integral(const std::function<Complex(std::span<const double>)>& f, const MeasureSpec& s1,
                        const MeasureSpec& s2, const EvalConfig& cfg) {
    const MeasureSpec specs[] = {s1, s2};
    const int orders[] = {cfg.axis_order(2)};
    return integrate_product(f, specs, orders);
}

/// Coefficient of z^p in the 2F1 re-expansion of F_K; a gamma3 slot equal to
/// beta1 cancels exactly.
class ReexpCoef {
public:
    explicit ReexpCoef(const FkParams& p, Complex z) : p_(p), z_(z), c_{1.0} {}
    Complex operator()(int k) {
        while (static_cast<int>(c_.size()) <= k) {
            const double d = static_cast<double>(c_.size() - 1);
            Complex r = (p_.alpha2 + d) / (d + 1.0) * z_;
            if (p_.beta1 != p_.gamma3) r *= (p_.beta1 + d) / (p_.gamma3 + d);
            c_.push_back(c_.back() * r);
        }
        return c_[k];
    }

private:
    FkParams p_;
    Complex z_;
    std::vector<Complex> c_;
};

P point(std::map<std::string, Complex> v, std::map<std::string, Complex> a) { return P{std::move(v), std::move(a)}; }

Constraint positive(const std::string& name) {
    return Constraint{"Re(" + name + ") > 0", [name](const P& p) { return p.re(name) > 0.0; }};
}

// F_K point with |x|, |y| <= 0.6 and |z| <= 0.8 (1-|x|)(1-|y|).
void fk_arguments(Draw& d, std::map<std::string, Complex>& args) {
    const Complex x = d.disc(0.6), y = d.disc(0.6);
    const Complex z = d.disc(0.8 * (1.0 - std::abs(x)) * (1.0 - std::abs(y)));
    args = {{"x", x}, {"y", y}, {"z", z}};
}

Constraint fk_domain() {
    return Constraint{"(x,y,z) in D_K", [](const P& p) { return in_domain_fk(p("x"), p("y"), p("z")); }};
}

// Real y, z with |y| + |z| <= 0.8.
std::map<std::string, Complex> f2_arguments(Draw& d) {
    const double y = d.uniform(-0.8, 0.8);
    const double rest = 0.8 - std::abs(y);
    return {{"y", y}, {"z", d.uniform(-rest, rest)}};
}

Constraint f2_domain() {
    return Constraint{"|y|+|z| < 1", [](const P& p) { return std::abs(p("y")) + std::abs(p("z")) < 1.0; }};
}

IdentityCase euler(bool second) {
    IdentityCase c;
    c.id = second ? "euler-2" : "euler-1";
    c.anchor = second ? "Euler integral, second form" : "Euler integral, first form";
    c.cost_class = CostClass::SingleIntegral;
    c.tol = default_tolerance(c.cost_class);
    const std::string inner = second ? "alpha" : "beta";
    c.constraints = {chain_constraint("Re(gamma) > Re(" + inner + ") > 0",
                                      [inner](const P& p) { return std::vector<Complex>{p("gamma"), p(inner), 0.0}; })};
    c.propose = [inner](std::mt19937_64& rng, int) -> std::optional<P> {
        Draw d(rng);
        P p = point({{"alpha", d.param()}, {"beta", d.param()}, {"gamma", d.param()}}, {{"z", d.disc(0.7)}});
        if (!decreasing({p.re("gamma"), p.re(inner)}, kGap)) return std::nullopt;
        return p;
    };
    c.lhs = [](const P& p, const EvalConfig& cfg) { return f21(p("alpha"), p("beta"), p("gamma"), p("z"), cfg); };
    c.rhs = [second](const P& p, const EvalConfig& cfg) {
        const Complex z = p("z"), g = p("gamma");
        const Complex power = second ? p("beta") : p("alpha");
        const Complex base = second ? p("alpha") : p("beta");
        return dirichlet_integral([&](double t) { return cpow(1.0 - z * t, -power); }, base, g - base, cfg);
    };
    return c;
}

IdentityCase bateman() {
    IdentityCase c;
    c.id = "bateman";
    c.anchor = "Bateman integral";
    c.cost_class = CostClass::SingleIntegral;
    c.tol = default_tolerance(c.cost_class);
    c.constraints = {chain_constraint("Re(gamma) > Re(lambda) > 0",
                                      [](const P& p) { return std::vector<Complex>{p("gamma"), p("lambda"), 0.0}; })};
    c.propose = [](std::mt19937_64& rng, int) -> std::optional<P> {
        Draw d(rng);
        P p = point({{"alpha", d.param()}, {"beta", d.param()}, {"gamma", d.param()}, {"lambda", d.param()}},
                    {{"z", d.disc(0.7)}});
        if (!decreasing({p.re("gamma"), p.re("lambda")}, kGap)) return std::nullopt;
        return p;
    };
    c.lhs = [](const P& p, const EvalConfig& cfg) { return f21(p("alpha"), p("beta"), p("gamma"), p("z"), cfg); };
    c.rhs = [](const P& p, const EvalConfig& cfg) {
        const Complex z = p("z"), l = p("lambda");
        return dirichlet_integral([&](double x) { return f21(p("alpha"), p("beta"), l, z * x, cfg); }, l,
                                  p("gamma") - l, cfg);
    };
    return c;
}

IdentityCase erdelyi1() {
    IdentityCase c;
    c.id = "erdelyi-1";
    c.anchor = "Erdelyi integral, first form";
    c.cost_class = CostClass::SingleIntegral;
    c.tol = default_tolerance(c.cost_class);
    c.constraints = {chain_constraint("Re(gamma) > Re(lambda) > 0",
                                      [](const P& p) { return std::vector<Complex>{p("gamma"), p("lambda"), 0.0}; })};
    c.propose = [](std::mt19937_64& rng, int) -> std::optional<P> {
        Draw d(rng);
        P p = point({{"alpha", d.param()},
                     {"alphap", d.param()},
                     {"beta", d.param()},
                     {"gamma", d.param()},
                     {"lambda", d.param()}},
                    {{"z", d.disc(0.7)}});
        if (!decreasing({p.re("gamma"), p.re("lambda")}, kGap)) return std::nullopt;
        return p;
    };
    c.lhs = [](const P& p, const EvalConfig&) { return erdelyi1_lhs(p("alpha"), p("beta"), p("gamma"), p("z")); };
    c.rhs = [](const P& p, const EvalConfig& cfg) {
        return erdelyi1_rhs(p("alpha"), p("alphap"), p("beta"), p("gamma"), p("lambda"), p("z"), cfg.order);
    };
    return c;
}

IdentityCase erdelyi2() {
    IdentityCase c;
    c.id = "erdelyi-2";
    c.anchor = "Erdelyi integral, second form";
    c.cost_class = CostClass::SingleIntegral;
    c.tol = default_tolerance(c.cost_class);
    c.constraints = {chain_constraint("Re(gamma) > Re(eta) > 0",
                                      [](const P& p) { return std::vector<Complex>{p("gamma"), p("eta"), 0.0}; })};
    c.propose = [](std::mt19937_64& rng, int) -> std::optional<P> {
        Draw d(rng);
        P p = point({{"alpha", d.param()},
                     {"beta", d.param()},
                     {"gamma", d.param()},
                     {"eta", d.param()},
                     {"lambda", d.param()}},
                    {{"z", d.disc(0.7)}});
        if (!decreasing({p.re("gamma"), p.re("eta")}, kGap)) return std::nullopt;
        return p;
    };
    c.lhs = [](const P& p, const EvalConfig& cfg) { return f21(p("alpha"), p("beta"), p("gamma"), p("z"), cfg); };
    c.rhs = [](const P& p, const EvalConfig& cfg) {
        const Complex a = p("alpha"), b = p("beta"), g = p("gamma"), e = p("eta"), l = p("lambda"), z = p("z");
        return dirichlet_integral(
            [&](double x) {
                const Complex s = 1.0 - z * x;
                return cpow(s, l - a - b) * f21(l - a, l - b, e, z * x, cfg) *
                       f21(a + b - l, l - e, g - e, (1.0 - x) * z / s, cfg);
            },
            e, g - e, cfg);
    };
    return c;
}

IdentityCase erdelyi3() {
    IdentityCase c;
    c.id = "erdelyi-3";
    c.anchor = "Erdelyi integral, third form";
    c.cost_class = CostClass::SingleIntegral;
    c.tol = default_tolerance(c.cost_class);
    c.constraints = {positive("nu"), positive("lambda"),
                     Constraint{"Re(gamma-lambda+eta-nu) > 0", [](const P& p) {
                                    return (p("gamma") - p("lambda") + p("eta") - p("nu")).real() > 0.0;
                                }}};
    c.propose = [](std::mt19937_64& rng, int) -> std::optional<P> {
        Draw d(rng);
        P p = point({{"alpha", d.param()},
                     {"beta", d.param()},
                     {"gamma", d.param()},
                     {"eta", d.param()},
                     {"lambda", d.param()},
                     {"nu", d.param()}},
                    {{"z", d.disc(0.7)}});
        const double cc = p.re("gamma") - p.re("lambda") + p.re("eta") - p.re("nu");
        const double e = p.re("lambda") - p.re("nu");  // exponent at t = 0 of the 2F1 factor
        if (cc < kGap || std::abs(e - std::round(e)) < kGap) return std::nullopt;
        return p;
    };
    c.lhs = [](const P& p, const EvalConfig& cfg) { return f21(p("alpha"), p("beta"), p("gamma"), p("z"), cfg); };
    c.rhs = [](const P& p, const EvalConfig& cfg) {
        const Complex a = p("alpha"), b = p("beta"), g = p("gamma"), e = p("eta"), l = p("lambda"), n = p("nu");
        const Complex z = p("z");
        const MeasureSpec mu = MeasureSpec::hypergeometric(e - l, g - l, g - l + e - n, n);
        const Complex up[] = {a, b, e};
        const Complex lo[] = {l, n};
        return integrate_measure([&](double x) { return phi_pfq(up, lo, z * x, cfg.series_tol).value; }, mu,
                                 cfg.order);
    };
    return c;
}

struct FkErdelyi {
    Complex a1, a2, b1, b2, g3, e1, e2, m2, l1, l2, l3;
    explicit FkErdelyi(const P& p)
        : a1(p("alpha1")), a2(p("alpha2")), b1(p("beta1")), b2(p("beta2")), g3(p("gamma3")), e1(p("eta1")),
          e2(p("eta2")), m2(p("mu2")), l1(p("lambda1")), l2(p("lambda2")), l3(p("lambda3")) {}
    FkParams outer() const { return {a1, a2, b1, b2, a1 + e1, b2 + m2, g3}; }
    FkParams first() const { return {a1, a2 - e2, b1 - l3, b2, a1 - l1 + e1, b2 - l2 + m2, b1 - l3}; }
    FkParams second() const { return {l1 - e1, e2, l3, l2 - m2, l1, l2, l3}; }
};

// The product of the two F_K re-expansions splits into per-axis factors, so
// the tensor rule is summed one axis at a time inside the (m, n) double sum.
Complex fk_erdelyi_rhs(const P& pt, const EvalConfig& cfg) {
    const FkErdelyi p(pt);
    const Complex x = pt("x"), y = pt("y"), z = pt("z");
    const int o = cfg.axis_order(3);
    const NodeSet U = discretize(MeasureSpec::dirichlet(p.a1 - p.l1 + p.e1, p.l1), o);
    const NodeSet V = discretize(MeasureSpec::dirichlet(p.b2 - p.l2 + p.m2, p.l2), o);
    const NodeSet W = discretize(MeasureSpec::dirichlet(p.b1, p.g3 - p.b1), o);
    const FkParams f = p.first(), s = p.second();
    const double tol = cfg.series_tol;

    auto over = [](const NodeSet& ax, auto&& fn) {
        std::vector<Complex> v(ax.t.size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(ax.t[i]);
        return v;
    };
    Rows g([&](int m) { return over(U, [&](double u) { return f21(f.beta1 + double(m), f.alpha1, f.gamma1, u * x, cfg); }); });
    Rows h([&](int n) {
        return over(U, [&](double u) {
            const Complex s1 = 1.0 - u * x;
            return cpow(s1, -(s.gamma3 + double(n))) * f21(s.beta1 + double(n), s.alpha1, s.gamma1, (1.0 - u) * x / s1, cfg);
        });
    });
    Rows k([&](int m) { return over(V, [&](double v) { return f21(f.alpha2 + double(m), f.beta2, f.gamma2, v * y, cfg); }); });
    Rows j([&](int n) {
        return over(V, [&](double v) {
            const Complex s1 = 1.0 - v * y;
            return cpow(s1, -(p.e2 + double(n))) * f21(s.alpha2 + double(n), s.beta2, s.gamma2, (1.0 - v) * y / s1, cfg);
        });
    });
    ReexpCoef A(f, 1.0), B(s, 1.0);
    Moments<NodeSet> mw(W);
    std::vector<Complex> zp{1.0};
    return shell_sum2(
        [&](int m, int n) {
            while (static_cast<int>(zp.size()) <= m + n) zp.push_back(zp.back() * z);
            const Complex c = A(m) * B(n);
            if (c == 0.0) return Complex(0.0);
            return c * zp[m + n] * mw(m + n) * weighted(U, g(m), h(n)) * weighted(V, k(m), j(n));
        },
        tol, "fk-erdelyi");
}

IdentityCase fk_erdelyi() {
    IdentityCase c;
    c.id = "fk-erdelyi";
    c.anchor = "Theorem 1.1";
    c.cost_class = CostClass::TripleIntegral;
    c.tol = default_tolerance(c.cost_class);
    c.constraints = {
        chain_constraint("Re(alpha1+eta1) > Re(lambda1) > 0",
                         [](const P& p) { return std::vector<Complex>{p("alpha1") + p("eta1"), p("lambda1"), 0.0}; }),
        chain_constraint("Re(beta2+mu2) > Re(lambda2) > 0",
                         [](const P& p) { return std::vector<Complex>{p("beta2") + p("mu2"), p("lambda2"), 0.0}; }),
        chain_constraint("Re(gamma3) > Re(beta1) > 0",
                         [](const P& p) { return std::vector<Complex>{p("gamma3"), p("beta1"), 0.0}; }),
        fk_domain()};
    c.propose = [](std::mt19937_64& rng, int) -> std::optional<P> {
        Draw d(rng);
        P p;
        for (const char* k : {"alpha1", "alpha2", "beta1", "beta2", "gamma3", "eta1", "eta2", "mu2", "lambda1",
                              "lambda2", "lambda3"}) {
            p.values[k] = d.param();
        }
        fk_arguments(d, p.arguments);
        if (!decreasing({p.re("alpha1") + p.re("eta1"), p.re("lambda1")}, kGap) ||
            !decreasing({p.re("beta2") + p.re("mu2"), p.re("lambda2")}, kGap) ||
            !decreasing({p.re("gamma3"), p.re("beta1")}, kGap) || !off_poles({p("beta1") - p("lambda3")})) {
            return std::nullopt;
        }
        return p;
    };
    c.lhs = [](const P& p, const EvalConfig& cfg) {
        return saran_fk_reexpand(FkErdelyi(p).outer(), p("x"), p("y"), p("z"), cfg.series_tol).value;
    };
    c.rhs = fk_erdelyi_rhs;
    return c;
}

IdentityCase fk_cross_form() {
    IdentityCase c;
    c.id = "fk-cross-form";
    c.anchor = "F_K triple series vs re-expansion";
    c.cost_class = CostClass::Cheap;
    c.tol = default_tolerance(c.cost_class);
    c.constraints = {fk_domain()};
    c.propose = [](std::mt19937_64& rng, int) -> std::optional<P> {
        Draw d(rng);
        P p;
        for (const char* k : {"alpha1", "alpha2", "beta1", "beta2", "gamma1", "gamma2", "gamma3"}) p.values[k] = d.param();
        fk_arguments(d, p.arguments);
        return p;
    };
    auto params = [](const P& p) {
        return FkParams{p("alpha1"), p("alpha2"), p("beta1"), p("beta2"), p("gamma1"), p("gamma2"), p("gamma3")};
    };
    c.lhs = [params](const P& p, const EvalConfig& cfg) {
        return saran_fk_triple(params(p), p("x"), p("y"), p("z"), cfg.series_tol).value;
    };
    c.rhs = [params](const P& p, const EvalConfig& cfg) {
        return saran_fk_reexpand(params(p), p("x"), p("y"), p("z"), cfg.series_tol).value;
    };
    return c;
}

IdentityCase f2_curious() {
    IdentityCase c;
    c.id = "f2-curious";
    c.anchor = "Theorem 3.2";
    c.cost_class = CostClass::SingleIntegral;
    c.tol = 1e-8;
    c.constraints = {chain_constraint("Re(c1) > Re(d1) > 0",
                                      [](const P& p) { return std::vector<Complex>{p("c1"), p("d1"), 0.0}; }),
                     chain_constraint("Re(c2) > Re(b2) > 0",
                                      [](const P& p) { return std::vector<Complex>{p("c2"), p("b2"), 0.0}; }),
                     f2_domain()};
    c.propose = [](std::mt19937_64& rng, int) -> std::optional<P> {
        Draw d(rng);
        P p;
        for (const char* k : {"a1", "a2", "b1", "b2", "c1", "c2", "d1"}) p.values[k] = d.param();
        p.arguments = f2_arguments(d);
        if (!decreasing({p.re("c1"), p.re("d1")}, kGap) || !decreasing({p.re("c2"), p.re("b2")}, kGap)) {
            return std::nullopt;
        }
        return p;
    };
    c.lhs = [](const P& p, const EvalConfig& cfg) {
        return appell_f2(p("a1"), p("b1"), p("b2"), p("c1"), p("c2"), p("y"), p("z"), cfg.series_tol).value;
    };
    c.rhs = [](const P& p, const EvalConfig& cfg) {
        const Complex a1 = p("a1"), a2 = p("a2"), b1 = p("b1"), b2 = p("b2"), c1 = p("c1"), c2 = p("c2"),
                      d1 = p("d1"), y = p("y"), z = p("z");
        return double_integral(
            [&](std::span<const double> t) {
                const double v = t[0], w = t[1];
                const Complex s = 1.0 - w * z - v * y;
                return cpow(s, -a1) * f21(a1 - a2, c1 - b1 - d1, c1 - d1, v * y / (-s), cfg) *
                       f21(a2, b1 + d1 - c1, d1, (1.0 - v) * y / s, cfg);
            },
            MeasureSpec::dirichlet(c1 - d1, d1), MeasureSpec::dirichlet(b2, c2 - b2), cfg);
    };
    return c;
}

IdentityCase f2_reduction() {
    IdentityCase c;
    c.id = "f2-reduction-proof";
    c.anchor = "F2 reduction with the Pfaff transformation";
    c.cost_class = CostClass::Cheap;
    c.tol = default_tolerance(c.cost_class);
    c.constraints = {f2_domain()};
    c.propose = [](std::mt19937_64& rng, int) -> std::optional<P> {
        Draw d(rng);
        P p;
        for (const char* k : {"a", "b", "bp", "c"}) p.values[k] = d.param();
        p.arguments = f2_arguments(d);
        return p;
    };
    c.lhs = [](const P& p, const EvalConfig& cfg) {
        return appell_f2(p("a"), p("b"), p("bp"), p("c"), p("bp"), p("y"), p("z"), cfg.series_tol).value;
    };
    c.rhs = [](const P& p, const EvalConfig& cfg) {
        const Complex a = p("a"), b = p("b"), cc = p("c"), y = p("y"), z = p("z");
        return cpow(1.0 - y - z, -a) * f21(a, cc - b, cc, y / (y + z - 1.0), cfg);
    };
    return c;
}

IdentityCase manocha(bool reduced) {
    IdentityCase c;
    c.id = reduced ? "manocha-reduced" : "manocha";
    c.anchor = reduced ? "Manocha integral at eta = c" : "Manocha integral";
    c.cost_class = CostClass::SingleIntegral;
    c.tol = 1e-8;
    const std::string inner = reduced ? "c" : "eta";
    c.constraints = {chain_constraint("Re(d) > Re(lambda) > 0",
                                      [](const P& p) { return std::vector<Complex>{p("d"), p("lambda"), 0.0}; }),
                     chain_constraint("Re(e) > Re(" + inner + ") > 0",
                                      [inner](const P& p) { return std::vector<Complex>{p("e"), p(inner), 0.0}; }),
                     f2_domain()};
    c.propose = [reduced, inner](std::mt19937_64& rng, int) -> std::optional<P> {
        Draw d(rng);
        P p;
        for (const char* k : {"a", "ap", "b", "c", "d", "e", "lambda"}) p.values[k] = d.param();
        if (!reduced) p.values["eta"] = d.param();
        p.arguments = f2_arguments(d);
        if (!decreasing({p.re("d"), p.re("lambda")}, kGap) || !decreasing({p.re("e"), p.re(inner)}, kGap)) {
            return std::nullopt;
        }
        return p;
    };
    c.lhs = [](const P& p, const EvalConfig& cfg) {
        return appell_f2(p("a"), p("b"), p("c"), p("d"), p("e"), p("y"), p("z"), cfg.series_tol).value;
    };
    if (reduced) {
        c.rhs = [](const P& p, const EvalConfig& cfg) {
            const Complex a = p("a"), ap = p("ap"), b = p("b"), cc = p("c"), d = p("d"), e = p("e"),
                          l = p("lambda"), y = p("y"), z = p("z");
            return double_integral(
                [&](std::span<const double> t) {
                    const double v = t[0], w = t[1];
                    const Complex s = 1.0 - v * y - w * z;
                    return cpow(s, -a) * f21(a - ap, l - b, l, v * y / (-s), cfg) *
                           f21(ap, b - l, d - l, (1.0 - v) * y / s, cfg);
                },
                MeasureSpec::dirichlet(l, d - l), MeasureSpec::dirichlet(cc, e - cc), cfg);
        };
    } else {
        c.rhs = [](const P& p, const EvalConfig& cfg) {
            const Complex a = p("a"), ap = p("ap"), b = p("b"), cc = p("c"), d = p("d"), e = p("e"),
                          l = p("lambda"), et = p("eta"), y = p("y"), z = p("z");
            return double_integral(
                [&](std::span<const double> t) {
                    const double v = t[0], w = t[1];
                    const Complex s = 1.0 - v * y - w * z;
                    return cpow(s, -ap) * appell_f2(a - ap, b, cc, l, et, v * y, w * z, cfg.series_tol).value *
                           appell_f2(ap, b - l, cc - et, d - l, e - et, (1.0 - v) * y / s, (1.0 - w) * z / s,
                                     cfg.series_tol)
                               .value;
                },
                MeasureSpec::dirichlet(l, d - l), MeasureSpec::dirichlet(et, e - et), cfg);
        };
    }
    return c;
}

constexpr double kGeometricRatio = 0.3;
constexpr double kDiagonalDecay = 1.3;

CoeffSequence2D fa_sequence(int kind, const P& p) {
    switch (kind) {
        case 0: return CoeffSequence2D::delta();
        case 1:
            return CoeffSequence2D([](int m, int n) { return Complex(std::pow(kGeometricRatio, m + n)); },
                                   kGeometricRatio);
        default: {
            const Complex a = p("alpha1"), b = p("alpha2"), k = p("kappa");
            return CoeffSequence2D(
                [a, b, k](int m, int n) {
                    if (m != n) return Complex(0.0);
                    Complex c = 1.0;
                    for (int i = 0; i < m; ++i) c *= (a + double(i)) * (b + double(i)) / ((k + double(i)) * (i + 1.0));
                    return c;
                },
                kDiagonalDecay);
        }
    }
}

// Instantiation 0: both delta; 1: both geometric; 2: diagonal a, geometric b.
std::array<int, 2> fa_kinds(const P& p) {
    switch (p.index("variant")) {
        case 0: return {0, 0};
        case 1: return {1, 1};
        default: return {2, 1};
    }
}

Complex fa_lhs(const P& p, const EvalConfig& cfg) {
    const auto kinds = fa_kinds(p);
    const CoeffSequence2D ab = convolve2d(fa_sequence(kinds[0], p), fa_sequence(kinds[1], p));
    const Complex g3 = p("gamma3"), t3 = p("tau3"), g4 = p("gamma4"), t4 = p("tau4");
    const CoeffSequence2D cs(
        [ab, g3, t3, g4, t4](int m, int n) {
            Complex r = 1.0;
            for (int i = 0; i < m; ++i) r *= (g3 + double(i)) / (t3 + double(i));
            for (int i = 0; i < n; ++i) r *= (g4 + double(i)) / (t4 + double(i));
            return r * ab(m, n);
        },
        ab.decay_bound());
    const FaParams fp{p("alpha1") + p("lambda1"), p("beta1"), p("tau1"), p("alpha2") + p("lambda2"), p("beta2"),
                      p("tau2")};
    return generic_f_a(cs, fp, p("x1"), p("x2"), p("x3"), p("x4"), cfg.series_tol).value;
}

// One (x_j, u_j) axis of the four-fold integral: the products of the F^a and
// F^b factors that depend on u_j, integrated against its Dirichlet measure.
class FaAxis {
public:
    FaAxis(Complex alpha, Complex beta, Complex gamma, Complex tau, Complex lambda, Complex x, int order,
           const EvalConfig& cfg)
        : nodes_(discretize(MeasureSpec::dirichlet(gamma, tau - gamma), order)),
          f_([this, alpha, beta, gamma, x, &cfg](int m) {
              std::vector<Complex> v(nodes_.t.size());
              for (std::size_t i = 0; i < v.size(); ++i) v[i] = f21(alpha + double(m), beta, gamma, x * nodes_.t[i], cfg);
              return v;
          }),
          h_([this, beta, gamma, tau, lambda, x, &cfg](int n) {
              std::vector<Complex> v(nodes_.t.size());
              for (std::size_t i = 0; i < v.size(); ++i) {
                  const double u = nodes_.t[i];
                  const Complex s = 1.0 - u * x;
                  v[i] = cpow(s, -(lambda + double(n))) *
                         f21(lambda + double(n), beta - gamma, tau - gamma, (1.0 - u) * x / s, cfg);
              }
              return v;
          }) {}

    Complex operator()(int m, int n) {
        const long key = (static_cast<long>(m) << 20) | n;
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        const Complex v = weighted(nodes_, f_(m), h_(n));
        memo_.emplace(key, v);
        return v;
    }

private:
    NodeSet nodes_;
    Rows<std::function<std::vector<Complex>(int)>> f_, h_;
    std::unordered_map<long, Complex> memo_;
};

Complex fa_rhs(const P& p, const EvalConfig& cfg) {
    const auto kinds = fa_kinds(p);
    const CoeffSequence2D a = fa_sequence(kinds[0], p), b = fa_sequence(kinds[1], p);
    const int o = cfg.axis_order(4);
    FaAxis ax1(p("alpha1"), p("beta1"), p("gamma1"), p("tau1"), p("lambda1"), p("x1"), o, cfg);
    FaAxis ax2(p("alpha2"), p("beta2"), p("gamma2"), p("tau2"), p("lambda2"), p("x2"), o, cfg);
    const NodeSet n3 = discretize(MeasureSpec::dirichlet(p("gamma3"), p("tau3") - p("gamma3")), o);
    const NodeSet n4 = discretize(MeasureSpec::dirichlet(p("gamma4"), p("tau4") - p("gamma4")), o);
    Moments<NodeSet> m3(n3), m4(n4);
    const Complex x3 = p("x3"), x4 = p("x4");

    TruncationMonitor mon(cfg.series_tol);
    Complex sum = 0.0;
    constexpr int kMaxShells = 400;
    for (int s = 0; s < kMaxShells; ++s) {
        Complex shell = 0.0;
        for (int m1 = 0; m1 <= s; ++m1) {
            for (int m2 = 0; m1 + m2 <= s; ++m2) {
                const Complex ca = a(m1, m2);
                if (ca == 0.0) continue;
                for (int n1 = 0; m1 + m2 + n1 <= s; ++n1) {
                    const int n2 = s - m1 - m2 - n1;
                    const Complex cb = b(n1, n2);
                    if (cb == 0.0) continue;
                    const int k3 = m1 + n1, k4 = m2 + n2;
                    shell += ca * cb * std::pow(x3, k3) * std::pow(x4, k4) * m3(k3) * m4(k4) * ax1(m1, n1) *
                             ax2(m2, n2);
                }
            }
        }
        sum += shell;
        if (mon.add(shell, sum)) return sum;
    }
    throw ConvergenceError("fa-erdelyi: quadruple sum did not converge");
}

IdentityCase fa_erdelyi() {
    IdentityCase c;
    c.id = "fa-erdelyi";
    c.anchor = "Theorem 3.3";
    c.cost_class = CostClass::TripleIntegral;
    c.tol = 1e-8;
    for (int j = 1; j <= 4; ++j) {
        const std::string g = "gamma" + std::to_string(j), t = "tau" + std::to_string(j);
        c.constraints.push_back(chain_constraint(
            "Re(" + t + ") > Re(" + g + ") > 0", [g, t](const P& p) { return std::vector<Complex>{p(t), p(g), 0.0}; }));
    }
    c.constraints.push_back(Constraint{"|x1|, |x2| < 1", [](const P& p) {
                                           return std::abs(p("x1")) < 1.0 && std::abs(p("x2")) < 1.0;
                                       }});
    c.propose = [](std::mt19937_64& rng, int index) -> std::optional<P> {
        Draw d(rng);
        P p;
        for (const char* k : {"alpha1", "beta1", "gamma1", "tau1", "alpha2", "beta2", "gamma2", "tau2", "gamma3",
                              "tau3", "gamma4", "tau4", "lambda1", "lambda2", "kappa"}) {
            p.values[k] = d.param();
        }
        p.values["variant"] = index % 3;
        const Complex x1 = d.disc(0.5), x2 = d.disc(0.5);
        p.arguments = {{"x1", x1},
                       {"x2", x2},
                       {"x3", d.disc(0.35 * (1.0 - std::abs(x1)))},
                       {"x4", d.disc(0.35 * (1.0 - std::abs(x2)))}};
        for (int j = 1; j <= 4; ++j) {
            if (!decreasing({p.re("tau" + std::to_string(j)), p.re("gamma" + std::to_string(j))}, kGap)) {
                return std::nullopt;
            }
        }
        if (index % 3 == 2 && fa_sequence(2, p).bound_ratio(30) > 1.0) return std::nullopt;
        return p;
    };
    c.lhs = fa_lhs;
    c.rhs = fa_rhs;
    return c;
}

}  // namespace

void add_classical_cases(std::vector<IdentityCase>& out) {
    out.push_back(euler(false));
    out.push_back(euler(true));
    out.push_back(bateman());
    out.push_back(erdelyi1());
    out.push_back(erdelyi2());
    out.push_back(erdelyi3());
    out.push_back(fk_erdelyi());
    out.push_back(f2_curious());
    out.push_back(f2_reduction());
    out.push_back(manocha(false));
    out.push_back(manocha(true));
    out.push_back(fa_erdelyi());
    out.push_back(fk_cross_form());
}

}  // namespace saranfk::detail
