#include <cmath>

#include "identities.hpp"
#include "saranfk/qkernels.hpp"

namespace saranfk::detail {

namespace {

using P = ParameterPoint;

constexpr double kGap = 0.1;
// Lattice-weight decay exponents stay at or above this value.
constexpr double kDecay = 0.6;
// Assumed bound on the per-axis integrands when cutting lattices.
constexpr double kLatticeBound = 10.0;
constexpr double kArg = 0.3;

QLattice lattice(const QMeasureSpec& s, const EvalConfig& cfg) {
    QLattice lat = q_measure_lattice(s, cfg.q(), kLatticeBound, 0.0, cfg.cutoff_factor);
    if (cfg.lattice_cap > 0 && static_cast<int>(lat.t.size()) > cfg.lattice_cap) {
        lat.t.resize(cfg.lattice_cap);
        lat.w.resize(cfg.lattice_cap);
    }
    return lat;
}

QLattice dirichlet_lattice(Complex a, Complex b, const EvalConfig& cfg) {
    return lattice(QMeasureSpec::q_dirichlet(a, b), cfg);
}

Complex qb(Complex e, const EvalConfig& cfg) { return cfg.q().pow(e); }

Complex phi21(Complex a, Complex b, Complex c, Complex z, const EvalConfig& cfg) {
    const Complex up[] = {a, b};
    const Complex lo[] = {c};
    return rphis(up, lo, z, cfg.q(), cfg.series_tol).value;
}

Complex phi32(Complex a, Complex b, Complex c, Complex d, Complex e, Complex z, const EvalConfig& cfg) {
    const Complex up[] = {a, b, c};
    const Complex lo[] = {d, e};
    return rphis(up, lo, z, cfg.q(), cfg.series_tol).value;
}

template <class Fn>
std::vector<Complex> at_nodes(const QLattice& lat, Fn&& fn) {
    std::vector<Complex> v(lat.t.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(lat.t[i]);
    return v;
}

/// prod_i (a_i;q)_k / prod_j (b_j;q)_k, grown on demand.
class QCoef {
public:
    QCoef(std::vector<Complex> num, std::vector<Complex> den, const QContext& ctx)
        : num_(std::move(num)), den_(std::move(den)), q_(ctx.q()), c_{1.0} {}
    Complex operator()(int k) {
        while (static_cast<int>(c_.size()) <= k) {
            const double qk = std::pow(q_, static_cast<double>(c_.size() - 1));
            Complex r = 1.0;
            for (Complex a : num_) r *= 1.0 - a * qk;
            for (Complex b : den_) r /= 1.0 - b * qk;
            c_.push_back(c_.back() * r);
        }
        return c_[k];
    }

private:
    std::vector<Complex> num_, den_;
    double q_;
    std::vector<Complex> c_;
};

void draw_params(Draw& d, P& p, std::initializer_list<const char*> names) {
    for (const char* k : names) p.values[k] = d.param();
}

std::string idx(const char* name, int i) { return std::string(name) + std::to_string(i); }

Constraint positive(const std::string& name) {
    return Constraint{"Re(" + name + ") > 0", [name](const P& p) { return p.re(name) > 0.0; }};
}

Constraint greater(const std::string& a, const std::string& b) {
    return chain_constraint("Re(" + a + ") > Re(" + b + ") > 0",
                            [a, b](const P& p) { return std::vector<Complex>{p(a), p(b), 0.0}; });
}

Constraint small_arguments(std::vector<std::string> names) {
    return Constraint{"arguments of modulus at most 0.3", [names](const P& p) {
                          for (const auto& n : names) {
                              if (std::abs(p(n)) > kArg) return false;
                          }
                          return true;
                      }};
}

// Positivity hypotheses of the moment-form measure with moments
// (q^nu, q^lambda; q)_l / (q^gamma, q^eta; q)_l.
void moment_form_constraints(IdentityCase& c, const std::string& nu, const std::string& lambda,
                             const std::string& gamma, const std::string& eta) {
    c.constraints.push_back(positive(nu));
    c.constraints.push_back(positive(lambda));
    c.constraints.push_back(Constraint{"Re(" + gamma + "+" + eta + "-" + lambda + "-" + nu + ") > 0",
                                       [=](const P& p) { return (p(gamma) + p(eta) - p(lambda) - p(nu)).real() > 0.0; }});
}

bool moment_form_ok(const P& p, const std::string& nu, const std::string& lambda, const std::string& gamma,
                    const std::string& eta) {
    return p.re(nu) >= kDecay && p.re(gamma) + p.re(eta) - p.re(lambda) - p.re(nu) >= kGap;
}

QLattice moment_lattice(const P& p, const std::string& nu, const std::string& lambda, const std::string& gamma,
                        const std::string& eta, const EvalConfig& cfg) {
    return lattice(QMeasureSpec::moment_form(p(nu), p(lambda), p(gamma), p(eta)), cfg);
}

FkParams fk_of(const P& p) {
    return {p("alpha1"), p("alpha2"), p("beta1"), p("beta2"), p("gamma1"), p("gamma2"), p("gamma3")};
}

Complex phik_lhs(const P& p, const EvalConfig& cfg) {
    return phi_k_q(fk_of(p), p("x"), p("y"), p("z"), cfg.q(), cfg.series_tol).value;
}

void xyz(Draw& d, P& p) { p.arguments = {{"x", d.disc(kArg)}, {"y", d.disc(kArg)}, {"z", d.disc(kArg)}}; }

IdentityCase base(const char* id, const char* anchor, CostClass cost, double tol) {
    IdentityCase c;
    c.id = id;
    c.anchor = anchor;
    c.cost_class = cost;
    c.tol = tol;
    c.uses_q = true;
    return c;
}

IdentityCase gasper_q_erdelyi1() {
    IdentityCase c = base("gasper-q-erdelyi-1", "Gasper q-Erdelyi integral, first form", CostClass::QLattice,
                          default_tolerance(CostClass::QLattice));
    c.constraints = {greater("gamma", "lambda"), small_arguments({"x"})};
    c.propose = [](std::mt19937_64& rng, int) -> std::optional<P> {
        Draw d(rng);
        P p;
        draw_params(d, p, {"alpha", "alphap", "beta", "gamma", "lambda"});
        p.arguments = {{"x", d.disc(kArg, 0.02)}};
        if (!decreasing({p.re("gamma"), p.re("lambda")}, kGap) || p.re("lambda") < kDecay) return std::nullopt;
        return p;
    };
    c.lhs = [](const P& p, const EvalConfig& cfg) {
        return phi21_tilde(p("alpha"), p("beta"), p("gamma"), p("x"), cfg.q(), cfg.series_tol).value;
    };
    c.rhs = [](const P& p, const EvalConfig& cfg) {
        const Complex a = p("alpha"), ap = p("alphap"), b = p("beta"), g = p("gamma"), l = p("lambda"), x = p("x");
        const QContext& ctx = cfg.q();
        const QLattice lat = dirichlet_lattice(l, g - l, cfg);
        const Complex qap = qb(ap, cfg);
        const auto f = at_nodes(lat, [&](double t) {
            const Complex X = x * t;
            return q_pochhammer_inf(X * qap, ctx) / q_pochhammer_inf(X, ctx) *
                   phi21(qb(a - ap, cfg), qb(b, cfg), qb(l, cfg), X * qap, cfg) *
                   phi32(qap, qb(b - l, cfg), 1.0 / t, qb(g - l, cfg), ctx.q() / X, ctx.q(), cfg);
        });
        return weighted(lat, f);
    };
    return c;
}

IdentityCase gasper_q_erdelyi3() {
    IdentityCase c = base("gasper-q-erdelyi-3", "Gasper q-Erdelyi integral, third form", CostClass::QLattice,
                          default_tolerance(CostClass::QLattice));
    moment_form_constraints(c, "nu", "lambda", "gamma", "eta");
    c.constraints.push_back(small_arguments({"x"}));
    c.propose = [](std::mt19937_64& rng, int) -> std::optional<P> {
        Draw d(rng);
        P p;
        draw_params(d, p, {"alpha", "beta", "gamma", "eta", "lambda", "nu"});
        p.arguments = {{"x", d.disc(kArg)}};
        if (!moment_form_ok(p, "nu", "lambda", "gamma", "eta")) return std::nullopt;
        return p;
    };
    c.lhs = [](const P& p, const EvalConfig& cfg) {
        return phi21_tilde(p("alpha"), p("beta"), p("gamma"), p("x"), cfg.q(), cfg.series_tol).value;
    };
    c.rhs = [](const P& p, const EvalConfig& cfg) {
        const QLattice lat = lattice(
            QMeasureSpec::q_hypergeometric(p("eta") - p("lambda"), p("gamma") - p("lambda"),
                                           p("gamma") - p("lambda") + p("eta") - p("nu"), p("nu")),
            cfg);
        const Complex x = p("x");
        const auto f = at_nodes(lat, [&](double t) {
            return phi32(qb(p("alpha"), cfg), qb(p("beta"), cfg), qb(p("eta"), cfg), qb(p("lambda"), cfg),
                         qb(p("nu"), cfg), x * t, cfg);
        });
        return weighted(lat, f);
    };
    return c;
}

// sum_p coef(p) z^p M(p) A_p B_p with per-axis integrals A_p and B_p.
template <class Coef, class Mom, class AxA, class AxB>
Complex p_sum(Coef&& coef, Complex z, Mom&& mom, AxA&& a, AxB&& b, double tol, const char* what) {
    Complex zp = 1.0;
    return index_sum(
        [&](int p) {
            const Complex c = coef(p) * zp * mom(p);
            zp *= z;
            if (c == 0.0) return Complex(0.0);
            return c * a(p) * b(p);
        },
        tol, what);
}

IdentityCase ernst() {
    IdentityCase c = base("ernst-q-bateman", "Ernst q-Bateman integral", CostClass::QLattice,
                          default_tolerance(CostClass::QLattice));
    for (int i = 1; i <= 3; ++i) c.constraints.push_back(greater(idx("gamma", i), idx("nu", i)));
    c.constraints.push_back(small_arguments({"x", "y", "z"}));
    c.propose = [](std::mt19937_64& rng, int) -> std::optional<P> {
        Draw d(rng);
        P p;
        draw_params(d, p, {"alpha1", "alpha2", "beta1", "beta2", "gamma1", "gamma2", "gamma3", "nu1", "nu2", "nu3"});
        xyz(d, p);
        for (int i = 1; i <= 3; ++i) {
            if (!decreasing({p.re(idx("gamma", i)), p.re(idx("nu", i))}, kGap) || p.re(idx("nu", i)) < kDecay) {
                return std::nullopt;
            }
        }
        return p;
    };
    c.lhs = phik_lhs;
    c.rhs = [](const P& p, const EvalConfig& cfg) {
        const QLattice U = dirichlet_lattice(p("nu1"), p("gamma1") - p("nu1"), cfg);
        const QLattice V = dirichlet_lattice(p("nu2"), p("gamma2") - p("nu2"), cfg);
        const QLattice W = dirichlet_lattice(p("nu3"), p("gamma3") - p("nu3"), cfg);
        const Complex x = p("x"), y = p("y");
        QCoef coef({qb(p("alpha2"), cfg), qb(p("beta1"), cfg)}, {qb(p("nu3"), cfg), cfg.q().q()}, cfg.q());
        Moments<QLattice> mw(W);
        auto a = [&](int k) {
            return weighted(U, at_nodes(U, [&](double u) {
                                return phi21(qb(p("beta1") + double(k), cfg), qb(p("alpha1"), cfg), qb(p("nu1"), cfg),
                                             x * u, cfg);
                            }));
        };
        auto b = [&](int k) {
            return weighted(V, at_nodes(V, [&](double v) {
                                return phi21(qb(p("alpha2") + double(k), cfg), qb(p("beta2"), cfg), qb(p("nu2"), cfg),
                                             y * v, cfg);
                            }));
        };
        return p_sum(coef, p("z"), mw, a, b, cfg.series_tol, "ernst-q-bateman");
    };
    return c;
}

// Joshi-Vyas family: instantiation index i uses k = 1 + i % 3 variables and a
// polynomial (i even) or product-hypergeometric (i odd) coefficient sequence.
constexpr int kPolyDegree = 2;

std::string poly_key(int n1, int n2, int n3) {
    return "c_" + std::to_string(n1) + std::to_string(n2) + std::to_string(n3);
}

Complex tensor_sum(const std::vector<QLattice>& lats, const std::function<Complex(const std::vector<int>&)>& f) {
    const std::size_t k = lats.size();
    std::vector<int> at(k, 0);
    Complex sum = 0.0;
    while (true) {
        Complex w = 1.0;
        for (std::size_t j = 0; j < k; ++j) w *= lats[j].w[at[j]];
        sum += w * f(at);
        std::size_t j = 0;
        while (j < k && ++at[j] == static_cast<int>(lats[j].t.size())) at[j++] = 0;
        if (j == k) return sum;
    }
}

IdentityCase joshi_vyas() {
    IdentityCase c = base("joshi-vyas-general", "Theorem 4.1", CostClass::QLattice,
                          default_tolerance(CostClass::QLattice));
    c.constraints.push_back(Constraint{"moment-form measure hypotheses on every axis", [](const P& p) {
                                           const int k = p.index("k");
                                           for (int j = 1; j <= k; ++j) {
                                               const Complex nu = p(idx("nu", j)), l = p(idx("lambda", j));
                                               const Complex g = p(idx("gamma", j)), e = p(idx("eta", j));
                                               if (!(nu.real() > 0 && l.real() > 0 && (g + e - l - nu).real() > 0)) {
                                                   return false;
                                               }
                                               if (std::abs(p(idx("z", j))) > kArg) return false;
                                           }
                                           return true;
                                       }});
    c.propose = [](std::mt19937_64& rng, int index) -> std::optional<P> {
        Draw d(rng);
        P p;
        const int k = 1 + index % 3;
        const bool hyper = index % 2 == 1;
        p.values["k"] = k;
        p.values["family"] = hyper ? 1 : 0;
        for (int j = 1; j <= k; ++j) {
            for (const char* n : {"nu", "lambda", "gamma", "eta"}) p.values[idx(n, j)] = d.param();
            if (hyper) p.values[idx("a", j)] = d.param();
            p.arguments[idx("z", j)] = d.disc(kArg);
            if (!moment_form_ok(p, idx("nu", j), idx("lambda", j), idx("gamma", j), idx("eta", j))) {
                return std::nullopt;
            }
        }
        if (!hyper) {
            for (int n1 = 0; n1 <= kPolyDegree; ++n1)
                for (int n2 = 0; n2 <= (k >= 2 ? kPolyDegree : 0); ++n2)
                    for (int n3 = 0; n3 <= (k >= 3 ? kPolyDegree : 0); ++n3)
                        p.values[poly_key(n1, n2, n3)] = d.uniform(-1.0, 1.0);
        }
        return p;
    };
    // Moment factor (q^nu, q^lambda; q)_n / (q^gamma, q^eta; q)_n of axis j.
    auto moment = [](const P& p, int j, int n, const EvalConfig& cfg) {
        const QContext& ctx = cfg.q();
        return q_pochhammer(qb(p(idx("nu", j)), cfg), n, ctx) * q_pochhammer(qb(p(idx("lambda", j)), cfg), n, ctx) /
               (q_pochhammer(qb(p(idx("gamma", j)), cfg), n, ctx) * q_pochhammer(qb(p(idx("eta", j)), cfg), n, ctx));
    };
    c.lhs = [moment](const P& p, const EvalConfig& cfg) {
        const int k = p.index("k");
        if (p.index("family") == 1) {
            Complex v = 1.0;
            for (int j = 1; j <= k; ++j) {
                v *= phi32(qb(p(idx("a", j)), cfg), qb(p(idx("nu", j)), cfg), qb(p(idx("lambda", j)), cfg),
                           qb(p(idx("gamma", j)), cfg), qb(p(idx("eta", j)), cfg), p(idx("z", j)), cfg);
            }
            return v;
        }
        Complex v = 0.0;
        for (const auto& [key, coef] : p.values) {
            if (key.rfind("c_", 0) != 0) continue;
            Complex term = coef;
            for (int j = 1; j <= k; ++j) {
                const int n = key[1 + j] - '0';
                term *= moment(p, j, n, cfg) * std::pow(p(idx("z", j)), n);
            }
            v += term;
        }
        return v;
    };
    c.rhs = [](const P& p, const EvalConfig& cfg) {
        const int k = p.index("k");
        const bool hyper = p.index("family") == 1;
        std::vector<QLattice> lats;
        // vals[j][i][n]: per-axis factor of node i; for the polynomial family
        // the power (z_j t_i)^n, otherwise the single closed-form product.
        std::vector<std::vector<std::vector<Complex>>> vals(k);
        for (int j = 1; j <= k; ++j) {
            lats.push_back(moment_lattice(p, idx("nu", j), idx("lambda", j), idx("gamma", j), idx("eta", j), cfg));
            const QLattice& lat = lats.back();
            const Complex z = p(idx("z", j));
            for (double t : lat.t) {
                if (hyper) {
                    const Complex Z = z * t;
                    vals[j - 1].push_back({q_pochhammer_inf(qb(p(idx("a", j)), cfg) * Z, cfg.q()) /
                                           q_pochhammer_inf(Z, cfg.q())});
                } else {
                    std::vector<Complex> pw{1.0};
                    for (int n = 1; n <= kPolyDegree; ++n) pw.push_back(pw.back() * z * t);
                    vals[j - 1].push_back(pw);
                }
            }
        }
        std::vector<std::pair<std::array<int, 3>, Complex>> coefs;
        if (!hyper) {
            for (const auto& [key, coef] : p.values) {
                if (key.rfind("c_", 0) == 0) coefs.push_back({{key[2] - '0', key[3] - '0', key[4] - '0'}, coef});
            }
        }
        return tensor_sum(lats, [&](const std::vector<int>& at) {
            if (hyper) {
                Complex v = 1.0;
                for (int j = 0; j < k; ++j) v *= vals[j][at[j]][0];
                return v;
            }
            Complex v = 0.0;
            for (const auto& [n, coef] : coefs) {
                Complex term = coef;
                for (int j = 0; j < k; ++j) term *= vals[j][at[j]][n[j]];
                v += term;
            }
            return v;
        });
    };
    return c;
}

// phi^(3) integral; with `with_x` false the x-axis is dropped (x = 0).
IdentityCase qfk_phi3(bool with_x) {
    IdentityCase c = base(with_x ? "qfk-phi3" : "qfk-phi3-x0", with_x ? "Corollary 4.2" : "Corollary 4.2 at x = 0",
                          CostClass::QLattice, default_tolerance(CostClass::QLattice));
    const int first = with_x ? 1 : 2;
    for (int i = first; i <= 3; ++i) {
        moment_form_constraints(c, idx("nu", i), idx("lambda", i), idx("gamma", i), idx("eta", i));
    }
    c.constraints.push_back(small_arguments({"x", "y", "z"}));
    c.propose = [with_x, first](std::mt19937_64& rng, int) -> std::optional<P> {
        Draw d(rng);
        P p;
        draw_params(d, p, {"alpha1", "alpha2", "beta1", "beta2", "gamma1", "gamma2", "gamma3"});
        for (int i = first; i <= 3; ++i) {
            for (const char* n : {"eta", "lambda", "nu"}) p.values[idx(n, i)] = d.param();
        }
        xyz(d, p);
        if (!with_x) p.arguments["x"] = 0.0;
        for (int i = first; i <= 3; ++i) {
            if (!moment_form_ok(p, idx("nu", i), idx("lambda", i), idx("gamma", i), idx("eta", i))) {
                return std::nullopt;
            }
        }
        return p;
    };
    c.lhs = phik_lhs;
    c.rhs = [with_x](const P& p, const EvalConfig& cfg) {
        const QLattice V = moment_lattice(p, "nu2", "lambda2", "gamma2", "eta2", cfg);
        const QLattice W = moment_lattice(p, "nu3", "lambda3", "gamma3", "eta3", cfg);
        QLattice U;
        if (with_x) U = moment_lattice(p, "nu1", "lambda1", "gamma1", "eta1", cfg);
        const Complex x = p("x"), y = p("y");
        QCoef coef({qb(p("alpha2"), cfg), qb(p("beta1"), cfg), qb(p("eta3"), cfg)},
                   {qb(p("nu3"), cfg), qb(p("lambda3"), cfg), cfg.q().q()}, cfg.q());
        Moments<QLattice> mw(W);
        auto a = [&](int k) -> Complex {
            if (!with_x) return 1.0;
            return weighted(U, at_nodes(U, [&](double t) {
                                return phi32(qb(p("beta1") + double(k), cfg), qb(p("alpha1"), cfg), qb(p("eta1"), cfg),
                                             qb(p("nu1"), cfg), qb(p("lambda1"), cfg), x * t, cfg);
                            }));
        };
        auto b = [&](int k) {
            return weighted(V, at_nodes(V, [&](double t) {
                                return phi32(qb(p("alpha2") + double(k), cfg), qb(p("beta2"), cfg), qb(p("eta2"), cfg),
                                             qb(p("nu2"), cfg), qb(p("lambda2"), cfg), y * t, cfg);
                            }));
        };
        return p_sum(coef, p("z"), mw, a, b, cfg.series_tol, "qfk-phi3");
    };
    return c;
}

IdentityCase qfk_lr() {
    IdentityCase c = base("qfk-lr", "Corollary 4.3", CostClass::QLattice, default_tolerance(CostClass::QLattice));
    moment_form_constraints(c, "nu1", "alpha1", "gamma1", "eta1");
    moment_form_constraints(c, "nu2", "beta2", "gamma2", "eta2");
    c.constraints.push_back(greater("gamma3", "nu3"));
    c.constraints.push_back(small_arguments({"x", "y", "z"}));
    c.propose = [](std::mt19937_64& rng, int) -> std::optional<P> {
        Draw d(rng);
        P p;
        draw_params(d, p,
                    {"alpha1", "alpha2", "beta1", "beta2", "gamma1", "gamma2", "gamma3", "eta1", "eta2", "nu1", "nu2",
                     "nu3"});
        xyz(d, p);
        if (!moment_form_ok(p, "nu1", "alpha1", "gamma1", "eta1") || !moment_form_ok(p, "nu2", "beta2", "gamma2", "eta2") ||
            !decreasing({p.re("gamma3"), p.re("nu3")}, kGap) || p.re("nu3") < kDecay) {
            return std::nullopt;
        }
        return p;
    };
    c.lhs = phik_lhs;
    c.rhs = [](const P& p, const EvalConfig& cfg) {
        const QLattice U = moment_lattice(p, "nu1", "alpha1", "gamma1", "eta1", cfg);
        const QLattice V = moment_lattice(p, "nu2", "beta2", "gamma2", "eta2", cfg);
        const QLattice W = dirichlet_lattice(p("nu3"), p("gamma3") - p("nu3"), cfg);
        const Complex x = p("x"), y = p("y");
        QCoef coef({qb(p("alpha2"), cfg), qb(p("beta1"), cfg)}, {qb(p("nu3"), cfg), cfg.q().q()}, cfg.q());
        Moments<QLattice> mw(W);
        auto a = [&](int k) {
            return weighted(U, at_nodes(U, [&](double t) {
                                return phi21(qb(p("beta1") + double(k), cfg), qb(p("eta1"), cfg), qb(p("nu1"), cfg),
                                             x * t, cfg);
                            }));
        };
        auto b = [&](int k) {
            return weighted(V, at_nodes(V, [&](double t) {
                                return phi21(qb(p("alpha2") + double(k), cfg), qb(p("eta2"), cfg), qb(p("nu2"), cfg),
                                             y * t, cfg);
                            }));
        };
        return p_sum(coef, p("z"), mw, a, b, cfg.series_tol, "qfk-lr");
    };
    return c;
}

IdentityCase gasper_discrete() {
    IdentityCase c = base("gasper-discrete", "Gasper finite expansion of 3phi2", CostClass::Cheap, 1e-12);
    c.propose = [](std::mt19937_64& rng, int index) -> std::optional<P> {
        Draw d(rng);
        P p;
        draw_params(d, p, {"alpha", "beta", "gamma", "delta", "lambda", "mu", "nu"});
        p.values["n"] = index % 4;
        const double l = p.re("lambda");
        if (std::abs(l - std::round(l)) < kGap ||
            !off_poles({p("gamma") + p("mu") - p("lambda") - p("nu")})) {
            return std::nullopt;
        }
        return p;
    };
    c.lhs = [](const P& p, const EvalConfig& cfg) {
        const Complex q = cfg.q().q();
        return phi32(qb(p("alpha"), cfg), qb(p("beta"), cfg), std::pow(q, -p.index("n")), qb(p("gamma"), cfg),
                     qb(p("delta"), cfg), q, cfg);
    };
    c.rhs = [](const P& p, const EvalConfig& cfg) {
        return gasper_discrete_3phi2(qb(p("alpha"), cfg), qb(p("beta"), cfg), qb(p("gamma"), cfg), qb(p("delta"), cfg),
                                     qb(p("lambda"), cfg), qb(p("mu"), cfg), qb(p("nu"), cfg), p.index("n"), cfg.q());
    };
    return c;
}

DiscreteParams discrete_params(const P& p) {
    return {p("alpha1"), p("beta2"),   p("gamma1"), p("gamma2"), p("gamma3"),
            p("lambda1"), p("lambda2"), p("mu1"),    p("mu2"),    p("mu3")};
}

// phi^(3) of the finite-sum analogue with bounds (r, s, t); `a`, `b` and
// `g3` are the exponents in the first slot of each group.
Phi3Spec discrete_phi3(const P& p, Complex a, Complex b, Complex h1, Complex h2, Complex g3, int r, int s, int t,
                       const EvalConfig& cfg) {
    const double q = cfg.q().q();
    Phi3Spec sp;
    sp.b1 = {qb(p("alpha2"), cfg)};
    sp.b2 = {qb(p("beta1"), cfg)};
    sp.c = {qb(a, cfg), std::pow(q, -r)};
    sp.c1 = {qb(b, cfg), std::pow(q, -s)};
    sp.c2 = {std::pow(q, -t)};
    sp.h = {qb(h1, cfg), p("d1")};
    sp.h1 = {qb(h2, cfg), p("d2")};
    sp.h2 = {qb(g3, cfg), p("d3")};
    return sp;
}

IdentityCase fk_discrete() {
    IdentityCase c = base("fk-discrete", "Theorem 4.4", CostClass::Cheap, 1e-12);
    c.propose = [](std::mt19937_64& rng, int index) -> std::optional<P> {
        Draw d(rng);
        P p;
        draw_params(d, p,
                    {"alpha1", "alpha2", "beta1", "beta2", "gamma1", "gamma2", "gamma3", "lambda1", "lambda2", "mu1",
                     "mu2", "mu3"});
        for (const char* k : {"d1", "d2", "d3"}) p.values[k] = d.uniform(0.1, 0.9);
        const bool odd = index % 2 == 1;
        p.values["r"] = odd ? 3 : 2;
        p.values["s"] = odd ? 1 : 2;
        p.values["t"] = 2;
        const double a1 = p.re("alpha1"), b2 = p.re("beta2");
        if (std::abs(a1 - std::round(a1)) < kGap || std::abs(b2 - std::round(b2)) < kGap ||
            !off_poles({p("gamma1") + p("lambda1") - p("alpha1") - p("mu1"),
                        p("gamma2") + p("lambda2") - p("beta2") - p("mu2")})) {
            return std::nullopt;
        }
        return p;
    };
    c.lhs = [](const P& p, const EvalConfig& cfg) {
        const double q = cfg.q().q();
        const Phi3Spec sp = discrete_phi3(p, p("alpha1"), p("beta2"), p("gamma1"), p("gamma2"), p("gamma3"),
                                          p.index("r"), p.index("s"), p.index("t"), cfg);
        return phi3(sp, q, q, q, cfg.q(), cfg.series_tol).value;
    };
    c.rhs = [](const P& p, const EvalConfig& cfg) {
        const double q = cfg.q().q();
        const DiscreteParams w = discrete_params(p);
        const int r = p.index("r"), s = p.index("s"), t = p.index("t");
        Complex sum = 0.0;
        for (int i = 0; i <= r; ++i)
            for (int j = 0; j <= s; ++j)
                for (int k = 0; k <= t; ++k) {
                    const Phi3Spec sp =
                        discrete_phi3(p, p("lambda1"), p("lambda2"), p("mu1"), p("mu2"), p("mu3"), i, j, k, cfg);
                    sum += discrete_weight(WeightKind::W1, i, r, w, cfg.q()) *
                           discrete_weight(WeightKind::W2, j, s, w, cfg.q()) *
                           discrete_weight(WeightKind::W3, k, t, w, cfg.q()) *
                           phi3(sp, q, q, q, cfg.q(), cfg.series_tol).value;
                }
        return sum;
    };
    return c;
}

// Limit weights as a lattice over q^i.
QLattice limit_axis(WeightKind which, const DiscreteParams& w, double decay, const EvalConfig& cfg) {
    constexpr int kMin = 40, kCap = 5000;
    const QContext& ctx = cfg.q();
    const double rho = std::pow(ctx.q(), decay);
    QLattice lat;
    int stop = kCap;
    for (int i = 0; i < stop; ++i) {
        const Complex wi = discrete_weight_limit(which, i, w, ctx);
        lat.t.push_back(std::pow(ctx.q(), i));
        lat.w.push_back(wi);
        if (stop == kCap && i + 1 >= kMin &&
            2.0 * std::abs(wi) * rho / (1.0 - rho) * kLatticeBound < ctx.jackson_tail_tol()) {
            stop = static_cast<int>(std::ceil((i + 1) * cfg.cutoff_factor));
        }
    }
    if (stop == kCap) throw ConvergenceError("limit weights decay too slowly");
    if (cfg.lattice_cap > 0 && static_cast<int>(lat.t.size()) > cfg.lattice_cap) {
        lat.t.resize(cfg.lattice_cap);
        lat.w.resize(cfg.lattice_cap);
    }
    return lat;
}

IdentityCase fk_discrete_limits() {
    IdentityCase c = base("fk-discrete-limits", "Theorem 4.4, limit r,s,t -> infinity", CostClass::QLattice,
                          default_tolerance(CostClass::QLattice));
    c.constraints = {positive("alpha1"),
                     positive("mu1"),
                     positive("lambda1"),
                     Constraint{"Re(gamma1+lambda1-alpha1-mu1) > 0",
                                [](const P& p) {
                                    return (p("gamma1") + p("lambda1") - p("alpha1") - p("mu1")).real() > 0.0;
                                }},
                     positive("beta2"),
                     positive("mu2"),
                     positive("lambda2"),
                     Constraint{"Re(gamma2+lambda2-beta2-mu2) > 0",
                                [](const P& p) {
                                    return (p("gamma2") + p("lambda2") - p("beta2") - p("mu2")).real() > 0.0;
                                }},
                     greater("gamma3", "mu3"),
                     small_arguments({"x", "y", "z"})};
    c.propose = [](std::mt19937_64& rng, int) -> std::optional<P> {
        Draw d(rng);
        P p;
        draw_params(d, p,
                    {"alpha1", "alpha2", "beta1", "beta2", "gamma1", "gamma2", "gamma3", "lambda1", "lambda2", "mu1",
                     "mu2", "mu3"});
        xyz(d, p);
        if (p.re("mu1") < kDecay || p.re("mu2") < kDecay || p.re("mu3") < kDecay ||
            p.re("gamma1") + p.re("lambda1") - p.re("alpha1") - p.re("mu1") < kGap ||
            p.re("gamma2") + p.re("lambda2") - p.re("beta2") - p.re("mu2") < kGap ||
            !decreasing({p.re("gamma3"), p.re("mu3")}, kGap)) {
            return std::nullopt;
        }
        return p;
    };
    c.lhs = phik_lhs;
    c.rhs = [](const P& p, const EvalConfig& cfg) {
        const DiscreteParams w = discrete_params(p);
        const QLattice U = limit_axis(WeightKind::W1, w, p.re("mu1"), cfg);
        const QLattice V = limit_axis(WeightKind::W2, w, p.re("mu2"), cfg);
        const QLattice W = limit_axis(WeightKind::W3, w, p.re("mu3"), cfg);
        const Complex x = p("x"), y = p("y");
        QCoef coef({qb(p("alpha2"), cfg), qb(p("beta1"), cfg)}, {qb(p("mu3"), cfg), cfg.q().q()}, cfg.q());
        Moments<QLattice> mw(W);
        auto a = [&](int k) {
            return weighted(U, at_nodes(U, [&](double t) {
                                return phi21(qb(p("beta1") + double(k), cfg), qb(p("lambda1"), cfg), qb(p("mu1"), cfg),
                                             x * t, cfg);
                            }));
        };
        auto b = [&](int k) {
            return weighted(V, at_nodes(V, [&](double t) {
                                return phi21(qb(p("alpha2") + double(k), cfg), qb(p("lambda2"), cfg), qb(p("mu2"), cfg),
                                             y * t, cfg);
                            }));
        };
        return p_sum(coef, p("z"), mw, a, b, cfg.series_tol, "fk-discrete-limits");
    };
    return c;
}

struct QErdelyi {
    QErdelyiParams e;
    explicit QErdelyi(const P& p)
        : e{p("alpha1"), p("alpha2"), p("beta1"),   p("beta2"),   p("gamma3"), p("eta1"),
            p("eta2"),   p("mu2"),    p("lambda1"), p("lambda2"), p("lambda3")} {}
};

// Per-axis factor of the q-Erdelyi integrand at shift k and inner index l:
//   (X q^{s+k})_inf / (X)_inf
//   * 3phi2(q^{s+k}, q^{d}, 1/t; q^{c}, q/X; q, q)
//   * 2phi1(q^{e+l}, q^{f}; q^{g}; q, X q^{s+k}),   X = x t.
class QErdelyiAxis {
public:
    QErdelyiAxis(QLattice lat, Complex x, Complex s, Complex d, Complex c, Complex e, Complex f, Complex g,
                 const EvalConfig& cfg)
        : lat_(std::move(lat)), x_(x), s_(s), d_(d), c_(c), e_(e), f_(f), g_(g), cfg_(cfg) {}

    Complex operator()(int k, int l) {
        const QContext& ctx = cfg_.q();
        while (static_cast<int>(rows_.size()) <= k) {
            const int kk = static_cast<int>(rows_.size());
            const Complex qs = qb(s_ + double(kk), cfg_);
            std::vector<Complex> row(lat_.t.size());
            for (std::size_t i = 0; i < row.size(); ++i) {
                const double t = lat_.t[i];
                const Complex X = x_ * t;
                row[i] = q_pochhammer_inf(X * qs, ctx) / q_pochhammer_inf(X, ctx) *
                         phi32(qs, qb(d_, cfg_), 1.0 / t, qb(c_, cfg_), ctx.q() / X, ctx.q(), cfg_);
            }
            rows_.push_back(std::move(row));
        }
        const Complex qs = qb(s_ + double(k), cfg_);
        Complex sum = 0.0;
        for (std::size_t i = 0; i < lat_.t.size(); ++i) {
            sum += lat_.w[i] * rows_[k][i] *
                   phi21(qb(e_ + double(l), cfg_), qb(f_, cfg_), qb(g_, cfg_), x_ * lat_.t[i] * qs, cfg_);
        }
        return sum;
    }

private:
    QLattice lat_;
    Complex x_, s_, d_, c_, e_, f_, g_;
    const EvalConfig& cfg_;
    std::vector<std::vector<Complex>> rows_;
};

IdentityCase qfk_erdelyi() {
    IdentityCase c = base("qfk-erdelyi", "Theorem 4.6", CostClass::QLattice, default_tolerance(CostClass::QLattice));
    c.constraints = {
        chain_constraint("Re(alpha1+eta1) > Re(lambda1) > 0",
                         [](const P& p) { return std::vector<Complex>{p("alpha1") + p("eta1"), p("lambda1"), 0.0}; }),
        chain_constraint("Re(beta2+mu2) > Re(lambda2) > 0",
                         [](const P& p) { return std::vector<Complex>{p("beta2") + p("mu2"), p("lambda2"), 0.0}; }),
        greater("gamma3", "beta1"), small_arguments({"x", "y", "z"})};
    c.propose = [](std::mt19937_64& rng, int) -> std::optional<P> {
        Draw d(rng);
        P p;
        draw_params(d, p,
                    {"alpha1", "alpha2", "beta1", "beta2", "gamma3", "eta1", "eta2", "mu2", "lambda1", "lambda2",
                     "lambda3"});
        xyz(d, p);
        for (const char* k : {"x", "y"}) {
            const Complex v = p(k);
            // q/(ux) enters a denominator; keep away from the positive real axis and 0
            if (std::abs(v) < 0.02 || (v.real() > 0 && std::abs(v.imag()) < 0.02)) return std::nullopt;
        }
        if (p.re("alpha1") + p.re("eta1") - p.re("lambda1") < kDecay ||
            p.re("beta2") + p.re("mu2") - p.re("lambda2") < kDecay || p.re("beta1") < kDecay ||
            !decreasing({p.re("gamma3"), p.re("beta1")}, kGap)) {
            return std::nullopt;
        }
        return p;
    };
    c.lhs = [](const P& p, const EvalConfig& cfg) {
        const QErdelyiParams e = QErdelyi(p).e;
        const FkParams f{e.alpha1, e.alpha2, e.beta1, e.beta2, e.alpha1 + e.eta1, e.beta2 + e.mu2, e.gamma3};
        return phi_k_q(f, p("x"), p("y"), p("z"), cfg.q(), cfg.series_tol).value;
    };
    c.rhs = [](const P& p, const EvalConfig& cfg) {
        const QErdelyiParams e = QErdelyi(p).e;
        QErdelyiAxis U(dirichlet_lattice(e.alpha1 - e.lambda1 + e.eta1, e.lambda1, cfg), p("x"), e.lambda3,
                       e.lambda1 - e.eta1, e.lambda1, e.beta1 - e.lambda3, e.alpha1, e.alpha1 - e.lambda1 + e.eta1, cfg);
        QErdelyiAxis V(dirichlet_lattice(e.beta2 - e.lambda2 + e.mu2, e.lambda2, cfg), p("y"), e.eta2,
                       e.lambda2 - e.mu2, e.lambda2, e.alpha2 - e.eta2, e.beta2, e.beta2 - e.lambda2 + e.mu2, cfg);
        const QLattice W = dirichlet_lattice(e.beta1, e.gamma3 - e.beta1, cfg);
        Moments<QLattice> mw(W);
        const double q = cfg.q().q();
        const Complex shift = qb(e.alpha2 - e.eta2, cfg);
        QCoef kc({qb(e.eta2, cfg)}, {q}, cfg.q());
        QCoef lc({qb(e.alpha2 - e.eta2, cfg)}, {q}, cfg.q());
        const Complex z = p("z");
        std::vector<Complex> zp{1.0}, sp{1.0};
        return shell_sum2(
            [&](int k, int l) {
                while (static_cast<int>(zp.size()) <= k + l) zp.push_back(zp.back() * z);
                while (static_cast<int>(sp.size()) <= k) sp.push_back(sp.back() * shift);
                const Complex coef = kc(k) * sp[k] * lc(l) * zp[k + l] * mw(k + l);
                if (coef == 0.0) return Complex(0.0);
                return coef * U(k, l) * V(k, l);
            },
            cfg.series_tol, "qfk-erdelyi");
    };
    return c;
}

IdentityCase qfk_erdelyi_simplified() {
    IdentityCase c = base("qfk-erdelyi-simplified", "Corollary 4.7", CostClass::QLattice,
                          default_tolerance(CostClass::QLattice));
    c.constraints = {positive("alpha1"), positive("eta1"), positive("beta2"), positive("mu2"),
                     greater("gamma3", "beta1"), small_arguments({"x", "y", "z"})};
    c.propose = [](std::mt19937_64& rng, int) -> std::optional<P> {
        Draw d(rng);
        P p;
        draw_params(d, p, {"alpha1", "alpha2", "beta1", "beta2", "gamma3", "eta1", "mu2"});
        xyz(d, p);
        if (p.re("alpha1") < kDecay || p.re("beta2") < kDecay || p.re("beta1") < kDecay ||
            !decreasing({p.re("gamma3"), p.re("beta1")}, kGap)) {
            return std::nullopt;
        }
        return p;
    };
    c.lhs = [](const P& p, const EvalConfig& cfg) {
        const FkParams f{p("alpha1"), p("alpha2"), p("beta1"), p("beta2"), p("alpha1") + p("eta1"),
                         p("beta2") + p("mu2"), p("gamma3")};
        return phi_k_q(f, p("x"), p("y"), p("z"), cfg.q(), cfg.series_tol).value;
    };
    c.rhs = [](const P& p, const EvalConfig& cfg) {
        const QContext& ctx = cfg.q();
        const QLattice U = dirichlet_lattice(p("alpha1"), p("eta1"), cfg);
        const QLattice V = dirichlet_lattice(p("beta2"), p("mu2"), cfg);
        const QLattice W = dirichlet_lattice(p("beta1"), p("gamma3") - p("beta1"), cfg);
        // rows of (X q^{s+k})_inf / (X)_inf, advanced by one factor per k
        auto start = [&](const QLattice& lat, Complex arg, Complex s) {
            return at_nodes(lat, [&](double t) {
                const Complex X = arg * t;
                return q_pochhammer_inf(X * qb(s, cfg), ctx) / q_pochhammer_inf(X, ctx);
            });
        };
        std::vector<Complex> ru = start(U, p("x"), p("beta1")), rv = start(V, p("y"), p("alpha2"));
        Moments<QLattice> mw(W);
        QCoef coef({qb(p("alpha2"), cfg)}, {ctx.q()}, ctx);
        const Complex x = p("x"), y = p("y"), z = p("z");
        const Complex qb1 = qb(p("beta1"), cfg), qa2 = qb(p("alpha2"), cfg);
        Complex zp = 1.0;
        double qk = 1.0;
        return index_sum(
            [&](int k) {
                if (k > 0) {
                    for (std::size_t i = 0; i < ru.size(); ++i) ru[i] /= 1.0 - x * U.t[i] * qb1 * (qk / ctx.q());
                    for (std::size_t i = 0; i < rv.size(); ++i) rv[i] /= 1.0 - y * V.t[i] * qa2 * (qk / ctx.q());
                }
                const Complex term = coef(k) * zp * mw(k) * weighted(U, ru) * weighted(V, rv);
                zp *= z;
                qk *= ctx.q();
                return term;
            },
            cfg.series_tol, "qfk-erdelyi-simplified");
    };
    return c;
}

IdentityCase phik_cross_form() {
    IdentityCase c = base("phik-cross-form", "q-F_K triple series vs re-expansion", CostClass::Cheap,
                          default_tolerance(CostClass::Cheap));
    c.constraints = {small_arguments({"x", "y", "z"})};
    c.propose = [](std::mt19937_64& rng, int) -> std::optional<P> {
        Draw d(rng);
        P p;
        draw_params(d, p, {"alpha1", "alpha2", "beta1", "beta2", "gamma1", "gamma2", "gamma3"});
        xyz(d, p);
        return p;
    };
    c.lhs = [](const P& p, const EvalConfig& cfg) {
        return phi_k_q_triple(fk_of(p), p("x"), p("y"), p("z"), cfg.q(), cfg.series_tol).value;
    };
    c.rhs = [](const P& p, const EvalConfig& cfg) {
        return phi_k_q_reexpand(fk_of(p), p("x"), p("y"), p("z"), cfg.q(), cfg.series_tol).value;
    };
    return c;
}

}  // namespace

void add_q_cases(std::vector<IdentityCase>& out) {
    out.push_back(gasper_q_erdelyi1());
    out.push_back(gasper_q_erdelyi3());
    out.push_back(ernst());
    out.push_back(joshi_vyas());
    out.push_back(qfk_phi3(true));
    out.push_back(qfk_phi3(false));
    out.push_back(qfk_lr());
    out.push_back(gasper_discrete());
    out.push_back(fk_discrete());
    out.push_back(fk_discrete_limits());
    out.push_back(qfk_erdelyi());
    out.push_back(qfk_erdelyi_simplified());
    out.push_back(phik_cross_form());
}

}  // namespace saranfk::detail
