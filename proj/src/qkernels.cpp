#include "saranfk/qkernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

namespace saranfk {

namespace {

constexpr double kDenominatorZero = 1e-12;
constexpr int kMaxQTerms = 20000;
constexpr int kMaxQShells = 600;
constexpr int kMinJackson = 40;
constexpr int kMaxJackson = 5000;
constexpr int kMaxLattice = 20000;

std::optional<int> min_degree(std::span<const Complex> bases, double q) {
    std::optional<int> best;
    for (const Complex& b : bases) {
        if (auto d = terminating_degree(b, q)) {
            if (!best || *d < *best) best = d;
        }
    }
    return best;
}

using LComplex = std::complex<long double>;

LComplex widen(Complex z) { return {z.real(), z.imag()}; }
Complex narrow(LComplex z) { return {static_cast<double>(z.real()), static_cast<double>(z.imag())}; }

// Lazily extended table v[k] = prod (num;q)_k / prod (den;q)_k * z^k, kept
// in extended precision. Terminating numerators give exact zeros from their
// degree on.
class PochTable {
public:
    PochTable(std::vector<Complex> num, std::vector<Complex> den, Complex z, const QContext& ctx)
        : z_(widen(z)), q_(ctx.q()) {
        stop_ = min_degree(num, ctx.q());
        for (const Complex& a : num) num_.push_back(widen(a));
        for (const Complex& b : den) den_.push_back(widen(b));
        v_.push_back(1.0L);
    }

    Complex operator[](int k) { return narrow(wide(k)); }

    LComplex wide(int k) {
        while (static_cast<int>(v_.size()) <= k) extend();
        return v_[k];
    }

    // Index past which every entry is zero, if any.
    std::optional<int> bound() const { return stop_; }

private:
    void extend() {
        const int k = static_cast<int>(v_.size()) - 1;
        const LComplex prev = v_.back();
        if (prev == 0.0L || (stop_ && k >= *stop_)) {
            v_.push_back(0.0L);
            qk_ *= q_;
            return;
        }
        LComplex r = z_;
        for (const LComplex& a : num_) r *= 1.0L - a * qk_;
        for (const LComplex& b : den_) {
            const LComplex f = 1.0L - b * qk_;
            if (std::abs(f) < kDenominatorZero) {
                throw PoleError("vanishing q-shifted factorial in a denominator");
            }
            r /= f;
        }
        v_.push_back(prev * r);
        qk_ *= q_;
    }

    std::vector<LComplex> num_, den_;
    LComplex z_;
    long double q_;
    long double qk_ = 1.0L;
    std::optional<int> stop_;
    std::vector<LComplex> v_;
};

std::vector<Complex> to_bases(std::span<const Complex> exps, const QContext& ctx) {
    std::vector<Complex> out;
    out.reserve(exps.size());
    for (const Complex& e : exps) out.push_back(ctx.pow(e));
    return out;
}

void require_unit_disc(Complex v, const char* name) {
    if (!(std::abs(v) < 1.0)) {
        throw DomainError(std::string("q-series argument ") + name + " must satisfy |" + name + "| < 1");
    }
}

Complex qpow_int(double q, int n) { return std::pow(q, n); }

}  // namespace

SeriesResult rphis(std::span<const Complex> upper, std::span<const Complex> lower, Complex z, const QContext& ctx,
                   double tol) {
    const double q = ctx.q();
    const int r = static_cast<int>(upper.size());
    const int s = static_cast<int>(lower.size());
    const int excess = 1 + s - r;
    const std::optional<int> degree = min_degree(upper, q);
    if (z == 0.0) {
        SeriesResult res;
        res.value = 1.0;
        res.terms_used = 1;
        res.converged = true;
        return res;
    }
    if (!degree) {
        if (excess < 0) throw DomainError("rphis: r > s+1 needs a terminating numerator");
        if (excess == 0 && !(std::abs(z) < 1.0)) throw DomainError("rphis: |z| < 1 required when r = s+1");
    }

    auto ratio = [&](double qn) {
        Complex t = z;
        for (const Complex& a : upper) t *= 1.0 - a * qn;
        for (const Complex& b : lower) {
            const Complex f = 1.0 - b * qn;
            if (std::abs(f) < kDenominatorZero) throw PoleError("rphis: lower parameter on the pole lattice");
            t /= f;
        }
        const Complex fq = 1.0 - qn * q;
        t /= fq;
        if (excess != 0) t *= std::pow(-qn, excess);
        return t;
    };

    if (degree) {
        // Finite sums often cancel heavily; carry them in extended precision.
        const long double lq = q;
        LComplex term = 1.0L, sum = 1.0L;
        long double qn = 1.0L;
        const LComplex lz = widen(z);
        for (int n = 0; n < *degree; ++n) {
            LComplex t = lz;
            for (const Complex& a : upper) t *= 1.0L - widen(a) * qn;
            for (const Complex& b : lower) {
                const LComplex f = 1.0L - widen(b) * qn;
                if (std::abs(f) < kDenominatorZero) throw PoleError("rphis: lower parameter on the pole lattice");
                t /= f;
            }
            t /= 1.0L - qn * lq;
            if (excess != 0) t *= std::pow(-qn, excess);
            term *= t;
            sum += term;
            qn *= lq;
        }
        SeriesResult res;
        res.value = checked(narrow(sum), "rphis");
        res.terms_used = static_cast<std::size_t>(*degree) + 1;
        res.converged = true;
        return res;
    }
    Complex term = 1.0;
    Complex sum = 1.0;
    double qn = 1.0;
    TruncationMonitor mon(tol);
    mon.add(1.0, sum);
    for (int n = 0; n < kMaxQTerms; ++n) {
        term *= ratio(qn);
        sum += term;
        qn *= q;
        if (mon.add(term, sum)) break;
    }
    return mon.finish(sum);
}

SeriesResult rphis_tilde(std::span<const Complex> upper, std::span<const Complex> lower, Complex z,
                         const QContext& ctx, double tol) {
    const auto up = to_bases(upper, ctx);
    const auto lo = to_bases(lower, ctx);
    return rphis(up, lo, z, ctx, tol);
}

SeriesResult phi21_tilde(Complex a, Complex b, Complex c, Complex z, const QContext& ctx, double tol) {
    const Complex up[] = {ctx.pow(a), ctx.pow(b)};
    const Complex lo[] = {ctx.pow(c)};
    return rphis(up, lo, z, ctx, tol);
}

namespace {

void require_phik(Complex x, Complex y, Complex z) {
    require_unit_disc(x, "x");
    require_unit_disc(y, "y");
    require_unit_disc(z, "z");
}

}  // namespace

SeriesResult phi_k_q_triple(const FkParams& p, Complex x, Complex y, Complex z, const QContext& ctx, double tol) {
    require_phik(x, y, z);
    const Complex qa1 = ctx.pow(p.alpha1), qa2 = ctx.pow(p.alpha2);
    const Complex qb1 = ctx.pow(p.beta1), qb2 = ctx.pow(p.beta2);
    const Complex qg1 = ctx.pow(p.gamma1), qg2 = ctx.pow(p.gamma2), qg3 = ctx.pow(p.gamma3);
    const Complex qq = ctx.q();
    // term(m,n,p) = Z(p) T1_p(m) T2_p(n), the p-shift moved into the rows.
    PochTable zp({qa2, qb1}, {qg3, qq}, z, ctx);
    std::vector<PochTable> t1, t2;
    TruncationMonitor mon(tol);
    Complex sum = 0.0;
    for (int s = 0; s < kMaxQShells; ++s) {
        const Complex shift = qpow_int(ctx.q(), s);
        t1.emplace_back(std::vector<Complex>{qa1, qb1 * shift}, std::vector<Complex>{qg1, qq}, x, ctx);
        t2.emplace_back(std::vector<Complex>{qa2 * shift, qb2}, std::vector<Complex>{qg2, qq}, y, ctx);
        Complex shell = 0.0;
        for (int pp = 0; pp <= s; ++pp) {
            const Complex zc = zp[pp];
            if (zc == 0.0) continue;
            const int rest = s - pp;
            Complex inner = 0.0;
            for (int m = 0; m <= rest; ++m) inner += t1[pp][m] * t2[pp][rest - m];
            shell += zc * inner;
        }
        sum += shell;
        if (mon.add(shell, sum)) break;
    }
    return mon.finish(sum);
}

SeriesResult phi_k_q_reexpand(const FkParams& p, Complex x, Complex y, Complex z, const QContext& ctx,
                              double tol) {
    require_phik(x, y, z);
    const Complex qa1 = ctx.pow(p.alpha1), qa2 = ctx.pow(p.alpha2);
    const Complex qb1 = ctx.pow(p.beta1), qb2 = ctx.pow(p.beta2);
    const Complex qg1 = ctx.pow(p.gamma1), qg2 = ctx.pow(p.gamma2);
    PochTable zp({qa2, qb1}, {ctx.pow(p.gamma3), Complex(ctx.q())}, z, ctx);
    TruncationMonitor mon(tol);
    Complex sum = 0.0;
    bool inner_ok = true;
    double shift = 1.0;
    for (int k = 0; k < kMaxQTerms; ++k, shift *= ctx.q()) {
        const Complex coef = zp[k];
        Complex term = 0.0;
        if (coef != 0.0) {
            const Complex up1[] = {qb1 * shift, qa1};
            const Complex lo1[] = {qg1};
            const Complex up2[] = {qa2 * shift, qb2};
            const Complex lo2[] = {qg2};
            const SeriesResult f1 = rphis(up1, lo1, x, ctx, tol);
            const SeriesResult f2 = rphis(up2, lo2, y, ctx, tol);
            inner_ok = inner_ok && f1.converged && f2.converged;
            term = coef * f1.value * f2.value;
        }
        sum += term;
        if (mon.add(term, sum)) break;
    }
    SeriesResult r = mon.finish(sum);
    r.converged = r.converged && inner_ok;
    return r;
}

SeriesResult phi_k_q(const FkParams& p, Complex x, Complex y, Complex z, const QContext& ctx, double tol) {
    const SeriesResult tri = phi_k_q_triple(p, x, y, z, ctx, tol);
    SeriesResult re = phi_k_q_reexpand(p, x, y, z, ctx, tol);
    const double gap = std::abs(tri.value - re.value) / (1.0 + std::abs(re.value));
    re.cross_check_residual = gap;
    if (gap > 100.0 * std::max(tol, 1e-14)) {
        throw CrossCheckError("phi_k_q: triple series and re-expansion differ by " + std::to_string(gap));
    }
    re.converged = re.converged && tri.converged;
    return re;
}

SeriesResult phi3(const Phi3Spec& spec, Complex x, Complex y, Complex z, const QContext& ctx, double tol) {
    const double q = ctx.q();
    const Complex qq = q;
    PochTable ta(spec.a, spec.e, 1.0, ctx);
    PochTable tb(spec.b, spec.g, 1.0, ctx);
    PochTable tb1(spec.b1, spec.g1, 1.0, ctx);
    PochTable tb2(spec.b2, spec.g2, 1.0, ctx);
    auto with_q = [&](std::vector<Complex> den) {
        den.push_back(qq);
        return den;
    };
    PochTable tm(spec.c, with_q(spec.h), x, ctx);
    PochTable tn(spec.c1, with_q(spec.h1), y, ctx);
    PochTable tp(spec.c2, with_q(spec.h2), z, ctx);

    // An index is finite when some factor carrying it terminates.
    auto cap = [](std::initializer_list<std::optional<int>> bs) {
        std::optional<int> out;
        for (const auto& b : bs) {
            if (b && (!out || *b < *out)) out = b;
        }
        return out;
    };
    const auto bm = cap({ta.bound(), tb.bound(), tb2.bound(), tm.bound()});
    const auto bn = cap({ta.bound(), tb.bound(), tb1.bound(), tn.bound()});
    const auto bp = cap({ta.bound(), tb1.bound(), tb2.bound(), tp.bound()});
    if (!bm && x != 0.0) require_unit_disc(x, "x");
    if (!bn && y != 0.0) require_unit_disc(y, "y");
    if (!bp && z != 0.0) require_unit_disc(z, "z");
    const bool finite = bm && bn && bp;
    const int last_shell = finite ? *bm + *bn + *bp : kMaxQShells - 1;

    TruncationMonitor mon(tol);
    LComplex sum = 0.0L;
    for (int s = 0; s <= last_shell; ++s) {
        LComplex shell = 0.0L;
        const LComplex as = ta.wide(s);
        if (as != 0.0L) {
            for (int p = 0; p <= s; ++p) {
                if (bp && p > *bp) break;
                const LComplex zp = tp.wide(p);
                if (zp == 0.0L) continue;
                for (int m = 0; m + p <= s; ++m) {
                    if (bm && m > *bm) break;
                    const int n = s - p - m;
                    if (bn && n > *bn) continue;
                    const LComplex xm = tm.wide(m);
                    if (xm == 0.0L) continue;
                    shell += zp * xm * tn.wide(n) * tb.wide(m + n) * tb1.wide(n + p) * tb2.wide(p + m);
                }
            }
            shell *= as;
        }
        sum += shell;
        if (!finite && mon.add(narrow(shell), narrow(sum))) break;
    }
    if (finite) {
        SeriesResult res;
        res.value = checked(narrow(sum), "phi3");
        res.terms_used = static_cast<std::size_t>(last_shell) + 1;
        res.converged = true;
        return res;
    }
    return mon.finish(narrow(sum));
}

Complex jackson_integral(const JacksonIntegrand& f, int k, const QContext& ctx, double cutoff_factor) {
    if (k < 1 || k > 3) throw RangeError("jackson_integral: dimension must be 1, 2 or 3");
    if (!(cutoff_factor >= 1.0)) throw DomainError("jackson_integral: cutoff_factor must be >= 1");
    const double q = ctx.q();
    const double tail_tol = ctx.jackson_tail_tol();

    auto lattice_sum = [&](int n_axis, double& sup) {
        std::vector<double> qn(n_axis);
        double v = 1.0;
        for (int i = 0; i < n_axis; ++i, v *= q) qn[i] = v;
        std::vector<int> idx(k, 0);
        std::vector<double> t(k);
        Complex acc = 0.0;
        sup = 0.0;
        while (true) {
            double w = 1.0;
            for (int d = 0; d < k; ++d) {
                t[d] = qn[idx[d]];
                w *= qn[idx[d]];
            }
            const Complex fv = f(t);
            if (!is_finite(fv)) throw Error("jackson_integral: integrand is not finite on the lattice");
            sup = std::max(sup, std::abs(fv));
            acc += fv * w;
            int d = 0;
            while (d < k && ++idx[d] == n_axis) idx[d++] = 0;
            if (d == k) break;
        }
        return acc * std::pow(1.0 - q, k);
    };

    int n_axis = kMinJackson;
    double sup = 0.0;
    Complex value = lattice_sum(n_axis, sup);
    for (;;) {
        int need = n_axis;
        if (sup > 0.0) {
            need = static_cast<int>(std::ceil(std::log(tail_tol / ((1.0 - q) * sup)) / std::log(q)));
        }
        if (need <= n_axis) break;
        if (need > kMaxJackson) throw ConvergenceError("jackson_integral: tail bound needs too many lattice points");
        n_axis = need;
        value = lattice_sum(n_axis, sup);
    }
    if (cutoff_factor > 1.0) {
        const int scaled = static_cast<int>(std::ceil(n_axis * cutoff_factor));
        if (scaled > kMaxJackson) throw ConvergenceError("jackson_integral: scaled cutoff too large");
        value = lattice_sum(scaled, sup);
    }
    return value;
}

QMeasureSpec QMeasureSpec::q_dirichlet(Complex a, Complex b) {
    QMeasureSpec s;
    s.kind = Kind::QDirichlet;
    s.alpha = a;
    s.beta = b;
    return s;
}

QMeasureSpec QMeasureSpec::q_hypergeometric(Complex a, Complex b, Complex g, Complex e) {
    QMeasureSpec s;
    s.kind = Kind::QHypergeometric;
    s.alpha = a;
    s.beta = b;
    s.gamma = g;
    s.eta = e;
    return s;
}

QMeasureSpec QMeasureSpec::moment_form(Complex nu, Complex lambda, Complex gamma, Complex eta) {
    return q_hypergeometric(eta - lambda, gamma - lambda, gamma - lambda + eta - nu, nu);
}

void QMeasureSpec::validate() const {
    if (kind == Kind::QDirichlet) {
        if (!(alpha.real() > 0.0 && beta.real() > 0.0)) {
            throw DomainError("q-Dirichlet measure needs Re(alpha) > 0 and Re(beta) > 0");
        }
        return;
    }
    if (!(eta.real() > 0.0 && gamma.real() > 0.0 && (eta + gamma - alpha - beta).real() > 0.0)) {
        throw DomainError("q-hypergeometric measure needs Re(eta), Re(gamma), Re(eta+gamma-alpha-beta) > 0");
    }
}

namespace {

Complex hyper_prefactor(const QMeasureSpec& s, const QContext& ctx) {
    const Complex A = s.alpha, B = s.beta, C = s.gamma, E = s.eta;
    return q_gamma(E + C - A, ctx) * q_gamma(E + C - B, ctx) /
           (q_gamma(E, ctx) * q_gamma(C, ctx) * q_gamma(E + C - A - B, ctx));
}

// (q^{n+1};q)_inf / (q^{n+c};q)_inf
Complex inf_ratio(int n, Complex c, const QContext& ctx) {
    const double qn = std::pow(ctx.q(), n);
    return std::exp(log_q_pochhammer_inf(qn * ctx.q(), ctx) - log_q_pochhammer_inf(qn * ctx.pow(c), ctx));
}

}  // namespace

Complex q_measure_density(const QMeasureSpec& spec, int n, const QContext& ctx) {
    if (n < 0) throw RangeError("q_measure_density: lattice index must be non-negative");
    spec.validate();
    const double t = std::pow(ctx.q(), n);
    if (spec.kind == QMeasureSpec::Kind::QDirichlet) {
        const Complex norm = 1.0 / q_beta(spec.alpha, spec.beta, ctx);
        return norm * ctx.pow(static_cast<double>(n) * (spec.alpha - 1.0)) * inf_ratio(n, spec.beta, ctx);
    }
    const Complex A = spec.alpha, B = spec.beta, C = spec.gamma, E = spec.eta;
    const Complex up[] = {ctx.pow(A), ctx.pow(B), Complex(1.0 / t)};
    const Complex lo[] = {ctx.pow(C)};
    const SeriesResult s31 = rphis(up, lo, t * ctx.pow(C - A - B), ctx);
    return hyper_prefactor(spec, ctx) * ctx.pow(static_cast<double>(n) * (E - 1.0)) * inf_ratio(n, C, ctx) *
           s31.value;
}

QLattice q_measure_lattice(const QMeasureSpec& spec, const QContext& ctx, double f_bound, double tail_tol,
                           double cutoff_factor) {
    spec.validate();
    if (!(cutoff_factor >= 1.0)) throw DomainError("q_measure_lattice: cutoff_factor must be >= 1");
    if (tail_tol <= 0.0) tail_tol = ctx.jackson_tail_tol();
    f_bound = std::max(f_bound, 1e-300);
    const double q = ctx.q();
    const bool dir = spec.kind == QMeasureSpec::Kind::QDirichlet;
    const Complex A = spec.alpha, B = spec.beta, C = spec.gamma, E = spec.eta;
    const Complex lead = dir ? A : E;
    const Complex dec = ctx.pow(lead);
    const double decay = std::abs(dec);
    const Complex c_exp = dir ? B : C;
    const Complex qc = ctx.pow(c_exp);

    Complex pref;
    if (dir) {
        pref = (1.0 - q) / q_beta(A, B, ctx);
    } else {
        pref = (1.0 - q) * hyper_prefactor(spec, ctx);
    }
    Complex r = std::exp(log_q_pochhammer_inf(q, ctx) - log_q_pochhammer_inf(qc, ctx));
    Complex geo = 1.0;
    const Complex qa = ctx.pow(A), qb = ctx.pow(B), qd = ctx.pow(C - A - B);

    QLattice lat;
    int stop = -1;
    double qn = 1.0;
    for (int n = 0; n < kMaxLattice; ++n) {
        Complex s = 1.0;
        if (!dir) {
            Complex term = 1.0;
            Complex acc = 1.0;
            double qk = 1.0;
            for (int k = 0; k < n; ++k) {
                term *= (1.0 - qa * qk) * (1.0 - qb * qk) * (1.0 - std::pow(q, n - k)) /
                        ((1.0 - qc * qk) * (1.0 - qk * q)) * qd;
                acc += term;
                qk *= q;
            }
            s = acc;
        }
        const Complex w = pref * geo * r * s;
        lat.t.push_back(qn);
        lat.w.push_back(w);
        if (stop < 0 && n + 1 >= kMinJackson) {
            const double tail = 2.0 * std::abs(w) * decay / (1.0 - decay) * f_bound;
            if (tail < tail_tol) stop = static_cast<int>(std::ceil((n + 1) * cutoff_factor));
        }
        if (stop >= 0 && n + 1 >= stop) return lat;
        r *= (1.0 - qc * qn) / (1.0 - qn * q);
        geo *= dec;
        qn *= q;
    }
    throw ConvergenceError("q_measure_lattice: weights decay too slowly");
}

Complex q_integrate(const std::function<Complex(double)>& f, const QLattice& lat) {
    Complex acc = 0.0;
    for (std::size_t i = 0; i < lat.t.size(); ++i) acc += lat.w[i] * f(lat.t[i]);
    return acc;
}

Complex q_integrate_product(const std::function<Complex(std::span<const double>)>& f,
                            std::span<const QLattice> lats) {
    const std::size_t k = lats.size();
    if (k == 0) throw RangeError("q_integrate_product: no axes");
    for (const auto& l : lats) {
        if (l.t.empty()) return 0.0;
    }
    std::vector<std::size_t> idx(k, 0);
    std::vector<double> t(k);
    Complex acc = 0.0;
    while (true) {
        Complex w = 1.0;
        for (std::size_t d = 0; d < k; ++d) {
            t[d] = lats[d].t[idx[d]];
            w *= lats[d].w[idx[d]];
        }
        acc += w * f(t);
        std::size_t d = 0;
        while (d < k && ++idx[d] == lats[d].t.size()) idx[d++] = 0;
        if (d == k) break;
    }
    return acc;
}

Complex q_moment(const QMeasureSpec& spec, int ell, const QContext& ctx) {
    if (ell < 0) throw RangeError("q_moment: negative order");
    spec.validate();
    if (spec.kind == QMeasureSpec::Kind::QDirichlet) {
        return q_pochhammer(ctx.pow(spec.alpha), ell, ctx) / q_pochhammer(ctx.pow(spec.alpha + spec.beta), ell, ctx);
    }
    const Complex nu = spec.eta;
    const Complex lambda = spec.gamma - spec.alpha - spec.beta + spec.eta;
    const Complex eta = spec.alpha + lambda;
    const Complex gamma = spec.beta + lambda;
    const Complex den = q_pochhammer(ctx.pow(gamma), ell, ctx) * q_pochhammer(ctx.pow(eta), ell, ctx);
    if (std::abs(den) < kDenominatorZero) throw PoleError("q_moment: vanishing denominator");
    return q_pochhammer(ctx.pow(nu), ell, ctx) * q_pochhammer(ctx.pow(lambda), ell, ctx) / den;
}

SeriesResult qshift_operator_kernel(const QErdelyiParams& p, int a, int b, int c, Complex x, Complex y, Complex z,
                                    const QContext& ctx, double tol) {
    if (a < 0 || b < 0 || c < 0) throw RangeError("qshift_operator_kernel: lattice indices must be non-negative");
    const double q = ctx.q();
    const double u = std::pow(q, a), v = std::pow(q, b), w = std::pow(q, c);
    const Complex X = u * x, Y = v * y;
    const Complex ql3 = ctx.pow(p.lambda3), qe2 = ctx.pow(p.eta2);
    require_unit_disc(X, "ux");
    require_unit_disc(Y, "vy");
    require_unit_disc(w * z, "wz");
    if (x == 0.0 || y == 0.0) {
        throw DomainError("qshift_operator_kernel: x and y must be nonzero (q/(ux) enters a denominator)");
    }

    const FkParams inner{p.alpha1,
                         p.alpha2 - p.eta2,
                         p.beta1 - p.lambda3,
                         p.beta2,
                         p.alpha1 - p.lambda1 + p.eta1,
                         p.beta2 - p.lambda2 + p.mu2,
                         p.beta1 - p.lambda3};
    const Complex pref = q_pochhammer_inf(X * ql3, ctx) * q_pochhammer_inf(Y * qe2, ctx) /
                         (q_pochhammer_inf(X, ctx) * q_pochhammer_inf(Y, ctx));
    const Complex step = w * z * ctx.pow(p.alpha2 - p.eta2);
    PochTable coef({qe2}, {X * ql3, Y * qe2, Complex(q)}, step, ctx);
    const Complex qdl1 = ctx.pow(p.lambda1 - p.eta1), ql1 = ctx.pow(p.lambda1);
    const Complex qdl2 = ctx.pow(p.lambda2 - p.mu2), ql2 = ctx.pow(p.lambda2);
    const Complex inv_u = std::pow(q, -a), inv_v = std::pow(q, -b);

    TruncationMonitor mon(tol);
    Complex sum = 0.0;
    bool inner_ok = true;
    double qk = 1.0;
    for (int k = 0; k < kMaxQTerms; ++k, qk *= q) {
        const Complex ck = coef[k];
        Complex term = 0.0;
        if (ck != 0.0) {
            const Complex up1[] = {ql3 * qk, qdl1, inv_u};
            const Complex lo1[] = {ql1, q / X};
            const Complex up2[] = {qe2 * qk, qdl2, inv_v};
            const Complex lo2[] = {ql2, q / Y};
            const Complex f1 = rphis(up1, lo1, q, ctx, tol).value;
            const Complex f2 = rphis(up2, lo2, q, ctx, tol).value;
            const SeriesResult fk = phi_k_q_reexpand(inner, X * qk * ql3, Y * qk * qe2, w * z, ctx, tol);
            inner_ok = inner_ok && fk.converged;
            term = ck * f1 * f2 * fk.value;
        }
        sum += term;
        if (mon.add(term, sum)) break;
    }
    SeriesResult r = mon.finish(pref * sum);
    r.converged = r.converged && inner_ok;
    if (!r.converged) throw ConvergenceError("qshift_operator_kernel: k-sum did not converge");
    return r;
}

namespace {

// Shared form of w1 and w2.
Complex gasper_weight(Complex a, Complex g, Complex l, Complex m, int i, int r, const QContext& ctx) {
    const double q = ctx.q();
    const Complex d = g + l - a - m;
    const Complex head = q_pochhammer(ctx.pow(a), r, ctx) * q_pochhammer(q, r, ctx) /
                         (q_pochhammer(ctx.pow(g), r, ctx) * q_pochhammer(ctx.pow(l), r, ctx));
    const Complex mid = q_pochhammer(ctx.pow(d), r - i, ctx) / q_pochhammer(q, r - i, ctx) *
                        q_pochhammer(ctx.pow(m), i, ctx) / q_pochhammer(q, i, ctx);
    const Complex up[] = {ctx.pow(l - a), ctx.pow(g - a), Complex(std::pow(q, i - r))};
    const Complex lo[] = {ctx.pow(d), ctx.pow(1.0 - r - a)};
    const Complex s = rphis(up, lo, ctx.pow(1.0 - i - m), ctx).value;
    return head * mid * s * ctx.pow(static_cast<double>(r - i) * m);
}

Complex gasper_weight_limit(Complex a, Complex g, Complex l, Complex m, int i, const QContext& ctx) {
    const double q = ctx.q();
    const Complex d = g + l - a - m;
    const Complex head = q_pochhammer_inf(ctx.pow(a), ctx) * q_pochhammer_inf(ctx.pow(m), ctx) /
                         (q_pochhammer_inf(ctx.pow(g), ctx) * q_pochhammer_inf(ctx.pow(l), ctx));
    const Complex mid = q_pochhammer(ctx.pow(d), i, ctx) / q_pochhammer(q, i, ctx) * ctx.pow(static_cast<double>(i) * m);
    const Complex up[] = {ctx.pow(l - a), ctx.pow(g - a), Complex(std::pow(q, -i))};
    const Complex lo[] = {ctx.pow(d)};
    const Complex s = rphis(up, lo, ctx.pow(a - m + static_cast<double>(i)), ctx).value;
    return head * mid * s;
}

}  // namespace

Complex discrete_weight(WeightKind which, int idx, int bound, const DiscreteParams& p, const QContext& ctx) {
    if (bound < 0 || idx < 0 || idx > bound) throw RangeError("discrete_weight: need 0 <= index <= bound");
    switch (which) {
        case WeightKind::W1:
            return gasper_weight(p.alpha1, p.gamma1, p.lambda1, p.mu1, idx, bound, ctx);
        case WeightKind::W2:
            return gasper_weight(p.beta2, p.gamma2, p.lambda2, p.mu2, idx, bound, ctx);
        case WeightKind::W3: {
            const double q = ctx.q();
            return q_pochhammer(q, bound, ctx) / q_pochhammer(ctx.pow(p.gamma3), bound, ctx) *
                   q_pochhammer(ctx.pow(p.gamma3 - p.mu3), bound - idx, ctx) / q_pochhammer(q, bound - idx, ctx) *
                   q_pochhammer(ctx.pow(p.mu3), idx, ctx) / q_pochhammer(q, idx, ctx) *
                   ctx.pow(static_cast<double>(bound - idx) * p.mu3);
        }
    }
    throw RangeError("discrete_weight: unknown weight");
}

Complex discrete_weight_limit(WeightKind which, int idx, const DiscreteParams& p, const QContext& ctx) {
    if (idx < 0) throw RangeError("discrete_weight_limit: negative index");
    switch (which) {
        case WeightKind::W1:
            return gasper_weight_limit(p.alpha1, p.gamma1, p.lambda1, p.mu1, idx, ctx);
        case WeightKind::W2:
            return gasper_weight_limit(p.beta2, p.gamma2, p.lambda2, p.mu2, idx, ctx);
        case WeightKind::W3:
            return q_pochhammer_inf(ctx.pow(p.mu3), ctx) / q_pochhammer_inf(ctx.pow(p.gamma3), ctx) *
                   q_pochhammer(ctx.pow(p.gamma3 - p.mu3), idx, ctx) / q_pochhammer(ctx.q(), idx, ctx) *
                   ctx.pow(static_cast<double>(idx) * p.mu3);
    }
    throw RangeError("discrete_weight_limit: unknown weight");
}

Complex gasper_discrete_3phi2(Complex alpha, Complex beta, Complex gamma, Complex delta, Complex lambda, Complex mu,
                              Complex nu, int n, const QContext& ctx) {
    if (n < 0) throw RangeError("gasper_discrete_3phi2: negative n");
    const double q = ctx.q();
    const Complex rho = gamma * mu / (lambda * nu);
    const Complex head_den = q_pochhammer(gamma, n, ctx) * q_pochhammer(mu, n, ctx);
    if (std::abs(head_den) < kDenominatorZero) throw PoleError("gasper_discrete_3phi2: vanishing prefactor");
    const Complex head = q_pochhammer(q, n, ctx) * q_pochhammer(lambda, n, ctx) / head_den;
    Complex acc = 0.0;
    for (int k = 0; k <= n; ++k) {
        const Complex c = q_pochhammer(nu, k, ctx) * q_pochhammer(rho, n - k, ctx) /
                          (q_pochhammer(q, k, ctx) * q_pochhammer(q, n - k, ctx)) * std::pow(nu, n - k);
        const Complex up3[] = {mu / lambda, gamma / lambda, Complex(std::pow(q, k - n))};
        const Complex lo3[] = {rho, std::pow(q, 1 - n) / lambda};
        const Complex s3 = rphis(up3, lo3, std::pow(q, 1 - k) / nu, ctx).value;
        const Complex up4[] = {alpha, beta, mu, Complex(std::pow(q, -k))};
        const Complex lo4[] = {lambda, nu, delta};
        const Complex s4 = rphis(up4, lo4, q, ctx).value;
        acc += c * s3 * s4;
    }
    return checked(head * acc, "gasper_discrete_3phi2");
}

}  // namespace saranfk
