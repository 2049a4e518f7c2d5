#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "saranfk/measures.hpp"
#include "saranfk/qkernels.hpp"
#include "saranfk/series.hpp"

using namespace saranfk;

namespace {

double rel(Complex a, Complex b) { return std::abs(a - b) / (1.0 + std::abs(b)); }

Complex qp(Complex a, int n, double q) {
    Complex r = 1.0;
    for (int j = 0; j < n; ++j) r *= 1.0 - a * std::pow(q, j);
    return r;
}

Complex qp_inf(Complex a, double q) {
    Complex r = 1.0;
    for (int j = 0; j < 4000; ++j) r *= 1.0 - a * std::pow(q, j);
    return r;
}

// Each term rebuilt from its Pochhammer products.
Complex brute_rphis(const std::vector<Complex>& up, const std::vector<Complex>& lo, Complex z, double q, int terms) {
    const int ex = 1 + static_cast<int>(lo.size()) - static_cast<int>(up.size());
    Complex s = 0.0;
    for (int n = 0; n < terms; ++n) {
        Complex t = std::pow(z, n) / qp(q, n, q);
        for (auto a : up) t *= qp(a, n, q);
        for (auto b : lo) t /= qp(b, n, q);
        const double sign = (n % 2 == 0) ? 1.0 : -1.0;
        t *= std::pow(sign * std::pow(q, 0.5 * n * (n - 1)), ex);
        s += t;
    }
    return s;
}

Complex brute_phik(const FkParams& p, Complex x, Complex y, Complex z, double q, int shells) {
    auto b = [&](Complex e) { return std::pow(q, e); };
    Complex s = 0.0;
    for (int m = 0; m < shells; ++m)
        for (int n = 0; m + n < shells; ++n)
            for (int k = 0; m + n + k < shells; ++k) {
                s += qp(b(p.alpha1), m, q) * qp(b(p.alpha2), n + k, q) * qp(b(p.beta1), m + k, q) *
                     qp(b(p.beta2), n, q) /
                     (qp(b(p.gamma1), m, q) * qp(q, m, q) * qp(b(p.gamma2), n, q) * qp(q, n, q) *
                      qp(b(p.gamma3), k, q) * qp(q, k, q)) *
                     std::pow(x, m) * std::pow(y, n) * std::pow(z, k);
            }
    return s;
}

Complex group(const std::vector<Complex>& num, const std::vector<Complex>& den, int n, double q) {
    Complex r = 1.0;
    for (auto a : num) r *= qp(a, n, q);
    for (auto d : den) r /= qp(d, n, q);
    return r;
}

Complex brute_phi3(const Phi3Spec& s, Complex x, Complex y, Complex z, double q, int shells) {
    Complex acc = 0.0;
    for (int m = 0; m < shells; ++m)
        for (int n = 0; m + n < shells; ++n)
            for (int p = 0; m + n + p < shells; ++p) {
                acc += group(s.a, s.e, m + n + p, q) * group(s.b, s.g, m + n, q) * group(s.b1, s.g1, n + p, q) *
                       group(s.b2, s.g2, p + m, q) * group(s.c, s.h, m, q) * group(s.c1, s.h1, n, q) *
                       group(s.c2, s.h2, p, q) * std::pow(x, m) / qp(q, m, q) * std::pow(y, n) / qp(q, n, q) *
                       std::pow(z, p) / qp(q, p, q);
            }
    return acc;
}

FkParams random_fk(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> d(0.1, 2.5);
    return {d(rng), d(rng), d(rng), d(rng), d(rng), d(rng), d(rng)};
}

}  // namespace

TEST_CASE("rphis basics") {
    QContext ctx(0.5);
    const double q = 0.5;
    const std::vector<Complex> up{0.3, 0.7}, lo{0.2};
    CHECK(rphis(up, lo, 0.0, ctx).value == Complex(1.0));

    const std::vector<Complex> term_up{std::pow(q, -2.0), 0.4};
    const SeriesResult t = rphis(term_up, lo, 0.6, ctx);
    CHECK(t.terms_used == 3);
    CHECK(t.converged);
    CHECK(rel(t.value, brute_rphis(term_up, lo, 0.6, q, 3)) < 1e-15);

    CHECK(rel(rphis(up, lo, Complex(0.4, 0.3), ctx).value, brute_rphis(up, lo, Complex(0.4, 0.3), q, 200)) < 1e-14);
}

TEST_CASE("rphis closed forms") {
    for (double q : {0.3, 0.5, 0.7, 0.95}) {
        QContext ctx(q);
        // q-binomial theorem
        const std::vector<Complex> up1{0.35};
        const Complex z = 0.6;
        CHECK(rel(rphis(up1, {}, z, ctx).value, qp_inf(0.35 * z, q) / qp_inf(z, q)) < 1e-13);
        // q-Gauss sum
        const Complex a = std::pow(q, 0.4), b = std::pow(q, 0.7), c = std::pow(q, 1.9);
        const std::vector<Complex> up2{a, b}, lo2{c};
        const Complex expect = qp_inf(c / a, q) * qp_inf(c / b, q) / (qp_inf(c, q) * qp_inf(c / (a * b), q));
        CHECK(rel(rphis(up2, lo2, c / (a * b), ctx).value, expect) < 1e-12);
        // Euler: 0phi0(;;q,z) = (z;q)_inf; alternating, so only for moderate q
        if (q < 0.9) CHECK(rel(rphis({}, {}, 0.8, ctx).value, qp_inf(0.8, q)) < 1e-13);
    }
}

TEST_CASE("rphis 3phi2 with zero numerators matches a 200-term sum") {
    const double q = 0.5;
    QContext ctx(q);
    const Complex ux = 0.2, vy = Complex(0.1, -0.15), wz = Complex(0.25, 0.1);
    const std::vector<Complex> up{std::sqrt(q), 0.0, 0.0}, lo{ux * std::pow(q, 0.8), vy * std::pow(q, 1.3)};
    CHECK(rel(rphis(up, lo, wz, ctx).value, brute_rphis(up, lo, wz, q, 200)) < 1e-14);
}

TEST_CASE("terminating rphis is a polynomial of degree N") {
    const double q = 0.6;
    QContext ctx(q);
    for (int N : {1, 2, 4, 6}) {
        const std::vector<Complex> up{std::pow(q, -N), 0.45, 0.8}, lo{0.3, 0.55};
        // Forward differences of order N+1 on an equispaced grid vanish.
        std::vector<Complex> vals;
        for (int i = 0; i < N + 2; ++i) vals.push_back(rphis(up, lo, 0.1 + 0.15 * i, ctx).value);
        double scale = 0.0;
        for (auto v : vals) scale = std::max(scale, std::abs(v));
        for (int order = 0; order < N + 1; ++order)
            for (std::size_t i = 0; i + 1 < vals.size() - order; ++i) vals[i] = vals[i + 1] - vals[i];
        CHECK(std::abs(vals[0]) < 1e-11 * scale * std::pow(2.0, N));
        // and the N-th difference does not
        std::vector<Complex> v2;
        for (int i = 0; i < N + 1; ++i) v2.push_back(rphis(up, lo, 0.1 + 0.15 * i, ctx).value);
        for (int order = 0; order < N; ++order)
            for (std::size_t i = 0; i + 1 < v2.size() - order; ++i) v2[i] = v2[i + 1] - v2[i];
        CHECK(std::abs(v2[0]) > 1e-8);
    }
}

TEST_CASE("rphis errors") {
    QContext ctx(0.5);
    const std::vector<Complex> up{0.3, 0.7}, lo{0.2};
    CHECK_THROWS_AS(rphis(up, lo, 1.2, ctx), DomainError);
    const std::vector<Complex> up3{0.3, 0.7, 0.4};
    CHECK_THROWS_AS(rphis(up3, lo, 0.2, ctx), DomainError);
    const std::vector<Complex> pole{4.0};
    CHECK_THROWS_AS(rphis(up, pole, 0.2, ctx), PoleError);
    // the pole at (q^{-3};q)_4 comes after termination at degree 2
    const std::vector<Complex> up_t{4.0, 0.3}, lo_t{8.0};
    CHECK_NOTHROW(rphis(up_t, lo_t, 0.5, ctx));
}

TEST_CASE("q-F_K special values") {
    QContext ctx(0.5);
    const FkParams p{0.4, 1.1, 0.7, 1.6, 1.3, 2.2, 0.9};
    CHECK(rel(phi_k_q(p, 0.0, 0.0, 0.0, ctx).value, 1.0) < 1e-15);
    const Complex x = 0.3, y = -0.4;
    const Complex expect = phi21_tilde(p.beta1, p.alpha1, p.gamma1, x, ctx).value *
                           phi21_tilde(p.alpha2, p.beta2, p.gamma2, y, ctx).value;
    CHECK(rel(phi_k_q(p, x, y, 0.0, ctx).value, expect) < 1e-14);
    CHECK(rel(phi_k_q(p, 0.3, 0.2, 0.35, ctx).value, brute_phik(p, 0.3, 0.2, 0.35, 0.5, 60)) < 1e-13);
    CHECK_THROWS_AS(phi_k_q(p, 1.0, 0.1, 0.1, ctx), DomainError);
}

TEST_CASE("q-F_K triple series and re-expansion agree") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> arg(-0.5, 0.5);
    for (double q : {0.3, 0.5, 0.7}) {
        QContext ctx(q);
        for (int i = 0; i < 30; ++i) {
            const FkParams p = random_fk(rng);
            const Complex x = arg(rng), y = arg(rng), z = Complex(arg(rng), arg(rng)) / std::sqrt(2.0);
            const SeriesResult r = phi_k_q(p, x, y, z, ctx);
            REQUIRE(r.cross_check_residual.has_value());
            CHECK(*r.cross_check_residual < 1e-10);
            CHECK(r.converged);
        }
    }
}

TEST_CASE("q-F_K approaches F_K as q -> 1") {
    QContext ctx(0.999);
    const FkParams p{0.4, 1.1, 0.7, 1.6, 1.3, 2.2, 0.9};
    const Complex x = 0.1, y = 0.15, z = 0.05;
    const Complex qv = phi_k_q_reexpand(p, x, y, z, ctx).value;
    const Complex cv = saran_fk_triple(p, x, y, z).value;
    CHECK(rel(qv, cv) < 1e-2);
}

TEST_CASE("phi3 collapses and matches a brute-force triple sum") {
    const double q = 0.5;
    QContext ctx(q);
    Phi3Spec empty;
    CHECK(phi3(empty, 0.0, 0.0, 0.0, ctx).value == Complex(1.0));

    Phi3Spec single;
    single.c = {std::pow(q, 0.8), std::pow(q, 1.4)};
    single.h = {std::pow(q, 1.9)};
    const std::vector<Complex> up{std::pow(q, 0.8), std::pow(q, 1.4)}, lo{std::pow(q, 1.9)};
    CHECK(rel(phi3(single, 0.45, 0.0, 0.0, ctx).value, rphis(up, lo, 0.45, ctx).value) < 1e-14);

    // the spec used by the lattice form of the q-F_K integral
    auto b = [&](double e) { return Complex(std::pow(q, e)); };
    const double t1 = 0.4, t2 = 0.6, t3 = 0.3;
    Phi3Spec cor;
    cor.b1 = {b(1.1)};
    cor.b2 = {b(0.7)};
    cor.c = {b(0.4), b(1.5)};
    cor.c1 = {b(1.6), b(0.9)};
    cor.c2 = {b(1.2)};
    cor.h = {b(1.8), b(0.6)};
    cor.h1 = {b(2.1), b(0.5)};
    cor.h2 = {b(1.3), b(0.8)};
    const Complex x = 0.3 * t1, y = 0.25 * t2, z = 0.3 * t3;
    CHECK(rel(phi3(cor, x, y, z, ctx).value, brute_phi3(cor, x, y, z, q, 40)) < 1e-13);
}

TEST_CASE("phi3 with terminating indices is a finite sum") {
    const double q = 0.5;
    QContext ctx(q);
    Phi3Spec s;
    s.b1 = {0.6};
    s.b2 = {0.35};
    s.c = {0.7, std::pow(q, -2)};
    s.c1 = {0.45, std::pow(q, -3)};
    s.c2 = {std::pow(q, -1)};
    s.h = {0.2, 0.55};
    s.h1 = {0.3, 0.15};
    s.h2 = {0.65, 0.4};
    const SeriesResult r = phi3(s, q, q, q, ctx);
    CHECK(r.converged);
    CHECK(r.est_trunc_error == 0.0);
    CHECK(rel(r.value, brute_phi3(s, q, q, q, q, 7)) < 1e-14);
}

TEST_CASE("Jackson integrals") {
    for (double q : {0.3, 0.5, 0.7}) {
        QContext ctx(q);
        CHECK(std::abs(jackson_integral([](auto) { return Complex(1.0); }, 1, ctx) - 1.0) < 1e-13);
        CHECK(std::abs(jackson_integral([](auto t) { return Complex(t[0]); }, 1, ctx) - 1.0 / (1.0 + q)) < 1e-13);
        CHECK(std::abs(jackson_integral([](auto t) { return Complex(t[0] * t[1] * t[2]); }, 3, ctx) -
                       std::pow(1.0 + q, -3)) < 1e-13);
        for (auto [x, y] : {std::pair{0.7, 1.3}, std::pair{1.5, 0.4}, std::pair{2.2, 2.0}}) {
            auto f = [&](std::span<const double> t) {
                return Complex(std::pow(t[0], x - 1.0)) * qp_inf(t[0] * q, q) / qp_inf(t[0] * std::pow(q, y), q);
            };
            CHECK(rel(jackson_integral(f, 1, ctx), q_beta(x, y, ctx)) < 1e-12);
        }
    }
    QContext ctx(0.5);
    CHECK_THROWS_AS(jackson_integral([](auto) { return Complex(1.0); }, 4, ctx), RangeError);
}

TEST_CASE("q-measure lattice weights match the density") {
    const double q = 0.5;
    QContext ctx(q);
    const QMeasureSpec d = QMeasureSpec::q_dirichlet(0.7, 1.3);
    const QMeasureSpec h = QMeasureSpec::moment_form(0.5, 0.6, 1.5, 1.4);
    for (const auto& s : {d, h}) {
        const QLattice lat = q_measure_lattice(s, ctx);
        for (int n : {0, 1, 2, 5, 12}) {
            const Complex direct = (1.0 - q) * std::pow(q, n) * q_measure_density(s, n, ctx);
            CHECK(rel(lat.w[n], direct) < 1e-13);
        }
    }
}

TEST_CASE("q-measures are normalized and reproduce the moment formula") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.6, 2.5);
    for (double q : {0.3, 0.5, 0.7}) {
        QContext ctx(q);
        CHECK(std::abs(q_integrate([](double) { return Complex(1.0); },
                                   q_measure_lattice(QMeasureSpec::q_dirichlet(0.8, 1.7), ctx)) -
                       1.0) < 1e-12);
        int done = 0;
        while (done < 20) {
            const double nu = u(rng), lambda = u(rng), gamma = u(rng) + 0.5, eta = u(rng) + 0.5;
            const QMeasureSpec s = QMeasureSpec::moment_form(nu, lambda, gamma, eta);
            try {
                s.validate();
            } catch (const DomainError&) {
                continue;
            }
            ++done;
            const QLattice lat = q_measure_lattice(s, ctx);
            for (int ell = 0; ell <= 8; ++ell) {
                const Complex lattice = q_integrate([&](double t) { return Complex(std::pow(t, ell)); }, lat);
                const Complex closed = qp(std::pow(q, nu), ell, q) * qp(std::pow(q, lambda), ell, q) /
                                       (qp(std::pow(q, gamma), ell, q) * qp(std::pow(q, eta), ell, q));
                CHECK(rel(lattice, closed) < 1e-10);
                CHECK(rel(q_moment(s, ell, ctx), closed) < 1e-13);
            }
        }
    }
    QContext ctx(0.5);
    const QMeasureSpec s = QMeasureSpec::moment_form(0.5, 0.6, 1.5, 1.4);
    const double q = 0.5;
    const Complex expect = (1.0 - std::pow(q, 0.5)) * (1.0 - std::pow(q, 0.6)) /
                           ((1.0 - std::pow(q, 1.5)) * (1.0 - std::pow(q, 1.4)));
    CHECK(rel(q_moment(s, 1, ctx), expect) < 1e-14);
    CHECK(q_moment(s, 0, ctx) == Complex(1.0));
    CHECK_THROWS_AS(QMeasureSpec::q_dirichlet(-0.1, 1.0).validate(), DomainError);
    CHECK_THROWS_AS(QMeasureSpec::q_hypergeometric(1.0, 1.0, 0.5, 0.5).validate(), DomainError);
}

TEST_CASE("q-densities approach the classical densities") {
    for (double q : {0.999, 1.0 - 1e-4}) {
        QContext ctx(q);
        const int n = static_cast<int>(std::round(std::log(0.5) / std::log(q)));
        const double t = std::pow(q, n);
        const MeasureSpec cd = MeasureSpec::dirichlet(0.7, 1.6);
        const Complex qd = q_measure_density(QMeasureSpec::q_dirichlet(0.7, 1.6), n, ctx);
        CHECK(rel(qd, dirichlet_density(cd, t)) < 1e-2);
        const MeasureSpec ch = MeasureSpec::hypergeometric(0.3, 0.4, 1.6, 1.2);
        const Complex qh = q_measure_density(QMeasureSpec::q_hypergeometric(0.3, 0.4, 1.6, 1.2), n, ctx);
        CHECK(rel(qh, hypergeometric_density(ch, t)) < 1e-2);
    }
}

TEST_CASE("Gasper's finite expansion") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> base(0.1, 0.9);
    const double q = 0.5;
    QContext ctx(q);
    for (int trial = 0; trial < 10; ++trial) {
        const Complex al = base(rng), be = base(rng), ga = base(rng), de = base(rng);
        const Complex la = base(rng), mu = base(rng), nu = base(rng);
        for (int n = 0; n <= 3; ++n) {
            const std::vector<Complex> up{al, be, std::pow(q, -n)}, lo{ga, de};
            const Complex lhs = brute_rphis(up, lo, q, q, n + 1);
            CHECK(rel(gasper_discrete_3phi2(al, be, ga, de, la, mu, nu, n, ctx), lhs) < 1e-13);
        }
        // mu = lambda: the inner 3phi2 starts with (1;q)_j and is identically 1
        for (int n = 0; n <= 3; ++n) {
            const std::vector<Complex> up{al, be, std::pow(q, -n)}, lo{ga, de};
            const Complex lhs = brute_rphis(up, lo, q, q, n + 1);
            Complex collapsed = 0.0;
            const Complex rho = ga / nu;
            for (int k = 0; k <= n; ++k) {
                const std::vector<Complex> up4{al, be, la, std::pow(q, -k)}, lo4{la, nu, de};
                collapsed += qp(nu, k, q) * qp(rho, n - k, q) / (qp(q, k, q) * qp(q, n - k, q)) *
                             std::pow(nu, n - k) * brute_rphis(up4, lo4, q, q, k + 1);
            }
            collapsed *= qp(q, n, q) / qp(ga, n, q);
            CHECK(rel(collapsed, lhs) < 1e-13);
            CHECK(rel(gasper_discrete_3phi2(al, be, ga, de, la, la, nu, n, ctx), lhs) < 1e-13);
        }
    }
}

namespace {

struct DiscreteCase {
    double alpha1, alpha2, beta1, beta2;
    DiscreteParams w;
    Complex d1, d2, d3;
};

Phi3Spec discrete_spec(const DiscreteCase& c, double a_exp, double b_exp, double g3_exp, int r, int s, int t,
                       double h1_exp, double h2_exp, double q) {
    Phi3Spec sp;
    sp.b1 = {std::pow(q, c.alpha2)};
    sp.b2 = {std::pow(q, c.beta1)};
    sp.c = {std::pow(q, a_exp), std::pow(q, -r)};
    sp.c1 = {std::pow(q, b_exp), std::pow(q, -s)};
    sp.c2 = {std::pow(q, -t)};
    sp.h = {std::pow(q, h1_exp), c.d1};
    sp.h1 = {std::pow(q, h2_exp), c.d2};
    sp.h2 = {std::pow(q, g3_exp), c.d3};
    return sp;
}

}  // namespace

TEST_CASE("finite-sum analogue of the q-F_K integral") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> e(0.1, 2.5);
    std::uniform_real_distribution<double> base(0.1, 0.9);
    const double q = 0.5;
    QContext ctx(q);
    for (auto [r, s, t] : {std::tuple{2, 2, 2}, std::tuple{3, 1, 2}}) {
        for (int trial = 0; trial < 10; ++trial) {
            DiscreteCase c;
            c.alpha1 = e(rng);
            c.alpha2 = e(rng);
            c.beta1 = e(rng);
            c.beta2 = e(rng);
            c.w = DiscreteParams{c.alpha1, c.beta2, e(rng), e(rng), e(rng), e(rng), e(rng), e(rng), e(rng), e(rng)};
            c.d1 = base(rng);
            c.d2 = base(rng);
            c.d3 = base(rng);
            const Phi3Spec lspec = discrete_spec(c, c.alpha1, c.beta2, c.w.gamma3.real(), r, s, t,
                                                 c.w.gamma1.real(), c.w.gamma2.real(), q);
            const Complex lhs = phi3(lspec, q, q, q, ctx).value;
            Complex rhs = 0.0;
            for (int i = 0; i <= r; ++i)
                for (int j = 0; j <= s; ++j)
                    for (int k = 0; k <= t; ++k) {
                        const Phi3Spec rs = discrete_spec(c, c.w.lambda1.real(), c.w.lambda2.real(),
                                                          c.w.mu3.real(), i, j, k, c.w.mu1.real(), c.w.mu2.real(), q);
                        rhs += discrete_weight(WeightKind::W1, i, r, c.w, ctx) *
                               discrete_weight(WeightKind::W2, j, s, c.w, ctx) *
                               discrete_weight(WeightKind::W3, k, t, c.w, ctx) * phi3(rs, q, q, q, ctx).value;
                    }
            CHECK(rel(rhs, lhs) < 1e-12);
        }
    }
}

TEST_CASE("discrete weights: endpoint values and limits") {
    const double q = 0.5;
    QContext ctx(q);
    const DiscreteParams p{0.8, 1.3, 1.7, 2.1, 1.9, 0.6, 1.1, 1.4, 0.9, 0.7};
    for (int t : {0, 1, 4}) {
        const Complex expect =
            qp(q, t, q) / qp(std::pow(q, 1.9), t, q) * qp(std::pow(q, 0.7), t, q) / qp(q, t, q);
        CHECK(rel(discrete_weight(WeightKind::W3, t, t, p, ctx), expect) < 1e-14);
    }
    // at i = r the 3phi2 factor reduces to its first term
    for (int r : {1, 3}) {
        const Complex expect = qp(std::pow(q, 0.8), r, q) * qp(q, r, q) /
                               (qp(std::pow(q, 1.7), r, q) * qp(std::pow(q, 0.6), r, q)) *
                               qp(std::pow(q, 1.4), r, q) / qp(q, r, q);
        CHECK(rel(discrete_weight(WeightKind::W1, r, r, p, ctx), expect) < 1e-14);
    }
    for (auto which : {WeightKind::W1, WeightKind::W2, WeightKind::W3}) {
        for (int i = 0; i <= 5; ++i) {
            const Complex finite = discrete_weight(which, 50 - i, 50, p, ctx);
            CHECK(rel(finite, discrete_weight_limit(which, i, p, ctx)) < 1e-5);
        }
    }
    CHECK_THROWS_AS(discrete_weight(WeightKind::W1, 4, 3, p, ctx), RangeError);
}

TEST_CASE("q-Erdelyi kernel") {
    const double q = 0.5;
    QContext ctx(q);
    const QErdelyiParams p{0.9, 1.4, 1.2, 0.8, 2.1, 0.7, 0.5, 0.9, 0.6, 1.1, 0.45};
    const Complex x = 0.3, y = -0.25, z = 0.2;
    auto b = [&](Complex e) { return std::pow(q, e); };
    // Oracle: direct 60-term k-sum with brute-force factors.
    auto oracle = [&](const QErdelyiParams& pp, int a, int bb, int c, Complex zz, int kmax) {
        const FkParams in{pp.alpha1,
                          pp.alpha2 - pp.eta2,
                          pp.beta1 - pp.lambda3,
                          pp.beta2,
                          pp.alpha1 - pp.lambda1 + pp.eta1,
                          pp.beta2 - pp.lambda2 + pp.mu2,
                          pp.beta1 - pp.lambda3};
        const double u = std::pow(q, a), v = std::pow(q, bb), w = std::pow(q, c);
        const Complex X = u * x, Y = v * y;
        Complex s = 0.0;
        for (int k = 0; k < kmax; ++k) {
            const Complex coef = qp(b(pp.eta2), k, q) /
                                 (qp(X * b(pp.lambda3), k, q) * qp(Y * b(pp.eta2), k, q) * qp(q, k, q)) *
                                 std::pow(w * zz * b(pp.alpha2 - pp.eta2), k);
            if (coef == 0.0) continue;
            const Complex f1 = brute_rphis({b(pp.lambda3 + double(k)), b(pp.lambda1 - pp.eta1), 1.0 / u},
                                           {b(pp.lambda1), q / X}, q, q, a + 1);
            const Complex f2 = brute_rphis({b(pp.eta2 + double(k)), b(pp.lambda2 - pp.mu2), 1.0 / v},
                                           {b(pp.lambda2), q / Y}, q, q, bb + 1);
            s += coef * f1 * f2 *
                 phi_k_q_triple(in, X * std::pow(q, k) * b(pp.lambda3), Y * std::pow(q, k) * b(pp.eta2), w * zz,
                                ctx)
                     .value;
        }
        return s * qp_inf(X * b(pp.lambda3), q) * qp_inf(Y * b(pp.eta2), q) / (qp_inf(X, q) * qp_inf(Y, q));
    };
    for (auto [a, bb, c] : {std::tuple{0, 0, 0}, std::tuple{2, 1, 3}, std::tuple{4, 3, 1}}) {
        CHECK(rel(qshift_operator_kernel(p, a, bb, c, x, y, z, ctx).value, oracle(p, a, bb, c, z, 60)) < 1e-12);
        CHECK(rel(qshift_operator_kernel(p, a, bb, c, x, y, 0.0, ctx).value, oracle(p, a, bb, c, 0.0, 1)) < 1e-13);
    }
    QErdelyiParams p0 = p;
    p0.eta2 = 0.0;
    CHECK(rel(qshift_operator_kernel(p0, 1, 2, 0, x, y, z, ctx).value, oracle(p0, 1, 2, 0, z, 1)) < 1e-13);

    // With lambda1 = eta1, lambda2 = mu2, lambda3 = beta1, eta2 = alpha2 the
    // kernel is (uxq^b1, vyq^a2)_inf/(ux, vy)_inf 3phi2(q^a2, 0, 0; uxq^b1, vyq^a2; q, wz).
    QErdelyiParams ps = p;
    ps.lambda1 = ps.eta1;
    ps.lambda2 = ps.mu2;
    ps.lambda3 = ps.beta1;
    ps.eta2 = ps.alpha2;
    for (auto [a, bb, c] : {std::tuple{0, 0, 0}, std::tuple{3, 1, 2}}) {
        const Complex X = std::pow(q, a) * x, Y = std::pow(q, bb) * y, W = std::pow(q, c) * z;
        const Complex simple = qp_inf(X * b(ps.beta1), q) * qp_inf(Y * b(ps.alpha2), q) / (qp_inf(X, q) * qp_inf(Y, q)) *
                               brute_rphis({b(ps.alpha2), 0.0, 0.0}, {X * b(ps.beta1), Y * b(ps.alpha2)}, W, q, 80);
        CHECK(rel(qshift_operator_kernel(ps, a, bb, c, x, y, z, ctx).value, simple) < 1e-13);
    }
}
