#include <chrono>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "saranfk/series.hpp"

using namespace saranfk;

namespace {

double rel(Complex a, Complex b) { return std::abs(a - b) / (1.0 + std::abs(b)); }

// Plain partial sum of 2F1, fixed number of terms.
Complex brute_2f1(Complex a, Complex b, Complex c, Complex z, int terms) {
    Complex t = 1.0, s = 1.0;
    for (int n = 0; n < terms; ++n) {
        t *= (a + double(n)) * (b + double(n)) / ((c + double(n)) * double(n + 1)) * z;
        s += t;
    }
    return s;
}

// Direct box sum of the F_K triple series with Pochhammer products rebuilt
// from scratch for every term.
Complex brute_fk(const FkParams& p, Complex x, Complex y, Complex z, int box) {
    Complex s = 0.0;
    std::vector<Complex> fact(3 * box + 1, 1.0);
    for (int i = 1; i <= 3 * box; ++i) fact[i] = fact[i - 1] * double(i);
    for (int m = 0; m <= box; ++m)
        for (int n = 0; n + m <= box; ++n)
            for (int k = 0; k + n + m <= box; ++k) {
                s += pochhammer(p.alpha1, m) * pochhammer(p.alpha2, n + k) * pochhammer(p.beta1, m + k) *
                     pochhammer(p.beta2, n) /
                     (pochhammer(p.gamma1, m) * pochhammer(p.gamma2, n) * pochhammer(p.gamma3, k) * fact[m] *
                      fact[n] * fact[k]) *
                     std::pow(x, m) * std::pow(y, n) * std::pow(z, k);
            }
    return s;
}

FkParams random_fk(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.1, 2.5);
    return {u(rng), u(rng), u(rng), u(rng), u(rng), u(rng), u(rng)};
}

}  // namespace

TEST_CASE("gauss_2f1 basic values") {
    CHECK(gauss_2f1(0.3, 0.7, 1.1, 0.0).value == Complex(1.0));
    const SeriesResult r = gauss_2f1(1.0, 1.0, 2.0, 0.5);
    CHECK(r.converged);
    CHECK(std::abs(r.value - brute_2f1(1.0, 1.0, 2.0, 0.5, 200)) < 1e-13);
    CHECK(std::abs(r.value.real() - 1.3862943611) < 1e-10);
}

TEST_CASE("gauss_2f1 Pfaff consistency") {
    for (double z : {-0.6, -0.3, 0.2, 0.45}) {
        const Complex a = 0.7, b = 1.3, c = 2.1;
        const Complex w = z / (z - 1.0);
        const Complex lhs = brute_2f1(a, b, c, z, 400);
        const Complex rhs = std::pow(1.0 - z, -a) * brute_2f1(a, c - b, c, w, 400);
        CHECK(rel(lhs, rhs) < 1e-11);
        CHECK(rel(gauss_2f1(a, b, c, z).value, lhs) < 1e-13);
    }
}

TEST_CASE("gauss_2f1 transformed regions") {
    // Near 1: compare to a long brute-force partial sum of the series itself.
    const Complex a = 0.4, b = 0.3, c = 1.6;
    for (double z : {0.8, 0.9, 0.95}) {
        const Complex oracle = brute_2f1(a, b, c, z, 20000);
        CHECK(rel(gauss_2f1(a, b, c, z).value, oracle) < 1e-11);
    }
    // Large negative z via z/(z-1) partial sums.
    for (double z : {-0.9, -2.0, -5.0}) {
        const Complex w = z / (z - 1.0);
        const Complex oracle = std::pow(1.0 - z, -a) * brute_2f1(a, c - b, c, w, 20000);
        CHECK(rel(gauss_2f1(a, b, c, z).value, oracle) < 1e-11);
    }
    // log(1+z)/z at z = 0.97
    CHECK(std::abs(gauss_2f1(1.0, 1.0, 2.0, -0.97).value.real() - std::log(1.97) / 0.97) < 1e-12);
    // Gauss sum at z close to 1
    CHECK_THROWS_AS(gauss_2f1(0.5, 0.5, 1.5, 1.0), DomainError);
    CHECK_THROWS_AS(gauss_2f1(0.5, 0.5, -2.0, 0.3), PoleError);
}

TEST_CASE("gauss_2f1 terminating") {
    // 2F1(-3, b; c; z) is a cubic
    const Complex b = 0.6, c = 1.4, z = 3.5;
    Complex expect = 0.0;
    Complex t = 1.0;
    for (int n = 0; n <= 3; ++n) {
        expect += t;
        t *= (-3.0 + n) * (b + double(n)) / ((c + double(n)) * double(n + 1)) * z;
    }
    const SeriesResult r = gauss_2f1(-3.0, b, c, z);
    CHECK(r.converged);
    CHECK(rel(r.value, expect) < 1e-14);
}

TEST_CASE("phi_pfq") {
    const std::vector<Complex> none;
    CHECK(phi_pfq(none, none, 0.0).value == Complex(1.0));
    CHECK(rel(phi_pfq(none, none, 1.3).value, std::exp(1.3)) < 1e-14);
    const std::vector<Complex> up2{0.7, 1.2}, lo1{1.9};
    CHECK(rel(phi_pfq(up2, lo1, 0.4).value, gauss_2f1(0.7, 1.2, 1.9, 0.4).value) < 1e-14);
    const std::vector<Complex> up{0.4, 0.9, 1.3}, lo{1.7, 2.2};
    Complex t = 1.0, s = 1.0;
    for (int n = 0; n < 300; ++n) {
        t *= (0.4 + n) * (0.9 + n) * (1.3 + n) / ((1.7 + n) * (2.2 + n) * (n + 1.0)) * 0.3;
        s += t;
    }
    CHECK(rel(phi_pfq(up, lo, 0.3).value, s) < 1e-14);
    CHECK_THROWS_AS(phi_pfq(up, lo, 1.2), DomainError);
}

TEST_CASE("appell_f2") {
    CHECK(appell_f2(0.3, 0.4, 0.5, 1.1, 1.2, 0.0, 0.0).value == Complex(1.0));
    {
        const double a = 0.7, b = 0.4, bp = 1.1, c = 1.9, y = 0.2, z = 0.3;
        const Complex lhs = appell_f2(a, b, bp, c, bp, y, z).value;
        const Complex rhs = std::pow(1.0 - z, -a) * gauss_2f1(a, b, c, y / (1.0 - z)).value;
        CHECK(rel(lhs, rhs) < 1e-10);
    }
    {
        Complex s = 0.0;
        for (int m = 0; m < 120; ++m)
            for (int n = 0; n < 120; ++n) {
                const double lg = std::lgamma(0.5 + m + n) - std::lgamma(0.5) + std::lgamma(0.5 + m) +
                                  std::lgamma(0.5 + n) - 2 * std::lgamma(0.5) - std::lgamma(1.5 + m) -
                                  std::lgamma(1.5 + n) + 2 * std::lgamma(1.5) - std::lgamma(m + 1.0) -
                                  std::lgamma(n + 1.0) + (m + n) * std::log(0.25);
                s += std::exp(lg);
            }
        CHECK(rel(appell_f2(0.5, 0.5, 0.5, 1.5, 1.5, 0.25, 0.25).value, s) < 1e-13);
    }
    CHECK_THROWS_AS(appell_f2(0.5, 0.5, 0.5, 1.5, 1.5, 0.5, 0.5), DomainError);
}

TEST_CASE("in_domain_fk") {
    CHECK(in_domain_fk(0.0, 0.0, 0.0));
    CHECK_FALSE(in_domain_fk(0.5, 0.5, 0.25));
    CHECK(in_domain_fk(0.2, 0.1, 0.3));
    CHECK_FALSE(in_domain_fk(1.0, 0.0, 0.0));
}

TEST_CASE("saran F_K special values") {
    const FkParams p{0.5, 0.5, 0.5, 0.5, 1.5, 1.5, 1.5};
    CHECK(saran_fk_triple(p, 0.0, 0.0, 0.0).value == Complex(1.0));
    CHECK(saran_fk_reexpand(p, 0.0, 0.0, 0.0).value == Complex(1.0));
    const FkParams g{0.7, 1.3, 0.45, 0.9, 1.6, 2.2, 1.4};
    const Complex zero_z = gauss_2f1(g.beta1, g.alpha1, g.gamma1, 0.3).value *
                           gauss_2f1(g.alpha2, g.beta2, g.gamma2, -0.4).value;
    CHECK(rel(saran_fk_triple(g, 0.3, -0.4, 0.0).value, zero_z) < 1e-13);
    const Complex t = saran_fk_triple(p, 0.2, 0.1, 0.3).value;
    CHECK(rel(t, saran_fk_reexpand(p, 0.2, 0.1, 0.3).value) < 1e-10);
    CHECK(rel(t, brute_fk(p, 0.2, 0.1, 0.3, 90)) < 1e-12);
    // x = 0 gives Appell F2[alpha2, beta2, beta1; gamma2, gamma3; y, z]
    const Complex f2 = appell_f2(g.alpha2, g.beta2, g.beta1, g.gamma2, g.gamma3, 0.35, 0.3).value;
    CHECK(rel(saran_fk_reexpand(g, 0.0, 0.35, 0.3).value, f2) < 1e-12);
    CHECK_THROWS_AS(saran_fk_triple(p, 0.5, 0.5, 0.25), DomainError);
}

TEST_CASE("F_K forms agree on random points") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 50; ++i) {
        const FkParams p = random_fk(rng);
        const double x = 0.8 * u(rng), y = 0.8 * u(rng);
        const double z = 0.8 * u(rng) * (1.0 - std::abs(x)) * (1.0 - std::abs(y));
        const SeriesResult a = saran_fk_triple(p, x, y, z);
        const SeriesResult b = saran_fk_reexpand(p, x, y, z);
        CHECK(a.converged);
        CHECK(b.converged);
        CHECK(rel(a.value, b.value) < 1e-10);
    }
}

TEST_CASE("F_K symmetry") {
    const FkParams p{0.7, 1.3, 0.45, 0.9, 1.6, 2.2, 1.4};
    const FkParams s{p.beta2, p.beta1, p.alpha2, p.alpha1, p.gamma2, p.gamma1, p.gamma3};
    CHECK(rel(saran_fk_triple(p, 0.3, -0.2, 0.25).value, saran_fk_triple(s, -0.2, 0.3, 0.25).value) < 1e-11);
}

TEST_CASE("halving tol stays within previous error estimate") {
    const FkParams p{0.7, 1.3, 0.45, 0.9, 1.6, 2.2, 1.4};
    for (double tol : {1e-6, 1e-9}) {
        const SeriesResult a = saran_fk_triple(p, 0.3, -0.2, 0.25, tol);
        const SeriesResult b = saran_fk_triple(p, 0.3, -0.2, 0.25, tol / 2);
        CHECK(std::abs(a.value - b.value) / (1.0 + std::abs(a.value)) <= a.est_trunc_error + 1e-15);
        const SeriesResult c = gauss_2f1(0.3, 0.9, 1.2, 0.6, tol);
        const SeriesResult d = gauss_2f1(0.3, 0.9, 1.2, 0.6, tol / 2);
        CHECK(std::abs(c.value - d.value) / (1.0 + std::abs(c.value)) <= c.est_trunc_error + 1e-15);
    }
}

TEST_CASE("fk_L") {
    const std::vector<Complex> zero3{0.0, 0.0, 0.0};
    const std::vector<Complex> b2{0.4, 0.6}, c3{1.2, 1.3, 1.4};
    CHECK(fk_L(0.3, 0.5, b2, c3, zero3).value == Complex(1.0));

    // L = 3 against F_K: a1=alpha1, b1=beta1, b2=alpha2, a2=beta2,
    // c=(gamma1, gamma3, gamma2), z=(x, z, y).
    const FkParams p{0.7, 1.3, 0.45, 0.9, 1.6, 2.2, 1.4};
    const std::vector<Complex> b{p.beta1, p.alpha2}, c{p.gamma1, p.gamma3, p.gamma2}, zs{0.2, 0.3, 0.1};
    CHECK(rel(fk_L(p.alpha1, p.beta2, b, c, zs).value, brute_fk(p, 0.2, 0.1, 0.3, 90)) < 1e-12);

    const std::vector<Complex> b4{0.4, 0.6, 0.8}, c4{1.2, 1.3, 1.4, 1.5}, z4{0.3, 0.0, 0.0, -0.4};
    const Complex prod = gauss_2f1(0.3, 0.4, 1.2, 0.3).value * gauss_2f1(0.5, 0.8, 1.5, -0.4).value;
    CHECK(rel(fk_L(0.3, 0.5, b4, c4, z4).value, prod) < 1e-13);

    const std::vector<Complex> outside{0.5, 0.3, 0.3, 0.5};
    CHECK_THROWS_AS(fk_L(0.3, 0.5, b4, c4, outside), DomainError);
    const std::vector<Complex> b5{0.4, 0.6, 0.8, 0.5}, c5{1.2, 1.3, 1.4, 1.5, 1.1}, z5{0.1, 0.05, 0.1, 0.05, 0.1};
    CHECK(fk_L(0.3, 0.5, b5, c5, z5).converged);
    const std::vector<Complex> z2{0.1, 0.1};
    CHECK_THROWS_AS(fk_L(0.3, 0.5, b2, c3, z2), RangeError);
}

TEST_CASE("convolve2d") {
    const CoeffSequence2D ones([](int, int) { return Complex(1.0); }, 1.0);
    const CoeffSequence2D conv = convolve2d(ones, ones);
    for (int m = 0; m < 6; ++m)
        for (int n = 0; n < 6; ++n) CHECK(conv(m, n) == Complex((m + 1.0) * (n + 1.0)));
    const CoeffSequence2D geo([](int m, int n) { return std::pow(Complex(0.3), m) * std::pow(Complex(-0.2), n); },
                              0.3);
    const CoeffSequence2D id = convolve2d(geo, CoeffSequence2D::delta());
    const CoeffSequence2D ab = convolve2d(geo, conv);
    const CoeffSequence2D ba = convolve2d(conv, geo);
    for (int m = 0; m <= 10; ++m)
        for (int n = 0; n <= 10; ++n) {
            CHECK(std::abs(id(m, n) - geo(m, n)) < 1e-15);
            CHECK(std::abs(ab(m, n) - ba(m, n)) < 1e-12 * (1.0 + std::abs(ab(m, n))));
        }
    for (int m = 0; m <= 8; ++m)
        for (int n = 0; n <= 8; ++n) {
            Complex acc = 0.0;
            for (int i = 0; i <= m; ++i)
                for (int j = 0; j <= n; ++j) acc += geo(m - i, n - j) * conv(i, j);
            CHECK(std::abs(ab(m, n) - acc) < 1e-13 * (1.0 + std::abs(acc)));
        }
    CHECK(conv.bound_ratio(10) <= 1.0);
}

TEST_CASE("generic_f_a reductions") {
    const FaParams p{0.7, 0.45, 1.6, 1.3, 0.9, 2.2};
    const Complex x1 = 0.3, x2 = -0.2;
    const Complex prod = gauss_2f1(p.alpha1, p.beta1, p.gamma1, x1).value *
                         gauss_2f1(p.alpha2, p.beta2, p.gamma2, x2).value;
    CHECK(rel(generic_f_a(CoeffSequence2D::delta(), p, x1, x2, 0.4, 0.3).value, prod) < 1e-14);

    // Diagonal (alpha2)_n (beta1)_n / (n! (gamma3)_n) on m = n gives F_K with
    // third argument x3*x4.
    const FkParams fk{0.45, 1.3, 0.7, 0.9, 1.6, 2.2, 1.4};
    const CoeffSequence2D diag(
        [fk](int m, int n) {
            if (m != n) return Complex(0.0);
            Complex v = pochhammer(fk.alpha2, n) * pochhammer(fk.beta1, n) / pochhammer(fk.gamma3, n);
            for (int k = 1; k <= n; ++k) v /= double(k);
            return v;
        },
        1.2);
    // F^a rows: 2F1(beta1+m, alpha1; gamma1; x1), 2F1(alpha2+n, beta2; gamma2; x2)
    const FaParams q{fk.beta1, fk.alpha1, fk.gamma1, fk.alpha2, fk.beta2, fk.gamma2};
    const Complex x3 = 0.5, x4 = 0.4;
    CHECK(rel(generic_f_a(diag, q, x1, x2, x3, x4).value, saran_fk_triple(fk, x1, x2, x3 * x4).value) < 1e-12);
    CHECK_THROWS_AS(generic_f_a(diag, q, x1, x2, 0.9, 0.4), DomainError);
}
