#include "saranfk/core.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace saranfk {

namespace {

constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczosCoeff = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

// log Gamma(z) for Re z >= 0.5.
Complex log_gamma_lanczos(Complex z) {
    z -= 1.0;
    Complex series = kLanczosCoeff[0];
    for (std::size_t i = 1; i < kLanczosCoeff.size(); ++i) {
        series += kLanczosCoeff[i] / (z + static_cast<double>(i));
    }
    const Complex t = z + kLanczosG + 0.5;
    return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) - t + std::log(series);
}

// log(1 - w) with care for small |w|.
Complex log1m(Complex w) {
    if (std::abs(w) < 1e-4) {
        const Complex w2 = w * w;
        return -w - w2 / 2.0 - w2 * w / 3.0 - w2 * w2 / 4.0;
    }
    return std::log(1.0 - w);
}

}  // namespace

bool is_finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

Complex checked(Complex z, const char* what) {
    if (!is_finite(z)) {
        throw Error(std::string("non-finite value in ") + what);
    }
    return z;
}

bool near_nonpositive_integer(Complex z, double tol) {
    if (std::abs(z.imag()) > tol) return false;
    if (z.real() > tol) return false;
    return std::abs(z.real() - std::round(z.real())) <= tol;
}

QContext::QContext(double q, int inf_product_terms, double jackson_tail_tol)
    : q_(q), log_q_(0.0), inf_product_terms_(inf_product_terms), jackson_tail_tol_(jackson_tail_tol) {
    if (!(q > 0.0 && q < 1.0)) {
        throw DomainError("q must lie in (0,1), got " + std::to_string(q));
    }
    if (!(jackson_tail_tol > 0.0)) {
        throw DomainError("jackson_tail_tol must be positive");
    }
    log_q_ = std::log(q);
    if (inf_product_terms_ <= 0) {
        inf_product_terms_ = static_cast<int>(std::ceil(std::log(1e-17) / log_q_)) + 8;
    }
}

Complex QContext::pow(Complex e) const { return std::exp(e * log_q_); }

double QContext::pow(double e) const { return std::exp(e * log_q_); }

Complex log_gamma(Complex z) {
    if (near_nonpositive_integer(z)) {
        throw PoleError("log_gamma: pole at non-positive integer");
    }
    if (z.real() < 0.5) {
        // Reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z).
        return std::log(std::numbers::pi) - std::log(std::sin(std::numbers::pi * z)) -
               log_gamma_lanczos(1.0 - z);
    }
    return log_gamma_lanczos(z);
}

Complex complex_gamma(Complex z) { return std::exp(log_gamma(z)); }

Complex rgamma(Complex z) {
    if (near_nonpositive_integer(z)) return 0.0;
    return std::exp(-log_gamma(z));
}

Complex pochhammer(Complex a, int n) {
    if (n < 0) throw RangeError("pochhammer: negative index");
    Complex result = 1.0;
    for (int j = 0; j < n; ++j) result *= a + static_cast<double>(j);
    return result;
}

Complex cpow(Complex z, Complex w) {
    if (z == 0.0) {
        if (w == 0.0) return 1.0;
        if (w.real() > 0.0) return 0.0;
        throw PoleError("cpow: zero base with non-positive exponent");
    }
    if (w.imag() == 0.0 && z.imag() == 0.0 && z.real() > 0.0) {
        return std::pow(z.real(), w.real());
    }
    return std::exp(w * std::log(z));
}

Complex q_pochhammer(Complex a, int n, const QContext& ctx) {
    if (n < 0) throw RangeError("q_pochhammer: negative index");
    Complex result = 1.0;
    double qj = 1.0;
    for (int j = 0; j < n; ++j) {
        result *= 1.0 - a * qj;
        qj *= ctx.q();
    }
    return result;
}

Complex q_pochhammer_inf(Complex a, const QContext& ctx) {
    if (std::abs(a) >= 1e10) {
        throw DomainError("q_pochhammer_inf: |a| too large for the truncated product");
    }
    const double q = ctx.q();
    Complex result = 1.0;
    double qj = 1.0;
    int j = 0;
    for (; j < ctx.inf_product_terms(); ++j) {
        if (std::abs(a) * qj < 1e-18) break;
        result *= 1.0 - a * qj;
        qj *= q;
    }
    // Tail check: five further factors must not move the product.
    Complex tail = 1.0;
    double qk = qj;
    for (int k = 0; k < 5; ++k) {
        tail *= 1.0 - a * qk;
        qk *= q;
    }
    if (std::abs(tail - 1.0) > 1e-14) {
        throw ConvergenceError("q_pochhammer_inf: truncation tail check failed");
    }
    return result;
}

Complex log_q_pochhammer_inf(Complex a, const QContext& ctx) {
    const double q = ctx.q();
    Complex acc = 0.0;
    double qj = 1.0;
    for (int j = 0; j < ctx.inf_product_terms(); ++j) {
        const Complex w = a * qj;
        if (std::abs(w) < 1e-18) break;
        if (std::abs(1.0 - w) < 1e-300) {
            throw PoleError("log_q_pochhammer_inf: vanishing factor");
        }
        acc += log1m(w);
        qj *= q;
    }
    return acc;
}

namespace {

// log Gamma_q(x) as sum_j [log(1-q^{j+1}) - log(1-q^{x+j})] + (1-x) log(1-q).
Complex log_q_gamma(Complex x, const QContext& ctx) {
    if (near_nonpositive_integer(x)) {
        throw PoleError("q_gamma: pole at non-positive integer");
    }
    const double q = ctx.q();
    const Complex qx = ctx.pow(x);
    Complex acc = 0.0;
    double qj = 1.0;
    for (int j = 0; j < ctx.inf_product_terms(); ++j) {
        const Complex w = qx * qj;
        if (std::abs(w) < 1e-18 && qj * q < 1e-18) break;
        if (std::abs(1.0 - w) < 1e-14) {
            throw PoleError("q_gamma: q^x lies on the pole lattice");
        }
        acc += log1m(Complex(qj * q)) - log1m(w);
        qj *= q;
    }
    return acc + (1.0 - x) * std::log1p(-q);
}

}  // namespace

Complex q_gamma(Complex x, const QContext& ctx) { return checked(std::exp(log_q_gamma(x, ctx)), "q_gamma"); }

Complex q_beta(Complex x, Complex y, const QContext& ctx) {
    return checked(std::exp(log_q_gamma(x, ctx) + log_q_gamma(y, ctx) - log_q_gamma(x + y, ctx)), "q_beta");
}

Complex q_binomial(int k, int p, const QContext& ctx) {
    if (k < 0 || p < 0 || p > k) {
        throw RangeError("q_binomial: need 0 <= p <= k");
    }
    const double q = ctx.q();
    return q_pochhammer(q, k, ctx) / (q_pochhammer(q, p, ctx) * q_pochhammer(q, k - p, ctx));
}

std::optional<int> terminating_degree(Complex base, double q) {
    if (base == 0.0) return std::nullopt;
    if (std::abs(base.imag()) > 1e-12 * std::abs(base)) return std::nullopt;
    if (base.real() < 1.0 - 1e-12) return std::nullopt;
    const double n = -std::log(base.real()) / std::log(q);
    const double rounded = std::round(n);
    if (rounded < 0.0) return std::nullopt;
    if (std::abs(base.real() * std::pow(q, rounded) - 1.0) > 1e-12) return std::nullopt;
    return static_cast<int>(rounded);
}

}  // namespace saranfk
