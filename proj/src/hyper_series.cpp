#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <mutex>
#include <optional>
#include <unordered_map>

#include "saranfk/series.hpp"

namespace saranfk {

namespace {

constexpr std::size_t kMaxDirectTerms = 200000;
constexpr double kTransformRadius = 0.9;
constexpr double kNearOneRadius = 0.6;

// Degree N when x equals -N for a non-negative integer N.
std::optional<int> nonpositive_integer(Complex x) {
    if (!near_nonpositive_integer(x, 1e-12)) return std::nullopt;
    return static_cast<int>(-std::round(x.real()));
}

void require_denominator(Complex c, std::optional<int> terminate_at, const char* what) {
    auto pole = nonpositive_integer(c);
    if (!pole && near_nonpositive_integer(c)) pole = static_cast<int>(-std::round(c.real()));
    if (pole && (!terminate_at || *terminate_at > *pole)) {
        throw PoleError(std::string(what) + ": denominator parameter at a pole");
    }
}

SeriesResult scaled(SeriesResult r, Complex factor) {
    r.value *= factor;
    r.est_trunc_error *= std::max(1.0, std::abs(factor));
    r.converged = r.converged && std::isfinite(r.est_trunc_error);
    return r;
}

SeriesResult sum_of(const SeriesResult& x, Complex fx, const SeriesResult& y, Complex fy, double tol) {
    SeriesResult r;
    r.value = checked(fx * x.value + fy * y.value, "gauss_2f1");
    r.terms_used = x.terms_used + y.terms_used;
    const double abs_err = std::abs(fx) * x.est_trunc_error * (1.0 + std::abs(x.value)) +
                           std::abs(fy) * y.est_trunc_error * (1.0 + std::abs(y.value));
    r.est_trunc_error = abs_err / (1.0 + std::abs(r.value));
    r.converged = x.converged && y.converged && r.est_trunc_error <= std::max(tol, 1e3 * tol);
    return r;
}

double distance_to_integer(Complex x) {
    return std::hypot(x.real() - std::round(x.real()), x.imag());
}

// Gamma(n1) Gamma(n2) / (Gamma(d1) Gamma(d2)), zero when a denominator sits on
// a pole; log space keeps large shifted parameters finite.
Complex gamma_ratio(Complex n1, Complex n2, Complex d1, Complex d2) {
    if (near_nonpositive_integer(d1) || near_nonpositive_integer(d2)) return 0.0;
    return std::exp(log_gamma(n1) + log_gamma(n2) - log_gamma(d1) - log_gamma(d2));
}

// Connection formula around z = 1.
SeriesResult gauss_near_one(Complex a, Complex b, Complex c, Complex z, double tol) {
    const Complex s = c - a - b;
    const Complex w = 1.0 - z;
    const Complex k1 = gamma_ratio(c, s, c - a, c - b);
    const Complex k2 = gamma_ratio(c, -s, a, b) * cpow(w, s);
    SeriesResult first, second;
    if (k1 != 0.0) first = gauss_2f1_direct(a, b, 1.0 - s, w, tol);
    if (k2 != 0.0) second = gauss_2f1_direct(c - a, c - b, 1.0 + s, w, tol);
    if (k1 == 0.0) first.converged = true;
    if (k2 == 0.0) second.converged = true;
    return sum_of(first, k1, second, k2, tol);
}

}  // namespace

SeriesResult gauss_2f1_direct(Complex a, Complex b, Complex c, Complex z, double tol) {
    std::optional<int> degree;
    for (Complex u : {a, b}) {
        if (auto n = nonpositive_integer(u)) degree = degree ? std::min(*degree, *n) : *n;
    }
    require_denominator(c, degree, "gauss_2f1");
    if (!degree && std::abs(z) >= 1.0) throw DomainError("gauss_2f1: |z| >= 1");

    TruncationMonitor mon(tol);
    Complex term = 1.0;
    Complex sum = 1.0;
    mon.add(term, sum);
    const std::size_t limit = degree ? static_cast<std::size_t>(*degree) : kMaxDirectTerms;
    for (std::size_t n = 0; n < limit; ++n) {
        const double dn = static_cast<double>(n);
        term *= (a + dn) * (b + dn) / ((c + dn) * (dn + 1.0)) * z;
        sum += term;
        if (mon.add(term, sum) && !degree) break;
    }
    SeriesResult r = mon.finish(sum);
    if (degree) {
        r.est_trunc_error = 0.0;
        r.converged = true;
    }
    return r;
}

SeriesResult gauss_2f1(Complex a, Complex b, Complex c, Complex z, double tol) {
    if (near_nonpositive_integer(c) &&
        !(nonpositive_integer(a) || nonpositive_integer(b))) {
        throw PoleError("gauss_2f1: c at a pole");
    }
    if (z == 0.0) {
        SeriesResult r;
        r.value = 1.0;
        r.terms_used = 1;
        r.converged = true;
        return r;
    }
    if (nonpositive_integer(a) || nonpositive_integer(b)) return gauss_2f1_direct(a, b, c, z, tol);

    const Complex w = z / (z - 1.0);
    const double az = std::abs(z);
    const double aw = std::abs(w);
    if (az >= 1.0 && aw >= 1.0) throw DomainError("gauss_2f1: z outside |z|<1 and |z/(z-1)|<1");

    // Pfaff: (1-z)^{-a} 2F1(a, c-b; c; z/(z-1)).
    const Complex pfaff = cpow(1.0 - z, -a);
    if (std::min(az, aw) <= kTransformRadius) {
        if (az <= aw) return gauss_2f1_direct(a, b, c, z, tol);
        return scaled(gauss_2f1_direct(a, c - b, c, w, tol), pfaff);
    }
    if (distance_to_integer(c - a - b) > 0.01 && std::abs(1.0 - z) <= kNearOneRadius) {
        return gauss_near_one(a, b, c, z, tol);
    }
    if (distance_to_integer(b - a) > 0.01 && std::abs(1.0 - w) <= kNearOneRadius) {
        return scaled(gauss_near_one(a, c - b, c, w, tol), pfaff);
    }
    if (az <= aw) return gauss_2f1_direct(a, b, c, z, tol);
    return scaled(gauss_2f1_direct(a, c - b, c, w, tol), pfaff);
}

SeriesResult phi_pfq(std::span<const Complex> upper, std::span<const Complex> lower, Complex z, double tol) {
    std::optional<int> degree;
    for (Complex u : upper) {
        if (auto n = nonpositive_integer(u)) degree = degree ? std::min(*degree, *n) : *n;
    }
    for (Complex l : lower) require_denominator(l, degree, "phi_pfq");
    const std::size_t p = upper.size();
    const std::size_t q = lower.size();
    if (p > q + 1 && !degree) throw DomainError("phi_pfq: p > q+1 diverges");
    if (p == q + 1 && !degree && std::abs(z) >= 1.0) throw DomainError("phi_pfq: |z| >= 1");

    TruncationMonitor mon(tol);
    Complex term = 1.0;
    Complex sum = 1.0;
    mon.add(term, sum);
    if (z == 0.0) return mon.finish(sum);
    const std::size_t limit = degree ? static_cast<std::size_t>(*degree) : kMaxDirectTerms;
    for (std::size_t n = 0; n < limit; ++n) {
        const double dn = static_cast<double>(n);
        Complex ratio = z / (dn + 1.0);
        for (Complex u : upper) ratio *= u + dn;
        for (Complex l : lower) ratio /= l + dn;
        term *= ratio;
        sum += term;
        if (mon.add(term, sum) && !degree) break;
    }
    SeriesResult r = mon.finish(sum);
    if (degree) {
        r.est_trunc_error = 0.0;
        r.converged = true;
    }
    return r;
}

SeriesResult appell_f2(Complex a, Complex b1, Complex b2, Complex c1, Complex c2, Complex y, Complex z,
                       double tol) {
    if (near_nonpositive_integer(c1) || near_nonpositive_integer(c2)) {
        throw PoleError("appell_f2: denominator parameter at a pole");
    }
    if (std::abs(y) + std::abs(z) >= 1.0) throw DomainError("appell_f2: |y|+|z| >= 1");

    // cur[m] holds the term with indices (m, s-m) on the current shell s.
    std::vector<Complex> cur{1.0};
    TruncationMonitor mon(tol);
    Complex sum = 1.0;
    mon.add(1.0, sum);
    constexpr int kMaxShells = 5000;
    for (int s = 0; s < kMaxShells; ++s) {
        const Complex last = cur.back();
        for (int m = 0; m <= s; ++m) {
            const double n = s - m;
            cur[m] *= (a + static_cast<double>(s)) * (b2 + n) / ((c2 + n) * (n + 1.0)) * z;
        }
        const double ms = s;
        cur.push_back(last * (a + ms) * (b1 + ms) / ((c1 + ms) * (ms + 1.0)) * y);
        Complex shell = 0.0;
        for (const Complex& t : cur) shell += t;
        sum += shell;
        if (mon.add(shell, sum)) break;
    }
    return mon.finish(sum);
}

bool in_domain_fk(Complex x, Complex y, Complex z) {
    const double ax = std::abs(x);
    const double ay = std::abs(y);
    return ax < 1.0 && ay < 1.0 && std::abs(z) < (1.0 - ax) * (1.0 - ay);
}

namespace {

void require_fk(const FkParams& p, Complex x, Complex y, Complex z) {
    for (Complex g : {p.gamma1, p.gamma2, p.gamma3}) {
        if (near_nonpositive_integer(g)) throw PoleError("F_K: denominator parameter at a pole");
    }
    if (!in_domain_fk(x, y, z)) throw DomainError("F_K: point outside D_K");
}

}  // namespace

SeriesResult saran_fk_triple(const FkParams& p, Complex x, Complex y, Complex z, double tol) {
    require_fk(p, x, y, z);
    // term(m,n,p) = Z(p) T1(m,p) T2(n,p) with
    //   T1(m,p) = (alpha1)_m (beta1+p)_m / ((gamma1)_m m!) x^m
    //   T2(n,p) = (beta2)_n (alpha2+p)_n / ((gamma2)_n n!) y^n
    //   Z(p)    = (alpha2)_p (beta1)_p / ((gamma3)_p p!) z^p
    std::vector<std::vector<Complex>> t1, t2;
    std::vector<Complex> zp;
    TruncationMonitor mon(tol);
    Complex sum = 0.0;
    constexpr int kMaxShells = 600;
    for (int s = 0; s < kMaxShells; ++s) {
        // Extend tables so that every (m,p) and (n,p) with m+p <= s exists.
        for (int pp = 0; pp <= s; ++pp) {
            if (pp == s) {
                t1.push_back({1.0});
                t2.push_back({1.0});
                if (pp == 0) {
                    zp.push_back(1.0);
                } else {
                    const double d = pp - 1;
                    zp.push_back(zp.back() * (p.alpha2 + d) * (p.beta1 + d) / ((p.gamma3 + d) * (d + 1.0)) * z);
                }
                continue;
            }
            const double m = s - pp - 1;
            const double dp = pp;
            t1[pp].push_back(t1[pp].back() * (p.alpha1 + m) * (p.beta1 + dp + m) / ((p.gamma1 + m) * (m + 1.0)) * x);
            t2[pp].push_back(t2[pp].back() * (p.beta2 + m) * (p.alpha2 + dp + m) / ((p.gamma2 + m) * (m + 1.0)) * y);
        }
        Complex shell = 0.0;
        for (int pp = 0; pp <= s; ++pp) {
            if (zp[pp] == 0.0) continue;
            Complex inner = 0.0;
            const int rest = s - pp;
            for (int m = 0; m <= rest; ++m) inner += t1[pp][m] * t2[pp][rest - m];
            shell += zp[pp] * inner;
        }
        sum += shell;
        if (mon.add(shell, sum)) break;
    }
    return mon.finish(sum);
}

SeriesResult saran_fk_reexpand(const FkParams& p, Complex x, Complex y, Complex z, double tol) {
    require_fk(p, x, y, z);
    TruncationMonitor mon(tol);
    Complex coef = 1.0;
    Complex sum = 0.0;
    bool inner_ok = true;
    constexpr int kMaxTerms = 20000;
    for (int k = 0; k < kMaxTerms; ++k) {
        if (k > 0) {
            const double d = k - 1;
            coef *= (p.alpha2 + d) * (p.beta1 + d) / ((p.gamma3 + d) * (d + 1.0)) * z;
        }
        Complex term = 0.0;
        if (coef != 0.0) {
            const double dk = k;
            const SeriesResult f1 = gauss_2f1(p.beta1 + dk, p.alpha1, p.gamma1, x, tol);
            const SeriesResult f2 = gauss_2f1(p.alpha2 + dk, p.beta2, p.gamma2, y, tol);
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

namespace {

struct ChainSum {
    Complex a1, a2;
    std::span<const Complex> b, c, z;
    int bound = 0;
    std::vector<Complex> shells;
    std::vector<int> idx;

    void descend(int level, int used, Complex term) {
        const int L = static_cast<int>(z.size());
        const int prev = level > 0 ? idx[level - 1] : 0;
        for (int n = 0; used + n <= bound; ++n) {
            idx[level] = n;
            if (level + 1 == L) {
                shells[used + n] += term;
            } else {
                descend(level + 1, used + n, term);
            }
            if (term == 0.0) break;
            const double dn = n;
            const Complex left = level == 0 ? a1 + dn : b[level - 1] + static_cast<double>(prev) + dn;
            const Complex right = level + 1 == L ? a2 + dn : b[level] + dn;
            term *= left * right / ((c[level] + dn) * (dn + 1.0)) * z[level];
        }
    }
};

}  // namespace

SeriesResult fk_L(Complex a1, Complex a2, std::span<const Complex> b, std::span<const Complex> c,
                  std::span<const Complex> zs, double tol) {
    const std::size_t L = zs.size();
    if (L < 3 || L > 5) throw RangeError("fk_L: supported L is 3, 4 or 5");
    if (b.size() != L - 1 || c.size() != L) throw RangeError("fk_L: parameter list lengths do not match L");
    for (Complex g : c) {
        if (near_nonpositive_integer(g)) throw PoleError("fk_L: denominator parameter at a pole");
    }
    std::vector<double> az;
    for (Complex v : zs) az.push_back(std::abs(v));
    bool inside = false;
    if (L == 3) {
        inside = in_domain_fk(zs[0], zs[2], zs[1]);
    } else if (L == 4) {
        inside = az[0] < 1.0 && az[3] < 1.0 && az[1] / (1.0 - az[0]) + az[2] / (1.0 - az[3]) < 1.0;
    } else {
        double total = 0.0;
        for (double v : az) total += v;
        inside = total < 0.5;
    }
    if (!inside) throw DomainError("fk_L: point outside the convergence region");

    const int cap = L == 5 ? 96 : 256;
    ChainSum chain{a1, a2, b, c, zs, 0, {}, {}};
    chain.idx.assign(L, 0);
    for (int bound = 32;; bound *= 2) {
        bound = std::min(bound, cap);
        chain.bound = bound;
        chain.shells.assign(bound + 1, 0.0);
        chain.descend(0, 0, 1.0);
        TruncationMonitor mon(tol);
        Complex sum = 0.0;
        bool stopped = false;
        for (const Complex& shell : chain.shells) {
            sum += shell;
            if (mon.add(shell, sum)) {
                stopped = true;
                break;
            }
        }
        if (stopped || bound == cap) return mon.finish(sum);
    }
}

CoeffSequence2D::CoeffSequence2D(Evaluator f, double decay_bound) : f_(std::move(f)), decay_(decay_bound) {
    if (!f_) throw DomainError("CoeffSequence2D: empty evaluator");
    if (!(decay_bound > 0.0)) throw DomainError("CoeffSequence2D: decay bound must be positive");
}

double CoeffSequence2D::bound_ratio(int range) const {
    double worst = 0.0;
    for (int m = 0; m <= range; ++m) {
        for (int n = 0; n <= range; ++n) {
            worst = std::max(worst, std::abs(f_(m, n)) / std::pow(decay_, m + n));
        }
    }
    return worst;
}

CoeffSequence2D CoeffSequence2D::delta() {
    return CoeffSequence2D([](int m, int n) { return (m == 0 && n == 0) ? Complex(1.0) : Complex(0.0); }, 1.0);
}

namespace {

struct ConvolutionMemo {
    std::mutex mutex;
    std::unordered_map<std::uint64_t, Complex> values;
};

}  // namespace

CoeffSequence2D convolve2d(const CoeffSequence2D& a, const CoeffSequence2D& b) {
    auto memo = std::make_shared<ConvolutionMemo>();
    auto eval = [a, b, memo](int m, int n) -> Complex {
        if (m < 0 || n < 0) throw RangeError("convolve2d: negative index");
        const std::uint64_t key = (static_cast<std::uint64_t>(m) << 32) | static_cast<std::uint32_t>(n);
        {
            std::lock_guard lock(memo->mutex);
            if (auto it = memo->values.find(key); it != memo->values.end()) return it->second;
        }
        Complex acc = 0.0;
        for (int i = 0; i <= m; ++i) {
            for (int j = 0; j <= n; ++j) acc += a(m - i, n - j) * b(i, j);
        }
        std::lock_guard lock(memo->mutex);
        memo->values.emplace(key, acc);
        return acc;
    };
    // |sum| <= (m+1)(n+1) d^{m+n} <= (2d)^{m+n}
    return CoeffSequence2D(eval, 2.0 * std::max(a.decay_bound(), b.decay_bound()));
}

SeriesResult generic_f_a(const CoeffSequence2D& a, const FaParams& p, Complex x1, Complex x2, Complex x3,
                         Complex x4, double tol) {
    if (std::abs(x1) >= 1.0 || std::abs(x2) >= 1.0) throw DomainError("F^a: need |x1|, |x2| < 1");
    if (a.decay_bound() * std::max(std::abs(x3), std::abs(x4)) >= 1.0) {
        throw DomainError("F^a: decay bound times max(|x3|,|x4|) must be below 1");
    }
    for (Complex g : {p.gamma1, p.gamma2}) {
        if (near_nonpositive_integer(g)) throw PoleError("F^a: denominator parameter at a pole");
    }
    std::vector<std::optional<Complex>> f1, f2;
    std::vector<Complex> pow3{1.0}, pow4{1.0};
    bool inner_ok = true;
    auto factor = [&](std::vector<std::optional<Complex>>& cache, int k, Complex alpha, Complex beta, Complex gamma,
                      Complex x) {
        if (static_cast<int>(cache.size()) <= k) cache.resize(k + 1);
        if (!cache[k]) {
            const SeriesResult r = gauss_2f1(alpha + static_cast<double>(k), beta, gamma, x, tol);
            inner_ok = inner_ok && r.converged;
            cache[k] = r.value;
        }
        return *cache[k];
    };

    TruncationMonitor mon(tol);
    Complex sum = 0.0;
    constexpr int kMaxShells = 2000;
    for (int s = 0; s < kMaxShells; ++s) {
        if (s > 0) {
            pow3.push_back(pow3.back() * x3);
            pow4.push_back(pow4.back() * x4);
        }
        Complex shell = 0.0;
        for (int m = 0; m <= s; ++m) {
            const int n = s - m;
            const Complex w = pow3[m] * pow4[n];
            if (w == 0.0) continue;
            const Complex coef = a(m, n);
            if (coef == 0.0) continue;
            shell += coef * w * factor(f1, m, p.alpha1, p.beta1, p.gamma1, x1) *
                     factor(f2, n, p.alpha2, p.beta2, p.gamma2, x2);
        }
        sum += shell;
        if (mon.add(shell, sum)) break;
    }
    SeriesResult r = mon.finish(sum);
    r.converged = r.converged && inner_ok;
    return r;
}

}  // namespace saranfk
