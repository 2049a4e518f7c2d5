#include "saranfk/registry.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <numbers>
#include <thread>

#include "identities.hpp"
#include "saranfk/measures.hpp"

namespace saranfk {

Complex ParameterPoint::operator()(const std::string& key) const {
    if (auto it = values.find(key); it != values.end()) return it->second;
    if (auto it = arguments.find(key); it != arguments.end()) return it->second;
    throw RangeError("parameter point has no entry '" + key + "'");
}

int ParameterPoint::index(const std::string& key) const { return static_cast<int>(std::lround(re(key))); }

const char* to_string(CostClass c) {
    switch (c) {
        case CostClass::Cheap: return "cheap";
        case CostClass::SingleIntegral: return "single-integral";
        case CostClass::TripleIntegral: return "triple-integral";
        case CostClass::QLattice: return "q-lattice";
    }
    return "?";
}

double default_tolerance(CostClass c) {
    switch (c) {
        case CostClass::Cheap: return 1e-10;
        case CostClass::SingleIntegral: return 1e-9;
        case CostClass::TripleIntegral: return 1e-6;
        case CostClass::QLattice: return 1e-8;
    }
    return 1e-10;
}

int default_samples(CostClass c) {
    return (c == CostClass::Cheap || c == CostClass::SingleIntegral) ? 10 : 5;
}

int default_quadrature_order() {
    if (const char* env = std::getenv("SARANFK_DEFAULT_ORDER")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0 && v <= 256) return static_cast<int>(v);
    }
    return 96;
}

int EvalConfig::axis_order(int dims) const { return std::max(8, order / std::max(1, dims)); }

const QContext& EvalConfig::q() const {
    if (!ctx) throw DomainError("q-identity evaluated without a base q");
    return *ctx;
}

std::optional<std::string> IdentityCase::violated(const ParameterPoint& p) const {
    for (const auto& c : constraints) {
        if (!c.holds(p)) return c.text;
    }
    return std::nullopt;
}

namespace detail {

Complex Draw::disc(double rmax, double rmin) {
    const double r = uniform(rmin, rmax);
    const double th = uniform(-std::numbers::pi, std::numbers::pi);
    return std::polar(r, th);
}

bool decreasing(std::initializer_list<double> chain, double gap) {
    const double* prev = nullptr;
    for (const double& v : chain) {
        if (prev && !(*prev - v > gap)) return false;
        prev = &v;
    }
    return true;
}

Constraint chain_constraint(std::string text, std::function<std::vector<Complex>(const ParameterPoint&)> f) {
    return Constraint{std::move(text), [f = std::move(f)](const ParameterPoint& p) {
                          const auto v = f(p);
                          for (std::size_t i = 1; i < v.size(); ++i) {
                              if (!(v[i - 1].real() > v[i].real())) return false;
                          }
                          return true;
                      }};
}

bool off_poles(std::initializer_list<Complex> xs, double gap) {
    for (Complex x : xs) {
        if (x.real() > 0.5) continue;
        const double k = std::round(x.real());
        if (k <= 0.0 && std::abs(x - Complex(k, 0.0)) < gap) return false;
    }
    return true;
}

}  // namespace detail

const std::vector<IdentityCase>& builtin_registry() {
    static const std::vector<IdentityCase> cases = [] {
        std::vector<IdentityCase> out;
        detail::add_classical_cases(out);
        detail::add_q_cases(out);
        return out;
    }();
    return cases;
}

const IdentityCase& lookup(std::string_view id) {
    for (const auto& c : builtin_registry()) {
        if (c.id == id) return c;
    }
    throw RangeError("unknown identity '" + std::string(id) + "'");
}

std::vector<ParameterPoint> sample_parameters(const IdentityCase& c, std::uint64_t seed, int count) {
    if (count < 0 || count > 10000) throw RangeError("sample_parameters: count must lie in [0, 10^4]");
    constexpr int kAttempts = 20000;
    std::mt19937_64 rng(seed);
    std::vector<ParameterPoint> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) {
        bool found = false;
        for (int a = 0; a < kAttempts && !found; ++a) {
            auto p = c.propose(rng, i);
            if (p && !c.violated(*p)) {
                out.push_back(std::move(*p));
                found = true;
            }
        }
        if (!found) throw SamplerError(c.id + ": rejection cap exceeded while sampling");
    }
    return out;
}

double relative_residual(Complex lhs, Complex rhs) { return std::abs(lhs - rhs) / (1.0 + std::abs(lhs)); }

VerificationResult verify_identity(const IdentityCase& c, std::uint64_t seed, int count, const VerifyOptions& opts) {
    const auto start = std::chrono::steady_clock::now();
    VerificationResult res;
    res.id = c.id;
    res.anchor = c.anchor;
    res.cost_class = c.cost_class;
    res.samples = count;
    res.tol = opts.tol_override.value_or(c.tol);

    EvalConfig cfg;
    cfg.order = opts.order > 0 ? opts.order : default_quadrature_order();
    cfg.cutoff_factor = opts.cutoff_factor;
    if (c.uses_q) {
        res.q = opts.q.value_or(0.5);
        cfg.ctx = std::make_shared<const QContext>(*res.q);
    }

    std::vector<ParameterPoint> points;
    try {
        points = sample_parameters(c, seed, count);
    } catch (const std::exception& e) {
        res.failures.push_back({ParameterPoint{}, std::numeric_limits<double>::infinity(), e.what()});
        res.max_rel_residual = std::numeric_limits<double>::infinity();
        res.wall_time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        return res;
    }

    std::vector<double> residual(points.size(), 0.0);
    std::vector<std::string> diagnostic(points.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < points.size(); i = next++) {
            try {
                const Complex l = c.lhs(points[i], cfg);
                const Complex r = c.rhs(points[i], cfg);
                residual[i] = relative_residual(l, r);
                if (!std::isfinite(residual[i])) {
                    residual[i] = std::numeric_limits<double>::infinity();
                    diagnostic[i] = "non-finite value";
                }
            } catch (const std::exception& e) {
                residual[i] = std::numeric_limits<double>::infinity();
                diagnostic[i] = e.what();
            }
        }
    };
    unsigned threads = opts.threads > 0 ? static_cast<unsigned>(opts.threads) : std::thread::hardware_concurrency();
    threads = std::clamp<unsigned>(threads, 1u, static_cast<unsigned>(std::max<std::size_t>(1, points.size())));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }

    for (std::size_t i = 0; i < points.size(); ++i) {
        res.max_rel_residual = std::max(res.max_rel_residual, residual[i]);
        if (!(residual[i] <= res.tol)) {
            std::string why = diagnostic[i].empty() ? "residual above tolerance" : diagnostic[i];
            res.failures.push_back({points[i], residual[i], std::move(why)});
        }
    }
    res.pass = res.failures.empty() && res.max_rel_residual <= res.tol;
    res.wall_time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return res;
}

Complex erdelyi1_lhs(Complex alpha, Complex beta, Complex gamma, Complex z) {
    return gauss_2f1(alpha, beta, gamma, z).value;
}

Complex erdelyi1_rhs(Complex alpha, Complex alphap, Complex beta, Complex gamma, Complex lambda, Complex z,
                     int order) {
    const MeasureSpec mu = MeasureSpec::dirichlet(lambda, gamma - lambda);
    return integrate_measure(
        [&](double x) {
            const Complex s = 1.0 - z * x;
            return cpow(s, -alphap) * gauss_2f1(alpha - alphap, beta, lambda, z * x).value *
                   gauss_2f1(alphap, beta - lambda, gamma - lambda, (1.0 - x) * z / s).value;
        },
        mu, order);
}

}  // namespace saranfk
