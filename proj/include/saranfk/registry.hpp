#pragma once

// Registry of the integral and series identities, with samplers for their
// hypotheses and paired evaluators for the two sides.

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "saranfk/core.hpp"
#include "saranfk/series.hpp"

namespace saranfk {

/// Named parameters and arguments of one identity instance. Integer-valued
/// selectors (instantiation, truncation orders) live in `values` as reals.
struct ParameterPoint {
    std::map<std::string, Complex> values;
    std::map<std::string, Complex> arguments;

    /// Looks in values, then arguments. Throws RangeError on a missing key.
    Complex operator()(const std::string& key) const;
    double re(const std::string& key) const { return (*this)(key).real(); }
    int index(const std::string& key) const;

    bool operator==(const ParameterPoint&) const = default;
};

enum class CostClass { Cheap, SingleIntegral, TripleIntegral, QLattice };

const char* to_string(CostClass c);
double default_tolerance(CostClass c);
/// 10 for cheap and single-integral cases, 5 otherwise.
int default_samples(CostClass c);

/// 96, or SARANFK_DEFAULT_ORDER when set to a positive integer.
int default_quadrature_order();

struct EvalConfig {
    std::shared_ptr<const QContext> ctx;  // null for classical identities
    /// One-dimensional Gauss-Jacobi order; k-fold rules use order/k per axis
    /// (at least 8).
    int order = 96;
    /// Scales every q-lattice length.
    double cutoff_factor = 1.0;
    double series_tol = kDefaultSeriesTol;
    /// Positive: cut every q-lattice to this many points.
    int lattice_cap = 0;

    int axis_order(int dims) const;
    const QContext& q() const;
};

struct Constraint {
    std::string text;
    std::function<bool(const ParameterPoint&)> holds;
};

using Evaluator = std::function<Complex(const ParameterPoint&, const EvalConfig&)>;
/// Proposes a candidate for the index-th sample; nullopt rejects it.
using Proposal = std::function<std::optional<ParameterPoint>(std::mt19937_64&, int index)>;

struct IdentityCase {
    std::string id;
    std::string anchor;
    CostClass cost_class = CostClass::Cheap;
    double tol = 1e-10;
    bool uses_q = false;
    std::vector<Constraint> constraints;
    Proposal propose;
    Evaluator lhs, rhs;

    /// Text of the first violated constraint, if any.
    std::optional<std::string> violated(const ParameterPoint& p) const;
};

class SamplerError : public Error {
public:
    using Error::Error;
};

const std::vector<IdentityCase>& builtin_registry();

/// Throws RangeError for an unknown id.
const IdentityCase& lookup(std::string_view id);

/// Deterministic in `seed`; at most 10^4 points.
std::vector<ParameterPoint> sample_parameters(const IdentityCase& c, std::uint64_t seed, int count);

double relative_residual(Complex lhs, Complex rhs);

struct Failure {
    ParameterPoint params;
    double residual = 0.0;  // infinite when an evaluator threw
    std::string diagnostic;
};

struct VerifyOptions {
    std::optional<double> tol_override;
    /// Base for q-identities; 0.5 when unset.
    std::optional<double> q;
    int order = 0;  // 0: default_quadrature_order()
    double cutoff_factor = 1.0;
    int threads = 0;  // 0: hardware concurrency
};

struct VerificationResult {
    std::string id;
    std::string anchor;
    std::optional<double> q;
    CostClass cost_class = CostClass::Cheap;
    int samples = 0;
    double tol = 0.0;
    double max_rel_residual = 0.0;
    std::vector<Failure> failures;
    double wall_time_ms = 0.0;
    bool pass = false;
};

VerificationResult verify_identity(const IdentityCase& c, std::uint64_t seed, int count,
                                   const VerifyOptions& opts = {});

/// Both sides of the first Erdelyi integral: 2F1(alpha, beta; gamma; z) and
/// its integral over the Dirichlet measure with parameters (lambda, gamma-lambda).
Complex erdelyi1_lhs(Complex alpha, Complex beta, Complex gamma, Complex z);
Complex erdelyi1_rhs(Complex alpha, Complex alphap, Complex beta, Complex gamma, Complex lambda, Complex z,
                     int order);

}  // namespace saranfk
