#pragma once

// Dirichlet and hypergeometric measures on [0,1] and the Gauss-Jacobi
// quadrature used to integrate against them.

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "saranfk/core.hpp"

namespace saranfk {

/// Nodes and weights for the weight t^a (1-t)^b on [0,1].
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    double a = 0.0;
    double b = 0.0;
};

/// Cached and shared; safe to call from several threads.
std::shared_ptr<const QuadratureRule> gauss_jacobi_rule(double a_exp, double b_exp, int n);

struct MeasureSpec {
    enum class Kind { Dirichlet, Hypergeometric };
    Kind kind = Kind::Dirichlet;
    // Dirichlet uses (alpha, beta); Hypergeometric uses all four with density
    // proportional to t^{eta-1} (1-t)^{gamma-1} 2F1(alpha, beta; gamma; 1-t).
    Complex alpha{1.0}, beta{1.0}, gamma{1.0}, eta{1.0};

    static MeasureSpec dirichlet(Complex alpha, Complex beta);
    static MeasureSpec hypergeometric(Complex alpha, Complex beta, Complex gamma, Complex eta);

    /// Throws DomainError when the parameters violate the measure's
    /// admissibility conditions.
    void validate() const;
};

Complex dirichlet_density(const MeasureSpec& spec, double t);
Complex hypergeometric_density(const MeasureSpec& spec, double t, double tol = 1e-15);

/// A measure reduced to a weighted point set: integral of f ~ sum w_i f(t_i).
struct NodeSet {
    std::vector<double> t;
    std::vector<Complex> w;
};

/// Hypergeometric measures use three sub-rules of `order` nodes each.
NodeSet discretize(const MeasureSpec& spec, int order);

Complex integrate_measure(const std::function<Complex(double)>& f, const MeasureSpec& spec, int order);

/// Tensor-product rule over up to four measures; `orders` may hold one
/// entry per axis or a single shared entry.
Complex integrate_product(const std::function<Complex(std::span<const double>)>& f,
                          std::span<const MeasureSpec> specs, std::span<const int> orders);

/// Same, over already discretized axes.
Complex integrate_nodes(const std::function<Complex(std::span<const double>)>& f, std::span<const NodeSet> axes);

}  // namespace saranfk
