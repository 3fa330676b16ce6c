#pragma once

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "gbh/constants.hpp"
#include "gbh/operators.hpp"

namespace gbh {

/// Data of one problem instance. lambda must lie in (0, lambda1) and p > 2
/// (the existence hypotheses); eps >= 0 scales the forcing f (interior-indexed).
struct ProblemParams {
    double lambda = 0.0;
    double p = 0.0;
    double eps = 0.0;
    VertexFunction f;
};

/// Validate and pack problem parameters against the assembled form.
inline ProblemParams make_params(const BiharmonicForm& form, double lambda, double p, double eps,
                                 VertexFunction f) {
    if (!(p > 2.0))
        throw std::invalid_argument("p must exceed 2");
    if (!(eps >= 0.0))
        throw std::invalid_argument("eps must be nonnegative");
    form.check_dim(f);
    if (!f.allFinite())
        throw std::invalid_argument("non-finite forcing values");
    double l1 = lambda1(form);
    if (!(lambda > 0.0) || !(lambda < l1))
        throw std::invalid_argument("lambda must lie in (0, lambda1)");
    return ProblemParams{lambda, p, eps, std::move(f)};
}

namespace detail {

inline void require_finite(const VertexFunction& u) {
    if (!u.allFinite())
        throw std::invalid_argument("non-finite values in vertex function");
}

}  // namespace detail

/// J(u) = 1/2 u^T B u - (lambda/2) int u^2 - (1/p) int |u|^p - eps int f u.
inline double energy(const BiharmonicForm& form, const ProblemParams& params,
                     const VertexFunction& u) {
    form.check_dim(u);
    detail::require_finite(u);
    const Eigen::VectorXd& M = form.M_int();
    double quad = 0.5 * form.quadratic(u);
    double mass = (M.array() * u.array().square()).sum();
    double plq = detail::lq_pow(form, u, params.p);
    double force = (M.array() * params.f.array() * u.array()).sum();
    return quad - 0.5 * params.lambda * mass - plq / params.p - params.eps * force;
}

/// First variation of J as an interior-indexed residual vector:
///   r = B u - lambda M u - M |u|^{p-2}u - eps M f.
/// r(x) is the derivative of energy in the direction of the indicator of x.
inline VertexFunction gradient(const BiharmonicForm& form, const ProblemParams& params,
                               const VertexFunction& u) {
    form.check_dim(u);
    detail::require_finite(u);
    const Eigen::VectorXd& M = form.M_int();
    Eigen::VectorXd nl = u.unaryExpr([&](double x) { return signed_pow(x, params.p - 1.0); });
    return form.B() * u - params.lambda * M.cwiseProduct(u) - M.cwiseProduct(nl) -
           params.eps * M.cwiseProduct(params.f);
}

/// Auxiliary quadratic energy 1/2 u^T B u - (lambda/2) int u^2 - int f u.
inline double energy_linear(const BiharmonicForm& form, double lambdaval, const VertexFunction& f,
                            const VertexFunction& u) {
    form.check_dim(f);
    form.check_dim(u);
    const Eigen::VectorXd& M = form.M_int();
    return 0.5 * form.quadratic(u) - 0.5 * lambdaval * (M.array() * u.array().square()).sum() -
           (M.array() * f.array() * u.array()).sum();
}

/// H'-norm of the first variation, sqrt(r^T B^{-1} r); u is certified a weak
/// solution when this does not exceed the configured tolerance.
inline double residual_norm(const BiharmonicForm& form, const ProblemParams& params,
                            const VertexFunction& u) {
    Eigen::VectorXd r = gradient(form, params, u);
    return std::sqrt(std::max(0.0, r.dot(form.solve_B(r))));
}

/// | J(u) - ( (1/2 - 1/p) int |u|^p - (eps/2) int f u ) |. Vanishes exactly
/// at critical points (test the Euler identity 〈J'(u), u〉 = 0 against J).
inline double critical_point_identity_gap(const BiharmonicForm& form, const ProblemParams& params,
                                          const VertexFunction& u) {
    form.check_dim(u);
    const Eigen::VectorXd& M = form.M_int();
    double plq = detail::lq_pow(form, u, params.p);
    double force = (M.array() * params.f.array() * u.array()).sum();
    double rhs = (0.5 - 1.0 / params.p) * plq - 0.5 * params.eps * force;
    return std::abs(energy(form, params, u) - rhs);
}

}  // namespace gbh
