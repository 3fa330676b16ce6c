#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

#include <Eigen/Dense>

#include "gbh/graph.hpp"
#include "gbh/operators.hpp"

namespace gbh {

/// Two-sided bracket for a quantity only iteratively computable.
struct Interval {
    double lower = 0.0;
    double upper = 0.0;
};

/// Scalar constants entering the existence estimates and certificates.
/// tau = (lambda1 - lambda)/lambda1 is the coercivity margin; C_q brackets
/// the embedding constant ||u||_{L^q} <= C ||u||_H at q = p; eps1_hat is the
/// computable forcing threshold below which both solutions are guaranteed.
struct ConstantsReport {
    double lambda1 = 0.0;
    double lambda = 0.0;
    double tau = 0.0;
    double p = 0.0;
    Interval C_q;
    double f_dual_norm = 0.0;
    double eps1_hat = 0.0;

    double r_eps(double eps) const { return std::sqrt(eps); }
    double delta_eps(double eps) const { return tau * eps / 4.0; }
    bool in_regime(double eps) const { return eps > 0.0 && eps <= eps1_hat; }
};

namespace detail {

/// Symmetric reduction M^{-1/2} B M^{-1/2} of the pencil (B, M_int).
inline Eigen::MatrixXd whitened_form(const BiharmonicForm& form) {
    Eigen::VectorXd s = form.M_int().cwiseSqrt().cwiseInverse();
    return s.asDiagonal() * form.B() * s.asDiagonal();
}

}  // namespace detail

/// Smallest eigenvalue of B u = lambda M_int u: the Dirichlet ground state of
/// the biharmonic form. Strictly positive since B is positive definite.
inline double lambda1(const BiharmonicForm& form) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(detail::whitened_form(form),
                                                      Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("eigenvalue computation failed");
    return es.eigenvalues()[0];
}

/// Ground-state eigenfunction, normalized to ||u||_H = 1, sign fixed so the
/// entry of largest magnitude is positive.
inline VertexFunction lambda1_eigenfunction(const BiharmonicForm& form) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(detail::whitened_form(form));
    if (es.info() != Eigen::Success)
        throw std::runtime_error("eigenvalue computation failed");
    Eigen::VectorXd u =
        form.M_int().cwiseSqrt().cwiseInverse().asDiagonal() * es.eigenvectors().col(0);
    int imax = 0;
    u.cwiseAbs().maxCoeff(&imax);
    if (u[imax] < 0.0)
        u = -u;
    return u / norm_H(form, u);
}

/// Dual norm of u -> integral(f u) over the interior:
/// ||f||_{H'} = sqrt((M f)^T B^{-1} (M f)); the supremum of the pairing over
/// the unit H-sphere is attained at the solve, so this is exact.
inline double dual_norm(const BiharmonicForm& form, const VertexFunction& f) {
    form.check_dim(f);
    Eigen::VectorXd Mf = form.M_int().cwiseProduct(f);
    return std::sqrt(std::max(0.0, Mf.dot(form.solve_B(Mf))));
}

namespace detail {

/// ||u||_{L^q(Omega)}^q with the interior measure.
inline double lq_pow(const BiharmonicForm& form, const VertexFunction& u, double q) {
    return (form.M_int().array() * u.array().abs().pow(q)).sum();
}

/// Projected gradient ascent of ||u||_{L^q} over the unit H-sphere from one
/// start; returns the ratio attained.
inline double ascend_ratio(const BiharmonicForm& form, double q, VertexFunction u) {
    double h = norm_H(form, u);
    if (h <= 0.0)
        return 0.0;
    u /= h;
    double val = std::pow(lq_pow(form, u, q), 1.0 / q);
    for (int it = 0; it < 500; ++it) {
        // Euclidean gradient of ||u||_{L^q}, preconditioned into the H metric
        // by B^{-1}, then projected onto the tangent space of the B-sphere.
        Eigen::VectorXd gE =
            form.M_int().cwiseProduct(u.unaryExpr([q](double x) { return signed_pow(x, q - 1.0); }));
        gE *= std::pow(lq_pow(form, u, q), 1.0 / q - 1.0);
        Eigen::VectorXd g = form.solve_B(gE);
        g -= u * u.dot(form.B() * g);
        double g2 = g.dot(form.B() * g);
        if (g2 < 1e-26 * (1.0 + val * val))
            break;
        double step = 1.0;
        bool advanced = false;
        for (int ls = 0; ls < 40; ++ls) {
            VertexFunction cand = u + step * g;
            cand /= norm_H(form, cand);
            double cval = std::pow(lq_pow(form, cand, q), 1.0 / q);
            if (cval > val + 1e-4 * step * g2) {
                u = std::move(cand);
                val = cval;
                advanced = true;
                break;
            }
            step *= 0.5;
        }
        if (!advanced)
            break;
    }
    return val;
}

}  // namespace detail

/// Two-sided bracket for the best constant in ||u||_{L^q(Omega)} <= C ||u||_H.
///
/// Upper bound (certified): q = 2 gives the sharp value 1/sqrt(lambda1);
/// otherwise C_inf * mu(Omega)^{1/q} with C_inf = max_x sqrt(e_x^T B^{-1} e_x),
/// the exact sup-norm embedding constant. Lower bound: multi-start projected
/// gradient ascent of the ratio (ground-state, coordinate, and seeded random
/// starts), clamped to never exceed the upper bound.
inline Interval embedding_constant(const BiharmonicForm& form, double q, std::uint64_t seed = 0) {
    if (q < 1.0)
        throw std::invalid_argument("embedding exponent must be >= 1");
    const int n = form.interior_size();

    Interval out;
    if (q == 2.0) {
        out.upper = 1.0 / std::sqrt(lambda1(form));
    } else {
        double c_inf2 = 0.0;
        for (int k = 0; k < n; ++k) {
            Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
            e[k] = 1.0;
            c_inf2 = std::max(c_inf2, form.solve_B(e)[k]);
        }
        out.upper = std::sqrt(c_inf2) * std::pow(form.M_int().sum(), 1.0 / q);
    }

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    double best = detail::ascend_ratio(form, q, lambda1_eigenfunction(form));
    for (int s = 0; s < 32; ++s) {
        VertexFunction u(n);
        if (s < n) {
            u.setZero();
            u[s] = 1.0;
        } else {
            for (int k = 0; k < n; ++k)
                u[k] = gauss(rng);
        }
        best = std::max(best, detail::ascend_ratio(form, q, u));
    }
    out.lower = std::min(best, out.upper);
    return out;
}

/// Largest eps > 0 with
///   g(eps) = (tau/2) sqrt(eps) - 2^{p-2} C eps^{(p-1)/2}
///            - eps ||f||_{H'} - (tau/4) sqrt(eps) >= 0 on (0, eps].
/// h(eps) = g(eps)/sqrt(eps) is strictly decreasing with h(0+) = tau/4 > 0,
/// so the threshold is the unique sign change; bisection to relative width
/// 1e-10, returning the nonnegative endpoint.
inline double epsilon1_hat(double tau, double p, double C_upper, double f_dual) {
    if (!(tau > 0.0))
        throw std::invalid_argument("tau must be positive (lambda below lambda1)");
    if (!(p > 2.0))
        throw std::invalid_argument("p must exceed 2");
    if (!(C_upper > 0.0))
        throw std::invalid_argument("embedding constant must be positive");
    const double a = std::pow(2.0, p - 2.0) * C_upper;
    auto h = [&](double eps) {
        return tau / 4.0 - a * std::pow(eps, (p - 2.0) / 2.0) - std::sqrt(eps) * f_dual;
    };
    double lo = 1e-16;
    if (h(lo) <= 0.0)
        return lo;  // degenerate data: threshold below resolvable range
    double hi = 1.0;
    while (h(hi) > 0.0)
        hi *= 2.0;
    while ((hi - lo) > 1e-10 * hi) {
        double mid = 0.5 * (lo + hi);
        (h(mid) > 0.0 ? lo : hi) = mid;
    }
    return lo;
}

/// Assemble the full constants report. Requires 0 < lambda < lambda1 (the
/// existence hypothesis); f is interior-indexed.
inline ConstantsReport compute_constants(const BiharmonicForm& form, double lambda, double p,
                                         const VertexFunction& f, std::uint64_t seed = 0) {
    if (!(p > 2.0))
        throw std::invalid_argument("p must exceed 2");
    ConstantsReport r;
    r.lambda1 = lambda1(form);
    if (!(lambda > 0.0) || !(lambda < r.lambda1))
        throw std::invalid_argument("lambda must lie in (0, lambda1)");
    r.lambda = lambda;
    r.tau = (r.lambda1 - lambda) / r.lambda1;
    r.p = p;
    r.C_q = embedding_constant(form, p, seed);
    r.f_dual_norm = dual_norm(form, f);
    r.eps1_hat = epsilon1_hat(r.tau, p, r.C_q.upper, r.f_dual_norm);
    return r;
}

}  // namespace gbh
