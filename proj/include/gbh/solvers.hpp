#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gbh/constants.hpp"
#include "gbh/functional.hpp"
#include "gbh/operators.hpp"

namespace gbh {

/// Knobs shared by all iterative solvers. Defaults are tuned for desk-scale
/// problems; every randomized choice draws from `seed` for reproducibility.
struct SolverConfig {
    double tol = 1e-8;          // residual tolerance in the H'-norm
    int max_iter = 100000;      // outer-iteration cap (descent steps / path sweeps)
    int path_nodes = 64;        // mountain-pass path discretization
    double descent_step = 1.0;  // initial backtracking step
    double armijo_factor = 0.5;
    double armijo_c1 = 1e-4;
    std::uint64_t seed = 0;
    int newton_max = 50;
};

inline void validate_config(const SolverConfig& cfg) {
    if (!(cfg.tol > 0.0))
        throw std::invalid_argument("tol must be positive");
    if (cfg.max_iter < 1)
        throw std::invalid_argument("max_iter must be at least 1");
    if (cfg.path_nodes < 8)
        throw std::invalid_argument("path_nodes must be at least 8");
    if (!(cfg.descent_step > 0.0))
        throw std::invalid_argument("descent_step must be positive");
    if (!(cfg.armijo_factor > 0.0 && cfg.armijo_factor < 1.0))
        throw std::invalid_argument("armijo_factor must lie in (0,1)");
    if (!(cfg.armijo_c1 > 0.0 && cfg.armijo_c1 < 1.0))
        throw std::invalid_argument("armijo_c1 must lie in (0,1)");
    if (cfg.newton_max < 1)
        throw std::invalid_argument("newton_max must be at least 1");
}

enum class PointKind { local_min, mountain_pass, linear_aux };

inline const char* to_string(PointKind k) {
    switch (k) {
        case PointKind::local_min: return "local_min";
        case PointKind::mountain_pass: return "mountain_pass";
        case PointKind::linear_aux: return "linear_aux";
    }
    return "unknown";
}

/// One computed critical point plus its certification data. `flags` carries
/// degenerate-case annotations ("trivial at eps=0", "singular jacobian", ...).
struct CriticalPoint {
    VertexFunction u;
    double energy = 0.0;
    double norm_H = 0.0;
    double residual = 0.0;
    PointKind kind = PointKind::local_min;
    int iterations = 0;
    std::vector<std::string> flags;
};

/// Solver failure carrying the pipeline stage that raised it.
class solver_error : public std::runtime_error {
public:
    solver_error(std::string stage, const std::string& message)
        : std::runtime_error(stage + ": " + message), stage_(std::move(stage)) {}
    const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

inline CriticalPoint newton_refine(const BiharmonicForm& form, const ProblemParams& params,
                                   const CriticalPoint& start, const SolverConfig& cfg);

namespace detail {

inline void fill_point(const BiharmonicForm& form, const ProblemParams& params, CriticalPoint& pt) {
    pt.energy = energy(form, params, pt.u);
    pt.norm_H = norm_H(form, pt.u);
    pt.residual = residual_norm(form, params, pt.u);
}

}  // namespace detail

/// Solve the auxiliary linear problem (B - lambda M) u = M f by Cholesky,
/// with iterative refinement to a relative residual of 1e-12. The solution
/// is the global minimizer of the quadratic energy `energy_linear`.
inline CriticalPoint solve_linear(const BiharmonicForm& form, double lambdaval,
                                  const VertexFunction& f) {
    form.check_dim(f);
    Eigen::MatrixXd A = form.B();
    A.diagonal() -= lambdaval * form.M_int();
    Eigen::LLT<Eigen::MatrixXd> llt(A);
    if (llt.info() != Eigen::Success)
        throw solver_error("solve_linear",
                           "B - lambda M is not positive definite (lambda >= lambda1)");
    Eigen::VectorXd Mf = form.M_int().cwiseProduct(f);
    Eigen::VectorXd u = llt.solve(Mf);
    int refinements = 0;
    for (; refinements < 3; ++refinements) {
        Eigen::VectorXd r = Mf - A * u;
        if (r.norm() <= 1e-13 * (Mf.norm() + A.norm() * u.norm()))
            break;
        u += llt.solve(r);
    }
    Eigen::VectorXd r = Mf - A * u;
    if (r.norm() > 1e-12 * (Mf.norm() + A.norm() * u.norm()))
        throw solver_error("solve_linear", "linear residual did not reach 1e-12 relative");

    CriticalPoint out;
    out.u = std::move(u);
    out.kind = PointKind::linear_aux;
    out.energy = energy_linear(form, lambdaval, f, out.u);
    out.norm_H = norm_H(form, out.u);
    out.residual = std::sqrt(std::max(0.0, r.dot(form.solve_B(r))));
    out.iterations = refinements;
    return out;
}

/// Normalized descent direction u* = u_bar / ||u_bar||_H where u_bar solves
/// the auxiliary linear problem. Along u*, d/dt energy(t u*)|_0 < 0 for
/// eps > 0. For f = 0 the direction is undefined; the ground-state
/// eigenfunction is used instead (the caller records the fallback).
inline VertexFunction descent_start(const BiharmonicForm& form, const ProblemParams& params) {
    if (params.f.isZero(0.0))
        return lambda1_eigenfunction(form);
    CriticalPoint lin = solve_linear(form, params.lambda, params.f);
    return lin.u / norm_H(form, lin.u);
}

/// Minimize the energy over the ball ||u||_H <= 2 r_eps by projected
/// gradient descent in the H metric (the radial projection is exact since
/// the constraint set is a B-ellipsoid). Started from the best of a 16-point
/// scan of energy(t u*) on (0, r_eps], clamped to r_eps/2. For eps = 0 or
/// f = 0 the minimizer on the small ball is exactly 0.
inline CriticalPoint minimize_in_ball(const BiharmonicForm& form, const ProblemParams& params,
                                      const SolverConfig& cfg) {
    validate_config(cfg);
    CriticalPoint out;
    out.kind = PointKind::local_min;

    if (params.eps == 0.0 || params.f.isZero(0.0)) {
        out.u = VertexFunction::Zero(form.interior_size());
        detail::fill_point(form, params, out);
        out.flags.push_back(params.eps == 0.0 ? "trivial at eps=0" : "zero forcing: trivial small solution");
        return out;
    }

    const double r_eps = std::sqrt(params.eps);
    const double radius = 2.0 * r_eps;
    const VertexFunction ustar = descent_start(form, params);

    double t_best = r_eps / 16.0;
    double scan_best = std::numeric_limits<double>::infinity();
    for (int i = 1; i <= 16; ++i) {
        double t = r_eps * static_cast<double>(i) / 16.0;
        double e = energy(form, params, t * ustar);
        if (e < scan_best) {
            scan_best = e;
            t_best = t;
        }
    }

    auto descend = [&](VertexFunction u, int& iters) {
        for (iters = 0; iters < cfg.max_iter; ++iters) {
            Eigen::VectorXd g = gradient(form, params, u);
            Eigen::VectorXd dir = form.solve_B(g);
            double g2 = g.dot(dir);  // squared H'-norm of the residual
            if (std::sqrt(std::max(0.0, g2)) <= cfg.tol)
                break;
            double Ju = energy(form, params, u);
            double step = cfg.descent_step;
            bool moved = false;
            for (int ls = 0; ls < 60; ++ls) {
                VertexFunction cand = u - step * dir;
                double nh = norm_H(form, cand);
                bool projected = nh > radius;
                if (projected)
                    cand *= radius / nh;
                double Jc = energy(form, params, cand);
                bool accept = projected ? (Jc < Ju) : (Jc <= Ju - cfg.armijo_c1 * step * g2);
                if (accept) {
                    u = std::move(cand);
                    moved = true;
                    break;
                }
                step *= cfg.armijo_factor;
            }
            if (!moved)
                break;  // progress below floating-point resolution
        }
        return u;
    };

    int iters = 0;
    VertexFunction u = descend(std::min(t_best, r_eps / 2.0) * ustar, iters);
    out.u = u;
    detail::fill_point(form, params, out);

    // The descent start was clamped; if the scan found a lower point, descend
    // again from the true scan argmin so the post-condition (no scan point
    // beats the output) holds unconditionally.
    if (out.energy > scan_best) {
        int iters2 = 0;
        VertexFunction u2 = descend(t_best * ustar, iters2);
        iters += iters2;
        double e2 = energy(form, params, u2);
        if (e2 < out.energy) {
            out.u = std::move(u2);
            detail::fill_point(form, params, out);
        }
    }
    out.iterations = iters;

    // Descent can plateau at floating-point resolution just above tol; a
    // guarded Newton polish finishes the job or the solve fails honestly.
    if (out.residual > cfg.tol) {
        CriticalPoint ref = newton_refine(form, params, out, cfg);
        bool inside = ref.norm_H <= radius + cfg.tol;
        bool no_worse = ref.energy <= out.energy + cfg.tol * (1.0 + std::abs(out.energy));
        if (ref.residual <= cfg.tol && inside && no_worse)
            out = std::move(ref);
    }
    if (out.residual > cfg.tol)
        throw solver_error("minimize_in_ball", "failed to reach tolerance within max_iter");
    return out;
}

/// Scale the direction u* by doubling t from 1 until the energy is negative
/// and the point is safely outside the 2 r_eps ball; termination is
/// guaranteed by the superquadratic growth (p > 2).
inline VertexFunction find_endpoint(const BiharmonicForm& form, const ProblemParams& params,
                                    const VertexFunction& ustar, const SolverConfig& cfg) {
    validate_config(cfg);
    const double r_eps = std::sqrt(params.eps);
    const double nh = norm_H(form, ustar);
    if (nh <= 0.0)
        throw solver_error("find_endpoint", "zero direction");
    double t = 1.0;
    for (int k = 0; k < 200; ++k) {
        VertexFunction cand = t * ustar;
        if (energy(form, params, cand) < 0.0 && t * nh > 2.0 * r_eps)
            return cand;
        t *= 2.0;
    }
    throw solver_error("find_endpoint", "no negative-energy endpoint within 200 doublings");
}

/// Damped Newton refinement of a near-critical point. The Jacobian of the
/// residual is B - lambda M - (p-1) M diag(|u|^{p-2}); steps are halved until
/// the residual decreases, and the iterate never moves farther than 10x the
/// initial residual from the start (trust guard). A singular Jacobian
/// returns the input unchanged, flagged.
inline CriticalPoint newton_refine(const BiharmonicForm& form, const ProblemParams& params,
                                   const CriticalPoint& start, const SolverConfig& cfg) {
    validate_config(cfg);
    const double target = std::min(cfg.tol, 1e-12);

    CriticalPoint out = start;
    detail::fill_point(form, params, out);
    out.iterations = 0;
    if (out.residual <= target)
        return out;

    const double max_move = 10.0 * out.residual;
    VertexFunction u = out.u;
    double res = out.residual;
    int it = 0;
    for (; it < cfg.newton_max && res > target; ++it) {
        Eigen::VectorXd dnl =
            (params.p - 1.0) *
            u.cwiseAbs().unaryExpr([&](double a) { return std::pow(a, params.p - 2.0); });
        Eigen::MatrixXd Jac = form.B();
        Jac.diagonal() -= form.M_int().cwiseProduct(Eigen::VectorXd::Constant(u.size(), params.lambda) + dnl);
        Eigen::FullPivLU<Eigen::MatrixXd> lu(Jac);
        if (!lu.isInvertible()) {
            CriticalPoint back = start;
            detail::fill_point(form, params, back);
            back.iterations = 0;
            back.flags.push_back("singular jacobian");
            return back;
        }
        Eigen::VectorXd delta = lu.solve(gradient(form, params, u));
        double alpha = 1.0;
        bool ok = false;
        for (int h = 0; h < 30; ++h) {
            VertexFunction cand = u - alpha * delta;
            if (norm_H(form, cand - start.u) <= max_move) {
                double rc = residual_norm(form, params, cand);
                if (rc < res) {
                    u = std::move(cand);
                    res = rc;
                    ok = true;
                    break;
                }
            }
            alpha *= 0.5;
        }
        if (!ok) {
            out.flags.push_back("newton stalled");
            break;
        }
    }
    out.u = std::move(u);
    detail::fill_point(form, params, out);
    out.iterations = it;
    return out;
}

/// Result of the path-deformation minimax search: the critical point, the
/// certified minimax estimate (max energy over the final path), and the
/// work done.
struct MountainPassResult {
    CriticalPoint point;
    double c_est = 0.0;
    int sweeps = 0;
    int restarts = 0;
};

/// Mountain-pass search: discretize the segment [0, endpoint], repeatedly
/// push the path's energy maximizer downhill (Armijo step in the H metric),
/// re-equidistribute its neighbors, and polish the maximizer by damped
/// Newton when its residual is small. A candidate is accepted when its
/// residual reaches tol and its energy clears the annulus floor
/// delta_eps = tau eps / 4 (positive energy, after restarts are exhausted,
/// for out-of-regime parameters). Stagnation triggers a seeded perturbed
/// restart; among candidates below the floor the one of smallest energy is
/// kept as a last resort.
inline MountainPassResult mountain_pass(const BiharmonicForm& form, const ProblemParams& params,
                                        const VertexFunction& endpoint, const SolverConfig& cfg) {
    validate_config(cfg);
    const int n = form.interior_size();
    const int N = cfg.path_nodes;
    const double l1 = lambda1(form);
    const double tau = (l1 - params.lambda) / l1;
    const double delta_eps = tau * params.eps / 4.0;
    const int max_restarts = 8;
    const int stagnation_window = 500;

    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    std::vector<VertexFunction> path(static_cast<std::size_t>(N));
    auto straight_path = [&]() {
        for (int i = 0; i < N; ++i)
            path[static_cast<std::size_t>(i)] =
                (static_cast<double>(i) / (N - 1)) * endpoint;
    };
    auto perturbed_path = [&]() {
        straight_path();
        const double scale = 0.2 * norm_H(form, endpoint);
        for (int i = 1; i + 1 < N; ++i) {
            VertexFunction v(n);
            for (int k = 0; k < n; ++k)
                v[k] = gauss(rng);
            double vn = norm_H(form, v);
            if (vn > 0.0)
                path[static_cast<std::size_t>(i)] +=
                    (scale * std::sin(std::numbers::pi * i / (N - 1)) / vn) * v;
        }
    };
    straight_path();

    std::vector<double> J(static_cast<std::size_t>(N));
    auto energize = [&]() {
        for (int i = 0; i < N; ++i)
            J[static_cast<std::size_t>(i)] = energy(form, params, path[static_cast<std::size_t>(i)]);
    };
    energize();

    auto finish = [&](CriticalPoint pt, int maximizer, int sweeps, int restarts) {
        path[static_cast<std::size_t>(maximizer)] = pt.u;
        J[static_cast<std::size_t>(maximizer)] = pt.energy;
        MountainPassResult res;
        res.point = std::move(pt);
        res.c_est = *std::max_element(J.begin(), J.end());
        res.sweeps = sweeps;
        res.restarts = restarts;
        return res;
    };

    CriticalPoint fallback;     // best sub-floor candidate seen across restarts
    bool have_fallback = false;
    int restarts = 0;
    double best_res = std::numeric_limits<double>::infinity();
    int since_improve = 0;

    for (int sweep = 0; sweep < cfg.max_iter; ++sweep) {
        int k = 1;
        for (int i = 2; i + 1 < N; ++i)
            if (J[static_cast<std::size_t>(i)] > J[static_cast<std::size_t>(k)])
                k = i;
        VertexFunction& um = path[static_cast<std::size_t>(k)];

        Eigen::VectorXd g = gradient(form, params, um);
        Eigen::VectorXd dir = form.solve_B(g);
        double g2 = g.dot(dir);
        double res = std::sqrt(std::max(0.0, g2));

        if (res < best_res * (1.0 - 1e-12)) {
            best_res = res;
            since_improve = 0;
        } else {
            ++since_improve;
        }

        // Polish opportunistically: on the first sweep (the straight-line
        // maximizer is often already in the Newton basin), periodically, and
        // whenever the deformation is nearly converged.
        bool try_polish = sweep % 10 == 0 || res <= 100.0 * cfg.tol;
        if (try_polish) {
            CriticalPoint seed_pt;
            seed_pt.u = um;
            seed_pt.kind = PointKind::mountain_pass;
            CriticalPoint ref = newton_refine(form, params, seed_pt, cfg);
            if (ref.residual <= cfg.tol && ref.energy > 0.0) {
                if (ref.energy >= delta_eps)
                    return finish(std::move(ref), k, sweep + 1, restarts);
                if (!have_fallback || ref.energy < fallback.energy) {
                    fallback = ref;
                    have_fallback = true;
                }
            }
        }

        // Deformation: push the maximizer downhill one backtracking step.
        if (res > cfg.tol) {
            double Ju = J[static_cast<std::size_t>(k)];
            double step = cfg.descent_step;
            for (int ls = 0; ls < 60; ++ls) {
                VertexFunction cand = um - step * dir;
                double Jc = energy(form, params, cand);
                if (Jc <= Ju - cfg.armijo_c1 * step * g2) {
                    um = std::move(cand);
                    J[static_cast<std::size_t>(k)] = Jc;
                    break;
                }
                step *= cfg.armijo_factor;
            }
            // Local re-equidistribution: pull the neighbors to midpoints so
            // nodes do not pile up at the maximizer.
            if (k - 1 >= 1) {
                path[static_cast<std::size_t>(k - 1)] =
                    0.5 * (path[static_cast<std::size_t>(k - 2)] + path[static_cast<std::size_t>(k)]);
                J[static_cast<std::size_t>(k - 1)] =
                    energy(form, params, path[static_cast<std::size_t>(k - 1)]);
            }
            if (k + 1 <= N - 2) {
                path[static_cast<std::size_t>(k + 1)] =
                    0.5 * (path[static_cast<std::size_t>(k)] + path[static_cast<std::size_t>(k + 2)]);
                J[static_cast<std::size_t>(k + 1)] =
                    energy(form, params, path[static_cast<std::size_t>(k + 1)]);
            }
        }

        if (since_improve >= stagnation_window) {
            ++restarts;
            if (restarts > max_restarts)
                break;
            perturbed_path();
            energize();
            best_res = std::numeric_limits<double>::infinity();
            since_improve = 0;
        }
    }

    if (have_fallback) {
        // Every restart stalled below the floor; return the best candidate
        // (smallest positive energy). Certification happens at report time.
        int k = 1;
        for (int i = 2; i + 1 < N; ++i)
            if (J[static_cast<std::size_t>(i)] > J[static_cast<std::size_t>(k)])
                k = i;
        fallback.flags.push_back("energy below delta_eps floor");
        return finish(std::move(fallback), k, cfg.max_iter, restarts);
    }
    throw solver_error("mountain_pass", restarts > max_restarts
                                            ? "stagnation: perturbed restarts exhausted"
                                            : "max_iter exhausted without a critical point");
}

/// Everything two_solutions produces: both certified points, the constants
/// they are certified against, and mountain-pass diagnostics.
struct TwoSolutionsResult {
    CriticalPoint u0;
    CriticalPoint uc;
    ConstantsReport constants;
    double c_est = 0.0;
    int mp_sweeps = 0;
    int mp_restarts = 0;
    double distance_H = 0.0;
    double energy_gap = 0.0;
    std::vector<std::string> notes;
};

/// Full pipeline of the existence argument: constants, the ball minimizer
/// u0, the negative-energy endpoint, the mountain-pass point uc, and Newton
/// refinement of both. Sub-solver failures propagate with their stage label.
inline TwoSolutionsResult two_solutions(const BiharmonicForm& form, const ProblemParams& params,
                                        const SolverConfig& cfg) {
    validate_config(cfg);
    TwoSolutionsResult out;
    out.constants = compute_constants(form, params.lambda, params.p, params.f, cfg.seed);

    if (params.f.isZero(0.0))
        out.notes.push_back("zero forcing: descent direction fell back to the ground state");
    if (params.eps == 0.0)
        out.notes.push_back("eps = 0: small solution is trivial");
    else if (!out.constants.in_regime(params.eps))
        out.notes.push_back("out of guaranteed regime: eps exceeds eps1_hat");

    CriticalPoint u0 = newton_refine(form, params, minimize_in_ball(form, params, cfg), cfg);

    VertexFunction ustar = descent_start(form, params);
    VertexFunction endpoint = find_endpoint(form, params, ustar, cfg);
    MountainPassResult mp = mountain_pass(form, params, endpoint, cfg);
    CriticalPoint uc = newton_refine(form, params, mp.point, cfg);

    out.u0 = std::move(u0);
    out.uc = std::move(uc);
    out.c_est = std::max(mp.c_est, out.uc.energy);
    out.mp_sweeps = mp.sweeps;
    out.mp_restarts = mp.restarts;
    out.distance_H = norm_H(form, out.uc.u - out.u0.u);
    out.energy_gap = out.uc.energy - out.u0.energy;
    return out;
}

}  // namespace gbh
