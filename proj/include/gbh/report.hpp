#pragma once

#include <cmath>
#include <string>

#include <json.hpp>

#include "gbh/constants.hpp"
#include "gbh/functional.hpp"
#include "gbh/graph.hpp"
#include "gbh/operators.hpp"
#include "gbh/solvers.hpp"
#include "gbh/version.hpp"

namespace gbh {

using json = nlohmann::ordered_json;

/// Solution-quality certificate: is u a weak solution, verified from the raw
/// vector (never from solver-reported numbers)?
struct SolutionCertificate {
    bool residual_ok = false;  // H'-residual <= tol
    bool identity_ok = false;  // Euler identity gap <= tol (1 + |J|)
    bool apriori_ok = false;   // tau ||u||^2 <= 2pJ/(p-2) + (2p-2)eps/(p-2) ||f|| ||u|| + slack

    bool weak_solution() const { return residual_ok && identity_ok && apriori_ok; }
};

inline SolutionCertificate certify_solution(const BiharmonicForm& form,
                                            const ProblemParams& params,
                                            const ConstantsReport& constants,
                                            const VertexFunction& u, double tol) {
    SolutionCertificate cert;
    double J = energy(form, params, u);
    double nh = norm_H(form, u);
    cert.residual_ok = residual_norm(form, params, u) <= tol;
    cert.identity_ok =
        critical_point_identity_gap(form, params, u) <= tol * (1.0 + std::abs(J));
    double lhs = constants.tau * nh * nh;
    double rhs = 2.0 * params.p * J / (params.p - 2.0) +
                 (2.0 * params.p - 2.0) * params.eps / (params.p - 2.0) * constants.f_dual_norm * nh;
    cert.apriori_ok = lhs <= rhs + tol * (1.0 + nh * nh);
    return cert;
}

/// The theorem-level certificate: both points are weak solutions, the small
/// one sits strictly inside the r_eps ball with negative energy, the
/// mountain-pass one clears the delta_eps floor, and the two are separated.
/// All parts recomputed from the raw vectors; in_regime is reported alongside
/// but certification does not require it (the threshold is sufficient, not
/// necessary).
struct TwoSolutionsCertificate {
    SolutionCertificate u0;
    SolutionCertificate uc;
    bool u0_energy_negative = false;
    bool u0_inside_r_eps = false;
    bool uc_energy_above_floor = false;
    bool c_est_dominates = false;
    bool distance_ok = false;
    bool energy_gap_ok = false;
    bool in_regime = false;

    bool certified_two_distinct() const {
        return u0.weak_solution() && uc.weak_solution() && u0_energy_negative &&
               u0_inside_r_eps && uc_energy_above_floor && c_est_dominates && distance_ok &&
               energy_gap_ok;
    }
};

inline TwoSolutionsCertificate certify(const BiharmonicForm& form, const ProblemParams& params,
                                       const TwoSolutionsResult& result, double tol) {
    const ConstantsReport& c = result.constants;
    const double r_eps = c.r_eps(params.eps);
    const double delta_eps = c.delta_eps(params.eps);

    TwoSolutionsCertificate cert;
    cert.u0 = certify_solution(form, params, c, result.u0.u, tol);
    cert.uc = certify_solution(form, params, c, result.uc.u, tol);

    double J0 = energy(form, params, result.u0.u);
    double Jc = energy(form, params, result.uc.u);
    cert.u0_energy_negative = J0 < 0.0;
    cert.u0_inside_r_eps = norm_H(form, result.u0.u) < r_eps;
    cert.uc_energy_above_floor = Jc >= delta_eps;
    cert.c_est_dominates = result.c_est >= Jc - tol;
    cert.distance_ok = norm_H(form, result.uc.u - result.u0.u) >= r_eps - tol;
    cert.energy_gap_ok = Jc - J0 > delta_eps;
    cert.in_regime = c.in_regime(params.eps);
    return cert;
}

namespace detail {

inline json values_by_id(const WeightedGraph& g, const Domain& d, const VertexFunction& u) {
    json out = json::object();
    for (int k = 0; k < d.interior_size(); ++k)
        out[g.id_of(d.graph_of_effective(k))] = u[k];
    return out;
}

inline json point_block(const WeightedGraph& g, const Domain& d, const CriticalPoint& pt) {
    json out;
    out["kind"] = to_string(pt.kind);
    out["values"] = values_by_id(g, d, pt.u);
    out["energy"] = pt.energy;
    out["norm_H"] = pt.norm_H;
    out["residual"] = pt.residual;
    out["iterations"] = pt.iterations;
    out["flags"] = pt.flags;
    return out;
}

inline json certificate_block(const SolutionCertificate& cert) {
    json out;
    out["residual_le_tol"] = cert.residual_ok;
    out["identity_ok"] = cert.identity_ok;
    out["apriori_ok"] = cert.apriori_ok;
    out["weak_solution"] = cert.weak_solution();
    return out;
}

}  // namespace detail

inline json constants_block(const ConstantsReport& c) {
    json out;
    out["lambda1"] = c.lambda1;
    out["lambda"] = c.lambda;
    out["tau"] = c.tau;
    out["p"] = c.p;
    out["C_lower"] = c.C_q.lower;
    out["C_upper"] = c.C_q.upper;
    out["f_dual_norm"] = c.f_dual_norm;
    out["eps1_hat"] = c.eps1_hat;
    return out;
}

/// Full machine-readable report of one two_solutions run. Every certificate
/// bit is recomputed here from the raw vectors.
inline json solution_report(const WeightedGraph& g, const Domain& d, const BiharmonicForm& form,
                            const ProblemParams& params, const SolverConfig& cfg,
                            const TwoSolutionsResult& result) {
    TwoSolutionsCertificate cert = certify(form, params, result, cfg.tol);
    const ConstantsReport& c = result.constants;

    json rep;
    rep["schema_version"] = report_schema_version;
    rep["problem"] = {
        {"interior_size", d.interior_size()},
        {"boundary_size", d.boundary_size()},
        {"lambda", params.lambda},
        {"p", params.p},
        {"eps", params.eps},
        {"f", detail::values_by_id(g, d, params.f)},
    };
    rep["constants"] = constants_block(c);
    rep["constants"]["r_eps"] = c.r_eps(params.eps);
    rep["constants"]["delta_eps"] = c.delta_eps(params.eps);
    rep["constants"]["in_regime"] = cert.in_regime;

    rep["solutions"]["u0"] = detail::point_block(g, d, result.u0);
    rep["solutions"]["u0"]["certificate"] = detail::certificate_block(cert.u0);
    rep["solutions"]["u0"]["certificate"]["energy_negative"] = cert.u0_energy_negative;
    rep["solutions"]["u0"]["certificate"]["inside_r_eps"] = cert.u0_inside_r_eps;

    rep["solutions"]["uc"] = detail::point_block(g, d, result.uc);
    rep["solutions"]["uc"]["certificate"] = detail::certificate_block(cert.uc);
    rep["solutions"]["uc"]["certificate"]["energy_above_floor"] = cert.uc_energy_above_floor;
    rep["solutions"]["uc"]["certificate"]["c_est_dominates"] = cert.c_est_dominates;

    rep["distinctness"] = {
        {"energy_gap", result.energy_gap},
        {"distance_H", result.distance_H},
        {"distance_ge_r_eps", cert.distance_ok},
        {"gap_gt_delta_eps", cert.energy_gap_ok},
    };
    rep["minimax"] = {
        {"c_est", result.c_est},
        {"sweeps", result.mp_sweeps},
        {"restarts", result.mp_restarts},
    };
    rep["certified_two_distinct"] = cert.certified_two_distinct();
    rep["notes"] = result.notes;
    rep["provenance"] = {
        {"seed", cfg.seed},
        {"tol", cfg.tol},
        {"max_iter", cfg.max_iter},
        {"path_nodes", cfg.path_nodes},
        {"version", version},
    };
    return rep;
}

}  // namespace gbh
