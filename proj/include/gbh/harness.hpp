#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "gbh/graph.hpp"
#include "gbh/graph_io.hpp"
#include "gbh/report.hpp"
#include "gbh/solvers.hpp"

namespace gbh {

/// Everything one CLI invocation needs. lambda_spec is either an absolute
/// value ("0.35") or a fraction of the computed lambda1 ("0.5*lambda1");
/// f_spec is "const:c", "vertex:id:c", or "file:path" (JSON id->value map).
struct RunConfig {
    std::string graph_path;
    std::string lambda_spec;
    double p = 4.0;
    double eps = 0.0;
    std::string eps_grid;  // "min:max:count:log|lin" (sweep only)
    std::string f_spec;
    std::string out_path;
    std::string out_csv;
    std::string out_json;
    SolverConfig solver;
};

inline double resolve_lambda(const std::string& spec, double lambda1_value) {
    const std::string suffix = "*lambda1";
    std::string head = spec;
    bool relative = false;
    if (spec.size() > suffix.size() &&
        spec.compare(spec.size() - suffix.size(), suffix.size(), suffix) == 0) {
        head = spec.substr(0, spec.size() - suffix.size());
        relative = true;
    }
    std::size_t pos = 0;
    double value = 0.0;
    try {
        value = std::stod(head, &pos);
    } catch (const std::exception&) {
        throw parse_error("malformed lambda spec: " + spec);
    }
    if (pos != head.size())
        throw parse_error("malformed lambda spec: " + spec);
    return relative ? value * lambda1_value : value;
}

inline VertexFunction resolve_f(const std::string& spec, const WeightedGraph& g, const Domain& d) {
    const int n = d.interior_size();
    auto split = [](const std::string& s) {
        std::vector<std::string> parts;
        std::size_t start = 0;
        while (true) {
            std::size_t colon = s.find(':', start);
            if (colon == std::string::npos) {
                parts.push_back(s.substr(start));
                break;
            }
            parts.push_back(s.substr(start, colon - start));
            start = colon + 1;
        }
        return parts;
    };
    auto to_num = [&](const std::string& s) {
        std::size_t pos = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &pos);
        } catch (const std::exception&) {
            throw parse_error("malformed forcing spec: " + spec);
        }
        if (pos != s.size())
            throw parse_error("malformed forcing spec: " + spec);
        return v;
    };

    std::vector<std::string> parts = split(spec);
    if (parts.size() == 2 && parts[0] == "const")
        return VertexFunction::Constant(n, to_num(parts[1]));
    if (parts.size() == 3 && parts[0] == "vertex") {
        int gidx = g.index_of(parts[1]);
        int k = d.interior_index_of(gidx);
        if (k < 0)
            throw validation_error("forcing vertex is not interior: " + parts[1]);
        VertexFunction f = VertexFunction::Zero(n);
        f[k] = to_num(parts[2]);
        return f;
    }
    if (parts.size() == 2 && parts[0] == "file") {
        std::ifstream in(parts[1]);
        if (!in)
            throw parse_error("cannot open forcing file: " + parts[1]);
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(in);
        } catch (const nlohmann::json::exception& e) {
            throw parse_error("malformed forcing file: " + std::string(e.what()));
        }
        if (!j.is_object())
            throw parse_error("forcing file must be a JSON object of id -> value");
        VertexFunction f = VertexFunction::Zero(n);
        for (const auto& [id, val] : j.items()) {
            if (!val.is_number())
                throw parse_error("forcing value for vertex " + id + " must be a number");
            int k = d.interior_index_of(g.index_of(id));
            if (k < 0)
                throw validation_error("forcing vertex is not interior: " + id);
            f[k] = val.get<double>();
        }
        return f;
    }
    throw parse_error("malformed forcing spec: " + spec +
                      " (expected const:c, vertex:id:c, or file:path)");
}

inline std::vector<double> parse_eps_grid(const std::string& spec) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        std::size_t colon = spec.find(':', start);
        if (colon == std::string::npos) {
            parts.push_back(spec.substr(start));
            break;
        }
        parts.push_back(spec.substr(start, colon - start));
        start = colon + 1;
    }
    if (parts.size() != 4)
        throw parse_error("malformed eps grid: " + spec + " (expected min:max:count:log|lin)");
    auto to_num = [&](const std::string& s) {
        std::size_t pos = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &pos);
        } catch (const std::exception&) {
            throw parse_error("malformed eps grid: " + spec);
        }
        if (pos != s.size())
            throw parse_error("malformed eps grid: " + spec);
        return v;
    };
    double lo = to_num(parts[0]);
    double hi = to_num(parts[1]);
    long count = 0;
    try {
        std::size_t pos = 0;
        count = std::stol(parts[2], &pos);
        if (pos != parts[2].size())
            throw parse_error("");
    } catch (const std::exception&) {
        throw parse_error("malformed eps grid count: " + spec);
    }
    bool log_spacing = parts[3] == "log";
    if (!log_spacing && parts[3] != "lin")
        throw parse_error("eps grid spacing must be log or lin: " + spec);
    if (count < 1)
        throw parse_error("eps grid count must be at least 1");
    if (!(lo > 0.0) && log_spacing)
        throw parse_error("log eps grid requires positive min");
    if (!(lo <= hi))
        throw parse_error("eps grid requires min <= max");

    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(count));
    if (count == 1) {
        grid.push_back(lo);
        return grid;
    }
    for (long i = 0; i < count; ++i) {
        double t = static_cast<double>(i) / static_cast<double>(count - 1);
        grid.push_back(log_spacing ? std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo)))
                                   : lo + t * (hi - lo));
    }
    grid.back() = hi;  // pin the endpoint against rounding
    return grid;
}

namespace detail {

struct LoadedProblem {
    WeightedGraph graph;
    Domain domain;
    BiharmonicForm form;
};

inline LoadedProblem load_problem(const std::string& path) {
    GraphFile gf = load_graph_file(path);
    if (gf.interior.empty())
        throw validation_error("empty interior: graph file declares none");
    Domain d = boundary_of(gf.graph, gf.interior);
    BiharmonicForm form = assemble_form(gf.graph, d);
    return LoadedProblem{std::move(gf.graph), std::move(d), std::move(form)};
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out)
        throw parse_error("cannot open output file: " + path);
    out << text;
    if (!out)
        throw parse_error("failed writing output file: " + path);
}

inline std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace detail

/// `check`: validate a graph file and its domain; print diagnostics.
inline int cmd_check(const std::string& graph_path, std::ostream& os = std::cout) {
    detail::LoadedProblem prob = detail::load_problem(graph_path);
    os << "vertices: " << prob.graph.num_vertices() << "\n";
    os << "edges: " << prob.graph.num_edges() << "\n";
    os << "interior: " << prob.domain.interior_size() << "\n";
    os << "boundary: " << prob.domain.boundary_size() << "\n";
    os << "effective: " << prob.domain.effective_size() << "\n";
    os << "connected: yes\n";
    os << "mu range: [" << detail::format_g17(prob.graph.min_mu()) << ", "
       << detail::format_g17(prob.graph.max_mu()) << "]\n";
    auto [wmin, wmax] = prob.graph.weight_range();
    os << "weight range: [" << detail::format_g17(wmin) << ", " << detail::format_g17(wmax)
       << "]\n";
    os << "form: positive definite\n";
    return 0;
}

/// `constants`: resolve lambda and f, emit the constants report as JSON.
/// lambda outside (0, lambda1) still reports lambda1/tau/C/||f|| but warns
/// and exits nonzero (the existence hypotheses are violated).
inline int cmd_constants(const RunConfig& cfg, std::ostream& os = std::cout) {
    detail::LoadedProblem prob = detail::load_problem(cfg.graph_path);
    if (!(cfg.p > 2.0))
        throw std::invalid_argument("p must exceed 2");
    double l1 = lambda1(prob.form);
    double lambda = resolve_lambda(cfg.lambda_spec, l1);
    VertexFunction f = resolve_f(cfg.f_spec, prob.graph, prob.domain);

    json rep;
    rep["schema_version"] = report_schema_version;
    int exit_code = 0;
    if (lambda > 0.0 && lambda < l1) {
        ConstantsReport constants =
            compute_constants(prob.form, lambda, cfg.p, f, cfg.solver.seed);
        rep["constants"] = constants_block(constants);
    } else {
        Interval C = embedding_constant(prob.form, cfg.p, cfg.solver.seed);
        json block;
        block["lambda1"] = l1;
        block["lambda"] = lambda;
        block["tau"] = (l1 - lambda) / l1;
        block["p"] = cfg.p;
        block["C_lower"] = C.lower;
        block["C_upper"] = C.upper;
        block["f_dual_norm"] = dual_norm(prob.form, f);
        block["eps1_hat"] = nullptr;
        rep["constants"] = block;
        rep["warning"] = "lambda outside (0, lambda1): existence hypotheses violated";
        exit_code = 1;
    }
    rep["provenance"] = {{"seed", cfg.solver.seed}, {"version", version}};

    std::string text = rep.dump(2) + "\n";
    os << text;
    if (!cfg.out_path.empty())
        detail::write_text(cfg.out_path, text);
    return exit_code;
}

/// `solve`: run the full two-solutions pipeline, write the report, return 0
/// when both points certify as weak solutions (out-of-regime runs included),
/// 2 otherwise.
inline int cmd_solve(const RunConfig& cfg, std::ostream& os = std::cout) {
    detail::LoadedProblem prob = detail::load_problem(cfg.graph_path);
    double l1 = lambda1(prob.form);
    double lambda = resolve_lambda(cfg.lambda_spec, l1);
    if (!(lambda > 0.0 && lambda < l1))
        throw std::invalid_argument("lambda must lie in (0, lambda1); resolved to " +
                                    detail::format_g17(lambda) + " with lambda1 = " +
                                    detail::format_g17(l1));
    VertexFunction f = resolve_f(cfg.f_spec, prob.graph, prob.domain);
    ProblemParams params = make_params(prob.form, lambda, cfg.p, cfg.eps, std::move(f));

    TwoSolutionsResult result = two_solutions(prob.form, params, cfg.solver);
    json rep = solution_report(prob.graph, prob.domain, prob.form, params, cfg.solver, result);
    std::string text = rep.dump(2) + "\n";
    if (!cfg.out_path.empty())
        detail::write_text(cfg.out_path, text);
    else
        os << text;

    bool u0_ok = rep["solutions"]["u0"]["certificate"]["weak_solution"].get<bool>();
    bool uc_ok = rep["solutions"]["uc"]["certificate"]["weak_solution"].get<bool>();
    os << "u0: energy " << detail::format_g17(result.u0.energy) << ", residual "
       << detail::format_g17(result.u0.residual) << (u0_ok ? " (weak solution)" : " (UNCERTIFIED)")
       << "\n";
    os << "uc: energy " << detail::format_g17(result.uc.energy) << ", residual "
       << detail::format_g17(result.uc.residual) << (uc_ok ? " (weak solution)" : " (UNCERTIFIED)")
       << "\n";
    os << "certified_two_distinct: " << (rep["certified_two_distinct"].get<bool>() ? "true" : "false")
       << "\n";
    return (u0_ok && uc_ok) ? 0 : 2;
}

/// `sweep`: run the pipeline over an eps grid; one CSV row per grid point
/// (failures recorded in-row), plus a JSON summary with the empirical
/// certified-regime envelope.
inline int cmd_sweep(const RunConfig& cfg, std::ostream& os = std::cout) {
    detail::LoadedProblem prob = detail::load_problem(cfg.graph_path);
    double l1 = lambda1(prob.form);
    double lambda = resolve_lambda(cfg.lambda_spec, l1);
    if (!(lambda > 0.0 && lambda < l1))
        throw std::invalid_argument("lambda must lie in (0, lambda1)");
    VertexFunction f = resolve_f(cfg.f_spec, prob.graph, prob.domain);
    std::vector<double> grid = parse_eps_grid(cfg.eps_grid);

    ConstantsReport base_constants =
        compute_constants(prob.form, lambda, cfg.p, f, cfg.solver.seed);

    std::string csv = "eps,energy_u0,energy_uc,norm_H_u0,norm_H_uc,residual_u0,residual_uc,"
                      "certified,status\n";
    json rows = json::array();
    std::optional<double> largest_certified;

    for (std::size_t i = 0; i < grid.size(); ++i) {
        double eps = grid[i];
        SolverConfig row_cfg = cfg.solver;
        row_cfg.seed = cfg.solver.seed + i;
        json row;
        row["eps"] = eps;
        try {
            ProblemParams params = make_params(prob.form, lambda, cfg.p, eps, f);
            TwoSolutionsResult result = two_solutions(prob.form, params, row_cfg);
            TwoSolutionsCertificate cert = certify(prob.form, params, result, row_cfg.tol);
            bool certified = cert.certified_two_distinct();
            if (certified && (!largest_certified || eps > *largest_certified))
                largest_certified = eps;
            csv += detail::format_g17(eps) + "," + detail::format_g17(result.u0.energy) + "," +
                   detail::format_g17(result.uc.energy) + "," +
                   detail::format_g17(result.u0.norm_H) + "," +
                   detail::format_g17(result.uc.norm_H) + "," +
                   detail::format_g17(result.u0.residual) + "," +
                   detail::format_g17(result.uc.residual) + "," + (certified ? "1" : "0") +
                   ",ok\n";
            row["certified"] = certified;
            row["in_regime"] = cert.in_regime;
            row["energy_u0"] = result.u0.energy;
            row["energy_uc"] = result.uc.energy;
            row["norm_H_u0"] = result.u0.norm_H;
            row["norm_H_uc"] = result.uc.norm_H;
            row["residual_u0"] = result.u0.residual;
            row["residual_uc"] = result.uc.residual;
            row["status"] = "ok";
        } catch (const solver_error& e) {
            std::string status = e.what();
            for (char& ch : status)
                if (ch == ',' || ch == '\n')
                    ch = ';';
            csv += detail::format_g17(eps) + ",nan,nan,nan,nan,nan,nan,0," + status + "\n";
            row["certified"] = false;
            row["status"] = status;
        }
        rows.push_back(std::move(row));
    }

    json summary;
    summary["schema_version"] = report_schema_version;
    summary["constants"] = constants_block(base_constants);
    summary["rows"] = std::move(rows);
    if (largest_certified)
        summary["largest_certified_eps"] = *largest_certified;
    else
        summary["largest_certified_eps"] = nullptr;
    summary["provenance"] = {{"seed", cfg.solver.seed},
                             {"tol", cfg.solver.tol},
                             {"version", version}};

    detail::write_text(cfg.out_csv, csv);
    detail::write_text(cfg.out_json, summary.dump(2) + "\n");
    os << "rows: " << grid.size() << "\n";
    os << "eps1_hat: " << detail::format_g17(base_constants.eps1_hat) << "\n";
    os << "largest_certified_eps: "
       << (largest_certified ? detail::format_g17(*largest_certified) : std::string("none"))
       << "\n";
    return 0;
}

}  // namespace gbh
