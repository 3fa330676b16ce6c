#pragma once

#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "gbh/harness.hpp"
#include "gbh/version.hpp"

namespace gbh {

/// Parse arguments and dispatch to the subcommands. Exit codes: 0 success,
/// 1 input error, 2 solver failure.
inline int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Dirichlet biharmonic two-solutions toolkit for weighted graphs"};
    app.set_version_flag("--version", std::string(version));
    app.require_subcommand(1);

    std::string graph_path;
    RunConfig cfg;

    CLI::App* check = app.add_subcommand("check", "validate a graph file and print diagnostics");
    check->add_option("graph", graph_path, "graph JSON file")->required();

    auto add_problem_options = [&](CLI::App* sub) {
        sub->add_option("--graph", cfg.graph_path, "graph JSON file")->required();
        sub->add_option("--lambda", cfg.lambda_spec,
                        "spectral parameter: absolute value or fraction like 0.5*lambda1")
            ->required();
        sub->add_option("--p", cfg.p, "superlinear exponent (> 2)")->required();
        sub->add_option("--f", cfg.f_spec, "forcing: const:c, vertex:id:c, or file:path")
            ->required();
        sub->add_option("--seed", cfg.solver.seed, "seed for randomized starts");
    };

    CLI::App* constants = app.add_subcommand("constants", "compute the problem constants");
    add_problem_options(constants);
    constants->add_option("--out", cfg.out_path, "also write the JSON report here");

    CLI::App* solve = app.add_subcommand("solve", "compute and certify the two solutions");
    add_problem_options(solve);
    solve->add_option("--eps", cfg.eps, "forcing amplitude (>= 0)")->required();
    solve->add_option("--out", cfg.out_path, "report JSON path (stdout if omitted)");
    solve->add_option("--tol", cfg.solver.tol, "residual tolerance");
    solve->add_option("--max-iter", cfg.solver.max_iter, "iteration cap");
    solve->add_option("--path-nodes", cfg.solver.path_nodes, "mountain-pass path nodes");

    CLI::App* sweep = app.add_subcommand("sweep", "solve across an eps grid");
    add_problem_options(sweep);
    sweep->add_option("--eps-grid", cfg.eps_grid, "grid spec min:max:count:log|lin")->required();
    sweep->add_option("--out-csv", cfg.out_csv, "per-row CSV path")->required();
    sweep->add_option("--out-json", cfg.out_json, "summary JSON path")->required();
    sweep->add_option("--tol", cfg.solver.tol, "residual tolerance");
    sweep->add_option("--max-iter", cfg.solver.max_iter, "iteration cap");
    sweep->add_option("--path-nodes", cfg.solver.path_nodes, "mountain-pass path nodes");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (check->parsed())
            return cmd_check(graph_path);
        if (constants->parsed())
            return cmd_constants(cfg);
        if (solve->parsed())
            return cmd_solve(cfg);
        if (sweep->parsed())
            return cmd_sweep(cfg);
    } catch (const solver_error& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return 2;
    } catch (const parse_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const validation_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return 2;
    }
    return 1;
}

}  // namespace gbh
