// Acceptance gate: one pass/fail line per criterion, exit code = #failures.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "fixtures.hpp"
#include "gbh/report.hpp"
#include "gbh/solvers.hpp"
#include "oracles.hpp"

namespace {

void require(bool cond, const std::string& msg) {
    if (!cond)
        throw std::runtime_error(msg);
}

bool close_rel(double got, double want, double tol) {
    return std::abs(got - want) <= tol * std::max(1.0, std::abs(want));
}

gbh::VertexFunction random_u(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    gbh::VertexFunction u(n);
    for (int k = 0; k < n; ++k)
        u[k] = gauss(rng);
    return u;
}

constexpr double kSmallRoot = 0.002000001600003840;
constexpr double kPassRoot = 2.2350673058782206;

void criterion1() {
    auto p3 = fixtures::p3();
    gbh::VertexFunction u1 = gbh::VertexFunction::Constant(1, 1.0);
    require(close_rel(gbh::laplacian_at(p3.g, p3.d, u1, "b"), -2.0, 1e-14), "laplacian at b");
    require(close_rel(gbh::laplacian_at(p3.g, p3.d, u1, "a"), 1.0, 1e-14), "laplacian at a");
    require(close_rel(gbh::gradient_form_at(p3.g, p3.d, u1, u1, "b"), 1.0, 1e-14),
            "gradient form at b");
    require(close_rel(gbh::gradient_form_at(p3.g, p3.d, u1, u1, "a"), 0.5, 1e-14),
            "gradient form at a");
    require(close_rel(gbh::grad_norm_at(p3.g, p3.d, u1, "b"), 1.0, 1e-14), "gradient length at b");
    require(close_rel(gbh::grad_norm_at(p3.g, p3.d, u1, "a"), std::sqrt(0.5), 1e-14),
            "gradient length at a");

    auto star = fixtures::star3();
    require(close_rel(gbh::laplacian_at(star.g, star.d, u1, "c"), -3.0, 1e-14),
            "laplacian at star center");

    auto p5 = fixtures::p5();
    std::map<std::string, double> ones{{"b", 1.0}, {"c", 1.0}, {"d", 1.0}};
    require(gbh::integral(p5.g, ones) == 3.0, "integral of 1 over the interior");
    require(gbh::integral(p5.g, {}) == 0.0, "integral of 0");
    gbh::WeightedGraph heavy({{"a", 1.0}, {"b", 2.0}, {"c", 1.0}, {"d", 1.0}, {"e", 1.0}},
                             {{"a", "b", 1.0}, {"b", "c", 1.0}, {"c", "d", 1.0}, {"d", "e", 1.0}});
    require(gbh::integral(heavy, ones) == 4.0, "integral with mu(b) = 2");
}

void criterion2() {
    std::mt19937_64 rng(1009);
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        auto inst = fixtures::random_instance(seed);
        const Eigen::MatrixXd& B = inst.form.B();
        double scale = std::max(1.0, B.cwiseAbs().maxCoeff());
        require((B - B.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale,
                "symmetry on seed " + std::to_string(seed));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B, Eigen::EigenvaluesOnly);
        require(es.eigenvalues()[0] > 0.0, "positive definiteness on seed " + std::to_string(seed));
        for (int rep = 0; rep < 2; ++rep) {
            gbh::VertexFunction u = random_u(inst.d.interior_size(), rng);
            double quad = inst.form.quadratic(u);
            double summed = 0.0;
            for (int k = 0; k < inst.d.effective_size(); ++k) {
                int gx = inst.d.graph_of_effective(k);
                double lap = gbh::laplacian_at(inst.g, inst.d, u, inst.g.id_of(gx));
                summed += inst.g.mu(gx) * lap * lap;
            }
            require(close_rel(quad, summed, 1e-12),
                    "quadratic identity on seed " + std::to_string(seed));
        }
    }
}

void criterion3() {
    require(close_rel(gbh::lambda1(fixtures::p3().form), 6.0, 1e-12), "lambda1 on the 3-path");
    require(close_rel(gbh::lambda1(fixtures::star3().form), 12.0, 1e-12), "lambda1 on the star");
    std::mt19937_64 rng(1013);
    for (std::uint64_t seed = 101; seed <= 105; ++seed) {
        auto inst = fixtures::random_instance(seed);
        double l1 = gbh::lambda1(inst.form);
        for (int rep = 0; rep < 2000; ++rep) {
            gbh::VertexFunction u = random_u(inst.d.interior_size(), rng);
            double mass = (inst.form.M_int().array() * u.array().square()).sum();
            require(inst.form.quadratic(u) / mass >= l1 * (1.0 - 1e-9),
                    "Rayleigh bound on seed " + std::to_string(seed));
        }
    }
}

void criterion4() {
    std::mt19937_64 rng(1019);
    std::vector<fixtures::Instance> instances;
    instances.push_back(fixtures::p3());
    instances.push_back(fixtures::p5());
    instances.push_back(fixtures::star3());
    instances.push_back(fixtures::random_instance(111, 12));
    instances.push_back(fixtures::random_instance(113, 20));
    for (const auto& inst : instances) {
        const int n = inst.d.interior_size();
        auto params = gbh::make_params(inst.form, 0.5 * gbh::lambda1(inst.form), 4.0, 0.05,
                                       gbh::VertexFunction::Constant(n, 1.0));
        for (int rep = 0; rep < 20; ++rep) {
            gbh::VertexFunction u = random_u(n, rng);
            gbh::VertexFunction h = random_u(n, rng);
            double exact = gbh::gradient(inst.form, params, u).dot(h);
            auto err = [&](double delta) {
                double fd = oracles::fd_directional(inst.form, params, u, h, delta);
                return std::abs(fd - exact) / std::max(1.0, std::abs(exact));
            };
            require(err(1e-5) <= 1e-6, "finite-difference agreement");
            double coarse = err(1e-2);
            if (coarse > 1e-8)
                require(err(1e-3) < coarse, "error shrinks under step refinement");
        }
    }
}

void criterion5() {
    require(close_rel(gbh::dual_norm(fixtures::p3().form, gbh::VertexFunction::Constant(1, 1.0)),
                      1.0 / std::sqrt(6.0), 1e-12),
            "dual norm of the unit forcing");

    std::mt19937_64 rng(1021);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<fixtures::Instance> instances;
    instances.push_back(fixtures::p3());
    instances.push_back(fixtures::p5());
    instances.push_back(fixtures::star3());
    instances.push_back(fixtures::random_instance(121, 10));
    instances.push_back(fixtures::random_instance(123, 10));
    for (const auto& inst : instances) {
        double l1 = gbh::lambda1(inst.form);
        gbh::Interval c2 = gbh::embedding_constant(inst.form, 2.0);
        require(close_rel(c2.lower, 1.0 / std::sqrt(l1), 1e-8), "quadratic embedding lower bound");
        require(close_rel(c2.upper, 1.0 / std::sqrt(l1), 1e-8), "quadratic embedding upper bound");

        auto rep = gbh::compute_constants(inst.form, 0.5 * l1, 4.0,
                                          gbh::VertexFunction::Constant(inst.d.interior_size(), 1.0));
        require(rep.eps1_hat > 0.0, "positive threshold");
        auto g = [&](double eps) {
            return rep.tau / 2.0 * std::sqrt(eps) -
                   std::pow(2.0, rep.p - 2.0) * rep.C_q.upper * std::pow(eps, (rep.p - 1.0) / 2.0) -
                   eps * rep.f_dual_norm - rep.tau / 4.0 * std::sqrt(eps);
        };
        for (int k = 0; k < 100; ++k) {
            double eps = rep.eps1_hat * unif(rng);
            if (eps > 0.0)
                require(g(eps) >= -1e-12, "coercivity margin below the threshold");
        }
    }
}

void criterion6() {
    auto p3 = fixtures::p3();
    auto params = gbh::make_params(p3.form, 1.0, 4.0, 0.01, gbh::VertexFunction::Constant(1, 1.0));
    gbh::SolverConfig cfg;
    gbh::TwoSolutionsResult res = gbh::two_solutions(p3.form, params, cfg);

    auto roots = oracles::scalar_critical_points(6.0, 1.0, 1.0, 4.0, 0.01);
    require(roots.size() == 3, "three scalar critical points");
    require(std::abs(roots[1] - kSmallRoot) <= 1e-12, "frozen small root matches the oracle");
    require(std::abs(roots[2] - kPassRoot) <= 1e-12 * kPassRoot,
            "frozen pass root matches the oracle");
    require(std::abs(res.u0.u[0] - roots[1]) <= 1e-6, "small solution matches the oracle root");
    require(std::abs(res.uc.u[0] - roots[2]) <= 1e-6, "pass solution matches the oracle root");

    gbh::TwoSolutionsCertificate cert = gbh::certify(p3.form, params, res, cfg.tol);
    require(cert.certified_two_distinct(), "both solutions certified distinct");
    require(res.u0.energy < 0.0, "small solution has negative energy");
    double delta_eps = res.constants.delta_eps(params.eps);
    require(res.uc.energy >= delta_eps, "pass solution clears the annulus floor");
    require(res.u0.norm_H < std::sqrt(params.eps), "small solution inside the ball");
}

void criterion7() {
    std::mt19937_64 rng(1031);
    std::uniform_real_distribution<double> fval(0.5, 1.5);
    gbh::SolverConfig cfg;
    for (std::uint64_t seed = 201; seed <= 210; ++seed) {
        auto inst = fixtures::random_instance(seed, 6, 3, 0.5, 1.5);
        const int n = inst.d.interior_size();
        gbh::VertexFunction f(n);
        for (int k = 0; k < n; ++k)
            f[k] = fval(rng);
        double lambda = 0.4 * gbh::lambda1(inst.form);
        auto consts = gbh::compute_constants(inst.form, lambda, 4.0, f);
        auto params = gbh::make_params(inst.form, lambda, 4.0, 0.8 * consts.eps1_hat, f);

        gbh::TwoSolutionsResult res = gbh::two_solutions(inst.form, params, cfg);
        gbh::TwoSolutionsCertificate cert = gbh::certify(inst.form, params, res, cfg.tol);
        std::string tag = " on seed " + std::to_string(seed);
        require(cert.u0.identity_ok && cert.uc.identity_ok, "Euler identity holds" + tag);
        require(cert.u0.apriori_ok && cert.uc.apriori_ok, "a priori bound holds" + tag);

        auto roots = oracles::grid_newton_roots(inst.form, params, 50);
        require(!roots.empty(), "grid oracle found critical points" + tag);
        require(oracles::distance_to_nearest(inst.form, roots, res.u0.u) <= 1e-6,
                "small solution matches a grid root" + tag);
        require(oracles::distance_to_nearest(inst.form, roots, res.uc.u) <= 1e-6,
                "pass solution matches a grid root" + tag);
    }
}

void criterion8() {
    auto p5 = fixtures::p5();
    double lambda = 0.5 * gbh::lambda1(p5.form);
    auto consts = gbh::compute_constants(p5.form, lambda, 4.0, gbh::VertexFunction::Constant(3, 1.0));
    char hi[64];
    std::snprintf(hi, sizeof(hi), "%.17g", consts.eps1_hat);

    std::string path = fixtures::write_temp_file("acc_p5.json", fixtures::p5_json());
    std::string csv = fixtures::write_temp_file("acc_sweep.csv", "");
    std::string js = fixtures::write_temp_file("acc_sweep.json", "");
    auto res = fixtures::run_cli("sweep --graph " + path +
                                 " --lambda 0.5*lambda1 --p 4 --f const:1 --eps-grid 1e-6:" +
                                 std::string(hi) + ":20:log --out-csv " + csv + " --out-json " + js);
    require(res.exit_code == 0, "sweep exits cleanly");

    std::string text = fixtures::read_file(csv);
    std::size_t rows = 0, certified = 0, pos = 0;
    while ((pos = text.find('\n', pos)) != std::string::npos) {
        ++pos;
        if (pos >= text.size())
            break;
        ++rows;
        std::size_t next = text.find('\n', pos);
        std::string line = text.substr(pos, next == std::string::npos ? next : next - pos);
        if (line.find(",1,ok") != std::string::npos)
            ++certified;
    }
    require(rows == 20, "20 grid rows, got " + std::to_string(rows));
    require(certified == 20, "all rows certified, got " + std::to_string(certified));

    nlohmann::ordered_json summary = nlohmann::ordered_json::parse(fixtures::read_file(js));
    double reported = summary["constants"]["eps1_hat"].get<double>();
    require(close_rel(reported, consts.eps1_hat, 1e-12), "reported threshold matches in-process");

    // one point above the threshold must run to completion, certified or not
    char above[64];
    std::snprintf(above, sizeof(above), "%.17g", 1.5 * consts.eps1_hat);
    std::string csv2 = fixtures::write_temp_file("acc_above.csv", "");
    std::string js2 = fixtures::write_temp_file("acc_above.json", "");
    auto res2 = fixtures::run_cli("sweep --graph " + path + " --lambda 0.5*lambda1 --p 4" +
                                  " --f const:1 --eps-grid " + std::string(above) + ":" +
                                  std::string(above) + ":1:lin --out-csv " + csv2 +
                                  " --out-json " + js2);
    require(res2.exit_code == 0, "above-threshold sweep still completes");
}

void criterion9() {
    std::string path = fixtures::write_temp_file("acc_det_p5.json", fixtures::p5_json());
    std::string out1 = fixtures::write_temp_file("acc_det1.json", "");
    std::string out2 = fixtures::write_temp_file("acc_det2.json", "");
    std::string solve_args = "solve --graph " + path +
                             " --lambda 0.4*lambda1 --p 4 --eps 0.001 --f const:1 --seed 5 --out ";
    require(fixtures::run_cli(solve_args + out1).exit_code == 0, "first solve runs");
    require(fixtures::run_cli(solve_args + out2).exit_code == 0, "second solve runs");
    std::string rep = fixtures::read_file(out1);
    require(!rep.empty() && rep == fixtures::read_file(out2), "solve reports byte identical");

    std::string csv1 = fixtures::write_temp_file("acc_det1.csv", "");
    std::string js1 = fixtures::write_temp_file("acc_detj1.json", "");
    std::string csv2 = fixtures::write_temp_file("acc_det2.csv", "");
    std::string js2 = fixtures::write_temp_file("acc_detj2.json", "");
    std::string sweep_args = "sweep --graph " + path +
                             " --lambda 0.4*lambda1 --p 4 --f const:1 --seed 9"
                             " --eps-grid 1e-4:1e-3:3:log";
    require(fixtures::run_cli(sweep_args + " --out-csv " + csv1 + " --out-json " + js1).exit_code ==
                0,
            "first sweep runs");
    require(fixtures::run_cli(sweep_args + " --out-csv " + csv2 + " --out-json " + js2).exit_code ==
                0,
            "second sweep runs");
    require(fixtures::read_file(csv1) == fixtures::read_file(csv2), "sweep CSVs byte identical");
    require(fixtures::read_file(js1) == fixtures::read_file(js2), "sweep JSONs byte identical");
}

}  // namespace

int main() {
    struct Entry {
        int number;
        const char* description;
        double budget_s;  // 0 = no cap
        std::function<void()> body;
    };
    const std::vector<Entry> entries = {
        {1, "operator hand values on the canonical graphs", 1.0, criterion1},
        {2, "form symmetry, positivity, quadratic identity on random graphs", 0.0, criterion2},
        {3, "ground eigenvalue hand values and Rayleigh lower bound", 0.0, criterion3},
        {4, "gradient agrees with central finite differences", 0.0, criterion4},
        {5, "embedding, dual norm, and threshold sign checks", 0.0, criterion5},
        {6, "two certified solutions match the scalar root oracle", 5.0, criterion6},
        {7, "solutions match the grid Newton oracle on random instances", 0.0, criterion7},
        {8, "sweep certifies every grid point below the threshold", 60.0, criterion8},
        {9, "byte-identical reports for identical seeds", 0.0, criterion9},
    };

    int failures = 0;
    for (const auto& entry : entries) {
        auto start = std::chrono::steady_clock::now();
        std::string failure;
        try {
            entry.body();
        } catch (const std::exception& e) {
            failure = e.what();
        }
        double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (failure.empty() && entry.budget_s > 0.0 && elapsed > entry.budget_s)
            failure = "exceeded " + std::to_string(entry.budget_s) + " s budget";
        if (failure.empty()) {
            std::printf("criterion %d: PASS - %s (%.2f s)\n", entry.number, entry.description,
                        elapsed);
        } else {
            std::printf("criterion %d: FAIL - %s (%.2f s): %s\n", entry.number, entry.description,
                        elapsed, failure.c_str());
            ++failures;
        }
    }
    return failures;
}
