#pragma once

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "gbh/graph.hpp"

namespace gbh {

/// A function on the interior vertices of a Domain, indexed 0..n-1 in the
/// domain's interior order. By convention it is extended by zero to the
/// boundary and to every vertex outside Omega union dOmega; all operators
/// below evaluate that zero extension.
using VertexFunction = Eigen::VectorXd;

namespace detail {

inline double extended_value(const Domain& d, const VertexFunction& u, int gidx) {
    int k = d.interior_index_of(gidx);
    return k >= 0 ? u[k] : 0.0;
}

inline int require_effective(const WeightedGraph& g, const Domain& d, const std::string& x) {
    int gx = g.index_of(x);
    if (!d.in_effective(gx))
        throw validation_error("vertex outside Omega union dOmega: " + x);
    return gx;
}

inline void require_interior_sized(const Domain& d, const VertexFunction& u) {
    if (u.size() != d.interior_size())
        throw std::invalid_argument("dimension mismatch: expected " +
                                    std::to_string(d.interior_size()) + " interior values, got " +
                                    std::to_string(u.size()));
}

}  // namespace detail

/// mu-Laplacian of the zero extension of u at x:
///   (1/mu(x)) sum_{y~x} w_xy (u(y) - u(x)).
inline double laplacian_at(const WeightedGraph& g, const Domain& d, const VertexFunction& u,
                           const std::string& x) {
    detail::require_interior_sized(d, u);
    int gx = detail::require_effective(g, d, x);
    double ux = detail::extended_value(d, u, gx);
    double acc = 0.0;
    for (const auto& [gy, w] : g.neighbors(gx))
        acc += w * (detail::extended_value(d, u, gy) - ux);
    return acc / g.mu(gx);
}

/// Gradient form (carre du champ) of the zero extensions at x:
///   (1/(2 mu(x))) sum_{y~x} w_xy (u(y)-u(x))(v(y)-v(x)).
inline double gradient_form_at(const WeightedGraph& g, const Domain& d, const VertexFunction& u,
                               const VertexFunction& v, const std::string& x) {
    detail::require_interior_sized(d, u);
    detail::require_interior_sized(d, v);
    int gx = detail::require_effective(g, d, x);
    double ux = detail::extended_value(d, u, gx);
    double vx = detail::extended_value(d, v, gx);
    double acc = 0.0;
    for (const auto& [gy, w] : g.neighbors(gx))
        acc += w * (detail::extended_value(d, u, gy) - ux) * (detail::extended_value(d, v, gy) - vx);
    return acc / (2.0 * g.mu(gx));
}

/// Length of the gradient at x: sqrt(Gamma(u,u)(x)).
inline double grad_norm_at(const WeightedGraph& g, const Domain& d, const VertexFunction& u,
                           const std::string& x) {
    return std::sqrt(gradient_form_at(g, d, u, u, x));
}

/// sign(x) |x|^e, continuously extended by 0 at x = 0 (covers e < 1).
inline double signed_pow(double x, double e) {
    if (x == 0.0)
        return 0.0;
    return std::copysign(std::pow(std::abs(x), e), x);
}

/// Integral of a function given by per-vertex values over the region formed
/// by the map's keys: sum mu(x) value(x).
inline double integral(const WeightedGraph& g, const std::map<std::string, double>& values) {
    double acc = 0.0;
    for (const auto& [id, val] : values)
        acc += g.mu(g.index_of(id)) * val;
    return acc;
}

/// Integral over the interior of interior-indexed values.
inline double integral_interior(const WeightedGraph& g, const Domain& d, const VertexFunction& u) {
    detail::require_interior_sized(d, u);
    double acc = 0.0;
    for (int k = 0; k < d.interior_size(); ++k)
        acc += g.mu(d.graph_of_effective(k)) * u[k];
    return acc;
}

/// Assembled quadratic structure of the Dirichlet biharmonic problem.
///
/// L maps interior values to Laplacian values of the zero extension on all of
/// Omega union dOmega; M_int / M_eff are the measure weights on the interior
/// and on the effective set; B = L^T M_eff L is the symmetric positive
/// definite form with u^T B u = integral of |Laplacian u|^2 over
/// Omega union dOmega. Immutable after assembly.
class BiharmonicForm {
public:
    BiharmonicForm(Eigen::SparseMatrix<double> L, Eigen::VectorXd M_int, Eigen::VectorXd M_eff)
        : L_(std::move(L)), M_int_(std::move(M_int)), M_eff_(std::move(M_eff)) {
        // B = (sqrt(M_eff) L)^T (sqrt(M_eff) L) via a symmetric rank update,
        // which fills one triangle and mirrors it: B is bit-exact symmetric.
        Eigen::MatrixXd S = Eigen::MatrixXd(L_);
        for (int r = 0; r < S.rows(); ++r)
            S.row(r) *= std::sqrt(M_eff_[r]);
        B_ = Eigen::MatrixXd::Zero(L_.cols(), L_.cols());
        B_.selfadjointView<Eigen::Lower>().rankUpdate(S.transpose());
        B_ = B_.selfadjointView<Eigen::Lower>();
        llt_.compute(B_);
        if (llt_.info() != Eigen::Success)
            throw validation_error("biharmonic form is not positive definite");
    }

    int interior_size() const { return static_cast<int>(B_.rows()); }
    int effective_size() const { return static_cast<int>(L_.rows()); }

    const Eigen::SparseMatrix<double>& L() const { return L_; }
    const Eigen::VectorXd& M_int() const { return M_int_; }
    const Eigen::VectorXd& M_eff() const { return M_eff_; }
    const Eigen::MatrixXd& B() const { return B_; }

    /// Laplacian of the zero extension on Omega union dOmega (length m).
    Eigen::VectorXd laplacian_extended(const VertexFunction& u) const {
        check_dim(u);
        return L_ * u;
    }

    /// u^T B v.
    double bilinear(const VertexFunction& u, const VertexFunction& v) const {
        check_dim(u);
        check_dim(v);
        return u.dot(B_ * v);
    }

    double quadratic(const VertexFunction& u) const { return bilinear(u, u); }

    /// Solve B x = rhs (B is SPD; Cholesky).
    Eigen::VectorXd solve_B(const Eigen::VectorXd& rhs) const {
        check_dim(rhs);
        return llt_.solve(rhs);
    }

    void check_dim(const Eigen::VectorXd& u) const {
        if (u.size() != B_.rows())
            throw std::invalid_argument("dimension mismatch: expected " +
                                        std::to_string(B_.rows()) + " interior values, got " +
                                        std::to_string(u.size()));
    }

private:
    Eigen::SparseMatrix<double> L_;
    Eigen::VectorXd M_int_;
    Eigen::VectorXd M_eff_;
    Eigen::MatrixXd B_;
    Eigen::LLT<Eigen::MatrixXd> llt_;
};

/// Assemble L, M_int, M_eff and B for a domain.
///
/// Row x of L realizes the zero-extension convention: for interior x the
/// diagonal term sums w_xy over all neighbors (interior neighbors contribute
/// off-diagonal entries, boundary neighbors only the diagonal); for boundary
/// x only interior neighbors contribute, since u vanishes on dOmega and
/// beyond. Edges between boundary vertices or leaving the effective set are
/// inert.
inline BiharmonicForm assemble_form(const WeightedGraph& g, const Domain& d) {
    const int n = d.interior_size();
    const int m = d.effective_size();

    Eigen::VectorXd M_int(n), M_eff(m);
    for (int k = 0; k < n; ++k)
        M_int[k] = g.mu(d.graph_of_effective(k));
    for (int k = 0; k < m; ++k)
        M_eff[k] = g.mu(d.graph_of_effective(k));

    std::vector<Eigen::Triplet<double>> trips;
    for (int k = 0; k < m; ++k) {
        int gx = d.graph_of_effective(k);
        double inv_mu = 1.0 / g.mu(gx);
        for (const auto& [gy, w] : g.neighbors(gx)) {
            int j = d.interior_index_of(gy);
            if (j >= 0)
                trips.emplace_back(k, j, w * inv_mu);
            if (k < n)
                trips.emplace_back(k, k, -w * inv_mu);
        }
    }
    Eigen::SparseMatrix<double> L(m, n);
    L.setFromTriplets(trips.begin(), trips.end());

    return BiharmonicForm(std::move(L), std::move(M_int), std::move(M_eff));
}

/// ||u||_H = sqrt(u^T B u) = (integral of |Laplacian u|^2 over Omega u dOmega)^{1/2}.
inline double norm_H(const BiharmonicForm& form, const VertexFunction& u) {
    return std::sqrt(std::max(0.0, form.quadratic(u)));
}

namespace detail {

inline double gamma_sum(const WeightedGraph& g, const Domain& d, const VertexFunction& u) {
    double acc = 0.0;
    for (int k = 0; k < d.effective_size(); ++k) {
        int gx = d.graph_of_effective(k);
        double ux = extended_value(d, u, gx);
        double local = 0.0;
        for (const auto& [gy, w] : g.neighbors(gx)) {
            double diff = extended_value(d, u, gy) - ux;
            local += w * diff * diff;
        }
        acc += 0.5 * local;  // mu(x) * Gamma(u)(x) = local / 2
    }
    return acc;
}

}  // namespace detail

namespace detail {

inline double laplacian_sum(const WeightedGraph& g, const Domain& d, const VertexFunction& u) {
    double acc = 0.0;
    for (int k = 0; k < d.effective_size(); ++k) {
        int gx = d.graph_of_effective(k);
        double ux = extended_value(d, u, gx);
        double local = 0.0;
        for (const auto& [gy, w] : g.neighbors(gx))
            local += w * (extended_value(d, u, gy) - ux);
        acc += local * local / g.mu(gx);  // mu * (local/mu)^2
    }
    return acc;
}

inline double mass_sum(const WeightedGraph& g, const Domain& d, const VertexFunction& u) {
    double acc = 0.0;
    for (int k = 0; k < d.interior_size(); ++k)
        acc += g.mu(d.graph_of_effective(k)) * u[k] * u[k];
    return acc;
}

}  // namespace detail

/// Full Sobolev norm: sqrt( sum_{Omega u dOmega} mu (|Lap u|^2 + |grad u|^2)
/// + sum_Omega mu u^2 ), all on the zero extension.
inline double norm_W22(const WeightedGraph& g, const Domain& d, const VertexFunction& u) {
    detail::require_interior_sized(d, u);
    return std::sqrt(detail::laplacian_sum(g, d, u) + detail::gamma_sum(g, d, u) +
                     detail::mass_sum(g, d, u));
}

/// First-order norm: same as norm_W22 without the Laplacian term.
inline double norm_W012(const WeightedGraph& g, const Domain& d, const VertexFunction& u) {
    detail::require_interior_sized(d, u);
    return std::sqrt(detail::gamma_sum(g, d, u) + detail::mass_sum(g, d, u));
}

}  // namespace gbh
