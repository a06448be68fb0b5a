#pragma once

// Discrete optimal transport between weighted empirical measures. Uniform
// equal-count instances go through an exact O(N^3) assignment solver; general
// weights go through a transportation simplex. Both return exact optima.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace sysdist {

template <typename Atom>
struct EmpiricalMeasure {
    std::vector<Atom> atoms;
    Eigen::VectorXd weights;

    static EmpiricalMeasure uniform(std::vector<Atom> points) {
        EmpiricalMeasure m;
        m.weights = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(points.size()),
                                              1.0 / static_cast<double>(points.size()));
        m.atoms = std::move(points);
        return m;
    }

    void validate() const {
        if (atoms.empty() || weights.size() != static_cast<Eigen::Index>(atoms.size()))
            throw std::invalid_argument("weights length must equal atom count");
        if (weights.minCoeff() < 0.0)
            throw std::invalid_argument("weights must be nonnegative");
        if (std::abs(weights.sum() - 1.0) > 1e-12)
            throw std::invalid_argument("weights must sum to 1");
    }
};

enum class CostKind { ChordalPow, GapPow, Custom };

struct CostMatrix {
    Eigen::MatrixXd entries;
    CostKind kind = CostKind::Custom;
    double q = 1.0;

    void validate() const {
        if (!entries.allFinite() || entries.minCoeff() < 0.0)
            throw std::invalid_argument("cost entries must be finite and nonnegative");
    }
};

struct CouplingPlan {
    Eigen::MatrixXd pi;
};

namespace detail {

// Jonker-Volgenant style shortest augmenting path assignment; returns the
// column matched to each row of a square cost matrix.
inline std::vector<int> solve_assignment(const Eigen::MatrixXd& cost) {
    const int n = static_cast<int>(cost.rows());
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(static_cast<std::size_t>(n) + 1, 0.0), v(static_cast<std::size_t>(n) + 1, 0.0);
    std::vector<int> match(static_cast<std::size_t>(n) + 1, 0), way(static_cast<std::size_t>(n) + 1, 0);
    for (int i = 1; i <= n; ++i) {
        match[0] = i;
        int j0 = 0;
        std::vector<double> minv(static_cast<std::size_t>(n) + 1, inf);
        std::vector<char> used(static_cast<std::size_t>(n) + 1, 0);
        do {
            used[static_cast<std::size_t>(j0)] = 1;
            int i0 = match[static_cast<std::size_t>(j0)], j1 = 0;
            double delta = inf;
            for (int j = 1; j <= n; ++j) {
                if (used[static_cast<std::size_t>(j)]) continue;
                double cur = cost(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] - v[static_cast<std::size_t>(j)];
                if (cur < minv[static_cast<std::size_t>(j)]) {
                    minv[static_cast<std::size_t>(j)] = cur;
                    way[static_cast<std::size_t>(j)] = j0;
                }
                if (minv[static_cast<std::size_t>(j)] < delta) {
                    delta = minv[static_cast<std::size_t>(j)];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[static_cast<std::size_t>(j)]) {
                    u[static_cast<std::size_t>(match[static_cast<std::size_t>(j)])] += delta;
                    v[static_cast<std::size_t>(j)] -= delta;
                } else {
                    minv[static_cast<std::size_t>(j)] -= delta;
                }
            }
            j0 = j1;
        } while (match[static_cast<std::size_t>(j0)] != 0);
        do {
            int j1 = way[static_cast<std::size_t>(j0)];
            match[static_cast<std::size_t>(j0)] = match[static_cast<std::size_t>(j1)];
            j0 = j1;
        } while (j0);
    }
    std::vector<int> row_to_col(static_cast<std::size_t>(n), -1);
    for (int j = 1; j <= n; ++j) row_to_col[static_cast<std::size_t>(match[static_cast<std::size_t>(j)]) - 1] = j - 1;
    return row_to_col;
}

// Transportation simplex (MODI) with a northwest-corner start. Supplies are
// epsilon-perturbed to keep the basis a spanning tree under degeneracy.
inline Eigen::MatrixXd solve_transportation(const Eigen::VectorXd& supply_in,
                                            const Eigen::VectorXd& demand_in,
                                            const Eigen::MatrixXd& cost) {
    const int m = static_cast<int>(supply_in.size());
    const int n = static_cast<int>(demand_in.size());
    const double eps = 1e-11 / static_cast<double>(m);
    Eigen::VectorXd supply = supply_in.array() + eps;
    Eigen::VectorXd demand = demand_in;
    demand(n - 1) += eps * static_cast<double>(m);

    struct Cell {
        int i, j;
        double flow;
    };
    std::vector<Cell> basis;
    basis.reserve(static_cast<std::size_t>(m + n));

    // Northwest corner rule.
    {
        Eigen::VectorXd s = supply, d = demand;
        int i = 0, j = 0;
        while (i < m && j < n) {
            double f = std::min(s(i), d(j));
            basis.push_back({i, j, f});
            s(i) -= f;
            d(j) -= f;
            if (i == m - 1 && j == n - 1) break;
            if (s(i) <= d(j) && i < m - 1)
                ++i;
            else
                ++j;
        }
    }

    const int max_iters = 20 * (m + n) * (m + n) + 2000;
    for (int iter = 0; iter < max_iters; ++iter) {
        // Duals from the basis tree: u_i + v_j = c_ij on basic cells.
        const double unset = std::numeric_limits<double>::quiet_NaN();
        std::vector<double> u(static_cast<std::size_t>(m), unset), v(static_cast<std::size_t>(n), unset);
        std::vector<std::vector<int>> row_cells(static_cast<std::size_t>(m)), col_cells(static_cast<std::size_t>(n));
        for (int b = 0; b < static_cast<int>(basis.size()); ++b) {
            row_cells[static_cast<std::size_t>(basis[static_cast<std::size_t>(b)].i)].push_back(b);
            col_cells[static_cast<std::size_t>(basis[static_cast<std::size_t>(b)].j)].push_back(b);
        }
        u[0] = 0.0;
        std::queue<std::pair<bool, int>> frontier;  // (is_row, index)
        frontier.push({true, 0});
        while (!frontier.empty()) {
            auto [is_row, idx] = frontier.front();
            frontier.pop();
            const auto& cells = is_row ? row_cells[static_cast<std::size_t>(idx)] : col_cells[static_cast<std::size_t>(idx)];
            for (int b : cells) {
                const Cell& cell = basis[static_cast<std::size_t>(b)];
                if (is_row) {
                    if (std::isnan(v[static_cast<std::size_t>(cell.j)])) {
                        v[static_cast<std::size_t>(cell.j)] = cost(cell.i, cell.j) - u[static_cast<std::size_t>(cell.i)];
                        frontier.push({false, cell.j});
                    }
                } else {
                    if (std::isnan(u[static_cast<std::size_t>(cell.i)])) {
                        u[static_cast<std::size_t>(cell.i)] = cost(cell.i, cell.j) - v[static_cast<std::size_t>(cell.j)];
                        frontier.push({true, cell.i});
                    }
                }
            }
        }
        for (double x : u)
            if (std::isnan(x)) throw std::runtime_error("transportation basis is not connected");

        // Entering cell: most negative reduced cost.
        int best_i = -1, best_j = -1;
        double best_red = -1e-12;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j) {
                double red = cost(i, j) - u[static_cast<std::size_t>(i)] - v[static_cast<std::size_t>(j)];
                if (red < best_red) {
                    best_red = red;
                    best_i = i;
                    best_j = j;
                }
            }
        if (best_i < 0) break;  // optimal

        // Unique cycle through the entering cell in the basis tree: alternating
        // row/column path from best_j back to best_i.
        std::vector<char> visited_row(static_cast<std::size_t>(m), 0), visited_col(static_cast<std::size_t>(n), 0);
        std::vector<int> path;
        std::function<bool(bool, int)> dfs = [&](bool is_row, int idx) -> bool {
            if (is_row) {
                if (idx == best_i) return true;
                visited_row[static_cast<std::size_t>(idx)] = 1;
                for (int b : row_cells[static_cast<std::size_t>(idx)]) {
                    const Cell& cell = basis[static_cast<std::size_t>(b)];
                    if (!visited_col[static_cast<std::size_t>(cell.j)]) {
                        path.push_back(b);
                        if (dfs(false, cell.j)) return true;
                        path.pop_back();
                    }
                }
            } else {
                visited_col[static_cast<std::size_t>(idx)] = 1;
                for (int b : col_cells[static_cast<std::size_t>(idx)]) {
                    const Cell& cell = basis[static_cast<std::size_t>(b)];
                    if (!visited_row[static_cast<std::size_t>(cell.i)]) {
                        path.push_back(b);
                        if (dfs(true, cell.i)) return true;
                        path.pop_back();
                    }
                }
            }
            return false;
        };
        visited_col[static_cast<std::size_t>(best_j)] = 1;
        if (!dfs(false, best_j)) throw std::runtime_error("transportation pivot cycle not found");

        // Cells at even positions along the path gain flow is the entering
        // cell plus path odd positions; find leaving flow on odd positions.
        double theta = std::numeric_limits<double>::infinity();
        int leaving = -1;
        for (std::size_t p = 0; p < path.size(); p += 2) {
            const Cell& cell = basis[static_cast<std::size_t>(path[p])];
            if (cell.flow < theta) {
                theta = cell.flow;
                leaving = path[p];
            }
        }
        for (std::size_t p = 0; p < path.size(); ++p) {
            Cell& cell = basis[static_cast<std::size_t>(path[p])];
            cell.flow += (p % 2 == 0) ? -theta : theta;
        }
        Cell entering{best_i, best_j, theta};
        basis[static_cast<std::size_t>(leaving)] = entering;
        if (iter == max_iters - 1) throw std::runtime_error("transportation simplex did not converge");
    }

    Eigen::MatrixXd plan = Eigen::MatrixXd::Zero(m, n);
    for (const Cell& cell : basis) plan(cell.i, cell.j) += cell.flow;
    return plan;
}

inline bool is_uniform_equal(const Eigen::VectorXd& w1, const Eigen::VectorXd& w2) {
    if (w1.size() != w2.size()) return false;
    double ref = 1.0 / static_cast<double>(w1.size());
    return ((w1.array() - ref).abs() < 1e-12).all() && ((w2.array() - ref).abs() < 1e-12).all();
}

}  // namespace detail

template <typename AtomA, typename AtomB>
std::pair<CouplingPlan, double> min_cost_coupling(const EmpiricalMeasure<AtomA>& mu,
                                                  const EmpiricalMeasure<AtomB>& nu,
                                                  const CostMatrix& cost) {
    mu.validate();
    nu.validate();
    cost.validate();
    const Eigen::Index n1 = mu.weights.size(), n2 = nu.weights.size();
    if (cost.entries.rows() != n1 || cost.entries.cols() != n2)
        throw std::invalid_argument("cost dimensions must match atom counts");

    // Zero-weight atoms are dropped before solving.
    std::vector<int> rows, cols;
    for (Eigen::Index i = 0; i < n1; ++i)
        if (mu.weights(i) > 0.0) rows.push_back(static_cast<int>(i));
    for (Eigen::Index j = 0; j < n2; ++j)
        if (nu.weights(j) > 0.0) cols.push_back(static_cast<int>(j));
    Eigen::VectorXd a(static_cast<Eigen::Index>(rows.size())), b(static_cast<Eigen::Index>(cols.size()));
    Eigen::MatrixXd c(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        a(static_cast<Eigen::Index>(i)) = mu.weights(rows[i]);
        for (std::size_t j = 0; j < cols.size(); ++j) c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = cost.entries(rows[i], cols[j]);
    }
    for (std::size_t j = 0; j < cols.size(); ++j) b(static_cast<Eigen::Index>(j)) = nu.weights(cols[j]);

    Eigen::MatrixXd sub_plan;
    if (detail::is_uniform_equal(a, b)) {
        auto row_to_col = detail::solve_assignment(c);
        sub_plan = Eigen::MatrixXd::Zero(a.size(), b.size());
        for (Eigen::Index i = 0; i < a.size(); ++i) sub_plan(i, row_to_col[static_cast<std::size_t>(i)]) = a(i);
    } else {
        sub_plan = detail::solve_transportation(a, b, c);
    }

    CouplingPlan plan;
    plan.pi = Eigen::MatrixXd::Zero(n1, n2);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j)
            plan.pi(rows[i], cols[j]) = sub_plan(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    double value = (plan.pi.array() * cost.entries.array()).sum();
    return {plan, value};
}

template <typename AtomA, typename AtomB>
std::pair<CouplingPlan, double> max_cost_coupling(const EmpiricalMeasure<AtomA>& mu,
                                                  const EmpiricalMeasure<AtomB>& nu,
                                                  const CostMatrix& cost) {
    cost.validate();
    double shift = cost.entries.maxCoeff();
    CostMatrix flipped;
    flipped.entries = (shift - cost.entries.array()).matrix();
    flipped.kind = cost.kind;
    flipped.q = cost.q;
    auto [plan, neg_value] = min_cost_coupling(mu, nu, flipped);
    return {plan, shift - neg_value};
}

// Type-q Wasserstein transport cost W_q^q (not its q-th root).
template <typename Atom, typename Metric>
double wasserstein_q(const EmpiricalMeasure<Atom>& mu, const EmpiricalMeasure<Atom>& nu,
                     Metric&& pairwise_metric, double q) {
    if (q < 1.0) throw std::invalid_argument("wasserstein_q requires q >= 1");
    CostMatrix cost;
    cost.q = q;
    cost.entries.resize(mu.weights.size(), nu.weights.size());
    for (Eigen::Index i = 0; i < mu.weights.size(); ++i)
        for (Eigen::Index k = 0; k < nu.weights.size(); ++k)
            cost.entries(i, k) = std::pow(
                pairwise_metric(mu.atoms[static_cast<std::size_t>(i)], nu.atoms[static_cast<std::size_t>(k)]), q);
    return min_cost_coupling(mu, nu, cost).second;
}

}  // namespace sysdist
