// lp.hpp
// Dense two-phase primal simplex for small linear programs.
//
// Variables are nonnegative, with optional finite upper bounds. Pricing is
// Dantzig's largest reduced cost; after a run of degenerate pivots the solver
// switches to Bland's rule for the rest of the phase, which rules out cycling.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "dptkit/errors.hpp"

namespace dptkit {

enum class Sense { le, eq, ge };

struct LinearProgram {
    struct Row {
        std::vector<std::pair<std::size_t, double>> terms;
        Sense sense;
        double rhs;
    };

    std::size_t num_vars = 0;
    std::vector<double> objective;  // dense, size num_vars
    bool maximize = true;
    std::vector<Row> rows;
    std::vector<double> upper;  // empty, or size num_vars with +inf for "no bound"

    explicit LinearProgram(std::size_t n = 0, bool maximize_ = true)
        : num_vars(n), objective(n, 0.0), maximize(maximize_) {}

    std::size_t add_var(double cost = 0.0) {
        objective.push_back(cost);
        if (!upper.empty()) upper.push_back(std::numeric_limits<double>::infinity());
        return num_vars++;
    }

    void add_row(std::vector<std::pair<std::size_t, double>> terms, Sense sense, double rhs) {
        for (const auto& [j, a] : terms)
            if (j >= num_vars) throw DimensionError("LinearProgram: row references unknown variable");
        rows.push_back({std::move(terms), sense, rhs});
    }

    void set_upper(std::size_t j, double u) {
        if (upper.empty()) upper.assign(num_vars, std::numeric_limits<double>::infinity());
        upper.at(j) = u;
    }
};

struct LpOptions {
    double tol = 1e-9;
    std::size_t max_iters = 1'000'000;
    std::size_t degenerate_switch = 50;
    std::size_t max_tableau_entries = 60'000'000;
};

struct LpSolution {
    double value = 0.0;
    std::vector<double> x;
    std::size_t iterations = 0;
};

namespace detail {

class Tableau {
public:
    Tableau(std::size_t m, std::size_t n) : m_(m), n_(n), t_(m * (n + 1), 0.0), obj_(n + 1, 0.0), basis_(m) {}

    double& at(std::size_t r, std::size_t c) { return t_[r * (n_ + 1) + c]; }
    double at(std::size_t r, std::size_t c) const { return t_[r * (n_ + 1) + c]; }
    double& rhs(std::size_t r) { return at(r, n_); }
    double rhs(std::size_t r) const { return at(r, n_); }
    std::vector<double>& obj() { return obj_; }
    std::vector<std::size_t>& basis() { return basis_; }
    std::size_t rows() const { return m_; }
    std::size_t cols() const { return n_; }

    void pivot(std::size_t pr, std::size_t pc) {
        const double inv = 1.0 / at(pr, pc);
        std::vector<std::size_t> nz;
        for (std::size_t c = 0; c <= n_; ++c) {
            double& v = at(pr, c);
            v *= inv;
            if (std::abs(v) < 1e-14) v = 0.0;
            if (v != 0.0) nz.push_back(c);
        }
        at(pr, pc) = 1.0;
        auto eliminate = [&](double* row) {
            const double f = row[pc];
            if (f == 0.0) return;
            const double* src = &t_[pr * (n_ + 1)];
            for (auto c : nz) {
                row[c] -= f * src[c];
                if (std::abs(row[c]) < 1e-14) row[c] = 0.0;
            }
            row[pc] = 0.0;
        };
        for (std::size_t r = 0; r < m_; ++r)
            if (r != pr) eliminate(&t_[r * (n_ + 1)]);
        eliminate(obj_.data());
        basis_[pr] = pc;
    }

    void drop_row(std::size_t r) {
        t_.erase(t_.begin() + static_cast<std::ptrdiff_t>(r * (n_ + 1)),
                 t_.begin() + static_cast<std::ptrdiff_t>((r + 1) * (n_ + 1)));
        basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(r));
        --m_;
    }

    // Maximizes the objective row (obj_[j] = reduced cost of column j,
    // obj_[n] = -current value) over columns j with allowed[j].
    // Returns false when unbounded.
    bool optimize(const std::vector<bool>& allowed, const LpOptions& opt, std::size_t& iters) {
        bool bland = false;
        std::size_t degenerate_run = 0;
        while (true) {
            if (++iters > opt.max_iters) throw Error("solve_lp: iteration limit reached");
            std::size_t enter = n_;
            double best = opt.tol;
            for (std::size_t j = 0; j < n_; ++j) {
                if (!allowed[j] || obj_[j] <= opt.tol) continue;
                if (bland) {
                    enter = j;
                    break;
                }
                if (obj_[j] > best) {
                    best = obj_[j];
                    enter = j;
                }
            }
            if (enter == n_) return true;

            std::size_t leave = m_;
            double ratio = std::numeric_limits<double>::infinity();
            for (std::size_t r = 0; r < m_; ++r) {
                const double a = at(r, enter);
                if (a <= opt.tol) continue;
                const double q = rhs(r) / a;
                const bool better = q < ratio - 1e-12;
                const bool tie = !better && q <= ratio + 1e-12;
                if (better || (tie && (bland ? basis_[r] < basis_[leave] : a > at(leave, enter)))) {
                    ratio = std::min(ratio, q);
                    leave = r;
                }
            }
            if (leave == m_) return false;
            if (ratio <= 1e-12) {
                if (++degenerate_run >= opt.degenerate_switch) bland = true;
            } else {
                degenerate_run = 0;
            }
            pivot(leave, enter);
            for (std::size_t r = 0; r < m_; ++r)
                if (rhs(r) < 0.0 && rhs(r) > -1e-11) rhs(r) = 0.0;
        }
    }

private:
    std::size_t m_, n_;
    std::vector<double> t_;
    std::vector<double> obj_;
    std::vector<std::size_t> basis_;
};

} // namespace detail

inline LpSolution solve_lp(const LinearProgram& lp, const LpOptions& opt = {}) {
    if (lp.objective.size() != lp.num_vars) throw DimensionError("solve_lp: objective size mismatch");
    std::vector<LinearProgram::Row> rows = lp.rows;
    if (!lp.upper.empty()) {
        if (lp.upper.size() != lp.num_vars) throw DimensionError("solve_lp: upper-bound size mismatch");
        for (std::size_t j = 0; j < lp.num_vars; ++j)
            if (std::isfinite(lp.upper[j])) rows.push_back({{{j, 1.0}}, Sense::le, lp.upper[j]});
    }
    // Normalize to rhs >= 0.
    for (auto& r : rows) {
        if (!std::isfinite(r.rhs)) throw DomainError("solve_lp: non-finite right-hand side");
        if (r.rhs < 0.0) {
            r.rhs = -r.rhs;
            for (auto& t : r.terms) t.second = -t.second;
            if (r.sense != Sense::eq) r.sense = r.sense == Sense::le ? Sense::ge : Sense::le;
        }
    }

    const std::size_t m = rows.size();
    const std::size_t n = lp.num_vars;
    std::size_t slacks = 0, artificials = 0;
    for (const auto& r : rows) {
        if (r.sense != Sense::eq) ++slacks;
        if (r.sense != Sense::le) ++artificials;
    }
    const std::size_t total = n + slacks + artificials;
    if (static_cast<double>(m) * static_cast<double>(total + 1) > static_cast<double>(opt.max_tableau_entries))
        throw BudgetExceeded("solve_lp: tableau of " + std::to_string(m) + " x " + std::to_string(total + 1) +
                             " exceeds budget");

    detail::Tableau tab(m, total);
    std::vector<bool> is_artificial(total, false);
    std::size_t next_slack = n, next_art = n + slacks;
    for (std::size_t r = 0; r < m; ++r) {
        for (const auto& [j, a] : rows[r].terms) tab.at(r, j) += a;
        tab.rhs(r) = rows[r].rhs;
        switch (rows[r].sense) {
        case Sense::le:
            tab.at(r, next_slack) = 1.0;
            tab.basis()[r] = next_slack++;
            break;
        case Sense::ge:
            tab.at(r, next_slack++) = -1.0;
            [[fallthrough]];
        case Sense::eq:
            tab.at(r, next_art) = 1.0;
            is_artificial[next_art] = true;
            tab.basis()[r] = next_art++;
            break;
        }
    }

    LpSolution sol;
    // Phase 1: maximize -sum(artificials). Reduced costs of the starting basis
    // are the column sums over artificial rows.
    if (artificials > 0) {
        auto& z = tab.obj();
        std::fill(z.begin(), z.end(), 0.0);
        for (std::size_t r = 0; r < m; ++r) {
            if (!is_artificial[tab.basis()[r]]) continue;
            for (std::size_t c = 0; c <= total; ++c)
                if (!is_artificial[c] || c == total) z[c] += tab.at(r, c);
        }
        std::vector<bool> allowed(total, true);
        tab.optimize(allowed, opt, sol.iterations);
        double scale = 1.0;
        for (const auto& r : rows) scale = std::max(scale, std::abs(r.rhs));
        if (tab.obj()[total] > 1e-7 * scale)
            throw InfeasibleError("solve_lp: infeasible (phase-one residual " + std::to_string(tab.obj()[total]) + ")");
        // Drive artificials out of the basis; rows where that is impossible are redundant.
        for (std::size_t r = tab.rows(); r-- > 0;) {
            if (!is_artificial[tab.basis()[r]]) continue;
            std::size_t col = total;
            double best = 1e-9;
            for (std::size_t c = 0; c < total; ++c)
                if (!is_artificial[c] && std::abs(tab.at(r, c)) > best) {
                    best = std::abs(tab.at(r, c));
                    col = c;
                }
            if (col == total)
                tab.drop_row(r);
            else
                tab.pivot(r, col);
        }
    }

    // Phase 2.
    const double sign = lp.maximize ? 1.0 : -1.0;
    auto& z = tab.obj();
    std::fill(z.begin(), z.end(), 0.0);
    for (std::size_t j = 0; j < n; ++j) z[j] = sign * lp.objective[j];
    for (std::size_t r = 0; r < tab.rows(); ++r) {
        const std::size_t b = tab.basis()[r];
        const double cb = b < n ? sign * lp.objective[b] : 0.0;
        if (cb == 0.0) continue;
        for (std::size_t c = 0; c <= total; ++c) z[c] -= cb * tab.at(r, c);
    }
    std::vector<bool> allowed(total);
    for (std::size_t j = 0; j < total; ++j) allowed[j] = !is_artificial[j];
    if (!tab.optimize(allowed, opt, sol.iterations)) throw UnboundedError("solve_lp: objective is unbounded");

    sol.x.assign(n, 0.0);
    for (std::size_t r = 0; r < tab.rows(); ++r)
        if (tab.basis()[r] < n) sol.x[tab.basis()[r]] = std::max(0.0, tab.rhs(r));
    sol.value = 0.0;
    for (std::size_t j = 0; j < n; ++j) sol.value += lp.objective[j] * sol.x[j];
    return sol;
}

// Largest violation of the LP's constraints at x (including x >= 0 and bounds).
inline double max_violation(const LinearProgram& lp, const std::vector<double>& x) {
    double worst = 0.0;
    for (std::size_t j = 0; j < lp.num_vars; ++j) {
        worst = std::max(worst, -x[j]);
        if (!lp.upper.empty()) worst = std::max(worst, x[j] - lp.upper[j]);
    }
    for (const auto& r : lp.rows) {
        double s = 0.0;
        for (const auto& [j, a] : r.terms) s += a * x[j];
        switch (r.sense) {
        case Sense::le: worst = std::max(worst, s - r.rhs); break;
        case Sense::ge: worst = std::max(worst, r.rhs - s); break;
        case Sense::eq: worst = std::max(worst, std::abs(s - r.rhs)); break;
        }
    }
    return worst;
}

} // namespace dptkit
