// entropy.hpp
// Entropies and divergences (base-2 throughout), exact classical smoothing of
// the max-relative entropy, and conditional min-/Hartley entropies.

#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <limits>
#include <numeric>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "dptkit/errors.hpp"
#include "dptkit/linalg.hpp"
#include "dptkit/qcore.hpp"

namespace dptkit {

// Weight of rho outside supp(sigma) above which a divergence is +infinity.
inline constexpr double kSupportTolerance = 1e-9;

// A real number or +infinity. Deliberately has no arithmetic operators:
// callers must branch on is_infinite() before doing math with value().
class ExtendedReal {
public:
    static constexpr ExtendedReal finite(double v) { return ExtendedReal(v, false); }
    static constexpr ExtendedReal infinity() { return ExtendedReal(0.0, true); }

    constexpr bool is_infinite() const noexcept { return inf_; }
    constexpr bool is_finite() const noexcept { return !inf_; }

    double value() const {
        if (inf_) throw DomainError("ExtendedReal: value() called on +infinity");
        return v_;
    }

    friend constexpr bool operator==(const ExtendedReal& a, const ExtendedReal& b) {
        return a.inf_ == b.inf_ && (a.inf_ || a.v_ == b.v_);
    }
    friend constexpr std::partial_ordering operator<=>(const ExtendedReal& a,
                                                       const ExtendedReal& b) {
        if (a.inf_ || b.inf_) return a.inf_ == b.inf_ ? std::partial_ordering::equivalent
                                     : a.inf_          ? std::partial_ordering::greater
                                                       : std::partial_ordering::less;
        return a.v_ <=> b.v_;
    }

    friend std::ostream& operator<<(std::ostream& os, const ExtendedReal& x) {
        return x.inf_ ? os << "+inf" : os << x.v_;
    }

private:
    constexpr ExtendedReal(double v, bool inf) : v_(v), inf_(inf) {}
    double v_;
    bool inf_;
};

// ---------------------------------------------------------------- classical

class ClassicalDistribution {
public:
    explicit ClassicalDistribution(std::vector<double> probs, std::vector<std::string> outcomes = {})
        : probs_(std::move(probs)), outcomes_(std::move(outcomes)) {
        if (probs_.empty()) throw DimensionError("ClassicalDistribution: no outcomes");
        if (outcomes_.empty())
            for (std::size_t i = 0; i < probs_.size(); ++i) outcomes_.push_back(std::to_string(i));
        if (outcomes_.size() != probs_.size())
            throw DimensionError("ClassicalDistribution: label count differs from probability count");
        double s = 0.0;
        for (double p : probs_) {
            if (!(p >= 0.0) || !std::isfinite(p))
                throw DomainError("ClassicalDistribution: negative or non-finite probability");
            s += p;
        }
        if (std::abs(s - 1.0) > 1e-12)
            throw DomainError("ClassicalDistribution: probabilities sum to " + std::to_string(s));
    }

    std::size_t size() const noexcept { return probs_.size(); }
    std::span<const double> probs() const noexcept { return probs_; }
    std::span<const std::string> outcomes() const noexcept { return outcomes_; }
    double operator[](std::size_t i) const { return probs_[i]; }

private:
    std::vector<double> probs_;
    std::vector<std::string> outcomes_;
};

inline void require_same_outcomes(const ClassicalDistribution& p, const ClassicalDistribution& q) {
    if (p.size() != q.size()) throw DimensionError("distributions have different outcome counts");
}

// Bhattacharyya coefficient sum_x sqrt(P(x) Q(x)): the fidelity of the
// corresponding diagonal states.
inline double classical_fidelity(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) throw DimensionError("classical_fidelity: size mismatch");
    double f = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) f += std::sqrt(std::max(0.0, p[i]) * std::max(0.0, q[i]));
    return std::min(1.0, f);
}

inline double classical_purified_distance(std::span<const double> p, std::span<const double> q) {
    const double f = classical_fidelity(p, q);
    return std::sqrt(std::max(0.0, 1.0 - f * f));
}

inline double l1_distance(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) throw DimensionError("l1_distance: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
    return s;
}

inline ExtendedReal rel_entropy(const ClassicalDistribution& p, const ClassicalDistribution& q) {
    require_same_outcomes(p, q);
    double d = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] <= 0.0) continue;
        if (q[i] <= 0.0) return ExtendedReal::infinity();
        d += p[i] * std::log2(p[i] / q[i]);
    }
    return ExtendedReal::finite(std::max(0.0, d));
}

inline ExtendedReal dmax(const ClassicalDistribution& p, const ClassicalDistribution& q) {
    require_same_outcomes(p, q);
    double r = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] <= 0.0) continue;
        if (q[i] <= 0.0) return ExtendedReal::infinity();
        r = std::max(r, p[i] / q[i]);
    }
    return ExtendedReal::finite(std::max(0.0, std::log2(r)));
}

// inf { Dmax(P' || Q) : P' a distribution with ||P - P'||_1 <= eps }.
//
// For a cap P' <= r Q the cheapest P' in l1 costs 2 * sum_x (P(x) - r Q(x))_+,
// so the optimum is the smallest r >= 1 with that excess <= eps / 2. The
// excess is convex piecewise linear in r; we walk its breakpoints P(x)/Q(x)
// from the top and solve the active linear piece exactly.
inline ExtendedReal smoothed_dmax_classical(const ClassicalDistribution& p,
                                            const ClassicalDistribution& q, double eps) {
    require_same_outcomes(p, q);
    if (!(eps >= 0.0 && eps < 1.0)) throw DomainError("smoothed_dmax_classical: eps must lie in [0,1)");
    const double budget = eps / 2.0;
    constexpr double slack = 1e-15;

    double stranded = 0.0;  // mass on outcomes with Q = 0; must be removed whatever r is
    std::vector<std::pair<double, std::size_t>> ratios;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] <= 0.0) continue;
        if (q[i] <= 0.0)
            stranded += p[i];
        else
            ratios.emplace_back(p[i] / q[i], i);
    }
    if (stranded > budget + slack) return ExtendedReal::infinity();
    if (ratios.empty()) return ExtendedReal::finite(0.0);
    std::sort(ratios.begin(), ratios.end(), std::greater<>{});

    double active_p = 0.0;
    double active_q = 0.0;
    double r_star = 1.0;
    for (std::size_t k = 0; k < ratios.size(); ++k) {
        active_p += p[ratios[k].second];
        active_q += q[ratios[k].second];
        const double next = (k + 1 < ratios.size()) ? ratios[k + 1].first : 0.0;
        // excess(r) = stranded + active_p - r * active_q on [next, ratios[k]]
        const double r = (stranded + active_p - budget) / active_q;
        if (r >= next) {
            r_star = r;
            break;
        }
    }
    r_star = std::max(1.0, r_star);
    return ExtendedReal::finite(std::log2(r_star));
}

// ------------------------------------------------------------------ quantum

inline double vn_entropy(const DensityOperator& rho) {
    double h = 0.0;
    for (double x : rho.eigen().values)
        if (x > kEigenCutoff) h -= x * std::log2(x);
    return std::max(0.0, h);
}

namespace detail {

// Tr(rho * (1 - Pi_supp(sigma)))
inline double weight_outside_support(const DensityOperator& rho, const DensityOperator& sigma) {
    const auto& e = sigma.eigen();
    double outside = 0.0;
    for (std::size_t k = 0; k < e.values.size(); ++k) {
        if (e.values[k] > kEigenCutoff) continue;
        const CVector v = e.vector(k);
        outside += std::real(inner(v, rho.matrix().apply(v)));
    }
    return outside;
}

} // namespace detail

inline ExtendedReal rel_entropy(const DensityOperator& rho, const DensityOperator& sigma) {
    require_same_dim(rho, sigma, "rel_entropy");
    if (detail::weight_outside_support(rho, sigma) > kSupportTolerance) return ExtendedReal::infinity();
    double d = -vn_entropy(rho);
    const auto& e = sigma.eigen();
    for (std::size_t k = 0; k < e.values.size(); ++k) {
        if (e.values[k] <= kEigenCutoff) continue;
        const CVector v = e.vector(k);
        d -= std::real(inner(v, rho.matrix().apply(v))) * std::log2(e.values[k]);
    }
    return ExtendedReal::finite(std::max(0.0, d));
}

// min { lambda : rho <= 2^lambda sigma } = log2 lambda_max(sigma^{-1/2} rho sigma^{-1/2}).
inline ExtendedReal dmax(const DensityOperator& rho, const DensityOperator& sigma) {
    require_same_dim(rho, sigma, "dmax");
    if (detail::weight_outside_support(rho, sigma) > kSupportTolerance) return ExtendedReal::infinity();
    const ComplexMatrix w = spectral_apply(
        sigma.eigen(), [](double x) { return x > kEigenCutoff ? 1.0 / std::sqrt(x) : 0.0; });
    const double top = max_eigenvalue((w * rho.matrix() * w).hermitian_part());
    return ExtendedReal::finite(std::max(0.0, std::log2(std::max(top, 1e-300))));
}

inline double binary_entropy(double x) {
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("binary_entropy: argument outside [0,1]");
    if (x == 0.0 || x == 1.0) return 0.0;
    return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

// ------------------------------------------------------ conditional entropies

// Joint distribution P(y, z) stored as ny x nz, row-major.
class JointTable {
public:
    JointTable(std::size_t ny, std::size_t nz, std::vector<double> cells)
        : ny_(ny), nz_(nz), cells_(std::move(cells)) {
        if (ny_ == 0 || nz_ == 0 || cells_.size() != ny_ * nz_)
            throw DimensionError("JointTable: cell count does not match shape");
        double s = 0.0;
        for (double c : cells_) {
            if (!(c >= 0.0) || !std::isfinite(c)) throw DomainError("JointTable: negative cell");
            s += c;
        }
        if (std::abs(s - 1.0) > 1e-12)
            throw DomainError("JointTable: cells sum to " + std::to_string(s));
    }

    std::size_t ny() const noexcept { return ny_; }
    std::size_t nz() const noexcept { return nz_; }
    double operator()(std::size_t y, std::size_t z) const { return cells_[y * nz_ + z]; }
    std::span<const double> cells() const noexcept { return cells_; }

    std::vector<double> marginal_y() const {
        std::vector<double> m(ny_, 0.0);
        for (std::size_t y = 0; y < ny_; ++y)
            for (std::size_t z = 0; z < nz_; ++z) m[y] += (*this)(y, z);
        return m;
    }
    std::vector<double> marginal_z() const {
        std::vector<double> m(nz_, 0.0);
        for (std::size_t y = 0; y < ny_; ++y)
            for (std::size_t z = 0; z < nz_; ++z) m[z] += (*this)(y, z);
        return m;
    }

private:
    std::size_t ny_;
    std::size_t nz_;
    std::vector<double> cells_;
};

// Classical register X with a quantum state per symbol.
struct CQState {
    std::vector<double> probs;
    std::vector<DensityOperator> states;

    CQState(std::vector<double> p, std::vector<DensityOperator> rho)
        : probs(std::move(p)), states(std::move(rho)) {
        ClassicalDistribution check(probs);
        if (states.size() != probs.size()) throw DimensionError("CQState: symbol count mismatch");
        for (const auto& s : states)
            if (s.dim() != states.front().dim())
                throw DimensionError("CQState: conditional states differ in dimension");
    }
};

// H_min(Y|Z) = -log2 sum_z max_y P(y,z).
inline double cond_hmin(const JointTable& t) {
    double guess = 0.0;
    for (std::size_t z = 0; z < t.nz(); ++z) {
        double best = 0.0;
        for (std::size_t y = 0; y < t.ny(); ++y) best = std::max(best, t(y, z));
        guess += best;
    }
    return std::max(0.0, -std::log2(guess));
}

// H_min(X|B) of a CQ state via the optimal guessing probability. Exact for two
// symbols (Helstrom) and for pairwise-commuting conditional states.
inline double cond_hmin(const CQState& cq) {
    const std::size_t n = cq.states.size();
    if (n == 1) return 0.0;
    if (n == 2) {
        const ComplexMatrix diff =
            cq.states[0].matrix() * cq.probs[0] - cq.states[1].matrix() * cq.probs[1];
        const double guess = 0.5 * (1.0 + trace_norm_hermitian(diff));
        return std::max(0.0, -std::log2(guess));
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const auto& a = cq.states[i].matrix();
            const auto& b = cq.states[j].matrix();
            if ((a * b - b * a).max_abs() > 1e-9)
                throw CapabilityError(
                    "cond_hmin: more than two symbols with non-commuting conditional states");
        }
    // A generic combination of commuting operators shares their eigenbasis.
    const std::size_t dim = cq.states.front().dim();
    for (int attempt = 0; attempt < 8; ++attempt) {
        ComplexMatrix combo(dim, dim);
        for (std::size_t x = 0; x < n; ++x)
            combo += cq.states[x].matrix() * std::sin(1.0 + 0.7548776662 * (x + 1) * (attempt + 1));
        const HermitianEigen basis = eigh(combo);
        bool diagonal = true;
        double guess = 0.0;
        std::vector<double> best(dim, 0.0);
        for (std::size_t x = 0; x < n && diagonal; ++x) {
            const ComplexMatrix d = basis.vectors.adjoint() * cq.states[x].matrix() * basis.vectors;
            for (std::size_t r = 0; r < dim && diagonal; ++r)
                for (std::size_t c = 0; c < dim; ++c)
                    if (r != c && std::abs(d(r, c)) > 1e-8) {
                        diagonal = false;
                        break;
                    }
            for (std::size_t k = 0; k < dim; ++k) best[k] = std::max(best[k], cq.probs[x] * d(k, k).real());
        }
        if (!diagonal) continue;
        for (double b : best) guess += b;
        return std::max(0.0, -std::log2(guess));
    }
    throw CapabilityError("cond_hmin: failed to diagonalize commuting conditional states");
}

// H_0(Y|Z) = log2 max_z |{y : P(y,z) > 0}|.
//
// eps > 0: greedy smoothing. Cells are deleted lightest first (ties: larger z,
// then larger y, go first) while the renormalized table stays within l1
// distance eps; deleting mass m costs 2m. The result upper-bounds the true
// smoothed value.
inline double cond_h0(const JointTable& t, double eps = 0.0) {
    if (!(eps >= 0.0)) throw DomainError("cond_h0: eps must be nonnegative");
    std::vector<bool> alive(t.ny() * t.nz());
    struct Cell {
        double mass;
        std::size_t y, z;
    };
    std::vector<Cell> cells;
    for (std::size_t y = 0; y < t.ny(); ++y)
        for (std::size_t z = 0; z < t.nz(); ++z) {
            alive[y * t.nz() + z] = t(y, z) > 0.0;
            if (t(y, z) > 0.0) cells.push_back({t(y, z), y, z});
        }
    if (eps > 0.0) {
        std::sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) {
            if (a.mass != b.mass) return a.mass < b.mass;
            if (a.z != b.z) return a.z > b.z;
            return a.y > b.y;
        });
        double removed = 0.0;
        for (std::size_t k = 0; k + 1 < cells.size(); ++k) {
            if (2.0 * (removed + cells[k].mass) > eps + 1e-12) break;
            removed += cells[k].mass;
            alive[cells[k].y * t.nz() + cells[k].z] = false;
        }
    }
    std::size_t widest = 0;
    for (std::size_t z = 0; z < t.nz(); ++z) {
        std::size_t count = 0;
        for (std::size_t y = 0; y < t.ny(); ++y) count += alive[y * t.nz() + z] ? 1 : 0;
        widest = std::max(widest, count);
    }
    return std::log2(static_cast<double>(std::max<std::size_t>(widest, 1)));
}

} // namespace dptkit
