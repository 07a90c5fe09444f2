// gamma2.hpp
// gamma_2^* norm of a real matrix, its distributional alpha-variant, and the
// XOR-game inequality check
//
//   (1 - 2 eps) * gamma2_alpha(F, p)  <=  eff_local average, eps (V_f, p).

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "dptkit/errors.hpp"
#include "dptkit/games.hpp"
#include "dptkit/partition_bound.hpp"
#include "dptkit/random.hpp"

namespace dptkit {

struct RealMatrix {
    std::size_t rows = 0, cols = 0;
    std::vector<double> data;  // row-major

    RealMatrix() = default;
    RealMatrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}
    RealMatrix(std::initializer_list<std::initializer_list<double>> init) {
        rows = init.size();
        cols = rows ? init.begin()->size() : 0;
        for (const auto& row : init) {
            if (row.size() != cols) throw DimensionError("RealMatrix: ragged initializer");
            data.insert(data.end(), row.begin(), row.end());
        }
    }
    double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
    std::size_t size() const { return data.size(); }

    RealMatrix transposed() const {
        RealMatrix t(cols, rows);
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < cols; ++c) t(c, r) = (*this)(r, c);
        return t;
    }
    bool operator==(const RealMatrix&) const = default;
};

// Matrix with entries in {-1, +1}.
struct SignMatrix : RealMatrix {
    SignMatrix() = default;
    explicit SignMatrix(RealMatrix m) : RealMatrix(std::move(m)) {
        for (double v : data)
            if (v != 1.0 && v != -1.0) throw DomainError("SignMatrix: entries must be +1 or -1");
    }
    SignMatrix(std::initializer_list<std::initializer_list<double>> init) : SignMatrix(RealMatrix(init)) {}

    // F(x,y) = (-1)^f(x,y)
    static SignMatrix from_boolean(std::size_t rows, std::size_t cols, const std::vector<std::uint8_t>& f) {
        if (f.size() != rows * cols) throw DimensionError("SignMatrix: boolean table size mismatch");
        RealMatrix m(rows, cols);
        for (std::size_t i = 0; i < f.size(); ++i) m.data[i] = f[i] ? -1.0 : 1.0;
        return SignMatrix(std::move(m));
    }
};

// Distribution over the entries of a rows x cols matrix, row-major.
inline RealMatrix check_entry_distribution(const RealMatrix& p, std::size_t rows, std::size_t cols) {
    if (p.rows != rows || p.cols != cols) throw DimensionError("entry distribution shape mismatch");
    double s = 0.0;
    for (double v : p.data) {
        if (!(v >= 0.0)) throw DomainError("entry distribution has a negative entry");
        s += v;
    }
    if (std::abs(s - 1.0) > 1e-9) throw DomainError("entry distribution must sum to 1");
    return p;
}

inline RealMatrix hadamard(const RealMatrix& a, const RealMatrix& b) {
    if (a.rows != b.rows || a.cols != b.cols) throw DimensionError("hadamard: shape mismatch");
    RealMatrix c(a.rows, a.cols);
    for (std::size_t i = 0; i < a.size(); ++i) c.data[i] = a.data[i] * b.data[i];
    return c;
}

inline double frobenius_inner(const RealMatrix& a, const RealMatrix& b) {
    if (a.rows != b.rows || a.cols != b.cols) throw DimensionError("frobenius_inner: shape mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a.data[i] * b.data[i];
    return s;
}

struct Gamma2Result {
    enum class Kind { exact_small, lower_bound };
    double value = 0.0;
    Kind kind = Kind::lower_bound;
    std::optional<SignMatrix> maximizer;  // set by gamma2_alpha
};

inline const char* to_string(Gamma2Result::Kind k) {
    return k == Gamma2Result::Kind::exact_small ? "exact_small" : "lower_bound";
}

struct Gamma2Options {
    std::size_t restarts = 50;
    std::size_t max_iters = 2000;
    double grid_step = 1e-3;
    double refine_tol = 1e-7;
    std::uint64_t seed = 0;
};

namespace detail {

// Alternating maximization of sum M[x,y] <u_x, v_y> over unit vectors in R^d.
inline double gamma2_alternating(const RealMatrix& m, std::size_t d, const Gamma2Options& opt) {
    Rng rng = make_rng(opt.seed, 0);
    double best = 0.0;
    std::vector<std::vector<double>> u(m.rows, std::vector<double>(d)), v(m.cols, std::vector<double>(d));
    auto normalize_into = [d](std::vector<double>& dst, const std::vector<double>& src) {
        double n = 0.0;
        for (double t : src) n += t * t;
        n = std::sqrt(n);
        if (n < 1e-300) return;  // keep the previous direction
        for (std::size_t k = 0; k < d; ++k) dst[k] = src[k] / n;
    };
    std::vector<double> acc(d);
    for (std::size_t restart = 0; restart < opt.restarts; ++restart) {
        for (auto& ux : u)
            for (auto& t : ux) t = standard_normal(rng);
        for (auto& ux : u) normalize_into(ux, std::vector<double>(ux));
        for (auto& vy : v)
            for (auto& t : vy) t = standard_normal(rng);
        for (auto& vy : v) normalize_into(vy, std::vector<double>(vy));
        double prev = -1.0;
        for (std::size_t it = 0; it < opt.max_iters; ++it) {
            for (std::size_t y = 0; y < m.cols; ++y) {
                std::fill(acc.begin(), acc.end(), 0.0);
                for (std::size_t x = 0; x < m.rows; ++x)
                    for (std::size_t k = 0; k < d; ++k) acc[k] += m(x, y) * u[x][k];
                normalize_into(v[y], acc);
            }
            double value = 0.0;
            for (std::size_t x = 0; x < m.rows; ++x) {
                std::fill(acc.begin(), acc.end(), 0.0);
                for (std::size_t y = 0; y < m.cols; ++y)
                    for (std::size_t k = 0; k < d; ++k) acc[k] += m(x, y) * v[y][k];
                double n = 0.0;
                for (double t : acc) n += t * t;
                value += std::sqrt(n);
                normalize_into(u[x], acc);
            }
            if (value - prev < 1e-14) {
                prev = std::max(prev, value);
                break;
            }
            prev = value;
        }
        best = std::max(best, prev);
    }
    return best;
}

// Two-row case: u_0 = e_0, u_1 = (cos t, sin t), optimal v_y aligned with
// M[0,y] u_0 + M[1,y] u_1. Reflection symmetry restricts t to [0, pi].
inline double gamma2_two_rows(const RealMatrix& m, const Gamma2Options& opt) {
    auto f = [&](double t) {
        const double c = std::cos(t), s = std::sin(t);
        double total = 0.0;
        for (std::size_t y = 0; y < m.cols; ++y) {
            const double a = m(0, y) + m(1, y) * c, b = m(1, y) * s;
            total += std::hypot(a, b);
        }
        return total;
    };
    const double pi = std::numbers::pi;
    const std::size_t steps = static_cast<std::size_t>(std::ceil(pi / opt.grid_step));
    double best_t = 0.0, best = f(0.0);
    for (std::size_t k = 1; k <= steps; ++k) {
        const double t = std::min(pi, static_cast<double>(k) * opt.grid_step);
        const double v = f(t);
        if (v > best) {
            best = v;
            best_t = t;
        }
    }
    // Golden-section refinement around the best grid point.
    double lo = std::max(0.0, best_t - opt.grid_step), hi = std::min(pi, best_t + opt.grid_step);
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = hi - g * (hi - lo), b = lo + g * (hi - lo);
    double fa = f(a), fb = f(b);
    while (hi - lo > opt.refine_tol) {
        if (fa < fb) {
            lo = a;
            a = b;
            fa = fb;
            b = lo + g * (hi - lo);
            fb = f(b);
        } else {
            hi = b;
            b = a;
            fb = fa;
            a = hi - g * (hi - lo);
            fa = f(a);
        }
    }
    return std::max({best, fa, fb});
}

} // namespace detail

// gamma_2^*(M) = max sum_{x,y} M[x,y] <u_x, v_y> over unit vectors.
// Exact when one side has at most two entries; a restart lower bound otherwise.
inline Gamma2Result gamma2_star(const RealMatrix& m, const Gamma2Options& opt = {}) {
    Gamma2Result r;
    bool zero = true;
    for (double v : m.data) zero &= v == 0.0;
    if (zero || m.size() == 0) {
        r.kind = Gamma2Result::Kind::exact_small;
        return r;
    }
    const RealMatrix a = m.rows <= m.cols ? m : m.transposed();
    const std::size_t d = a.rows;
    if (d == 1) {
        for (double v : a.data) r.value += std::abs(v);
        r.kind = Gamma2Result::Kind::exact_small;
        return r;
    }
    r.value = detail::gamma2_alternating(a, d, opt);
    if (d == 2) {
        r.value = std::max(r.value, detail::gamma2_two_rows(a, opt));
        r.kind = Gamma2Result::Kind::exact_small;
    }
    return r;
}

inline constexpr std::size_t kGamma2AlphaMaxCells = 12;

// gamma_2^alpha(F, p) = max over sign matrices F' of
//   ((alpha+1) <F, F' o p> - (alpha-1)) / (2 gamma_2^*(F' o p)).
// F' are enumerated in binary order (bit k set = entry k is -1); ties keep the first.
inline Gamma2Result gamma2_alpha(const SignMatrix& f, const RealMatrix& p, double alpha, const Gamma2Options& opt = {}) {
    if (!(alpha >= 1.0) || std::isinf(alpha)) throw DomainError("gamma2_alpha: alpha must be finite and >= 1");
    check_entry_distribution(p, f.rows, f.cols);
    const std::size_t cells = f.size();
    if (cells > kGamma2AlphaMaxCells)
        throw BudgetExceeded("gamma2_alpha: " + std::to_string(cells) + " entries exceed the enumeration limit of " +
                             std::to_string(kGamma2AlphaMaxCells));
    Gamma2Result best;
    best.value = -std::numeric_limits<double>::infinity();
    bool all_exact = true;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << cells); ++mask) {
        RealMatrix fp(f.rows, f.cols);
        for (std::size_t k = 0; k < cells; ++k) fp.data[k] = (mask >> k & 1) ? -1.0 : 1.0;
        const RealMatrix fpp = hadamard(fp, p);
        const Gamma2Result g = gamma2_star(fpp, opt);
        if (g.value < 1e-12) continue;
        all_exact &= g.kind == Gamma2Result::Kind::exact_small;
        const double corr = frobenius_inner(f, fpp);
        const double v = ((alpha + 1.0) * corr - (alpha - 1.0)) / (2.0 * g.value);
        if (v > best.value + 1e-12) {
            best.value = v;
            best.maximizer = SignMatrix(fp);
        }
    }
    best.kind = all_exact ? Gamma2Result::Kind::exact_small : Gamma2Result::Kind::lower_bound;
    best.value = std::max(best.value, 0.0);
    return best;
}

// XOR predicate V_f: outputs +1 (index 0) and -1 (index 1), win iff a*b = F(x,y).
inline GamePredicate xor_predicate(const SignMatrix& f, const RealMatrix& p) {
    check_entry_distribution(p, f.rows, f.cols);
    std::vector<LabelSet> inputs{detail::index_labels(f.rows), detail::index_labels(f.cols)};
    std::vector<LabelSet> outputs{{"+1", "-1"}, {"+1", "-1"}};
    std::vector<std::uint8_t> table(4 * f.size());
    for (std::size_t o = 0; o < 4; ++o) {
        const double ab = (o == 0 || o == 3) ? 1.0 : -1.0;
        for (std::size_t i = 0; i < f.size(); ++i) table[o * f.size() + i] = ab == f.data[i];
    }
    return GamePredicate("xor", inputs, outputs, p.data, std::move(table));
}

struct DiscrepancyReport {
    double eps = 0.0;
    double alpha = 1.0;       // +inf at eps = 1/2, where lower = 0
    double lower = 0.0;       // (1 - 2 eps) gamma2_alpha
    double upper = 0.0;       // eff_local, average variant
    Gamma2Result gamma2;
    bool holds = false;       // lower <= upper + 1e-6
};

inline DiscrepancyReport check_thm2(const SignMatrix& f, const RealMatrix& p, double eps, const Gamma2Options& opt = {}) {
    if (!(eps >= 0.0 && eps <= 0.5)) throw DomainError("check_thm2: eps must lie in [0, 1/2]");
    DiscrepancyReport r;
    r.eps = eps;
    r.alpha = eps < 0.5 ? (1.0 + 2.0 * eps) / (1.0 - 2.0 * eps) : std::numeric_limits<double>::infinity();
    if (eps < 0.5) {
        r.gamma2 = gamma2_alpha(f, p, r.alpha, opt);
        r.lower = (1.0 - 2.0 * eps) * r.gamma2.value;
    } else {
        check_entry_distribution(p, f.rows, f.cols);
        r.gamma2.kind = Gamma2Result::Kind::exact_small;
    }
    r.upper = eff_local(xor_predicate(f, p), eps, EffVariant::average).eff;
    r.holds = r.lower <= r.upper + 1e-6;
    return r;
}

} // namespace dptkit
