// games.hpp
// l-player nonlocal games: predicates, classical and quantum strategies,
// exact classical values, see-saw lower bounds on the entangled value,
// repetition and random-subset estimates.
//
// Index conventions. A tuple (t_0, ..., t_{l-1}) over alphabets of sizes
// (s_0, ..., s_{l-1}) is flattened in mixed radix with player 0 most
// significant. Predicate tables are indexed out_idx * num_inputs + in_idx.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dptkit/errors.hpp"
#include "dptkit/linalg.hpp"
#include "dptkit/qcore.hpp"
#include "dptkit/random.hpp"

namespace dptkit {

using LabelSet = std::vector<std::string>;

inline constexpr std::size_t kDensePredicateLimit = 1'000'000;
inline constexpr double kPovmTolerance = 1e-9;

// Saturating product: returns SIZE_MAX on overflow.
inline std::size_t checked_product(std::span<const std::size_t> factors) {
    std::size_t p = 1;
    for (auto f : factors) {
        if (f != 0 && p > std::numeric_limits<std::size_t>::max() / f)
            return std::numeric_limits<std::size_t>::max();
        p *= f;
    }
    return p;
}

class MixedRadix {
public:
    MixedRadix() = default;
    explicit MixedRadix(std::vector<std::size_t> sizes) : sizes_(std::move(sizes)), strides_(sizes_.size()) {
        std::size_t s = 1;
        for (std::size_t k = sizes_.size(); k-- > 0;) {
            strides_[k] = s;
            s *= sizes_[k];
        }
        total_ = checked_product(sizes_);
    }

    std::size_t total() const noexcept { return total_; }
    std::size_t size(std::size_t k) const { return sizes_[k]; }
    std::size_t stride(std::size_t k) const { return strides_[k]; }
    std::size_t count() const noexcept { return sizes_.size(); }
    std::span<const std::size_t> sizes() const noexcept { return sizes_; }

    std::size_t digit(std::size_t index, std::size_t k) const { return index / strides_[k] % sizes_[k]; }

    std::vector<std::size_t> decode(std::size_t index) const {
        std::vector<std::size_t> d(sizes_.size());
        for (std::size_t k = 0; k < sizes_.size(); ++k) d[k] = digit(index, k);
        return d;
    }

    std::size_t encode(std::span<const std::size_t> digits) const {
        std::size_t idx = 0;
        for (std::size_t k = 0; k < sizes_.size(); ++k) idx += digits[k] * strides_[k];
        return idx;
    }

private:
    std::vector<std::size_t> sizes_;
    std::vector<std::size_t> strides_;
    std::size_t total_ = 1;
};

class GamePredicate {
public:
    using Callable = std::function<bool(std::size_t out_idx, std::size_t in_idx)>;

    // Tabulates `v` when the table has at most `dense_limit` entries.
    GamePredicate(std::string name, std::vector<LabelSet> inputs, std::vector<LabelSet> outputs,
                  std::vector<double> p, Callable v, std::size_t dense_limit = kDensePredicateLimit)
        : name_(std::move(name)), inputs_(std::move(inputs)), outputs_(std::move(outputs)), p_(std::move(p)) {
        init_shapes();
        const std::size_t cells = checked_product(std::vector<std::size_t>{num_inputs(), num_outputs()});
        if (cells <= dense_limit) {
            table_.resize(cells);
            for (std::size_t o = 0; o < num_outputs(); ++o)
                for (std::size_t i = 0; i < num_inputs(); ++i) table_[o * num_inputs() + i] = v(o, i) ? 1 : 0;
        } else {
            fn_ = std::move(v);
        }
    }

    GamePredicate(std::string name, std::vector<LabelSet> inputs, std::vector<LabelSet> outputs,
                  std::vector<double> p, std::vector<std::uint8_t> table)
        : name_(std::move(name)), inputs_(std::move(inputs)), outputs_(std::move(outputs)), p_(std::move(p)),
          table_(std::move(table)) {
        init_shapes();
        if (table_.size() != num_inputs() * num_outputs())
            throw DimensionError("GamePredicate: predicate table has " + std::to_string(table_.size()) +
                                 " entries, expected " + std::to_string(num_inputs() * num_outputs()));
    }

    const std::string& name() const noexcept { return name_; }
    std::size_t players() const noexcept { return inputs_.size(); }
    const LabelSet& input_labels(std::size_t j) const { return inputs_.at(j); }
    const LabelSet& output_labels(std::size_t j) const { return outputs_.at(j); }
    std::size_t input_size(std::size_t j) const { return inputs_.at(j).size(); }
    std::size_t output_size(std::size_t j) const { return outputs_.at(j).size(); }
    const MixedRadix& input_radix() const noexcept { return in_radix_; }
    const MixedRadix& output_radix() const noexcept { return out_radix_; }
    std::size_t num_inputs() const noexcept { return in_radix_.total(); }
    std::size_t num_outputs() const noexcept { return out_radix_.total(); }
    std::span<const double> p() const noexcept { return p_; }
    double prob(std::size_t in_idx) const { return p_[in_idx]; }
    bool is_dense() const noexcept { return !fn_; }
    std::span<const std::uint8_t> table() const noexcept { return table_; }

    bool wins(std::size_t out_idx, std::size_t in_idx) const {
        return fn_ ? fn_(out_idx, in_idx) : table_[out_idx * num_inputs() + in_idx] != 0;
    }

    // Local dimension per player that the constructor considers natural for
    // see-saw searches.
    std::vector<std::size_t> suggested_dims;

private:
    void init_shapes() {
        if (inputs_.empty() || inputs_.size() != outputs_.size())
            throw DimensionError("GamePredicate: need one input and one output alphabet per player");
        std::vector<std::size_t> in_sizes, out_sizes;
        for (std::size_t j = 0; j < inputs_.size(); ++j) {
            if (inputs_[j].empty() || outputs_[j].empty())
                throw DimensionError("GamePredicate: empty alphabet for player " + std::to_string(j));
            in_sizes.push_back(inputs_[j].size());
            out_sizes.push_back(outputs_[j].size());
        }
        in_radix_ = MixedRadix(in_sizes);
        out_radix_ = MixedRadix(out_sizes);
        if (p_.size() != num_inputs())
            throw DimensionError("GamePredicate: input distribution has " + std::to_string(p_.size()) +
                                 " entries, expected " + std::to_string(num_inputs()));
        double s = 0.0;
        for (double x : p_) {
            if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError("GamePredicate: negative input probability");
            s += x;
        }
        if (std::abs(s - 1.0) > 1e-9) throw DomainError("GamePredicate: input distribution sums to " + std::to_string(s));
        suggested_dims.assign(inputs_.size(), 2);
    }

    std::string name_;
    std::vector<LabelSet> inputs_;
    std::vector<LabelSet> outputs_;
    std::vector<double> p_;
    MixedRadix in_radix_;
    MixedRadix out_radix_;
    std::vector<std::uint8_t> table_;
    Callable fn_;
};

// ------------------------------------------------------------------ builtins

namespace detail {

inline LabelSet index_labels(std::size_t n) {
    LabelSet s;
    for (std::size_t i = 0; i < n; ++i) s.push_back(std::to_string(i));
    return s;
}

inline std::vector<double> uniform(std::size_t n) { return std::vector<double>(n, 1.0 / static_cast<double>(n)); }

// Bit k of a magic-square row/column string, read as its k-th character.
inline int bit_at(const std::string& s, std::size_t k) { return s[k] - '0'; }

} // namespace detail

inline const LabelSet& ms_alice_outputs() {
    static const LabelSet s{"000", "011", "101", "110"};
    return s;
}
inline const LabelSet& ms_bob_outputs() {
    static const LabelSet s{"001", "010", "100", "111"};
    return s;
}

// Trit inputs x (Alice, row) and y (Bob, column); win iff a[y] = b[x].
inline GamePredicate magic_square() {
    const auto& A = ms_alice_outputs();
    const auto& B = ms_bob_outputs();
    GamePredicate g("magic_square", {detail::index_labels(3), detail::index_labels(3)}, {A, B}, detail::uniform(9),
                    [&](std::size_t o, std::size_t i) {
                        const std::size_t a = o / 4, b = o % 4, x = i / 3, y = i % 3;
                        return detail::bit_at(A[a], y) == detail::bit_at(B[b], x);
                    });
    g.suggested_dims = {4, 4};
    return g;
}

// Three players. Alice gets (x, z) with label "xz", Bob gets y, Eve gets a
// single dummy input and outputs "x'y'z'c". Win iff x = x', y = y', a[y] = c
// and (a[y] = b[x] or z = z').
inline GamePredicate mse() {
    const auto& A = ms_alice_outputs();
    const auto& B = ms_bob_outputs();
    LabelSet alice_in, eve_out;
    for (int x = 0; x < 3; ++x)
        for (int z = 0; z < 2; ++z) alice_in.push_back(std::to_string(x) + std::to_string(z));
    for (int x = 0; x < 3; ++x)
        for (int y = 0; y < 3; ++y)
            for (int z = 0; z < 2; ++z)
                for (int c = 0; c < 2; ++c)
                    eve_out.push_back(std::to_string(x) + std::to_string(y) + std::to_string(z) + std::to_string(c));
    GamePredicate g("mse", {alice_in, detail::index_labels(3), LabelSet{"-"}}, {A, B, eve_out}, detail::uniform(18),
                    [&](std::size_t o, std::size_t i) {
                        const std::size_t e = o % 36, b = (o / 36) % 4, a = o / 144;
                        const std::size_t y = i % 3, xz = i / 3, x = xz / 2, z = xz % 2;
                        const std::size_t ex = e / 12, ey = (e / 4) % 3, ez = (e / 2) % 2, ec = e % 2;
                        const int ay = detail::bit_at(A[a], y);
                        return ex == x && ey == y && ay == static_cast<int>(ec) &&
                               (ay == detail::bit_at(B[b], x) || ez == z);
                    });
    g.suggested_dims = {4, 4, 1};
    return g;
}

inline GamePredicate chsh() {
    return GamePredicate("chsh", {detail::index_labels(2), detail::index_labels(2)},
                         {detail::index_labels(2), detail::index_labels(2)}, detail::uniform(4),
                         [](std::size_t o, std::size_t i) {
                             const std::size_t a = o / 2, b = o % 2, x = i / 2, y = i % 2;
                             return (a ^ b) == (x & y);
                         });
}

inline GamePredicate builtin_game(const std::string& name) {
    if (name == "magic_square") return magic_square();
    if (name == "mse") return mse();
    if (name == "chsh") return chsh();
    throw DomainError("unknown builtin game '" + name + "' (expected magic_square, mse or chsh)");
}

// ----------------------------------------------------------- correlations

// q(a | x) stored at q[in_idx * num_outputs + out_idx].
struct Correlation {
    MixedRadix inputs;
    MixedRadix outputs;
    std::vector<double> q;

    Correlation(MixedRadix in, MixedRadix out)
        : inputs(std::move(in)), outputs(std::move(out)), q(inputs.total() * outputs.total(), 0.0) {}

    double& at(std::size_t out_idx, std::size_t in_idx) { return q[in_idx * outputs.total() + out_idx]; }
    double at(std::size_t out_idx, std::size_t in_idx) const { return q[in_idx * outputs.total() + out_idx]; }

    double mass(std::size_t in_idx) const {
        double s = 0.0;
        for (std::size_t o = 0; o < outputs.total(); ++o) s += at(o, in_idx);
        return s;
    }
};

inline void require_matching(const GamePredicate& g, const Correlation& q) {
    if (q.inputs.total() != g.num_inputs() || q.outputs.total() != g.num_outputs())
        throw DimensionError("correlation shape does not match game '" + g.name() + "'");
}

inline double correlation_value(const GamePredicate& g, const Correlation& q) {
    require_matching(g, q);
    double v = 0.0;
    for (std::size_t i = 0; i < g.num_inputs(); ++i) {
        if (g.prob(i) == 0.0) continue;
        double w = 0.0;
        for (std::size_t o = 0; o < g.num_outputs(); ++o)
            if (g.wins(o, i)) w += q.at(o, i);
        v += g.prob(i) * w;
    }
    return v;
}

// --------------------------------------------------------- classical play

// Per player, the output index chosen for each input index.
struct ClassicalStrategy {
    std::vector<std::vector<std::size_t>> maps;

    std::size_t output_index(const GamePredicate& g, std::size_t in_idx) const {
        std::size_t o = 0;
        for (std::size_t j = 0; j < maps.size(); ++j)
            o += maps[j][g.input_radix().digit(in_idx, j)] * g.output_radix().stride(j);
        return o;
    }
};

inline void validate(const GamePredicate& g, const ClassicalStrategy& s) {
    if (s.maps.size() != g.players()) throw DimensionError("classical strategy: wrong player count");
    for (std::size_t j = 0; j < g.players(); ++j) {
        if (s.maps[j].size() != g.input_size(j)) throw DimensionError("classical strategy: map is not total");
        for (auto a : s.maps[j])
            if (a >= g.output_size(j)) throw DimensionError("classical strategy: output index out of range");
    }
}

inline double evaluate_classical_strategy(const GamePredicate& g, const ClassicalStrategy& s) {
    validate(g, s);
    double v = 0.0;
    for (std::size_t i = 0; i < g.num_inputs(); ++i)
        if (g.prob(i) > 0.0 && g.wins(s.output_index(g, i), i)) v += g.prob(i);
    return v;
}

inline Correlation classical_correlation(const GamePredicate& g, const ClassicalStrategy& s) {
    validate(g, s);
    Correlation q(g.input_radix(), g.output_radix());
    for (std::size_t i = 0; i < g.num_inputs(); ++i) q.at(s.output_index(g, i), i) = 1.0;
    return q;
}

// --------------------------------------------------------- quantum play

// Applies `m` to subsystem `j` of `v`.
inline CVector apply_local(std::span<const cplx> v, const SubsystemSpec& spec, std::size_t j,
                           const ComplexMatrix& m) {
    const auto dims = spec.dims();
    std::size_t lo = 1;
    for (std::size_t k = j + 1; k < dims.size(); ++k) lo *= dims[k];
    const std::size_t d = dims[j];
    const std::size_t hi = v.size() / (lo * d);
    CVector out(v.size(), cplx{0.0, 0.0});
    for (std::size_t h = 0; h < hi; ++h)
        for (std::size_t r = 0; r < d; ++r)
            for (std::size_t c = 0; c < d; ++c) {
                const cplx mrc = m(r, c);
                if (mrc == cplx{0.0, 0.0}) continue;
                const std::size_t src = (h * d + c) * lo;
                const std::size_t dst = (h * d + r) * lo;
                for (std::size_t l = 0; l < lo; ++l) out[dst + l] += mrc * v[src + l];
            }
    return out;
}

// Tr_{all but j} |phi><psi|
inline ComplexMatrix reduced_outer(std::span<const cplx> phi, std::span<const cplx> psi, const SubsystemSpec& spec,
                                   std::size_t j) {
    const auto dims = spec.dims();
    std::size_t lo = 1;
    for (std::size_t k = j + 1; k < dims.size(); ++k) lo *= dims[k];
    const std::size_t d = dims[j];
    const std::size_t hi = phi.size() / (lo * d);
    ComplexMatrix out(d, d);
    for (std::size_t h = 0; h < hi; ++h)
        for (std::size_t r = 0; r < d; ++r)
            for (std::size_t c = 0; c < d; ++c) {
                cplx s{0.0, 0.0};
                for (std::size_t l = 0; l < lo; ++l) s += phi[(h * d + r) * lo + l] * std::conj(psi[(h * d + c) * lo + l]);
                out(r, c) += s;
            }
    return out;
}

// Shared pure state, one subsystem per player, and a POVM per player and input.
struct QuantumStrategy {
    PureState state;
    SubsystemSpec spec;
    std::vector<std::vector<std::vector<ComplexMatrix>>> povms;  // [player][input][output]

    QuantumStrategy(PureState psi, SubsystemSpec s, std::vector<std::vector<std::vector<ComplexMatrix>>> m)
        : state(std::move(psi)), spec(std::move(s)), povms(std::move(m)) {
        if (spec.total() != state.dim()) throw DimensionError("QuantumStrategy: subsystem dims do not match state");
        if (povms.size() != spec.count()) throw DimensionError("QuantumStrategy: need one subsystem per player");
        for (std::size_t j = 0; j < povms.size(); ++j) {
            const std::size_t d = spec.dims()[j];
            for (const auto& povm : povms[j]) {
                ComplexMatrix total(d, d);
                for (const auto& e : povm) {
                    if (e.rows() != d || e.cols() != d)
                        throw DimensionError("QuantumStrategy: POVM element has the wrong dimension");
                    if (!e.is_hermitian(kPovmTolerance) || min_eigenvalue(e.hermitian_part()) < -kPovmTolerance)
                        throw DomainError("QuantumStrategy: POVM element is not positive semidefinite");
                    total += e;
                }
                if ((total - ComplexMatrix::identity(d)).max_abs() > kPovmTolerance)
                    throw DomainError("QuantumStrategy: POVM elements do not sum to the identity");
            }
        }
    }
};

inline void require_matching(const GamePredicate& g, const QuantumStrategy& s) {
    if (s.povms.size() != g.players()) throw DimensionError("quantum strategy: wrong player count");
    for (std::size_t j = 0; j < g.players(); ++j) {
        if (s.povms[j].size() != g.input_size(j)) throw DimensionError("quantum strategy: wrong input count");
        for (const auto& povm : s.povms[j])
            if (povm.size() != g.output_size(j)) throw DimensionError("quantum strategy: wrong outcome count");
    }
}

inline Correlation quantum_correlation(const GamePredicate& g, const QuantumStrategy& s) {
    require_matching(g, s);
    Correlation q(g.input_radix(), g.output_radix());
    const auto psi = s.state.amplitudes();
    for (std::size_t i = 0; i < g.num_inputs(); ++i) {
        const auto x = g.input_radix().decode(i);
        for (std::size_t o = 0; o < g.num_outputs(); ++o) {
            const auto a = g.output_radix().decode(o);
            CVector phi(psi.begin(), psi.end());
            for (std::size_t j = 0; j < g.players(); ++j) phi = apply_local(phi, s.spec, j, s.povms[j][x[j]][a[j]]);
            q.at(o, i) = std::max(0.0, std::real(inner(psi, phi)));
        }
    }
    return q;
}

// sum_x p(x) sum_{a : V(a,x)} <psi| (x)_j M^j_{a_j|x_j} |psi>
inline double evaluate_quantum_strategy(const GamePredicate& g, const QuantumStrategy& s) {
    require_matching(g, s);
    const auto psi = s.state.amplitudes();
    double v = 0.0;
    for (std::size_t i = 0; i < g.num_inputs(); ++i) {
        if (g.prob(i) == 0.0) continue;
        const auto x = g.input_radix().decode(i);
        for (std::size_t o = 0; o < g.num_outputs(); ++o) {
            if (!g.wins(o, i)) continue;
            const auto a = g.output_radix().decode(o);
            CVector phi(psi.begin(), psi.end());
            for (std::size_t j = 0; j < g.players(); ++j) phi = apply_local(phi, s.spec, j, s.povms[j][x[j]][a[j]]);
            v += g.prob(i) * std::real(inner(psi, phi));
        }
    }
    return v;
}

// ----------------------------------------------------------------- results

struct GameValueResult {
    enum class Kind { exact, lower_bound };
    double value = 0.0;
    Kind kind = Kind::exact;
    std::optional<ClassicalStrategy> classical;
    std::optional<QuantumStrategy> quantum;
    // Per restart, the value after each see-saw iteration.
    std::vector<std::vector<double>> history;
};

inline const char* to_string(GameValueResult::Kind k) {
    return k == GameValueResult::Kind::exact ? "exact" : "lower_bound";
}

inline constexpr double kClassicalBudget = 1e8;

// Exact classical value. Enumerates deterministic strategies of players
// 0..l-2 in lexicographic order and best-responds the last player; the
// certificate is the lexicographically first optimal strategy tuple.
inline GameValueResult classical_value(const GamePredicate& g, double budget = kClassicalBudget) {
    const std::size_t l = g.players();
    double total = 1.0;
    for (std::size_t j = 0; j < l; ++j)
        total *= std::pow(static_cast<double>(g.output_size(j)), static_cast<double>(g.input_size(j)));
    if (total > budget)
        throw BudgetExceeded("classical_value: " + std::to_string(total) + " deterministic strategies exceed budget " +
                             std::to_string(budget));

    const std::size_t last = l - 1;
    const std::size_t nx_last = g.input_size(last);
    const std::size_t na_last = g.output_size(last);
    const std::size_t last_stride = g.output_radix().stride(last);

    std::vector<std::vector<std::size_t>> xs(g.num_inputs());
    for (std::size_t i = 0; i < g.num_inputs(); ++i) xs[i] = g.input_radix().decode(i);

    std::vector<std::vector<std::size_t>> maps(l);
    for (std::size_t j = 0; j < l; ++j) maps[j].assign(g.input_size(j), 0);

    GameValueResult best;
    best.value = -1.0;
    std::vector<double> score(nx_last * na_last);
    while (true) {
        std::fill(score.begin(), score.end(), 0.0);
        for (std::size_t i = 0; i < g.num_inputs(); ++i) {
            const double pi = g.prob(i);
            if (pi == 0.0) continue;
            std::size_t base = 0;
            for (std::size_t j = 0; j < last; ++j) base += maps[j][xs[i][j]] * g.output_radix().stride(j);
            double* row = &score[xs[i][last] * na_last];
            for (std::size_t a = 0; a < na_last; ++a)
                if (g.wins(base + a * last_stride, i)) row[a] += pi;
        }
        double v = 0.0;
        for (std::size_t x = 0; x < nx_last; ++x) {
            std::size_t arg = 0;
            for (std::size_t a = 1; a < na_last; ++a)
                if (score[x * na_last + a] > score[x * na_last + arg]) arg = a;
            maps[last][x] = arg;
            v += score[x * na_last + arg];
        }
        if (v > best.value + 1e-15) {
            best.value = v;
            best.classical = ClassicalStrategy{maps};
        }
        // Odometer over the enumerated players; the last digit varies fastest.
        bool advanced = false;
        for (std::size_t j = last; j-- > 0 && !advanced;)
            for (std::size_t x = g.input_size(j); x-- > 0;) {
                if (++maps[j][x] < g.output_size(j)) {
                    advanced = true;
                    break;
                }
                maps[j][x] = 0;
            }
        if (!advanced) break;
    }
    best.value = std::clamp(best.value, 0.0, 1.0);
    best.kind = GameValueResult::Kind::exact;
    return best;
}

// ------------------------------------------------------- canonical strategy

namespace detail {

inline ComplexMatrix pauli(char c) {
    ComplexMatrix m(2, 2);
    switch (c) {
    case 'I': m(0, 0) = 1.0; m(1, 1) = 1.0; break;
    case 'X': m(0, 1) = 1.0; m(1, 0) = 1.0; break;
    case 'Y': m(0, 1) = cplx{0.0, -1.0}; m(1, 0) = cplx{0.0, 1.0}; break;
    case 'Z': m(0, 0) = 1.0; m(1, 1) = -1.0; break;
    default: throw DomainError("pauli: unknown label");
    }
    return m;
}

inline ComplexMatrix two_qubit(const char* ops, double sign = 1.0) {
    return tensor(pauli(ops[0]), pauli(ops[1])) * sign;
}

// Mermin-Peres square; every row multiplies to +I, every column to -I.
inline std::vector<std::vector<ComplexMatrix>> mermin_peres_square() {
    return {{two_qubit("XI"), two_qubit("IX"), two_qubit("XX")},
            {two_qubit("IZ"), two_qubit("ZI"), two_qubit("ZZ")},
            {two_qubit("XZ", -1.0), two_qubit("ZX", -1.0), two_qubit("YY")}};
}

// prod_k (I + (-1)^{s[k]} O_k) / 2
inline ComplexMatrix joint_eigenprojector(const std::vector<ComplexMatrix>& observables, const std::string& bits) {
    ComplexMatrix p = ComplexMatrix::identity(4);
    for (std::size_t k = 0; k < observables.size(); ++k) {
        const double sign = bits[k] == '0' ? 1.0 : -1.0;
        p = p * ((ComplexMatrix::identity(4) + observables[k] * sign) * 0.5);
    }
    return p.hermitian_part();
}

} // namespace detail

// Alice measures row x of the square, Bob column y, on two maximally
// entangled qubit pairs. All observables are real symmetric, so Bob can use
// them unchanged.
inline QuantumStrategy canonical_ms_strategy() {
    const auto square = detail::mermin_peres_square();
    std::vector<std::vector<ComplexMatrix>> alice(3), bob(3);
    for (std::size_t x = 0; x < 3; ++x)
        for (const auto& a : ms_alice_outputs()) alice[x].push_back(detail::joint_eigenprojector(square[x], a));
    for (std::size_t y = 0; y < 3; ++y) {
        const std::vector<ComplexMatrix> column{square[0][y], square[1][y], square[2][y]};
        for (const auto& b : ms_bob_outputs()) bob[y].push_back(detail::joint_eigenprojector(column, b));
    }
    CVector phi(16, cplx{0.0, 0.0});
    for (std::size_t k = 0; k < 4; ++k) phi[k * 4 + k] = 0.5;
    return QuantumStrategy(PureState(phi), SubsystemSpec({4, 4}), {alice, bob});
}

// --------------------------------------------------------------- see-saw

struct SeesawOptions {
    std::size_t restarts = 20;
    std::size_t max_iters = 500;
    double tol = 1e-9;
    std::uint64_t seed = 0;
};

namespace detail {

// Random projective measurement: each basis vector of a Haar-random basis is
// assigned to a uniformly random outcome.
inline std::vector<ComplexMatrix> random_projective(Rng& rng, std::size_t d, std::size_t outcomes) {
    const ComplexMatrix u = random_unitary(rng, d);
    std::vector<ComplexMatrix> povm(outcomes, ComplexMatrix(d, d));
    for (std::size_t k = 0; k < d; ++k) {
        CVector v(d);
        for (std::size_t r = 0; r < d; ++r) v[r] = u(r, k);
        povm[uniform_index(rng, outcomes)] += ComplexMatrix::outer(v);
    }
    return povm;
}

// Improves one POVM against effective operators omega[a] (objective
// sum_a Tr(M_a omega_a)) by exact optimization over every pair of outcomes:
// with S = M_a + M_b fixed, the best split is M_a = S^1/2 P S^1/2 with P the
// positive projector of S^1/2 (omega_a - omega_b) S^1/2. Repeats until no
// pair gains more than tol.
inline void improve_povm(std::vector<ComplexMatrix>& povm, const std::vector<ComplexMatrix>& omega, double tol) {
    const std::size_t n = povm.size();
    for (int sweep = 0; sweep < 200; ++sweep) {
        bool improved = false;
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = a + 1; b < n; ++b) {
                const ComplexMatrix s = (povm[a] + povm[b]).hermitian_part();
                const ComplexMatrix root = sqrt_psd(s);
                const ComplexMatrix proj = positive_projector((root * (omega[a] - omega[b]) * root).hermitian_part());
                const ComplexMatrix ma = (root * proj * root).hermitian_part();
                const ComplexMatrix mb = (s - ma).hermitian_part();
                const double before = hs_inner(povm[a], omega[a]).real() + hs_inner(povm[b], omega[b]).real();
                const double after = hs_inner(ma, omega[a]).real() + hs_inner(mb, omega[b]).real();
                if (after > before + tol) {
                    povm[a] = ma;
                    povm[b] = mb;
                    improved = true;
                }
            }
        if (!improved) return;
    }
}

} // namespace detail

// Heuristic lower bound on the entangled value by alternating optimization:
// the state becomes the top eigenvector of the winning operator, then each
// player's measurements are improved with the others held fixed. Every step
// is non-decreasing, so each restart's history is monotone.
inline GameValueResult seesaw(const GamePredicate& g, std::vector<std::size_t> dims, const SeesawOptions& opt = {}) {
    const std::size_t l = g.players();
    if (dims.empty()) dims = g.suggested_dims;
    if (dims.size() != l) throw DimensionError("seesaw: need one local dimension per player");
    for (auto d : dims)
        if (d == 0) throw DomainError("seesaw: local dimensions must be >= 1");
    const SubsystemSpec spec(dims);
    const std::size_t dim = spec.total();
    if (dim > 64) throw BudgetExceeded("seesaw: total dimension " + std::to_string(dim) + " exceeds 64");

    std::vector<std::vector<std::size_t>> xs(g.num_inputs()), as(g.num_outputs());
    for (std::size_t i = 0; i < g.num_inputs(); ++i) xs[i] = g.input_radix().decode(i);
    for (std::size_t o = 0; o < g.num_outputs(); ++o) as[o] = g.output_radix().decode(o);
    std::vector<std::pair<std::size_t, std::size_t>> winning;  // (in, out) with p > 0
    for (std::size_t i = 0; i < g.num_inputs(); ++i)
        if (g.prob(i) > 0.0)
            for (std::size_t o = 0; o < g.num_outputs(); ++o)
                if (g.wins(o, i)) winning.emplace_back(i, o);

    GameValueResult best;
    best.kind = GameValueResult::Kind::lower_bound;
    best.value = -1.0;
    for (std::size_t r = 0; r < std::max<std::size_t>(opt.restarts, 1); ++r) {
        Rng rng = make_rng(opt.seed, r);
        CVector psi = random_unit_vector(rng, dim);
        std::vector<std::vector<std::vector<ComplexMatrix>>> povms(l);
        for (std::size_t j = 0; j < l; ++j)
            for (std::size_t x = 0; x < g.input_size(j); ++x)
                povms[j].push_back(detail::random_projective(rng, dims[j], g.output_size(j)));

        std::vector<double> history;
        double value = -1.0;
        for (std::size_t it = 0; it < opt.max_iters; ++it) {
            // State update.
            ComplexMatrix w(dim, dim);
            for (const auto& [i, o] : winning) {
                std::vector<ComplexMatrix> factors;
                for (std::size_t j = 0; j < l; ++j) factors.push_back(povms[j][xs[i][j]][as[o][j]]);
                w += tensor(factors) * g.prob(i);
            }
            const HermitianEigen e = eigh(w.hermitian_part());
            psi = e.vector(dim - 1);

            // Measurement updates, one player at a time.
            for (std::size_t j = 0; j < l; ++j) {
                std::vector<std::vector<ComplexMatrix>> omega(g.input_size(j),
                                                              std::vector<ComplexMatrix>(g.output_size(j),
                                                                                         ComplexMatrix(dims[j], dims[j])));
                for (const auto& [i, o] : winning) {
                    CVector phi = psi;
                    for (std::size_t k = 0; k < l; ++k)
                        if (k != j) phi = apply_local(phi, spec, k, povms[k][xs[i][k]][as[o][k]]);
                    omega[xs[i][j]][as[o][j]] += reduced_outer(phi, psi, spec, j) * g.prob(i);
                }
                for (std::size_t x = 0; x < g.input_size(j); ++x) {
                    for (auto& m : omega[x]) m = m.hermitian_part();
                    detail::improve_povm(povms[j][x], omega[x], opt.tol * 1e-3);
                }
            }

            double v = 0.0;
            for (const auto& [i, o] : winning) {
                CVector phi = psi;
                for (std::size_t k = 0; k < l; ++k) phi = apply_local(phi, spec, k, povms[k][xs[i][k]][as[o][k]]);
                v += g.prob(i) * std::real(inner(psi, phi));
            }
            history.push_back(v);
            const bool converged = v - value < opt.tol;
            value = v;
            if (converged) break;
        }
        if (value > best.value) {
            // Re-symmetrize accumulated rounding before handing out a certificate.
            for (auto& player : povms)
                for (auto& povm : player) {
                    ComplexMatrix total(povm.front().rows(), povm.front().cols());
                    for (auto& m : povm) total += (m = m.hermitian_part());
                    povm.back() += ComplexMatrix::identity(total.rows()) - total;
                }
            best.value = value;
            best.quantum.emplace(PureState::normalized(psi), spec, povms);
        }
        best.history.push_back(std::move(history));
    }
    best.value = std::clamp(best.value, 0.0, 1.0);
    return best;
}

// ---------------------------------------------------------------- repetition

// n independent copies: product input distribution, conjunction of predicates.
// Player j's labels in the repeated game are its per-copy labels joined by ','.
inline GamePredicate repeat(const GamePredicate& g, std::size_t n, std::size_t dense_limit = kDensePredicateLimit) {
    if (n == 0) throw DomainError("repeat: need at least one copy");
    if (n == 1) return g;
    const std::size_t l = g.players();

    std::vector<MixedRadix> in_copy(l), out_copy(l);
    std::vector<LabelSet> inputs(l), outputs(l);
    auto joined = [n](const LabelSet& base, const MixedRadix& r) {
        if (r.total() > 10'000'000) throw BudgetExceeded("repeat: per-player alphabet too large");
        LabelSet out;
        out.reserve(r.total());
        for (std::size_t idx = 0; idx < r.total(); ++idx) {
            std::string s;
            for (std::size_t k = 0; k < n; ++k) {
                if (k) s += ',';
                s += base[r.digit(idx, k)];
            }
            out.push_back(std::move(s));
        }
        return out;
    };
    for (std::size_t j = 0; j < l; ++j) {
        in_copy[j] = MixedRadix(std::vector<std::size_t>(n, g.input_size(j)));
        out_copy[j] = MixedRadix(std::vector<std::size_t>(n, g.output_size(j)));
        if (in_copy[j].total() == std::numeric_limits<std::size_t>::max() ||
            out_copy[j].total() == std::numeric_limits<std::size_t>::max())
            throw BudgetExceeded("repeat: alphabet size overflows");
        inputs[j] = joined(g.input_labels(j), in_copy[j]);
        outputs[j] = joined(g.output_labels(j), out_copy[j]);
    }
    std::vector<std::size_t> in_sizes, out_sizes;
    for (std::size_t j = 0; j < l; ++j) {
        in_sizes.push_back(inputs[j].size());
        out_sizes.push_back(outputs[j].size());
    }
    const MixedRadix in_rep(in_sizes), out_rep(out_sizes);
    if (in_rep.total() > 100'000'000) throw BudgetExceeded("repeat: input table too large");

    // Base-game flat index of copy k, given the repeated flat index.
    auto split = [l, n](std::size_t idx, const MixedRadix& rep, const std::vector<MixedRadix>& per_copy,
                        const MixedRadix& base) {
        std::vector<std::size_t> copies(n, 0);
        for (std::size_t j = 0; j < l; ++j) {
            const std::size_t pj = rep.digit(idx, j);
            for (std::size_t k = 0; k < n; ++k) copies[k] += per_copy[j].digit(pj, k) * base.stride(j);
        }
        return copies;
    };

    std::vector<double> p(in_rep.total(), 1.0);
    for (std::size_t i = 0; i < in_rep.total(); ++i)
        for (auto c : split(i, in_rep, in_copy, g.input_radix())) p[i] *= g.prob(c);

    GamePredicate::Callable v = [g, in_rep, out_rep, in_copy, out_copy, split, n](std::size_t o, std::size_t i) {
        const auto ic = split(i, in_rep, in_copy, g.input_radix());
        const auto oc = split(o, out_rep, out_copy, g.output_radix());
        for (std::size_t k = 0; k < n; ++k)
            if (!g.wins(oc[k], ic[k])) return false;
        return true;
    };
    GamePredicate rep(g.name() + "^" + std::to_string(n), std::move(inputs), std::move(outputs), std::move(p),
                      std::move(v), dense_limit);
    rep.suggested_dims.clear();
    for (auto d : g.suggested_dims) rep.suggested_dims.push_back(static_cast<std::size_t>(std::pow(d, n)));
    return rep;
}

// Samples per-copy output indices for n copies given per-copy input indices.
using RepeatedSampler = std::function<std::vector<std::size_t>(Rng&, std::span<const std::size_t> inputs)>;

// Plays every copy independently with the same single-copy correlation.
inline RepeatedSampler product_sampler(const Correlation& q) {
    return [q](Rng& rng, std::span<const std::size_t> inputs) {
        std::vector<std::size_t> out;
        out.reserve(inputs.size());
        for (auto i : inputs)
            out.push_back(sample_discrete(
                rng, std::span<const double>(q.q.data() + i * q.outputs.total(), q.outputs.total())));
        return out;
    };
}

// Monte Carlo estimate of Pr[V holds on every copy of a uniformly random
// t-subset of the n copies], including the subset randomness.
inline double random_subset_value(const GamePredicate& g, std::size_t n, std::size_t t, const RepeatedSampler& sampler,
                                  std::size_t trials, std::uint64_t seed) {
    if (t > n) throw DomainError("random_subset_value: t exceeds n");
    if (t == 0) return 1.0;
    if (trials == 0) throw DomainError("random_subset_value: need at least one trial");
    Rng rng = make_rng(seed, 0);
    std::size_t wins = 0;
    std::vector<std::size_t> inputs(n);
    for (std::size_t trial = 0; trial < trials; ++trial) {
        for (auto& x : inputs) x = sample_discrete(rng, g.p());
        const auto outputs = sampler(rng, inputs);
        const auto subset = sample_subset(rng, n, t);
        bool ok = true;
        for (auto k : subset)
            if (!g.wins(outputs[k], inputs[k])) {
                ok = false;
                break;
            }
        wins += ok ? 1 : 0;
    }
    return static_cast<double>(wins) / static_cast<double>(trials);
}

} // namespace dptkit
