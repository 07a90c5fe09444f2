// diqkd.hpp
// Magic-Square DIQKD with leaky boxes: protocol simulation, key-rate and
// tail-bound evaluators, Serfling Monte Carlo and parameter sweeps.
//
// Randomness streams per run (derived from one seed): 0 Alice, 1 Bob,
// 2 boxes, 3 adversary.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iomanip>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "dptkit/entropy.hpp"
#include "dptkit/errors.hpp"
#include "dptkit/games.hpp"
#include "dptkit/random.hpp"

namespace dptkit {

// Heuristic defaults for the unspecified constants of the security statement.
inline constexpr double kDefaultNu = 0.01;
inline constexpr double kDefaultBeta = 1.0;

// A Magic-Square answer stored as three bits; bit k is position k.
using Answer = std::uint8_t;

inline int answer_bit(Answer a, std::size_t k) { return (a >> k) & 1; }
inline int answer_parity(Answer a) { return answer_bit(a, 0) ^ answer_bit(a, 1) ^ answer_bit(a, 2); }

inline Answer answer_from_label(const std::string& s) {
    Answer a = 0;
    for (std::size_t k = 0; k < 3; ++k)
        if (s.at(k) == '1') a |= static_cast<Answer>(1u << k);
    return a;
}

inline std::string answer_label(Answer a) {
    std::string s(3, '0');
    for (std::size_t k = 0; k < 3; ++k) s[k] = answer_bit(a, k) ? '1' : '0';
    return s;
}

inline bool ms_wins(std::uint8_t x, std::uint8_t y, Answer a, Answer b) { return answer_bit(a, y) == answer_bit(b, x); }

struct ProtocolParams {
    std::size_t n = 1000;
    double alpha = 0.5;
    double gamma = 0.2;
    double delta = 0.0;
    double c = 0.0;  // leakage budget per copy (bits)
    std::uint64_t seed = 0;

    void validate() const {
        if (n == 0) throw DomainError("ProtocolParams: n must be positive");
        if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("ProtocolParams: alpha must lie in (0,1]");
        if (!(gamma > 0.0 && gamma <= 1.0)) throw DomainError("ProtocolParams: gamma must lie in (0,1]");
        if (!(delta >= 0.0 && delta < 0.5)) throw DomainError("ProtocolParams: delta must lie in [0,1/2)");
        if (!(c >= 0.0)) throw DomainError("ProtocolParams: c must be nonnegative");
    }
    // floor, minimum 1
    std::size_t s_size() const { return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(alpha * n))); }
    std::size_t t_size() const {
        return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(gamma * static_cast<double>(s_size()))));
    }
    std::size_t leakage_limit() const { return static_cast<std::size_t>(std::floor(c * static_cast<double>(n))); }
};

class LeakageBudget {
public:
    explicit LeakageBudget(std::size_t limit = 0) : limit_(limit) {}
    std::size_t limit_bits() const { return limit_; }
    std::size_t used_bits() const { return used_; }
    std::size_t remaining() const { return limit_ - used_; }
    void debit(std::size_t bits) {
        if (bits > limit_ - used_)
            throw BudgetExceeded("leakage budget: message of " + std::to_string(bits) + " bits exceeds the remaining " +
                                 std::to_string(limit_ - used_) + " of " + std::to_string(limit_));
        used_ += bits;
    }

private:
    std::size_t limit_;
    std::size_t used_ = 0;
};

enum class Party { alice_box, bob_box, eve };

inline Party parse_party(const std::string& s) {
    if (s == "alice_box" || s == "alice") return Party::alice_box;
    if (s == "bob_box" || s == "bob") return Party::bob_box;
    if (s == "eve") return Party::eve;
    throw DomainError("unknown party '" + s + "'");
}
inline const char* to_string(Party p) {
    switch (p) {
    case Party::alice_box: return "alice_box";
    case Party::bob_box: return "bob_box";
    case Party::eve: return "eve";
    }
    return "?";
}

// A leaked message; payload holds one bit per entry.
struct LeakMessage {
    Party from, to;
    std::string function_id;
    std::vector<std::uint8_t> payload;
};

// Box pair compatible with n copies of the Magic Square game. Inputs are
// entered first, then any leakage rounds run, then outputs are produced.
class BoxPair {
public:
    virtual ~BoxPair() = default;
    virtual void enter_inputs(const std::vector<std::uint8_t>& x, const std::vector<std::uint8_t>& y) = 0;
    // Payload the box `from` emits for a named function, exactly `bits` long.
    virtual std::vector<std::uint8_t> emit(Party from, const std::string& function_id, std::size_t bits) {
        (void)from;
        (void)function_id;
        return std::vector<std::uint8_t>(bits, 0);
    }
    virtual void receive(const LeakMessage&) {}
    virtual void produce(Rng& rng, std::vector<Answer>& a, std::vector<Answer>& b) = 0;
};

namespace detail {

// Per input pair, the joint distribution of (Alice index, Bob index) under the
// canonical perfect strategy, and the answer tables.
struct MsTables {
    std::vector<Answer> alice, bob;
    std::vector<std::vector<double>> joint;  // [x*3+y][ai*4+bi]

    MsTables() {
        const GamePredicate g = magic_square();
        for (const auto& s : g.output_labels(0)) alice.push_back(answer_from_label(s));
        for (const auto& s : g.output_labels(1)) bob.push_back(answer_from_label(s));
        const Correlation q = quantum_correlation(g, canonical_ms_strategy());
        joint.assign(9, std::vector<double>(16, 0.0));
        for (std::size_t i = 0; i < 9; ++i)
            for (std::size_t o = 0; o < 16; ++o) joint[i][o] = std::max(0.0, q.at(o, i));
    }
};

inline const MsTables& ms_tables() {
    static const MsTables t;
    return t;
}

} // namespace detail

// Honest delta-noisy boxes: each copy samples the canonical perfect strategy,
// then with probability 2 delta Bob's answer is replaced by a uniform
// odd-parity answer, so every copy wins with probability exactly 1 - delta.
class HonestBoxes : public BoxPair {
public:
    explicit HonestBoxes(double delta) : delta_(delta) {
        if (!(delta >= 0.0 && delta <= 0.5)) throw DomainError("honest_boxes: delta must lie in [0,1/2]");
    }
    void enter_inputs(const std::vector<std::uint8_t>& x, const std::vector<std::uint8_t>& y) override {
        if (x.size() != y.size()) throw DimensionError("honest_boxes: input lengths differ");
        x_ = x;
        y_ = y;
    }
    void produce(Rng& rng, std::vector<Answer>& a, std::vector<Answer>& b) override {
        const auto& t = detail::ms_tables();
        a.resize(x_.size());
        b.resize(x_.size());
        for (std::size_t i = 0; i < x_.size(); ++i) {
            const std::size_t o = sample_discrete(rng, t.joint[x_[i] * 3 + y_[i]]);
            a[i] = t.alice[o / 4];
            b[i] = t.bob[o % 4];
            // Bob's answer set is exactly the odd-parity strings.
            if (bernoulli(rng, 2.0 * delta_)) b[i] = t.bob[uniform_index(rng, 4)];
        }
    }

private:
    double delta_;
    std::vector<std::uint8_t> x_, y_;
};

inline std::unique_ptr<BoxPair> honest_boxes(double delta) { return std::make_unique<HonestBoxes>(delta); }

// Classical cheating boxes: a fixed optimal deterministic strategy (wins 8 of
// 9 input pairs). Whenever one box has learned the other's input for a copy
// through leakage, it answers that copy so as to win it.
class CheatingBoxes : public BoxPair {
public:
    CheatingBoxes() {
        const GamePredicate g = magic_square();
        const auto best = classical_value(g);
        const auto& t = detail::ms_tables();
        for (std::size_t x = 0; x < 3; ++x) alice_map_[x] = t.alice[best.classical->maps[0][x]];
        for (std::size_t y = 0; y < 3; ++y) bob_map_[y] = t.bob[best.classical->maps[1][y]];
    }
    void enter_inputs(const std::vector<std::uint8_t>& x, const std::vector<std::uint8_t>& y) override {
        x_ = x;
        y_ = y;
        known_x_.assign(x.size(), -1);
        known_y_.assign(y.size(), -1);
        alice_cursor_ = bob_cursor_ = alice_recv_ = bob_recv_ = 0;
    }
    // "alice_inputs" / "bob_inputs": the sender reveals its inputs for the next
    // copies in index order, two bits per copy.
    std::vector<std::uint8_t> emit(Party from, const std::string& function_id, std::size_t bits) override {
        std::vector<std::uint8_t> out(bits, 0);
        const bool alice = from == Party::alice_box && function_id == "alice_inputs";
        const bool bob = from == Party::bob_box && function_id == "bob_inputs";
        if (!alice && !bob) return out;
        const auto& src = alice ? x_ : y_;
        std::size_t& cursor = alice ? alice_cursor_ : bob_cursor_;
        for (std::size_t k = 0; k + 2 <= bits && cursor < src.size(); k += 2, ++cursor) {
            out[k] = src[cursor] & 1;
            out[k + 1] = (src[cursor] >> 1) & 1;
        }
        return out;
    }
    void receive(const LeakMessage& m) override {
        const bool to_bob = m.to == Party::bob_box && m.function_id == "alice_inputs";
        const bool to_alice = m.to == Party::alice_box && m.function_id == "bob_inputs";
        if (!to_bob && !to_alice) return;
        auto& known = to_bob ? known_x_ : known_y_;
        std::size_t& cursor = to_bob ? bob_recv_ : alice_recv_;
        for (std::size_t k = 0; k + 2 <= m.payload.size() && cursor < known.size(); k += 2, ++cursor)
            known[cursor] = m.payload[k] | (m.payload[k + 1] << 1);
    }
    void produce(Rng&, std::vector<Answer>& a, std::vector<Answer>& b) override {
        a.resize(x_.size());
        b.resize(x_.size());
        for (std::size_t i = 0; i < x_.size(); ++i) {
            a[i] = alice_map_[x_[i]];
            b[i] = bob_map_[y_[i]];
            if (ms_wins(x_[i], y_[i], a[i], b[i])) continue;
            if (known_x_[i] >= 0) {
                b[i] = repair(b[i], x_[i]);  // flip b[x] and one other bit
            } else if (known_y_[i] >= 0) {
                a[i] = repair(a[i], y_[i]);
            }
        }
    }
private:
    static Answer repair(Answer v, std::size_t pos) {
        return static_cast<Answer>(v ^ (1u << pos) ^ (1u << ((pos + 1) % 3)));
    }
    Answer alice_map_[3]{}, bob_map_[3]{};
    std::vector<std::uint8_t> x_, y_;
    std::vector<int> known_x_, known_y_;
    std::size_t alice_cursor_ = 0, bob_cursor_ = 0, alice_recv_ = 0, bob_recv_ = 0;
};

// Scripted leakage rounds, run in order between input entry and output production.
struct AdversaryRound {
    Party from = Party::alice_box;
    Party to = Party::bob_box;
    std::size_t bits = 0;
    std::string function_id;
    bool after_outputs = false;
};

struct AdversaryScript {
    std::vector<AdversaryRound> rounds;

    // Test-set cheater: Alice's box reveals its inputs for as many copies as
    // the budget allows, in chunks of at most chunk_bits.
    static AdversaryScript test_set_cheater(std::size_t limit_bits, std::size_t chunk_bits = 64) {
        AdversaryScript s;
        std::size_t left = limit_bits - limit_bits % 2;
        chunk_bits = std::max<std::size_t>(2, chunk_bits - chunk_bits % 2);
        while (left > 0) {
            const std::size_t b = std::min(left, chunk_bits);
            s.rounds.push_back({Party::alice_box, Party::bob_box, b, "alice_inputs", false});
            left -= b;
        }
        return s;
    }
};

struct TranscriptRecord {
    std::vector<std::size_t> S, T;
    std::vector<std::uint8_t> x_S, y_S;
    std::vector<Answer> a_T;
    bool aborted = false;
    std::vector<std::uint8_t> K_A, K_B;  // empty when aborted
    double qber_T = 0.0;                 // mismatch fraction on T
    double mismatch_S = 0.0;             // mismatch fraction on S
    std::size_t matches_T = 0;
    std::size_t leaked_bits = 0;
    std::size_t leakage_limit = 0;

    bool operator==(const TranscriptRecord&) const = default;
};

// Pass iff at least ceil((1 - 2 delta) |T|) test positions match.
inline bool abort_test_passes(std::size_t matches, std::size_t t_size, double delta) {
    const double need = std::ceil((1.0 - 2.0 * delta) * static_cast<double>(t_size) - 1e-9);
    return static_cast<double>(matches) >= need;
}

inline bool abort_test(const std::vector<Answer>& a_T, const std::vector<Answer>& b_T,
                       const std::vector<std::uint8_t>& x_T, const std::vector<std::uint8_t>& y_T, double delta) {
    if (a_T.size() != b_T.size() || a_T.size() != x_T.size() || a_T.size() != y_T.size())
        throw DimensionError("abort_test: index sets are not aligned");
    std::size_t m = 0;
    for (std::size_t i = 0; i < a_T.size(); ++i) m += ms_wins(x_T[i], y_T[i], a_T[i], b_T[i]);
    return abort_test_passes(m, a_T.size(), delta);
}

inline TranscriptRecord run_protocol(const ProtocolParams& params, BoxPair& boxes,
                                     const AdversaryScript* adversary = nullptr) {
    params.validate();
    const std::size_t n = params.n;
    Rng alice = make_rng(params.seed, 0), bob = make_rng(params.seed, 1), box_rng = make_rng(params.seed, 2),
        eve = make_rng(params.seed, 3);
    LeakageBudget budget(params.leakage_limit());

    std::vector<std::uint8_t> x(n), y(n);
    for (auto& v : x) v = static_cast<std::uint8_t>(uniform_index(alice, 3));
    for (auto& v : y) v = static_cast<std::uint8_t>(uniform_index(bob, 3));
    boxes.enter_inputs(x, y);

    auto exchange = [&](const AdversaryRound& r) {
        budget.debit(r.bits);
        LeakMessage m{r.from, r.to, r.function_id, {}};
        if (r.from == Party::eve) {
            m.payload.resize(r.bits);
            for (auto& b : m.payload) b = static_cast<std::uint8_t>(uniform_index(eve, 2));
        } else {
            m.payload = boxes.emit(r.from, r.function_id, r.bits);
            if (m.payload.size() != r.bits) throw ProtocolViolation("box emitted a payload of the wrong length");
        }
        if (r.to != Party::eve) boxes.receive(m);
    };
    if (adversary)
        for (const auto& r : adversary->rounds)
            if (!r.after_outputs) exchange(r);

    std::vector<Answer> a, b;
    boxes.produce(box_rng, a, b);
    if (a.size() != n || b.size() != n) throw ProtocolViolation("boxes produced the wrong number of outputs");
    for (std::size_t i = 0; i < n; ++i)
        if (answer_parity(a[i]) != 0 || answer_parity(b[i]) != 1)
            throw ProtocolViolation("box output violates the Magic Square parity constraint");
    if (adversary)
        for (const auto& r : adversary->rounds)
            if (r.after_outputs)
                throw ProtocolViolation("leakage message from " + std::string(to_string(r.from)) +
                                        " after outputs were fixed");

    TranscriptRecord rec;
    rec.leaked_bits = budget.used_bits();
    rec.leakage_limit = budget.limit_bits();
    rec.S = sample_subset(alice, n, params.s_size());
    const auto t_pos = sample_subset(alice, rec.S.size(), params.t_size());
    for (auto k : t_pos) rec.T.push_back(rec.S[k]);
    for (auto i : rec.S) {
        rec.x_S.push_back(x[i]);
        rec.y_S.push_back(y[i]);
    }
    for (auto i : rec.T) {
        rec.a_T.push_back(a[i]);
        rec.matches_T += ms_wins(x[i], y[i], a[i], b[i]);
    }
    rec.qber_T = 1.0 - static_cast<double>(rec.matches_T) / static_cast<double>(rec.T.size());
    std::size_t mism = 0;
    for (auto i : rec.S) mism += !ms_wins(x[i], y[i], a[i], b[i]);
    rec.mismatch_S = static_cast<double>(mism) / static_cast<double>(rec.S.size());
    rec.aborted = !abort_test_passes(rec.matches_T, rec.T.size(), params.delta);
    if (!rec.aborted)
        for (auto i : rec.S) {
            rec.K_A.push_back(static_cast<std::uint8_t>(answer_bit(a[i], y[i])));
            rec.K_B.push_back(static_cast<std::uint8_t>(answer_bit(b[i], x[i])));
        }
    return rec;
}

// ------------------------------------------------------------------ rates

struct KeyRateParams {
    double alpha = 0.5, gamma = 0.2, delta = 0.0, c = 0.0;
    double nu = kDefaultNu, beta = kDefaultBeta;
    double PrE = 1.0;
    double n = 1000;

    void validate() const {
        if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("key_rate: alpha must lie in (0,1]");
        if (!(gamma >= 0.0 && gamma <= 1.0)) throw DomainError("key_rate: gamma must lie in [0,1]");
        if (!(delta >= 0.0 && delta <= 0.125)) throw DomainError("key_rate: delta must lie in [0,1/8]");
        if (!(c >= 0.0) || !std::isfinite(c)) throw DomainError("key_rate: c must be finite and nonnegative");
        if (!(nu > 0.0 && nu < 1.0) || !(beta > 0.0) || !std::isfinite(beta))
            throw DomainError("key_rate: nu must lie in (0,1) and beta must be positive");
        if (!(PrE > 0.0 && PrE <= 1.0)) throw DomainError("key_rate: PrE must lie in (0,1]");
        if (!(n > 0.0)) throw DomainError("key_rate: n must be positive");
    }
};

struct KeyRate {
    double hmin_minus_h0_bits = 0.0;
    double eps_smooth = 0.0;
    double rate_per_copy = 0.0;
};

// bits = alpha (nu - beta (sqrt c + sqrt alpha) - 2 h2(4 delta) - gamma) n - log2(1/PrE)
// eps' = 2 * 2^(-8 delta^2 alpha n) / PrE
inline KeyRate key_rate(const KeyRateParams& p) {
    p.validate();
    KeyRate r;
    r.hmin_minus_h0_bits =
        p.alpha * (p.nu - p.beta * (std::sqrt(p.c) + std::sqrt(p.alpha)) - 2.0 * binary_entropy(4.0 * p.delta) - p.gamma) *
            p.n +
        std::log2(p.PrE);
    r.eps_smooth = 2.0 * std::exp2(-8.0 * p.delta * p.delta * p.alpha * p.n) / p.PrE;
    r.rate_per_copy = r.hmin_minus_h0_bits / p.n;
    return r;
}

// Upper bound on the honest abort probability: 2^(-2 delta^2 gamma alpha n).
inline double chernoff_abort_bound(double delta, double gamma, double alpha, double n) {
    if (!(delta >= 0.0 && delta <= 0.5) || !(gamma >= 0.0 && gamma <= 1.0) || !(alpha >= 0.0 && alpha <= 1.0) ||
        !(n >= 0.0))
        throw DomainError("chernoff_abort_bound: parameter out of range");
    return std::exp2(-2.0 * delta * delta * gamma * alpha * n);
}

struct SerflingResult {
    double empirical = 0.0;
    double bound = 0.0;
    double stderr_ = 0.0;  // sqrt(p (1 - p) / trials)
    std::size_t trials = 0;
};

// Frequency over uniform T of size floor(gamma n) of
//   sum_{i in T} Z_i >= (1 - eps) gamma n  and  sum_i Z_i < (1 - 2 eps) n,
// against 2^(-2 eps^2 gamma n).
inline SerflingResult serfling_mc(double gamma, double eps, const std::vector<std::uint8_t>& z, std::size_t trials,
                                  std::uint64_t seed) {
    const std::size_t n = z.size();
    if (n == 0) throw DomainError("serfling_mc: empty pattern");
    if (!(gamma > 0.0 && gamma <= 1.0) || !(eps >= 0.0 && eps <= 0.5))
        throw DomainError("serfling_mc: gamma must lie in (0,1] and eps in [0,1/2]");
    if (trials == 0) throw DomainError("serfling_mc: need at least one trial");
    const double dn = static_cast<double>(n);
    SerflingResult r;
    r.trials = trials;
    r.bound = std::exp2(-2.0 * eps * eps * gamma * dn);
    std::size_t ones = 0;
    for (auto v : z) ones += v != 0;
    const std::size_t t = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(gamma * dn)));
    if (static_cast<double>(ones) >= (1.0 - 2.0 * eps) * dn) return r;  // second clause false
    Rng rng = make_rng(seed, 0);
    std::size_t hits = 0;
    for (std::size_t k = 0; k < trials; ++k) {
        std::size_t s = 0;
        for (auto i : sample_subset(rng, n, t)) s += z[i] != 0;
        hits += static_cast<double>(s) >= (1.0 - eps) * gamma * dn;
    }
    r.empirical = static_cast<double>(hits) / static_cast<double>(trials);
    r.stderr_ = std::sqrt(r.empirical * (1.0 - r.empirical) / static_cast<double>(trials));
    return r;
}

// Pattern with the first `ones` entries set.
inline std::vector<std::uint8_t> threshold_pattern(std::size_t n, std::size_t ones) {
    std::vector<std::uint8_t> z(n, 0);
    std::fill(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(std::min(ones, n)), 1);
    return z;
}

// ------------------------------------------------------------------ sweeps

struct SweepCell {
    KeyRateParams rate;
    std::size_t runs = 0;  // honest protocol runs used to estimate Pr[no abort]
};

struct SweepRow {
    SweepCell cell;
    double PrE_est = 1.0;
    double abort_freq = 0.0;
    double qber = 0.0;
    KeyRate rate;
    std::uint64_t seed = 0;
};

inline constexpr const char* kSweepHeader =
    "n,alpha,gamma,delta,c,nu,beta,PrE_est,abort_freq,qber,rate_bits,rate_per_copy,eps_smooth,seed";

// Per cell: with runs > 0, simulate honest boxes and use the empirical
// non-abort frequency for Pr[E] (the configured PrE when every run aborts);
// otherwise use the configured PrE. Cell k uses seed derive_seed(seed, k).
inline std::vector<SweepRow> sweep(const std::vector<SweepCell>& grid, std::uint64_t seed) {
    std::vector<SweepRow> rows;
    rows.reserve(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        SweepRow row;
        row.cell = grid[k];
        row.seed = derive_seed(seed, k);
        KeyRateParams kp = grid[k].rate;
        kp.validate();
        row.PrE_est = kp.PrE;
        if (grid[k].runs > 0) {
            ProtocolParams pp;
            pp.n = static_cast<std::size_t>(kp.n);
            pp.alpha = kp.alpha;
            pp.gamma = std::max(kp.gamma, 1e-12);
            pp.delta = kp.delta;
            std::size_t aborts = 0, tested = 0, mismatched = 0;
            for (std::size_t r = 0; r < grid[k].runs; ++r) {
                pp.seed = derive_seed(row.seed, r);
                HonestBoxes boxes(kp.delta);
                const auto rec = run_protocol(pp, boxes);
                aborts += rec.aborted;
                tested += rec.T.size();
                mismatched += rec.T.size() - rec.matches_T;
            }
            row.abort_freq = static_cast<double>(aborts) / static_cast<double>(grid[k].runs);
            row.qber = static_cast<double>(mismatched) / static_cast<double>(tested);
            if (aborts < grid[k].runs) row.PrE_est = 1.0 - row.abort_freq;
            kp.PrE = row.PrE_est;
        }
        row.rate = key_rate(kp);
        rows.push_back(row);
    }
    return rows;
}

inline std::string format_number(double v, int digits = 15) {
    std::ostringstream os;
    os << std::setprecision(digits) << v;
    return os.str();
}

inline void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
    os << kSweepHeader << '\n';
    for (const auto& r : rows) {
        const auto& p = r.cell.rate;
        os << format_number(p.n) << ',' << format_number(p.alpha) << ',' << format_number(p.gamma) << ','
           << format_number(p.delta) << ',' << format_number(p.c) << ',' << format_number(p.nu) << ','
           << format_number(p.beta) << ',' << format_number(r.PrE_est) << ',' << format_number(r.abort_freq) << ','
           << format_number(r.qber) << ',' << format_number(r.rate.hmin_minus_h0_bits) << ','
           << format_number(r.rate.rate_per_copy) << ',' << format_number(r.rate.eps_smooth) << ',' << r.seed << '\n';
    }
}

} // namespace dptkit
