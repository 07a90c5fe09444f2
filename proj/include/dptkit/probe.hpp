// probe.hpp
// Empirical value of n parallel copies of a game when the players may first
// exchange one round of broadcast messages, comm_bits bits in total.
//
// Protocol: player j sends a b_j-bit message that depends on its own inputs
// (sum b_j = comm_bits), then every player answers from its own inputs and
// the messages it received. All splits of the bits are searched. One player
// (the one with the largest answer space) is best-responded exactly; the rest
// of the protocol is enumerated exhaustively when the space fits the budget,
// otherwise improved by seeded hill-climbing.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "dptkit/errors.hpp"
#include "dptkit/games.hpp"
#include "dptkit/random.hpp"

namespace dptkit {

struct ProbeProtocol {
    std::vector<std::size_t> bits;                   // per player
    std::vector<std::vector<std::size_t>> messages;  // [player][own input]
    // [player][own input * received + received index]; the received index
    // mixes the other players' messages, lowest player most significant.
    std::vector<std::vector<std::size_t>> answers;
};

struct RepetitionProbe {
    enum class Mode { automatic, exhaustive, hill_climb };
    enum class Kind { exhaustive, hill_climb };

    std::size_t n = 1;
    std::size_t comm_bits = 0;
    double search_budget = 1e7;
    std::uint64_t seed = 0;
    Mode mode = Mode::automatic;
    std::size_t restarts = 4;
    std::size_t hill_iters = 3000;

    double best_value = 0.0;
    Kind kind = Kind::exhaustive;
    ProbeProtocol protocol;
};

inline const char* to_string(RepetitionProbe::Kind k) {
    return k == RepetitionProbe::Kind::exhaustive ? "exhaustive" : "hill_climb";
}

inline constexpr std::size_t kProbeMaxBits = 4;

namespace detail {

struct ProbeLayout {
    const GamePredicate* g;
    std::vector<std::size_t> bits, msg_size, recv_size;
    std::size_t responder = 0;
    // Searched digits: message tables of every player, then answer tables of
    // every player except the responder.
    std::vector<std::size_t> radix;
    std::vector<std::size_t> msg_offset, ans_offset;
    double log_space = 0.0;  // log2 of the searched space

    ProbeLayout(const GamePredicate& game, std::vector<std::size_t> b) : g(&game), bits(std::move(b)) {
        const std::size_t l = g->players();
        for (std::size_t j = 0; j < l; ++j) msg_size.push_back(std::size_t{1} << bits[j]);
        for (std::size_t k = 0; k < l; ++k) {
            std::size_t r = 1;
            for (std::size_t j = 0; j < l; ++j)
                if (j != k) r *= msg_size[j];
            recv_size.push_back(r);
        }
        double worst = -1.0;
        for (std::size_t k = 0; k < l; ++k) {
            const double s = static_cast<double>(g->input_size(k) * recv_size[k]) *
                             std::log2(static_cast<double>(g->output_size(k)));
            if (s > worst) {
                worst = s;
                responder = k;
            }
        }
        msg_offset.assign(l, 0);
        ans_offset.assign(l, 0);
        for (std::size_t j = 0; j < l; ++j) {
            msg_offset[j] = radix.size();
            radix.insert(radix.end(), g->input_size(j), msg_size[j]);
            if (msg_size[j] > 1) log_space += static_cast<double>(g->input_size(j)) * bits[j];
        }
        for (std::size_t k = 0; k < l; ++k) {
            ans_offset[k] = radix.size();
            if (k == responder) continue;
            const std::size_t cells = g->input_size(k) * recv_size[k];
            radix.insert(radix.end(), cells, g->output_size(k));
            log_space += static_cast<double>(cells) * std::log2(static_cast<double>(g->output_size(k)));
        }
    }

    std::size_t received(std::size_t k, const std::vector<std::size_t>& msgs) const {
        std::size_t r = 0;
        for (std::size_t j = 0; j < msgs.size(); ++j)
            if (j != k) r = r * msg_size[j] + msgs[j];
        return r;
    }
};

class ProbeEvaluator {
public:
    explicit ProbeEvaluator(const ProbeLayout& lay) : lay_(lay), g_(*lay.g) {
        for (std::size_t i = 0; i < g_.num_inputs(); ++i) xs_.push_back(g_.input_radix().decode(i));
        const std::size_t k = lay_.responder;
        score_.assign(g_.input_size(k) * lay_.recv_size[k] * g_.output_size(k), 0.0);
    }

    // Value with the responder best-responding; fills its answers when asked.
    double value(const std::vector<std::size_t>& d, std::vector<std::size_t>* responder_answers = nullptr) {
        const std::size_t l = g_.players(), br = lay_.responder, na = g_.output_size(br);
        std::fill(score_.begin(), score_.end(), 0.0);
        std::vector<std::size_t> msgs(l);
        for (std::size_t i = 0; i < g_.num_inputs(); ++i) {
            const double p = g_.prob(i);
            if (p == 0.0) continue;
            for (std::size_t j = 0; j < l; ++j) msgs[j] = d[lay_.msg_offset[j] + xs_[i][j]];
            std::size_t base = 0;
            for (std::size_t k = 0; k < l; ++k) {
                if (k == br) continue;
                const std::size_t cell = xs_[i][k] * lay_.recv_size[k] + lay_.received(k, msgs);
                base += d[lay_.ans_offset[k] + cell] * g_.output_radix().stride(k);
            }
            const std::size_t key = xs_[i][br] * lay_.recv_size[br] + lay_.received(br, msgs);
            double* row = &score_[key * na];
            for (std::size_t a = 0; a < na; ++a)
                if (g_.wins(base + a * g_.output_radix().stride(br), i)) row[a] += p;
        }
        double v = 0.0;
        const std::size_t keys = score_.size() / na;
        if (responder_answers) responder_answers->assign(keys, 0);
        for (std::size_t key = 0; key < keys; ++key) {
            std::size_t arg = 0;
            for (std::size_t a = 1; a < na; ++a)
                if (score_[key * na + a] > score_[key * na + arg]) arg = a;
            v += score_[key * na + arg];
            if (responder_answers) (*responder_answers)[key] = arg;
        }
        return v;
    }

private:
    const ProbeLayout& lay_;
    const GamePredicate& g_;
    std::vector<std::vector<std::size_t>> xs_;
    std::vector<double> score_;
};

inline ProbeProtocol make_protocol(const ProbeLayout& lay, const std::vector<std::size_t>& d,
                                   std::vector<std::size_t> responder_answers) {
    const GamePredicate& g = *lay.g;
    ProbeProtocol p;
    p.bits = lay.bits;
    for (std::size_t j = 0; j < g.players(); ++j) {
        const auto m0 = d.begin() + static_cast<std::ptrdiff_t>(lay.msg_offset[j]);
        p.messages.emplace_back(m0, m0 + static_cast<std::ptrdiff_t>(g.input_size(j)));
        if (j == lay.responder) {
            p.answers.push_back(std::move(responder_answers));
        } else {
            const auto a0 = d.begin() + static_cast<std::ptrdiff_t>(lay.ans_offset[j]);
            p.answers.emplace_back(a0, a0 + static_cast<std::ptrdiff_t>(g.input_size(j) * lay.recv_size[j]));
        }
    }
    return p;
}

inline void bit_splits(std::size_t players, std::size_t bits, std::vector<std::size_t>& cur,
                       std::vector<std::vector<std::size_t>>& out) {
    if (cur.size() + 1 == players) {
        cur.push_back(bits);
        out.push_back(cur);
        cur.pop_back();
        return;
    }
    for (std::size_t b = 0; b <= bits; ++b) {
        cur.push_back(b);
        bit_splits(players, bits - b, cur, out);
        cur.pop_back();
    }
}

// Digits of the product of single-copy optimal strategies, messages ignored.
inline std::vector<std::size_t> product_seed(const ProbeLayout& lay, const GamePredicate& base,
                                             const ClassicalStrategy& single, std::size_t n) {
    std::vector<std::size_t> d(lay.radix.size(), 0);
    const GamePredicate& g = *lay.g;
    for (std::size_t k = 0; k < g.players(); ++k) {
        if (k == lay.responder) continue;
        const MixedRadix in_copy(std::vector<std::size_t>(n, base.input_size(k)));
        const MixedRadix out_copy(std::vector<std::size_t>(n, base.output_size(k)));
        for (std::size_t x = 0; x < g.input_size(k); ++x) {
            std::vector<std::size_t> outs(n);
            for (std::size_t c = 0; c < n; ++c) outs[c] = single.maps[k][in_copy.digit(x, c)];
            const std::size_t a = out_copy.encode(outs);
            for (std::size_t r = 0; r < lay.recv_size[k]; ++r) d[lay.ans_offset[k] + x * lay.recv_size[k] + r] = a;
        }
    }
    return d;
}

} // namespace detail

// Searches one-round protocols for n copies of g with comm_bits bits in total.
inline RepetitionProbe empirical_repeated_value(const GamePredicate& g, RepetitionProbe probe) {
    if (probe.n == 0) throw DomainError("empirical_repeated_value: n must be positive");
    if (probe.comm_bits > kProbeMaxBits)
        throw DomainError("empirical_repeated_value: at most " + std::to_string(kProbeMaxBits) + " bits");
    const GamePredicate rep = repeat(g, probe.n);

    std::vector<std::vector<std::size_t>> splits;
    std::vector<std::size_t> cur;
    detail::bit_splits(rep.players(), probe.comm_bits, cur, splits);
    std::vector<detail::ProbeLayout> layouts;
    double total = 0.0;
    for (auto& b : splits) {
        layouts.emplace_back(rep, b);
        total += std::exp2(std::min(layouts.back().log_space, 1100.0));
    }
    bool exhaustive = total <= probe.search_budget;
    if (probe.mode == RepetitionProbe::Mode::exhaustive && !exhaustive)
        throw BudgetExceeded("empirical_repeated_value: protocol space of " + std::to_string(total) +
                             " exceeds budget " + std::to_string(probe.search_budget));
    if (probe.mode == RepetitionProbe::Mode::hill_climb) exhaustive = false;

    probe.best_value = -1.0;
    probe.kind = exhaustive ? RepetitionProbe::Kind::exhaustive : RepetitionProbe::Kind::hill_climb;
    auto consider = [&](const detail::ProbeLayout& lay, detail::ProbeEvaluator& ev, const std::vector<std::size_t>& d,
                        double v) {
        if (v > probe.best_value + 1e-15) {
            std::vector<std::size_t> ans;
            ev.value(d, &ans);
            probe.best_value = v;
            probe.protocol = detail::make_protocol(lay, d, std::move(ans));
        }
    };

    if (exhaustive) {
        for (const auto& lay : layouts) {
            detail::ProbeEvaluator ev(lay);
            std::vector<std::size_t> d(lay.radix.size(), 0);
            while (true) {
                consider(lay, ev, d, ev.value(d));
                std::size_t k = d.size();
                while (k-- > 0) {
                    if (++d[k] < lay.radix[k]) break;
                    d[k] = 0;
                }
                if (k == std::numeric_limits<std::size_t>::max()) break;
            }
        }
    } else {
        std::optional<ClassicalStrategy> single;
        try {
            single = classical_value(g, probe.search_budget).classical;
        } catch (const BudgetExceeded&) {
        }
        for (std::size_t s = 0; s < layouts.size(); ++s) {
            const auto& lay = layouts[s];
            detail::ProbeEvaluator ev(lay);
            for (std::size_t restart = 0; restart < probe.restarts; ++restart) {
                Rng rng = make_rng(probe.seed, s * 1000 + restart);
                std::vector<std::size_t> d(lay.radix.size(), 0);
                if (restart == 0 && single) {
                    d = detail::product_seed(lay, g, *single, probe.n);
                } else {
                    for (std::size_t k = 0; k < d.size(); ++k) d[k] = uniform_index(rng, lay.radix[k]);
                }
                double v = ev.value(d);
                consider(lay, ev, d, v);
                if (d.empty()) continue;
                for (std::size_t it = 0; it < probe.hill_iters; ++it) {
                    const std::size_t k = uniform_index(rng, d.size());
                    if (lay.radix[k] < 2) continue;
                    const std::size_t old = d[k];
                    d[k] = (old + 1 + uniform_index(rng, lay.radix[k] - 1)) % lay.radix[k];
                    const double nv = ev.value(d);
                    if (nv >= v) {
                        v = nv;
                        consider(lay, ev, d, v);
                    } else {
                        d[k] = old;
                    }
                }
            }
        }
    }
    probe.best_value = std::clamp(probe.best_value, 0.0, 1.0);
    return probe;
}

// Replays a protocol on n copies of g.
inline double evaluate_probe_protocol(const GamePredicate& g, std::size_t n, const ProbeProtocol& proto) {
    const GamePredicate rep = repeat(g, n);
    const std::size_t l = rep.players();
    if (proto.bits.size() != l || proto.messages.size() != l || proto.answers.size() != l)
        throw DimensionError("evaluate_probe_protocol: protocol does not match the player count");
    std::vector<std::size_t> msg_size(l);
    for (std::size_t j = 0; j < l; ++j) msg_size[j] = std::size_t{1} << proto.bits[j];
    double v = 0.0;
    std::vector<std::size_t> msgs(l);
    for (std::size_t i = 0; i < rep.num_inputs(); ++i) {
        const auto x = rep.input_radix().decode(i);
        for (std::size_t j = 0; j < l; ++j) msgs[j] = proto.messages[j].at(x[j]);
        std::size_t o = 0;
        for (std::size_t k = 0; k < l; ++k) {
            std::size_t r = 0, rs = 1;
            for (std::size_t j = 0; j < l; ++j)
                if (j != k) {
                    r = r * msg_size[j] + msgs[j];
                    rs *= msg_size[j];
                }
            o += proto.answers[k].at(x[k] * rs + r) * rep.output_radix().stride(k);
        }
        if (rep.wins(o, i)) v += rep.prob(i);
    }
    return v;
}

} // namespace dptkit
