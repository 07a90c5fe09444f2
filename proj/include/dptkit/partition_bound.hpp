// partition_bound.hpp
// Partition-bound relaxations on abort-augmented alphabets.
//
// Every player may output the abort symbol, stored as the extra last index of
// its output alphabet. A correlation "does not abort" on an output tuple when
// no player aborts. For a success tolerance eps the three variants maximize
// the non-abort mass eta:
//
//   worst_case  non-abort mass = eta and success >= (1-eps) eta, per input
//   tilde       non-abort mass = eta per input, p-average success >= (1-eps) eta
//   average     p-average non-abort mass = eta, p-average success >= (1-eps) eta
//
// eff = 1/eta. Optimizing over no-signalling correlations gives a lower bound
// on the entangled partition bound; optimizing over mixtures of deterministic
// strategies (the local polytope) gives an upper bound.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "dptkit/errors.hpp"
#include "dptkit/games.hpp"
#include "dptkit/lp.hpp"

namespace dptkit {

enum class EffVariant { worst_case, tilde, average };
enum class Relaxation { no_signalling, local };

inline const char* to_string(EffVariant v) {
    switch (v) {
    case EffVariant::worst_case: return "worst_case";
    case EffVariant::tilde: return "tilde";
    case EffVariant::average: return "average";
    }
    return "?";
}
inline const char* to_string(Relaxation r) { return r == Relaxation::local ? "local" : "no_signalling"; }

inline EffVariant parse_variant(const std::string& s) {
    if (s == "worst_case" || s == "worst") return EffVariant::worst_case;
    if (s == "tilde") return EffVariant::tilde;
    if (s == "average" || s == "avg") return EffVariant::average;
    throw DomainError("unknown variant '" + s + "' (expected worst_case, tilde or average)");
}
inline Relaxation parse_relaxation(const std::string& s) {
    if (s == "no_signalling" || s == "ns") return Relaxation::no_signalling;
    if (s == "local") return Relaxation::local;
    throw DomainError("unknown relaxation '" + s + "' (expected no_signalling or local)");
}

inline constexpr double kEtaFloor = 1e-9;

struct PartitionBoundResult {
    EffVariant variant;
    Relaxation relaxation;
    double eps = 0.0;
    double eta = 0.0;
    double eff = 0.0;
    bool eta_floored = false;  // optimum was below kEtaFloor and eta was raised to it
    Correlation certificate;   // over abort-augmented alphabets
};

// Abort-augmented output radix and, per augmented output index, the original
// output index (or npos when some player aborts).
struct AbortAlphabet {
    MixedRadix radix;
    std::vector<std::size_t> original;
    static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

    explicit AbortAlphabet(const GamePredicate& g) {
        std::vector<std::size_t> sizes;
        for (std::size_t j = 0; j < g.players(); ++j) sizes.push_back(g.output_size(j) + 1);
        radix = MixedRadix(sizes);
        original.assign(radix.total(), npos);
        for (std::size_t o = 0; o < radix.total(); ++o) {
            std::size_t orig = 0;
            bool aborted = false;
            for (std::size_t j = 0; j < g.players(); ++j) {
                const std::size_t d = radix.digit(o, j);
                if (d == g.output_size(j)) {
                    aborted = true;
                    break;
                }
                orig += d * g.output_radix().stride(j);
            }
            if (!aborted) original[o] = orig;
        }
    }
};

namespace detail {

// Adds no-signalling rows for variables var(in, out) of a correlation with the
// given input/output radices: for every player j, the marginal of the other
// players' outputs must not depend on x_j (compared against x_j = 0).
template <class VarIndex>
void add_no_signalling_rows(LinearProgram& lp, const MixedRadix& in, const MixedRadix& out, VarIndex var) {
    const std::size_t l = in.count();
    if (l < 2) return;
    for (std::size_t j = 0; j < l; ++j) {
        if (in.size(j) < 2) continue;
        // Outputs of the others: enumerate out indices with digit j = 0.
        std::vector<std::size_t> rest;
        for (std::size_t o = 0; o < out.total(); ++o)
            if (out.digit(o, j) == 0) rest.push_back(o);
        for (std::size_t i = 0; i < in.total(); ++i) {
            const std::size_t xj = in.digit(i, j);
            if (xj == 0) continue;
            const std::size_t ref = i - xj * in.stride(j);
            for (auto o0 : rest) {
                std::vector<std::pair<std::size_t, double>> terms;
                for (std::size_t a = 0; a < out.size(j); ++a) {
                    const std::size_t o = o0 + a * out.stride(j);
                    terms.emplace_back(var(i, o), 1.0);
                    terms.emplace_back(var(ref, o), -1.0);
                }
                lp.add_row(std::move(terms), Sense::eq, 0.0);
            }
        }
    }
}

inline void check_eps(double eps) {
    if (!(eps >= 0.0 && eps <= 1.0)) throw DomainError("partition bound: eps must lie in [0,1]");
}

inline PartitionBoundResult finish(EffVariant variant, Relaxation relax, double eps, double eta, Correlation cert) {
    PartitionBoundResult r{variant, relax, eps, eta, 0.0, false, std::move(cert)};
    if (r.eta < kEtaFloor) {
        r.eta = kEtaFloor;
        r.eta_floored = true;
    }
    r.eta = std::min(r.eta, 1.0);
    r.eff = 1.0 / r.eta;
    return r;
}

} // namespace detail

// Partition bound over the no-signalling polytope (lower bound on eff*).
inline PartitionBoundResult eff_ns(const GamePredicate& g, double eps, EffVariant variant,
                                   const LpOptions& opt = {}) {
    detail::check_eps(eps);
    if (g.players() > 3) throw CapabilityError("eff_ns: at most three players are supported");
    const AbortAlphabet aug(g);
    const std::size_t ni = g.num_inputs();
    const std::size_t no = aug.radix.total();
    LinearProgram lp(ni * no + 1);
    const std::size_t eta = ni * no;
    lp.objective[eta] = 1.0;
    auto var = [no](std::size_t i, std::size_t o) { return i * no + o; };

    for (std::size_t i = 0; i < ni; ++i) {
        std::vector<std::pair<std::size_t, double>> terms;
        for (std::size_t o = 0; o < no; ++o) terms.emplace_back(var(i, o), 1.0);
        lp.add_row(std::move(terms), Sense::eq, 1.0);
    }
    detail::add_no_signalling_rows(lp, g.input_radix(), aug.radix, var);

    std::vector<std::pair<std::size_t, double>> avg_mass, avg_success;
    for (std::size_t i = 0; i < ni; ++i) {
        std::vector<std::pair<std::size_t, double>> mass, success;
        for (std::size_t o = 0; o < no; ++o) {
            if (aug.original[o] == AbortAlphabet::npos) continue;
            mass.emplace_back(var(i, o), 1.0);
            if (g.wins(aug.original[o], i)) success.emplace_back(var(i, o), 1.0);
        }
        if (variant == EffVariant::average)
            for (const auto& t : mass) avg_mass.emplace_back(t.first, g.prob(i));
        else {
            mass.emplace_back(eta, -1.0);
            lp.add_row(std::move(mass), Sense::eq, 0.0);
        }
        if (variant == EffVariant::worst_case) {
            success.emplace_back(eta, -(1.0 - eps));
            lp.add_row(std::move(success), Sense::ge, 0.0);
        } else {
            for (const auto& t : success) avg_success.emplace_back(t.first, g.prob(i));
        }
    }
    if (variant == EffVariant::average) {
        avg_mass.emplace_back(eta, -1.0);
        lp.add_row(std::move(avg_mass), Sense::eq, 0.0);
    }
    if (variant != EffVariant::worst_case) {
        avg_success.emplace_back(eta, -(1.0 - eps));
        lp.add_row(std::move(avg_success), Sense::ge, 0.0);
    }

    const LpSolution sol = solve_lp(lp, opt);
    Correlation cert(g.input_radix(), aug.radix);
    for (std::size_t i = 0; i < ni; ++i)
        for (std::size_t o = 0; o < no; ++o) cert.at(o, i) = sol.x[var(i, o)];
    return detail::finish(variant, Relaxation::no_signalling, eps, sol.x[eta], std::move(cert));
}

inline constexpr double kLocalStrategyBudget = 1e7;

// Partition bound over mixtures of deterministic abort-augmented strategies
// (upper bound on eff*). Strategy tuples are grouped by their per-input
// (non-abort, success) pattern, which is all the LP depends on.
inline PartitionBoundResult eff_local(const GamePredicate& g, double eps, EffVariant variant,
                                      double budget = kLocalStrategyBudget, const LpOptions& opt = {}) {
    detail::check_eps(eps);
    const std::size_t l = g.players();
    const AbortAlphabet aug(g);
    double count = 1.0;
    for (std::size_t j = 0; j < l; ++j)
        count *= std::pow(static_cast<double>(g.output_size(j) + 1), static_cast<double>(g.input_size(j)));
    if (count > budget)
        throw BudgetExceeded("eff_local: " + std::to_string(count) + " abort-augmented strategies exceed budget " +
                             std::to_string(budget));

    const std::size_t ni = g.num_inputs();
    std::vector<std::vector<std::size_t>> xs(ni);
    for (std::size_t i = 0; i < ni; ++i) xs[i] = g.input_radix().decode(i);

    // pattern code per input: 0 abort, 1 non-abort failure, 2 non-abort success
    std::unordered_map<std::string, std::size_t> seen;
    std::vector<std::string> patterns;
    std::vector<std::vector<std::vector<std::size_t>>> representative;
    std::vector<std::vector<std::size_t>> maps(l);
    for (std::size_t j = 0; j < l; ++j) maps[j].assign(g.input_size(j), 0);
    std::string code(ni, '0');
    while (true) {
        for (std::size_t i = 0; i < ni; ++i) {
            std::size_t o = 0;
            bool aborted = false;
            for (std::size_t j = 0; j < l && !aborted; ++j) {
                const std::size_t a = maps[j][xs[i][j]];
                if (a == g.output_size(j))
                    aborted = true;
                else
                    o += a * g.output_radix().stride(j);
            }
            code[i] = aborted ? '0' : (g.wins(o, i) ? '2' : '1');
        }
        if (seen.emplace(code, patterns.size()).second) {
            patterns.push_back(code);
            representative.push_back(maps);
        }
        bool advanced = false;
        for (std::size_t j = l; j-- > 0 && !advanced;)
            for (std::size_t x = g.input_size(j); x-- > 0;) {
                if (++maps[j][x] <= g.output_size(j)) {
                    advanced = true;
                    break;
                }
                maps[j][x] = 0;
            }
        if (!advanced) break;
    }

    const std::size_t ns = patterns.size();
    LinearProgram lp(ns + 1);
    const std::size_t eta = ns;
    lp.objective[eta] = 1.0;
    {
        std::vector<std::pair<std::size_t, double>> terms;
        for (std::size_t s = 0; s < ns; ++s) terms.emplace_back(s, 1.0);
        lp.add_row(std::move(terms), Sense::eq, 1.0);
    }
    std::vector<double> avg_mass(ns, 0.0), avg_success(ns, 0.0);
    for (std::size_t i = 0; i < ni; ++i) {
        std::vector<std::pair<std::size_t, double>> mass, success;
        for (std::size_t s = 0; s < ns; ++s) {
            if (patterns[s][i] != '0') {
                mass.emplace_back(s, 1.0);
                avg_mass[s] += g.prob(i);
            }
            if (patterns[s][i] == '2') {
                success.emplace_back(s, 1.0);
                avg_success[s] += g.prob(i);
            }
        }
        if (variant != EffVariant::average) {
            mass.emplace_back(eta, -1.0);
            lp.add_row(std::move(mass), Sense::eq, 0.0);
        }
        if (variant == EffVariant::worst_case) {
            success.emplace_back(eta, -(1.0 - eps));
            lp.add_row(std::move(success), Sense::ge, 0.0);
        }
    }
    auto dense_row = [&](const std::vector<double>& coef, double eta_coef, Sense sense) {
        std::vector<std::pair<std::size_t, double>> terms;
        for (std::size_t s = 0; s < ns; ++s)
            if (coef[s] != 0.0) terms.emplace_back(s, coef[s]);
        terms.emplace_back(eta, eta_coef);
        lp.add_row(std::move(terms), sense, 0.0);
    };
    if (variant == EffVariant::average) dense_row(avg_mass, -1.0, Sense::eq);
    if (variant != EffVariant::worst_case) dense_row(avg_success, -(1.0 - eps), Sense::ge);

    const LpSolution sol = solve_lp(lp, opt);
    Correlation cert(g.input_radix(), aug.radix);
    for (std::size_t s = 0; s < ns; ++s) {
        const double w = sol.x[s];
        if (w <= 0.0) continue;
        for (std::size_t i = 0; i < ni; ++i) {
            std::size_t o = 0;
            for (std::size_t j = 0; j < l; ++j) o += representative[s][j][xs[i][j]] * aug.radix.stride(j);
            cert.at(o, i) += w;
        }
    }
    return detail::finish(variant, Relaxation::local, eps, sol.x[eta], std::move(cert));
}

inline PartitionBoundResult partition_bound(const GamePredicate& g, double eps, EffVariant variant,
                                            Relaxation relax) {
    return relax == Relaxation::local ? eff_local(g, eps, variant) : eff_ns(g, eps, variant);
}

// Re-evaluates a certificate against the variant's constraints.
struct CertificateReplay {
    double eta = 0.0;            // non-abort mass implied by the certificate
    double max_violation = 0.0;  // largest violated constraint (normalization, signalling, success, equal mass)
};

inline CertificateReplay replay_certificate(const GamePredicate& g, const PartitionBoundResult& r) {
    const AbortAlphabet aug(g);
    const Correlation& q = r.certificate;
    if (q.inputs.total() != g.num_inputs() || q.outputs.total() != aug.radix.total())
        throw DimensionError("replay_certificate: certificate shape does not match the game");
    CertificateReplay out;
    double viol = 0.0;
    for (double v : q.q) viol = std::max(viol, -v);

    std::vector<double> mass(g.num_inputs(), 0.0), success(g.num_inputs(), 0.0);
    for (std::size_t i = 0; i < g.num_inputs(); ++i) {
        viol = std::max(viol, std::abs(q.mass(i) - 1.0));
        for (std::size_t o = 0; o < aug.radix.total(); ++o) {
            if (aug.original[o] == AbortAlphabet::npos) continue;
            mass[i] += q.at(o, i);
            if (g.wins(aug.original[o], i)) success[i] += q.at(o, i);
        }
    }
    // No-signalling residuals, via the same row generator.
    LinearProgram ns(q.q.size());
    detail::add_no_signalling_rows(ns, g.input_radix(), aug.radix,
                                   [&](std::size_t i, std::size_t o) { return i * aug.radix.total() + o; });
    viol = std::max(viol, max_violation(ns, q.q));

    double avg_mass = 0.0, avg_success = 0.0;
    for (std::size_t i = 0; i < g.num_inputs(); ++i) {
        avg_mass += g.prob(i) * mass[i];
        avg_success += g.prob(i) * success[i];
    }
    if (r.variant == EffVariant::average) {
        out.eta = avg_mass;
    } else {
        out.eta = mass.empty() ? 0.0 : mass[0];
        for (double m : mass) viol = std::max(viol, std::abs(m - out.eta));
    }
    if (r.variant == EffVariant::worst_case)
        for (std::size_t i = 0; i < g.num_inputs(); ++i)
            viol = std::max(viol, (1.0 - r.eps) * out.eta - success[i]);
    else
        viol = std::max(viol, (1.0 - r.eps) * out.eta - avg_success);
    out.max_violation = viol;
    return out;
}

// Maximum winning probability over no-signalling correlations (no aborts).
//
// Players whose input alphabet is a single symbol are split off first: their
// output distribution cannot depend on any input, and conditioned on their
// output the remaining players still share a no-signalling correlation, so
// the optimum is the best LP value over their deterministic outputs.
struct NsGameValue {
    double value = 0.0;
    Correlation certificate;
};

inline NsGameValue ns_game_value(const GamePredicate& g, const LpOptions& opt = {}) {
    const std::size_t l = g.players();
    std::vector<std::size_t> fixed, free;
    for (std::size_t j = 0; j < l; ++j) (g.input_size(j) == 1 ? fixed : free).push_back(j);
    if (free.empty()) free.push_back(fixed.back()), fixed.pop_back();

    std::vector<std::size_t> fixed_sizes, free_in, free_out;
    for (auto j : fixed) fixed_sizes.push_back(g.output_size(j));
    for (auto j : free) {
        free_in.push_back(g.input_size(j));
        free_out.push_back(g.output_size(j));
    }
    const MixedRadix fixed_radix(fixed_sizes), in_r(free_in), out_r(free_out);
    if (fixed_radix.total() > 100'000) throw BudgetExceeded("ns_game_value: too many singleton-input outputs");

    // Flat input index of the full game for a free-player input index (fixed players have input 0).
    std::vector<std::size_t> full_in(in_r.total(), 0);
    for (std::size_t i = 0; i < in_r.total(); ++i)
        for (std::size_t k = 0; k < free.size(); ++k)
            full_in[i] += in_r.digit(i, k) * g.input_radix().stride(free[k]);

    NsGameValue best{-1.0, Correlation(g.input_radix(), g.output_radix())};
    const std::size_t no = out_r.total();
    for (std::size_t e = 0; e < fixed_radix.total(); ++e) {
        std::size_t fixed_out = 0;
        for (std::size_t k = 0; k < fixed.size(); ++k)
            fixed_out += fixed_radix.digit(e, k) * g.output_radix().stride(fixed[k]);
        auto full_out = [&](std::size_t o) {
            std::size_t idx = fixed_out;
            for (std::size_t k = 0; k < free.size(); ++k) idx += out_r.digit(o, k) * g.output_radix().stride(free[k]);
            return idx;
        };

        LinearProgram lp(in_r.total() * no);
        auto var = [no](std::size_t i, std::size_t o) { return i * no + o; };
        for (std::size_t i = 0; i < in_r.total(); ++i) {
            std::vector<std::pair<std::size_t, double>> terms;
            for (std::size_t o = 0; o < no; ++o) {
                terms.emplace_back(var(i, o), 1.0);
                if (g.wins(full_out(o), full_in[i])) lp.objective[var(i, o)] = g.prob(full_in[i]);
            }
            lp.add_row(std::move(terms), Sense::eq, 1.0);
        }
        detail::add_no_signalling_rows(lp, in_r, out_r, var);
        const LpSolution sol = solve_lp(lp, opt);
        if (sol.value > best.value + 1e-12) {
            best.value = sol.value;
            std::fill(best.certificate.q.begin(), best.certificate.q.end(), 0.0);
            for (std::size_t i = 0; i < in_r.total(); ++i)
                for (std::size_t o = 0; o < no; ++o) best.certificate.at(full_out(o), full_in[i]) = sol.x[var(i, o)];
        }
    }
    best.value = std::clamp(best.value, 0.0, 1.0);
    return best;
}

} // namespace dptkit
