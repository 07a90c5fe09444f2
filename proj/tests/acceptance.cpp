// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "dptkit/diqkd.hpp"
#include "dptkit/dpt.hpp"
#include "dptkit/entropy.hpp"
#include "dptkit/games.hpp"
#include "dptkit/gamma2.hpp"
#include "dptkit/partition_bound.hpp"
#include "dptkit/probe.hpp"
#include "dptkit/qcore.hpp"
#include "dptkit/random.hpp"

#ifndef DPTKIT_CLI_PATH
#define DPTKIT_CLI_PATH ""
#endif

using namespace dptkit;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v, int digits = 10) {
    std::ostringstream os;
    os.precision(digits);
    os << v;
    return os.str();
}

// ---------------------------------------------------------------- 1

Outcome exact_game_values() {
    const auto t0 = Clock::now();
    const double ms = classical_value(magic_square()).value;
    const double q = evaluate_quantum_strategy(magic_square(), canonical_ms_strategy());
    const double ch = classical_value(chsh()).value;
    SeesawOptions opt;
    opt.seed = 1;
    const double ss = seesaw(chsh(), {2, 2}, opt).value;
    const double dt = seconds_since(t0);
    const bool ok = std::abs(ms - 8.0 / 9.0) <= 1e-12 && q >= 1 - 1e-9 && std::abs(ch - 0.75) <= 1e-12 &&
                    ss >= 0.8535 && dt < 10;
    return {ok, "w(MS)=" + fmt(ms, 16) + " quantum(MS)=" + fmt(q, 16) + " w(CHSH)=" + fmt(ch, 16) +
                    " seesaw(CHSH)=" + fmt(ss, 12) + " time=" + fmt(dt, 3) + "s"};
}

// ---------------------------------------------------------------- 2

Outcome partition_sandwich() {
    const auto t0 = Clock::now();
    const auto g = magic_square();
    bool ok = true;
    double worst_gap = -INFINITY, avg0 = 0;
    for (double eps : {0.0, 0.1})
        for (auto v : {EffVariant::worst_case, EffVariant::tilde, EffVariant::average}) {
            const double ns = eff_ns(g, eps, v).eff;
            const double loc = eff_local(g, eps, v).eff;
            worst_gap = std::max(worst_gap, ns - loc);
            ok = ok && ns <= loc + 1e-6;
            if (eps == 0.0 && v == EffVariant::average) avg0 = ns;
        }
    const double dt = seconds_since(t0);
    ok = ok && std::abs(avg0 - 1.0) <= 1e-6 && dt < 60;
    return {ok, "max(eff_ns - eff_local)=" + fmt(worst_gap) + " eff_ns(avg,0)=" + fmt(avg0, 12) + " time=" +
                    fmt(dt, 3) + "s"};
}

// ---------------------------------------------------------------- 3

Outcome mse_ns_cap() {
    const auto r = ns_game_value(mse());
    // The certificate's own winning probability must reproduce the LP optimum.
    const double replay = correlation_value(mse(), r.certificate);
    const bool ok = r.value <= 1.0 / 9.0 + 1e-6 && std::abs(replay - r.value) <= 1e-6;
    return {ok, "NS max of MSE=" + fmt(r.value, 14) + " (1/9=" + fmt(1.0 / 9.0, 14) + ") certificate value=" +
                    fmt(replay, 14)};
}

// ---------------------------------------------------------------- 4

Outcome gamma2_vs_local_eff() {
    Rng rng(404);
    std::vector<std::pair<SignMatrix, RealMatrix>> cases;
    RealMatrix uni(2, 2, 0.25);
    cases.emplace_back(SignMatrix{{1, 1}, {1, -1}}, uni);  // CHSH
    for (int k = 0; k < 24; ++k) {
        std::vector<std::uint8_t> f(4);
        for (auto& b : f) b = static_cast<std::uint8_t>(uniform_index(rng, 2));
        RealMatrix p(2, 2);
        p.data = random_distribution(rng, 4);
        cases.emplace_back(SignMatrix::from_boolean(2, 2, f), p);
    }
    std::size_t checks = 0, violations = 0;
    double worst = -INFINITY;
    for (const auto& [f, p] : cases)
        for (double eps : {0.0, 0.1}) {
            const double alpha = (1 + 2 * eps) / (1 - 2 * eps);
            const double lower = (1 - 2 * eps) * gamma2_alpha(f, p, alpha).value;
            const double upper = eff_local(xor_predicate(f, p), eps, EffVariant::average).eff;
            worst = std::max(worst, lower - upper);
            ++checks;
            violations += lower > upper + 1e-6;
        }
    return {violations == 0, std::to_string(checks) + " checks (CHSH + 24 random), violations=" +
                                 std::to_string(violations) + " max(lower-upper)=" + fmt(worst)};
}

// ---------------------------------------------------------------- 5

DensityOperator random_state(Rng& rng, std::size_t d, std::size_t rank = 0) {
    return DensityOperator(random_density_matrix(rng, d, rank));
}

Outcome distance_entropy_suite() {
    Rng rng(505);
    const int N = 1000;
    const double tol = 1e-8;
    std::array<int, 5> viol{};
    for (int k = 0; k < N; ++k) {
        const std::size_t d = 2 + uniform_index(rng, 5);
        const auto rho = random_state(rng, d, 1 + uniform_index(rng, d));
        const auto sigma = random_state(rng, d);
        const double f = fidelity(rho, sigma), t = trace_distance(rho, sigma);
        // Fuchs-van de Graaf with t = ||rho - sigma||_1.
        if (2 * (1 - f) > t + tol || t > 2 * std::sqrt(std::max(0.0, 1 - f * f)) + tol) ++viol[0];
        const double rel = rel_entropy(rho, sigma).value();
        if (t * t > 2 * std::log(2.0) * rel + tol) ++viol[1];  // Pinsker, rel in bits
        if (rel > dmax(rho, sigma).value() + tol) ++viol[2];
        const auto u = random_unitary(rng, d);
        const auto ru = rho.conjugated(u), su = sigma.conjugated(u);
        if (std::abs(fidelity(ru, su) - f) > tol || std::abs(trace_distance(ru, su) - t) > tol ||
            std::abs(rel_entropy(ru, su).value() - rel) > tol)
            ++viol[3];
    }
    const SubsystemSpec spec({2, 3});
    for (int k = 0; k < N; ++k) {
        const auto rho = random_state(rng, 6), sigma = random_state(rng, 6);
        const auto ra = partial_trace(rho, spec, {0}), sa = partial_trace(sigma, spec, {0});
        if (trace_distance(ra, sa) > trace_distance(rho, sigma) + tol ||
            fidelity(ra, sa) < fidelity(rho, sigma) - tol ||
            rel_entropy(ra, sa).value() > rel_entropy(rho, sigma).value() + tol)
            ++viol[4];
    }
    int total = 0;
    for (int v : viol) total += v;
    return {total == 0, "1000 instances each; violations FvdG=" + std::to_string(viol[0]) + " Pinsker=" +
                            std::to_string(viol[1]) + " D<=Dmax=" + std::to_string(viol[2]) + " unitary=" +
                            std::to_string(viol[3]) + " data-processing=" + std::to_string(viol[4])};
}

// ---------------------------------------------------------------- 6

Outcome classical_substate() {
    const auto t0 = Clock::now();
    Rng rng(606);
    int checks = 0, violations = 0;
    for (int k = 0; k < 200; ++k) {
        const std::size_t m = 2 + uniform_index(rng, 7);
        const auto p = random_distribution(rng, m), q = random_distribution(rng, m);
        double D = 0;  // KL divergence in bits, computed directly
        for (std::size_t i = 0; i < m; ++i)
            if (p[i] > 0) D += p[i] * std::log2(p[i] / q[i]);
        for (double eps : {0.1, 0.3, 0.5}) {
            const auto s = smoothed_dmax_classical(ClassicalDistribution(p), ClassicalDistribution(q), eps);
            const double bound = (4 * D + 1) / (eps * eps) + std::log2(1 / (1 - eps * eps / 4));
            ++checks;
            violations += !s.is_finite() || s.value() > bound;
        }
    }
    const double dt = seconds_since(t0);
    return {violations == 0 && dt < 30, "200 pairs x 3 eps = " + std::to_string(checks) + " checks, violations=" +
                                            std::to_string(violations) + " time=" + fmt(dt, 3) + "s"};
}

// ---------------------------------------------------------------- 7

Outcome substate_perturbation() {
    Rng rng(707);
    int feasible = 0;
    const int N = 100;
    for (int k = 0; k < N; ++k) {
        const std::size_t nx = 2 + uniform_index(rng, 2), nb = 2 + uniform_index(rng, 2);
        const JointTable sigma(nx, nb, random_distribution(rng, nx * nb));
        const auto psi = random_distribution(rng, nx);
        const auto sb = sigma.marginal_z();
        // c = Dmax(sigma_XB || psi x sigma_B) makes sigma' = sigma_XB a witness of the hypothesis.
        double c = 0;
        for (std::size_t x = 0; x < nx; ++x)
            for (std::size_t b = 0; b < nb; ++b) c = std::max(c, std::log2(sigma(x, b) / (psi[x] * sb[b])));
        const auto noise = random_distribution(rng, nb);
        const double w = 0.3 * uniform01(rng);
        std::vector<double> rho(nb);
        for (std::size_t b = 0; b < nb; ++b) rho[b] = (1 - w) * sb[b] + w * noise[b];
        const double delta1 = classical_purified_distance(sb, rho);
        const double eps = 0.2 * uniform01(rng);
        const double delta0 = 0.05 + 0.45 * uniform01(rng);
        const auto r = substate_perturbation_check_classical(sigma, psi, rho, c, eps, delta0, delta1);
        feasible += r.status == SubstateReport::Status::feasible;
    }
    return {feasible == N, std::to_string(feasible) + "/" + std::to_string(N) + " feasible"};
}

// ---------------------------------------------------------------- 8

Outcome serfling() {
    const std::size_t n = 100, trials = 100000;
    const double gamma = 0.2, eps = 0.2;
    const double bound = std::exp2(-2 * eps * eps * gamma * n);
    double worst_p = 0, worst_excess = -INFINITY;
    std::size_t worst_k = 0;
    bool ok = true;
    // Threshold patterns with k < (1 - 2 eps) n ones; others make the event impossible.
    for (std::size_t k = 0; k < 60; ++k) {
        const auto r = serfling_mc(gamma, eps, threshold_pattern(n, k), trials, derive_seed(808, k));
        const double slack = 3 * std::sqrt(r.empirical * (1 - r.empirical) / trials);
        ok = ok && r.empirical <= bound + slack;
        if (r.empirical - bound - slack > worst_excess) worst_excess = r.empirical - bound - slack;
        if (r.empirical > worst_p) {
            worst_p = r.empirical;
            worst_k = k;
        }
    }
    return {ok, "worst pattern ones=" + std::to_string(worst_k) + " empirical=" + fmt(worst_p) + " bound=" +
                    fmt(bound) + " max(emp-bound-3se)=" + fmt(worst_excess)};
}

// ---------------------------------------------------------------- 9

Outcome diqkd_honest() {
    ProtocolParams p;
    p.n = 2000;
    p.alpha = 0.5;
    p.gamma = 0.2;  // gamma alpha n = 200
    const std::size_t runs = 1000;

    std::size_t aborts0 = 0, key_mismatch = 0;
    p.delta = 0;
    for (std::size_t r = 0; r < runs; ++r) {
        p.seed = derive_seed(909, r);
        HonestBoxes b(0.0);
        const auto t = run_protocol(p, b);
        aborts0 += t.aborted;
        key_mismatch += t.aborted || t.K_A != t.K_B;
    }

    const double delta = 0.05;
    p.delta = delta;
    std::size_t aborts = 0, tested = 0, wrong = 0;
    for (std::size_t r = 0; r < runs; ++r) {
        p.seed = derive_seed(910, r);
        HonestBoxes b(delta);
        const auto t = run_protocol(p, b);
        aborts += t.aborted;
        tested += t.T.size();
        wrong += t.T.size() - t.matches_T;
    }
    const double freq = static_cast<double>(aborts) / runs;
    const double bound = chernoff_abort_bound(delta, p.gamma, p.alpha, static_cast<double>(p.n));
    const double sigma_abort = std::sqrt(bound * (1 - bound) / runs);
    const double qber = static_cast<double>(wrong) / static_cast<double>(tested);
    const double sigma_q = std::sqrt(delta * (1 - delta) / static_cast<double>(tested));
    const bool ok = aborts0 == 0 && key_mismatch == 0 && freq <= bound + 3 * sigma_abort &&
                    std::abs(qber - delta) <= 3 * sigma_q;
    return {ok, "delta=0: aborts=" + std::to_string(aborts0) + " key mismatches=" + std::to_string(key_mismatch) +
                    "; delta=0.05: abort freq=" + fmt(freq) + " bound=" + fmt(bound) + " qber=" + fmt(qber) +
                    " (3 sigma=" + fmt(3 * sigma_q) + ")"};
}

// ---------------------------------------------------------------- 10

double h2(double x) {
    if (x <= 0 || x >= 1) return 0;
    return -x * std::log2(x) - (1 - x) * std::log2(1 - x);
}

double rate_oracle(const KeyRateParams& k) {
    return k.alpha * (k.nu - k.beta * (std::sqrt(k.c) + std::sqrt(k.alpha)) - 2 * h2(4 * k.delta) - k.gamma) * k.n -
           std::log2(1 / k.PrE);
}

Outcome key_rate_formula() {
    Rng rng(1010);
    double worst_rel = 0;
    for (int k = 0; k < 10; ++k) {
        KeyRateParams p{0.001 + 0.5 * uniform01(rng), 0.3 * uniform01(rng), 0.125 * uniform01(rng),
                        0.1 * uniform01(rng),         0.05 + 0.9 * uniform01(rng), 0.1 + uniform01(rng),
                        0.05 + 0.95 * uniform01(rng), std::floor(1e3 + 1e6 * uniform01(rng))};
        const double got = key_rate(p).hmin_minus_h0_bits, want = rate_oracle(p);
        worst_rel = std::max(worst_rel, std::abs(got - want) / std::max(1e-300, std::abs(want)));
        const double eps_want = 2 * std::pow(2.0, -8 * p.delta * p.delta * p.alpha * p.n) / p.PrE;
        worst_rel = std::max(worst_rel, std::abs(key_rate(p).eps_smooth - eps_want) / eps_want);
    }
    bool mono = true;
    KeyRateParams base{0.05, 0.01, 0.01, 0.0, 0.3, 0.5, 0.9, 1e5};
    auto bits = [](KeyRateParams p) { return key_rate(p).hmin_minus_h0_bits; };
    for (int i = 0; i < 20; ++i) {
        KeyRateParams a = base, b = base;
        a.c = 0.005 * i;
        b.c = 0.005 * (i + 1);
        mono = mono && bits(b) < bits(a);
        a = b = base;
        a.gamma = 0.01 * i;
        b.gamma = 0.01 * (i + 1);
        mono = mono && bits(b) < bits(a);
        a = b = base;
        a.delta = 0.125 * i / 20;
        b.delta = 0.125 * (i + 1) / 20;
        // Ordered as h2(4 delta), strictly increasing on [0, 1/8].
        mono = mono && bits(b) < bits(a) && h2(4 * b.delta) > h2(4 * a.delta);
    }
    bool positive = false;
    double best = -INFINITY;
    for (double alpha : {0.001, 0.005, 0.01, 0.02, 0.05})
        for (double gamma : {0.001, 0.01, 0.05})
            for (double n : {1e4, 1e5, 1e6}) {
                const double r = key_rate({alpha, gamma, 0.001, 0.001, 0.3, 0.5, 1.0, n}).rate_per_copy;
                best = std::max(best, r);
                positive = positive || r > 0;
            }
    return {worst_rel <= 1e-9 && mono && positive, "max relative error=" + fmt(worst_rel) + " monotone=" +
                                                      (mono ? "yes" : "no") + " best rate/copy on grid=" + fmt(best)};
}

// ---------------------------------------------------------------- 11

Outcome repetition_probe() {
    RepetitionProbe one;
    one.n = 1;
    one.comm_bits = 2;
    one.mode = RepetitionProbe::Mode::exhaustive;
    const auto r1 = empirical_repeated_value(magic_square(), one);
    RepetitionProbe two;
    two.n = 2;
    two.comm_bits = 0;
    two.mode = RepetitionProbe::Mode::hill_climb;
    two.seed = 11;
    const auto r2 = empirical_repeated_value(magic_square(), two);
    const bool ok = std::abs(r1.best_value - 1) <= 1e-12 && r1.kind == RepetitionProbe::Kind::exhaustive &&
                    r2.best_value >= 64.0 / 81.0 - 1e-12;
    return {ok, "n=1 comm=2: " + fmt(r1.best_value, 14) + " (" + to_string(r1.kind) + "); n=2 comm=0: " +
                    fmt(r2.best_value, 14) + " vs (8/9)^2=" + fmt(64.0 / 81.0, 14)};
}

// ---------------------------------------------------------------- 12

bool run_capture(const std::string& cmd, std::string& out) {
    out.clear();
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return false;
    std::array<char, 4096> buf{};
    std::size_t got;
    while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), got);
    return pclose(pipe) == 0;
}

Outcome cli_determinism() {
    const std::string cli = DPTKIT_CLI_PATH;
    if (cli.empty()) return {false, "command-line tool was not built"};
    const std::vector<std::string> cmds = {
        "--seed 7 game value --builtin chsh --method seesaw --restarts 5",
        "--seed 7 diqkd run --n 500 --delta 0.05 --runs 20",
        "--seed 7 diqkd sweep --alpha 0.1,0.2 --delta 0.01,0.05 --n 400 --runs 5",
        "--seed 7 diqkd serfling --trials 2000 --worst",
        "--seed 7 dpt probe --builtin magic_square --n 2 --mode hill --iters 300",
        "--seed 7 bounds gamma2 --sign \"1,1,1;1,-1,1;1,1,-1\" --alpha-approx 1.5",
    };
    std::size_t identical = 0;
    for (const auto& c : cmds) {
        std::string first, again;
        const std::string full = "\"" + cli + "\" " + c + " 2>/dev/null";
        bool ok = run_capture(full, first) && !first.empty();
        for (int rep = 1; rep < 3 && ok; ++rep) ok = run_capture(full, again) && again == first;
        identical += ok;
    }
    return {identical == cmds.size(), std::to_string(identical) + "/" + std::to_string(cmds.size()) +
                                          " commands byte-identical across 3 runs"};
}

} // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"exact game values", exact_game_values},
        {"partition-bound sandwich on the Magic Square", partition_sandwich},
        {"no-signalling cap on MSE", mse_ns_cap},
        {"gamma_2^alpha lower bound vs local eff", gamma2_vs_local_eff},
        {"distance and entropy property suite", distance_entropy_suite},
        {"classical substate bound", classical_substate},
        {"classical substate perturbation", substate_perturbation},
        {"sampling tail bound Monte Carlo", serfling},
        {"honest DIQKD behavior", diqkd_honest},
        {"key-rate formula", key_rate_formula},
        {"empirical repetition probe", repetition_probe},
        {"CLI determinism", cli_determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << " [" << (i + 1) << "] " << criteria[i].first << ": " << o.detail
                  << std::endl;
    }
    return failed == 0 ? 0 : 1;
}
