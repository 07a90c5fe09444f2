// dptkit command-line front end.
//
// Exit codes: 0 success, 1 usage error (bad flags, bad input files, values
// out of range), 2 computation error (infeasible or unbounded LP, budget
// exceeded, failed gate, protocol violation).

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dptkit/diqkd.hpp"
#include "dptkit/dpt.hpp"
#include "dptkit/games.hpp"
#include "dptkit/gamma2.hpp"
#include "dptkit/json_io.hpp"
#include "dptkit/partition_bound.hpp"
#include "dptkit/probe.hpp"

namespace {

using dptkit::json;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Globals {
    std::uint64_t seed = 0;
    std::string format = "json";
    std::string out;
    CLI::Option* format_opt = nullptr;
};

struct GameSel {
    std::string builtin, file;
};

dptkit::GamePredicate load_game(const GameSel& s) {
    if (!s.builtin.empty() && !s.file.empty()) throw UsageError("use either --builtin or --game, not both");
    if (!s.builtin.empty()) return dptkit::builtin_game(s.builtin);
    if (!s.file.empty()) return dptkit::game_from_json(dptkit::read_json_file(s.file));
    throw UsageError("a game is required (--builtin NAME or --game FILE)");
}

void add_game_options(CLI::App* sub, GameSel& s) {
    sub->add_option("--builtin", s.builtin, "Builtin game: magic_square, mse, chsh");
    sub->add_option("--game", s.file, "Game JSON file")->check(CLI::ExistingFile);
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> v;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            v.push_back(std::stod(item, &used));
            if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
        } catch (const std::logic_error&) {
            throw UsageError("cannot parse number '" + item + "' in '" + text + "'");
        }
    }
    if (v.empty()) throw UsageError("empty number list");
    return v;
}

std::vector<std::size_t> parse_sizes(const std::string& text) {
    std::vector<std::size_t> out;
    if (text.empty()) return out;
    for (double d : parse_list(text)) {
        if (d < 0 || d != std::floor(d)) throw UsageError("expected nonnegative integers in '" + text + "'");
        out.push_back(static_cast<std::size_t>(d));
    }
    return out;
}

// Rows separated by ';', entries by ','.
dptkit::RealMatrix parse_matrix(const std::string& text) {
    std::vector<std::vector<double>> rows;
    std::stringstream ss(text);
    std::string row;
    while (std::getline(ss, row, ';')) rows.push_back(parse_list(row));
    if (rows.empty()) throw UsageError("empty matrix");
    dptkit::RealMatrix m(rows.size(), rows[0].size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != m.cols) throw UsageError("ragged matrix '" + text + "'");
        for (std::size_t c = 0; c < m.cols; ++c) m(r, c) = rows[r][c];
    }
    return m;
}

dptkit::RealMatrix uniform_matrix(std::size_t r, std::size_t c) {
    dptkit::RealMatrix m(r, c);
    for (auto& v : m.data) v = 1.0 / static_cast<double>(r * c);
    return m;
}

std::string csv_cell(const json& v) {
    if (v.is_number_float()) return dptkit::format_number(v.get<double>());
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

class Output {
public:
    explicit Output(const Globals& g) : g_(g) {}

    void emit(const json& j) const {
        std::ostringstream os;
        if (g_.format == "csv") {
            // One header row of scalar fields, one value row.
            std::string head, row;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (it->is_structured()) continue;
                head += (head.empty() ? "" : ",") + it.key();
                row += (row.empty() ? "" : ",") + csv_cell(*it);
            }
            os << head << '\n' << row << '\n';
        } else {
            os << j.dump(2) << '\n';
        }
        write(os.str());
    }

    void write(const std::string& text) const {
        if (g_.out.empty()) {
            std::cout << text;
            std::cout.flush();
            return;
        }
        std::ofstream f(g_.out, std::ios::binary);
        if (!f) throw UsageError("cannot write '" + g_.out + "'");
        f << text;
    }

private:
    const Globals& g_;
};

json correlation_json(const dptkit::Correlation& q) {
    return {{"num_inputs", q.inputs.total()}, {"num_outputs", q.outputs.total()}, {"q", q.q}};
}

// ------------------------------------------------------------------ game

void setup_game(CLI::App& app, Globals& G) {
    auto* game = app.add_subcommand("game", "Nonlocal game values and builtin games");
    game->require_subcommand(1);

    auto* value = game->add_subcommand("value", "Classical or see-saw value of a game");
    auto sel = std::make_shared<GameSel>();
    auto method = std::make_shared<std::string>("classical");
    auto restarts = std::make_shared<std::size_t>(20);
    auto iters = std::make_shared<std::size_t>(500);
    auto dims = std::make_shared<std::string>();
    add_game_options(value, *sel);
    value->add_option("--method", *method, "classical or seesaw")->check(CLI::IsMember({"classical", "seesaw"}));
    value->add_option("--restarts", *restarts, "See-saw restarts");
    value->add_option("--iters", *iters, "See-saw iterations per restart");
    value->add_option("--dims", *dims, "Local dimensions, comma separated (default: game suggestion)");
    value->callback([&G, sel, method, restarts, iters, dims] {
        const auto g = load_game(*sel);
        json j{{"game", g.name()}, {"method", *method}};
        if (*method == "classical") {
            const auto r = dptkit::classical_value(g);
            j["value"] = r.value;
            j["kind"] = dptkit::to_string(r.kind);
            if (r.classical) j["strategy"] = r.classical->maps;
        } else {
            auto d = parse_sizes(*dims);
            if (d.empty()) d = g.suggested_dims;
            if (d.empty()) throw UsageError("--dims is required for this game");
            dptkit::SeesawOptions opt;
            opt.restarts = *restarts;
            opt.max_iters = *iters;
            opt.seed = G.seed;
            const auto r = dptkit::seesaw(g, d, opt);
            j["value"] = r.value;
            j["kind"] = dptkit::to_string(r.kind);
            j["dims"] = d;
            j["restarts"] = *restarts;
            j["seed"] = G.seed;
        }
        Output(G).emit(j);
    });

    auto* builtin = game->add_subcommand("builtin", "Print a builtin game as JSON");
    auto name = std::make_shared<std::string>();
    builtin->add_option("name", *name, "magic_square, mse or chsh")->required();
    builtin->callback([&G, name] { Output(G).write(dptkit::game_to_json(dptkit::builtin_game(*name)).dump(2) + "\n"); });
}

// ---------------------------------------------------------------- bounds

void setup_bounds(CLI::App& app, Globals& G) {
    auto* bounds = app.add_subcommand("bounds", "Partition-bound and gamma_2 computations");
    bounds->require_subcommand(1);

    auto* eff = bounds->add_subcommand("eff", "Partition bound eff under a relaxation");
    auto sel = std::make_shared<GameSel>();
    auto eps = std::make_shared<double>(0.0);
    auto variant = std::make_shared<std::string>("average");
    auto relax = std::make_shared<std::string>("no_signalling");
    add_game_options(eff, *sel);
    eff->add_option("--eps", *eps, "Error parameter in [0,1]");
    eff->add_option("--variant", *variant, "worst_case, tilde or average");
    eff->add_option("--relaxation", *relax, "no_signalling or local");
    eff->callback([&G, sel, eps, variant, relax] {
        const auto g = load_game(*sel);
        const auto r = dptkit::partition_bound(g, *eps, dptkit::parse_variant(*variant), dptkit::parse_relaxation(*relax));
        Output(G).emit({{"game", g.name()},
                        {"variant", dptkit::to_string(r.variant)},
                        {"relaxation", dptkit::to_string(r.relaxation)},
                        {"eps", r.eps},
                        {"eta", r.eta},
                        {"eff", r.eff},
                        {"eta_floored", r.eta_floored},
                        {"certificate", correlation_json(r.certificate)}});
    });

    auto sign = std::make_shared<std::string>();
    auto dist = std::make_shared<std::string>();
    auto load_fp = [sign, dist] {
        const dptkit::SignMatrix f(parse_matrix(*sign));
        const dptkit::RealMatrix p = dist->empty() ? uniform_matrix(f.rows, f.cols) : parse_matrix(*dist);
        return std::make_pair(f, p);
    };

    auto* g2 = bounds->add_subcommand("gamma2", "gamma_2^alpha of a sign matrix under a distribution");
    auto alpha = std::make_shared<double>(1.0);
    auto restarts = std::make_shared<std::size_t>(50);
    g2->add_option("--sign", *sign, "Sign matrix, rows separated by ';' (e.g. \"1,1;1,-1\")")->required();
    g2->add_option("--dist", *dist, "Input distribution matrix (default uniform)");
    g2->add_option("--alpha-approx", *alpha, "Approximation parameter alpha >= 1");
    g2->add_option("--restarts", *restarts, "Restarts for the alternating lower bound");
    g2->callback([&G, load_fp, alpha, restarts] {
        const auto [f, p] = load_fp();
        dptkit::Gamma2Options opt;
        opt.restarts = *restarts;
        opt.seed = G.seed;
        const auto star = dptkit::gamma2_star(dptkit::hadamard(f, dptkit::check_entry_distribution(p, f.rows, f.cols)), opt);
        const auto r = dptkit::gamma2_alpha(f, p, *alpha, opt);
        json j{{"alpha", *alpha},
               {"gamma2_alpha", r.value},
               {"kind", dptkit::to_string(r.kind)},
               {"gamma2_star", star.value},
               {"gamma2_star_kind", dptkit::to_string(star.kind)}};
        if (r.maximizer) j["maximizer"] = r.maximizer->data;
        Output(G).emit(j);
    });

    auto* thm = bounds->add_subcommand("check-thm2", "Compare (1-2eps) gamma_2^alpha with eff_local");
    auto teps = std::make_shared<double>(0.0);
    thm->add_option("--sign", *sign, "Sign matrix, rows separated by ';'")->required();
    thm->add_option("--dist", *dist, "Input distribution matrix (default uniform)");
    thm->add_option("--eps", *teps, "Error parameter in [0,1/2]");
    thm->callback([&G, load_fp, teps] {
        const auto [f, p] = load_fp();
        const auto r = dptkit::check_thm2(f, p, *teps);
        Output(G).emit({{"eps", r.eps},
                        {"alpha", std::isinf(r.alpha) ? json("inf") : json(r.alpha)},
                        {"lower", r.lower},
                        {"upper", r.upper},
                        {"gamma2_alpha", r.gamma2.value},
                        {"gamma2_kind", dptkit::to_string(r.gamma2.kind)},
                        {"holds", r.holds}});
    });
}

// ------------------------------------------------------------------- dpt

void setup_dpt(CLI::App& app, Globals& G) {
    auto* dpt = app.add_subcommand("dpt", "Direct-product bounds, repetition probe, substate check");
    dpt->require_subcommand(1);

    struct BoundArgs {
        std::string which;
        std::size_t l = 2, n = 1, C_size = 0, t = 0;
        double c = 0, eps = 0, zeta = 0.1, nu = 0, PrE = 1, k = 1, eff = 1, beta = 1;
        std::string alphabet, c_j, mode = "generic";
    };
    auto a = std::make_shared<BoundArgs>();
    auto* bound = dpt->add_subcommand("bound", "Evaluate a direct-product bound");
    bound->add_option("which", a->which, "case-i, case-ii or randv")
        ->required()
        ->check(CLI::IsMember({"case-i", "case-ii", "randv"}));
    bound->add_option("--players", a->l, "Number of players l");
    bound->add_option("--n", a->n, "Number of copies");
    bound->add_option("--c", a->c, "Per-copy communication");
    bound->add_option("--c-split", a->c_j, "Per-player split of c, comma separated");
    bound->add_option("--eps", a->eps, "Error parameter");
    bound->add_option("--zeta", a->zeta, "zeta in (0,1)");
    bound->add_option("--nu", a->nu, "1 minus the quantum value");
    bound->add_option("--alphabet", a->alphabet, "Output alphabet sizes, comma separated");
    bound->add_option("--C-size", a->C_size, "|C| for delta");
    bound->add_option("--PrE", a->PrE, "Conditioning event probability");
    bound->add_option("--k", a->k, "Exponent constant");
    bound->add_option("--eff", a->eff, "eff value for case-ii");
    bound->add_option("--t", a->t, "Subset size for randv");
    bound->add_option("--beta", a->beta, "beta for randv");
    bound->add_option("--mode", a->mode, "randv mode: generic or mse")->check(CLI::IsMember({"generic", "mse"}));
    bound->callback([&G, a] {
        json params;
        double value = 0;
        const auto sizes = parse_sizes(a->alphabet);
        if (a->which == "randv") {
            dptkit::RandvParams p;
            p.t = a->t;
            p.n = a->n;
            p.c = a->c;
            p.l = a->l;
            p.nu = a->nu;
            p.beta = a->beta;
            p.alphabet_sizes = sizes;
            p.mode = a->mode == "mse" ? dptkit::RandvMode::mse : dptkit::RandvMode::generic;
            value = dptkit::randv_bound(p);
            params = {{"t", p.t}, {"n", p.n}, {"c", p.c}, {"l", p.l}, {"nu", p.nu}, {"beta", p.beta},
                      {"alphabet_sizes", sizes}, {"mode", a->mode}};
        } else {
            dptkit::DPTParams p;
            p.l = a->l;
            p.n = a->n;
            p.c = a->c;
            if (!a->c_j.empty()) p.c_j = parse_list(a->c_j);
            p.eps = a->eps;
            p.zeta = a->zeta;
            p.nu = a->nu;
            p.alphabet_sizes = sizes;
            p.C_size = a->C_size;
            p.PrE = a->PrE;
            p.exponent_const = a->k;
            params = {{"l", p.l}, {"n", p.n}, {"c", p.c}, {"eps", p.eps}, {"zeta", p.zeta}, {"nu", p.nu},
                      {"alphabet_sizes", sizes}, {"PrE", p.PrE}, {"k", p.exponent_const}};
            if (a->which == "case-i") {
                value = dptkit::dpt_case_i_bound(p);
                params["base"] = dptkit::case_i_base(p);
            } else {
                value = dptkit::dpt_case_ii_bound(p, a->eff);
                params["eff"] = a->eff;
                params["gate"] = dptkit::case_ii_gate(p, a->eff);
            }
            if (p.C_size > 0) params["delta"] = dptkit::delta_of(p.C_size, p.PrE, p.n, sizes);
        }
        Output(G).emit({{"bound_name", a->which}, {"params", params}, {"value", value}});
    });

    auto* probe = dpt->add_subcommand("probe", "Best value of n copies with bounded one-round communication");
    auto sel = std::make_shared<GameSel>();
    auto pr = std::make_shared<dptkit::RepetitionProbe>();
    auto pmode = std::make_shared<std::string>("auto");
    add_game_options(probe, *sel);
    probe->add_option("--n", pr->n, "Copies");
    probe->add_option("--comm", pr->comm_bits, "Total broadcast bits");
    probe->add_option("--mode", *pmode, "auto, exhaustive or hill")->check(CLI::IsMember({"auto", "exhaustive", "hill"}));
    probe->add_option("--budget", pr->search_budget, "Exhaustive search budget");
    probe->add_option("--restarts", pr->restarts, "Hill-climb restarts");
    probe->add_option("--iters", pr->hill_iters, "Hill-climb iterations per restart");
    probe->callback([&G, sel, pr, pmode] {
        auto p = *pr;
        p.seed = G.seed;
        p.mode = *pmode == "exhaustive" ? dptkit::RepetitionProbe::Mode::exhaustive
                 : *pmode == "hill"     ? dptkit::RepetitionProbe::Mode::hill_climb
                                        : dptkit::RepetitionProbe::Mode::automatic;
        const auto g = load_game(*sel);
        const auto r = dptkit::empirical_repeated_value(g, p);
        Output(G).emit({{"game", g.name()},
                        {"n", r.n},
                        {"comm_bits", r.comm_bits},
                        {"best_value", r.best_value},
                        {"kind", dptkit::to_string(r.kind)},
                        {"seed", G.seed},
                        {"protocol",
                         {{"bits", r.protocol.bits}, {"messages", r.protocol.messages}, {"answers", r.protocol.answers}}}});
    });

    auto* sub = dpt->add_subcommand("substate-check", "Classical substate perturbation check");
    struct SubArgs {
        std::string sigma, psi, rho;
        double c = 0, eps = 0, delta0 = 0.1, delta1 = 0;
    };
    auto s = std::make_shared<SubArgs>();
    sub->add_option("--sigma", s->sigma, "Joint table sigma_XB, rows (x) separated by ';'")->required();
    sub->add_option("--psi", s->psi, "Distribution psi_X")->required();
    sub->add_option("--rho", s->rho, "Distribution rho_B")->required();
    sub->add_option("--c", s->c, "Substate exponent c");
    sub->add_option("--eps", s->eps, "Hypothesis distance eps");
    sub->add_option("--delta0", s->delta0, "delta0 > 0");
    sub->add_option("--delta1", s->delta1, "Distance between sigma_B and rho_B");
    sub->callback([&G, s] {
        const auto m = parse_matrix(s->sigma);
        const dptkit::JointTable t(m.rows, m.cols, m.data);
        const auto r = dptkit::substate_perturbation_check_classical(t, parse_list(s->psi), parse_list(s->rho), s->c,
                                                                     s->eps, s->delta0, s->delta1);
        Output(G).emit({{"status", dptkit::to_string(r.status)},
                        {"detail", r.detail},
                        {"hypothesis_distance", r.hypothesis_distance},
                        {"marginal_distance", r.marginal_distance},
                        {"target_distance", r.target_distance},
                        {"achieved_distance", r.achieved_distance},
                        {"cap_factor", r.cap_factor},
                        {"witness", r.witness}});
    });
}

// ----------------------------------------------------------------- diqkd

void add_rate_options(CLI::App* sub, dptkit::KeyRateParams& k) {
    sub->add_option("--alpha", k.alpha, "Fraction of copies in S");
    sub->add_option("--gamma", k.gamma, "Fraction of S tested");
    sub->add_option("--delta", k.delta, "Noise rate");
    sub->add_option("--c", k.c, "Leakage per copy (bits)");
    sub->add_option("--nu", k.nu, "nu (heuristic default 0.01)");
    sub->add_option("--beta", k.beta, "beta (heuristic default 1)");
    sub->add_option("--PrE", k.PrE, "Probability of not aborting");
    sub->add_option("--n", k.n, "Number of copies");
}

void setup_diqkd(CLI::App& app, Globals& G) {
    auto* dq = app.add_subcommand("diqkd", "Magic-Square DIQKD simulation and key rates");
    dq->require_subcommand(1);

    auto* run = dq->add_subcommand("run", "Simulate the protocol");
    struct RunArgs {
        dptkit::ProtocolParams p;
        std::string boxes = "honest", adversary;
        bool test_set_cheater = false, show_keys = false;
        std::size_t runs = 1;
    };
    auto r = std::make_shared<RunArgs>();
    run->add_option("--n", r->p.n, "Copies");
    run->add_option("--alpha", r->p.alpha, "Fraction of copies in S");
    run->add_option("--gamma", r->p.gamma, "Fraction of S tested");
    run->add_option("--delta", r->p.delta, "Noise rate (honest boxes) and abort threshold");
    run->add_option("--c", r->p.c, "Leakage budget per copy (bits)");
    run->add_option("--boxes", r->boxes, "honest or cheating")->check(CLI::IsMember({"honest", "cheating"}));
    run->add_option("--adversary", r->adversary, "Adversary script JSON")->check(CLI::ExistingFile);
    run->add_flag("--test-set-cheater", r->test_set_cheater, "Leak Alice's inputs up to the budget");
    run->add_option("--runs", r->runs, "Independent runs")->check(CLI::PositiveNumber);
    run->add_flag("--show-keys", r->show_keys, "Print the keys (single run)");
    run->callback([&G, r] {
        if (!r->adversary.empty() && r->test_set_cheater)
            throw UsageError("use either --adversary or --test-set-cheater");
        auto p = r->p;
        std::optional<dptkit::AdversaryScript> script;
        if (!r->adversary.empty()) script = dptkit::adversary_from_json(dptkit::read_json_file(r->adversary));
        if (r->test_set_cheater) script = dptkit::AdversaryScript::test_set_cheater(p.leakage_limit());
        auto make_boxes = [&]() -> std::unique_ptr<dptkit::BoxPair> {
            if (r->boxes == "cheating") return std::make_unique<dptkit::CheatingBoxes>();
            return dptkit::honest_boxes(p.delta);
        };
        std::size_t aborts = 0, tested = 0, mism_T = 0, in_S = 0;
        double mism_S = 0;
        bool keys_equal = true;
        dptkit::TranscriptRecord last;
        for (std::size_t k = 0; k < r->runs; ++k) {
            p.seed = dptkit::derive_seed(G.seed, k);
            auto boxes = make_boxes();
            last = dptkit::run_protocol(p, *boxes, script ? &*script : nullptr);
            aborts += last.aborted;
            tested += last.T.size();
            mism_T += last.T.size() - last.matches_T;
            mism_S += last.mismatch_S * static_cast<double>(last.S.size());
            in_S += last.S.size();
            if (!last.aborted) keys_equal = keys_equal && last.K_A == last.K_B;
        }
        json j{{"n", p.n},
               {"alpha", p.alpha},
               {"gamma", p.gamma},
               {"delta", p.delta},
               {"c", p.c},
               {"boxes", r->boxes},
               {"seed", G.seed},
               {"runs", r->runs},
               {"S_size", last.S.size()},
               {"T_size", last.T.size()},
               {"leakage_limit", last.leakage_limit},
               {"leaked_bits", last.leaked_bits},
               {"abort_freq", static_cast<double>(aborts) / static_cast<double>(r->runs)},
               {"qber", static_cast<double>(mism_T) / static_cast<double>(tested)},
               {"mismatch_S", mism_S / static_cast<double>(in_S)},
               {"keys_equal", keys_equal},
               {"chernoff_abort_bound",
                dptkit::chernoff_abort_bound(p.delta, p.gamma, p.alpha, static_cast<double>(p.n))}};
        if (r->runs == 1) {
            j["aborted"] = last.aborted;
            j["key_length"] = last.K_A.size();
            if (r->show_keys) {
                std::string ka, kb;
                for (auto b : last.K_A) ka += static_cast<char>('0' + b);
                for (auto b : last.K_B) kb += static_cast<char>('0' + b);
                j["K_A"] = ka;
                j["K_B"] = kb;
            }
        }
        Output(G).emit(j);
    });

    auto* rate = dq->add_subcommand("rate", "Key-rate expression");
    auto k = std::make_shared<dptkit::KeyRateParams>();
    add_rate_options(rate, *k);
    rate->callback([&G, k] {
        const auto kr = dptkit::key_rate(*k);
        Output(G).emit({{"alpha", k->alpha},
                        {"gamma", k->gamma},
                        {"delta", k->delta},
                        {"c", k->c},
                        {"nu", k->nu},
                        {"beta", k->beta},
                        {"PrE", k->PrE},
                        {"n", k->n},
                        {"rate_bits", kr.hmin_minus_h0_bits},
                        {"rate_per_copy", kr.rate_per_copy},
                        {"eps_smooth", kr.eps_smooth},
                        {"chernoff_abort_bound", dptkit::chernoff_abort_bound(k->delta, k->gamma, k->alpha, k->n)}});
    });

    auto* sw = dq->add_subcommand("sweep", "Key-rate grid with optional honest abort statistics (CSV by default)");
    struct SweepArgs {
        std::string n = "10000", alpha = "0.5", gamma = "0.2", delta = "0", c = "0";
        double nu = dptkit::kDefaultNu, beta = dptkit::kDefaultBeta, PrE = 1.0;
        std::size_t runs = 0;
    };
    auto sa = std::make_shared<SweepArgs>();
    sw->add_option("--n", sa->n, "Copies, comma separated");
    sw->add_option("--alpha", sa->alpha, "alpha values, comma separated");
    sw->add_option("--gamma", sa->gamma, "gamma values, comma separated");
    sw->add_option("--delta", sa->delta, "delta values, comma separated");
    sw->add_option("--c", sa->c, "c values, comma separated");
    sw->add_option("--nu", sa->nu, "nu");
    sw->add_option("--beta", sa->beta, "beta");
    sw->add_option("--PrE", sa->PrE, "Pr[no abort] used when --runs is 0");
    sw->add_option("--runs", sa->runs, "Honest runs per cell for empirical Pr[no abort]");
    sw->callback([&G, sa] {
        std::vector<dptkit::SweepCell> grid;
        for (double n : parse_list(sa->n))
            for (double al : parse_list(sa->alpha))
                for (double ga : parse_list(sa->gamma))
                    for (double de : parse_list(sa->delta))
                        for (double c : parse_list(sa->c))
                            grid.push_back({dptkit::KeyRateParams{al, ga, de, c, sa->nu, sa->beta, sa->PrE, n}, sa->runs});
        const auto rows = dptkit::sweep(grid, G.seed);
        if (G.format_opt->count() == 0 || G.format == "csv") {
            std::ostringstream os;
            dptkit::write_sweep_csv(os, rows);
            Output(G).write(os.str());
            return;
        }
        json arr = json::array();
        for (const auto& row : rows) {
            const auto& p = row.cell.rate;
            arr.push_back({{"n", p.n}, {"alpha", p.alpha}, {"gamma", p.gamma}, {"delta", p.delta}, {"c", p.c},
                           {"nu", p.nu}, {"beta", p.beta}, {"PrE_est", row.PrE_est}, {"abort_freq", row.abort_freq},
                           {"qber", row.qber}, {"rate_bits", row.rate.hmin_minus_h0_bits},
                           {"rate_per_copy", row.rate.rate_per_copy}, {"eps_smooth", row.rate.eps_smooth},
                           {"seed", row.seed}});
        }
        Output(G).write(arr.dump(2) + "\n");
    });

    auto* se = dq->add_subcommand("serfling", "Monte Carlo check of the sampling tail bound");
    struct SerfArgs {
        std::size_t n = 100, trials = 100000;
        double gamma = 0.2, eps = 0.2;
        std::optional<std::size_t> ones;
        bool worst = false;
    };
    auto sf = std::make_shared<SerfArgs>();
    se->add_option("--n", sf->n, "Pattern length");
    se->add_option("--gamma", sf->gamma, "Test fraction");
    se->add_option("--eps", sf->eps, "Deviation eps");
    se->add_option("--trials", sf->trials, "Monte Carlo trials");
    auto* ones_opt = se->add_option("--ones", sf->ones, "Threshold pattern with this many ones");
    se->add_flag("--worst", sf->worst, "Scan every threshold pattern and report the worst")->excludes(ones_opt);
    se->callback([&G, sf] {
        const double limit = std::ceil((1.0 - 2.0 * sf->eps) * static_cast<double>(sf->n));
        const std::size_t def = limit >= 1 ? static_cast<std::size_t>(limit) - 1 : 0;
        std::vector<std::size_t> ks;
        if (sf->worst)
            for (std::size_t k = 0; k <= def; ++k) ks.push_back(k);
        else
            ks.push_back(sf->ones.value_or(def));
        json best;
        double best_emp = -1;
        for (std::size_t idx = 0; idx < ks.size(); ++idx) {
            const auto res = dptkit::serfling_mc(sf->gamma, sf->eps, dptkit::threshold_pattern(sf->n, ks[idx]),
                                                 sf->trials, dptkit::derive_seed(G.seed, ks[idx]));
            if (res.empirical > best_emp) {
                best_emp = res.empirical;
                best = {{"n", sf->n},        {"gamma", sf->gamma}, {"eps", sf->eps},
                        {"ones", ks[idx]},   {"trials", res.trials}, {"empirical", res.empirical},
                        {"bound", res.bound}, {"stderr", res.stderr_},
                        {"within_bound", res.empirical <= res.bound + 3.0 * res.stderr_}};
            }
        }
        if (sf->worst) best["patterns_scanned"] = ks.size();
        best["seed"] = G.seed;
        Output(G).emit(best);
    });
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"dptkit: nonlocal games, partition bounds, direct-product bounds and leaky DIQKD"};
    app.name("dptkit");
    Globals G;
    app.add_option("--seed", G.seed, "Master seed (default 0)");
    G.format_opt = app.add_option("--format", G.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--out", G.out, "Write the primary output to this file");
    app.require_subcommand(1);

    setup_game(app, G);
    setup_bounds(app, G);
    setup_dpt(app, G);
    setup_diqkd(app, G);
    for (auto* sub : app.get_subcommands({})) {
        sub->fallthrough();
        for (auto* leaf : sub->get_subcommands({})) leaf->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    } catch (const UsageError& e) {
        std::cerr << "dptkit: " << e.what() << '\n';
        return 1;
    } catch (const dptkit::DomainError& e) {
        std::cerr << "dptkit: " << e.what() << '\n';
        return 1;
    } catch (const dptkit::DimensionError& e) {
        std::cerr << "dptkit: " << e.what() << '\n';
        return 1;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "dptkit: bad JSON input: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "dptkit: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
