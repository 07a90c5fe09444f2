// json_io.hpp
// Game and adversary-script JSON readers/writers.
//
// Game schema:
//   { "name": str?, "players": k, "inputs": [[labels]...], "outputs": [[labels]...],
//     "p": [numbers, row-major over the input tuple, player 0 most significant],
//     "V": [0/1 or bools, index out * num_inputs + in] | "magic_square" | "mse" | "chsh" }
// A string V selects the builtin game; other fields are then optional and
// `p`, when present, replaces the builtin input distribution.
//
// Adversary schema:
//   { "rounds": [ { "from": party, "to": party, "bits": k, "function_id": str,
//                   "after_outputs": bool? } ... ] }

#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dptkit/diqkd.hpp"
#include "dptkit/errors.hpp"
#include "dptkit/games.hpp"

namespace dptkit {

using json = nlohmann::json;

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw DomainError("'" + path + "' is not valid JSON: " + e.what());
    }
}

namespace detail {

inline std::vector<LabelSet> label_lists(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_array()) throw DomainError(std::string("game JSON: missing list '") + key + "'");
    std::vector<LabelSet> out;
    for (const auto& row : j[key]) {
        if (!row.is_array() || row.empty()) throw DomainError(std::string("game JSON: '") + key + "' entries must be nonempty lists");
        LabelSet s;
        for (const auto& v : row) s.push_back(v.is_string() ? v.get<std::string>() : v.dump());
        out.push_back(std::move(s));
    }
    return out;
}

inline std::vector<double> number_list(const json& j, const char* what) {
    if (!j.is_array()) throw DomainError(std::string("game JSON: '") + what + "' must be a list");
    std::vector<double> v;
    for (const auto& x : j) {
        if (!x.is_number()) throw DomainError(std::string("game JSON: '") + what + "' must hold numbers");
        v.push_back(x.get<double>());
    }
    return v;
}

} // namespace detail

inline GamePredicate game_from_json(const json& j) {
    if (!j.is_object()) throw DomainError("game JSON: expected an object");
    if (!j.contains("V")) throw DomainError("game JSON: missing 'V'");
    const auto& V = j["V"];
    if (V.is_string()) {
        GamePredicate g = builtin_game(V.get<std::string>());
        if (!j.contains("p")) return g;
        std::vector<LabelSet> in, out;
        for (std::size_t k = 0; k < g.players(); ++k) {
            in.push_back(g.input_labels(k));
            out.push_back(g.output_labels(k));
        }
        std::vector<std::uint8_t> table(g.num_inputs() * g.num_outputs());
        for (std::size_t o = 0; o < g.num_outputs(); ++o)
            for (std::size_t i = 0; i < g.num_inputs(); ++i) table[o * g.num_inputs() + i] = g.wins(o, i);
        GamePredicate h(g.name(), in, out, detail::number_list(j["p"], "p"), std::move(table));
        h.suggested_dims = g.suggested_dims;
        return h;
    }
    auto inputs = detail::label_lists(j, "inputs");
    auto outputs = detail::label_lists(j, "outputs");
    if (inputs.size() != outputs.size()) throw DomainError("game JSON: 'inputs' and 'outputs' differ in length");
    if (j.contains("players") && j["players"].get<std::size_t>() != inputs.size())
        throw DomainError("game JSON: 'players' disagrees with 'inputs'");
    if (!j.contains("p")) throw DomainError("game JSON: missing 'p'");
    if (!V.is_array()) throw DomainError("game JSON: 'V' must be a list or a builtin name");
    std::vector<std::uint8_t> table;
    for (const auto& v : V) {
        if (v.is_boolean()) table.push_back(v.get<bool>());
        else if (v.is_number_integer() && (v.get<int>() == 0 || v.get<int>() == 1)) table.push_back(static_cast<std::uint8_t>(v.get<int>()));
        else throw DomainError("game JSON: 'V' entries must be 0/1 or booleans");
    }
    return GamePredicate(j.value("name", std::string("game")), std::move(inputs), std::move(outputs),
                         detail::number_list(j["p"], "p"), std::move(table));
}

inline json game_to_json(const GamePredicate& g) {
    json j;
    j["name"] = g.name();
    j["players"] = g.players();
    j["inputs"] = json::array();
    j["outputs"] = json::array();
    for (std::size_t k = 0; k < g.players(); ++k) {
        j["inputs"].push_back(g.input_labels(k));
        j["outputs"].push_back(g.output_labels(k));
    }
    std::vector<double> p(g.num_inputs());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = g.prob(i);
    j["p"] = p;
    std::vector<int> v(g.num_inputs() * g.num_outputs());
    for (std::size_t o = 0; o < g.num_outputs(); ++o)
        for (std::size_t i = 0; i < g.num_inputs(); ++i) v[o * g.num_inputs() + i] = g.wins(o, i) ? 1 : 0;
    j["V"] = v;
    return j;
}

inline AdversaryScript adversary_from_json(const json& j) {
    if (!j.is_object() || !j.contains("rounds") || !j["rounds"].is_array())
        throw DomainError("adversary JSON: expected {\"rounds\": [...]}");
    AdversaryScript s;
    for (const auto& r : j["rounds"]) {
        AdversaryRound round;
        round.from = parse_party(r.at("from").get<std::string>());
        round.to = parse_party(r.at("to").get<std::string>());
        if (round.from == round.to) throw DomainError("adversary JSON: a round must connect two different parties");
        const auto bits = r.at("bits");
        if (!bits.is_number_integer() || bits.get<long long>() < 0)
            throw DomainError("adversary JSON: 'bits' must be a nonnegative integer");
        round.bits = bits.get<std::size_t>();
        round.function_id = r.at("function_id").get<std::string>();
        if (round.function_id != "alice_inputs" && round.function_id != "bob_inputs" && round.function_id != "random")
            throw DomainError("adversary JSON: unknown function_id '" + round.function_id + "'");
        round.after_outputs = r.value("after_outputs", false);
        s.rounds.push_back(round);
    }
    return s;
}

} // namespace dptkit
