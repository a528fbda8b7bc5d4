#include "mpg/game_io.hpp"

#include "mpg/error.hpp"

#include <fstream>
#include <sstream>

namespace mpg {

namespace {

const nlohmann::json& require(const nlohmann::json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) throw Error(ErrorCode::MissingKey, std::string("missing key '") + key + "'");
    return *it;
}

std::string require_string(const nlohmann::json& obj, const char* key) {
    const auto& v = require(obj, key);
    if (!v.is_string()) throw Error(ErrorCode::InvalidFormat, std::string("'") + key + "' must be a string");
    return v.get<std::string>();
}

} // namespace

RawGame parse_game_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw Error(ErrorCode::InvalidFormat, "game description must be a JSON object");
    RawGame raw;
    const auto& states = require(doc, "states");
    if (!states.is_array()) throw Error(ErrorCode::InvalidFormat, "'states' must be an array");
    for (const auto& s : states) {
        if (!s.is_string()) throw Error(ErrorCode::InvalidFormat, "state identifiers must be strings");
        raw.states.push_back(s.get<std::string>());
    }
    const auto& entries = require(doc, "entries");
    if (!entries.is_array()) throw Error(ErrorCode::InvalidFormat, "'entries' must be an array");
    for (const auto& e : entries) {
        if (!e.is_object()) throw Error(ErrorCode::InvalidFormat, "entries must be objects");
        RawEntry re;
        re.state = require_string(e, "state");
        re.min_action = require_string(e, "min_action");
        re.max_action = require_string(e, "max_action");
        if (auto it = e.find("payment"); it != e.end()) {
            if (!it->is_number()) throw Error(ErrorCode::InvalidFormat, "'payment' must be a number");
            re.payment = it->get<double>();
        }
        const auto& tr = require(e, "transition");
        if (!tr.is_object()) throw Error(ErrorCode::InvalidFormat, "'transition' must be an object");
        for (auto it = tr.begin(); it != tr.end(); ++it) {
            if (!it.value().is_number())
                throw Error(ErrorCode::InvalidFormat, "transition probabilities must be numbers");
            re.transition.emplace_back(it.key(), it.value().get<double>());
        }
        raw.entries.push_back(std::move(re));
    }
    return raw;
}

GameSpec game_from_text(const std::string& text, const ValidateOptions& options) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::InvalidFormat, std::string("JSON parse error: ") + e.what());
    }
    return validate(parse_game_json(doc), options);
}

GameSpec load_game(const std::string& path, const ValidateOptions& options) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::InvalidFormat, "cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return game_from_text(buf.str(), options);
}

nlohmann::json game_to_json(const GameSpec& game, const PaymentVector& r) {
    game.check_payments(r);
    nlohmann::json doc;
    doc["states"] = game.state_ids();
    auto entries = nlohmann::json::array();
    for (std::size_t k = 0; k < game.key_count(); ++k) {
        const SlotKey& key = game.key(k);
        const MinAction& act = game.action(key.state, key.min_action);
        const Branch& br = act.branches[key.max_action];
        nlohmann::json tr = nlohmann::json::object();
        for (std::size_t j : br.support) tr[game.state_id(j)] = br.row[j];
        entries.push_back({{"state", game.state_id(key.state)},
                           {"min_action", act.id},
                           {"max_action", br.id},
                           {"payment", r[k]},
                           {"transition", tr}});
    }
    doc["entries"] = std::move(entries);
    return doc;
}

} // namespace mpg
