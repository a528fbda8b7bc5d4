#pragma once

#include "mpg/game_model.hpp"

#include <json.hpp>

#include <string>

namespace mpg {

/// Reads {"states": [...], "entries": [{state, min_action, max_action, payment, transition}]}.
/// Missing transition keys mean probability 0.
RawGame parse_game_json(const nlohmann::json& doc);

GameSpec load_game(const std::string& path, const ValidateOptions& options = {});
GameSpec game_from_text(const std::string& text, const ValidateOptions& options = {});

/// Inverse of parse_game_json, writing payments r in place of the stored ones.
nlohmann::json game_to_json(const GameSpec& game, const PaymentVector& r);
inline nlohmann::json game_to_json(const GameSpec& game) { return game_to_json(game, game.payments()); }

} // namespace mpg
