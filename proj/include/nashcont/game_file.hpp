#ifndef NASHCONT_GAME_FILE_HPP
#define NASHCONT_GAME_FILE_HPP

#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "nashcont/game.hpp"

namespace nashcont {

/// JSON game document:
///   {"players": 2, "strategies": [2, 2],
///    "payoffs": [[u_1 over outcomes], [u_2 over outcomes]],
///    "labels": {"players": [...], "strategies": [[...], [...]]}}
/// Outcomes follow GameFormat::outcome_index (player 1 varies fastest).
/// "payoffs" may also be one flat list holding player 1's row, then player 2's, ...
struct GameFile {
  Game game;
  std::vector<std::string> player_labels;
  std::vector<std::vector<std::string>> strategy_labels;
};

inline GameFile game_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("game document must be a JSON object");
  const auto counts = j.at("strategies").get<std::vector<int>>();
  if (j.contains("players") && j.at("players").get<int>() != static_cast<int>(counts.size()))
    throw std::invalid_argument("'players' does not match the length of 'strategies'");
  const auto format = GameFormat::from_strategy_counts(counts);
  const auto& pj = j.at("payoffs");
  std::vector<std::vector<double>> payoffs;
  if (!pj.empty() && pj.front().is_array()) {
    payoffs = pj.get<std::vector<std::vector<double>>>();
  } else {
    const auto flat = pj.get<std::vector<double>>();
    if (flat.size() != format.outcomes() * static_cast<std::size_t>(format.players()))
      throw std::invalid_argument("flat payoff list must hold players x outcomes = " +
                                  std::to_string(format.outcomes() * static_cast<std::size_t>(format.players())) +
                                  " entries, got " + std::to_string(flat.size()));
    for (int i = 0; i < format.players(); ++i)
      payoffs.emplace_back(flat.begin() + static_cast<std::ptrdiff_t>(format.outcomes() * static_cast<std::size_t>(i)),
                           flat.begin() + static_cast<std::ptrdiff_t>(format.outcomes() * static_cast<std::size_t>(i + 1)));
  }
  GameFile g{Game(format, std::move(payoffs)), {}, {}};
  if (j.contains("labels")) {
    const auto& l = j.at("labels");
    if (l.contains("players")) g.player_labels = l.at("players").get<std::vector<std::string>>();
    if (l.contains("strategies")) g.strategy_labels = l.at("strategies").get<std::vector<std::vector<std::string>>>();
    if (!g.player_labels.empty() && g.player_labels.size() != counts.size())
      throw std::invalid_argument("need one player label per player");
    if (!g.strategy_labels.empty()) {
      if (g.strategy_labels.size() != counts.size()) throw std::invalid_argument("need strategy labels for every player");
      for (std::size_t i = 0; i < counts.size(); ++i)
        if (static_cast<int>(g.strategy_labels[i].size()) != counts[i])
          throw std::invalid_argument("player " + std::to_string(i + 1) + " has the wrong number of strategy labels");
    }
  }
  return g;
}

inline nlohmann::json game_to_json(const GameFile& g) {
  nlohmann::json j;
  const auto& f = g.game.format();
  std::vector<int> counts;
  for (int i = 0; i < f.players(); ++i) counts.push_back(f.strategies(i));
  j["players"] = f.players();
  j["strategies"] = counts;
  j["payoffs"] = g.game.payoffs();
  if (!g.player_labels.empty()) j["labels"]["players"] = g.player_labels;
  if (!g.strategy_labels.empty()) j["labels"]["strategies"] = g.strategy_labels;
  return j;
}

inline GameFile read_game(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open game file '" + path + "'");
  try {
    return game_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("game file '" + path + "': " + e.what());
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error("game file '" + path + "': " + e.what());
  }
}

inline void write_game(const GameFile& g, const std::string& path) {
  std::ofstream out(path);
  out << game_to_json(g).dump(2) << '\n';
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
}

}  // namespace nashcont

#endif  // NASHCONT_GAME_FILE_HPP
