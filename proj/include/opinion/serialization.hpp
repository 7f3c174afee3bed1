#pragma once

#include <json.hpp>

#include <string>
#include <variant>

#include "opinion/clique.hpp"
#include "opinion/game.hpp"
#include "opinion/lowerbound.hpp"

namespace opinion {

/// Malformed or schema-violating input; the CLI maps this to its usage exit
/// code.
struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using GameFile = std::variant<QuadraticGame, HeterogeneousGame, CliqueGame, NonconvexExample>;

nlohmann::json to_json(const Matrix& m);
nlohmann::json to_json(const Vector& v);
Matrix matrix_from_json(const nlohmann::json& j);
Vector vector_from_json(const nlohmann::json& j);

nlohmann::json to_json(const CostFunction& f);
CostFunction cost_function_from_json(const nlohmann::json& j);

nlohmann::json to_json(const QuadraticGame& game);
nlohmann::json to_json(const HeterogeneousGame& game);
nlohmann::json to_json(const CliqueGame& game);
nlohmann::json to_json(const NonconvexExample& game);
nlohmann::json to_json(const GameFile& file);

GameFile game_from_json(const nlohmann::json& j);

GameFile load_game(const std::string& path);
void save_game(const GameFile& file, const std::string& path);

}  // namespace opinion
