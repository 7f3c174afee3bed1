#include "opinion/serialization.hpp"

#include <fstream>

namespace opinion {

using nlohmann::json;

namespace {

constexpr int kSchemaVersion = 1;

const json& require(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) throw SchemaError(std::string("missing field: ") + key);
  return *it;
}

double number(const json& j, const char* what) {
  if (!j.is_number()) throw SchemaError(std::string(what) + ": expected a number");
  return j.get<double>();
}

int integer(const json& j, const char* what) {
  if (!j.is_number_integer()) throw SchemaError(std::string(what) + ": expected an integer");
  return j.get<int>();
}

}  // namespace

json to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(v[k]);
  return out;
}

Matrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw SchemaError("matrix: expected a nonempty array of rows");
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  if (cols == 0) throw SchemaError("matrix: expected nonempty rows");
  Matrix m(j.size(), cols);
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != cols) throw SchemaError("matrix: ragged rows");
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = number(j[r][c], "matrix entry");
  }
  return m;
}

Vector vector_from_json(const json& j) {
  if (!j.is_array()) throw SchemaError("vector: expected an array");
  Vector v(j.size());
  for (std::size_t k = 0; k < j.size(); ++k) v[k] = number(j[k], "vector entry");
  return v;
}

json to_json(const CostFunction& f) {
  using Kind = CostFunction::Kind;
  json out;
  switch (f.kind()) {
    case Kind::QuadraticForm:
      out["kind"] = "quadratic_form";
      out["M"] = to_json(f.matrix());
      break;
    case Kind::PowerNorm:
      out["kind"] = "power_norm";
      out["alpha"] = f.exponent();
      out["p"] = f.norm_p();
      out["dim"] = f.input_dim();
      break;
    case Kind::Norm:
      out["kind"] = "norm";
      out["p"] = f.norm_p();
      out["dim"] = f.input_dim();
      break;
    case Kind::Linear:
      out["kind"] = "linear";
      out["c"] = to_json(f.offset_vector());
      out["c0"] = f.scalar_offset();
      break;
    case Kind::Exp:
      out["kind"] = "exp";
      out["inner"] = to_json(f.child());
      break;
    case Kind::Cosh:
      out["kind"] = "cosh";
      out["inner"] = to_json(f.child());
      break;
    case Kind::Scale:
      out["kind"] = "scale";
      out["w"] = f.weight();
      out["f"] = to_json(f.child());
      break;
    case Kind::Sum:
      out["kind"] = "sum";
      out["f"] = to_json(f.left());
      out["g"] = to_json(f.right());
      break;
    case Kind::AffinePre:
      out["kind"] = "affine_pre";
      out["A"] = to_json(f.matrix());
      out["v0"] = to_json(f.offset_vector());
      out["f"] = to_json(f.child());
      break;
  }
  return out;
}

CostFunction cost_function_from_json(const json& j) {
  if (!j.is_object()) throw SchemaError("cost function: expected an object");
  const std::string kind = require(j, "kind").get<std::string>();
  try {
    if (kind == "quadratic_form") return CostFunction::quadratic_form(matrix_from_json(require(j, "M")));
    if (kind == "power_norm")
      return CostFunction::power_norm(number(require(j, "alpha"), "alpha"),
                                      number(require(j, "p"), "p"),
                                      integer(require(j, "dim"), "dim"));
    if (kind == "norm")
      return CostFunction::norm(number(require(j, "p"), "p"), integer(require(j, "dim"), "dim"));
    if (kind == "linear")
      return CostFunction::linear(vector_from_json(require(j, "c")),
                                  number(require(j, "c0"), "c0"));
    if (kind == "exp") return CostFunction::exp_of(cost_function_from_json(require(j, "inner")));
    if (kind == "cosh") return CostFunction::cosh_of(cost_function_from_json(require(j, "inner")));
    if (kind == "scale")
      return CostFunction::scaled(number(require(j, "w"), "w"),
                                  cost_function_from_json(require(j, "f")));
    if (kind == "sum")
      return CostFunction::sum(cost_function_from_json(require(j, "f")),
                               cost_function_from_json(require(j, "g")));
    if (kind == "affine_pre")
      return CostFunction::affine_pre(matrix_from_json(require(j, "A")),
                                      vector_from_json(require(j, "v0")),
                                      cost_function_from_json(require(j, "f")));
  } catch (const ValidationError& e) {
    throw SchemaError(std::string("cost function: ") + e.what());
  } catch (const DimensionError& e) {
    throw SchemaError(std::string("cost function: ") + e.what());
  }
  throw SchemaError("cost function: unknown kind '" + kind + "'");
}

json to_json(const QuadraticGame& game) {
  json out;
  out["schema_version"] = kSchemaVersion;
  out["kind"] = "quadratic";
  json persons = json::array();
  for (int i = 0; i < game.person_count(); ++i) {
    json person;
    person["dim"] = game.dim;
    person["R"] = to_json(game.internal_weight[i]);
    person["s"] = to_json(game.internal_opinion[i]);
    persons.push_back(std::move(person));
  }
  out["persons"] = std::move(persons);
  json edges = json::array();
  for (const auto& [key, w] : game.weight) {
    json edge;
    edge["i"] = key.first;
    edge["j"] = key.second;
    edge["W"] = to_json(w);
    edges.push_back(std::move(edge));
  }
  out["edges"] = std::move(edges);
  if (game.unsafe_indefinite) out["unsafe_indefinite"] = true;
  return out;
}

namespace {

json heterogeneous_body(const HeterogeneousGame& game) {
  json out;
  out["schema_version"] = kSchemaVersion;
  out["kind"] = "heterogeneous";
  json persons = json::array();
  for (int i = 0; i < game.person_count(); ++i) {
    json person;
    person["dim"] = game.dims[i];
    if (game.internal[i]) {
      person["g"] = to_json(game.internal[i]->cost);
      person["R"] = to_json(game.internal[i]->map);
      person["s"] = to_json(game.internal[i]->anchor);
    }
    persons.push_back(std::move(person));
  }
  out["persons"] = std::move(persons);
  json edges = json::array();
  for (const auto& [key, f] : game.pairwise) {
    json edge;
    edge["i"] = key.first;
    edge["j"] = key.second;
    edge["f"] = to_json(f.cost);
    edge["A"] = to_json(f.own_map);
    edge["B"] = to_json(f.other_map);
    edges.push_back(std::move(edge));
  }
  out["edges"] = std::move(edges);
  return out;
}

}  // namespace

json to_json(const HeterogeneousGame& game) { return heterogeneous_body(game); }

json to_json(const CliqueGame& game) {
  json out = heterogeneous_body(game.base);
  out["kind"] = "clique";
  out["cliques"] = game.cliques;
  return out;
}

json to_json(const NonconvexExample& game) {
  json out;
  out["schema_version"] = kSchemaVersion;
  out["kind"] = "nonconvex";
  out["epsilon"] = game.epsilon;
  return out;
}

json to_json(const GameFile& file) {
  return std::visit([](const auto& game) { return to_json(game); }, file);
}

namespace {

QuadraticGame quadratic_from_json(const json& j) {
  QuadraticGame game;
  const json& persons = require(j, "persons");
  if (!persons.is_array() || persons.empty()) throw SchemaError("quadratic: no persons");
  game.dim = integer(require(persons[0], "dim"), "dim");
  for (const auto& person : persons) {
    if (integer(require(person, "dim"), "dim") != game.dim)
      throw SchemaError("quadratic: persons must share one dimension");
    game.internal_weight.push_back(matrix_from_json(require(person, "R")));
    game.internal_opinion.push_back(vector_from_json(require(person, "s")));
  }
  for (const auto& edge : require(j, "edges")) {
    const int i = integer(require(edge, "i"), "i");
    const int k = integer(require(edge, "j"), "j");
    if (!game.weight.emplace(std::make_pair(i, k), matrix_from_json(require(edge, "W"))).second)
      throw SchemaError("quadratic: duplicate edge");
  }
  game.unsafe_indefinite = j.value("unsafe_indefinite", false);
  const QuadraticValidation report = validate(game);
  if (!report.ok) throw SchemaError("quadratic: " + report.issue);
  return game;
}

HeterogeneousGame heterogeneous_from_json(const json& j) {
  HeterogeneousGame game;
  const json& persons = require(j, "persons");
  if (!persons.is_array() || persons.empty()) throw SchemaError("heterogeneous: no persons");
  for (const auto& person : persons) {
    game.dims.push_back(integer(require(person, "dim"), "dim"));
    if (person.contains("g")) {
      game.internal.push_back(InternalCost{cost_function_from_json(require(person, "g")),
                                           matrix_from_json(require(person, "R")),
                                           vector_from_json(require(person, "s"))});
    } else {
      game.internal.emplace_back();
    }
  }
  for (const auto& edge : require(j, "edges")) {
    const int i = integer(require(edge, "i"), "i");
    const int k = integer(require(edge, "j"), "j");
    PairwiseCost cost{cost_function_from_json(require(edge, "f")),
                      matrix_from_json(require(edge, "A")),
                      matrix_from_json(require(edge, "B"))};
    if (!game.pairwise.emplace(std::make_pair(i, k), std::move(cost)).second)
      throw SchemaError("heterogeneous: duplicate edge");
  }
  try {
    validate(game);
  } catch (const ValidationError& e) {
    throw SchemaError(std::string("heterogeneous: ") + e.what());
  }
  return game;
}

}  // namespace

GameFile game_from_json(const json& j) {
  if (!j.is_object()) throw SchemaError("game: expected a JSON object");
  const int version = integer(require(j, "schema_version"), "schema_version");
  if (version != kSchemaVersion) throw SchemaError("game: unsupported schema version");
  const std::string kind = require(j, "kind").get<std::string>();
  if (kind == "quadratic") return quadratic_from_json(j);
  if (kind == "heterogeneous") return heterogeneous_from_json(j);
  if (kind == "clique") {
    CliqueGame game;
    game.base = heterogeneous_from_json(j);
    const json& cliques = require(j, "cliques");
    if (!cliques.is_array()) throw SchemaError("clique: cliques must be an array");
    for (const auto& members : cliques) {
      std::vector<int> clique;
      for (const auto& m : members) clique.push_back(integer(m, "clique member"));
      game.cliques.push_back(std::move(clique));
    }
    try {
      validate(game);
    } catch (const ValidationError& e) {
      throw SchemaError(std::string("clique: ") + e.what());
    }
    return game;
  }
  if (kind == "nonconvex") {
    const double epsilon = number(require(j, "epsilon"), "epsilon");
    if (!(epsilon > 0.0)) throw SchemaError("nonconvex: epsilon must be positive");
    return NonconvexExample{epsilon};
  }
  throw SchemaError("game: unknown kind '" + kind + "'");
}

GameFile load_game(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open game file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw SchemaError(std::string("invalid JSON: ") + e.what());
  }
  return game_from_json(j);
}

void save_game(const GameFile& file, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw SchemaError("cannot write game file: " + path);
  out << to_json(file).dump(2) << '\n';
}

}  // namespace opinion
