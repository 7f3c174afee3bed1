#include "opinion/game.hpp"

#include <cmath>
#include <sstream>

namespace opinion {

namespace {

void check_profile(const std::vector<int>& dims, const OpinionProfile& z) {
  if (z.size() != dims.size()) throw DimensionError("profile: wrong block count");
  for (std::size_t i = 0; i < dims.size(); ++i)
    if (z[i].size() != dims[i]) throw DimensionError("profile: wrong block dimension");
}

std::vector<int> quadratic_dims(const QuadraticGame& game) {
  return std::vector<int>(game.person_count(), game.dim);
}

}  // namespace

bool is_positive_definite(const Matrix& m, double tol) {
  if (m.rows() != m.cols() || m.rows() == 0) return false;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff() > tol;
}

bool is_positive_semidefinite(const Matrix& m, double tol) {
  if (m.rows() != m.cols() || m.rows() == 0) return false;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff() >= -tol;
}

void validate(const HeterogeneousGame& game) {
  const int n = game.person_count();
  if (static_cast<int>(game.internal.size()) != n)
    throw ValidationError("game: internal slot count != person count");
  for (int i = 0; i < n; ++i) {
    if (game.dims[i] < 1) throw ValidationError("game: nonpositive opinion dimension");
    if (!game.internal[i]) continue;
    const InternalCost& g = *game.internal[i];
    if (!g.cost.valid() || !is_catalogued(g.cost))
      throw ValidationError("game: internal cost not a catalogued construction");
    if (g.map.cols() != game.dims[i]) throw ValidationError("game: internal map column mismatch");
    if (g.map.rows() != g.cost.input_dim() || g.anchor.size() != g.map.rows())
      throw ValidationError("game: internal map/anchor dimension mismatch");
  }
  for (const auto& [key, f] : game.pairwise) {
    const auto [i, j] = key;
    if (i < 0 || j < 0 || i >= n || j >= n || i == j)
      throw ValidationError("game: bad pairwise indices");
    if (!f.cost.valid() || !is_catalogued(f.cost))
      throw ValidationError("game: pairwise cost not a catalogued construction");
    const int d = f.cost.input_dim();
    if (f.own_map.rows() != d || f.other_map.rows() != d)
      throw ValidationError("game: pairwise map row mismatch");
    if (f.own_map.cols() != game.dims[i] || f.other_map.cols() != game.dims[j])
      throw ValidationError("game: pairwise map column mismatch");
  }
}

QuadraticValidation validate(const QuadraticGame& game) {
  QuadraticValidation report;
  const int n = game.person_count();
  auto fail = [&](std::string issue) {
    report.ok = false;
    report.issue = std::move(issue);
    return report;
  };
  if (game.dim < 1) return fail("nonpositive opinion dimension");
  if (static_cast<int>(game.internal_opinion.size()) != n)
    return fail("internal opinion count != person count");
  report.internal_pd.resize(n, false);
  for (int i = 0; i < n; ++i) {
    const Matrix& r = game.internal_weight[i];
    if (r.rows() != game.dim || r.cols() != game.dim) return fail("internal weight shape");
    if (!r.isApprox(r.transpose(), 1e-12)) return fail("internal weight not symmetric");
    if (!is_positive_semidefinite(r)) return fail("internal weight not PSD");
    if (game.internal_opinion[i].size() != game.dim) return fail("internal opinion dimension");
    report.internal_pd[i] = is_positive_definite(r);
  }
  for (const auto& [key, w] : game.weight) {
    const auto [i, j] = key;
    if (i < 0 || j < 0 || i >= n || j >= n || i == j) return fail("bad edge indices");
    if (w.rows() != game.dim || w.cols() != game.dim) return fail("edge weight shape");
    if (!w.isApprox(w.transpose(), 1e-12)) return fail("edge weight not symmetric");
    if (!game.unsafe_indefinite && !is_positive_semidefinite(w)) {
      std::ostringstream msg;
      msg << "edge weight (" << i << ", " << j << ") not PSD";
      return fail(msg.str());
    }
  }
  return report;
}

void require_valid(const QuadraticGame& game) {
  const QuadraticValidation report = validate(game);
  if (!report.ok) throw ValidationError("quadratic game: " + report.issue);
}

double person_cost(const HeterogeneousGame& game, int person, const OpinionProfile& z) {
  check_profile(game.dims, z);
  double total = 0.0;
  if (game.internal[person]) {
    const InternalCost& g = *game.internal[person];
    total += g.cost.value(g.map * z[person] - g.anchor);
  }
  for (const auto& [key, f] : game.pairwise) {
    if (key.first != person) continue;
    total += f.cost.value(f.own_map * z[person] + f.other_map * z[key.second]);
  }
  return total;
}

double person_cost(const QuadraticGame& game, int person, const OpinionProfile& z) {
  check_profile(quadratic_dims(game), z);
  const Vector d = z[person] - game.internal_opinion[person];
  double total = d.dot(game.internal_weight[person] * d);
  for (const auto& [key, w] : game.weight) {
    if (key.first != person) continue;
    const Vector diff = z[person] - z[key.second];
    total += diff.dot(w * diff);
  }
  return total;
}

double social_cost(const HeterogeneousGame& game, const OpinionProfile& z) {
  double total = 0.0;
  for (int i = 0; i < game.person_count(); ++i) total += person_cost(game, i, z);
  return total;
}

double social_cost(const QuadraticGame& game, const OpinionProfile& z) {
  double total = 0.0;
  for (int i = 0; i < game.person_count(); ++i) total += person_cost(game, i, z);
  return total;
}

Vector person_gradient(const HeterogeneousGame& game, int person, const OpinionProfile& z) {
  check_profile(game.dims, z);
  Vector grad = Vector::Zero(game.dims[person]);
  if (game.internal[person]) {
    const InternalCost& g = *game.internal[person];
    grad += g.map.transpose() * g.cost.gradient(g.map * z[person] - g.anchor);
  }
  for (const auto& [key, f] : game.pairwise) {
    if (key.first != person) continue;
    grad += f.own_map.transpose() *
            f.cost.gradient(f.own_map * z[person] + f.other_map * z[key.second]);
  }
  return grad;
}

Vector person_gradient(const QuadraticGame& game, int person, const OpinionProfile& z) {
  check_profile(quadratic_dims(game), z);
  Vector grad = 2.0 * (game.internal_weight[person] * (z[person] - game.internal_opinion[person]));
  for (const auto& [key, w] : game.weight) {
    if (key.first != person) continue;
    grad += 2.0 * (w * (z[person] - z[key.second]));
  }
  return grad;
}

OpinionProfile social_gradient(const HeterogeneousGame& game, const OpinionProfile& z) {
  check_profile(game.dims, z);
  OpinionProfile grad;
  grad.reserve(game.dims.size());
  for (int d : game.dims) grad.push_back(Vector::Zero(d));
  for (int i = 0; i < game.person_count(); ++i) {
    if (!game.internal[i]) continue;
    const InternalCost& g = *game.internal[i];
    grad[i] += g.map.transpose() * g.cost.gradient(g.map * z[i] - g.anchor);
  }
  for (const auto& [key, f] : game.pairwise) {
    const auto [i, j] = key;
    const Vector inner_grad = f.cost.gradient(f.own_map * z[i] + f.other_map * z[j]);
    grad[i] += f.own_map.transpose() * inner_grad;
    grad[j] += f.other_map.transpose() * inner_grad;
  }
  return grad;
}

SymmetryReport check_symmetric(const HeterogeneousGame& game) {
  for (const auto& [key, f] : game.pairwise) {
    const auto [i, j] = key;
    SymmetryReport fail{false, i, j, ""};
    const auto mirror = game.pairwise.find({j, i});
    if (mirror == game.pairwise.end()) {
      fail.detail = "mirror pair absent";
      return fail;
    }
    const PairwiseCost& g = mirror->second;
    if (f.cost.input_dim() != g.cost.input_dim()) {
      fail.detail = "pair dimensions differ";
      return fail;
    }
    if (!structurally_equal(f.cost, g.cost)) {
      fail.detail = "pair cost functions differ";
      return fail;
    }
    if (f.own_map != g.other_map || f.other_map != g.own_map) {
      fail.detail = "pair maps not mirrored";
      return fail;
    }
  }
  return {};
}

SymmetryReport check_symmetric(const QuadraticGame& game) {
  for (const auto& [key, w] : game.weight) {
    const auto [i, j] = key;
    SymmetryReport fail{false, i, j, ""};
    const auto mirror = game.weight.find({j, i});
    if (mirror == game.weight.end()) {
      fail.detail = "mirror edge absent";
      return fail;
    }
    if (w != mirror->second) {
      fail.detail = "edge weights differ";
      return fail;
    }
  }
  return {};
}

Matrix psd_sqrt(const Matrix& m) {
  if (m.rows() != m.cols()) throw DimensionError("psd_sqrt: matrix not square");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
  Vector values = eig.eigenvalues();
  for (Eigen::Index k = 0; k < values.size(); ++k) {
    if (values[k] < -1e-10) throw ValidationError("psd_sqrt: matrix has a negative eigenvalue");
    values[k] = std::sqrt(std::max(values[k], 0.0));
  }
  return eig.eigenvectors() * values.asDiagonal() * eig.eigenvectors().transpose();
}

HeterogeneousGame quadratic_to_heterogeneous(const QuadraticGame& game) {
  require_valid(game);
  const int n = game.person_count();
  HeterogeneousGame out;
  out.dims.assign(n, game.dim);
  out.internal.resize(n);
  const Matrix identity = Matrix::Identity(game.dim, game.dim);
  for (int i = 0; i < n; ++i) {
    out.internal[i] = InternalCost{CostFunction::quadratic_form(psd_sqrt(game.internal_weight[i])),
                                   identity, game.internal_opinion[i]};
  }
  for (const auto& [key, w] : game.weight) {
    // The mirrored pair flips both maps so that A_ij = B_ji; the quadratic
    // form is even, so the cost is still the difference penalty.
    const double sign = key.first < key.second ? 1.0 : -1.0;
    out.pairwise.emplace(key, PairwiseCost{CostFunction::quadratic_form(psd_sqrt(w)),
                                           sign * identity, -sign * identity});
  }
  return out;
}

QuadraticGame fj_to_quadratic(const std::vector<double>& anchor_weight,
                              const std::vector<Vector>& anchor_opinion,
                              const std::map<std::pair<int, int>, double>& edge_weight,
                              const Matrix& topic_coupling) {
  const int n = static_cast<int>(anchor_weight.size());
  const int m = static_cast<int>(topic_coupling.rows());
  if (topic_coupling.cols() != m) throw ValidationError("fj_to_quadratic: coupling not square");
  if (!topic_coupling.isApprox(topic_coupling.transpose(), 1e-12))
    throw ValidationError("fj_to_quadratic: coupling not symmetric");
  for (int r = 0; r < m; ++r) {
    double row = 0.0;
    for (int c = 0; c < m; ++c) {
      if (topic_coupling(r, c) < 0.0)
        throw ValidationError("fj_to_quadratic: coupling has a negative entry");
      row += topic_coupling(r, c);
    }
    if (std::abs(row - 1.0) > 1e-10)
      throw ValidationError("fj_to_quadratic: coupling not row-stochastic");
  }
  if (!is_positive_semidefinite(topic_coupling))
    throw ValidationError("fj_to_quadratic: coupling not PSD");
  if (static_cast<int>(anchor_opinion.size()) != n)
    throw ValidationError("fj_to_quadratic: opinion count mismatch");
  for (const auto& s : anchor_opinion)
    if (s.size() != m) throw ValidationError("fj_to_quadratic: opinion dimension mismatch");

  std::vector<double> weight_sum(n, 0.0);
  for (const auto& [key, w] : edge_weight) {
    const auto [i, j] = key;
    if (i == j) throw ValidationError("fj_to_quadratic: self-loop");
    if (i < 0 || j < 0 || i >= n || j >= n) throw ValidationError("fj_to_quadratic: bad edge");
    if (w < 0.0) throw ValidationError("fj_to_quadratic: negative edge weight");
    weight_sum[i] += w;
  }

  QuadraticGame out;
  out.dim = m;
  out.internal_weight.reserve(n);
  out.internal_opinion.reserve(n);
  for (int i = 0; i < n; ++i) {
    if (!(anchor_weight[i] > 0.0))
      throw ValidationError("fj_to_quadratic: anchor weight must be positive");
    const Matrix r = (anchor_weight[i] + weight_sum[i]) * Matrix::Identity(m, m) -
                     weight_sum[i] * topic_coupling;
    if (!is_positive_definite(r))
      throw ValidationError("fj_to_quadratic: derived internal weight not PD");
    out.internal_weight.push_back(r);
    out.internal_opinion.push_back(r.llt().solve(anchor_weight[i] * anchor_opinion[i]));
  }
  for (const auto& [key, w] : edge_weight) out.weight.emplace(key, w * topic_coupling);
  require_valid(out);
  return out;
}

OpinionProfile zero_profile(const HeterogeneousGame& game) {
  OpinionProfile z;
  z.reserve(game.dims.size());
  for (int d : game.dims) z.push_back(Vector::Zero(d));
  return z;
}

OpinionProfile zero_profile(const QuadraticGame& game) {
  return OpinionProfile(game.person_count(), Vector::Zero(game.dim));
}

}  // namespace opinion
