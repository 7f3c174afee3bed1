#include "opinion/dynamics.hpp"

#include <cmath>
#include <sstream>

namespace opinion {

namespace {

void require_internal_pd(const QuadraticGame& game) {
  for (int i = 0; i < game.person_count(); ++i)
    if (!is_positive_definite(game.internal_weight[i]))
      throw SolveError("dynamics: internal weight of person " + std::to_string(i) + " is not PD");
}

Matrix weight_row_sum(const QuadraticGame& game, int person) {
  Matrix sum = Matrix::Zero(game.dim, game.dim);
  for (const auto& [key, w] : game.weight)
    if (key.first == person) sum += w;
  return sum;
}

Matrix invert_response(const Matrix& m, int person) {
  // PSD weights with PD internal make this PD; indefinite test games only
  // need invertibility.
  Eigen::FullPivLU<Matrix> lu(m);
  if (!lu.isInvertible())
    throw SolveError("dynamics: response matrix of person " + std::to_string(person) +
                     " is singular");
  return lu.inverse();
}

}  // namespace

BlockSystem build_block_system(const QuadraticGame& game) {
  require_valid(game);
  require_internal_pd(game);
  const int n = game.person_count();
  const int m = game.dim;
  BlockSystem sys;
  sys.response = Matrix::Zero(n * m, n * m);
  sys.weight = Matrix::Zero(n * m, n * m);
  sys.internal = Matrix::Zero(n * m, n * m);
  sys.laplacian = Matrix::Zero(n * m, n * m);
  sys.anchor = Vector::Zero(n * m);
  for (int i = 0; i < n; ++i) {
    const Matrix row_sum = weight_row_sum(game, i);
    sys.response.block(i * m, i * m, m, m) =
        invert_response(game.internal_weight[i] + row_sum, i);
    sys.internal.block(i * m, i * m, m, m) = game.internal_weight[i];
    sys.laplacian.block(i * m, i * m, m, m) = row_sum;
    sys.anchor.segment(i * m, m) = game.internal_opinion[i];
  }
  for (const auto& [key, w] : game.weight) {
    sys.weight.block(key.first * m, key.second * m, m, m) = w;
    sys.laplacian.block(key.first * m, key.second * m, m, m) = -w;
  }
  return sys;
}

OpinionProfile best_response_step(const QuadraticGame& game, const OpinionProfile& z) {
  require_valid(game);
  require_internal_pd(game);
  const int n = game.person_count();
  OpinionProfile next(n);
  for (int i = 0; i < n; ++i) {
    Matrix system = game.internal_weight[i];
    Vector rhs = game.internal_weight[i] * game.internal_opinion[i];
    for (const auto& [key, w] : game.weight) {
      if (key.first != i) continue;
      system += w;
      rhs += w * z[key.second];
    }
    Eigen::FullPivLU<Matrix> lu(system);
    if (!lu.isInvertible())
      throw SolveError("best_response_step: response matrix of person " + std::to_string(i) +
                       " is singular");
    next[i] = lu.solve(rhs);
  }
  return next;
}

namespace {

void write_trace(const TraceOptions& trace, int iter, const Vector& flat, int persons, int dim) {
  if (trace.out == nullptr) return;
  for (int i = 0; i < persons; ++i)
    for (int k = 0; k < dim; ++k)
      *trace.out << iter << ',' << i << ',' << k << ',' << flat[i * dim + k] << '\n';
}

}  // namespace

SimulateResult simulate(const QuadraticGame& game, const OpinionProfile& z0, double tol,
                        int max_iter, const TraceOptions& trace) {
  const BlockSystem sys = build_block_system(game);
  const int n = game.person_count();
  const int m = game.dim;
  const Matrix step = sys.response * sys.weight;
  const Vector pull = sys.response * (sys.internal * sys.anchor);

  Vector z = flatten(z0);
  if (z.size() != n * m) throw DimensionError("simulate: starting profile has wrong layout");
  const double blow_up = 1e6 * (1.0 + max_abs(z) + max_abs(sys.anchor));

  if (trace.out != nullptr) *trace.out << "iter,person,component,value\n";
  write_trace(trace, 0, z, n, m);

  SimulateResult result;
  for (int iter = 1; iter <= max_iter; ++iter) {
    const Vector next = step * z + pull;
    const double delta = max_abs(Vector(next - z));
    z = next;
    if (trace.stride > 0 && iter % trace.stride == 0) write_trace(trace, iter, z, n, m);
    result.iterations = iter;
    if (max_abs(z) > blow_up) {
      result.status = SimulateResult::Status::Diverged;
      result.final = split(z, std::vector<int>(n, m));
      return result;
    }
    if (delta <= tol) {
      result.status = SimulateResult::Status::Converged;
      result.final = split(z, std::vector<int>(n, m));
      return result;
    }
  }
  result.status = SimulateResult::Status::MaxIterReached;
  result.final = split(z, std::vector<int>(n, m));
  return result;
}

NormalizationReport is_weight_normalized(const QuadraticGame& game) {
  const Matrix identity = Matrix::Identity(game.dim, game.dim);
  for (int i = 0; i < game.person_count(); ++i) {
    const double deviation = (weight_row_sum(game, i) - identity).cwiseAbs().maxCoeff();
    if (deviation > 1e-10) return {false, i, deviation};
  }
  return {};
}

QuadraticGame clone_transform(const QuadraticGame& game, std::optional<double> d) {
  require_valid(game);
  require_internal_pd(game);
  if (!check_symmetric(game).symmetric)
    throw ValidationError("clone_transform: game must be undirected");
  const int n = game.person_count();
  const int m = game.dim;

  std::vector<Matrix> row_sums(n);
  double max_eig = 0.0;
  for (int i = 0; i < n; ++i) {
    row_sums[i] = weight_row_sum(game, i);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(row_sums[i], Eigen::EigenvaluesOnly);
    max_eig = std::max(max_eig, eig.eigenvalues().maxCoeff());
  }
  const double scale = d.value_or(max_eig + 1.0);

  QuadraticGame out;
  out.dim = m;
  out.internal_weight.resize(2 * n);
  out.internal_opinion.resize(2 * n);
  for (int i = 0; i < n; ++i) {
    out.internal_weight[i] = out.internal_weight[i + n] = game.internal_weight[i] / scale;
    out.internal_opinion[i] = out.internal_opinion[i + n] = game.internal_opinion[i];
  }
  for (const auto& [key, w] : game.weight) {
    const Matrix scaled = w / scale;
    out.weight.emplace(key, scaled);
    out.weight.emplace(std::make_pair(key.first + n, key.second + n), scaled);
  }
  for (int i = 0; i < n; ++i) {
    const Matrix cross = scale * Matrix::Identity(m, m) - row_sums[i];
    if (!is_positive_definite(cross)) {
      std::ostringstream msg;
      msg << "clone_transform: d = " << scale << " too small for person " << i;
      throw ValidationError(msg.str());
    }
    const Matrix scaled = cross / scale;
    out.weight.emplace(std::make_pair(i, i + n), scaled);
    out.weight.emplace(std::make_pair(i + n, i), scaled);
  }
  return out;
}

double spectral_radius(const QuadraticGame& game) {
  const BlockSystem sys = build_block_system(game);
  if (!check_symmetric(game).symmetric)
    throw ValidationError("spectral_radius: game must be undirected");
  if (!is_positive_definite(sys.response, 0.0))
    throw SolveError("spectral_radius: response blocks not PD (weights must be PSD)");
  // L^{1/2} W L^{1/2} is symmetric and shares the spectrum of L W.
  const Matrix half = psd_sqrt(sys.response);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(half * sys.weight * half, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace opinion
