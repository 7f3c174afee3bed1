#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace opinion {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Block opinion vector, one block per person.
using OpinionProfile = std::vector<Vector>;

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct GradientUndefined : std::domain_error {
  using std::domain_error::domain_error;
};

struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct SolveError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline Vector flatten(const OpinionProfile& z) {
  Eigen::Index total = 0;
  for (const auto& block : z) total += block.size();
  Vector out(total);
  Eigen::Index at = 0;
  for (const auto& block : z) {
    out.segment(at, block.size()) = block;
    at += block.size();
  }
  return out;
}

inline OpinionProfile split(const Vector& flat, const std::vector<int>& dims) {
  OpinionProfile out;
  out.reserve(dims.size());
  Eigen::Index at = 0;
  for (int d : dims) {
    if (at + d > flat.size()) throw DimensionError("flat vector shorter than block layout");
    out.push_back(flat.segment(at, d));
    at += d;
  }
  if (at != flat.size()) throw DimensionError("flat vector longer than block layout");
  return out;
}

inline double max_abs(const Vector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

inline double profile_inf_norm(const OpinionProfile& z) {
  double m = 0.0;
  for (const auto& block : z) m = std::max(m, max_abs(block));
  return m;
}

inline double profile_inf_distance(const OpinionProfile& a, const OpinionProfile& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, max_abs(Vector(a[i] - b[i])));
  return m;
}

}  // namespace opinion
