#include "opinion/cost_function.hpp"

#include <cmath>
#include <limits>

namespace opinion {

struct CostFunction::Node {
  Kind kind;
  int input_dim = 0;
  Matrix mat;
  Vector vec;
  double a = 0.0;  // Scale weight / PowerNorm exponent / Linear offset
  double p = 0.0;  // PowerNorm / Norm p
  CostFunction first;
  CostFunction second;
};

namespace {

std::shared_ptr<const CostFunction::Node> make_node(CostFunction::Node node) {
  return std::make_shared<const CostFunction::Node>(std::move(node));
}

double lp_norm(const Vector& v, double p) {
  double acc = 0.0;
  for (Eigen::Index k = 0; k < v.size(); ++k) acc += std::pow(std::abs(v[k]), p);
  return std::pow(acc, 1.0 / p);
}

// d/dv_k ||v||_p = sign(v_k) |v_k|^{p-1} / ||v||_p^{p-1}, valid for v != 0.
Vector lp_norm_gradient(const Vector& v, double p, double norm_value) {
  Vector g(v.size());
  const double denom = std::pow(norm_value, p - 1.0);
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    const double mag = std::pow(std::abs(v[k]), p - 1.0);
    g[k] = (v[k] > 0 ? mag : v[k] < 0 ? -mag : 0.0) / denom;
  }
  return g;
}

}  // namespace

CostFunction CostFunction::quadratic_form(Matrix m) {
  if (m.size() == 0) throw DimensionError("quadratic_form: empty matrix");
  Node n;
  n.kind = Kind::QuadraticForm;
  n.input_dim = static_cast<int>(m.cols());
  n.mat = std::move(m);
  return CostFunction(make_node(std::move(n)));
}

CostFunction CostFunction::power_norm(double exponent, double norm_p, int dim) {
  if (!(exponent > 1.0)) throw ValidationError("power_norm: exponent must exceed 1");
  if (!(norm_p > 1.0) || !std::isfinite(norm_p))
    throw ValidationError("power_norm: p must lie in (1, inf)");
  if (dim < 1) throw DimensionError("power_norm: dim must be positive");
  Node n;
  n.kind = Kind::PowerNorm;
  n.input_dim = dim;
  n.a = exponent;
  n.p = norm_p;
  return CostFunction(make_node(std::move(n)));
}

CostFunction CostFunction::norm(double norm_p, int dim) {
  if (!(norm_p > 1.0) || !std::isfinite(norm_p))
    throw ValidationError("norm: p must lie in (1, inf)");
  if (dim < 1) throw DimensionError("norm: dim must be positive");
  Node n;
  n.kind = Kind::Norm;
  n.input_dim = dim;
  n.p = norm_p;
  return CostFunction(make_node(std::move(n)));
}

CostFunction CostFunction::linear(Vector coeff, double offset) {
  if (coeff.size() == 0) throw DimensionError("linear: empty coefficient vector");
  Node n;
  n.kind = Kind::Linear;
  n.input_dim = static_cast<int>(coeff.size());
  n.vec = std::move(coeff);
  n.a = offset;
  return CostFunction(make_node(std::move(n)));
}

CostFunction CostFunction::exp_of(CostFunction inner) {
  if (!inner.valid()) throw ValidationError("exp_of: missing inner function");
  Node n;
  n.kind = Kind::Exp;
  n.input_dim = inner.input_dim();
  n.first = std::move(inner);
  return CostFunction(make_node(std::move(n)));
}

CostFunction CostFunction::cosh_of(CostFunction inner) {
  if (!inner.valid()) throw ValidationError("cosh_of: missing inner function");
  Node n;
  n.kind = Kind::Cosh;
  n.input_dim = inner.input_dim();
  n.first = std::move(inner);
  return CostFunction(make_node(std::move(n)));
}

CostFunction CostFunction::scaled(double weight, CostFunction f) {
  if (!f.valid()) throw ValidationError("scaled: missing function");
  if (!(weight >= 0.0)) throw ValidationError("scaled: weight must be nonnegative");
  Node n;
  n.kind = Kind::Scale;
  n.input_dim = f.input_dim();
  n.a = weight;
  n.first = std::move(f);
  return CostFunction(make_node(std::move(n)));
}

CostFunction CostFunction::sum(CostFunction f, CostFunction g) {
  if (!f.valid() || !g.valid()) throw ValidationError("sum: missing operand");
  if (f.input_dim() != g.input_dim()) throw DimensionError("sum: operand dimensions differ");
  Node n;
  n.kind = Kind::Sum;
  n.input_dim = f.input_dim();
  n.first = std::move(f);
  n.second = std::move(g);
  return CostFunction(make_node(std::move(n)));
}

CostFunction CostFunction::affine_pre(Matrix a, Vector v0, CostFunction f) {
  if (!f.valid()) throw ValidationError("affine_pre: missing function");
  if (a.rows() != f.input_dim()) throw DimensionError("affine_pre: matrix rows != inner dim");
  if (v0.size() != a.rows()) throw DimensionError("affine_pre: offset size != matrix rows");
  Node n;
  n.kind = Kind::AffinePre;
  n.input_dim = static_cast<int>(a.cols());
  n.mat = std::move(a);
  n.vec = std::move(v0);
  n.first = std::move(f);
  return CostFunction(make_node(std::move(n)));
}

CostFunction CostFunction::square_scalar() {
  return quadratic_form(Matrix::Identity(1, 1));
}

CostFunction CostFunction::exp_scalar() {
  return exp_of(linear(Vector::Ones(1), 0.0));
}

CostFunction CostFunction::cosh_scalar() {
  return cosh_of(linear(Vector::Ones(1), 0.0));
}

CostFunction CostFunction::abs_power(double exponent) {
  return power_norm(exponent, 2.0, 1);
}

CostFunction::Kind CostFunction::kind() const { return node_->kind; }
int CostFunction::input_dim() const { return node_->input_dim; }
const Matrix& CostFunction::matrix() const { return node_->mat; }
const Vector& CostFunction::offset_vector() const { return node_->vec; }
double CostFunction::scalar_offset() const { return node_->a; }
double CostFunction::weight() const { return node_->a; }
double CostFunction::exponent() const { return node_->a; }
double CostFunction::norm_p() const { return node_->p; }
const CostFunction& CostFunction::child() const { return node_->first; }
const CostFunction& CostFunction::left() const { return node_->first; }
const CostFunction& CostFunction::right() const { return node_->second; }

double CostFunction::value(const Vector& v) const {
  if (v.size() != input_dim()) throw DimensionError("value: input dimension mismatch");
  const Node& n = *node_;
  switch (n.kind) {
    case Kind::QuadraticForm:
      return (n.mat * v).squaredNorm();
    case Kind::PowerNorm:
      return std::pow(lp_norm(v, n.p), n.a);
    case Kind::Norm:
      return lp_norm(v, n.p);
    case Kind::Linear:
      return n.vec.dot(v) + n.a;
    case Kind::Exp:
      return std::exp(n.first.value(v));
    case Kind::Cosh:
      return std::cosh(n.first.value(v));
    case Kind::Scale:
      return n.a == 0.0 ? 0.0 : n.a * n.first.value(v);
    case Kind::Sum:
      return n.first.value(v) + n.second.value(v);
    case Kind::AffinePre:
      return n.first.value(n.mat * v + n.vec);
  }
  throw ValidationError("value: unknown node");
}

Vector CostFunction::gradient(const Vector& v) const {
  if (v.size() != input_dim()) throw DimensionError("gradient: input dimension mismatch");
  const Node& n = *node_;
  switch (n.kind) {
    case Kind::QuadraticForm:
      return 2.0 * (n.mat.transpose() * (n.mat * v));
    case Kind::PowerNorm: {
      const double r = lp_norm(v, n.p);
      if (r == 0.0) {
        // Continuous extension at the origin exists for alpha >= 2 only.
        if (n.a >= 2.0) return Vector::Zero(v.size());
        throw GradientUndefined("power norm gradient undefined at the origin for exponent < 2");
      }
      return (n.a * std::pow(r, n.a - 1.0)) * lp_norm_gradient(v, n.p, r);
    }
    case Kind::Norm: {
      const double r = lp_norm(v, n.p);
      if (r == 0.0) throw GradientUndefined("norm gradient undefined at the origin");
      return lp_norm_gradient(v, n.p, r);
    }
    case Kind::Linear:
      return n.vec;
    case Kind::Exp:
      return std::exp(n.first.value(v)) * n.first.gradient(v);
    case Kind::Cosh: {
      // cosh'(0) = 0 kills the norm singularity: the composition is
      // differentiable at the origin with gradient zero.
      if (n.first.kind() == Kind::Norm && lp_norm(v, n.first.norm_p()) == 0.0)
        return Vector::Zero(v.size());
      return std::sinh(n.first.value(v)) * n.first.gradient(v);
    }
    case Kind::Scale:
      return n.a == 0.0 ? Vector(Vector::Zero(v.size())) : Vector(n.a * n.first.gradient(v));
    case Kind::Sum:
      return n.first.gradient(v) + n.second.gradient(v);
    case Kind::AffinePre:
      return n.mat.transpose() * n.first.gradient(n.mat * v + n.vec);
  }
  throw ValidationError("gradient: unknown node");
}

bool structurally_equal(const CostFunction& a, const CostFunction& b) {
  if (!a.valid() || !b.valid()) return a.valid() == b.valid();
  if (a.kind() != b.kind() || a.input_dim() != b.input_dim()) return false;
  using Kind = CostFunction::Kind;
  switch (a.kind()) {
    case Kind::QuadraticForm:
      return a.matrix() == b.matrix();
    case Kind::PowerNorm:
      return a.exponent() == b.exponent() && a.norm_p() == b.norm_p();
    case Kind::Norm:
      return a.norm_p() == b.norm_p();
    case Kind::Linear:
      return a.offset_vector() == b.offset_vector() && a.scalar_offset() == b.scalar_offset();
    case Kind::Exp:
    case Kind::Cosh:
      return structurally_equal(a.child(), b.child());
    case Kind::Scale:
      return a.weight() == b.weight() && structurally_equal(a.child(), b.child());
    case Kind::Sum:
      return structurally_equal(a.left(), b.left()) && structurally_equal(a.right(), b.right());
    case Kind::AffinePre:
      return a.matrix() == b.matrix() && a.offset_vector() == b.offset_vector() &&
             structurally_equal(a.child(), b.child());
  }
  return false;
}

namespace {

bool catalogued_rec(const CostFunction& f, bool under_transcendental) {
  using Kind = CostFunction::Kind;
  switch (f.kind()) {
    case Kind::Linear:
    case Kind::Norm:
      return under_transcendental;
    case Kind::QuadraticForm:
    case Kind::PowerNorm:
      return true;
    case Kind::Exp:
    case Kind::Cosh:
      return catalogued_rec(f.child(), true);
    case Kind::Scale:
    case Kind::AffinePre:
      return catalogued_rec(f.child(), false);
    case Kind::Sum:
      return catalogued_rec(f.left(), false) && catalogued_rec(f.right(), false);
  }
  return false;
}

}  // namespace

bool is_catalogued(const CostFunction& f) {
  if (!f.valid()) return false;
  return catalogued_rec(f, false);
}

}  // namespace opinion
