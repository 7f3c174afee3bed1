#pragma once

#include <memory>

#include "opinion/types.hpp"

namespace opinion {

/// Immutable expression tree of differentiable convex costs.
///
/// Every tree maps R^d -> R. Trees built through the factory functions are
/// convex and nonnegative, with two exceptions that are only legal as the
/// inner argument of exp_of/cosh_of: `linear` (an affine functional, may be
/// negative) and `norm` (not differentiable at the origin).
class CostFunction {
 public:
  enum class Kind {
    QuadraticForm,  // v -> ||M v||^2
    PowerNorm,      // v -> ||v||_p^alpha, alpha > 1, p in (1, inf)
    Norm,           // v -> ||v||_p            (inner-only)
    Linear,         // v -> c^T v + c0         (inner-only)
    Exp,            // v -> e^{inner(v)}
    Cosh,           // v -> cosh(inner(v))
    Scale,          // v -> w * f(v), w >= 0
    Sum,            // v -> f(v) + g(v)
    AffinePre,      // v -> f(A v + v0)
  };

  CostFunction() = default;

  static CostFunction quadratic_form(Matrix m);
  static CostFunction power_norm(double exponent, double norm_p, int dim);
  static CostFunction norm(double norm_p, int dim);
  static CostFunction linear(Vector coeff, double offset);
  static CostFunction exp_of(CostFunction inner);
  static CostFunction cosh_of(CostFunction inner);
  static CostFunction scaled(double weight, CostFunction f);
  static CostFunction sum(CostFunction f, CostFunction g);
  static CostFunction affine_pre(Matrix a, Vector v0, CostFunction f);

  // Scalar shorthands used throughout: x^2, e^x, cosh x, |x|^alpha.
  static CostFunction square_scalar();
  static CostFunction exp_scalar();
  static CostFunction cosh_scalar();
  static CostFunction abs_power(double exponent);

  bool valid() const { return node_ != nullptr; }
  Kind kind() const;
  int input_dim() const;

  double value(const Vector& v) const;
  Vector gradient(const Vector& v) const;

  // Parameter access; only the getters matching kind() may be called.
  const Matrix& matrix() const;        // QuadraticForm M / AffinePre A
  const Vector& offset_vector() const; // Linear c / AffinePre v0
  double scalar_offset() const;        // Linear c0
  double weight() const;               // Scale w
  double exponent() const;             // PowerNorm alpha
  double norm_p() const;               // PowerNorm / Norm p
  const CostFunction& child() const;   // Exp/Cosh inner, Scale/AffinePre f
  const CostFunction& left() const;    // Sum f
  const CostFunction& right() const;   // Sum g

  struct Node;  // definition is internal to the implementation

 private:
  explicit CostFunction(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/// Exact structural comparison: same kinds, dimensions, and parameters.
bool structurally_equal(const CostFunction& a, const CostFunction& b);

/// True when the tree is a catalogued cost: Linear and Norm nodes appear only
/// as the direct inner argument of Exp or Cosh. Catalogued costs are convex
/// and nonnegative by construction.
bool is_catalogued(const CostFunction& f);

}  // namespace opinion
