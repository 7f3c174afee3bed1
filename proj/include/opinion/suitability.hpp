#pragma once

#include <optional>
#include <set>
#include <span>
#include <string>

#include "opinion/cost_function.hpp"
#include "opinion/types.hpp"

namespace opinion {

/// Worst-case price of anarchy of ||z||^alpha, evaluated in log space so the
/// 2^{alpha/(alpha-1)} factor cannot overflow for alpha near 1.
double zeta(double alpha);

/// lim_{alpha -> inf} zeta(alpha) = 2 / (e ln 2).
double zeta_limit();

struct Provenance {
  enum class Kind { Analytic, Searched, Propagated };
  Kind kind = Kind::Analytic;
  std::string detail;
};

/// A (lambda, kappa, p-set) suitability claim:
///   (grad f(a))^T (b - a) / p <= lambda f(b) - kappa f(a)  for all a, b.
struct SuitabilityCertificate {
  double lambda = 0.0;
  double kappa = 0.0;
  std::set<int> p_set;  // nonempty subset of {1, 2}
  Provenance provenance;

  double ratio() const { return lambda / kappa; }
};

enum class BaseFunction { Exp, Square, Power };

struct SampleSpec {
  double box_lo = -10.0;
  double box_hi = 10.0;
  int pairs = 10000;
};

/// Analytic certificates for e^x and x^2; searched certificate for |x|^alpha
/// (cross-checked against zeta(alpha)).
SuitabilityCertificate certify_base(BaseFunction kind, double alpha = 0.0);

// Composition rules. Each returns the parent's (lambda, kappa, p_set)
// unchanged with propagated provenance, or throws ValidationError when a
// precondition fails.
SuitabilityCertificate propagate_scale(const SuitabilityCertificate& parent, double weight);
SuitabilityCertificate propagate_sum(std::span<const SuitabilityCertificate> parents,
                                     std::span<const double> weights);
SuitabilityCertificate propagate_affine_pre(const SuitabilityCertificate& parent);

struct ConvexComposeConditions {
  bool outer_nondecreasing_on_inner_range = false;
  bool inner_convex = false;
  bool inner_differentiable = false;
};
SuitabilityCertificate propagate_convex_compose(const SuitabilityCertificate& outer,
                                                const ConvexComposeConditions& cond);

struct NormComposeConditions {
  bool inner_norm_differentiable_off_origin = false;
  bool outer_derivative_zero_at_origin = false;
  bool outer_derivative_nonneg_on_nonneg = false;
};
SuitabilityCertificate propagate_norm_compose(const SuitabilityCertificate& outer,
                                              const NormComposeConditions& cond);

/// Falsification-only sampled check of the suitability inequality. A pass
/// means no violation was found on the sample, not a proof.
struct SuitabilityReport {
  bool pass = false;
  double worst_slack = 0.0;  // min over samples of rhs - lhs
  long evaluated = 0;
  int skipped_gradient = 0;  // pairs dropped or resampled: gradient undefined at a
  Vector counterexample_a, counterexample_b;
  double violation = 0.0;  // positive magnitude when failed
};
SuitabilityReport verify_suitability(const CostFunction& f, double lambda, double kappa, int p,
                                     const SampleSpec& spec = {}, std::uint64_t seed = 0);

/// Bisection on gamma = lambda/kappa over sampled constraints: each sampled
/// pair reduces to a one-sided bound on kappa once lambda = gamma kappa is
/// substituted. Returns the smallest feasible gamma within tol and a
/// witnessing (lambda, kappa). A lower estimate of the true minimum ratio.
struct MinRatioResult {
  double lambda = 0.0;
  double kappa = 0.0;
  double ratio = 0.0;
  long constraints = 0;
};
MinRatioResult min_ratio_search(const CostFunction& f, const SampleSpec& spec, double tol,
                                std::uint64_t seed, double bracket_lo = 1.0,
                                double bracket_hi = 4.0);

/// Walks a catalogued cost tree, combining base certificates with the
/// composition rules. Returns nothing when no certificate is derivable (e.g.
/// a sum mixing incompatible bases).
std::optional<SuitabilityCertificate> derive_certificate(const CostFunction& f);

/// True when the tree is differentiable on all of its domain. The only
/// catalogued construction that is not is exp over a bare norm.
bool is_differentiable_everywhere(const CostFunction& f);

}  // namespace opinion
