#include "opinion/suitability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "opinion/rng.hpp"

namespace opinion {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Neumaier-compensated sum of a handful of log terms.
double compensated_sum(std::initializer_list<double> terms) {
  double sum = 0.0, comp = 0.0;
  for (double t : terms) {
    const double next = sum + t;
    if (std::abs(sum) >= std::abs(t))
      comp += (sum - next) + t;
    else
      comp += (t - next) + sum;
    sum = next;
  }
  return sum + comp;
}

// ln(2^q - 2^shift) for q > shift, stable for large q.
double log_pow2_minus(double q, double shift) {
  return q * std::numbers::ln2 + std::log(-std::expm1((shift - q) * std::numbers::ln2));
}

}  // namespace

double zeta(double alpha) {
  if (!(alpha > 1.0)) throw ValidationError("zeta: alpha must exceed 1");
  const double q = alpha / (alpha - 1.0);
  const double log_zeta = compensated_sum({(alpha - 1.0) * std::log(alpha - 1.0),
                                           -alpha * std::log(alpha),
                                           alpha * log_pow2_minus(q, 0.0),
                                           -log_pow2_minus(q, 1.0)});
  return std::exp(log_zeta);
}

double zeta_limit() { return 2.0 / (std::numbers::e * std::numbers::ln2); }

namespace {

SuitabilityCertificate make_certificate(double lambda, double kappa, std::set<int> p_set,
                                        Provenance provenance) {
  if (!(lambda > 0.0) || !(kappa > 0.0))
    throw ValidationError("certificate: lambda and kappa must be positive");
  if (p_set.empty()) throw ValidationError("certificate: empty p-set");
  for (int p : p_set)
    if (p != 1 && p != 2) throw ValidationError("certificate: p-set must be a subset of {1, 2}");
  return SuitabilityCertificate{lambda, kappa, std::move(p_set), std::move(provenance)};
}

}  // namespace

SuitabilityCertificate certify_base(BaseFunction kind, double alpha) {
  switch (kind) {
    case BaseFunction::Exp:
      // Binding point of lambda e^c - kappa - c/p for both p = 1, 2:
      // lambda = 2/e, kappa = 1 + ln(lambda) = ln 2.
      return make_certificate(2.0 / std::numbers::e, std::numbers::ln2, {1, 2},
                              {Provenance::Kind::Analytic, "exp"});
    case BaseFunction::Square:
      // Binding discriminant conditions of the suitability quadratics in b:
      //   p=2: 4 lambda (1 - kappa) = 1,  p=1: lambda (2 - kappa) = 1.
      // Eliminating lambda gives kappa = 2/3, lambda = 3/4.
      return make_certificate(0.75, 2.0 / 3.0, {1, 2}, {Provenance::Kind::Analytic, "square"});
    case BaseFunction::Power: {
      if (!(alpha > 1.0)) throw ValidationError("certify_base: power exponent must exceed 1");
      const SampleSpec spec{-10.0, 10.0, 40000};
      const double tol = 5e-3;
      const MinRatioResult found =
          min_ratio_search(CostFunction::abs_power(alpha), spec, 2e-4, /*seed=*/0);
      const double target = zeta(alpha);
      if (std::abs(found.ratio - target) > tol)
        throw SolveError("certify_base: searched ratio for |x|^alpha missed the closed form");
      std::ostringstream detail;
      detail << "power(" << alpha << "): " << found.constraints << " sampled constraints on ["
             << spec.box_lo << ", " << spec.box_hi << "], tol " << tol;
      return make_certificate(found.lambda, found.kappa, {1, 2},
                              {Provenance::Kind::Searched, detail.str()});
    }
  }
  throw ValidationError("certify_base: unsupported kind");
}

namespace {

Provenance propagated(const std::string& rule, const Provenance& parent) {
  return {Provenance::Kind::Propagated, rule + " <- " + parent.detail};
}

bool same_claim(const SuitabilityCertificate& a, const SuitabilityCertificate& b) {
  return std::abs(a.lambda - b.lambda) <= 1e-12 && std::abs(a.kappa - b.kappa) <= 1e-12 &&
         a.p_set == b.p_set;
}

}  // namespace

SuitabilityCertificate propagate_scale(const SuitabilityCertificate& parent, double weight) {
  if (!(weight >= 0.0)) throw ValidationError("propagate_scale: negative weight");
  return make_certificate(parent.lambda, parent.kappa, parent.p_set,
                          propagated("scale", parent.provenance));
}

SuitabilityCertificate propagate_sum(std::span<const SuitabilityCertificate> parents,
                                     std::span<const double> weights) {
  if (parents.empty()) throw ValidationError("propagate_sum: no parents");
  if (weights.size() != parents.size())
    throw ValidationError("propagate_sum: weight count mismatch");
  for (double w : weights)
    if (!(w >= 0.0)) throw ValidationError("propagate_sum: negative weight");
  for (const auto& c : parents.subspan(1))
    if (!same_claim(parents[0], c))
      throw ValidationError("propagate_sum: parents carry different (lambda, kappa, p-set) claims");
  std::string inner = parents[0].provenance.detail;
  for (const auto& c : parents.subspan(1)) inner += ", " + c.provenance.detail;
  return make_certificate(parents[0].lambda, parents[0].kappa, parents[0].p_set,
                          {Provenance::Kind::Propagated, "sum <- [" + inner + "]"});
}

SuitabilityCertificate propagate_affine_pre(const SuitabilityCertificate& parent) {
  return make_certificate(parent.lambda, parent.kappa, parent.p_set,
                          propagated("affine_pre", parent.provenance));
}

SuitabilityCertificate propagate_convex_compose(const SuitabilityCertificate& outer,
                                                const ConvexComposeConditions& cond) {
  if (!cond.outer_nondecreasing_on_inner_range)
    throw ValidationError("propagate_convex_compose: outer not nondecreasing on inner range");
  if (!cond.inner_convex) throw ValidationError("propagate_convex_compose: inner not convex");
  if (!cond.inner_differentiable)
    throw ValidationError("propagate_convex_compose: inner not differentiable");
  return make_certificate(outer.lambda, outer.kappa, outer.p_set,
                          propagated("convex_compose", outer.provenance));
}

SuitabilityCertificate propagate_norm_compose(const SuitabilityCertificate& outer,
                                              const NormComposeConditions& cond) {
  if (!cond.inner_norm_differentiable_off_origin)
    throw ValidationError("propagate_norm_compose: inner norm not differentiable off the origin");
  if (!cond.outer_derivative_zero_at_origin)
    throw ValidationError("propagate_norm_compose: outer derivative nonzero at 0");
  if (!cond.outer_derivative_nonneg_on_nonneg)
    throw ValidationError("propagate_norm_compose: outer derivative negative on [0, inf)");
  return make_certificate(outer.lambda, outer.kappa, outer.p_set,
                          propagated("norm_compose", outer.provenance));
}

namespace {

struct SampledPair {
  Vector a, b;
};

// Random pairs in the box plus the degenerate/symmetry pairs that bind in
// boundary cases: (0, e_k), (e_k, 0), (e_k, -e_k).
std::vector<SampledPair> deterministic_pairs(int dim) {
  std::vector<SampledPair> out;
  for (int k = 0; k < dim; ++k) {
    Vector ek = Vector::Zero(dim);
    ek[k] = 1.0;
    out.push_back({Vector::Zero(dim), ek});
    out.push_back({ek, Vector::Zero(dim)});
    out.push_back({ek, -ek});
  }
  return out;
}

Vector random_box_point(Rng& rng, int dim, const SampleSpec& spec) {
  Vector v(dim);
  for (int k = 0; k < dim; ++k) v[k] = rng.uniform(spec.box_lo, spec.box_hi);
  return v;
}

}  // namespace

SuitabilityReport verify_suitability(const CostFunction& f, double lambda, double kappa, int p,
                                     const SampleSpec& spec, std::uint64_t seed) {
  if (!(lambda > 0.0) || !(kappa > 0.0))
    throw ValidationError("verify_suitability: lambda and kappa must be positive");
  if (p != 1 && p != 2) throw ValidationError("verify_suitability: p must be 1 or 2");
  if (!(spec.box_hi > spec.box_lo) || spec.pairs < 1)
    throw ValidationError("verify_suitability: bad sampling spec");

  const int dim = f.input_dim();
  Rng rng(seed);
  SuitabilityReport report;
  report.worst_slack = kInf;
  double worst_normalized = kInf;

  auto check_pair = [&](const Vector& a, const Vector& b) -> bool {
    Vector grad_a;
    try {
      grad_a = f.gradient(a);
    } catch (const GradientUndefined&) {
      ++report.skipped_gradient;
      return false;
    }
    const double lhs = grad_a.dot(b - a) / p;
    const double rhs = lambda * f.value(b) - kappa * f.value(a);
    const double slack = rhs - lhs;
    ++report.evaluated;
    report.worst_slack = std::min(report.worst_slack, slack);
    // Exact-equality boundaries are legal; only flag violations beyond
    // round-off at the scale of the evaluated terms.
    const double scale = 1.0 + std::abs(lhs) + std::abs(lambda * f.value(b)) +
                         std::abs(kappa * f.value(a));
    const double normalized = slack / scale;
    if (normalized < worst_normalized) {
      worst_normalized = normalized;
      if (slack < 0.0) {
        report.counterexample_a = a;
        report.counterexample_b = b;
        report.violation = -slack;
      }
    }
    return true;
  };

  for (const auto& pair : deterministic_pairs(dim)) check_pair(pair.a, pair.b);
  int produced = 0;
  int attempts = 0;
  const int max_attempts = spec.pairs * 4 + 64;
  while (produced < spec.pairs && attempts < max_attempts) {
    ++attempts;
    if (check_pair(random_box_point(rng, dim, spec), random_box_point(rng, dim, spec)))
      ++produced;
  }

  report.pass = worst_normalized >= -1e-9;
  if (report.pass) report.violation = 0.0;
  return report;
}

namespace {

struct Constraint {
  double lhs;  // grad f(a)^T (b - a) / p
  double fa;
  double fb;
};

// kappa-interval induced by one constraint at fixed gamma:
//   lhs <= kappa (gamma fb - fa).
bool accumulate_bounds(const Constraint& c, double gamma, double& lo, double& hi) {
  const double coef = gamma * c.fb - c.fa;
  if (coef > 0.0) {
    lo = std::max(lo, c.lhs / coef);
  } else if (coef < 0.0) {
    if (c.lhs > 0.0) return false;
    hi = std::min(hi, c.lhs / coef);
  } else if (c.lhs > 0.0) {
    return false;
  }
  return true;
}

bool feasible(const std::vector<Constraint>& constraints, double gamma, double& kappa_lo,
              double& kappa_hi) {
  kappa_lo = 0.0;
  kappa_hi = kInf;
  for (const auto& c : constraints)
    if (!accumulate_bounds(c, gamma, kappa_lo, kappa_hi)) return false;
  return kappa_lo <= kappa_hi && kappa_hi > 0.0;
}

}  // namespace

MinRatioResult min_ratio_search(const CostFunction& f, const SampleSpec& spec, double tol,
                                std::uint64_t seed, double bracket_lo, double bracket_hi) {
  if (!(tol > 0.0)) throw ValidationError("min_ratio_search: tol must be positive");
  if (!(bracket_hi > bracket_lo)) throw ValidationError("min_ratio_search: empty bracket");

  const int dim = f.input_dim();
  Rng rng(seed);
  std::vector<Constraint> constraints;
  constraints.reserve(2 * (spec.pairs + 3 * dim));

  auto add_pair = [&](const Vector& a, const Vector& b) -> bool {
    Vector grad_a;
    try {
      grad_a = f.gradient(a);
    } catch (const GradientUndefined&) {
      return false;
    }
    const double dot = grad_a.dot(b - a);
    const double fa = f.value(a);
    const double fb = f.value(b);
    constraints.push_back({dot, fa, fb});        // p = 1
    constraints.push_back({dot / 2.0, fa, fb});  // p = 2
    return true;
  };

  for (const auto& pair : deterministic_pairs(dim)) add_pair(pair.a, pair.b);
  // Vector inputs are sampled along rays so that each pair still probes a
  // scalar restriction of f.
  int produced = 0;
  int attempts = 0;
  const int max_attempts = spec.pairs * 4 + 64;
  while (produced < spec.pairs && attempts < max_attempts) {
    ++attempts;
    Vector a, b;
    if (dim == 1) {
      a = Vector::Constant(1, rng.uniform(spec.box_lo, spec.box_hi));
      b = Vector::Constant(1, rng.uniform(spec.box_lo, spec.box_hi));
    } else {
      const Vector dir = rng.unit_vector(dim);
      a = rng.uniform(spec.box_lo, spec.box_hi) * dir;
      b = rng.uniform(spec.box_lo, spec.box_hi) * dir;
    }
    if (add_pair(a, b)) ++produced;
  }

  double kappa_lo = 0.0, kappa_hi = kInf;
  if (!feasible(constraints, bracket_hi, kappa_lo, kappa_hi)) {
    std::ostringstream msg;
    msg << "min_ratio_search: no feasible ratio in bracket [" << bracket_lo << ", " << bracket_hi
        << "]";
    throw SolveError(msg.str());
  }
  double lo = bracket_lo, hi = bracket_hi;
  if (feasible(constraints, lo, kappa_lo, kappa_hi)) {
    hi = lo;
  } else {
    while (hi - lo > tol) {
      const double mid = 0.5 * (lo + hi);
      if (feasible(constraints, mid, kappa_lo, kappa_hi))
        hi = mid;
      else
        lo = mid;
    }
  }

  feasible(constraints, hi, kappa_lo, kappa_hi);
  double kappa;
  if (std::isfinite(kappa_hi))
    kappa = kappa_lo > 0.0 ? 0.5 * (kappa_lo + kappa_hi) : 0.5 * kappa_hi;
  else
    kappa = std::max(kappa_lo, 1.0);
  MinRatioResult result;
  result.kappa = kappa;
  result.lambda = hi * kappa;
  result.ratio = hi;
  result.constraints = static_cast<long>(constraints.size());
  return result;
}

bool is_differentiable_everywhere(const CostFunction& f) {
  using Kind = CostFunction::Kind;
  switch (f.kind()) {
    case Kind::QuadraticForm:
    case Kind::PowerNorm:
    case Kind::Linear:
      return true;
    case Kind::Norm:
      return false;
    case Kind::Exp:
      return f.child().kind() != Kind::Norm && is_differentiable_everywhere(f.child());
    case Kind::Cosh:
      // cosh'(0) = 0 repairs the norm's corner at the origin.
      return f.child().kind() == Kind::Norm || is_differentiable_everywhere(f.child());
    case Kind::Scale:
    case Kind::AffinePre:
      return is_differentiable_everywhere(f.child());
    case Kind::Sum:
      return is_differentiable_everywhere(f.left()) && is_differentiable_everywhere(f.right());
  }
  return false;
}

namespace {

std::optional<SuitabilityCertificate> derive_cosh_certificate() {
  const SuitabilityCertificate expc = certify_base(BaseFunction::Exp);
  const SuitabilityCertificate exp_neg = propagate_affine_pre(expc);  // e^{-x}
  const SuitabilityCertificate parents[] = {expc, exp_neg};
  const double weights[] = {0.5, 0.5};
  return propagate_sum(parents, weights);
}

}  // namespace

std::optional<SuitabilityCertificate> derive_certificate(const CostFunction& f) {
  using Kind = CostFunction::Kind;
  switch (f.kind()) {
    case Kind::QuadraticForm: {
      // ||M v||^2 = (x^2 over the Euclidean norm) after an affine map.
      SuitabilityCertificate cert = certify_base(BaseFunction::Square);
      if (f.input_dim() > 1 || f.matrix().rows() > 1)
        cert = propagate_norm_compose(cert, {true, true, true});
      return propagate_affine_pre(cert);
    }
    case Kind::PowerNorm: {
      SuitabilityCertificate cert = f.exponent() == 2.0
                                        ? certify_base(BaseFunction::Square)
                                        : certify_base(BaseFunction::Power, f.exponent());
      if (f.input_dim() == 1) return cert;
      return propagate_norm_compose(
          cert, {true, /*u'(0)=0 since alpha>1*/ true, /*u' >= 0 on [0,inf)*/ true});
    }
    case Kind::Norm:
    case Kind::Linear:
      return std::nullopt;  // not catalogued standalone costs
    case Kind::Exp: {
      const SuitabilityCertificate cert = certify_base(BaseFunction::Exp);
      const CostFunction& inner = f.child();
      if (inner.kind() == Kind::Linear) return propagate_affine_pre(cert);
      if (!is_catalogued(inner)) return std::nullopt;
      return propagate_convex_compose(
          cert, {/*exp nondecreasing everywhere*/ true, /*catalogued => convex*/ true,
                 is_differentiable_everywhere(inner)});
    }
    case Kind::Cosh: {
      auto cert = derive_cosh_certificate();
      if (!cert) return std::nullopt;
      const CostFunction& inner = f.child();
      if (inner.kind() == Kind::Linear) return propagate_affine_pre(*cert);
      if (inner.kind() == Kind::Norm)
        return propagate_norm_compose(
            *cert, {/*p in (1,inf) differentiable off origin*/ true,
                    /*sinh(0) = 0*/ true, /*sinh >= 0 on [0,inf)*/ true});
      if (!is_catalogued(inner)) return std::nullopt;
      // Catalogued inner is nonnegative, and cosh is nondecreasing on [0, inf).
      return propagate_convex_compose(*cert,
                                      {true, true, is_differentiable_everywhere(inner)});
    }
    case Kind::Scale: {
      auto cert = derive_certificate(f.child());
      if (!cert) return std::nullopt;
      return propagate_scale(*cert, f.weight());
    }
    case Kind::Sum: {
      auto lhs = derive_certificate(f.left());
      auto rhs = derive_certificate(f.right());
      if (!lhs || !rhs) return std::nullopt;
      if (std::abs(lhs->lambda - rhs->lambda) > 1e-12 ||
          std::abs(lhs->kappa - rhs->kappa) > 1e-12 || lhs->p_set != rhs->p_set)
        return std::nullopt;
      const SuitabilityCertificate parents[] = {*lhs, *rhs};
      const double weights[] = {1.0, 1.0};
      return propagate_sum(parents, weights);
    }
    case Kind::AffinePre: {
      auto cert = derive_certificate(f.child());
      if (!cert) return std::nullopt;
      return propagate_affine_pre(*cert);
    }
  }
  return std::nullopt;
}

}  // namespace opinion
