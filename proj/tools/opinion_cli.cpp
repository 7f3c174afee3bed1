// Command-line surface for the opinion-formation game library: game I/O,
// equilibrium and price-of-anarchy reports, best-response simulation,
// suitability checks, and worst-case PoA curve emission.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "opinion/dynamics.hpp"
#include "opinion/equilibrium.hpp"
#include "opinion/generator.hpp"
#include "opinion/lowerbound.hpp"
#include "opinion/serialization.hpp"
#include "opinion/suitability.hpp"

namespace {

using nlohmann::json;
using namespace opinion;

// Exit codes, stable for harnesses: 0 success, 1 analytic negative
// (divergence, suitability violation), 2 numeric failure, 3 usage/schema.
constexpr int kOk = 0;
constexpr int kNegative = 1;
constexpr int kNumericFailure = 2;
constexpr int kUsage = 3;

json profile_to_json(const OpinionProfile& z) {
  json out = json::array();
  for (const auto& block : z) out.push_back(to_json(block));
  return out;
}

std::string kind_label(PoaResult::Kind kind) {
  switch (kind) {
    case PoaResult::Kind::Ratio: return "ratio";
    case PoaResult::Kind::Unbounded: return "unbounded";
    case PoaResult::Kind::DegenerateOne: return "degenerate_one";
  }
  return "?";
}

struct PoaOutput {
  PoaResult result;
  OpinionProfile nash, optimum;
  int iterations = 0;
};

void print_poa(const PoaOutput& out, const std::string& format) {
  const PoaResult& r = out.result;
  if (format == "json") {
    json j;
    j["sc_nash"] = r.sc_nash;
    j["sc_optimum"] = r.sc_optimum;
    j["result"] = kind_label(r.kind);
    if (r.kind == PoaResult::Kind::Ratio) j["poa"] = r.ratio;
    j["nash_residual"] = r.nash_residual;
    j["iterations"] = out.iterations;
    j["nash"] = profile_to_json(out.nash);
    j["optimum"] = profile_to_json(out.optimum);
    std::cout << j.dump(2) << '\n';
  } else if (format == "csv") {
    std::cout << "sc_nash,sc_optimum,result,poa,nash_residual,iterations\n";
    std::cout << r.sc_nash << ',' << r.sc_optimum << ',' << kind_label(r.kind) << ',';
    if (r.kind == PoaResult::Kind::Ratio)
      std::cout << r.ratio;
    else
      std::cout << kind_label(r.kind);
    std::cout << ',' << r.nash_residual << ',' << out.iterations << '\n';
  } else {
    std::cout << "SC(nash)    = " << r.sc_nash << '\n';
    std::cout << "SC(optimum) = " << r.sc_optimum << '\n';
    if (r.kind == PoaResult::Kind::Ratio)
      std::cout << "PoA         = " << r.ratio << '\n';
    else
      std::cout << "PoA         = " << kind_label(r.kind) << '\n';
    std::cout << "nash residual = " << r.nash_residual << ", iterations = " << out.iterations
              << '\n';
  }
}

int run_poa(const std::string& path, const std::string& solver, double tol,
            const std::string& format) {
  const GameFile file = load_game(path);
  PoaOutput out;
  DescentOptions options;
  options.outer_tol = tol;
  options.inner_tol = tol / 10.0;
  // Gradient descent on doubles cannot reliably push the social gradient
  // below ~1e-7; the cost itself is then accurate to round-off.
  const double opt_tol = std::max(tol, 1e-7);
  const auto optimum_ok = [](const GeneralSolveResult& r) {
    return r.converged || r.residual <= 1e-5;
  };

  if (const auto* quadratic = std::get_if<QuadraticGame>(&file)) {
    if (solver == "iterative") {
      const HeterogeneousGame converted = quadratic_to_heterogeneous(*quadratic);
      const GeneralSolveResult nash = nash_general(converted, zero_profile(converted), options);
      const GeneralSolveResult opt = optimum_general(converted, zero_profile(converted), opt_tol);
      if (!nash.converged || !optimum_ok(opt))
        throw SolveError("iterative solver did not converge");
      out.result = poa_from_costs(social_cost(converted, nash.profile),
                                  social_cost(converted, opt.profile));
      out.result.nash_residual = nash.residual;
      out.nash = nash.profile;
      out.optimum = opt.profile;
      out.iterations = nash.rounds + opt.rounds;
    } else {
      out.result = price_of_anarchy(*quadratic);
      out.nash = nash_quadratic(*quadratic);
      out.optimum = optimum_quadratic(*quadratic);
    }
  } else if (const auto* heterogeneous = std::get_if<HeterogeneousGame>(&file)) {
    const GeneralSolveResult nash = nash_general(*heterogeneous, zero_profile(*heterogeneous),
                                                 options);
    const GeneralSolveResult opt =
        optimum_general(*heterogeneous, zero_profile(*heterogeneous), opt_tol);
    if (!nash.converged || !optimum_ok(opt))
      throw SolveError("iterative solver did not converge");
    out.result = poa_from_costs(social_cost(*heterogeneous, nash.profile),
                                social_cost(*heterogeneous, opt.profile));
    out.result.nash_residual = nash.residual;
    out.nash = nash.profile;
    out.optimum = opt.profile;
    out.iterations = nash.rounds + opt.rounds;
  } else if (const auto* clique = std::get_if<CliqueGame>(&file)) {
    const GeneralSolveResult nash = nash_clique(*clique, zero_profile(clique->base), options);
    const GeneralSolveResult opt =
        optimum_general(clique->base, zero_profile(clique->base), opt_tol);
    if (!nash.converged || !optimum_ok(opt))
      throw SolveError("iterative solver did not converge");
    out.result = poa_from_costs(social_cost(clique->base, nash.profile),
                                social_cost(clique->base, opt.profile));
    out.result.nash_residual = nash.residual;
    out.nash = nash.profile;
    out.optimum = opt.profile;
    out.iterations = nash.rounds + opt.rounds;
  } else if (const auto* nonconvex = std::get_if<NonconvexExample>(&file)) {
    // Gradient logic is invalid here; the dedicated grid oracle stands in.
    double z1 = 0.75, z2 = 0.75;
    for (int sweep = 0; sweep < 50; ++sweep) {
      const double next1 = nonconvex->grid_best_response(0, z2);
      const double next2 = nonconvex->grid_best_response(1, next1);
      if (std::abs(next1 - z1) < 1e-12 && std::abs(next2 - z2) < 1e-12) break;
      z1 = next1;
      z2 = next2;
    }
    out.result = poa_from_costs(nonconvex->social_cost(z1, z2), nonconvex->social_cost(0.0, 0.0));
    out.nash = {Vector::Constant(1, z1), Vector::Constant(1, z2)};
    out.optimum = {Vector::Zero(1), Vector::Zero(1)};
  }
  print_poa(out, format);
  return kOk;
}

int run_zeta(std::optional<double> alpha, const std::string& range, bool with_limit,
             const std::string& out_path) {
  std::vector<double> alphas;
  if (alpha) {
    alphas.push_back(*alpha);
  } else if (!range.empty()) {
    double lo = 0, hi = 0, step = 0;
    char c1 = 0, c2 = 0;
    std::istringstream in(range);
    in >> lo >> c1 >> hi >> c2 >> step;
    if (!in || c1 != ':' || c2 != ':' || step <= 0) {
      std::cerr << "zeta: bad --range, expected lo:hi:step\n";
      return kUsage;
    }
    for (double a = lo; a <= hi + 1e-12; a += step) alphas.push_back(a);
  } else {
    std::cerr << "zeta: need --alpha or --range\n";
    return kUsage;
  }
  for (double a : alphas) {
    if (!(a > 1.0)) {
      std::cerr << "zeta: alpha must exceed 1 (got " << a << ")\n";
      return kUsage;
    }
  }

  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) {
      std::cerr << "zeta: cannot write " << out_path << '\n';
      return kUsage;
    }
    out = &file;
  }
  out->precision(15);
  *out << "alpha,zeta\n";
  for (double a : alphas) *out << a << ',' << zeta(a) << '\n';
  if (with_limit) *out << "inf," << zeta_limit() << '\n';
  return kOk;
}

int run_generate(const std::string& kind, int n, int m, double density, std::uint64_t seed,
                 double epsilon, const std::string& out_path) {
  GameFile file{QuadraticGame{}};
  if (kind == "exp-tight") {
    file = build_three_person(exp_tight_spec()).game;
  } else if (kind == "nonconvex") {
    file = nonconvex_example(epsilon);
  } else if (kind == "no-nash") {
    file = no_nash_example();
  } else if (kind == "random-quadratic") {
    RandomQuadraticOptions options;
    options.persons = n;
    options.dim = m;
    options.density = density;
    file = random_quadratic_game(options, seed);
  } else {
    std::cerr << "generate: unknown kind '" << kind << "'\n";
    return kUsage;
  }
  save_game(file, out_path);
  return kOk;
}

int run_simulate(const std::string& path, const std::string& init, double tol, int max_iter,
                 const std::string& trace_path, int stride) {
  const GameFile file = load_game(path);
  const auto* game = std::get_if<QuadraticGame>(&file);
  if (game == nullptr) {
    std::cerr << "simulate: best-response simulation needs a quadratic game file\n";
    return kUsage;
  }

  OpinionProfile z0;
  if (init == "zeros") {
    z0 = zero_profile(*game);
  } else if (init == "anchor") {
    z0 = game->internal_opinion;
  } else {
    std::istringstream in(init);
    std::vector<double> values;
    double v = 0;
    char sep = 0;
    while (in >> v) {
      values.push_back(v);
      in >> sep;
    }
    if (static_cast<int>(values.size()) != game->person_count() * game->dim) {
      std::cerr << "simulate: --init needs zeros, anchor, or n*m comma-separated values\n";
      return kUsage;
    }
    Vector flat(values.size());
    for (std::size_t k = 0; k < values.size(); ++k) flat[k] = values[k];
    z0 = split(flat, std::vector<int>(game->person_count(), game->dim));
  }

  std::ofstream trace_file;
  TraceOptions trace;
  trace.stride = stride;
  if (!trace_path.empty()) {
    trace_file.open(trace_path);
    if (!trace_file) {
      std::cerr << "simulate: cannot write " << trace_path << '\n';
      return kUsage;
    }
    trace.out = &trace_file;
  }

  const SimulateResult result = simulate(*game, z0, tol, max_iter, trace);
  switch (result.status) {
    case SimulateResult::Status::Converged:
      std::cout << "converged after " << result.iterations << " iterations\n";
      for (int i = 0; i < game->person_count(); ++i)
        std::cout << "  person " << i << ": " << result.final[i].transpose() << '\n';
      return kOk;
    case SimulateResult::Status::Diverged:
      std::cout << "diverged after " << result.iterations << " iterations\n";
      return kNegative;
    case SimulateResult::Status::MaxIterReached:
      std::cout << "max iterations reached without convergence\n";
      return kNumericFailure;
  }
  return kNumericFailure;
}

std::optional<CostFunction> parse_function(const std::string& spec) {
  if (spec == "exp") return CostFunction::exp_scalar();
  if (spec == "square") return CostFunction::square_scalar();
  if (spec == "cosh") return CostFunction::cosh_scalar();
  if (spec.rfind("power:", 0) == 0) {
    try {
      const double alpha = std::stod(spec.substr(6));
      return CostFunction::abs_power(alpha);
    } catch (const std::exception&) {
      return std::nullopt;
    }
  }
  return std::nullopt;
}

int run_suitability(const std::string& fn_spec, double lambda, double kappa,
                    const std::string& p_choice, int samples, std::uint64_t seed, double box,
                    bool min_ratio, double tol) {
  const auto f = parse_function(fn_spec);
  if (!f) {
    std::cerr << "suitability: unknown function '" << fn_spec
              << "' (use exp, square, cosh, power:<alpha>)\n";
    return kUsage;
  }
  SampleSpec spec;
  spec.box_lo = -box;
  spec.box_hi = box;
  spec.pairs = samples;

  if (min_ratio) {
    const MinRatioResult result = min_ratio_search(*f, spec, tol, seed);
    std::cout << "min ratio " << result.ratio << " with lambda = " << result.lambda
              << ", kappa = " << result.kappa << " (" << result.constraints
              << " sampled constraints)\n";
    return kOk;
  }

  if (!(lambda > 0.0) || !(kappa > 0.0)) {
    std::cerr << "suitability: --lambda and --kappa must be positive\n";
    return kUsage;
  }
  std::vector<int> ps;
  if (p_choice == "1")
    ps = {1};
  else if (p_choice == "2")
    ps = {2};
  else if (p_choice == "both")
    ps = {1, 2};
  else {
    std::cerr << "suitability: --p must be 1, 2, or both\n";
    return kUsage;
  }
  for (int p : ps) {
    const SuitabilityReport report = verify_suitability(*f, lambda, kappa, p, spec, seed);
    if (!report.pass) {
      std::cout << "violation at p = " << p << ": a = " << report.counterexample_a.transpose()
                << ", b = " << report.counterexample_b.transpose()
                << ", magnitude = " << report.violation << '\n';
      return kNegative;
    }
    std::cout << "pass at p = " << p << " (" << report.evaluated
              << " pairs, worst slack = " << report.worst_slack << ")\n";
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multidimensional opinion-formation games: equilibria, dynamics, and "
               "price-of-anarchy bounds"};
  app.require_subcommand(1);

  // poa
  std::string poa_file, poa_solver = "closed", poa_format = "text";
  double poa_tol = 1e-8;
  auto* poa = app.add_subcommand("poa", "Nash, optimum, and price of anarchy of a game file");
  poa->add_option("game", poa_file, "game JSON file")->required();
  poa->add_option("--solver", poa_solver, "closed|iterative")
      ->check(CLI::IsMember({"closed", "iterative"}));
  poa->add_option("--tol", poa_tol, "solver tolerance");
  poa->add_option("--format", poa_format, "text|json|csv")
      ->check(CLI::IsMember({"text", "json", "csv"}));

  // zeta
  std::optional<double> zeta_alpha;
  std::string zeta_range, zeta_out;
  bool zeta_limit_row = false;
  auto* zeta_cmd = app.add_subcommand("zeta", "worst-case PoA curve of ||z||^alpha");
  zeta_cmd->add_option("--alpha", zeta_alpha, "single exponent");
  zeta_cmd->add_option("--range", zeta_range, "lo:hi:step sweep");
  zeta_cmd->add_flag("--limit", zeta_limit_row, "append the 2/(e ln 2) asymptote row");
  zeta_cmd->add_option("--out", zeta_out, "write CSV here instead of stdout");

  // generate
  std::string gen_kind, gen_out;
  int gen_n = 5, gen_m = 2;
  double gen_density = 0.5, gen_epsilon = 0.125;
  std::uint64_t gen_seed = 0;
  auto* gen = app.add_subcommand("generate", "write a game file");
  gen->add_option("--kind", gen_kind, "exp-tight|nonconvex|no-nash|random-quadratic")->required();
  gen->add_option("--out", gen_out, "output path")->required();
  gen->add_option("--n", gen_n, "persons (random-quadratic)");
  gen->add_option("--m", gen_m, "opinion dimension (random-quadratic)");
  gen->add_option("--density", gen_density, "edge density (random-quadratic)");
  gen->add_option("--seed", gen_seed, "random seed");
  gen->add_option("--epsilon", gen_epsilon, "internal weight (nonconvex)");

  // simulate
  std::string sim_file, sim_init = "zeros", sim_trace;
  double sim_tol = 1e-10;
  int sim_max_iter = 100000, sim_stride = 1;
  auto* sim = app.add_subcommand("simulate", "run best-response dynamics on a quadratic game");
  sim->add_option("game", sim_file, "game JSON file")->required();
  sim->add_option("--init", sim_init, "zeros|anchor|v1,v2,...");
  sim->add_option("--tol", sim_tol, "convergence tolerance (inf-norm of the update)");
  sim->add_option("--max-iter", sim_max_iter, "iteration cap");
  sim->add_option("--trace", sim_trace, "write iter,person,component,value CSV here");
  sim->add_option("--stride", sim_stride, "record every stride-th iteration");

  // suitability
  std::string suit_fn, suit_p = "both";
  double suit_lambda = 0, suit_kappa = 0, suit_box = 10.0, suit_tol = 2e-4;
  int suit_samples = 10000;
  std::uint64_t suit_seed = 0;
  bool suit_min_ratio = false;
  auto* suit = app.add_subcommand("suitability", "sampled suitability check / min-ratio search");
  suit->add_option("--fn", suit_fn, "exp|square|cosh|power:<alpha>")->required();
  suit->add_option("--lambda", suit_lambda, "lambda");
  suit->add_option("--kappa", suit_kappa, "kappa");
  suit->add_option("--p", suit_p, "1|2|both");
  suit->add_option("--samples", suit_samples, "sampled pairs");
  suit->add_option("--seed", suit_seed, "random seed");
  suit->add_option("--box", suit_box, "sampling box half-width");
  suit->add_flag("--min-ratio", suit_min_ratio, "search the minimum lambda/kappa instead");
  suit->add_option("--tol", suit_tol, "bisection tolerance for --min-ratio");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (poa->parsed()) return run_poa(poa_file, poa_solver, poa_tol, poa_format);
    if (zeta_cmd->parsed()) return run_zeta(zeta_alpha, zeta_range, zeta_limit_row, zeta_out);
    if (gen->parsed())
      return run_generate(gen_kind, gen_n, gen_m, gen_density, gen_seed, gen_epsilon, gen_out);
    if (sim->parsed())
      return run_simulate(sim_file, sim_init, sim_tol, sim_max_iter, sim_trace, sim_stride);
    if (suit->parsed())
      return run_suitability(suit_fn, suit_lambda, suit_kappa, suit_p, suit_samples, suit_seed,
                             suit_box, suit_min_ratio, suit_tol);
  } catch (const SchemaError& e) {
    std::cerr << "schema error: " << e.what() << '\n';
    return kUsage;
  } catch (const ValidationError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kUsage;
  } catch (const SolveError& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kNumericFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumericFailure;
  }
  return kUsage;
}
