#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "visbound/billiard.hpp"
#include "visbound/bounds.hpp"
#include "visbound/constants.hpp"
#include "visbound/discretization.hpp"
#include "visbound/errors.hpp"
#include "visbound/kernel.hpp"
#include "visbound/output.hpp"
#include "visbound/transport.hpp"
#include "visbound/verify.hpp"

using namespace visbound;

namespace {

enum ExitCode { kOk = 0, kValidation = 1, kSolver = 2, kVerification = 3, kIo = 4 };

unsigned default_workers() {
  if (const char* env = std::getenv("VISBOUND_WORKERS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return 0;
}

std::string num(double v) { return format_number(v); }

void emit(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
  } else {
    write_text_file(path, content);
  }
}

struct Args {
  int dim = 2;
  double Lambda = 0.5;
  int theta_grid = 181;
  double lambda = 0.0;
  std::size_t n = 200;
  std::string plan_path;
  std::size_t lambda_samples = 200;
  std::size_t x_samples = 101;
  std::string out;
  std::string svg;
  std::string m_d_source = "lp";
  std::string scene;
  std::uint64_t samples = 100000;
  std::uint64_t seed = 1;
  bool quick = false;
  unsigned workers = default_workers();
};

int run_kappa(const Args& a) {
  if (a.theta_grid < 2) throw InvalidInput("--theta-grid needs at least 2 points");
  make_dimension_context(a.dim);
  std::string csv = config_header({{"command", "kappa"},
                                   {"dim", std::to_string(a.dim)},
                                   {"Lambda", num(a.Lambda)},
                                   {"theta_grid", std::to_string(a.theta_grid)}}) +
                    "\ntheta,eta,kappa,dkappa_dtheta\n";
  for (int i = 0; i < a.theta_grid; ++i) {
    const double theta = kPi * i / (a.theta_grid - 1);
    const auto p = evaluate_kernel(a.Lambda, theta);
    csv += num(theta) + "," + num(p.eta) + "," + num(p.kappa) + "," + num(kappa_slope(a.Lambda, theta)) + "\n";
  }
  emit(a.out, csv);
  return kOk;
}

int run_ot_solve(const Args& a) {
  const auto ctx = make_dimension_context(a.dim);
  if (a.n < 1) throw InvalidInput("--n must be at least 1");
  if (!(a.lambda > 0.0) || a.lambda > ctx.lambda_hat * (1 + 1e-12)) {
    throw InvalidInput("--lambda must lie in (0, lambda_hat = " + num(ctx.lambda_hat) + "]");
  }
  const auto w = marginal_weights(a.dim, a.n);
  const auto c = cost_matrix(ctx, a.lambda, a.n);
  TransportInstance inst{c.entries, w.weights, w.weights};
  const auto plan = solve_transport(inst);
  const auto mono = check_c_monotonicity(plan, ctx, a.lambda, a.n);
  const double scaled = ctx.visibility_scale() * plan.objective;
  std::printf("dim %d  n %zu  lambda %.12g  Lambda %.12g\n", a.dim, a.n, a.lambda,
              lambda_to_Lambda(ctx, a.lambda));
  std::printf("objective %.15g\nscaled objective %.15g\nI(lambda) %.15g\n", plan.objective, scaled,
              scaled - a.lambda);
  std::printf("support %zu  iterations %zu\n", plan.support.size(), plan.iterations);
  std::printf("certificate violation %.3g  marginal violation %.3g\n", certificate_violation(inst, plan),
              marginal_violation(inst, plan));
  std::printf("monotonicity: separator %.6f  concave pairs %zu (violations %zu)  convex pairs %zu "
              "(violations %zu)  band points %zu\n",
              mono.separator, mono.concave_pairs, mono.concave_violations, mono.convex_pairs,
              mono.convex_violations, mono.band_points);
  if (!a.plan_path.empty()) {
    std::string csv = config_header({{"command", "ot-solve"},
                                     {"dim", std::to_string(a.dim)},
                                     {"lambda", num(a.lambda)},
                                     {"n", std::to_string(a.n)}}) +
                      "\ni,j,phi_mid,psi_mid,mass\n";
    for (const auto& e : plan.support) {
      csv += std::to_string(e.i + 1) + "," + std::to_string(e.j + 1) + "," + num(cell_midpoint(a.n, e.i)) +
             "," + num(cell_midpoint(a.n, e.j)) + "," + num(e.mass) + "\n";
    }
    write_text_file(a.plan_path, csv);
  }
  return kOk;
}

std::pair<double, std::string> resolve_m_d(const DimensionContext& ctx, const Args& a,
                                           const LambdaSweep* sweep) {
  if (a.m_d_source == "literature") {
    const auto lit = literature_m_d(ctx.d);
    if (!lit) throw InvalidInput("no literature value of m_d for d = " + std::to_string(ctx.d));
    return {*lit, "literature"};
  }
  if (a.m_d_source != "lp") throw InvalidInput("--m-d-source must be lp or literature");
  const double value = sweep ? sweep->m_d_discrete : m_d_discrete(ctx, a.n);
  return {value, "lp-n" + std::to_string(a.n)};
}

int run_bound_curve(const Args& a) {
  const auto ctx = make_dimension_context(a.dim);
  if (a.n < 1) throw InvalidInput("--n must be at least 1");
  if (a.lambda_samples < 1) throw InvalidInput("--lambda-samples must be at least 1");
  if (a.x_samples < 2) throw InvalidInput("--x-samples must be at least 2");
  const auto sweep = run_lambda_sweep(ctx, a.n, a.lambda_samples, a.workers);
  const auto xs = unit_grid(a.x_samples);
  const auto lp = legendre_transform(sweep, xs);
  const auto [m_d, source] = resolve_m_d(ctx, a, &sweep);
  auto thm = theorem_bounds(ctx, xs, m_d, source);
  std::vector<BoundCurve> curves{lp};
  curves.insert(curves.end(), thm.curves.begin(), thm.curves.end());
  const std::string header = config_header({{"command", "bound-curve"},
                                            {"dim", std::to_string(a.dim)},
                                            {"n", std::to_string(a.n)},
                                            {"lambda_samples", std::to_string(a.lambda_samples)},
                                            {"x_samples", std::to_string(a.x_samples)},
                                            {"m_d_source", source}}) +
                             "\n# m_d=" + num(m_d) + " m_d_lp=" + num(sweep.m_d_discrete) +
                             " I_star_at_1=" + num(lp.ys.back());
  emit(a.out, bound_curves_csv(header, curves));
  if (!a.svg.empty()) {
    write_text_file(a.svg, bound_curves_svg(curves, "lower bounds for normalized visibility, d = " +
                                                        std::to_string(a.dim)));
  }
  for (const auto& note : thm.notices) std::fprintf(stderr, "note: %s\n", note.c_str());
  if (!a.out.empty() && a.out != "-") {
    std::printf("I*(1) = %.9f  m_d(LP) = %.9f  (d = %d, n = %zu, %zu lambda samples)\n", lp.ys.back(),
                sweep.m_d_discrete, a.dim, a.n, a.lambda_samples);
  }
  return kOk;
}

int run_theorem_bounds(const Args& a) {
  const auto ctx = make_dimension_context(a.dim);
  if (a.x_samples < 2) throw InvalidInput("--x-samples must be at least 2");
  const auto [m_d, source] = resolve_m_d(ctx, a, nullptr);
  const auto xs = unit_grid(a.x_samples);
  const auto thm = theorem_bounds(ctx, xs, m_d, source);
  const double quad = 1.0 / (2.0 * thm.c);
  const std::string header = config_header({{"command", "theorem-bounds"},
                                            {"dim", std::to_string(a.dim)},
                                            {"x_samples", std::to_string(a.x_samples)},
                                            {"m_d_source", source}}) +
                             "\n# m_d=" + num(m_d) + " c=" + num(thm.c) + " tt2a_coefficient=" + num(quad) +
                             " tt2b_coefficient=" + num(tt2b_coefficient(ctx));
  emit(a.out, bound_curves_csv(header, thm.curves));
  for (const auto& note : thm.notices) std::fprintf(stderr, "note: %s\n", note.c_str());
  if (!a.out.empty() && a.out != "-") {
    std::printf("c = %.9f  1/(2c) = %.9f  tt2b coefficient = %.9f  m_d = %.9f (%s)\n", thm.c, quad,
                tt2b_coefficient(ctx), m_d, source.c_str());
  }
  return kOk;
}

int run_simulate(const Args& a) {
  const auto scene = load_scene(a.scene);
  const auto ctx = make_dimension_context(2);
  const auto report = simulate(scene, a.samples, a.seed, a.workers);
  const auto [m_d, source] = resolve_m_d(ctx, a, nullptr);
  const double x = report.normalized_volume;
  const double bound = combined_bound(ctx, m_d, x);
  const bool visibility_ok = report.visibility.mean >= bound - 3 * report.visibility.std_error;
  const bool volume_ok = x <= report.f1.mean + 3 * report.f1.std_error;
  std::printf("scene %s\n", a.scene.c_str());
  std::printf("samples %llu  seed %llu  discarded %llu\n",
              static_cast<unsigned long long>(report.visibility.samples),
              static_cast<unsigned long long>(a.seed),
              static_cast<unsigned long long>(report.visibility.discarded));
  std::printf("visibility %.6f +- %.6f\n", report.visibility.mean, report.visibility.std_error);
  std::printf("area %.9f  normalized volume %.6f\n", report.area, x);
  std::printf("F1 %.6f +- %.6f\n", report.f1.mean, report.f1.std_error);
  std::printf("combined lower bound at x: %.6f (m_d %s)\n", bound, source.c_str());
  std::printf("verdict: visibility >= bound - 3 se: %s; volume <= F1 + 3 se: %s\n",
              visibility_ok ? "ok" : "VIOLATED", volume_ok ? "ok" : "VIOLATED");
  return visibility_ok && volume_ok ? kOk : kVerification;
}

int run_verify(const Args& a) {
  VerifyOptions opt;
  opt.quick = a.quick;
  opt.workers = a.workers;
  const auto results = run_property_suite(opt);
  bool all = true;
  for (const auto& r : results) {
    std::printf("%-24s %s  %s\n", r.name.c_str(), r.passed ? "ok  " : "FAIL", r.detail.c_str());
    all = all && r.passed;
  }
  return all ? kOk : kVerification;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lower bounds for the normalized visibility of bodies, with a transport LP, "
               "closed-form bounds and a billiard simulator."};
  app.require_subcommand(1);
  Args a;

  auto* kappa = app.add_subcommand("kappa", "Tabulate the minimized kernel kappa_Lambda(theta) on [0, pi]");
  kappa->add_option("--dim", a.dim, "Dimension d >= 2")->default_val(2);
  kappa->add_option("--Lambda", a.Lambda, "Normalized multiplier Lambda > 0")->required();
  kappa->add_option("--theta-grid", a.theta_grid, "Number of theta points")->default_val(181);
  kappa->add_option("--out", a.out, "Output CSV (default stdout)");

  auto* ot = app.add_subcommand("ot-solve", "Solve the discretized transport problem at one lambda");
  ot->add_option("--dim", a.dim, "Dimension d >= 2")->default_val(2);
  ot->add_option("--lambda", a.lambda, "Multiplier in (0, lambda_hat]")->required();
  ot->add_option("--n", a.n, "Cells per marginal")->default_val(200);
  ot->add_option("--emit-plan", a.plan_path, "Write the optimal plan as CSV");

  auto* curve = app.add_subcommand("bound-curve", "LP lower-bound curve I*(x) plus closed-form bounds");
  curve->add_option("--dim", a.dim, "Dimension d >= 2")->default_val(2);
  curve->add_option("--n", a.n, "Cells per marginal")->default_val(200);
  curve->add_option("--lambda-samples", a.lambda_samples, "Number of lambda values")->default_val(200);
  curve->add_option("--x-samples", a.x_samples, "Number of x values on [0, 1]")->default_val(101);
  curve->add_option("--out", a.out, "Output CSV (default stdout)");
  curve->add_option("--svg", a.svg, "Also draw the curves as SVG");
  curve->add_option("--m-d-source", a.m_d_source, "lp or literature")->default_val("lp");
  curve->add_option("--workers", a.workers, "Worker threads (0 = all cores)");

  auto* thm = app.add_subcommand("theorem-bounds", "Closed-form lower bounds on an x grid");
  thm->add_option("--dim", a.dim, "Dimension d >= 2")->default_val(2);
  thm->add_option("--out", a.out, "Output CSV (default stdout)");
  thm->add_option("--x-samples", a.x_samples, "Number of x values on [0, 1]")->default_val(101);
  thm->add_option("--m-d-source", a.m_d_source, "lp or literature")->default_val("lp");
  thm->add_option("--n", a.n, "Cells per marginal for the LP value of m_d")->default_val(200);

  auto* sim = app.add_subcommand("simulate", "Monte Carlo visibility and volume estimates for a 2D scene");
  sim->add_option("--scene", a.scene, "Scene JSON file")->required();
  sim->add_option("--samples", a.samples, "Number of rays")->default_val(100000);
  sim->add_option("--seed", a.seed, "RNG seed")->default_val(1);
  sim->add_option("--workers", a.workers, "Worker threads (0 = all cores)");
  sim->add_option("--m-d-source", a.m_d_source, "lp or literature")->default_val("lp");
  sim->add_option("--n", a.n, "Cells per marginal for the LP value of m_d")->default_val(200);

  auto* ver = app.add_subcommand("verify", "Run the property suite");
  ver->add_flag("--quick", a.quick, "Smaller grids and sample counts");
  ver->add_option("--workers", a.workers, "Worker threads (0 = all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  try {
    if (*kappa) return run_kappa(a);
    if (*ot) return run_ot_solve(a);
    if (*curve) return run_bound_curve(a);
    if (*thm) return run_theorem_bounds(a);
    if (*sim) return run_simulate(a);
    if (*ver) return run_verify(a);
  } catch (const IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kIo;
  } catch (const DomainError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kValidation;
  } catch (const InvalidInput& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kValidation;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kSolver;
  }
  return kValidation;
}
