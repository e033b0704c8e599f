// Acceptance gate. Prints one PASS/FAIL line per criterion and exits nonzero
// when any selected criterion fails. `--criterion N` runs a single one.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "visbound/billiard.hpp"
#include "visbound/bounds.hpp"
#include "visbound/constants.hpp"
#include "visbound/discretization.hpp"
#include "visbound/kernel.hpp"
#include "visbound/rng.hpp"
#include "visbound/transport.hpp"
#include "visbound/verify.hpp"
#include "visbound/vertex_enumeration.hpp"

using namespace visbound;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& line) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += line + (ok ? "" : " [miss]");
  }
};

std::string f(const char* pattern, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c, d);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double i_star_at_one(int d, std::size_t n, std::size_t samples) {
  const auto sweep = run_lambda_sweep(make_dimension_context(d), n, samples, 0);
  return legendre_transform(sweep, {1.0}).ys[0];
}

Outcome endpoint_reproduction() {
  Outcome o;
  const double target[] = {0.988668, 0.970823};
  for (int d : {2, 3}) {
    auto t0 = std::chrono::steady_clock::now();
    const double reduced = i_star_at_one(d, 200, 200);
    const double reduced_time = seconds_since(t0);
    o.check(std::abs(reduced - target[d - 2]) <= 1e-2,
            f("d=%.0f n=200 M=200: I*(1)=%.6f (target %.6f +-1e-2, %.1fs)", d, reduced, target[d - 2], reduced_time));
    t0 = std::chrono::steady_clock::now();
    const double full = i_star_at_one(d, 1000, 1000);
    o.check(std::abs(full - target[d - 2]) <= 2e-3,
            f("d=%.0f n=1000 M=1000: I*(1)=%.6f (target %.6f +-2e-3, %.0fs)", d, full, target[d - 2],
              seconds_since(t0)));
  }
  return o;
}

Outcome md_proximity() {
  Outcome o;
  for (int d : {2, 3}) {
    const double lit = *literature_m_d(d);
    const double md = m_d_discrete(make_dimension_context(d), 1000);
    o.check(std::abs(md - lit) <= 2e-3, f("d=%.0f m_d(n=1000)=%.6f vs %.6f", d, md, lit));
  }
  return o;
}

Outcome tt2_constants() {
  Outcome o;
  const auto c2 = make_dimension_context(2);
  const auto c3 = make_dimension_context(3);
  const double q2 = 1 / (2 * tt2_constant(c2));
  const double q3 = 1 / (2 * tt2_constant(c3));
  o.check(std::abs(q2 - 0.358) <= 5e-4, f("d=2 1/(2c)=%.6f vs 0.358 +-5e-4", q2));
  o.check(std::abs(q3 - 0.367) <= 5e-4, f("d=3 1/(2c)=%.6f vs 0.367 +-5e-4", q3));
  o.check(std::abs(tt2b_coefficient(c2) - 3 * kPi * kPi / 32) <= 1e-15,
          f("d=2 asymptotic coefficient %.12f vs 3pi^2/32", tt2b_coefficient(c2)));
  o.check(std::abs(tt2b_coefficient(c3) - 2.0 / 3.0) <= 1e-15,
          f("d=3 asymptotic coefficient %.12f vs 2/3", tt2b_coefficient(c3)));
  return o;
}

Outcome kernel_oracle() {
  Outcome o;
  for (int d : {2, 3}) {
    const auto ctx = make_dimension_context(d);
    double worst = 0.0;
    std::uint64_t seed = 1000 * d;
    for (int a = 0; a < 10; ++a) {
      for (int b = 0; b < 10; ++b) {
        const double phi = a / 9.0 * kPi / 2;
        const double psi = b / 9.0 * kPi / 2;
        for (double frac : {0.1, 0.35, 0.6, 0.85, 1.0}) {
          const double lambda = frac * ctx.lambda_hat;
          const auto brute = K_bruteforce(ctx, lambda, phi, psi, 10000, ++seed, 1e-4);
          worst = std::max(worst, std::abs(K_reduced(ctx, lambda, phi, psi) - brute.value));
        }
      }
    }
    o.check(worst <= 1e-3, f("d=%.0f max |K_reduced - K_bruteforce| = %.3g over 500 points", d, worst));
  }
  return o;
}

Outcome derivative_identity() {
  Outcome o;
  const double h = 1e-6;
  double worst = 0.0;
  std::size_t wrong_sign = 0;
  for (double Lambda : {0.25, 0.5, 0.75}) {
    const double sep = kPi - std::asin(Lambda);
    for (int i = 0; i < 50; ++i) {
      const double theta = 1e-3 + i / 49.0 * (sep - 2e-3);
      const double fd = (kappa_of_theta(Lambda, theta + h) - kappa_of_theta(Lambda, theta - h)) / (2 * h);
      worst = std::max(worst, std::abs(fd - kappa_dtheta(Lambda, theta)));
    }
    const double s = 1e-4;
    auto second = [&](double t) {
      return kappa_of_theta(Lambda, t + s) - 2 * kappa_of_theta(Lambda, t) + kappa_of_theta(Lambda, t - s);
    };
    for (int i = 0; i < 50; ++i) {
      wrong_sign += second(2 * s + i / 49.0 * (sep - 4 * s)) >= 0.0;
      wrong_sign += second(sep + 2 * s + i / 49.0 * (kPi - sep - 4 * s)) <= 0.0;
    }
  }
  o.check(worst <= 1e-6, f("max |-Lambda cos(eta) - central difference| = %.3g", worst));
  o.check(wrong_sign == 0, f("%.0f of 300 second differences with the wrong sign", static_cast<double>(wrong_sign)));
  return o;
}

Outcome diagonal_plan() {
  Outcome o;
  const auto r = diagonal_check(2, 200);
  o.check(std::abs(r.objective - r.oracle) <= 5e-3,
          f("n=200 LP %.9f vs diagonal %.9f", r.objective, r.oracle));
  o.check(r.max_offset <= 1, f("max |i-j| on support = %.0f", static_cast<double>(r.max_offset)));
  return o;
}

Outcome solver_exactness() {
  Outcome o;
  std::vector<TransportInstance> corpus;
  CounterRng rng(2718);
  for (int t = 0; t < 400; ++t) {
    const std::size_t m = 1 + rng.next() % 6;
    const std::size_t k = 1 + rng.next() % 6;
    TransportInstance inst;
    inst.row_marginal.resize(m);
    inst.col_marginal.assign(k, 0.0);
    for (auto& a : inst.row_marginal) a = static_cast<double>(1 + rng.next() % 4);
    for (double a : inst.row_marginal) {
      for (int u = 0; u < static_cast<int>(a); ++u) inst.col_marginal[rng.next() % k] += 1.0;
    }
    for (std::size_t e = 0; e < m * k; ++e) inst.cost.push_back(static_cast<double>(rng.next() % 5) + rng.uniform());
    corpus.push_back(std::move(inst));
  }
  for (int d : {2, 3}) {
    const auto ctx = make_dimension_context(d);
    for (std::size_t n = 1; n <= 6; ++n) {
      for (double frac : {0.3, 0.7, 1.0}) {
        if (n == 6 && frac != 0.7) continue;
        const auto w = marginal_weights(d, n);
        corpus.push_back({cost_matrix(ctx, frac * ctx.lambda_hat, n).entries, w.weights, w.weights});
      }
    }
  }
  double gap = 0.0;
  double cert = 0.0;
  double marg = 0.0;
  for (const auto& inst : corpus) {
    const auto plan = solve_transport(inst);
    gap = std::max(gap, std::abs(plan.objective - enumerate_vertex_minimum(inst)));
    cert = std::max(cert, certificate_violation(inst, plan));
    marg = std::max(marg, marginal_violation(inst, plan));
  }
  o.check(gap <= 1e-10, f("%.0f instances, max |simplex - enumeration| = %.3g", static_cast<double>(corpus.size()), gap));
  o.check(cert <= 1e-9 && marg <= 1e-10, f("max certificate violation %.3g, marginal violation %.3g", cert, marg));
  return o;
}

Outcome simulator_calibration() {
  Outcome o;
  for (double r : {0.3, 0.6, 0.9}) {
    const auto est = estimate_visibility(make_scene({}, {Disc{{0, 0}, r}}), 1000000, 42, 0);
    const double z = std::abs(est.mean - r) / est.std_error;
    o.check(z <= 3.0, f("r=%.1f mean %.5f +- %.5f (%.2f sigma)", r, est.mean, est.std_error, z));
  }
  const auto empty = estimate_visibility(make_scene({}, {}), 1000000, 42, 0);
  o.check(empty.mean == 0.0, f("empty scene %.3g", empty.mean));
  return o;
}

Outcome bound_consistency() {
  Outcome o;
  const auto ctx = make_dimension_context(2);
  const double md = m_d_discrete(ctx, 200);
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(VISBOUND_SCENES)) {
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& path : files) {
    const auto scene = load_scene(path.string());
    const auto r = simulate(scene, 400000, 7, 0);
    const double x = r.normalized_volume;
    const double bound = combined_bound(ctx, md, x);
    const bool vis = r.visibility.mean >= bound - 3 * r.visibility.std_error;
    const bool vol = x <= r.f1.mean + 3 * r.f1.std_error;
    o.check(vis && vol, path.filename().string() +
                            f(": [D]=%.4f F=%.4f+-%.4f bound %.4f", x, r.visibility.mean, r.visibility.std_error, bound) +
                            f(" F1=%.4f+-%.4f", r.f1.mean, r.f1.std_error));
  }
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) only = std::atoi(argv[++i]);
  }
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"LP endpoint I*(1)", endpoint_reproduction},
      {"m_d proximity", md_proximity},
      {"quadratic bound constants", tt2_constants},
      {"kernel reduction vs brute force", kernel_oracle},
      {"kernel derivative identity", derivative_identity},
      {"diagonal plan for concave cost", diagonal_plan},
      {"solver exactness", solver_exactness},
      {"simulator calibration", simulator_calibration},
      {"bound consistency on scenes", bound_consistency},
  };
  bool all = true;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    if (only != 0 && only != id) continue;
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    std::printf("criterion %d %s: %s | %s\n", id, o.pass ? "PASS" : "FAIL", criteria[k].first, o.detail.c_str());
    std::fflush(stdout);
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
