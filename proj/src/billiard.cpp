#include "visbound/billiard.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <limits>
#include <thread>

#include "visbound/constants.hpp"
#include "visbound/errors.hpp"
#include "visbound/rng.hpp"

namespace visbound {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kUnitTolerance = 1e-9;
constexpr std::uint64_t kChunk = 1u << 15;
constexpr std::uint64_t kMinSamples = 1000;

double shoelace(const Polygon& poly) {
  double twice = 0.0;
  const auto& v = poly.vertices;
  for (std::size_t i = 0; i < v.size(); ++i) twice += cross(v[i], v[(i + 1) % v.size()]);
  return 0.5 * twice;
}

int orientation(Vec2 a, Vec2 b, Vec2 c) {
  const double o = cross(b - a, c - a);
  return (o > 0.0) - (o < 0.0);
}

bool on_segment(Vec2 a, Vec2 b, Vec2 p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

bool segments_touch(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  const int o1 = orientation(a, b, c);
  const int o2 = orientation(a, b, d);
  const int o3 = orientation(c, d, a);
  const int o4 = orientation(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

double segment_distance(Vec2 a, Vec2 b, Vec2 p) {
  const Vec2 e = b - a;
  const double len2 = dot(e, e);
  const double s = len2 > 0.0 ? std::clamp(dot(p - a, e) / len2, 0.0, 1.0) : 0.0;
  return norm(p - (a + s * e));
}

bool inside(const Polygon& poly, Vec2 p) {
  bool in = false;
  const auto& v = poly.vertices;
  for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
    if ((v[i].y > p.y) != (v[j].y > p.y) &&
        p.x < (v[j].x - v[i].x) * (p.y - v[i].y) / (v[j].y - v[i].y) + v[i].x) {
      in = !in;
    }
  }
  return in;
}

void validate_polygon(const Polygon& poly, std::size_t index) {
  const auto& v = poly.vertices;
  const std::string name = "polygon " + std::to_string(index);
  if (v.size() < 3) throw InvalidInput(name + " has fewer than 3 vertices");
  for (const auto& p : v) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw InvalidInput(name + " has a non-finite vertex");
    if (norm(p) > 1.0 - kBoundaryMargin) throw InvalidInput(name + " reaches the unit circle");
  }
  if (std::abs(shoelace(poly)) <= 1e-15) throw InvalidInput(name + " has zero area");
  const std::size_t m = v.size();
  for (std::size_t i = 0; i < m; ++i) {
    if (norm(v[(i + 1) % m] - v[i]) == 0.0) throw InvalidInput(name + " repeats a vertex");
    for (std::size_t j = i + 1; j < m; ++j) {
      if (j == i + 1 || (i == 0 && j == m - 1)) continue;
      if (segments_touch(v[i], v[(i + 1) % m], v[j], v[(j + 1) % m])) {
        throw InvalidInput(name + " is not simple");
      }
    }
  }
}

bool polygons_overlap(const Polygon& a, const Polygon& b) {
  const auto& u = a.vertices;
  const auto& w = b.vertices;
  for (std::size_t i = 0; i < u.size(); ++i) {
    for (std::size_t j = 0; j < w.size(); ++j) {
      if (segments_touch(u[i], u[(i + 1) % u.size()], w[j], w[(j + 1) % w.size()])) return true;
    }
  }
  return inside(a, w[0]) || inside(b, u[0]);
}

bool polygon_disc_overlap(const Polygon& poly, const Disc& disc) {
  const auto& v = poly.vertices;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (segment_distance(v[i], v[(i + 1) % v.size()], disc.center) <= disc.radius) return true;
  }
  return inside(poly, disc.center);
}

struct Hit {
  double t = kInf;
  Vec2 normal;
  int primitive = -1;
  bool singular = false;
};

}  // namespace

double Scene2D::normalized_volume() const { return area_ / kPi; }

Scene2D make_scene(std::vector<Polygon> polygons, std::vector<Disc> discs) {
  for (std::size_t i = 0; i < polygons.size(); ++i) validate_polygon(polygons[i], i);
  for (std::size_t i = 0; i < discs.size(); ++i) {
    const auto& d = discs[i];
    const std::string name = "disc " + std::to_string(i);
    if (!std::isfinite(d.center.x) || !std::isfinite(d.center.y) || !std::isfinite(d.radius)) {
      throw InvalidInput(name + " has non-finite parameters");
    }
    if (!(d.radius > 0.0)) throw InvalidInput(name + " needs a positive radius");
    if (norm(d.center) + d.radius > 1.0 - kBoundaryMargin) {
      throw InvalidInput(name + " reaches the unit circle");
    }
  }
  for (std::size_t i = 0; i < polygons.size(); ++i) {
    for (std::size_t j = i + 1; j < polygons.size(); ++j) {
      if (polygons_overlap(polygons[i], polygons[j])) {
        throw InvalidInput("polygons " + std::to_string(i) + " and " + std::to_string(j) + " overlap");
      }
    }
    for (std::size_t j = 0; j < discs.size(); ++j) {
      if (polygon_disc_overlap(polygons[i], discs[j])) {
        throw InvalidInput("polygon " + std::to_string(i) + " and disc " + std::to_string(j) + " overlap");
      }
    }
  }
  for (std::size_t i = 0; i < discs.size(); ++i) {
    for (std::size_t j = i + 1; j < discs.size(); ++j) {
      if (norm(discs[i].center - discs[j].center) <= discs[i].radius + discs[j].radius) {
        throw InvalidInput("discs " + std::to_string(i) + " and " + std::to_string(j) + " overlap");
      }
    }
  }
  Scene2D scene;
  scene.polygons_ = std::move(polygons);
  scene.discs_ = std::move(discs);
  scene.area_ = scene_area(scene);
  return scene;
}

double scene_area(const Scene2D& scene) {
  double area = 0.0;
  for (const auto& p : scene.polygons()) area += std::abs(shoelace(p));
  for (const auto& d : scene.discs()) area += kPi * d.radius * d.radius;
  return area;
}

RayOutcome trace(const Scene2D& scene, Vec2 v, Vec2 n, const TraceOptions& options) {
  if (std::abs(norm(n) - 1.0) > kUnitTolerance) throw DomainError("trace: n must lie on the unit circle");
  if (std::abs(norm(v) - 1.0) > kUnitTolerance) throw DomainError("trace: v must be a unit vector");
  if (dot(v, n) < -kUnitTolerance) throw DomainError("trace: need <v, n> >= 0");

  RayOutcome out;
  out.entry_point = n;
  out.entry_direction = -v;
  Vec2 p = n;
  Vec2 w = -v;
  int last = -1;

  // Primitive ids: polygon edges first, in order, then discs.
  std::vector<std::size_t> edge_offset;
  std::size_t edges = 0;
  for (const auto& poly : scene.polygons()) {
    edge_offset.push_back(edges);
    edges += poly.vertices.size();
  }

  for (;;) {
    Hit hit;
    for (std::size_t pi = 0; pi < scene.polygons().size(); ++pi) {
      const auto& vs = scene.polygons()[pi].vertices;
      for (std::size_t e = 0; e < vs.size(); ++e) {
        const int id = static_cast<int>(edge_offset[pi] + e);
        if (id == last) continue;
        const Vec2 a = vs[e];
        const Vec2 b = vs[(e + 1) % vs.size()];
        const Vec2 ab = b - a;
        const double denom = cross(w, ab);
        if (denom == 0.0) continue;
        const Vec2 ap = a - p;
        const double t = cross(ap, ab) / denom;
        const double s = cross(ap, w) / denom;
        if (t <= 0.0 || s < 0.0 || s > 1.0 || t >= hit.t) continue;
        hit.t = t;
        hit.primitive = id;
        Vec2 nu{-ab.y, ab.x};
        nu = (1.0 / norm(nu)) * nu;
        if (dot(nu, w) > 0.0) nu = -nu;
        hit.normal = nu;
        const Vec2 q = p + t * w;
        hit.singular = norm(q - a) < options.vertex_radius || norm(q - b) < options.vertex_radius;
      }
    }
    for (std::size_t di = 0; di < scene.discs().size(); ++di) {
      const int id = static_cast<int>(edges + di);
      if (id == last) continue;
      const auto& disc = scene.discs()[di];
      const Vec2 oc = p - disc.center;
      const double b = dot(oc, w);
      const double c = dot(oc, oc) - disc.radius * disc.radius;
      const double disc2 = b * b - c;
      if (disc2 < 0.0) continue;
      const double t = -b - std::sqrt(disc2);
      if (t <= 0.0 || t >= hit.t) continue;
      hit.t = t;
      hit.primitive = id;
      const Vec2 radial = p + t * w - disc.center;
      hit.normal = (1.0 / norm(radial)) * radial;
      hit.singular = false;
    }

    if (hit.primitive < 0) {
      const double b = dot(p, w);
      const double t = -b + std::sqrt(std::max(0.0, b * b - (dot(p, p) - 1.0)));
      out.exit_point = p + t * w;
      out.exit_direction = w;
      out.path_length += t;
      return out;
    }
    if (hit.singular) throw SingularHit("trace: ray hit a polygon vertex");
    if (++out.bounces > options.max_bounces) {
      throw TrappedRay("trace: more than " + std::to_string(options.max_bounces) + " bounces");
    }
    const Vec2 q = p + hit.t * w;
    const Vec2 reflected = w - 2.0 * dot(w, hit.normal) * hit.normal;
    if (options.log) options.log->push_back({q, hit.normal, w, reflected});
    w = reflected;
    p = q + options.advance * w;
    out.path_length += hit.t + options.advance;
    last = hit.primitive;
  }
}

void RunningStats::add(double x) {
  ++count;
  const double delta = x - mean;
  mean += delta / static_cast<double>(count);
  m2 += delta * (x - mean);
}

void RunningStats::merge(const RunningStats& other) {
  if (other.count == 0) return;
  if (count == 0) {
    *this = other;
    return;
  }
  const double total = static_cast<double>(count + other.count);
  const double delta = other.mean - mean;
  mean += delta * static_cast<double>(other.count) / total;
  m2 += other.m2 + delta * delta * static_cast<double>(count) * static_cast<double>(other.count) / total;
  count += other.count;
}

double RunningStats::variance() const {
  return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0;
}

std::pair<Vec2, Vec2> sample_ray(std::uint64_t seed, std::uint64_t index) {
  auto rng = CounterRng::for_sample(seed, index);
  const double angle = 2.0 * kPi * rng.uniform();
  const double s = 2.0 * rng.uniform() - 1.0;
  const Vec2 n{std::cos(angle), std::sin(angle)};
  const Vec2 tangent{-n.y, n.x};
  const double c = std::sqrt(std::max(0.0, 1.0 - s * s));
  return {c * n + s * tangent, n};
}

SimulationReport simulate(const Scene2D& scene, std::uint64_t samples, std::uint64_t seed,
                          unsigned workers) {
  if (samples < kMinSamples) throw InvalidInput("simulate: need at least 1000 samples");
  struct Partial {
    RunningStats visibility;
    RunningStats f1;
    std::uint64_t discarded = 0;
  };
  const std::uint64_t chunks = (samples + kChunk - 1) / kChunk;
  std::vector<Partial> partials(chunks);
  std::atomic<std::uint64_t> next{0};
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, chunks));

  auto work = [&] {
    for (std::uint64_t c = next++; c < chunks; c = next++) {
      Partial& part = partials[c];
      const std::uint64_t end = std::min(samples, (c + 1) * kChunk);
      for (std::uint64_t k = c * kChunk; k < end; ++k) {
        const auto [v, n] = sample_ray(seed, k);
        RayOutcome out;
        try {
          out = trace(scene, v, n);
        } catch (const SingularHit&) {
          ++part.discarded;
          continue;
        }
        const Vec2 sum = v + out.exit_direction;
        part.visibility.add(0.75 * dot(sum, sum) / 2.0);
        part.f1.add(1.0 - 2.0 / kPi * norm(n - out.exit_point));
      }
    }
  };
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> threads;
  for (unsigned t = 1; t < workers; ++t) {
    threads.emplace_back([&, t] {
      try {
        work();
      } catch (...) {
        errors[t] = std::current_exception();
        next = chunks;
      }
    });
  }
  try {
    work();
  } catch (...) {
    errors[0] = std::current_exception();
    next = chunks;
  }
  for (auto& th : threads) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  Partial total;
  for (const auto& part : partials) {
    total.visibility.merge(part.visibility);
    total.f1.merge(part.f1);
    total.discarded += part.discarded;
  }
  if (static_cast<double>(total.discarded) > kMaxDiscardFraction * static_cast<double>(samples)) {
    throw SingularHit("simulate: " + std::to_string(total.discarded) + " of " +
                      std::to_string(samples) + " rays hit polygon vertices");
  }
  auto finish = [&](const RunningStats& stats) {
    McEstimate est;
    est.mean = stats.mean;
    est.std_error = stats.count > 0 ? std::sqrt(stats.variance() / static_cast<double>(stats.count)) : 0.0;
    est.samples = samples;
    est.seed = seed;
    est.discarded = total.discarded;
    return est;
  };
  SimulationReport report;
  report.visibility = finish(total.visibility);
  report.f1 = finish(total.f1);
  report.area = scene.area();
  report.normalized_volume = scene.normalized_volume();
  return report;
}

McEstimate estimate_visibility(const Scene2D& scene, std::uint64_t samples, std::uint64_t seed,
                               unsigned workers) {
  return simulate(scene, samples, seed, workers).visibility;
}

McEstimate estimate_F1(const Scene2D& scene, std::uint64_t samples, std::uint64_t seed,
                       unsigned workers) {
  return simulate(scene, samples, seed, workers).f1;
}

}  // namespace visbound
