#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace visbound {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

struct Disc {
  Vec2 center;
  double radius = 0.0;
};

struct Polygon {
  std::vector<Vec2> vertices;   // closed implicitly, either orientation
};

/// Obstacles strictly inside the unit disc, pairwise disjoint. Built only
/// through `make_scene`, which validates and caches the area.
class Scene2D {
 public:
  Scene2D() = default;

  const std::vector<Polygon>& polygons() const { return polygons_; }
  const std::vector<Disc>& discs() const { return discs_; }
  double area() const { return area_; }
  /// area / pi
  double normalized_volume() const;
  bool empty() const { return polygons_.empty() && discs_.empty(); }

 private:
  friend Scene2D make_scene(std::vector<Polygon> polygons, std::vector<Disc> discs);
  std::vector<Polygon> polygons_;
  std::vector<Disc> discs_;
  double area_ = 0.0;
};

/// Obstacles must keep a margin of 1e-9 from the unit circle.
inline constexpr double kBoundaryMargin = 1e-9;

/// Throws InvalidInput for degenerate, self-intersecting, overlapping or
/// out-of-bounds obstacles.
Scene2D make_scene(std::vector<Polygon> polygons, std::vector<Disc> discs);

/// Shoelace sum for polygons plus pi r^2 for discs.
double scene_area(const Scene2D& scene);

/// JSON: {"polygons": [[[x, y], ...], ...], "discs": [{"cx": .., "cy": .., "r": ..}, ...]}.
/// Both keys are optional. Throws InvalidInput on malformed text or scenes.
Scene2D parse_scene(const std::string& text);

/// Throws IoError when the file cannot be read.
Scene2D load_scene(const std::string& path);

struct Bounce {
  Vec2 point;
  Vec2 normal;     // unit, facing the incoming ray
  Vec2 incoming;
  Vec2 outgoing;
};

/// Particle enters at `entry_point` with velocity `entry_direction` (= -v) and
/// leaves the unit disc at `exit_point` with velocity `exit_direction` (= v+).
struct RayOutcome {
  Vec2 entry_point;
  Vec2 entry_direction;
  Vec2 exit_point;
  Vec2 exit_direction;
  int bounces = 0;
  double path_length = 0.0;
};

struct TraceOptions {
  int max_bounces = 10000;
  double vertex_radius = 1e-10;
  double advance = 1e-12;
  std::vector<Bounce>* log = nullptr;
};

/// Specular billiard inside the unit disc. The particle starts at n with
/// velocity -v (<v, n> >= 0) and reflects by w -> w - 2 <w, nu> nu until it
/// leaves. Throws DomainError for invalid (v, n), TrappedRay past the bounce
/// cap and SingularHit on a polygon vertex.
RayOutcome trace(const Scene2D& scene, Vec2 v, Vec2 n, const TraceOptions& options = {});

/// Streaming mean and variance (Welford), mergeable in a fixed order.
struct RunningStats {
  std::uint64_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x);
  void merge(const RunningStats& other);
  double variance() const;
};

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t samples = 0;     // requested draws, discarded ones included
  std::uint64_t seed = 0;
  std::uint64_t discarded = 0;   // singular hits
};

/// Largest tolerated fraction of discarded samples.
inline constexpr double kMaxDiscardFraction = 1e-4;

struct SimulationReport {
  McEstimate visibility;
  McEstimate f1;
  double area = 0.0;
  double normalized_volume = 0.0;
};

/// One pass over `samples` rays: n uniform on the circle, v cosine-weighted
/// about n. Visibility averages (3/4) |v + v+|^2 / 2, F1 averages
/// 1 - (2/pi) |n - n+|. Sample k draws from its own counter stream, and
/// chunks are merged in index order, so the result does not depend on
/// `workers` (0 = hardware concurrency). Throws InvalidInput for fewer than
/// 1000 samples, SingularHit when more than 1e-4 of the rays are discarded,
/// and TrappedRay from any trapped ray.
SimulationReport simulate(const Scene2D& scene, std::uint64_t samples, std::uint64_t seed,
                          unsigned workers = 0);

McEstimate estimate_visibility(const Scene2D& scene, std::uint64_t samples, std::uint64_t seed,
                               unsigned workers = 0);
McEstimate estimate_F1(const Scene2D& scene, std::uint64_t samples, std::uint64_t seed,
                       unsigned workers = 0);

/// The ray drawn for sample `index`: returns (v, n).
std::pair<Vec2, Vec2> sample_ray(std::uint64_t seed, std::uint64_t index);

}  // namespace visbound
