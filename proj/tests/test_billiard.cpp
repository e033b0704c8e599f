#include <gtest/gtest.h>

#include <cmath>

#include "visbound/billiard.hpp"
#include "visbound/constants.hpp"
#include "visbound/errors.hpp"
#include "visbound/rng.hpp"

using namespace visbound;

namespace {

Polygon rect(double x0, double y0, double x1, double y1) {
  return Polygon{{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}};
}

Vec2 unit(double angle) { return {std::cos(angle), std::sin(angle)}; }

void expect_vec(Vec2 a, Vec2 b, double tol) {
  EXPECT_NEAR(a.x, b.x, tol);
  EXPECT_NEAR(a.y, b.y, tol);
}

Scene2D mixed_scene() {
  return make_scene({rect(-0.7, -0.2, -0.3, 0.2), Polygon{{{0.1, -0.6}, {0.5, -0.5}, {0.3, -0.2}}}},
                    {Disc{{0.35, 0.4}, 0.25}});
}

}  // namespace

TEST(Scene, Areas) {
  EXPECT_NEAR(make_scene({rect(-0.3, -0.3, 0.3, 0.3)}, {}).area(), 0.36, 1e-15);
  const auto disc = make_scene({}, {Disc{{0, 0}, 0.5}});
  EXPECT_NEAR(disc.area(), kPi / 4, 1e-15);
  EXPECT_NEAR(disc.normalized_volume(), 0.25, 1e-15);
  const auto two = make_scene({}, {Disc{{-0.4, 0}, 0.3}, Disc{{0.45, 0.1}, 0.4}});
  EXPECT_NEAR(scene_area(two), kPi * (0.09 + 0.16), 1e-15);
  // Clockwise vertices give the same area.
  EXPECT_NEAR(make_scene({Polygon{{{0, 0}, {0, 0.5}, {0.5, 0.5}, {0.5, 0}}}}, {}).area(), 0.25, 1e-15);
  EXPECT_EQ(make_scene({}, {}).area(), 0.0);
}

TEST(Scene, Validation) {
  EXPECT_THROW(make_scene({}, {Disc{{0, 0}, 0.3}, Disc{{0.5, 0}, 0.3}}), InvalidInput);
  EXPECT_THROW(make_scene({}, {Disc{{0.5, 0}, 0.6}}), InvalidInput);
  EXPECT_THROW(make_scene({}, {Disc{{0, 0}, 0.0}}), InvalidInput);
  EXPECT_THROW(make_scene({rect(-0.9, -0.9, 0.0, 0.0)}, {}), InvalidInput);
  EXPECT_THROW(make_scene({Polygon{{{0, 0}, {0.5, 0.5}, {0.5, 0}, {0, 0.5}}}}, {}), InvalidInput);
  EXPECT_THROW(make_scene({Polygon{{{0, 0}, {0.5, 0.5}}}}, {}), InvalidInput);
  EXPECT_THROW(make_scene({Polygon{{{0, 0}, {0.2, 0.2}, {0.4, 0.4}}}}, {}), InvalidInput);
  EXPECT_THROW(make_scene({rect(-0.3, -0.3, 0.3, 0.3), rect(0.2, 0.2, 0.5, 0.5)}, {}), InvalidInput);
  EXPECT_THROW(make_scene({rect(-0.5, -0.5, 0.5, 0.5), rect(-0.1, -0.1, 0.1, 0.1)}, {}), InvalidInput);
  EXPECT_THROW(make_scene({rect(-0.5, -0.5, 0.5, 0.5)}, {Disc{{0, 0}, 0.1}}), InvalidInput);
  EXPECT_THROW(make_scene({rect(-0.1, -0.1, 0.1, 0.1)}, {Disc{{0, 0}, 0.5}}), InvalidInput);
  EXPECT_NO_THROW(make_scene({}, {Disc{{0, 0}, 1.0 - 1e-9}}));
}

TEST(SceneIo, ParsesJson) {
  const auto scene = parse_scene(R"({"polygons": [[[0.1, 0.1], [0.4, 0.1], [0.4, 0.3]]],
                                     "discs": [{"cx": -0.4, "cy": 0, "r": 0.2}]})");
  EXPECT_EQ(scene.polygons().size(), 1u);
  EXPECT_EQ(scene.discs().size(), 1u);
  EXPECT_NEAR(scene.area(), 0.03 + kPi * 0.04, 1e-15);
  EXPECT_TRUE(parse_scene("{}").empty());
  EXPECT_THROW(parse_scene("{\"discs\": [{\"cx\": 0}]}"), InvalidInput);
  EXPECT_THROW(parse_scene("[1, 2"), InvalidInput);
  EXPECT_THROW(parse_scene("{\"polygons\": [[[0, \"a\"]]]}"), InvalidInput);
  EXPECT_THROW(load_scene("/nonexistent/scene.json"), IoError);
}

TEST(Trace, EmptySceneIsFreeFlight) {
  const auto scene = make_scene({}, {});
  for (int k = 0; k < 50; ++k) {
    const auto [v, n] = sample_ray(3, k);
    const auto out = trace(scene, v, n);
    EXPECT_EQ(out.bounces, 0);
    EXPECT_EQ(out.exit_direction.x, -v.x);
    EXPECT_EQ(out.exit_direction.y, -v.y);
    expect_vec(out.exit_point, n - 2 * dot(n, v) * v, 1e-14);
    const Vec2 sum = v + out.exit_direction;
    EXPECT_EQ(dot(sum, sum), 0.0);
  }
}

TEST(Trace, NearFullDiscReflectsAtEntry) {
  const auto scene = make_scene({}, {Disc{{0, 0}, 1.0 - 1e-9}});
  for (int k = 0; k < 50; ++k) {
    const auto [v, n] = sample_ray(5, k);
    if (dot(v, n) < 1e-3) continue;
    const auto out = trace(scene, v, n);
    EXPECT_EQ(out.bounces, 1);
    expect_vec(out.exit_direction, -v + 2 * dot(v, n) * n, 1e-6);
    expect_vec(out.exit_point, n, 1e-6);
  }
}

TEST(Trace, HeadOnSegment) {
  const auto scene = make_scene({rect(-0.3, -0.001, 0.3, 0.001)}, {});
  std::vector<Bounce> log;
  TraceOptions opt;
  opt.log = &log;
  const auto out = trace(scene, {0, 1}, {0, 1}, opt);
  EXPECT_EQ(out.bounces, 1);
  expect_vec(out.exit_direction, {0, 1}, 1e-15);
  expect_vec(out.exit_point, {0, 1}, 1e-12);
  EXPECT_NEAR(out.path_length, 2 * 0.999, 1e-11);
  ASSERT_EQ(log.size(), 1u);
  expect_vec(log[0].point, {0, 0.001}, 1e-15);
  expect_vec(log[0].normal, {0, 1}, 1e-15);
}

TEST(Trace, ObliqueReflectionOnEdge) {
  const auto scene = make_scene({rect(-0.5, -0.5, 0.5, 0.0)}, {});
  const Vec2 n{-0.6, 0.8};
  const Vec2 v = unit(3 * kPi / 4);
  const auto out = trace(scene, v, n);
  expect_vec(out.exit_direction, unit(kPi / 4), 1e-14);
  EXPECT_EQ(out.bounces, 1);
}

TEST(Trace, Invariants) {
  const auto scene = mixed_scene();
  for (int k = 0; k < 2000; ++k) {
    const auto [v, n] = sample_ray(11, k);
    std::vector<Bounce> log;
    TraceOptions opt;
    opt.log = &log;
    const auto out = trace(scene, v, n, opt);
    EXPECT_NEAR(norm(out.exit_direction), 1.0, 1e-12 * (1 + out.bounces));
    EXPECT_NEAR(norm(out.exit_point), 1.0, 1e-12);
    EXPECT_GE(out.path_length, norm(n - out.exit_point) - 1e-12);
    for (const auto& b : log) {
      // Equal angles with the normal, mirrored tangential component kept.
      EXPECT_NEAR(dot(b.incoming, b.normal), -dot(b.outgoing, b.normal), 1e-12);
      EXPECT_NEAR(cross(b.incoming, b.normal), cross(b.outgoing, b.normal), 1e-12);
    }
  }
}

TEST(Trace, Reversible) {
  const auto scene = mixed_scene();
  int checked = 0;
  for (int k = 0; k < 2000; ++k) {
    const auto [v, n] = sample_ray(13, k);
    const auto out = trace(scene, v, n);
    if (out.bounces > 10) continue;
    const auto back = trace(scene, out.exit_direction, out.exit_point);
    expect_vec(back.exit_point, n, 1e-6);
    expect_vec(back.exit_direction, v, 1e-6);
    EXPECT_EQ(back.bounces, out.bounces);
    ++checked;
  }
  EXPECT_GT(checked, 1900);
}

TEST(Trace, Errors) {
  const auto square = make_scene({rect(-0.5, -0.5, 0.5, 0.5)}, {});
  const Vec2 corner = unit(kPi / 4);
  EXPECT_THROW(trace(square, corner, corner), SingularHit);
  TraceOptions tight;
  tight.max_bounces = 0;
  EXPECT_THROW(trace(square, {1, 0}, {1, 0}, tight), TrappedRay);
  EXPECT_THROW(trace(square, {1, 0}, {0.5, 0}), DomainError);
  EXPECT_THROW(trace(square, {-1, 0}, {1, 0}), DomainError);
  EXPECT_THROW(trace(square, {2, 0}, {1, 0}), DomainError);
}

TEST(RunningStats, MergeMatchesSequential) {
  CounterRng rng(4);
  RunningStats all, a, b;
  for (int i = 0; i < 1000; ++i) {
    const double x = rng.uniform();
    all.add(x);
    (i < 377 ? a : b).add(x);
  }
  a.merge(b);
  EXPECT_EQ(a.count, all.count);
  EXPECT_NEAR(a.mean, all.mean, 1e-15);
  EXPECT_NEAR(a.variance(), all.variance(), 1e-15);
}

TEST(Estimate, SamplingHasCosineDensity) {
  // E<v,n> under density cos(alpha)/2 on (-pi/2, pi/2) is pi/4.
  RunningStats s;
  for (int k = 0; k < 200000; ++k) {
    const auto [v, n] = sample_ray(21, k);
    EXPECT_GE(dot(v, n), 0.0);
    s.add(dot(v, n));
  }
  EXPECT_NEAR(s.mean, kPi / 4, 4 * std::sqrt(s.variance() / s.count));
}

TEST(Estimate, EmptySceneIsExactlyZero) {
  const auto r = simulate(make_scene({}, {}), 20000, 9, 2);
  EXPECT_EQ(r.visibility.mean, 0.0);
  EXPECT_EQ(r.visibility.std_error, 0.0);
  // Mean chord under cosine weighting is pi/2, so F1 averages to zero.
  EXPECT_NEAR(r.f1.mean, 0.0, 3 * r.f1.std_error);
  EXPECT_EQ(r.visibility.seed, 9u);
  EXPECT_EQ(r.visibility.samples, 20000u);
}

TEST(Estimate, NearFullDiscCalibration) {
  const auto scene = make_scene({}, {Disc{{0, 0}, 1.0 - 1e-9}});
  const auto r = simulate(scene, 200000, 5, 0);
  EXPECT_NEAR(r.visibility.mean, 1.0, 3 * r.visibility.std_error);
  EXPECT_LE(r.visibility.std_error, 0.01);
  EXPECT_NEAR(r.f1.mean, 1.0, 1e-6);
}

TEST(Estimate, IndependentOfWorkerCount) {
  const auto scene = mixed_scene();
  const auto a = simulate(scene, 100000, 77, 1);
  const auto b = simulate(scene, 100000, 77, 3);
  EXPECT_EQ(a.visibility.mean, b.visibility.mean);
  EXPECT_EQ(a.visibility.std_error, b.visibility.std_error);
  EXPECT_EQ(a.f1.mean, b.f1.mean);
  EXPECT_EQ(estimate_visibility(scene, 100000, 77, 2).mean, a.visibility.mean);
  EXPECT_EQ(estimate_F1(scene, 100000, 77, 2).mean, a.f1.mean);
}

TEST(Estimate, Errors) {
  EXPECT_THROW(simulate(make_scene({}, {}), 999, 1), InvalidInput);
}
