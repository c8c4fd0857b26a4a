#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "lmdpinn/network.hpp"

using namespace lmdpinn;
using namespace lmdpinn::net;

namespace {

ScaleSet benchmark_scales(double t_end = 1.0) {
  return ScaleSet::for_box(18e-3, 8e-3, 4e-3, t_end, 298.0, 2000.0, 9e-6, 209e9, 1e-3);
}

}  // namespace

TEST_CASE("glorot init respects the fan bound and zero biases") {
  NetworkConfig cfg = NetworkConfig::temperature_default();
  cfg.init_seed = 99;
  const MlpParams p = init_glorot(cfg);

  // 64 -> 64 hidden layer: bound = sqrt(6/128)
  const double bound_hidden = std::sqrt(6.0 / 128.0);
  CHECK(bound_hidden == Catch::Approx(0.21650635094610965));
  const auto W1 = p.weight(1);
  double max_abs = 0.0;
  for (int c = 0; c < W1.cols(); ++c)
    for (int r = 0; r < W1.rows(); ++r) max_abs = std::max(max_abs, std::abs(W1(r, c)));
  CHECK(max_abs <= bound_hidden);
  CHECK(max_abs > 0.5 * bound_hidden);  // draws actually fill the range

  for (int l = 0; l < cfg.affine_count(); ++l) CHECK(p.bias(l).isZero(0.0));

  SECTION("deterministic per seed") {
    const MlpParams q = init_glorot(cfg);
    CHECK(p.data == q.data);
    cfg.init_seed = 100;
    const MlpParams r = init_glorot(cfg);
    CHECK(p.data != r.data);
  }
}

TEST_CASE("invalid network configs are rejected") {
  NetworkConfig cfg;
  cfg.width = 0;
  CHECK_THROWS_AS(init_glorot(cfg), ConfigError);
  cfg.width = 64;
  cfg.hidden_layers = 0;
  CHECK_THROWS_AS(init_glorot(cfg), ConfigError);
}

TEST_CASE("input scaling maps the domain box onto [-1,1]") {
  const ScaleSet s = benchmark_scales();

  const auto mid = s.scale_point({9e-3, 4e-3, 2e-3, 0.5});
  CHECK(mid[0] == 0.0);
  CHECK(mid[1] == 0.0);
  CHECK(mid[2] == 0.0);
  CHECK(mid[3] == 0.0);

  const auto hi = s.scale_point({18e-3, 8e-3, 4e-3, 1.0});
  CHECK(hi[0] == 1.0);
  CHECK(hi[1] == 1.0);
  CHECK(hi[2] == 1.0);
  CHECK(hi[3] == 1.0);
  const auto lo = s.scale_point({0.0, 0.0, 0.0, 0.0});
  CHECK(lo[0] == -1.0);
  CHECK(lo[3] == -1.0);

  CHECK(s.scale_point({9e-3, 4e-3, 2e-3, 0.25})[3] == -0.5);

  CHECK_THROWS_WITH(s.scale_point({19e-3, 4e-3, 2e-3, 0.5}),
                    Catch::Matchers::ContainsSubstring("axis x"));
  CHECK_THROWS_AS(s.scale_point({9e-3, 4e-3, 2e-3, 1.5}), GeometryError);
}

TEST_CASE("unscale(scale(q)) round-trips to an ulp of the axis range") {
  const ScaleSet s = benchmark_scales();
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    const Point4 p{rng.uniform(0.0, 18e-3), rng.uniform(0.0, 8e-3), rng.uniform(0.0, 4e-3),
                   rng.uniform(0.0, 1.0)};
    const Point4 q = s.unscale_point(s.scale_point(p));
    const double eps = std::numeric_limits<double>::epsilon();
    CHECK(std::abs(q.x - p.x) <= 2.0 * eps * s.half[0]);
    CHECK(std::abs(q.y - p.y) <= 2.0 * eps * s.half[1]);
    CHECK(std::abs(q.z - p.z) <= 2.0 * eps * s.half[2]);
    CHECK(std::abs(q.t - p.t) <= 2.0 * eps * s.half[3]);
  }
}

TEST_CASE("forward with all-zero parameters") {
  const ScaleSet s = benchmark_scales();

  SECTION("temperature head: softplus(0) = ln 2") {
    MlpParams p(NetworkConfig::temperature_default());
    const double T = predict_temperature(p, s, {9e-3, 4e-3, 2e-3, 0.5});
    CHECK(T == Catch::Approx(298.0 + std::log(2.0) * 2000.0).epsilon(1e-14));
  }
  SECTION("mechanical head: all nine outputs zero") {
    MlpParams p(NetworkConfig::mechanical_default());
    const auto out = predict_mechanical(p, s, {9e-3, 4e-3, 2e-3, 0.5});
    for (double v : out) CHECK(v == 0.0);
  }
}

TEST_CASE("single tanh unit propagates through an identity head") {
  NetworkConfig cfg;
  cfg.hidden_layers = 1;
  cfg.width = 1;
  cfg.output_dim = 1;
  cfg.output_transform = OutputTransform::linear;
  MlpParams p(cfg);
  p.weight(0)(0, 0) = 1.0;  // reads the first input only
  p.weight(1)(0, 0) = 1.0;

  const std::array<double, 4> x = {0.5, 0.0, 0.0, 0.0};
  const auto y = forward_raw<double>(p, std::span<const double>(x.data(), 4));
  CHECK(y[0] == Catch::Approx(0.46211715726000974).epsilon(1e-14));
}

TEST_CASE("softplus head keeps temperature at or above the offset") {
  const ScaleSet s = benchmark_scales();
  Rng rng(11);
  NetworkConfig cfg = NetworkConfig::temperature_default();
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    cfg.init_seed = seed;
    const MlpParams p = init_glorot(cfg);
    for (int i = 0; i < 50; ++i) {
      const Point4 pt{rng.uniform(0.0, 18e-3), rng.uniform(0.0, 8e-3), rng.uniform(0.0, 4e-3),
                      rng.uniform(0.0, 1.0)};
      CHECK(predict_temperature(p, s, pt) >= s.temperature_offset);
    }
  }
}

TEST_CASE("physical outputs are invariant to the temperature-scale convention") {
  // T = T0 + Ts * raw: doubling Ts while halving the raw output is a no-op.
  const ScaleSet s = benchmark_scales();
  ScaleSet s2 = s;
  s2.temperature_scale *= 2.0;
  Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    const double raw = rng.uniform(0.0, 3.0);
    CHECK(s.temperature_from_raw(raw) == s2.temperature_from_raw(raw / 2.0));
  }
}
