#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "lmdpinn/jet.hpp"

using lmdpinn::Rng;
using lmdpinn::ad::Jet2;

namespace {

// Symbolic first/second derivatives used as the reference for each primitive.
struct Symbolic {
  double v, d1, d2;
};

Symbolic sym_tanh(double x) {
  const double t = std::tanh(x), s = 1.0 - t * t;
  return {t, s, -2.0 * t * s};
}
Symbolic sym_softplus(double x) {
  const double sg = lmdpinn::ad::sigmoid(x);
  return {lmdpinn::ad::softplus(x), sg, sg * (1.0 - sg)};
}
Symbolic sym_exp(double x) {
  const double e = std::exp(x);
  return {e, e, e};
}

void check_close(const Jet2& got, const Symbolic& want, double rtol = 1e-12) {
  CAPTURE(got.v, got.d1, got.d2, want.v, want.d1, want.d2);
  CHECK(std::abs(got.v - want.v) <= rtol * std::max(1.0, std::abs(want.v)));
  CHECK(std::abs(got.d1 - want.d1) <= rtol * std::max(1.0, std::abs(want.d1)));
  CHECK(std::abs(got.d2 - want.d2) <= rtol * std::max(1.0, std::abs(want.d2)));
}

}  // namespace

TEST_CASE("identity propagation returns the seed") {
  const Jet2 x = Jet2::variable(0.37);
  CHECK(x.v == 0.37);
  CHECK(x.d1 == 1.0);
  CHECK(x.d2 == 0.0);
}

TEST_CASE("cubic monomial at x=2") {
  const Jet2 x = Jet2::variable(2.0);
  const Jet2 y = x * x * x;
  CHECK(y.v == 8.0);
  CHECK(y.d1 == 12.0);
  CHECK(y.d2 == 12.0);
}

TEST_CASE("affine map") {
  const Jet2 x = Jet2::variable(0.5);
  const Jet2 y = 2.0 * x + 1.0;
  CHECK(y.v == 2.0);
  CHECK(y.d1 == 2.0);
  CHECK(y.d2 == 0.0);
}

TEST_CASE("primitives match symbolic derivatives at random points") {
  Rng rng(20240521);
  for (int i = 0; i < 100; ++i) {
    const double xv = rng.uniform(-3.0, 3.0);
    const Jet2 x = Jet2::variable(xv);

    check_close(tanh(x), sym_tanh(xv));
    check_close(softplus(x), sym_softplus(xv));
    check_close(exp(x), sym_exp(xv));
    check_close(square(x), {xv * xv, 2.0 * xv, 2.0});

    // product rule: tanh(x) * exp(x)
    {
      const auto f = sym_tanh(xv), g = sym_exp(xv);
      check_close(tanh(x) * exp(x),
                  {f.v * g.v, f.d1 * g.v + f.v * g.d1,
                   f.d2 * g.v + 2.0 * f.d1 * g.d1 + f.v * g.d2});
    }
    // quotient rule: softplus(x) / exp(x), via d/dx (f e^{-x})
    {
      const auto f = sym_softplus(xv);
      const double em = std::exp(-xv);
      const double d1 = (f.d1 - f.v) * em;
      const double d2 = (f.d2 - 2.0 * f.d1 + f.v) * em;
      check_close(softplus(x) / exp(x), {f.v * em, d1, d2});
    }
  }
}

TEST_CASE("composition follows the chain rule") {
  // For g(f(x)): d1 = g'(f) f', d2 = g''(f) f'^2 + g'(f) f''
  Rng rng(7);
  for (int i = 0; i < 100; ++i) {
    const double xv = rng.uniform(-2.0, 2.0);
    const auto f = sym_tanh(xv);
    const auto g = sym_exp(f.v);
    const Jet2 got = exp(tanh(Jet2::variable(xv)));
    check_close(got, {g.v, g.d1 * f.d1, g.d2 * f.d1 * f.d1 + g.d1 * f.d2});
  }
}

TEST_CASE("constants carry zero derivatives through arithmetic") {
  const Jet2 x = Jet2::variable(1.3);
  const Jet2 c(4.0);
  const Jet2 y = (x + c) * c - c / (c + 1.0);
  CHECK(y.d1 == 4.0);  // only the linear term in x survives
  CHECK(y.d2 == 0.0);
}

TEST_CASE("softplus is finite and accurate for extreme arguments") {
  using lmdpinn::ad::softplus;
  CHECK(std::isfinite(softplus(800.0)));
  CHECK(softplus(800.0) == Catch::Approx(800.0));
  CHECK(std::isfinite(softplus(-800.0)));
  CHECK(softplus(-800.0) >= 0.0);
  CHECK(softplus(0.0) == Catch::Approx(std::log(2.0)));

  const Jet2 big = softplus(Jet2::variable(750.0));
  CHECK(lmdpinn::ad::is_finite(big));
}
