#include <cfloat>
#include <cmath>

#include "doctest.h"
#include "flmc/quantizer.hpp"

using namespace flmc;

TEST_CASE("phi values") {
  for (double a : {0.01, 0.05, 1.0, 7.0}) CHECK(phi(0.0, {a}) == 0.5);
  CHECK(phi(30.0, {0.05}) == doctest::Approx(0.817574476193643659607).epsilon(1e-15));
  CHECK(phi(1e6, {0.05}) <= 1.0);
  CHECK(phi(-1e6, {0.05}) >= 0.0);
}

TEST_CASE("phi is increasing and symmetric") {
  RandomStream rng(3);
  const QuantizerSpec q{0.05};
  for (int t = 0; t < 1000; ++t) {
    const double x = 60.0 * rng.normal();
    // Both tails are evaluated directly, so the identity holds to rounding.
    CHECK(std::abs(phi(-x, q) - (1.0 - phi(x, q))) <= DBL_EPSILON);
    CHECK(phi(x + 1.0, q) >= phi(x, q));
  }
}

TEST_CASE("log-odds identity") {
  RandomStream rng(4);
  for (double a : {0.01, 0.05, 0.5}) {
    const QuantizerSpec q{a};
    for (int t = 0; t < 1000; ++t) {
      const double x = (60.0 * rng.uniform() - 30.0) / a;  // |a x| <= 30
      const double p = phi(x, q);
      const double complement = phi(-x, q);
      CHECK(std::abs(std::log(p / complement) - a * x) <= 1e-12);
      CHECK(log_odds(x, q) == a * x);
    }
  }
}

TEST_CASE("quantize codomain and expectation") {
  const QuantizerSpec q{0.05};
  RandomStream rng(5);
  Eigen::VectorXd g(4);
  g << 0.0, 30.0, -30.0, 12.0;
  const int n = 100000;
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(4);
  for (int t = 0; t < n; ++t) {
    const Eigen::VectorXd s = quantize(g, q, rng);
    REQUIRE(s.size() == 4);
    for (int i = 0; i < 4; ++i) REQUIRE((s(i) == 1.0 || s(i) == -1.0));
    sum += s;
  }
  const Eigen::VectorXd mean = sum / n;
  CHECK(std::abs(mean(0)) < 0.02);
  CHECK(std::abs(mean(1) - 0.635148952387287319) < 0.02);
  for (int i = 0; i < 4; ++i) {
    CHECK(std::abs(mean(i) - (2.0 * phi(g(i), q) - 1.0)) <= 4.0 / std::sqrt(n));
  }
}

TEST_CASE("quantize is deterministic given the stream and uses one draw per entry") {
  const QuantizerSpec q{0.05};
  Eigen::VectorXd g = Eigen::VectorXd::LinSpaced(7, -40.0, 40.0);
  RandomStream a(77), b(77), c(77);
  CHECK(quantize(g, q, a) == quantize(g, q, b));
  for (int i = 0; i < 7; ++i) c.uniform();
  CHECK(a.uniform() == c.uniform());
}
