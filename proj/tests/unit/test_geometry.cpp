#include "folia/geometry.hpp"
#include "folia/models.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace folia;

namespace {

// dx^2 + e^{2x} dy^2 is the hyperbolic plane; the geodesic through the
// origin with velocity d_y is x = ln cosh s, y = tanh s.
MetricField hyperbolic(bool analytic) {
  auto field = make_warped_counterexample().metric();
  if (!analytic) field.deriv = {};
  return field;
}

Vec exact_geodesic(double s) {
  Vec p(2);
  p << std::log(std::cosh(s)), std::tanh(s);
  return p;
}

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_CASE("christoffel symbols of the hyperbolic plane at the origin") {
  for (bool analytic : {true, false}) {
    const auto gamma = christoffel(hyperbolic(analytic), Vec::Zero(2));
    CHECK(gamma(0, 1, 1) == doctest::Approx(-1.0).epsilon(1e-8));
    CHECK(gamma(1, 0, 1) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(gamma(1, 1, 0) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(std::abs(gamma(0, 0, 0)) < 1e-8);
    CHECK(std::abs(gamma(1, 1, 1)) < 1e-8);
  }
}

TEST_CASE("christoffel symbols are metric compatible (random points)") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const auto metric = hyperbolic(true);
  for (int i = 0; i < 50; ++i) {
    const Vec p = v2(u(rng), u(rng));
    CHECK(metric_compatibility_residual(metric, p, christoffel(metric, p)) < 1e-12 * std::exp(2.0 * std::abs(p(0))));
  }
}

TEST_CASE("christoffel symbols are invariant under constant rescaling of g") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const auto metric = hyperbolic(true);
  for (double c : {-3.0, 0.25, 11.0}) {
    const auto scaled = metric.scaled(c);
    const Vec p = v2(u(rng), u(rng));
    const auto a = christoffel(metric, p);
    const auto b = christoffel(scaled, p);
    for (int k = 0; k < 2; ++k)
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) CHECK(std::abs(a(k, i, j) - b(k, i, j)) < 1e-12);
  }
}

TEST_CASE("degenerate metric is rejected by christoffel") {
  Mat g = Mat::Zero(2, 2);
  g(0, 0) = 1.0;
  const auto field = MetricField::constant_field(g, Box::unbounded(2));
  CHECK_THROWS_AS(christoffel(field, Vec::Zero(2)), DegenerateMetric);
  CHECK(is_degenerate(g));
  Mat lightlike(2, 2);
  lightlike << 1.0, 1.0, 1.0, 1.0;
  CHECK(is_degenerate(lightlike));
  Mat stretched = Mat::Identity(2, 2);
  stretched(1, 1) = 1e30;
  CHECK_FALSE(is_degenerate(stretched));
}

TEST_CASE("RK4 geodesic matches the closed form and converges at fourth order") {
  const auto metric = hyperbolic(true);
  const GeodesicState start{Vec::Zero(2), v2(0.0, 1.0), 0.0};
  auto endpoint_error = [&](double h) {
    const auto path = integrate_geodesic(metric, start, 1.0, h);
    CHECK(path.back().parameter == doctest::Approx(1.0));
    return (path.back().position - exact_geodesic(1.0)).norm();
  };
  const double e1 = endpoint_error(0.04);
  const double e2 = endpoint_error(0.02);
  CHECK(endpoint_error(1e-3) < 1e-11);
  CHECK(e1 / e2 == doctest::Approx(16.0).epsilon(0.1));

  const auto rc = richardson_check(metric, start, 1.0, 0.02);
  CHECK(rc.position_difference == doctest::Approx(e2 * 15.0).epsilon(0.1));
}

TEST_CASE("geodesic energy is conserved (random starts)") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const auto metric = hyperbolic(true);
  for (int i = 0; i < 20; ++i) {
    const Vec p = v2(u(rng), u(rng));
    const Vec v = v2(u(rng), u(rng));
    const double e0 = scalar_product(metric, p, v, v);
    const auto path = integrate_geodesic(metric, {p, v, 0.0}, 2.0, 1e-3);
    const auto& last = path.back();
    CHECK(std::abs(scalar_product(metric, last.position, last.velocity, last.velocity) - e0) < 1e-9);
  }
}

TEST_CASE("backward integration retraces the forward geodesic") {
  const auto metric = hyperbolic(true);
  const auto forward = integrate_geodesic(metric, {Vec::Zero(2), v2(0.3, 0.8), 0.0}, 1.5, 1e-3);
  const auto back = integrate_geodesic(metric, forward.back(), -1.5, 1e-3);
  CHECK(back.back().position.norm() < 1e-10);
  CHECK(back.back().parameter == doctest::Approx(0.0));
}

TEST_CASE("domain exit and periodic wrapping") {
  const auto closed = MetricField::constant_field(Mat::Identity(2, 2), Box::closed(Vec::Zero(2), Vec::Ones(2)));
  try {
    integrate_geodesic(closed, {Vec::Constant(2, 0.5), v2(1.0, 0.0), 0.0}, 2.0, 1e-3);
    FAIL("expected DomainExit");
  } catch (const DomainExit& e) {
    CHECK(e.parameter == doctest::Approx(0.5).epsilon(1e-2));
  }

  const auto torus = MetricField::constant_field(Mat::Identity(2, 2), Box::torus(Vec::Zero(2), Vec::Ones(2)));
  const auto path = integrate_geodesic(torus, {Vec::Constant(2, 0.5), v2(1.0, 0.0), 0.0}, 2.25, 1e-3);
  CHECK(path.back().position(0) == doctest::Approx(0.75));
  CHECK(path.back().position(1) == doctest::Approx(0.5));
}

TEST_CASE("signature classification") {
  Mat minkowski = Mat::Identity(3, 3);
  minkowski(0, 0) = -1.0;
  CHECK(signature(minkowski) == Signature{2, 1, false});
  Mat g(2, 2);
  g << -2.0, 1.0, 1.0, 2.0;
  CHECK(signature(g) == Signature{1, 1, false});
  Mat null = Mat::Zero(2, 2);
  null(0, 0) = 1.0;
  CHECK(signature(null).null_flag);
}

TEST_CASE("orthogonal complements") {
  Mat minkowski = Mat::Identity(2, 2);
  minkowski(0, 0) = -1.0;
  const auto field = MetricField::constant_field(minkowski, Box::unbounded(2));
  CHECK_THROWS_AS(orthogonal_complement(field, Vec::Zero(2), {v2(1.0, 1.0)}), DegenerateRestriction);

  const Vec timelike = v2(2.0, 1.0);
  const auto complement = orthogonal_complement(field, Vec::Zero(2), {timelike});
  REQUIRE(complement.size() == 1);
  CHECK(std::abs(scalar_product(field, Vec::Zero(2), timelike, complement[0])) < 1e-14);
  CHECK(gram_matrix(field, Vec::Zero(2), {timelike})(0, 0) == doctest::Approx(-3.0));
}

TEST_CASE("finite-difference and analytic derivatives agree") {
  const auto metric = hyperbolic(true);
  const Vec p = v2(0.4, -0.7);
  const auto a = metric_derivative(metric, p, DerivativeSource::Analytic);
  const auto f = metric_derivative(metric, p, DerivativeSource::FiniteDifference);
  for (std::size_t k = 0; k < 2; ++k) CHECK(max_norm(a[k] - f[k]) < 1e-8);
  CHECK_THROWS(metric_derivative(hyperbolic(false), p, DerivativeSource::Analytic));
}
