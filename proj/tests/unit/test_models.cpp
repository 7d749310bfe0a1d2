#include "folia/models.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace folia;

namespace {

const IntMatrix2 kCat{{2, 1, 1, 1}};

// Random products of the two elementary unipotent generators with trace > 2.
IntMatrix2 random_anosov(std::mt19937_64& rng) {
  const IntMatrix2 r{{1, 1, 0, 1}};
  const IntMatrix2 l{{1, 0, 1, 1}};
  std::uniform_int_distribution<int> length(2, 7);
  std::bernoulli_distribution coin;
  for (;;) {
    IntMatrix2 m;
    for (int i = length(rng); i > 0; --i) m = m * (coin(rng) ? r : l);
    if (m.trace() > 2) return m;
  }
}

Vec point(double a, double b, double c) {
  Vec p(3);
  p << a, b, c;
  return p;
}

}  // namespace

TEST_CASE("invariant form of the cat map") {
  CHECK(invariant_form(kCat) == IntMatrix2{{-2, 1, 1, 2}});
  CHECK(invariance_defect(kCat) == IntMatrix2{{0, 0, 0, 0}});
  const Mat g = suspension_fiber_metric(kCat, 1.0);
  CHECK(g(0, 0) == -2.0);
  CHECK(g(0, 1) == 1.0);
  CHECK(g(1, 1) == 2.0);
}

TEST_CASE("random Anosov matrices: invariance, determinant and signature") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> eta_dist(0.2, 4.0);
  for (int i = 0; i < 50; ++i) {
    const IntMatrix2 A = random_anosov(rng);
    const double eta = eta_dist(rng) * (i % 2 ? -1.0 : 1.0);
    REQUIRE(A.det() == 1);
    CHECK(invariance_defect(A) == IntMatrix2{{0, 0, 0, 0}});
    const Mat g = suspension_fiber_metric(A, eta);
    const double tr = static_cast<double>(A.trace());
    CHECK(g.determinant() == doctest::Approx(-eta * eta * (tr * tr - 4.0)).epsilon(1e-12));
    CHECK(signature(g) == Signature{1, 1, false});
    CHECK(signature(suspension_total_metric(A, eta)) == Signature{2, 1, false});
  }
}

TEST_CASE("suspension construction rejects invalid data") {
  CHECK_THROWS_AS(make_suspension(IntMatrix2{{1, 1, 0, 1}}), NotAnosov);
  CHECK_THROWS_AS(make_suspension(IntMatrix2{{3, 1, 1, 1}}), NotAnosov);  // det 2
  CHECK_NOTHROW(make_suspension(IntMatrix2{{2, 1, 3, 2}}));
  CHECK_THROWS_AS(make_suspension(kCat, 0.0), ZeroScale);
  CHECK_THROWS_AS(make_suspension(IntMatrix2{{-2, 1, 1, -1}}), NotAnosov);
}

TEST_CASE("integer matrix powers") {
  CHECK(kCat.power(0) == IntMatrix2::identity());
  CHECK(kCat.power(3) == kCat * kCat * kCat);
  CHECK(kCat.power(-2) * kCat.power(2) == IntMatrix2::identity());
  CHECK(kCat.unimodular_inverse() == IntMatrix2{{1, -1, -1, 2}});
}

TEST_CASE("quotient identification (u, 1) ~ (A^{-1} u, 0)") {
  const auto m = make_suspension(kCat);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const Vec p = point(u(rng), u(rng), 1.0 + u(rng));
    Vec q = p;
    q.head(2) = kCat.power(-1).to_dense() * p.head(2);
    q(2) -= 1.0;
    CHECK(m.point_difference(p, q).norm() < 1e-12);
    const Vec n = m.normalize(p);
    CHECK((m.normalize(n) - n).norm() < 1e-15);  // idempotent
    CHECK(n(2) >= 0.0);
    CHECK(n(2) < 1.0);
  }
}

TEST_CASE("leaf identification on the suspension") {
  const auto m = make_suspension(kCat);
  const LeafId zero = m.leaf_id(Vec::Zero(3));
  CHECK(zero.kind == LeafKind::Circle);
  CHECK(zero.period == 1);

  // (1/2, 0) has period 3 under A mod 2.
  const LeafId half = m.leaf_id(point(0.5, 0.0, 0.3));
  CHECK(half.kind == LeafKind::Circle);
  CHECK(half.period == 3);
  CHECK(m.same_leaf(point(0.5, 0.0, 0.3), point(0.0, 0.5, 0.9)));

  CHECK(m.leaf_id(point(std::sqrt(2.0) - 1.0, 0.1, 0.0)).kind == LeafKind::Generic);
  CHECK(m.leaf_id(point(1.0 / 4093.0, 0.0, 0.0)).kind == LeafKind::Undecided);

  const Vec g = point(std::sqrt(2.0) - 1.0, std::sqrt(5.0) - 2.0, 0.2);
  CHECK(m.same_leaf(g, point(g(0), g(1), 0.9)));
  Vec later = g;
  later.head(2) = kCat.to_dense() * g.head(2);
  later(2) += 1.0;
  CHECK(m.same_leaf(g, later));
  CHECK_FALSE(m.same_leaf(g, point(g(0) + 0.01, g(1), 0.2)));
}

TEST_CASE("adapted charts round-trip and keep plaques") {
  const auto m = make_suspension(kCat);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_real_distribution<double> small(-0.3, 0.3);
  for (int i = 0; i < 100; ++i) {
    const auto chart = m.chart_at(point(u(rng), u(rng), u(rng)));
    Vec leaf(1);
    leaf << small(rng);
    Vec transverse(2);
    transverse << small(rng), small(rng);
    const auto c = chart.from_model(chart.to_model(leaf, transverse));
    REQUIRE(c.has_value());
    CHECK((c->leaf - leaf).norm() < 1e-12);
    CHECK((c->transverse - transverse).norm() < 1e-12);
  }
  CHECK(transition_split_defect(m, 200, 11) < 1e-12);
  CHECK(transition_split_defect(make_warped_counterexample(), 200, 11) == 0.0);
}

TEST_CASE("deck group relations of the cover") {
  const auto r = deck_group_relations(make_suspension(kCat));
  CHECK(r.relations_hold);
  CHECK(r.translations_commute);
  CHECK(r.conjugates[0].shift == std::array<std::int64_t, 2>{2, 1});
  CHECK(r.conjugates[1].shift == std::array<std::int64_t, 2>{1, 1});
}

TEST_CASE("orthogonal frames and splittings") {
  Mat g(2, 2);
  g << 1.0, 0.5, 0.5, 2.0;
  const auto leaf = MetricField::constant_field(Mat::Identity(1, 1), Box::unbounded(1));
  const auto m = make_product(leaf, MetricField::constant_field(Mat::Identity(1, 1) * 2.0, Box::unbounded(1)));
  const Mat frame = m.orthogonal_frame(Vec::Zero(2));
  CHECK(frame(0, 0) == 0.0);
  CHECK(frame(1, 0) == 1.0);

  // Leaves along axis 0 of a constant metric with a leaf/transverse cross term.
  FoliationModel tilted("tilted", ModelKind::Product, MetricField::constant_field(g, Box::unbounded(2)), {0}, {1},
                        Box::closed(Vec::Constant(2, -1.0), Vec::Constant(2, 1.0)));
  const Mat f = tilted.orthogonal_frame(Vec::Zero(2));
  CHECK(f(0, 0) == doctest::Approx(-0.5));
  const Vec v = Vec::Ones(2);
  const auto [tangential, orthogonal] = tilted.split(Vec::Zero(2), v);
  CHECK((tangential + orthogonal - v).norm() < 1e-15);
  CHECK(std::abs(orthogonal.dot(g * Vec::Unit(2, 0))) < 1e-15);
  CHECK(tangential(1) == 0.0);
}

TEST_CASE("rational recognition") {
  CHECK(recognize_rational(0.25) == std::make_pair<std::int64_t, std::int64_t>(1, 4));
  CHECK(recognize_rational(2.0 / 3.0) == std::make_pair<std::int64_t, std::int64_t>(2, 3));
  CHECK_FALSE(recognize_rational(std::sqrt(2.0)).has_value());
  CHECK_FALSE(recognize_rational(1.0 / 5000.0).has_value());
}
