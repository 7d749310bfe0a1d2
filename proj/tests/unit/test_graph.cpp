#include "folia/graph.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace folia;

namespace {

const IntMatrix2 kCat{{2, 1, 1, 1}};

Vec p3(double a, double b, double c) {
  Vec v(3);
  v << a, b, c;
  return v;
}

Vec p4(double a, double b, double c, double d) {
  Vec v(4);
  v << a, b, c, d;
  return v;
}

const HolonomyGraph& suspension_graph() {
  static const HolonomyGraph g = HolonomyGraph::build(make_suspension(kCat));
  return g;
}

FoliationModel lorentz_product() {
  Mat leaf(2, 2);
  leaf << -1.0, 0.0, 0.0, 1.0;
  return make_product(MetricField::constant_field(leaf, Box::unbounded(2)),
                      MetricField::constant_field(Mat::Identity(1, 1), Box::unbounded(1)));
}

}  // namespace

TEST_CASE("graph points: units and winding classes on the u = 0 leaf") {
  const auto& g = suspension_graph();
  const auto unit = g.unit(Vec::Zero(3));
  CHECK(unit.cover.isZero());
  CHECK(unit.winding == 0);

  const auto once = g.point(Vec::Zero(3), 1, Vec::Zero(3));
  CHECK((once.cover - p4(0, 0, 0, 1)).norm() == 0.0);
  CHECK(once.winding == 1);

  const auto twice = g.point(Vec::Zero(3), 2, Vec::Zero(3));
  CHECK(g.compose(once, twice).winding == 3);
  CHECK(g.equal(g.compose(once, g.unit(Vec::Zero(3))), once));
  CHECK(g.equal(g.compose(once, g.inverse(once)), unit));
  CHECK(g.compose(g.inverse(twice), twice).winding == 0);
}

TEST_CASE("graph points on a generic leaf") {
  const auto& g = suspension_graph();
  const Vec x = p3(std::sqrt(2.0) - 1.0, std::sqrt(3.0) - 1.0, 0.25);
  Vec y(3);
  y.head(2) = kCat.power(-1).to_dense() * x.head(2);
  y(2) = 0.5;  // the point at leaf parameter 1.25 from the start of the line
  const auto z = g.point(x, 0, y);
  CHECK(z.cover(3) - z.cover(2) == doctest::Approx(1.25));
  CHECK(g.base().point_difference(g.project(z, 2), y).norm() < 1e-12);
  CHECK_THROWS_AS(g.point(x, 1, y), LeafMismatch);
  CHECK_THROWS_AS(g.point(x, 0, p3(0.1, 0.1, 0.0)), LeafMismatch);
}

TEST_CASE("projections of cover representatives") {
  const auto& g = suspension_graph();
  const auto z = g.from_cover(p4(0.2, 0.3, 0.4, 2.7));
  CHECK(g.base().point_difference(g.project(z, 1), p3(0.2, 0.3, 0.4)).norm() < 1e-12);
  CHECK(g.base().point_difference(g.project(z, 2), p3(0.2, 0.3, 2.7)).norm() < 1e-12);
  const auto unit = g.unit(p3(0.6, 0.1, 0.9));
  CHECK((g.project(unit, 1) - g.project(unit, 2)).norm() == 0.0);
}

TEST_CASE("groupoid axioms on 1000 random composable triples") {
  const auto& g = suspension_graph();
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_real_distribution<double> t(-3.0, 3.0);
  const std::vector<Vec> periodic{Vec::Zero(2), (Vec(2) << 0.5, 0.0).finished(), (Vec(2) << 0.2, 0.4).finished()};
  for (int i = 0; i < 1000; ++i) {
    Vec base(2);
    if (i % 2 == 0)
      base = periodic[static_cast<std::size_t>(i / 2) % periodic.size()];
    else
      base << u(rng), u(rng);
    const double t0 = t(rng), t1 = t(rng), t2 = t(rng), t3 = t(rng);
    auto rep = [&](double a, double b) { return g.from_cover(p4(base(0), base(1), a, b)); };
    const auto a = rep(t0, t1);
    const auto b = rep(t1, t2);
    const auto c = rep(t2, t3);
    const auto left = g.compose(g.compose(a, b), c);
    const auto right = g.compose(a, g.compose(b, c));
    CHECK(g.equal(left, right));
    CHECK(g.equal(left, rep(t0, t3)));
    CHECK(g.equal(g.compose(a, g.inverse(a)), g.unit(g.project(a, 1))));
    CHECK(g.equal(g.compose(g.unit(g.project(a, 1)), a), a));
  }
}

TEST_CASE("composition rejects mismatched endpoints") {
  const auto& g = suspension_graph();
  const auto a = g.from_cover(p4(0.2, 0.3, 0.0, 0.5));
  const auto b = g.from_cover(p4(0.2, 0.3, 0.1, 0.6));
  CHECK_THROWS_AS(g.compose(a, b), EndpointMismatch);
}

TEST_CASE("tangent decomposition examples") {
  const auto& g = suspension_graph();
  const Vec z = p4(0.1, 0.2, 0.3, 0.4);
  const Vec du1 = Vec::Unit(4, 0);
  const Vec dt = Vec::Unit(4, 2);
  const Vec dtp = Vec::Unit(4, 3);

  auto d = g.decompose(z, du1);
  CHECK((d.normal - du1).norm() == 0.0);
  CHECK(d.first.isZero());
  CHECK(d.second.isZero());

  d = g.decompose(z, dtp);
  CHECK((d.first - dtp).norm() == 0.0);

  d = g.decompose(z, dt + dtp);
  CHECK((d.first - dtp).norm() == 0.0);
  CHECK((d.second - dt).norm() == 0.0);
  CHECK(d.normal.isZero());

  std::mt19937_64 rng(3);
  std::normal_distribution<double> n;
  for (int i = 0; i < 100; ++i) {
    Vec x(4);
    for (int k = 0; k < 4; ++k) x(k) = n(rng);
    CHECK((g.decompose(z, x).sum() - x).norm() < 1e-12);
  }
}

TEST_CASE("induced metric values") {
  const auto& g = suspension_graph();
  const Vec z = p4(0.1, 0.2, 0.3, 0.4);
  const auto dt = g.decompose(z, Vec::Unit(4, 2));
  const auto dtp = g.decompose(z, Vec::Unit(4, 3));
  const auto du1 = g.decompose(z, Vec::Unit(4, 0));
  CHECK(g.induced_metric_d(z, dt, dt) == 1.0);
  CHECK(g.induced_metric_d(z, dt, dtp) == 0.0);
  CHECK(g.induced_metric_d(z, du1, du1) == -2.0);
  CHECK(g.induced_metric_expanded(z, du1, dtp) == g.induced_metric_d(z, du1, dtp));

  GraphTangent bad = dt;
  bad.first = Vec::Unit(4, 2);  // not in the kernel of p1
  CHECK_THROWS_AS(g.induced_metric_d(z, bad, dt), InvalidDecomposition);
}

TEST_CASE("d equals g + diag(1,1) and is invariant under the diagonal action") {
  const auto& g = suspension_graph();
  const Mat expected = suspension_total_metric(kCat, 1.0, 2);
  for (const Vec& z : g.sample_cover_points(200, 5)) {
    const Mat d = g.d_matrix(z);
    CHECK(d == expected);
    CHECK(max_norm(g.reconstruct_d(z) - d) < 1e-10);
  }
  CHECK(signature(expected) == Signature{3, 1, false});
}

TEST_CASE("tilted product: reconstruction matches d and the projections are submersions") {
  Mat gm(3, 3);
  gm << 1.0, 0.0, 0.4, 0.0, -1.0, 0.2, 0.4, 0.2, 3.0;
  const FoliationModel m("tilted", ModelKind::Product, MetricField::constant_field(gm, Box::unbounded(3)), {0, 1}, {2},
                         Box::closed(Vec::Constant(3, -1.0), Vec::Constant(3, 1.0)));
  const auto g = HolonomyGraph::build(m);
  CHECK(g.dim() == 5);
  for (const Vec& z : g.sample_cover_points(50, 1)) {
    const Mat d = g.d_matrix(z);
    CHECK(max_norm(g.reconstruct_d(z) - d) < 1e-10);
    CHECK(max_norm(d.block(1, 3, 2, 2)) < 1e-12);  // TF^(2) orthogonal to TF^(1)
  }
  CHECK(g.check_prs_axioms(1, 50).verdict == Verdict::Pass);
  CHECK(g.check_prs_axioms(2, 50).verdict == Verdict::Pass);
}

TEST_CASE("fault injection breaks the isometry axiom") {
  GraphOptions opts;
  opts.fault_epsilon = 1e-3;
  const auto g = HolonomyGraph::build(make_suspension(kCat), opts);
  const auto r = g.check_prs_axioms(1, 50);
  CHECK(r.verdict == Verdict::Fail);
  REQUIRE(r.parts.size() == 3);
  CHECK(r.parts[0].verdict == Verdict::Pass);
  CHECK(r.parts[1].verdict == Verdict::Pass);
  CHECK(r.parts[2].verdict == Verdict::Fail);
  CHECK(suspension_graph().check_prs_axioms(1, 50).verdict == Verdict::Pass);
}

TEST_CASE("leaf structure of graph leaves") {
  const auto& g = suspension_graph();
  const auto cylinder = g.leaf_structure(Vec::Zero(3));
  CHECK(cylinder.shape == GraphLeafShape::Cylinder);
  CHECK(cylinder.deck_shift == 1.0);
  CHECK(cylinder.deck_is_diagonal);
  CHECK(cylinder.covering_advance == 1.0);
  CHECK(cylinder.leaf_metric == Mat::Identity(2, 2));

  const auto plane = g.leaf_structure(p3(std::sqrt(2.0) - 1.0, std::sqrt(3.0) - 1.0, 0.0));
  CHECK(plane.shape == GraphLeafShape::Plane);
  CHECK(plane.flat);
  CHECK(plane.leaf_metric == Mat::Identity(2, 2));

  const auto period3 = g.leaf_structure(p3(0.5, 0.0, 0.0));
  CHECK(period3.shape == GraphLeafShape::Cylinder);
  CHECK(period3.deck_shift == 3.0);
  CHECK(period3.covering_advance == 3.0);

  CHECK_THROWS_AS(g.leaf_structure(p3(1.0 / 4093.0, 0.0, 0.0)), UnknownLeafClass);
}

TEST_CASE("graph construction is gated on the criteria") {
  CHECK_THROWS_AS(HolonomyGraph::build(make_warped_counterexample()), NotPseudoRiemannian);
  CHECK(check_graph_foliation(make_warped_counterexample()).verdict == Verdict::Degenerate);

  const auto product = HolonomyGraph::build(lorentz_product());
  CHECK(product.dim() == 5);
  CHECK(product.leaf_structure(Vec::Zero(3)).shape == GraphLeafShape::Plane);
}

TEST_CASE("graph foliation suite on the suspension graph") {
  SamplingOptions o;
  o.points = 30;
  o.geodesics = 10;
  o.completeness_geodesics = 3;
  const auto r = check_graph_foliation(make_suspension(kCat), o);
  CHECK(r.verdict == Verdict::Pass);
  CHECK(r.parts.size() == 5);
  CHECK(suspension_graph().as_foliation().dim() == 4);
}
