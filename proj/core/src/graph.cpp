#include "folia/graph.hpp"

#include "folia/holonomy.hpp"
#include "folia/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace folia {

const char* to_string(GraphLeafShape shape) {
  switch (shape) {
    case GraphLeafShape::Plane: return "plane";
    case GraphLeafShape::Cylinder: return "cylinder";
  }
  return "unknown";
}

namespace {

constexpr int kLiftSearch = 20;

double centered_mod1(double x) { return x - std::floor(x + 0.5); }

Vec apply(const IntMatrix2& m, const Vec& u) { return m.to_dense() * u; }

bool torus_close(const Vec& a, const Vec& b, double tol) {
  for (int i = 0; i < 2; ++i)
    if (std::abs(centered_mod1(a(i) - b(i))) > tol) return false;
  return true;
}

// Reorders a base-model box into graph axis order (y, x1, x2).
Box graph_box(const FoliationModel& base, const Box& box) {
  const int q = base.codim();
  const int p = base.leaf_dim();
  Box out = Box::unbounded(q + 2 * p);
  auto copy_axis = [&](int to, int from) {
    out.lower(to) = box.lower(from);
    out.upper(to) = box.upper(from);
    out.periodic[static_cast<std::size_t>(to)] = box.periodic[static_cast<std::size_t>(from)];
  };
  for (int b = 0; b < q; ++b) copy_axis(b, base.transverse_axes()[static_cast<std::size_t>(b)]);
  for (int a = 0; a < p; ++a) {
    copy_axis(q + a, base.leaf_axes()[static_cast<std::size_t>(a)]);
    copy_axis(q + p + a, base.leaf_axes()[static_cast<std::size_t>(a)]);
  }
  return out;
}

// Metric field with symmetric FD derivatives is enough for the graph of a
// non-constant base; the bundled bases are all constant.
Mat d_from_parts(const Mat& g1, const Mat& g2, const Mat& dp1, const Mat& dp2, const Mat& second_projector) {
  // d = dp1^T g1 dp1 + (dp2 P1)^T g2 (dp2 P1), P1 = projector onto X^{(1)}.
  const Mat first = dp2 * second_projector;
  return dp1.transpose() * g1 * dp1 + first.transpose() * g2 * first;
}

}  // namespace

HolonomyGraph::HolonomyGraph(std::shared_ptr<const FoliationModel> base, GraphOptions opts)
    : base_(std::move(base)), opts_(opts) {}

HolonomyGraph HolonomyGraph::build(const FoliationModel& base, const GraphOptions& opts) {
  const auto& s = opts.gate_sampling;
  if (!check_leaf_nondegeneracy(base, s).passed())
    throw NotPseudoRiemannian("graph: leaf metric is degenerate");
  if (!check_projectability(base, s).passed())
    throw NotPseudoRiemannian("graph: metric is not transversally projectable");
  if (!check_orthogonal_transport(base, s).passed())
    throw NotPseudoRiemannian("graph: orthogonal geodesics do not stay orthogonal");

  HolonomyGraph graph(std::make_shared<const FoliationModel>(base), opts);
  const int q = base.codim();
  const int p = base.leaf_dim();
  const int dim = q + 2 * p;

  // Metric of the graph in cover coordinates. Captures a copy of the graph
  // data (not `this`) so the model outlives any particular graph object.
  const HolonomyGraph snapshot = graph;
  auto eval = [snapshot](const Vec& c) { return snapshot.d_matrix(c); };

  const std::string name = base.name() + "-graph";
  if (base.suspension()) {
    Box domain = Box::unbounded(dim);
    domain.lower.head(2).setZero();
    domain.upper.head(2).setOnes();
    domain.periodic[0] = domain.periodic[1] = true;
    MetricField metric = base.metric().constant ? MetricField::constant_field(eval(Vec::Zero(dim)), domain)
                                                : MetricField::from_function(dim, domain, eval);
    graph.foliation_ = std::make_shared<const FoliationModel>(make_suspension_quotient(
        name, ModelKind::Graph, base.suspension()->A, base.suspension()->eta, 2 * p, std::move(metric),
        Box::closed(Vec::Zero(dim), Vec::Ones(dim))));
  } else {
    const Box domain = graph_box(base, base.metric().domain);
    MetricField metric = base.metric().constant ? MetricField::constant_field(eval(Vec::Zero(dim)), domain)
                                                : MetricField::from_function(dim, domain, eval);
    std::vector<int> leaf;
    std::vector<int> transverse;
    for (int b = 0; b < q; ++b) transverse.push_back(b);
    for (int a = q; a < dim; ++a) leaf.push_back(a);
    graph.foliation_ = std::make_shared<const FoliationModel>(name, ModelKind::Graph, std::move(metric),
                                                              std::move(leaf), std::move(transverse),
                                                              graph_box(base, base.sampling_box()));
  }
  return graph;
}

// ---------------------------------------------------------------------------
// Groupoid structure

Vec HolonomyGraph::project_cover(const Vec& cover, int i) const {
  if (i != 1 && i != 2) throw Error("project: index must be 1 or 2");
  const int q = codim();
  const int p = base_->leaf_dim();
  return base_->assemble(cover.segment(q + (i - 1) * p, p), cover.head(q));
}

Vec HolonomyGraph::project(const GraphPoint& z, int i) const { return base_->normalize(project_cover(z.cover, i)); }

Mat HolonomyGraph::projection_differential(int i) const {
  if (i != 1 && i != 2) throw Error("projection_differential: index must be 1 or 2");
  const int q = codim();
  const int p = base_->leaf_dim();
  Mat dp = Mat::Zero(base_->dim(), dim());
  for (int b = 0; b < q; ++b) dp(base_->transverse_axes()[static_cast<std::size_t>(b)], b) = 1.0;
  for (int a = 0; a < p; ++a) dp(base_->leaf_axes()[static_cast<std::size_t>(a)], q + (i - 1) * p + a) = 1.0;
  return dp;
}

std::int64_t HolonomyGraph::winding_of(const Vec& cover) const {
  if (!base_->suspension()) return 0;
  const LeafId id = base_->leaf_id(project_cover(cover, 1));
  if (id.kind != LeafKind::Circle) return 0;
  const int q = codim();
  const double gap = cover(q + 1) - cover(q);
  return static_cast<std::int64_t>(std::floor(gap / id.period + 1e-9));
}

GraphPoint HolonomyGraph::from_cover(const Vec& cover) const {
  if (cover.size() != dim()) throw Error("graph point: cover vector has the wrong dimension");
  GraphPoint z;
  z.cover = foliation_->normalize(cover);
  z.winding = winding_of(z.cover);
  return z;
}

GraphPoint HolonomyGraph::point(const Vec& x, std::int64_t cls, const Vec& y) const {
  if (!base_->same_leaf(x, y)) throw LeafMismatch("graph point: x and y lie on different leaves");
  const Vec xn = base_->normalize(x);
  const Vec yn = base_->normalize(y);
  const int q = codim();
  const int p = base_->leaf_dim();

  Vec cover(dim());
  cover.head(q) = base_->transverse_part(xn);
  cover.segment(q, p) = base_->leaf_part(xn);

  if (!base_->suspension()) {
    if (cls != 0) throw LeafMismatch("graph point: leaves of this model carry no holonomy");
    cover.tail(p) = base_->leaf_part(xn) + base_->leaf_part(base_->point_difference(xn, yn));
    return from_cover(cover);
  }

  // Lift y onto the cover line through x: t' = y_t + n with A^{-n} u = y_u.
  const IntMatrix2& A = base_->suspension()->A;
  const Vec u = xn.head(2);
  const double t = xn(2);
  const double s = yn(2);
  std::optional<std::int64_t> lift;
  for (int k = 0; k <= kLiftSearch && !lift; ++k)
    for (int n : {k, -k})
      if (!lift && torus_close(apply(A.power(-n), u), yn.head(2), 1e-9)) lift = n;
  if (!lift) throw LeafMismatch("graph point: no leafwise path found within the lift search bound");

  const LeafId id = base_->leaf_id(xn);
  double target = s + static_cast<double>(*lift);
  if (id.kind == LeafKind::Circle) {
    const double period = id.period;
    target -= period * std::floor((target - t) / period + 1e-12);  // gap in [0, P)
    target += period * static_cast<double>(cls);
  } else if (cls != 0) {
    throw LeafMismatch("graph point: the leaf is simply connected; only the trivial class exists");
  }
  cover(3) = target;
  return from_cover(cover);
}

GraphPoint HolonomyGraph::unit(const Vec& x) const { return point(x, 0, x); }

GraphPoint HolonomyGraph::compose(const GraphPoint& z1, const GraphPoint& z2) const {
  const int q = codim();
  const int p = base_->leaf_dim();
  if (base_->point_difference(project_cover(z1.cover, 2), project_cover(z2.cover, 1)).norm() > 1e-9)
    throw EndpointMismatch("compose: target of the first point differs from the source of the second");

  Vec cover = z1.cover;
  if (base_->suspension()) {
    const double n = std::round(z1.cover(3) - z2.cover(2));
    cover(3) = z2.cover(3) + n;
  } else {
    cover.tail(p) = z1.cover.tail(p) + base_->leaf_part(base_->point_difference(project_cover(z1.cover, 2),
                                                                                project_cover(z2.cover, 2)));
  }
  (void)q;
  return from_cover(cover);
}

GraphPoint HolonomyGraph::inverse(const GraphPoint& z) const {
  const int q = codim();
  const int p = base_->leaf_dim();
  Vec cover = z.cover;
  cover.segment(q, p) = z.cover.tail(p);
  cover.tail(p) = z.cover.segment(q, p);
  return from_cover(cover);
}

bool HolonomyGraph::equal(const GraphPoint& a, const GraphPoint& b, double tol) const {
  return a.winding == b.winding && foliation_->point_difference(a.cover, b.cover).norm() < tol;
}

// ---------------------------------------------------------------------------
// Metric

Mat HolonomyGraph::leaf_coupling(const Vec& base_point) const {
  const Mat frame = base_->orthogonal_frame(base_point);
  Mat h(base_->leaf_dim(), codim());
  for (int a = 0; a < base_->leaf_dim(); ++a) h.row(a) = frame.row(base_->leaf_axes()[static_cast<std::size_t>(a)]);
  return h;
}

GraphTangent HolonomyGraph::decompose(const Vec& cover, const Vec& X) const {
  const int q = codim();
  const int p = base_->leaf_dim();
  const Mat h1 = leaf_coupling(project_cover(cover, 1));
  const Mat h2 = leaf_coupling(project_cover(cover, 2));
  const Vec dy = X.head(q);

  GraphTangent out;
  out.normal = Vec::Zero(dim());
  out.normal.head(q) = dy;
  out.normal.segment(q, p) = h1 * dy;
  out.normal.tail(p) = h2 * dy;
  out.second = Vec::Zero(dim());
  out.second.segment(q, p) = X.segment(q, p) - h1 * dy;
  out.first = Vec::Zero(dim());
  out.first.tail(p) = X.tail(p) - h2 * dy;
  return out;
}

namespace {

double tangent_tolerance(const Vec& v) { return 1e-9 * std::max(1.0, v.norm()); }

}  // namespace

double HolonomyGraph::induced_metric_d(const Vec& cover, const GraphTangent& X, const GraphTangent& Y) const {
  const Mat dp1 = projection_differential(1);
  const Mat dp2 = projection_differential(2);
  const Vec x1 = project_cover(cover, 1);
  const Vec x2 = project_cover(cover, 2);

  for (const GraphTangent* t : {&X, &Y}) {
    if ((dp1 * t->first).norm() > tangent_tolerance(t->first))
      throw InvalidDecomposition("induced_metric_d: X^(1) must lie in the kernel of p1");
    if ((dp2 * t->second).norm() > tangent_tolerance(t->second))
      throw InvalidDecomposition("induced_metric_d: X^(2) must lie in the kernel of p2");
    const Vec n1 = dp1 * t->normal;
    const Vec n2 = dp2 * t->normal;
    if ((base_->split(x1, n1).first.norm() > tangent_tolerance(n1)) ||
        (base_->split(x2, n2).first.norm() > tangent_tolerance(n2)))
      throw InvalidDecomposition("induced_metric_d: X^N must project into the orthogonal distribution");
  }

  const Mat g1 = base_->metric().eval(x1);
  const Mat g2 = base_->metric().eval(x2);
  const Vec px = dp1 * X.sum();
  const Vec py = dp1 * Y.sum();
  double value = px.dot(g1 * py) + (dp2 * X.first).dot(g2 * (dp2 * Y.first));
  if (opts_.fault_epsilon != 0.0) value += opts_.fault_epsilon * X.normal(0) * Y.normal(0);
  return value;
}

double HolonomyGraph::induced_metric_expanded(const Vec& cover, const GraphTangent& X, const GraphTangent& Y) const {
  const Mat dp1 = projection_differential(1);
  const Mat dp2 = projection_differential(2);
  const Mat g1 = base_->metric().eval(project_cover(cover, 1));
  const Mat g2 = base_->metric().eval(project_cover(cover, 2));
  auto pair = [](const Mat& dp, const Mat& g, const Vec& a, const Vec& b) { return (dp * a).dot(g * (dp * b)); };
  double value = pair(dp1, g1, X.second, Y.second) + pair(dp1, g1, X.normal, Y.normal) +
                 pair(dp2, g2, X.first, Y.first);
  if (opts_.fault_epsilon != 0.0) value += opts_.fault_epsilon * X.normal(0) * Y.normal(0);
  return value;
}

Mat HolonomyGraph::d_matrix(const Vec& cover) const {
  const int n = dim();
  const int q = codim();
  const int p = base_->leaf_dim();
  const Vec x1 = project_cover(cover, 1);
  const Vec x2 = project_cover(cover, 2);

  // Projector onto the X^{(1)} component: X -> (0, 0, dx2 - H(x2) dy).
  Mat second_projector = Mat::Zero(n, n);
  second_projector.bottomRightCorner(p, p).setIdentity();
  second_projector.bottomLeftCorner(p, q) = -leaf_coupling(x2);

  Mat d = d_from_parts(base_->metric().eval(x1), base_->metric().eval(x2), projection_differential(1),
                       projection_differential(2), second_projector);
  d(0, 0) += opts_.fault_epsilon;
  return d;
}

Mat HolonomyGraph::reconstruct_d(const Vec& cover) const {
  const int n = dim();
  const int q = codim();
  const int p = base_->leaf_dim();
  const Mat dp1 = projection_differential(1);
  const Mat dp2 = projection_differential(2);
  const Vec x1 = project_cover(cover, 1);
  const Vec x2 = project_cover(cover, 2);
  const Mat g1 = base_->metric().eval(x1);
  const Mat g2 = base_->metric().eval(x2);

  // Fibres of p1 and p2 are the kernels of the differentials.
  auto kernel = [](const Mat& m) -> Mat {
    Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullV);
    const int rank = numerical_rank(m);
    return svd.matrixV().rightCols(m.cols() - rank);
  };
  const Mat v1 = kernel(dp1);
  const Mat v2 = kernel(dp2);

  // N: vectors both of whose projections are g-orthogonal to the leaves.
  Mat constraints(2 * p, n);
  for (int a = 0; a < p; ++a) {
    const int axis = base_->leaf_axes()[static_cast<std::size_t>(a)];
    constraints.row(a) = (g1 * dp1).row(axis);
    constraints.row(p + a) = (g2 * dp2).row(axis);
  }
  const Mat normal = kernel(constraints);
  if (normal.cols() != q || v1.cols() != p || v2.cols() != p)
    throw InvalidDecomposition("reconstruct_d: fibre or normal dimensions do not add up");

  Mat basis(n, n);
  basis << v1, normal, v2;
  // Gram matrix from the defining properties:
  //   on span(N, V2) d agrees with p1^* g  (p1 is isometric off its fibres)
  //   on span(V1, N) d agrees with p2^* g
  //   V1 is orthogonal to V2
  Mat gram = Mat::Zero(n, n);
  const Mat p1g = dp1.transpose() * g1 * dp1;
  const Mat p2g = dp2.transpose() * g2 * dp2;
  const Mat horizontal1 = (Mat(n, q + p) << normal, v2).finished();
  const Mat horizontal2 = (Mat(n, p + q) << v1, normal).finished();
  gram.bottomRightCorner(q + p, q + p) = horizontal1.transpose() * p1g * horizontal1;
  gram.topLeftCorner(p + q, p + q) = horizontal2.transpose() * p2g * horizontal2;
  // Where both rules apply (N x N) they must coincide; keep the p1 value.
  gram.block(p, p, q, q) = normal.transpose() * p1g * normal;
  const Mat inv = basis.inverse();
  Mat d = inv.transpose() * gram * inv;
  return 0.5 * (d + d.transpose());
}

// ---------------------------------------------------------------------------
// Submersion axioms

ProjectionCheck HolonomyGraph::projection_residuals(const Vec& cover, int i) const {
  ProjectionCheck r;
  const Mat dp = projection_differential(i);
  r.rank_residual = numerical_rank(dp) == base_->dim() ? 0.0 : 1.0;

  const Mat d = d_matrix(cover);
  const MetricField field = MetricField::constant_field(d, Box::unbounded(dim()));
  Eigen::JacobiSVD<Mat> svd(dp, Eigen::ComputeFullV);
  const int rank = numerical_rank(dp);
  const auto fibre = split_columns(svd.matrixV().rightCols(dim() - rank));
  const Mat fibre_gram = gram_matrix(field, cover, fibre);
  if (is_degenerate(fibre_gram)) {
    r.fibre_residual = 1.0;
    return r;
  }

  const auto normal = orthogonal_complement(field, cover, fibre);
  const Mat g = base_->metric().eval(project_cover(cover, i));
  const double scale = max_norm(d);
  for (std::size_t a = 0; a < normal.size(); ++a)
    for (std::size_t b = a; b < normal.size(); ++b) {
      const double upstairs = normal[a].dot(d * normal[b]);
      const double downstairs = (dp * normal[a]).dot(g * (dp * normal[b]));
      r.isometry_residual = std::max(r.isometry_residual, std::abs(upstairs - downstairs) /
                                                              (scale * normal[a].norm() * normal[b].norm()));
    }
  return r;
}

std::vector<Vec> HolonomyGraph::sample_cover_points(int count, std::uint64_t seed) const {
  return sample_points(*foliation_, count, seed);
}

CheckReport HolonomyGraph::check_prs_axioms(int i, int samples, double tol, std::uint64_t seed) const {
  const auto points = sample_cover_points(samples, seed);
  const auto results = parallel_map(points.size(), [&](std::size_t k) { return projection_residuals(points[k], i); });

  auto part = [&](const std::string& suffix, const std::string& statement, auto field) {
    std::vector<ResidualSample> s;
    for (std::size_t k = 0; k < points.size(); ++k) s.push_back({points[k], results[k].*field});
    return make_report("prs_axioms.p" + std::to_string(i) + "." + suffix, statement, std::move(s),
                       Tolerances{tol, std::max(tol, 1e-4)});
  };
  auto onto = part("onto", "the differential of the projection is onto", &ProjectionCheck::rank_residual);
  auto fibres = part("fibres", "fibres are nondegenerate", &ProjectionCheck::fibre_residual);
  auto isometry = part("isometry", "scalar products of vectors normal to the fibres are preserved",
                       &ProjectionCheck::isometry_residual);

  std::vector<ResidualSample> all;
  for (std::size_t k = 0; k < points.size(); ++k)
    all.push_back({points[k], std::max({results[k].rank_residual, results[k].fibre_residual,
                                        results[k].isometry_residual})});
  auto report = make_report("prs_axioms.p" + std::to_string(i),
                            "the projection is a pseudo-Riemannian submersion", std::move(all),
                            Tolerances{tol, std::max(tol, 1e-4)});
  if (opts_.fault_epsilon != 0.0)
    report.notes.push_back("fault injection active: epsilon = " + std::to_string(opts_.fault_epsilon));
  report.parts = {std::move(onto), std::move(fibres), std::move(isometry)};
  return report;
}

// ---------------------------------------------------------------------------
// Leaves of the induced foliation

LeafStructure HolonomyGraph::leaf_structure(const Vec& base_point) const {
  LeafStructure out;
  const Vec x = base_->normalize(base_point);
  const LeafId id = base_->leaf_id(x);
  out.base_leaf = id.kind;
  if (id.kind == LeafKind::Undecided)
    throw UnknownLeafClass("leaf_structure: rational point with period above the search bound");

  const GraphPoint z = unit(x);
  const int q = codim();
  const int p = base_->leaf_dim();
  out.leaf_metric = d_matrix(z.cover).bottomRightCorner(2 * p, 2 * p);
  out.flat = foliation_->metric().constant ||
             max_norm(d_matrix(z.cover + Vec::Unit(dim(), q) * 0.37).bottomRightCorner(2 * p, 2 * p) -
                      out.leaf_metric) < 1e-12;

  if (id.kind != LeafKind::Circle) return out;

  // Diagonal shift by the period fixes the graph leaf and the graph point
  // class structure: (u, t, t') and (u, t + P, t' + P) are the same point.
  out.shape = GraphLeafShape::Cylinder;
  out.deck_shift = id.period;
  Vec shifted = z.cover;
  shifted.tail(2 * p).array() += id.period;
  out.deck_is_diagonal = foliation_->point_difference(z.cover, shifted).norm() < 1e-9;

  // p1 on the p2-fibre {(u, s, t'_0)}: smallest s > 0 returning to p1(z).
  for (int k = 1; k <= kMaxPeriod; ++k) {
    Vec moved = z.cover;
    moved(q) += k;
    if (base_->point_difference(project_cover(moved, 1), project_cover(z.cover, 1)).norm() < 1e-9) {
      out.covering_advance = k;
      break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

constexpr const char* kGraphStatement =
    "the graph is a (2n-q)-manifold carrying a transversally complete pseudo-Riemannian foliation with an "
    "Ehresmann connection";

CheckReport transfer_part(const FoliationModel& m, const SamplingOptions& opts, const Tolerances& tol) {
  const int count = std::max(1, std::min(opts.points, 10));
  const auto starts = sample_points(m, count, opts.seed + 11);
  std::vector<ResidualSample> samples;
  std::vector<std::string> notes;
  for (const auto& p : starts) {
    ResidualSample s{p, 0.0};
    try {
      Vec direction = Vec::LinSpaced(m.codim(), 1.0, -0.5);
      const HorizontalCurve sigma = horizontal_curve(m, p, direction, 0.05);
      Vec corner = p;
      corner(m.leaf_axes().front()) += 0.7;
      Vec end = corner;
      end(m.leaf_axes().back()) -= 0.4;
      const LeafPath h{{p, corner, end}};
      const TransferResult moved = transfer(m, sigma, h);
      s.value = horizontality_residual(m, moved.curve);
      s.value = std::max(s.value, m.point_difference(moved.curve.points.front(), h.end()).norm());
    } catch (const TransferBreakdown& e) {
      s.value = std::numeric_limits<double>::infinity();
      if (notes.size() < 3) notes.push_back(e.what());
    }
    samples.push_back(s);
  }
  auto r = make_report("graph_foliation.transfer", "horizontal curves transfer along leaf paths", std::move(samples),
                       tol);
  r.notes.insert(r.notes.end(), notes.begin(), notes.end());
  return r;
}

}  // namespace

CheckReport check_graph_foliation(const FoliationModel& base, const SamplingOptions& opts, const Tolerances& tol) {
  std::optional<HolonomyGraph> graph;
  try {
    graph = HolonomyGraph::build(base);
  } catch (const NotPseudoRiemannian& e) {
    return degenerate_report("graph_foliation", kGraphStatement,
                             std::string("graph construction refused: ") + e.what(), tol);
  }
  const FoliationModel& m = graph->as_foliation();

  std::vector<CheckReport> parts;
  const double expected = 2 * base.dim() - base.codim();
  parts.push_back(make_report("graph_foliation.dimension", "dim G = 2n - q",
                              {{Vec(), std::abs(m.dim() - expected)}}, tol));
  parts.push_back(check_projectability(m, opts, tol));
  parts.push_back(check_orthogonal_transport(m, opts, tol));
  parts.push_back(check_transversal_completeness(m, opts, tol));
  parts.push_back(transfer_part(m, opts, tol));
  for (auto& p : parts)
    if (p.check.rfind("graph_foliation.", 0) != 0) p.check = "graph_foliation." + p.check;

  std::vector<ResidualSample> all;
  for (const auto& p : parts) all.push_back({Vec(), p.max_residual});
  auto report = make_report("graph_foliation", kGraphStatement, std::move(all), tol);
  report.notes.push_back("graph dimension " + std::to_string(m.dim()));
  report.parts = std::move(parts);
  return report;
}

}  // namespace folia
