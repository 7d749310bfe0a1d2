#include "folia/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace folia {

const char* to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Product: return "product";
    case ModelKind::Warped: return "warped";
    case ModelKind::Suspension: return "suspension";
    case ModelKind::Graph: return "graph";
  }
  return "unknown";
}

const char* to_string(LeafKind kind) {
  switch (kind) {
    case LeafKind::Slice: return "slice";
    case LeafKind::Circle: return "circle";
    case LeafKind::Generic: return "generic";
    case LeafKind::Undecided: return "undecided";
  }
  return "unknown";
}

namespace {

constexpr double kChartHalfWidth = 0.45;

double centered_mod1(double x) {
  double r = x - std::floor(x + 0.5);
  if (r >= 0.5) r -= 1.0;
  return r;
}

double wrap_mod1(double x) {
  double r = x - std::floor(x);
  return r >= 1.0 ? 0.0 : r;
}

Vec apply(const IntMatrix2& m, const Vec& u) {
  Vec out(2);
  out(0) = static_cast<double>(m.a()) * u(0) + static_cast<double>(m.b()) * u(1);
  out(1) = static_cast<double>(m.c()) * u(0) + static_cast<double>(m.d()) * u(1);
  return out;
}

Box finite_sampling_box(const Box& domain) {
  Box out = domain;
  for (int i = 0; i < out.dim(); ++i) {
    if (!std::isfinite(out.lower(i))) out.lower(i) = -1.0;
    if (!std::isfinite(out.upper(i))) out.upper(i) = 1.0;
  }
  return out;
}

// Normalized suspension point: t (first leaf axis) in [0,1), u in [0,1)^2.
Vec normalize_suspension(const SuspensionData& s, const Vec& p) {
  const int t0 = 2;
  const double n = std::floor(p(t0));
  Vec out = p;
  const Vec u = apply(s.A.power(-static_cast<std::int64_t>(n)), p.head(2));
  out(0) = wrap_mod1(u(0));
  out(1) = wrap_mod1(u(1));
  for (int j = 0; j < s.leaf_dim; ++j) out(t0 + j) -= n;
  if (out(t0) >= 1.0) out(t0) = 0.0;  // floor rounding at the boundary
  return out;
}

AdaptedChart suspension_chart(const SuspensionData& s, const Vec& center) {
  AdaptedChart chart;
  chart.center = center;
  chart.leaf_half_width = Vec::Constant(s.leaf_dim, kChartHalfWidth);
  chart.transverse_half_width = Vec::Constant(2, kChartHalfWidth);
  chart.to_model = [center](const Vec& leaf, const Vec& transverse) {
    Vec out = center;
    out.head(2) += transverse;
    out.tail(leaf.size()) += leaf;
    return out;
  };
  chart.from_model = [s, center](const Vec& q) -> std::optional<ChartCoords> {
    const int t0 = 2;
    const double n = std::round(center(t0) - q(t0));
    ChartCoords c;
    c.leaf = q.tail(s.leaf_dim) - center.tail(s.leaf_dim) + Vec::Constant(s.leaf_dim, n);
    if ((c.leaf.array().abs() >= kChartHalfWidth).any()) return std::nullopt;
    const Vec u = apply(s.A.power(static_cast<std::int64_t>(n)), q.head(2));
    c.transverse.resize(2);
    c.transverse(0) = centered_mod1(u(0) - center(0));
    c.transverse(1) = centered_mod1(u(1) - center(1));
    if ((c.transverse.array().abs() >= kChartHalfWidth).any()) return std::nullopt;
    return c;
  };
  return chart;
}

struct AxisSplit {
  std::vector<int> leaf;
  std::vector<int> transverse;

  Vec gather(const std::vector<int>& axes, const Vec& p) const {
    Vec out(static_cast<Eigen::Index>(axes.size()));
    for (std::size_t i = 0; i < axes.size(); ++i) out(static_cast<Eigen::Index>(i)) = p(axes[i]);
    return out;
  }
  Vec assemble(const Vec& l, const Vec& t) const {
    Vec out(static_cast<Eigen::Index>(leaf.size() + transverse.size()));
    for (std::size_t i = 0; i < leaf.size(); ++i) out(leaf[i]) = l(static_cast<Eigen::Index>(i));
    for (std::size_t i = 0; i < transverse.size(); ++i) out(transverse[i]) = t(static_cast<Eigen::Index>(i));
    return out;
  }
};

std::int64_t mod(std::int64_t a, std::int64_t n) {
  const std::int64_t r = a % n;
  return r < 0 ? r + n : r;
}

}  // namespace

// ---------------------------------------------------------------------------

FoliationModel::FoliationModel(std::string name, ModelKind kind, MetricField metric, std::vector<int> leaf_axes,
                               std::vector<int> transverse_axes, Box sampling_box,
                               std::optional<SuspensionData> suspension)
    : name_(std::move(name)),
      kind_(kind),
      metric_(std::move(metric)),
      leaf_axes_(std::move(leaf_axes)),
      transverse_axes_(std::move(transverse_axes)),
      sampling_box_(std::move(sampling_box)),
      suspension_(std::move(suspension)) {
  if (static_cast<int>(leaf_axes_.size() + transverse_axes_.size()) != metric_.dim)
    throw ModelError("FoliationModel: leaf and transverse axes must partition the coordinates");
}

Vec FoliationModel::leaf_part(const Vec& p) const {
  Vec out(leaf_dim());
  for (int i = 0; i < leaf_dim(); ++i) out(i) = p(leaf_axes_[static_cast<std::size_t>(i)]);
  return out;
}

Vec FoliationModel::transverse_part(const Vec& p) const {
  Vec out(codim());
  for (int i = 0; i < codim(); ++i) out(i) = p(transverse_axes_[static_cast<std::size_t>(i)]);
  return out;
}

Vec FoliationModel::assemble(const Vec& leaf, const Vec& transverse) const {
  Vec out(dim());
  for (int i = 0; i < leaf_dim(); ++i) out(leaf_axes_[static_cast<std::size_t>(i)]) = leaf(i);
  for (int i = 0; i < codim(); ++i) out(transverse_axes_[static_cast<std::size_t>(i)]) = transverse(i);
  return out;
}

Vec FoliationModel::normalize(const Vec& p) const {
  if (suspension_) return normalize_suspension(*suspension_, p);
  return metric_.domain.wrap(p);
}

LeafId FoliationModel::leaf_id(const Vec& p) const {
  const Vec q = normalize(p);
  if (!suspension_) {
    Vec anchor = transverse_part(q);
    return {LeafKind::Slice, 0, anchor};
  }

  const Vec u = q.head(2);
  const auto r0 = recognize_rational(u(0));
  const auto r1 = recognize_rational(u(1));
  if (!r0 || !r1) return {LeafKind::Generic, 0, u};

  const std::int64_t n = std::lcm(r0->second, r1->second);
  const std::array<std::int64_t, 2> start{mod(r0->first * (n / r0->second), n), mod(r1->first * (n / r1->second), n)};
  std::array<std::int64_t, 2> w = start;
  std::array<std::int64_t, 2> least = start;
  for (int k = 1; k <= kMaxPeriod; ++k) {
    const auto image = suspension_->A.apply(w);
    w = {mod(image[0], n), mod(image[1], n)};
    if (w == start) {
      Vec anchor(2);
      anchor << static_cast<double>(least[0]) / static_cast<double>(n),
          static_cast<double>(least[1]) / static_cast<double>(n);
      return {LeafKind::Circle, k, anchor};
    }
    least = std::min(least, w);
  }
  return {LeafKind::Undecided, 0, u};
}

bool FoliationModel::same_leaf(const Vec& p, const Vec& q, double tol) const {
  if (!suspension_) {
    Vec d = transverse_part(normalize(q)) - transverse_part(normalize(p));
    for (int i = 0; i < codim(); ++i) {
      const auto axis = static_cast<std::size_t>(transverse_axes_[static_cast<std::size_t>(i)]);
      if (metric_.domain.periodic[axis]) {
        const double period = metric_.domain.upper(static_cast<Eigen::Index>(axis)) -
                              metric_.domain.lower(static_cast<Eigen::Index>(axis));
        d(i) = period * centered_mod1(d(i) / period);
      }
    }
    return d.norm() < tol;
  }

  const LeafId a = leaf_id(p);
  const LeafId b = leaf_id(q);
  if (a.kind == LeafKind::Circle || b.kind == LeafKind::Circle)
    return a.kind == b.kind && a.period == b.period && (a.anchor - b.anchor).norm() < tol;

  const Vec up = normalize(p).head(2);
  const Vec uq = normalize(q).head(2);
  constexpr int kSearch = 20;
  for (int k = -kSearch; k <= kSearch; ++k) {
    const IntMatrix2 ak = suspension_->A.power(k);
    const Vec image = apply(ak, up);
    const double scale = 1.0 + static_cast<double>(std::max({std::abs(ak.a()), std::abs(ak.b()),
                                                             std::abs(ak.c()), std::abs(ak.d())}));
    const double d0 = centered_mod1(image(0) - uq(0));
    const double d1 = centered_mod1(image(1) - uq(1));
    // Rounding in A^k u grows with |A^k|; the tolerance itself does not.
    if (std::hypot(d0, d1) < tol + 8.0 * std::numeric_limits<double>::epsilon() * scale) return true;
  }
  return false;
}

Vec FoliationModel::point_difference(const Vec& p, const Vec& q) const {
  const AdaptedChart chart = chart_at(p);
  if (const auto c = chart.from_model(q)) return assemble(c->leaf, c->transverse);
  Vec d = normalize(q) - normalize(p);
  for (int i = 0; i < dim(); ++i)
    if (metric_.domain.periodic[static_cast<std::size_t>(i)]) {
      const double period = metric_.domain.upper(i) - metric_.domain.lower(i);
      d(i) = period * centered_mod1(d(i) / period);
    }
  return d;
}

AdaptedChart FoliationModel::chart_at(const Vec& p) const {
  const Vec center = normalize(p);
  if (suspension_) return suspension_chart(*suspension_, center);

  AdaptedChart chart;
  chart.center = center;
  const double inf = std::numeric_limits<double>::infinity();
  auto half_width = [&](const std::vector<int>& axes) {
    Vec w(static_cast<Eigen::Index>(axes.size()));
    for (std::size_t i = 0; i < axes.size(); ++i) {
      const int a = axes[i];
      w(static_cast<Eigen::Index>(i)) = metric_.domain.periodic[static_cast<std::size_t>(a)]
                                            ? kChartHalfWidth * (metric_.domain.upper(a) - metric_.domain.lower(a))
                                            : inf;
    }
    return w;
  };
  chart.leaf_half_width = half_width(leaf_axes_);
  chart.transverse_half_width = half_width(transverse_axes_);
  const AxisSplit axes{leaf_axes_, transverse_axes_};
  chart.to_model = [axes, center](const Vec& leaf, const Vec& transverse) {
    return Vec(center + axes.assemble(leaf, transverse));
  };
  const Box domain = metric_.domain;
  const auto lw = chart.leaf_half_width;
  const auto tw = chart.transverse_half_width;
  chart.from_model = [axes, center, domain, lw, tw](const Vec& q) -> std::optional<ChartCoords> {
    Vec d = q - center;
    for (int i = 0; i < domain.dim(); ++i) {
      if (domain.periodic[static_cast<std::size_t>(i)]) {
        const double period = domain.upper(i) - domain.lower(i);
        d(i) = period * centered_mod1(d(i) / period);
      }
    }
    if (!domain.contains(domain.wrap(center + d))) return std::nullopt;
    ChartCoords c{axes.gather(axes.leaf, d), axes.gather(axes.transverse, d)};
    if ((c.leaf.array().abs() >= lw.array()).any()) return std::nullopt;
    if ((c.transverse.array().abs() >= tw.array()).any()) return std::nullopt;
    return c;
  };
  return chart;
}

std::vector<Vec> FoliationModel::leaf_frame() const {
  std::vector<Vec> out;
  for (int axis : leaf_axes_) out.emplace_back(Vec::Unit(dim(), axis));
  return out;
}

Mat FoliationModel::orthogonal_frame(const Vec& p) const {
  const Mat g = metric_.eval(p);
  Mat gxx(leaf_dim(), leaf_dim());
  Mat gxy(leaf_dim(), codim());
  for (int a = 0; a < leaf_dim(); ++a) {
    for (int b = 0; b < leaf_dim(); ++b) gxx(a, b) = g(leaf_axes_[static_cast<std::size_t>(a)], leaf_axes_[static_cast<std::size_t>(b)]);
    for (int b = 0; b < codim(); ++b) gxy(a, b) = g(leaf_axes_[static_cast<std::size_t>(a)], transverse_axes_[static_cast<std::size_t>(b)]);
  }
  if (is_degenerate(gxx)) throw DegenerateRestriction("leaf metric is degenerate");
  const Mat h = -gxx.partialPivLu().solve(gxy);
  Mat frame = Mat::Zero(dim(), codim());
  for (int b = 0; b < codim(); ++b) {
    frame(transverse_axes_[static_cast<std::size_t>(b)], b) = 1.0;
    for (int a = 0; a < leaf_dim(); ++a) frame(leaf_axes_[static_cast<std::size_t>(a)], b) = h(a, b);
  }
  return frame;
}

std::pair<Vec, Vec> FoliationModel::split(const Vec& p, const Vec& v) const {
  const Vec orthogonal = orthogonal_frame(p) * transverse_part(v);
  return {v - orthogonal, orthogonal};
}

FoliationModel FoliationModel::with_scaled_metric(double c) const {
  FoliationModel copy = *this;
  copy.metric_ = metric_.scaled(c);
  return copy;
}

// ---------------------------------------------------------------------------
// Suspension

IntMatrix2 invariant_form(const IntMatrix2& A) {
  return {{-2 * A.c(), A.a() - A.d(), A.a() - A.d(), 2 * A.b()}};
}

IntMatrix2 invariance_defect(const IntMatrix2& A) {
  const IntMatrix2 g = invariant_form(A);
  const IntMatrix2 pulled = A.transpose() * g * A;
  return {{pulled.a() - g.a(), pulled.b() - g.b(), pulled.c() - g.c(), pulled.d() - g.d()}};
}

Mat suspension_fiber_metric(const IntMatrix2& A, double eta) { return eta * invariant_form(A).to_dense(); }

Mat suspension_total_metric(const IntMatrix2& A, double eta, int leaf_dim) {
  Mat g = Mat::Zero(2 + leaf_dim, 2 + leaf_dim);
  g.topLeftCorner(2, 2) = suspension_fiber_metric(A, eta);
  g.bottomRightCorner(leaf_dim, leaf_dim) = Mat::Identity(leaf_dim, leaf_dim);
  return g;
}

FoliationModel make_suspension_quotient(std::string name, ModelKind kind, const IntMatrix2& A, double eta,
                                        int leaf_dim, MetricField metric, Box sampling_box) {
  std::vector<int> leaf(static_cast<std::size_t>(leaf_dim));
  std::iota(leaf.begin(), leaf.end(), 2);
  return FoliationModel(std::move(name), kind, std::move(metric), std::move(leaf), {0, 1},
                        std::move(sampling_box), SuspensionData{A, eta, leaf_dim});
}

FoliationModel make_suspension(const IntMatrix2& A, double eta) {
  if (A.det() != 1 || A.trace() <= 2)
    throw NotAnosov("make_suspension: A must satisfy det A = 1 and trace A > 2");
  if (eta == 0.0) throw ZeroScale("make_suspension: eta must be nonzero");

  Box domain = Box::unbounded(3);
  domain.lower.head(2).setZero();
  domain.upper.head(2).setOnes();
  domain.periodic[0] = domain.periodic[1] = true;
  MetricField metric = MetricField::constant_field(suspension_total_metric(A, eta), domain);

  const Box sampling = Box::closed(Vec::Zero(3), Vec::Ones(3));
  return make_suspension_quotient("suspension", ModelKind::Suspension, A, eta, 1, std::move(metric), sampling);
}

CoverAffine operator*(const CoverAffine& f, const CoverAffine& g) {
  const auto moved = f.linear.apply(g.shift);
  return {f.linear * g.linear, {moved[0] + f.shift[0], moved[1] + f.shift[1]}, f.t_shift + g.t_shift};
}

CoverAffine CoverAffine::inverse() const {
  const IntMatrix2 inv = linear.unimodular_inverse();
  const auto s = inv.apply(shift);
  return {inv, {-s[0], -s[1]}, -t_shift};
}

DeckGroupReport deck_group_relations(const FoliationModel& model) {
  if (!model.suspension()) throw ModelError("deck_group_relations: model is not a suspension");
  const IntMatrix2& A = model.suspension()->A;

  DeckGroupReport r;
  r.generator_t = {A, {0, 0}, 1};
  r.translations[0] = {IntMatrix2::identity(), {1, 0}, 0};
  r.translations[1] = {IntMatrix2::identity(), {0, 1}, 0};
  const CoverAffine t_inv = r.generator_t.inverse();
  bool ok = true;
  for (int i = 0; i < 2; ++i) {
    r.conjugates[static_cast<std::size_t>(i)] = r.generator_t * r.translations[static_cast<std::size_t>(i)] * t_inv;
    r.expected_shifts[static_cast<std::size_t>(i)] = A.apply(r.translations[static_cast<std::size_t>(i)].shift);
    const auto& c = r.conjugates[static_cast<std::size_t>(i)];
    ok = ok && c.is_translation() && c.shift == r.expected_shifts[static_cast<std::size_t>(i)];
  }
  r.translations_commute = r.translations[0] * r.translations[1] == r.translations[1] * r.translations[0];
  r.relations_hold = ok && r.translations_commute;
  return r;
}

// ---------------------------------------------------------------------------
// Product and warped models

FoliationModel make_product(const MetricField& leaf_metric, const MetricField& transverse_metric, std::string name) {
  const int p = leaf_metric.dim;
  const int q = transverse_metric.dim;
  const int n = p + q;
  Box domain = product_box(leaf_metric.domain, transverse_metric.domain);

  auto eval = [leaf_metric, transverse_metric, p, q](const Vec& x) -> Mat {
    Mat g = Mat::Zero(p + q, p + q);
    g.topLeftCorner(p, p) = leaf_metric.eval(x.head(p));
    g.bottomRightCorner(q, q) = transverse_metric.eval(x.tail(q));
    return g;
  };

  MetricField metric = MetricField::from_function(n, domain, eval);
  metric.constant = leaf_metric.constant && transverse_metric.constant;
  if (!metric.constant && leaf_metric.has_analytic_derivative() && transverse_metric.has_analytic_derivative()) {
    metric.deriv = [leaf_metric, transverse_metric, p, q](const Vec& x) {
      const auto dl = metric_derivative(leaf_metric, x.head(p), DerivativeSource::Analytic);
      const auto dt = metric_derivative(transverse_metric, x.tail(q), DerivativeSource::Analytic);
      std::vector<Mat> out(static_cast<std::size_t>(p + q), Mat::Zero(p + q, p + q));
      for (int k = 0; k < p; ++k) out[static_cast<std::size_t>(k)].topLeftCorner(p, p) = dl[static_cast<std::size_t>(k)];
      for (int k = 0; k < q; ++k) out[static_cast<std::size_t>(p + k)].bottomRightCorner(q, q) = dt[static_cast<std::size_t>(k)];
      return out;
    };
  }

  std::vector<int> leaf(static_cast<std::size_t>(p));
  std::vector<int> transverse(static_cast<std::size_t>(q));
  std::iota(leaf.begin(), leaf.end(), 0);
  std::iota(transverse.begin(), transverse.end(), p);
  Box sampling = finite_sampling_box(domain);
  return FoliationModel(std::move(name), ModelKind::Product, std::move(metric), std::move(leaf), std::move(transverse),
                        std::move(sampling));
}

FoliationModel make_warped_counterexample() {
  auto eval = [](const Vec& p) -> Mat {
    Mat g = Mat::Zero(2, 2);
    g(0, 0) = 1.0;
    g(1, 1) = std::exp(2.0 * p(0));
    return g;
  };
  auto deriv = [](const Vec& p) {
    std::vector<Mat> d(2, Mat::Zero(2, 2));
    d[0](1, 1) = 2.0 * std::exp(2.0 * p(0));
    return d;
  };
  MetricField metric = MetricField::from_function(2, Box::unbounded(2), eval, deriv);
  Box sampling = Box::closed(Vec::Constant(2, -1.0), Vec::Constant(2, 1.0));
  return FoliationModel("warped", ModelKind::Warped, std::move(metric), {0}, {1}, std::move(sampling));
}

// ---------------------------------------------------------------------------

TangentSplitting tangent_and_orthogonal(const FoliationModel& model, const Vec& p) {
  TangentSplitting s;
  s.tangent = model.leaf_frame();
  const Mat gram = gram_matrix(model.metric(), p, s.tangent);
  if (is_degenerate(gram))
    throw DegenerateRestriction("tangent_and_orthogonal: metric restricted to the leaf is degenerate");
  s.orthogonal = split_columns(model.orthogonal_frame(p));
  return s;
}

double transition_split_defect(const FoliationModel& model, int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> small(-0.1, 0.1);
  const Box& box = model.sampling_box();

  auto random_vec = [&](int n) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v(i) = small(rng);
    return v;
  };

  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    Vec p(model.dim());
    for (int i = 0; i < model.dim(); ++i) p(i) = box.lower(i) + unit(rng) * (box.upper(i) - box.lower(i));
    const AdaptedChart first = model.chart_at(p);
    const AdaptedChart second = model.chart_at(first.to_model(random_vec(model.leaf_dim()) * 2.0,
                                                              random_vec(model.codim()) * 2.0));
    const Vec x = random_vec(model.leaf_dim());
    const Vec y = random_vec(model.codim());
    const Vec dx = random_vec(model.leaf_dim());
    const auto a = second.from_model(first.to_model(x, y));
    const auto b = second.from_model(first.to_model(x + dx, y));
    if (!a || !b) continue;
    worst = std::max(worst, (a->transverse - b->transverse).cwiseAbs().maxCoeff());
  }
  return worst;
}

std::optional<std::pair<std::int64_t, std::int64_t>> recognize_rational(double x, std::int64_t max_denominator) {
  if (!std::isfinite(x)) return std::nullopt;
  const double whole = std::floor(x);
  double r = x - whole;
  std::int64_t h_prev = 1, h_prev2 = 0;
  std::int64_t k_prev = 0, k_prev2 = 1;
  const double frac = r;
  for (int iter = 0; iter < 64; ++iter) {
    const double a_real = std::floor(r);
    const auto a = static_cast<std::int64_t>(a_real);
    const std::int64_t h = a * h_prev + h_prev2;
    const std::int64_t k = a * k_prev + k_prev2;
    if (k > max_denominator) break;
    if (std::abs(frac - static_cast<double>(h) / static_cast<double>(k)) < 1e-12)
      return std::make_pair(h + static_cast<std::int64_t>(whole) * k, k);
    h_prev2 = h_prev;
    h_prev = h;
    k_prev2 = k_prev;
    k_prev = k;
    const double rest = r - a_real;
    if (rest < 1e-15) break;
    r = 1.0 / rest;
  }
  return std::nullopt;
}

}  // namespace folia
