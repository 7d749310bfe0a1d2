#include "folia/holonomy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace folia {

// ---------------------------------------------------------------------------
// Paths

LeafPath LeafPath::reversed() const {
  LeafPath out{vertices};
  std::reverse(out.vertices.begin(), out.vertices.end());
  return out;
}

LeafPath LeafPath::then(const LeafPath& next) const {
  LeafPath out{vertices};
  out.vertices.insert(out.vertices.end(), next.vertices.begin() + 1, next.vertices.end());
  return out;
}

std::vector<Vec> LeafPath::refine(double max_step) const {
  std::vector<Vec> out{vertices.front()};
  for (std::size_t i = 1; i < vertices.size(); ++i) {
    const Vec& a = vertices[i - 1];
    const Vec& b = vertices[i];
    const auto pieces = std::max<long long>(1, static_cast<long long>(std::ceil((b - a).norm() / max_step)));
    for (long long k = 1; k <= pieces; ++k)
      out.emplace_back(a + (b - a) * (static_cast<double>(k) / static_cast<double>(pieces)));
  }
  return out;
}

LeafPath straight_leaf_path(const FoliationModel& model, const Vec& base, double advance, int axis) {
  Vec end = base;
  end(model.leaf_axes().at(static_cast<std::size_t>(axis))) += advance;
  return LeafPath{{base, end}};
}

// ---------------------------------------------------------------------------
// Plaque chaining

namespace {

bool well_inside(const ChartCoords& c, const AdaptedChart& chart) {
  return (c.leaf.array().abs() <= 0.5 * chart.leaf_half_width.array()).all();
}

Vec push_through(const ChartHop& hop, const Vec& y) {
  const auto c = hop.to.from_model(hop.from.to_model(hop.leaf_coordinate, y));
  if (!c) throw DiskTooLarge("holonomy: image left the chart chain");
  return c->transverse;
}

struct ChainStep {
  std::size_t hop_count;  // hops recorded so far
  const AdaptedChart* chart;
  Vec leaf;               // leaf coordinate of the path sample in `chart`
  double tau;             // fraction of the refined path traversed
};

// Walks the path through adapted charts, switching to a chart centered on the
// path whenever the current plaque coordinate passes half the chart width.
// `on_hop` sees each new hop before the walk continues in the next chart.
template <typename OnHop, typename OnStep>
std::vector<ChartHop> chain_plaques(const FoliationModel& model, const LeafPath& path, double max_step, double tol,
                                    OnHop&& on_hop, OnStep&& on_step) {
  const auto points = path.refine(max_step);
  std::vector<ChartHop> hops;
  AdaptedChart current = model.chart_at(points.front());
  Vec previous_leaf = current.from_model(points.front())->leaf;
  const double count = static_cast<double>(points.size() - 1);

  for (std::size_t j = 1; j < points.size(); ++j) {
    const double tau = static_cast<double>(j) / count;
    auto c = current.from_model(points[j]);
    if (!c || !well_inside(*c, current)) {
      AdaptedChart next = model.chart_at(points[j - 1]);
      hops.push_back({current, next, previous_leaf});
      on_hop(hops.back(), tau);
      current = std::move(next);
      c = current.from_model(points[j]);
      if (!c) throw PathLeavesLeaf("holonomy: path step larger than a plaque");
    }
    if (c->transverse.cwiseAbs().maxCoeff() > tol) throw PathLeavesLeaf("holonomy: path leaves the leaf");
    previous_leaf = c->leaf;
    on_step(ChainStep{hops.size(), &current, previous_leaf, tau});
  }

  AdaptedChart last = model.chart_at(points.back());
  hops.push_back({current, last, previous_leaf});
  on_hop(hops.back(), 1.0);
  return hops;
}

std::optional<IntMatrix2> exact_power(const FoliationModel& model, const LeafPath& path) {
  if (!model.suspension()) return std::nullopt;
  const int t_axis = model.leaf_axes().front();
  const auto n0 = static_cast<std::int64_t>(std::floor(path.start()(t_axis)));
  const auto n1 = static_cast<std::int64_t>(std::floor(path.end()(t_axis)));
  return model.suspension()->A.power(n0 - n1);
}

Vec apply_exact(const IntMatrix2& m, const Vec& y) { return m.to_dense() * y; }

void fill_samples(HolonomyMap& map, int codim) {
  map.samples.clear();
  for (const Vec& y : disk_samples(codim, map.radius)) map.samples.emplace_back(y, map.apply(y));
}

}  // namespace

std::vector<Vec> disk_samples(int codim, double radius) {
  std::vector<Vec> out{Vec::Zero(codim)};
  if (codim == 1) {
    for (int k = 1; k <= 4; ++k) {
      const double r = radius * k / 4.0;
      out.emplace_back(Vec::Constant(1, r));
      out.emplace_back(Vec::Constant(1, -r));
    }
    return out;
  }
  for (int ring = 1; ring <= 4; ++ring) {
    const double r = radius * ring / 4.0;
    for (int k = 0; k < 16; ++k) {
      const double angle = 2.0 * std::numbers::pi * k / 16.0;
      Vec y = Vec::Zero(codim);
      y(0) = r * std::cos(angle);
      y(1) = r * std::sin(angle);
      out.push_back(y);
    }
  }
  for (int i = 2; i < codim; ++i) {
    out.emplace_back(radius * Vec::Unit(codim, i));
    out.emplace_back(-radius * Vec::Unit(codim, i));
  }
  return out;
}

Vec HolonomyMap::apply(const Vec& y) const {
  Vec out = y;
  for (const auto& hop : hops) out = push_through(hop, out);
  return out;
}

double HolonomyMap::exact_residual() const {
  if (!exact) return 0.0;
  double worst = 0.0;
  for (const auto& [y, image] : samples) worst = std::max(worst, (image - apply_exact(*exact, y)).norm());
  return worst;
}

double HolonomyMap::identity_residual() const {
  double worst = 0.0;
  for (const auto& [y, image] : samples) worst = std::max(worst, (image - y).norm());
  return worst;
}

HolonomyMap holonomy_along(const FoliationModel& model, const LeafPath& path, const HolonomyOptions& opts) {
  HolonomyMap map;
  map.center = Vec::Zero(model.codim());
  map.tolerance = opts.tolerance;
  map.hops = chain_plaques(
      model, path, opts.max_step, 1e-9, [](const ChartHop&, double) {}, [](const ChainStep&) {});
  map.exact = exact_power(model, path);

  for (double r = opts.radius; r >= opts.radius_min; r /= 2.0) {
    map.radius = r;
    try {
      fill_samples(map, model.codim());
      return map;
    } catch (const DiskTooLarge&) {
    }
  }
  throw DiskTooLarge("holonomy_along: no disk above radius_min fits the chart chain");
}

HolonomyMap compose(const HolonomyMap& first, const HolonomyMap& second) {
  HolonomyMap out;
  out.center = first.center;
  out.radius = std::min(first.radius, second.radius);
  out.tolerance = std::max(first.tolerance, second.tolerance);
  out.hops = first.hops;
  out.hops.insert(out.hops.end(), second.hops.begin(), second.hops.end());
  if (first.exact && second.exact) out.exact = *second.exact * *first.exact;
  // Expanding germs can carry the disk out of the second chain; halve until it fits.
  for (; out.radius >= 1e-6; out.radius /= 2.0) {
    try {
      fill_samples(out, static_cast<int>(first.center.size()));
      return out;
    } catch (const DiskTooLarge&) {
    }
  }
  throw DiskTooLarge("compose: no disk fits the joined chart chain");
}

double germ_distance(const HolonomyMap& a, const HolonomyMap& b, double radius) {
  double worst = 0.0;
  for (const Vec& y : disk_samples(static_cast<int>(a.center.size()), radius))
    worst = std::max(worst, (a.apply(y) - b.apply(y)).norm());
  return worst;
}

bool germs_agree(const HolonomyMap& a, const HolonomyMap& b, double radius, double tol) {
  return germ_distance(a, b, radius) < tol;
}

// ---------------------------------------------------------------------------
// Horizontal curves and transfer

namespace {

// Horizontal lift of the transverse polyline `trace` inside `chart`, starting
// at leaf coordinate x0: dx/dlambda = H(x, y(lambda)) dy/dlambda.
std::vector<Vec> lift_in_chart(const FoliationModel& model, const AdaptedChart& chart, const Vec& x0,
                               const std::vector<Vec>& trace) {
  auto rate = [&](const Vec& x, const Vec& y, const Vec& dy) -> Vec {
    const Vec p = chart.to_model(x, y);
    return model.leaf_part(model.orthogonal_frame(p) * dy);
  };
  std::vector<Vec> out{chart.to_model(x0, trace.front())};
  Vec x = x0;
  constexpr int kSubsteps = 4;
  for (std::size_t i = 1; i < trace.size(); ++i) {
    const Vec dy = trace[i] - trace[i - 1];
    const double h = 1.0 / kSubsteps;
    for (int s = 0; s < kSubsteps; ++s) {
      const double l = s * h;
      auto y_at = [&](double lambda) -> Vec { return trace[i - 1] + lambda * dy; };
      const Vec k1 = rate(x, y_at(l), dy);
      const Vec k2 = rate(x + 0.5 * h * k1, y_at(l + 0.5 * h), dy);
      const Vec k3 = rate(x + 0.5 * h * k2, y_at(l + 0.5 * h), dy);
      const Vec k4 = rate(x + h * k3, y_at(l + h), dy);
      x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    out.push_back(chart.to_model(x, trace[i]));
  }
  return out;
}

}  // namespace

HorizontalCurve horizontal_curve(const FoliationModel& model, const Vec& start, const Vec& transverse_direction,
                                 double length, int samples) {
  const AdaptedChart chart = model.chart_at(start);
  const auto origin = chart.from_model(start);
  const Vec w = transverse_direction.normalized();
  std::vector<Vec> trace;
  for (int i = 0; i < samples; ++i) trace.emplace_back(origin->transverse + (length * i / (samples - 1)) * w);
  return HorizontalCurve{lift_in_chart(model, chart, origin->leaf, trace)};
}

double horizontality_residual(const FoliationModel& model, const HorizontalCurve& curve) {
  double worst = 0.0;
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    const Vec chord = model.point_difference(curve.points[i - 1], curve.points[i]);
    if (chord.norm() == 0.0) continue;
    const Vec mid = curve.points[i - 1] + 0.5 * chord;
    const Mat g = model.metric().eval(mid);
    const Vec lowered = g * chord;
    for (int axis : model.leaf_axes())
      worst = std::max(worst, std::abs(lowered(axis)) / (max_norm(g) * chord.norm()));
  }
  return worst;
}

TransferResult transfer(const FoliationModel& model, const HorizontalCurve& sigma, const LeafPath& h,
                        const TransferOptions& opts) {
  if (sigma.points.empty()) throw Error("transfer: empty horizontal curve");
  if (model.point_difference(h.start(), sigma.points.front()).norm() > 1e-9)
    throw Error("transfer: sigma(0) must equal h(0)");
  if (horizontality_residual(model, sigma) > opts.horizontality_tolerance)
    throw Error("transfer: sigma is not horizontal");

  TransferResult result;
  const AdaptedChart start_chart = model.chart_at(h.start());
  std::vector<Vec> trace;
  for (const Vec& p : sigma.points) {
    const auto c = start_chart.from_model(p);
    if (!c) throw TransferBreakdown("transfer: sigma leaves the starting chart", 0.0);
    trace.push_back(c->transverse);
  }
  result.initial_transverse = trace;

  auto on_hop = [&](const ChartHop& hop, double tau) {
    for (Vec& y : trace) {
      const auto c = hop.to.from_model(hop.from.to_model(hop.leaf_coordinate, y));
      if (!c) throw TransferBreakdown("transfer: lift left the adapted atlas", tau);
      y = c->transverse;
    }
  };
  auto on_step = [&](const ChainStep& step) {
    if (opts.keep_homotopy)
      result.homotopy.push_back(HorizontalCurve{lift_in_chart(model, *step.chart, step.leaf, trace)});
  };
  const auto hops = chain_plaques(model, h, opts.max_step, 1e-9, on_hop, on_step);

  const AdaptedChart& end_chart = hops.back().to;
  const Vec base_leaf = end_chart.from_model(h.end())->leaf;
  result.curve = HorizontalCurve{lift_in_chart(model, end_chart, base_leaf, trace)};
  result.final_transverse = trace;
  return result;
}

LeafPath generator_loop(const FoliationModel& model, const Vec& base, std::int64_t k) {
  if (k == 0) return LeafPath{{base, base}};
  if (model.suspension()) {
    const LeafId id = model.leaf_id(base);
    if (id.kind != LeafKind::Circle) throw Error("generator_loop: leaf through the base point is not closed");
    return straight_leaf_path(model, base, static_cast<double>(k * id.period));
  }
  const int axis = model.leaf_axes().front();
  if (!model.metric().domain.periodic[static_cast<std::size_t>(axis)])
    throw Error("generator_loop: leaf through the base point is simply connected");
  const double period = model.metric().domain.upper(axis) - model.metric().domain.lower(axis);
  return straight_leaf_path(model, base, static_cast<double>(k) * period);
}

ActionResult m_holonomy_action(const FoliationModel& model, std::int64_t loop_class, const HorizontalCurve& sigma,
                               const TransferOptions& opts) {
  const Vec base = sigma.points.front();
  const LeafPath loop = generator_loop(model, base, loop_class);

  // Homotopic representative: overshoot along the leaf, then come back.
  const int axis = model.leaf_axes().front();
  Vec overshoot = loop.end();
  overshoot(axis) += 0.3;
  const LeafPath detour{{base, overshoot, loop.end()}};

  ActionResult out;
  const auto direct = transfer(model, sigma, loop, opts);
  const auto other = transfer(model, sigma, detour, opts);
  out.curve = direct.curve;
  for (std::size_t i = 0; i < direct.curve.points.size(); ++i)
    out.independence_residual = std::max(
        out.independence_residual, model.point_difference(direct.curve.points[i], other.curve.points[i]).norm());
  return out;
}

HolonomyGroup holonomy_group(const FoliationModel& model, const Vec& leaf_point, const HolonomyOptions& opts) {
  HolonomyGroup group;
  const Vec base = model.normalize(leaf_point);
  const LeafId id = model.leaf_id(base);
  group.leaf_kind = id.kind;

  LeafPath loop;
  if (model.suspension()) {
    if (id.kind == LeafKind::Undecided)
      throw UnknownLeafClass("holonomy_group: rational point with period above the search bound");
    if (id.kind == LeafKind::Generic) {
      group.decided = false;  // no return within the bound; reported generic
      return group;
    }
    group.period = id.period;
    group.generator_exact = model.suspension()->A.power(kForwardLoopPower * id.period);
    loop = generator_loop(model, base, 1);
  } else {
    const int axis = model.leaf_axes().front();
    if (!model.metric().domain.periodic[static_cast<std::size_t>(axis)]) return group;
    loop = generator_loop(model, base, 1);
  }

  HolonomyMap germ = holonomy_along(model, loop, opts);
  group.germ_exact_residual = germ.exact_residual();
  group.cyclic = germ.identity_residual() > opts.tolerance;

  // chi o mu = nu on the generator: transfer of a short horizontal curve
  // induces the germ on its transverse trace.
  Vec direction = Vec::LinSpaced(model.codim(), 1.0, 0.5);
  const HorizontalCurve sigma = horizontal_curve(model, base, direction, 0.5 * germ.radius);
  const TransferResult moved = transfer(model, sigma, loop);
  for (std::size_t i = 0; i < moved.final_transverse.size(); ++i)
    group.chi_residual = std::max(group.chi_residual,
                                  (moved.final_transverse[i] - germ.apply(moved.initial_transverse[i])).norm());
  group.generator = std::move(germ);
  return group;
}

}  // namespace folia
