#include "folia/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace folia {

IntMatrix2 IntMatrix2::power(std::int64_t k) const {
  IntMatrix2 base = k >= 0 ? *this : unimodular_inverse();
  std::int64_t e = k >= 0 ? k : -k;
  IntMatrix2 result = identity();
  while (e > 0) {
    if (e & 1) result = result * base;
    base = base * base;
    e >>= 1;
  }
  return result;
}

Mat IntMatrix2::to_dense() const {
  Mat out(2, 2);
  out << static_cast<double>(a()), static_cast<double>(b()), static_cast<double>(c()),
      static_cast<double>(d());
  return out;
}

Mat stack_columns(const std::vector<Vec>& basis, int dim) {
  Mat out(dim, static_cast<Eigen::Index>(basis.size()));
  for (std::size_t i = 0; i < basis.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = basis[i];
  return out;
}

std::vector<Vec> split_columns(const Mat& m) {
  std::vector<Vec> out;
  out.reserve(static_cast<std::size_t>(m.cols()));
  for (Eigen::Index j = 0; j < m.cols(); ++j) out.emplace_back(m.col(j));
  return out;
}

int numerical_rank(const Mat& m, double rel_tol) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Mat> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > rel_tol * s(0)) ++rank;
  return rank;
}

// ---------------------------------------------------------------------------
// Box

Box Box::unbounded(int dim) {
  const double inf = std::numeric_limits<double>::infinity();
  return {Vec::Constant(dim, -inf), Vec::Constant(dim, inf), std::vector<bool>(static_cast<std::size_t>(dim), false)};
}

Box Box::closed(const Vec& lower, const Vec& upper) {
  return {lower, upper, std::vector<bool>(static_cast<std::size_t>(lower.size()), false)};
}

Box Box::torus(const Vec& lower, const Vec& upper) {
  return {lower, upper, std::vector<bool>(static_cast<std::size_t>(lower.size()), true)};
}

bool Box::contains(const Vec& p) const {
  for (int i = 0; i < dim(); ++i) {
    if (periodic[static_cast<std::size_t>(i)]) continue;
    if (!(p(i) >= lower(i) && p(i) <= upper(i))) return false;
  }
  return true;
}

Vec Box::wrap(Vec p) const {
  for (int i = 0; i < dim(); ++i) {
    if (!periodic[static_cast<std::size_t>(i)]) continue;
    const double period = upper(i) - lower(i);
    double r = std::fmod(p(i) - lower(i), period);
    if (r < 0) r += period;
    if (r >= period) r = 0.0;
    p(i) = lower(i) + r;
  }
  return p;
}

bool Box::any_periodic() const {
  return std::any_of(periodic.begin(), periodic.end(), [](bool b) { return b; });
}

Box product_box(const Box& first, const Box& second) {
  Box out;
  out.lower.resize(first.dim() + second.dim());
  out.upper.resize(first.dim() + second.dim());
  out.lower << first.lower, second.lower;
  out.upper << first.upper, second.upper;
  out.periodic = first.periodic;
  out.periodic.insert(out.periodic.end(), second.periodic.begin(), second.periodic.end());
  return out;
}

// ---------------------------------------------------------------------------
// MetricField

MetricField MetricField::constant_field(const Mat& g, Box domain) {
  MetricField f;
  f.dim = static_cast<int>(g.rows());
  f.domain = std::move(domain);
  f.eval = [g](const Vec&) { return g; };
  f.constant = true;
  return f;
}

MetricField MetricField::from_function(int dim, Box domain, Eval eval, Deriv deriv) {
  MetricField f;
  f.dim = dim;
  f.domain = std::move(domain);
  f.eval = std::move(eval);
  f.deriv = std::move(deriv);
  return f;
}

MetricField MetricField::scaled(double c) const {
  MetricField f = *this;
  f.eval = [inner = eval, c](const Vec& p) -> Mat { return c * inner(p); };
  if (deriv) {
    f.deriv = [inner = deriv, c](const Vec& p) {
      auto d = inner(p);
      for (auto& m : d) m *= c;
      return d;
    };
  }
  return f;
}

bool is_degenerate(const Mat& g) {
  // Hadamard ratio: |det g| / prod |row_i| lies in [0, 1], is invariant
  // under g -> c g and under rescaling coordinate axes.
  double rows = 1.0;
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    const double r = g.row(i).norm();
    if (r == 0.0) return true;
    rows *= r;
  }
  return std::abs(g.determinant()) < 1e-10 * rows;
}

std::vector<Mat> metric_derivative(const MetricField& metric, const Vec& p, DerivativeSource source) {
  const int n = metric.dim;
  if (source == DerivativeSource::Automatic)
    source = metric.has_analytic_derivative() ? DerivativeSource::Analytic : DerivativeSource::FiniteDifference;

  if (source == DerivativeSource::Analytic) {
    if (metric.constant) return std::vector<Mat>(static_cast<std::size_t>(n), Mat::Zero(n, n));
    if (!metric.deriv) throw Error("metric_derivative: no analytic derivative supplied");
    return metric.deriv(p);
  }

  std::vector<Mat> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double h = 1e-6 * std::max(1.0, std::abs(p(k)));
    Vec plus = p;
    Vec minus = p;
    plus(k) += h;
    minus(k) -= h;
    out.emplace_back((metric.eval(plus) - metric.eval(minus)) / (plus(k) - minus(k)));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Christoffel symbols

Vec Christoffel::contract(const Vec& v, const Vec& w) const {
  Vec out = Vec::Zero(dim_);
  for (int k = 0; k < dim_; ++k) {
    double acc = 0.0;
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j) acc += (*this)(k, i, j) * v(i) * w(j);
    out(k) = -acc;
  }
  return out;
}

double Christoffel::max_abs() const {
  double m = 0.0;
  for (double x : data_) m = std::max(m, std::abs(x));
  return m;
}

Christoffel christoffel(const MetricField& metric, const Vec& p, DerivativeSource source) {
  const int n = metric.dim;
  const Mat g = metric.eval(p);
  if (is_degenerate(g)) throw DegenerateMetric("christoffel: metric is degenerate at the evaluation point");

  Christoffel gamma(n);
  if (metric.constant && source != DerivativeSource::FiniteDifference) return gamma;

  const auto dg = metric_derivative(metric, p, source);
  const Mat ginv = g.inverse();
  // Gamma_lij = (d_i g_lj + d_j g_li - d_l g_ij) / 2, then raise l.
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      Vec lowered(n);
      for (int l = 0; l < n; ++l)
        lowered(l) = 0.5 * (dg[static_cast<std::size_t>(i)](l, j) + dg[static_cast<std::size_t>(j)](l, i) -
                            dg[static_cast<std::size_t>(l)](i, j));
      const Vec raised = ginv * lowered;
      for (int k = 0; k < n; ++k) {
        gamma(k, i, j) = raised(k);
        gamma(k, j, i) = raised(k);
      }
    }
  }
  return gamma;
}

double metric_compatibility_residual(const MetricField& metric, const Vec& p, const Christoffel& gamma) {
  const int n = metric.dim;
  const Mat g = metric.eval(p);
  const auto dg = metric_derivative(metric, p);
  double worst = 0.0;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double r = dg[static_cast<std::size_t>(k)](i, j);
        for (int l = 0; l < n; ++l) r -= gamma(l, k, i) * g(l, j) + gamma(l, k, j) * g(i, l);
        worst = std::max(worst, std::abs(r));
      }
  return worst;
}

// ---------------------------------------------------------------------------
// Geodesics

namespace {

struct Derivative {
  Vec dx;
  Vec dv;
};

Derivative geodesic_rhs(const MetricField& metric, const Vec& x, const Vec& v) {
  if (metric.constant) return {v, Vec::Zero(v.size())};
  return {v, christoffel(metric, x).contract(v, v)};
}

bool finite(const Vec& v) { return v.allFinite(); }

}  // namespace

void trace_geodesic(const MetricField& metric, const GeodesicState& start, double s_max, double step,
                    const GeodesicVisitor& visit) {
  if (!(step > 0.0)) throw Error("integrate_geodesic: step must be positive");
  if (!metric.domain.contains(start.position))
    throw DomainExit("integrate_geodesic: start point outside the chart domain", start.parameter);

  const auto steps = static_cast<long long>(std::ceil(std::abs(s_max) / step - 1e-9));
  const double h = steps > 0 ? s_max / static_cast<double>(steps) : 0.0;

  GeodesicState state{metric.domain.wrap(start.position), start.velocity, start.parameter};
  if (!visit(state)) return;

  for (long long i = 0; i < steps; ++i) {
    const Vec& x = state.position;
    const Vec& v = state.velocity;
    const auto k1 = geodesic_rhs(metric, x, v);
    const auto k2 = geodesic_rhs(metric, x + 0.5 * h * k1.dx, v + 0.5 * h * k1.dv);
    const auto k3 = geodesic_rhs(metric, x + 0.5 * h * k2.dx, v + 0.5 * h * k2.dv);
    const auto k4 = geodesic_rhs(metric, x + h * k3.dx, v + h * k3.dv);

    Vec nx = x + (h / 6.0) * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx);
    Vec nv = v + (h / 6.0) * (k1.dv + 2.0 * k2.dv + 2.0 * k3.dv + k4.dv);
    const double s = start.parameter + static_cast<double>(i + 1) * h;

    if (!finite(nx) || !finite(nv)) throw DomainExit("integrate_geodesic: state blew up", s);
    if (!metric.domain.contains(nx)) throw DomainExit("integrate_geodesic: left the chart domain", s);

    state.position = metric.domain.wrap(std::move(nx));
    state.velocity = std::move(nv);
    state.parameter = s;
    if (!visit(state)) return;
  }
}

std::vector<GeodesicState> integrate_geodesic(const MetricField& metric, const GeodesicState& start,
                                              double s_max, double step) {
  std::vector<GeodesicState> out;
  out.reserve(static_cast<std::size_t>(std::abs(s_max) / step) + 2);
  trace_geodesic(metric, start, s_max, step, [&](const GeodesicState& s) {
    out.push_back(s);
    return true;
  });
  return out;
}

RichardsonCheck richardson_check(const MetricField& metric, const GeodesicState& start, double s_max,
                                 double step) {
  GeodesicState coarse;
  GeodesicState fine;
  trace_geodesic(metric, start, s_max, step, [&](const GeodesicState& s) {
    coarse = s;
    return true;
  });
  trace_geodesic(metric, start, s_max, step / 2.0, [&](const GeodesicState& s) {
    fine = s;
    return true;
  });
  return {coarse, fine, (coarse.position - fine.position).norm(), (coarse.velocity - fine.velocity).norm()};
}

// ---------------------------------------------------------------------------
// Scalar products, signature, complements

double scalar_product(const MetricField& metric, const Vec& p, const Vec& u, const Vec& v) {
  return u.dot(metric.eval(p) * v);
}

Signature signature(const Mat& symmetric) {
  Eigen::SelfAdjointEigenSolver<Mat> solver(symmetric, Eigen::EigenvaluesOnly);
  const double threshold = kNullEigenvalueThreshold * std::max(1.0, max_norm(symmetric));
  Signature sig;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    const double lambda = solver.eigenvalues()(i);
    if (lambda > threshold)
      ++sig.plus;
    else if (lambda < -threshold)
      ++sig.minus;
    else
      sig.null_flag = true;
  }
  return sig;
}

Mat gram_matrix(const MetricField& metric, const Vec& p, const std::vector<Vec>& basis) {
  const Mat b = stack_columns(basis, metric.dim);
  return b.transpose() * metric.eval(p) * b;
}

std::vector<Vec> orthogonal_complement(const MetricField& metric, const Vec& p, const std::vector<Vec>& basis) {
  const int n = metric.dim;
  const auto k = static_cast<int>(basis.size());
  if (k == 0) return split_columns(Mat::Identity(n, n));

  const Mat b = stack_columns(basis, n);
  if (numerical_rank(b) < k) throw Error("orthogonal_complement: basis is linearly dependent");
  const Mat gram = b.transpose() * metric.eval(p) * b;
  if (is_degenerate(gram))
    throw DegenerateRestriction("orthogonal_complement: metric restricted to the span is degenerate");

  // Kernel of the k x n map v -> B^T g v.
  const Mat constraint = b.transpose() * metric.eval(p);
  Eigen::JacobiSVD<Mat> svd(constraint, Eigen::ComputeFullV);
  std::vector<Vec> out;
  for (int j = k; j < n; ++j) out.emplace_back(svd.matrixV().col(j));
  return out;
}

}  // namespace folia
