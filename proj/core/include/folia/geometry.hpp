#pragma once

// Chart-level pseudo-Riemannian primitives: metric fields, Levi-Civita
// Christoffel symbols, fixed-step geodesic integration, scalar products,
// signatures and g-orthogonal complements.

#include "folia/errors.hpp"
#include "folia/linalg.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace folia {

/// Axis-aligned chart domain. Periodic axes wrap into [lower, upper).
struct Box {
  Vec lower;
  Vec upper;
  std::vector<bool> periodic;

  static Box unbounded(int dim);
  static Box closed(const Vec& lower, const Vec& upper);
  static Box torus(const Vec& lower, const Vec& upper);

  int dim() const { return static_cast<int>(lower.size()); }
  bool contains(const Vec& p) const;
  Vec wrap(Vec p) const;
  bool any_periodic() const;
};

/// Direct product of two boxes (first factor's axes come first).
Box product_box(const Box& first, const Box& second);

/// A smooth field of symmetric bilinear forms over a chart domain.
struct MetricField {
  using Eval = std::function<Mat(const Vec&)>;
  /// deriv(p)[k] is the matrix dg_ij/dx^k.
  using Deriv = std::function<std::vector<Mat>(const Vec&)>;

  int dim = 0;
  Box domain;
  Eval eval;
  Deriv deriv;
  /// Constant coefficients: all derivatives vanish identically.
  bool constant = false;

  Mat at(const Vec& p) const { return eval(p); }
  bool has_analytic_derivative() const { return constant || static_cast<bool>(deriv); }

  static MetricField constant_field(const Mat& g, Box domain);
  static MetricField from_function(int dim, Box domain, Eval eval, Deriv deriv = {});

  /// c * g, with derivatives scaled accordingly.
  MetricField scaled(double c) const;
};

/// Scale-aware degeneracy: |det g| < 1e-10 * prod_i |row_i(g)|.
bool is_degenerate(const Mat& g);

inline constexpr double kNullEigenvalueThreshold = 1e-10;

enum class DerivativeSource { Automatic, FiniteDifference, Analytic };

/// dg/dx^k at p for every k. Finite differences are central with step
/// 1e-6 * max(1, |p_k|).
std::vector<Mat> metric_derivative(const MetricField& metric, const Vec& p,
                                   DerivativeSource source = DerivativeSource::Automatic);

/// Gamma^k_ij with k the upper index.
class Christoffel {
 public:
  explicit Christoffel(int dim) : dim_(dim), data_(static_cast<std::size_t>(dim * dim * dim), 0.0) {}

  int dim() const { return dim_; }
  double operator()(int k, int i, int j) const { return data_[index(k, i, j)]; }
  double& operator()(int k, int i, int j) { return data_[index(k, i, j)]; }

  /// -Gamma^k_ij v^i w^j.
  Vec contract(const Vec& v, const Vec& w) const;
  double max_abs() const;

 private:
  std::size_t index(int k, int i, int j) const {
    return static_cast<std::size_t>((k * dim_ + i) * dim_ + j);
  }
  int dim_;
  std::vector<double> data_;
};

Christoffel christoffel(const MetricField& metric, const Vec& p,
                        DerivativeSource source = DerivativeSource::Automatic);

/// Largest |d_k g_ij - Gamma^l_ki g_lj - Gamma^l_kj g_il| at p.
double metric_compatibility_residual(const MetricField& metric, const Vec& p,
                                     const Christoffel& gamma);

struct GeodesicState {
  Vec position;
  Vec velocity;
  double parameter = 0.0;
};

inline constexpr double kDefaultGeodesicStep = 1e-3;

/// Called for every integrated state; return false to stop early.
using GeodesicVisitor = std::function<bool(const GeodesicState&)>;

/// Classical RK4 with fixed step. Integrates backwards when s_max < 0.
/// Throws DomainExit when a non-periodic axis is left; periodic axes wrap.
void trace_geodesic(const MetricField& metric, const GeodesicState& start, double s_max,
                    double step, const GeodesicVisitor& visit);

std::vector<GeodesicState> integrate_geodesic(const MetricField& metric, const GeodesicState& start,
                                              double s_max, double step = kDefaultGeodesicStep);

/// Endpoint comparison of a step-h run against a step-h/2 run.
struct RichardsonCheck {
  GeodesicState coarse;
  GeodesicState fine;
  double position_difference;
  double velocity_difference;
};
RichardsonCheck richardson_check(const MetricField& metric, const GeodesicState& start,
                                 double s_max, double step = kDefaultGeodesicStep);

double scalar_product(const MetricField& metric, const Vec& p, const Vec& u, const Vec& v);

struct Signature {
  int plus = 0;
  int minus = 0;
  bool null_flag = false;

  friend bool operator==(const Signature&, const Signature&) = default;
};

Signature signature(const Mat& symmetric);

/// Gram matrix B^T g(p) B of the given vectors.
Mat gram_matrix(const MetricField& metric, const Vec& p, const std::vector<Vec>& basis);

/// Euclidean-orthonormal basis of the g-orthogonal complement of span(basis).
/// Throws DegenerateRestriction when g restricted to span(basis) is singular.
std::vector<Vec> orthogonal_complement(const MetricField& metric, const Vec& p,
                                       const std::vector<Vec>& basis);

}  // namespace folia
