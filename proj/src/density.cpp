#include "eeauction/density.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "eeauction/ingest.hpp"
#include "text_util.hpp"

namespace eeauction {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014327;  // 1 / sqrt(2 pi)

double kernel_value(KernelKind kind, double u) {
  switch (kind) {
    case KernelKind::gaussian:
      return kInvSqrt2Pi * std::exp(-0.5 * u * u);
    case KernelKind::epanechnikov:
      return std::abs(u) <= 1.0 ? 0.75 * (1.0 - u * u) : 0.0;
  }
  return 0.0;
}

double to_unit(const SupportInterval& s, double x) {
  return (2.0 * x - s.lo - s.hi) / (s.hi - s.lo);
}

// Clenshaw recurrence for sum_k c_k T_k(t).
double chebyshev_sum(std::span<const double> c, double t) {
  double b1 = 0.0;
  double b2 = 0.0;
  for (std::size_t k = c.size(); k-- > 1;) {
    const double b0 = 2.0 * t * b1 - b2 + c[k];
    b2 = b1;
    b1 = b0;
  }
  return t * b1 - b2 + c[0];
}

// Type-6 sample quantile on sorted data: position (n + 1) p, clamped.
double plotting_position_quantile(std::span<const double> sorted, double p) {
  const double n = static_cast<double>(sorted.size());
  const double pos = (n + 1.0) * p;
  if (pos <= 1.0) return sorted.front();
  if (pos >= n) return sorted.back();
  const auto lower = static_cast<std::size_t>(std::floor(pos));
  const double frac = pos - static_cast<double>(lower);
  return sorted[lower - 1] + frac * (sorted[lower] - sorted[lower - 1]);
}

}  // namespace

std::string_view to_string(KernelKind kind) {
  return kind == KernelKind::gaussian ? "gaussian" : "epanechnikov";
}

KernelKind parse_kernel_kind(std::string_view name) {
  if (name == "gaussian") return KernelKind::gaussian;
  if (name == "epanechnikov") return KernelKind::epanechnikov;
  throw std::invalid_argument("unknown kernel '" + std::string(name) +
                              "' (expected gaussian or epanechnikov)");
}

SupportInterval::SupportInterval(double lo_, double hi_) : lo(lo_), hi(hi_) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
    throw std::invalid_argument("support interval requires lo < hi");
  }
}

std::vector<double> uniform_grid(SupportInterval support, int n) {
  if (n < 2) throw std::invalid_argument("uniform grid needs at least 2 points");
  std::vector<double> grid(static_cast<std::size_t>(n));
  const double step = support.width() / (n - 1);
  for (int j = 0; j < n; ++j) grid[j] = support.lo + step * j;
  grid.back() = support.hi;
  return grid;
}

double simpson(const DensityFn& f, double lo, double hi, int subintervals) {
  if (subintervals < 2 || subintervals % 2 != 0) {
    throw std::invalid_argument("Simpson rule needs an even number of subintervals");
  }
  const double step = (hi - lo) / subintervals;
  double odd = 0.0;
  double even = 0.0;
  for (int k = 1; k < subintervals; ++k) {
    (k % 2 == 1 ? odd : even) += f(lo + step * k);
  }
  return step / 3.0 * (f(lo) + 4.0 * odd + 2.0 * even + f(hi));
}

double silverman_bandwidth(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 2) throw DataError("bandwidth selection needs at least 2 points");

  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));

  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double iqr =
      plotting_position_quantile(sorted, 0.75) - plotting_position_quantile(sorted, 0.25);

  if (!(sd > 0.0)) throw DataError("zero-variance series: bandwidth undefined");
  // A zero IQR with positive spread falls back to sd alone.
  const double spread = iqr > 0.0 ? std::min(sd, iqr / 1.34) : sd;
  return 0.9 * spread * std::pow(static_cast<double>(n), -0.2);
}

double silverman_bandwidth(const PriceSeries& series) {
  return silverman_bandwidth(series.prices());
}

KdeModel::KdeModel(std::vector<double> points, double bandwidth, KernelKind kernel)
    : points_(std::move(points)), bandwidth_(bandwidth), kernel_(kernel) {
  if (points_.empty()) throw std::invalid_argument("KDE needs at least one point");
  if (!(bandwidth_ > 0.0) || !std::isfinite(bandwidth_)) {
    throw std::invalid_argument("KDE bandwidth must be positive");
  }
  auto [mn, mx] = std::minmax_element(points_.begin(), points_.end());
  min_ = *mn;
  max_ = *mx;
}

double KdeModel::operator()(double x) const {
  double sum = 0.0;
  for (double p : points_) sum += kernel_value(kernel_, (x - p) / bandwidth_);
  return sum / (static_cast<double>(points_.size()) * bandwidth_);
}

double kde_eval(const KdeModel& model, double x) { return model(x); }

SupportInterval default_support(const KdeModel& model) {
  const double pad = 3.0 * model.bandwidth();
  return {model.min_point() - pad, model.max_point() + pad};
}

PolyDensity::PolyDensity(SupportInterval support, std::vector<double> coefficients)
    : support_(support), coefficients_(std::move(coefficients)) {
  if (coefficients_.empty()) {
    throw std::invalid_argument("polynomial needs at least one coefficient");
  }
  constexpr int n = kSimpsonSubintervals;
  const double step = support_.width() / n;
  node_values_.resize(n + 1);
  for (int k = 0; k <= n; ++k) {
    const double x = k == n ? support_.hi : support_.lo + step * k;
    node_values_[k] = std::max(polynomial(x), 0.0);
  }
  cumulative_.resize(n / 2 + 1);
  cumulative_[0] = 0.0;
  for (int p = 0; p < n / 2; ++p) {
    const double panel = step / 3.0 *
                         (node_values_[2 * p] + 4.0 * node_values_[2 * p + 1] +
                          node_values_[2 * p + 2]);
    cumulative_[p + 1] = cumulative_[p] + panel;
  }
  normalizer_ = cumulative_.back();
  if (!(normalizer_ > 0.0)) {
    throw DataError("clamped polynomial has no positive mass on the support");
  }
}

double PolyDensity::polynomial(double x) const {
  return chebyshev_sum(coefficients_, to_unit(support_, x));
}

double PolyDensity::target(double x) const {
  if (!support_.contains(x)) return 0.0;
  return std::max(polynomial(x), 0.0);
}

double PolyDensity::cdf(double x) const {
  if (!(x > support_.lo)) return 0.0;
  if (x >= support_.hi) return 1.0;

  // Simpson mass at panel ends; inside a panel the increment is split in
  // proportion to the trapezoid mass of the piecewise-linear node values,
  // which keeps the CDF monotone.
  constexpr int panels = kSimpsonSubintervals / 2;
  const double pos = (x - support_.lo) / support_.width() * kSimpsonSubintervals;
  const int p = std::min(static_cast<int>(pos / 2.0), panels - 1);
  const double local = std::clamp(pos - 2.0 * p, 0.0, 2.0);
  const double f0 = node_values_[2 * p];
  const double f1 = node_values_[2 * p + 1];
  const double f2 = node_values_[2 * p + 2];

  const double total = 0.5 * (f0 + f1) + 0.5 * (f1 + f2);
  double partial = 0.0;
  if (local <= 1.0) {
    partial = f0 * local + 0.5 * (f1 - f0) * local * local;
  } else {
    const double r = local - 1.0;
    partial = 0.5 * (f0 + f1) + f1 * r + 0.5 * (f2 - f1) * r * r;
  }
  const double frac = total > 0.0 ? std::clamp(partial / total, 0.0, 1.0) : 0.0;
  const double mass = cumulative_[p] + frac * (cumulative_[p + 1] - cumulative_[p]);
  return std::clamp(mass / normalizer_, 0.0, 1.0);
}

PolyDensity fit_polynomial(const DensityFn& f, SupportInterval support, int degree,
                           int grid_size) {
  if (degree < 0) throw std::invalid_argument("polynomial degree must be >= 0");
  if (grid_size <= degree + 1) {
    throw std::invalid_argument("fit grid must have more than degree + 1 points");
  }
  const std::vector<double> grid = uniform_grid(support, grid_size);
  const int cols = degree + 1;

  Eigen::MatrixXd design(grid_size, cols);
  Eigen::VectorXd rhs(grid_size);
  for (int j = 0; j < grid_size; ++j) {
    const double t = to_unit(support, grid[j]);
    design(j, 0) = 1.0;
    if (cols > 1) design(j, 1) = t;
    for (int k = 2; k < cols; ++k) {
      design(j, k) = 2.0 * t * design(j, k - 1) - design(j, k - 2);
    }
    rhs(j) = f(grid[j]);
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < cols) {
    throw FitError("rank-deficient least-squares design: degree " + std::to_string(degree) +
                   " on a " + std::to_string(grid_size) + "-point grid has numerical rank " +
                   std::to_string(qr.rank()) + " (ill-conditioned; lower the degree)");
  }
  const Eigen::VectorXd solution = qr.solve(rhs);
  return PolyDensity(support, std::vector<double>(solution.data(), solution.data() + cols));
}

PolyDensity fit_polynomial(const KdeModel& model, int degree, int grid_size) {
  return fit_polynomial([&model](double x) { return model(x); }, default_support(model),
                        degree, grid_size);
}

double poly_target(const PolyDensity& poly, double x) { return poly.target(x); }
double target_cdf(const PolyDensity& poly, double x) { return poly.cdf(x); }

double least_squares_residual(const PolyDensity& poly, const DensityFn& f, int grid_size) {
  double sum = 0.0;
  for (double x : uniform_grid(poly.support(), grid_size)) {
    const double r = poly.polynomial(x) - f(x);
    sum += r * r;
  }
  return sum;
}

ApproximationError approximation_error(const DensityFn& f, const PolyDensity& poly,
                                       int grid_size) {
  ApproximationError err;
  double ss = 0.0;
  for (double x : uniform_grid(poly.support(), grid_size)) {
    const double d = std::abs(poly.target(x) - f(x));
    err.max_abs = std::max(err.max_abs, d);
    ss += d * d;
  }
  err.rmse = std::sqrt(ss / grid_size);
  return err;
}

ApproximationError approximation_error(const KdeModel& model, const PolyDensity& poly,
                                       int grid_size) {
  return approximation_error([&model](double x) { return model(x); }, poly, grid_size);
}

std::string density_csv(const KdeModel& model, const PolyDensity& poly, int grid_size) {
  std::string out = "x,kde,poly_target\n";
  for (double x : uniform_grid(poly.support(), grid_size)) {
    out += detail::format_fixed(x, 6);
    out += ',';
    out += detail::format_fixed(model(x), 10);
    out += ',';
    out += detail::format_fixed(poly.target(x), 10);
    out += '\n';
  }
  return out;
}

}  // namespace eeauction
