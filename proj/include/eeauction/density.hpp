#pragma once

// Kernel density estimation of the real price series and its least-squares
// polynomial approximation, which serves as the sampling target.

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace eeauction {

class PriceSeries;

using DensityFn = std::function<double(double)>;

/// Least-squares design is numerically rank deficient.
class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class KernelKind { gaussian, epanechnikov };

std::string_view to_string(KernelKind kind);
/// Accepts "gaussian" or "epanechnikov"; throws std::invalid_argument.
KernelKind parse_kernel_kind(std::string_view name);

struct SupportInterval {
  double lo = 0.0;
  double hi = 1.0;

  /// Throws std::invalid_argument unless lo < hi (both finite).
  SupportInterval(double lo_, double hi_);
  SupportInterval() = default;

  double width() const { return hi - lo; }
  bool contains(double x) const { return x >= lo && x <= hi; }
  bool operator==(const SupportInterval&) const = default;
};

/// `n` equally spaced points from lo to hi inclusive (n >= 2).
std::vector<double> uniform_grid(SupportInterval support, int n);

/// Composite Simpson rule on [lo, hi] with an even number of subintervals.
double simpson(const DensityFn& f, double lo, double hi, int subintervals = 4096);

/// Silverman's rule of thumb, h = 0.9 * min(sd, IQR / 1.34) * n^(-1/5).
///
/// sd uses the n - 1 denominator. Quartiles use the (n + 1)p plotting
/// position, clamped to the sample range. Throws DataError on fewer than
/// two points or zero spread.
double silverman_bandwidth(std::span<const double> values);
double silverman_bandwidth(const PriceSeries& series);

class KdeModel {
 public:
  /// Throws std::invalid_argument on empty points or a non-positive bandwidth.
  KdeModel(std::vector<double> points, double bandwidth,
           KernelKind kernel = KernelKind::gaussian);

  /// (1 / (n h)) * sum_i K((x - x_i) / h).
  double operator()(double x) const;

  std::span<const double> points() const { return points_; }
  double bandwidth() const { return bandwidth_; }
  KernelKind kernel() const { return kernel_; }
  double min_point() const { return min_; }
  double max_point() const { return max_; }

 private:
  std::vector<double> points_;
  double bandwidth_;
  KernelKind kernel_;
  double min_;
  double max_;
};

double kde_eval(const KdeModel& model, double x);

/// [min(points) - 3h, max(points) + 3h].
SupportInterval default_support(const KdeModel& model);

/// Polynomial density over a bounded support, stored as coefficients of
/// Chebyshev polynomials T_k(t) with t = (2x - lo - hi) / (hi - lo).
///
/// The sampling target is the polynomial clamped at zero and set to zero
/// outside the support. The normalizer and the CDF table are built with
/// composite Simpson on 4096 subintervals of the clamped polynomial.
class PolyDensity {
 public:
  static constexpr int kSimpsonSubintervals = 4096;

  /// Throws std::invalid_argument on empty coefficients, and DataError when
  /// the clamped polynomial has no positive mass on the support.
  PolyDensity(SupportInterval support, std::vector<double> coefficients);

  int degree() const { return static_cast<int>(coefficients_.size()) - 1; }
  std::span<const double> coefficients() const { return coefficients_; }
  const SupportInterval& support() const { return support_; }
  double normalizer() const { return normalizer_; }

  /// Raw polynomial value, defined for all x (extrapolates outside).
  double polynomial(double x) const;
  /// max(polynomial(x), 0) on the support, 0 elsewhere.
  double target(double x) const;
  /// Integral of target / Z from lo to x, clipped to [0, 1].
  double cdf(double x) const;

 private:
  SupportInterval support_;
  std::vector<double> coefficients_;
  double normalizer_ = 0.0;
  std::vector<double> node_values_;  // target at the Simpson nodes
  std::vector<double> cumulative_;   // Simpson mass up to each panel end
};

/// Fits `degree` + 1 Chebyshev coefficients minimizing the squared error
/// against `f` on a uniform grid of `grid_size` points over `support`.
/// Solved with column-pivoted Householder QR. Throws std::invalid_argument
/// if degree < 0 or grid_size <= degree + 1, FitError on numerical rank
/// deficiency.
PolyDensity fit_polynomial(const DensityFn& f, SupportInterval support, int degree,
                           int grid_size);
/// Fit to the KDE over its default support.
PolyDensity fit_polynomial(const KdeModel& model, int degree = 17, int grid_size = 512);

double poly_target(const PolyDensity& poly, double x);
double target_cdf(const PolyDensity& poly, double x);

/// Sum over the uniform grid of (polynomial(x_j) - f(x_j))^2, using the raw
/// (unclamped) polynomial; this is the quantity the fit minimizes.
double least_squares_residual(const PolyDensity& poly, const DensityFn& f, int grid_size);

struct ApproximationError {
  double max_abs = 0.0;
  double rmse = 0.0;
};

/// Max and RMS of |poly_target(x_j) - f(x_j)| on a uniform grid over the
/// polynomial's support.
ApproximationError approximation_error(const DensityFn& f, const PolyDensity& poly,
                                       int grid_size);
ApproximationError approximation_error(const KdeModel& model, const PolyDensity& poly,
                                       int grid_size);

/// `density.csv` body: header `x,kde,poly_target`, one row per grid point.
std::string density_csv(const KdeModel& model, const PolyDensity& poly, int grid_size);

}  // namespace eeauction
