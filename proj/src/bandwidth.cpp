#include "awr/bandwidth.hpp"

#include "awr/errors.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace awr {

namespace {

void
require_kernel_matches(const SmoothingGeometry& geometry, const KernelSpec& kernel)
{
  if (kernel.dimension() != geometry.dim()) {
    throw input_error("dimension-mismatch",
                      "kernel dimension " + std::to_string(kernel.dimension()) +
                        " does not match smoothing dimension " + std::to_string(geometry.dim()));
  }
}

} // namespace

std::optional<double>
loo_sigma2(const SmoothingGeometry& geometry,
           const Eigen::VectorXd& sq_residuals,
           const KernelSpec& kernel,
           double h,
           Eigen::Index i)
{
  require_kernel_matches(geometry, kernel);
  if (!(h > 0.0))
    throw input_error("bad-bandwidth", "bandwidth must be positive");
  if (i < 0 || i >= geometry.size())
    throw input_error("bad-index", "observation index out of range");
  const Eigen::MatrixXd zt = geometry.coords.transpose();
  const int d = geometry.dim();
  const double inv_h2 = 1.0 / (h * h);
  double mass = 0.0;
  double acc = 0.0;
  for (Eigen::Index j = 0; j < geometry.size(); ++j) {
    if (j == i)
      continue;
    double k =
      kernel.from_squared_norm(squared_distance(zt.col(i).data(), zt.col(j).data(), d) * inv_h2);
    mass += k;
    acc += k * sq_residuals[j];
  }
  if (!(mass > 0.0))
    return std::nullopt;
  return acc / mass;
}

std::optional<double>
loo_sigma2(const Dataset& data,
           const FirstStepFit& fs,
           const KernelSpec& kernel,
           double h,
           SmoothingMode mode,
           Eigen::Index i,
           double epsilon)
{
  auto geometry = make_geometry(data, fs, mode, epsilon);
  return loo_sigma2(geometry, fs.residuals.array().square().matrix(), kernel, h, i);
}

std::vector<double>
geometric_grid(double lo, double hi, int count)
{
  if (!(lo > 0.0) || !(hi >= lo) || count < 1)
    throw input_error("bad-grid", "grid needs 0 < min <= max and at least one point");
  std::vector<double> grid(static_cast<std::size_t>(count));
  if (count == 1) {
    grid[0] = lo;
    return grid;
  }
  double ratio = std::log(hi / lo) / static_cast<double>(count - 1);
  for (int k = 0; k < count; ++k)
    grid[static_cast<std::size_t>(k)] = lo * std::exp(ratio * k);
  grid.back() = hi;
  return grid;
}

std::vector<double>
default_grid(const SmoothingGeometry& geometry, int count)
{
  const auto n = geometry.size();
  const int d = geometry.dim();
  double pooled = 0.0;
  for (int c = 0; c < d; ++c) {
    auto col = geometry.coords.col(c).array();
    double mean = col.mean();
    pooled += (col - mean).square().sum() / static_cast<double>(std::max<Eigen::Index>(n - 1, 1));
  }
  double spread = std::sqrt(pooled / d);
  if (!(spread > 0.0) || !std::isfinite(spread))
    throw numerical_error("bad-grid", "smoothing coordinates have zero spread");
  double pilot = spread * std::pow(static_cast<double>(n), -1.0 / (d + 4.0));
  return geometric_grid(0.25 * pilot, 4.0 * pilot, count);
}

CvResult
cv_bandwidth(const SmoothingGeometry& geometry,
             const Eigen::VectorXd& sq_residuals,
             const KernelSpec& kernel,
             const std::vector<double>& grid)
{
  require_kernel_matches(geometry, kernel);
  if (grid.empty())
    throw input_error("bad-grid", "bandwidth grid is empty");
  for (double h : grid)
    if (!(h > 0.0) || !std::isfinite(h))
      throw input_error("bad-grid", "bandwidth grid entries must be positive and finite");

  const auto n = geometry.size();
  const int d = geometry.dim();
  const Eigen::MatrixXd zt = geometry.coords.transpose();

  // Upper-triangle pairwise squared distances, row-major over i < j.
  std::vector<double> dist;
  dist.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      dist.push_back(squared_distance(zt.col(i).data(), zt.col(j).data(), d));

  CvResult result;
  result.grid = grid;
  result.scores.resize(grid.size());
  result.valid_fraction.resize(grid.size());

  std::vector<double> mass(static_cast<std::size_t>(n));
  std::vector<double> acc(static_cast<std::size_t>(n));
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const double inv_h2 = 1.0 / (grid[g] * grid[g]);
    std::fill(mass.begin(), mass.end(), 0.0);
    std::fill(acc.begin(), acc.end(), 0.0);
    std::size_t pos = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j, ++pos) {
        double u2 = dist[pos] * inv_h2;
        if (u2 >= 1.0)
          continue;
        double k = kernel.from_squared_norm(u2);
        mass[static_cast<std::size_t>(i)] += k;
        acc[static_cast<std::size_t>(i)] += k * sq_residuals[j];
        mass[static_cast<std::size_t>(j)] += k;
        acc[static_cast<std::size_t>(j)] += k * sq_residuals[i];
      }
    }
    double total = 0.0;
    Eigen::Index evaluable = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      double m = mass[static_cast<std::size_t>(i)];
      if (!(m > 0.0))
        continue;
      double diff = sq_residuals[i] - acc[static_cast<std::size_t>(i)] / m;
      total += diff * diff;
      ++evaluable;
    }
    result.valid_fraction[g] = static_cast<double>(evaluable) / static_cast<double>(n);
    result.scores[g] = evaluable > 0 ? total / static_cast<double>(evaluable)
                                     : std::numeric_limits<double>::infinity();
  }

  bool found = false;
  double best_score = 0.0;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    if (result.valid_fraction[g] < kMinValidFraction)
      continue;
    double s = result.scores[g];
    if (!found || s < best_score || (s == best_score && grid[g] < result.h_cv)) {
      found = true;
      best_score = s;
      result.h_cv = grid[g];
    }
  }
  if (!found) {
    throw numerical_error("bandwidth-grid",
                          "no bandwidth candidate has enough evaluable leave-one-out terms; "
                          "widen the grid toward larger bandwidths");
  }
  return result;
}

CvResult
cv_bandwidth(const Dataset& data,
             const FirstStepFit& fs,
             const KernelSpec& kernel,
             SmoothingMode mode,
             const std::vector<double>& grid,
             double epsilon)
{
  auto geometry = make_geometry(data, fs, mode, epsilon);
  return cv_bandwidth(geometry, fs.residuals.array().square().matrix(), kernel, grid);
}

} // namespace awr
