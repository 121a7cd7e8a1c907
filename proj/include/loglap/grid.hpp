#pragma once

// 1-D bounded domains, uniform cell partitions and cell-wise constant
// fields with the exterior-zero convention (u = 0 on R \ Omega).

#include <Eigen/Dense>
#include <cmath>
#include <fstream>
#include <functional>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "loglap/errors.hpp"

namespace loglap {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

struct Interval {
  double left = 0.0;
  double right = 0.0;
  double diameter() const { return right - left; }
  bool contains(double x) const { return x >= left && x <= right; }
};

struct Grid {
  Interval interval;
  int n_cells = 0;
  double h = 0.0;                // cell width, (right-left)/n_cells
  std::vector<double> centers;   // centers[i] = left + (i + 1/2) h

  double cell_left(int i) const { return interval.left + i * h; }
  double cell_right(int i) const { return interval.left + (i + 1) * h; }
  Interval cell(int i) const { return {cell_left(i), cell_right(i)}; }
  // index of the cell containing x (interior points)
  int cell_index(double x) const {
    int i = static_cast<int>(std::floor((x - interval.left) / h));
    if (i < 0) i = 0;
    if (i >= n_cells) i = n_cells - 1;
    return i;
  }
};

using GridPtr = std::shared_ptr<const Grid>;

inline GridPtr build_grid(Interval interval, int n_cells) {
  if (!(interval.left < interval.right))
    throw config_error("build_grid: interval is degenerate (left >= right)");
  if (n_cells < 2) throw config_error("build_grid: need n_cells >= 2");
  auto g = std::make_shared<Grid>();
  g->interval = interval;
  g->n_cells = n_cells;
  g->h = interval.diameter() / n_cells;
  g->centers.resize(n_cells);
  for (int i = 0; i < n_cells; ++i)
    g->centers[i] = interval.left + (i + 0.5) * g->h;
  return g;
}

// distance to the boundary, delta(x) = min(x - left, right - x)
inline double boundary_distance(const Grid& grid, double x) {
  if (!grid.interval.contains(x))
    throw domain_error("boundary_distance: point outside the closure of Omega");
  return std::min(x - grid.interval.left, grid.interval.right - x);
}

// boundary gauge l(r) = -1 / ln(min(r, 1/10)); increasing on (0, 1/10],
// constant above the cap
inline double ell_gauge(double r) {
  if (!(r > 0.0)) throw domain_error("ell_gauge: r must be positive");
  return -1.0 / std::log(std::min(r, 0.1));
}

// Cell-wise constant real field on a grid (the discrete u).
struct GridFunction {
  GridPtr grid;
  Vector values;

  GridFunction() = default;
  GridFunction(GridPtr g, Vector v) : grid(std::move(g)), values(std::move(v)) {
    if (!grid || values.size() != grid->n_cells)
      throw dimension_error("GridFunction: value count does not match grid");
  }
  static GridFunction zero(GridPtr g) {
    return GridFunction(g, Vector::Zero(g->n_cells));
  }
  static GridFunction constant(GridPtr g, double c) {
    return GridFunction(g, Vector::Constant(g->n_cells, c));
  }

  int size() const { return grid ? grid->n_cells : 0; }
  double h() const { return grid->h; }

  double norm_l2_sq() const { return grid->h * values.squaredNorm(); }
  double norm_l2() const { return std::sqrt(norm_l2_sq()); }
  double norm_linf() const {
    return values.size() ? values.cwiseAbs().maxCoeff() : 0.0;
  }
  double norm_lq(double q) const {
    double acc = 0.0;
    for (int i = 0; i < values.size(); ++i)
      acc += std::pow(std::abs(values[i]), q);
    return std::pow(grid->h * acc, 1.0 / q);
  }
  // L2 inner product h * sum u_i v_i
  double dot_l2(const GridFunction& other) const {
    if (other.grid != grid)
      throw dimension_error("GridFunction::dot_l2: grid mismatch");
    return grid->h * values.dot(other.values);
  }
};

inline GridFunction sample(GridPtr g, const std::function<double(double)>& f) {
  Vector v(g->n_cells);
  for (int i = 0; i < g->n_cells; ++i) v[i] = f(g->centers[i]);
  return GridFunction(g, std::move(v));
}

// smooth bump supported on the interior, max 1 at the midpoint
inline GridFunction bump(GridPtr g) {
  const double mid = 0.5 * (g->interval.left + g->interval.right);
  const double half = 0.5 * g->interval.diameter();
  return sample(g, [&](double x) {
    const double xi = (x - mid) / half;
    if (std::abs(xi) >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - xi * xi));
  });
}

// ---- CSV serialization: header `x,value`, one row per cell center ----

inline std::string to_csv(const GridFunction& u) {
  std::ostringstream os;
  os.precision(17);
  os << "x,value\n";
  for (int i = 0; i < u.size(); ++i)
    os << u.grid->centers[i] << "," << u.values[i] << "\n";
  return os.str();
}

inline void write_csv(const GridFunction& u, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw io_error("write_csv: cannot open " + path);
  f << to_csv(u);
  if (!f) throw io_error("write_csv: write failed for " + path);
}

}  // namespace loglap
