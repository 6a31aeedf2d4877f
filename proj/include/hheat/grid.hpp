#ifndef HHEAT_GRID_HPP
#define HHEAT_GRID_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "hheat/group.hpp"
#include "hheat/potential.hpp"

namespace hheat {

// Cell-centered tensor grid over a box in R^{2N+1}. Axes are ordered
// [x_1..x_N, y_1..y_N, l]; the flat index runs row-major with l fastest.
struct GridSpec {
  int N = 1;
  std::vector<double> lo, hi;  // per axis, size 2N+1
  std::vector<int> cells;      // per axis

  static GridSpec box(int N, double z_halfwidth, double l_halfwidth, int z_cells, int l_cells) {
    GridSpec s;
    s.N = N;
    const int dim = 2 * N + 1;
    s.lo.assign(dim, -z_halfwidth);
    s.hi.assign(dim, z_halfwidth);
    s.cells.assign(dim, z_cells);
    s.lo[dim - 1] = -l_halfwidth;
    s.hi[dim - 1] = l_halfwidth;
    s.cells[dim - 1] = l_cells;
    s.validate();
    return s;
  }

  int dim() const { return 2 * N + 1; }
  int l_axis() const { return dim() - 1; }

  void validate() const {
    if (N < 1) throw std::invalid_argument("GridSpec: N >= 1");
    const int d = dim();
    if (int(lo.size()) != d || int(hi.size()) != d || int(cells.size()) != d)
      throw std::invalid_argument("GridSpec: axis arrays must have size 2N+1");
    double z_extent = 0;
    for (int a = 0; a < d; ++a) {
      if (!(hi[a] > lo[a]) || cells[a] < 2)
        throw std::invalid_argument("GridSpec: empty axis or fewer than 2 cells");
      if (!(lo[a] < 0 && hi[a] > 0))
        throw std::invalid_argument("GridSpec: origin must lie strictly inside the box");
      if (a < d - 1) z_extent = std::max(z_extent, hi[a] - lo[a]);
    }
    // The l-extent must resolve the anisotropic scaling l ~ |z|^2.
    if (hi[d - 1] - lo[d - 1] < 0.5 * z_extent * z_extent - 1e-12)
      throw std::invalid_argument("GridSpec: l-extent below (z-extent)^2 / 2");
  }

  double spacing(int axis) const { return (hi[axis] - lo[axis]) / cells[axis]; }
  double coord(int axis, int i) const { return lo[axis] + (i + 0.5) * spacing(axis); }

  std::int64_t size() const {
    std::int64_t n = 1;
    for (int c : cells) n *= c;
    return n;
  }

  double cell_volume() const {
    double v = 1;
    for (int a = 0; a < dim(); ++a) v *= spacing(a);
    return v;
  }

  // Row-major flat index, l fastest.
  std::int64_t flat(const std::vector<int>& idx) const {
    std::int64_t f = 0;
    for (int a = 0; a < dim(); ++a) f = f * cells[a] + idx[a];
    return f;
  }

  std::vector<int> unflatten(std::int64_t f) const {
    std::vector<int> idx(dim());
    for (int a = dim() - 1; a >= 0; --a) {
      idx[a] = int(f % cells[a]);
      f /= cells[a];
    }
    return idx;
  }

  void node_coords(std::int64_t f, std::vector<double>& out) const {
    out.resize(dim());
    for (int a = dim() - 1; a >= 0; --a) {
      out[a] = coord(a, int(f % cells[a]));
      f /= cells[a];
    }
  }

  GroupPoint node_point(std::int64_t f) const {
    std::vector<double> c;
    node_coords(f, c);
    const double l = c.back();
    c.pop_back();
    return GroupPoint(std::move(c), l);
  }

  double node_gauge(std::int64_t f) const {
    std::vector<double> c;
    node_coords(f, c);
    double zz = 0;
    for (int a = 0; a + 1 < dim(); ++a) zz += c[a] * c[a];
    return gauge_from_parts(zz, c.back());
  }

  // Nearest node to a point; throws if the point lies outside the box.
  std::int64_t nearest_node(const GroupPoint& w) const {
    if (w.index() != N) throw std::invalid_argument("GridSpec: point dimension mismatch");
    std::vector<int> idx(dim());
    for (int a = 0; a < dim(); ++a) {
      const double c = (a < dim() - 1) ? w.z()[a] : w.l();
      if (c < lo[a] || c > hi[a]) throw std::invalid_argument("GridSpec: point outside box");
      int i = int(std::floor((c - lo[a]) / spacing(a)));
      idx[a] = std::min(std::max(i, 0), cells[a] - 1);
    }
    return flat(idx);
  }

  // Distance of a node to the box boundary, in cells (minimum over axes).
  int boundary_distance_cells(std::int64_t f) const {
    const auto idx = unflatten(f);
    int d = cells[0];
    for (int a = 0; a < dim(); ++a) d = std::min({d, idx[a], cells[a] - 1 - idx[a]});
    return d;
  }

  bool same_layout(const GridSpec& o) const {
    return N == o.N && lo == o.lo && hi == o.hi && cells == o.cells;
  }
};

// Scalar field sampled at the grid nodes.
struct GridField {
  GridSpec spec;
  std::vector<double> values;
  double time_tag = 0;

  GridField() = default;
  explicit GridField(const GridSpec& s, double fill = 0.0, double t = 0.0)
      : spec(s), values(std::size_t(s.size()), fill), time_tag(t) {}

  double mass() const {
    double m = 0;
    for (double v : values) m += v;
    return m * spec.cell_volume();
  }

  double sup_norm() const {
    double m = 0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
  }

  double min_value() const {
    double m = values.empty() ? 0 : values[0];
    for (double v : values) m = std::min(m, v);
    return m;
  }

  bool all_finite() const {
    for (double v : values)
      if (!std::isfinite(v)) return false;
    return true;
  }
};

// Flags for the cells whose closed box contains the origin; these are excluded
// from singular-weight quadratures.
inline std::vector<std::int64_t> origin_cells(const GridSpec& spec) {
  std::vector<std::int64_t> out;
  std::vector<int> idx(spec.dim());
  // Per axis, nodes with |coord| <= spacing/2 (one or two of them).
  std::vector<std::vector<int>> cand(spec.dim());
  for (int a = 0; a < spec.dim(); ++a) {
    const double h = spec.spacing(a);
    for (int i = 0; i < spec.cells[a]; ++i)
      if (std::abs(spec.coord(a, i)) <= 0.5 * h + 1e-12 * h) cand[a].push_back(i);
    if (cand[a].empty()) throw std::logic_error("origin_cells: origin not inside grid");
  }
  std::vector<int> pick(spec.dim(), 0);
  bool done = false;
  while (!done) {
    for (int a = 0; a < spec.dim(); ++a) idx[a] = cand[a][pick[a]];
    out.push_back(spec.flat(idx));
    int a = 0;
    while (a < spec.dim()) {
      if (++pick[a] < int(cand[a].size())) break;
      pick[a++] = 0;
    }
    done = (a == spec.dim());
  }
  return out;
}

enum class PotentialSampling { Center, CellAverage };

// Sample a potential on the grid. With CellAverage, cells whose center lies
// within gauge radius `avg_radius` get a subdivided midpoint average, which
// resolves the near-singular mass that a center value misses.
GridField sample_potential(const GridSpec& spec, const PotentialSpec& pot, PotentialSampling mode,
                           double avg_radius = 0.5, int subdiv = 5);

// Smooth compactly supported bump exp(1 - 1/(1-q^2)), q = d(w)/radius,
// normalized to unit discrete mass.
GridField bump_initial_data(const GridSpec& spec, double radius);

// Discrete delta: 1/cell_volume at the node nearest the origin.
GridField delta_initial_data(const GridSpec& spec);

// Weight field d^-alpha with the origin cells zeroed out.
GridField gauge_weight_field(const GridSpec& spec, double alpha);

// sum_i u_i w_i * cell_volume.
double weighted_sum(const GridField& u, const GridField& w);

}  // namespace hheat

#endif  // HHEAT_GRID_HPP
