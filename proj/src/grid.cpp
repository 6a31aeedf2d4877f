#include "hheat/grid.hpp"

#include <algorithm>
#include <cmath>

namespace hheat {

GridField sample_potential(const GridSpec& spec, const PotentialSpec& pot, PotentialSampling mode,
                           double avg_radius, int subdiv) {
  pot.validate();
  GridField out(spec);
  const int dim = spec.dim();
  std::vector<double> c(dim);
  std::vector<double> z(2 * spec.N);
  for (std::int64_t f = 0; f < spec.size(); ++f) {
    spec.node_coords(f, c);
    std::copy(c.begin(), c.end() - 1, z.begin());
    const GroupPoint w(z, c.back());
    double v;
    if (mode == PotentialSampling::CellAverage && gauge(w) <= avg_radius) {
      // midpoint average over a subdiv^dim refinement of the cell
      double sum = 0;
      std::vector<int> si(dim, 0);
      std::vector<double> sc(dim);
      bool done = false;
      while (!done) {
        for (int a = 0; a < dim; ++a)
          sc[a] = c[a] + spec.spacing(a) * ((si[a] + 0.5) / subdiv - 0.5);
        std::vector<double> sz(sc.begin(), sc.end() - 1);
        sum += potential(pot, GroupPoint(sz, sc.back()));
        int a = 0;
        while (a < dim) {
          if (++si[a] < subdiv) break;
          si[a++] = 0;
        }
        done = (a == dim);
      }
      v = sum / std::pow(double(subdiv), dim);
    } else {
      v = potential(pot, w);
    }
    out.values[f] = v;
  }
  return out;
}

GridField bump_initial_data(const GridSpec& spec, double radius) {
  if (!(radius > 0)) throw std::invalid_argument("bump_initial_data: radius > 0");
  GridField out(spec);
  for (std::int64_t f = 0; f < spec.size(); ++f) {
    const double q = spec.node_gauge(f) / radius;
    out.values[f] = (q < 1.0) ? std::exp(1.0 - 1.0 / (1.0 - q * q)) : 0.0;
  }
  const double m = out.mass();
  if (m <= 0) throw std::invalid_argument("bump_initial_data: bump not resolved by grid");
  for (double& v : out.values) v /= m;
  return out;
}

GridField delta_initial_data(const GridSpec& spec) {
  GridField out(spec);
  // deterministic: among the cells nearest the origin take the smallest flat index
  std::int64_t best = -1;
  double best_gauge = 0;
  for (std::int64_t f : origin_cells(spec)) {
    const double g = spec.node_gauge(f);
    if (best < 0 || g < best_gauge - 1e-15 ||
        (std::abs(g - best_gauge) <= 1e-15 && f < best)) {
      best = f;
      best_gauge = g;
    }
  }
  out.values[best] = 1.0 / spec.cell_volume();
  return out;
}

GridField gauge_weight_field(const GridSpec& spec, double alpha) {
  GridField out(spec);
  for (std::int64_t f = 0; f < spec.size(); ++f)
    out.values[f] = std::pow(spec.node_gauge(f), -alpha);
  for (std::int64_t f : origin_cells(spec)) out.values[f] = 0.0;
  return out;
}

double weighted_sum(const GridField& u, const GridField& w) {
  if (!u.spec.same_layout(w.spec)) throw std::invalid_argument("weighted_sum: layout mismatch");
  double s = 0;
  for (std::size_t i = 0; i < u.values.size(); ++i) s += u.values[i] * w.values[i];
  return s * u.spec.cell_volume();
}

}  // namespace hheat
