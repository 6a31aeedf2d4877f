#ifndef HHEAT_POTENTIAL_HPP
#define HHEAT_POTENTIAL_HPP

#include <cmath>
#include <functional>
#include <limits>

#include "hheat/group.hpp"

namespace hheat {

// Description of a potential: Hardy coefficient, gauge-ball localization,
// truncation level, optional bounded perturbation.
struct PotentialSpec {
  double c = 1.0;  // Hardy coefficient, >= 0
  // Radius of the gauge ball outside which the Hardy part is zero; infinity
  // means no localization.
  double localization_radius = std::numeric_limits<double>::infinity();
  // Truncation level n of V_n = min(V, n); infinity means untruncated.
  double truncation = std::numeric_limits<double>::infinity();
  // Optional bounded perturbation B added after clipping.
  std::function<double(const GroupPoint&)> bounded_part;

  void validate() const {
    if (c < 0) throw std::invalid_argument("PotentialSpec: c must be >= 0");
    if (!(localization_radius > 0))
      throw std::invalid_argument("PotentialSpec: localization_radius must be > 0");
    if (!(truncation > 0)) throw std::invalid_argument("PotentialSpec: truncation must be > 0");
  }
};

// Untruncated, unlocalized Hardy density |z|^2 / (|z|^4 + l^2) from raw parts.
// At the origin the singular limit is +infinity.
inline double hardy_density_from_parts(double z_norm_sq, double l) {
  const double denom = z_norm_sq * z_norm_sq + l * l;
  if (denom == 0) return std::numeric_limits<double>::infinity();
  return z_norm_sq / denom;
}

inline double hardy_density(const GroupPoint& w) {
  return hardy_density_from_parts(w.z_norm_sq(), w.l());
}

// Full potential value: c * hardy density, localized to the gauge ball,
// clipped at the truncation level, plus the bounded part if present.
inline double potential(const PotentialSpec& spec, const GroupPoint& w) {
  spec.validate();
  double v = 0;
  if (std::isinf(spec.localization_radius) || gauge(w) <= spec.localization_radius)
    v = spec.c * hardy_density(w);
  v = std::min(v, spec.truncation);
  if (spec.bounded_part) v += spec.bounded_part(w);
  return v;
}

}  // namespace hheat

#endif  // HHEAT_POTENTIAL_HPP
