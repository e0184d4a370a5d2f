#pragma once

// Random spacetime configurations and the independent feasibility oracle
// shared by the unit and acceptance suites. The oracle deliberately avoids
// the library's apex/containment code paths: it scans the overlap region on
// a refining grid with its own inline arithmetic.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "bellbox/rng.hpp"
#include "bellbox/spacetime.hpp"

namespace bellbox::testing {

inline bool spacelike_raw(const Event& e, const Event& f) {
  double dx2 = 0.0;
  for (int k = 0; k < e.dim(); ++k) {
    const double d = e.x[k] - f.x[k];
    dx2 += d * d;
  }
  const double dt = e.t - f.t;
  return dx2 - dt * dt > 1e-9;
}

inline Event random_event(RandomStream& rng, int dim, double box) {
  Event e;
  e.t = rng.next_in(-box, box);
  for (int k = 0; k < dim; ++k) e.x.push_back(rng.next_in(-box, box));
  return e;
}

/// Pairwise-spacelike config in a coordinate box.
inline JammingConfig random_spacelike_config(RandomStream& rng, int dim, double box) {
  while (true) {
    JammingConfig c{random_event(rng, dim, box), random_event(rng, dim, box),
                    random_event(rng, dim, box)};
    if (spacelike_raw(c.a, c.b) && spacelike_raw(c.a, c.j) && spacelike_raw(c.b, c.j))
      return c;
  }
}

/// Spacelike config with the jammer strictly later than both measurements.
inline JammingConfig random_late_jammer_config(RandomStream& rng, int dim, double box) {
  while (true) {
    JammingConfig c = random_spacelike_config(rng, dim, box);
    if (c.j.t > c.a.t + 0.01 && c.j.t > c.b.t + 0.01) return c;
  }
}

/// d = 1 config kept away from the verdict boundary so that a grid oracle
/// of finite resolution classifies it unambiguously.
inline JammingConfig random_margin_config_1d(RandomStream& rng, double box,
                                             double margin = 0.05) {
  while (true) {
    JammingConfig c = random_spacelike_config(rng, 1, box);
    const Event apex = overlap_earliest(c.a, c.b);
    if (std::fabs(cone_slack(c.j, apex)) > margin) return c;
  }
}

/// Feasibility oracle for d = 1: refining grid over the cone overlap,
/// violation iff some overlap point escapes the jammer's cone. Inline
/// arithmetic only.
inline bool binary_ok_grid_oracle_1d(const JammingConfig& c, int n = 48, int levels = 5) {
  const double ta = c.a.t, xa = c.a.x[0];
  const double tb = c.b.t, xb = c.b.x[0];
  const double tj = c.j.t, xj = c.j.x[0];

  auto slack_at = [&](double t, double x) {
    // only meaningful when (t, x) is in both forward cones
    return (t - tj) - std::fabs(x - xj);
  };
  auto in_overlap = [&](double t, double x) {
    return t - ta >= std::fabs(x - xa) && t - tb >= std::fabs(x - xb);
  };

  const double spread = std::fabs(xa - xb) + std::fabs(ta - tb) + std::fabs(tj) +
                        std::fabs(xj) + 1.0;
  double t_lo = std::min(ta, tb), t_hi = std::min(ta, tb) + 3.0 * spread;
  double x_lo = std::min({xa, xb, xj}) - 2.0 * spread;
  double x_hi = std::max({xa, xb, xj}) + 2.0 * spread;

  double best = std::numeric_limits<double>::infinity();
  double best_t = 0.0, best_x = 0.0;
  for (int level = 0; level < levels; ++level) {
    for (int i = 0; i <= n; ++i) {
      for (int k = 0; k <= n; ++k) {
        const double t = t_lo + (t_hi - t_lo) * i / n;
        const double x = x_lo + (x_hi - x_lo) * k / n;
        if (!in_overlap(t, x)) continue;
        const double s = slack_at(t, x);
        if (s < best) {
          best = s;
          best_t = t;
          best_x = x;
        }
      }
    }
    const double ht = 2.0 * (t_hi - t_lo) / n;
    const double hx = 2.0 * (x_hi - x_lo) / n;
    t_lo = best_t - ht;
    t_hi = best_t + ht;
    x_lo = best_x - hx;
    x_hi = best_x + hx;
  }
  return best >= 0.0;
}

/// Independent approximate slack minimum for planar configs: a dense sweep
/// of asymptotic escape directions plus a refining spatial grid. Only the
/// sign of a clearly negative result is meaningful; used one-sidedly (any
/// clear violation found here must also be found by binary_condition).
inline double approx_min_slack_2d(const JammingConfig& c) {
  const double ta = c.a.t, tb = c.b.t, tj = c.j.t;
  const double ax = c.a.x[0], ay = c.a.x[1];
  const double bx = c.b.x[0], by = c.b.x[1];
  const double jx = c.j.x[0], jy = c.j.x[1];

  double best = std::numeric_limits<double>::infinity();

  // slack limit along the spatial ray from a in direction u:
  // max(ta, tb - (xb - xa).u) - tj + (xj - xa).u
  for (int i = 0; i < 4096; ++i) {
    const double phi = 2.0 * 3.14159265358979324 * i / 4096;
    const double ux = std::cos(phi), uy = std::sin(phi);
    const double asym = std::max(ta, tb - ((bx - ax) * ux + (by - ay) * uy)) - tj +
                        (jx - ax) * ux + (jy - ay) * uy;
    best = std::min(best, asym);
  }

  // cheapest overlap point above each spatial grid location
  auto g = [&](double x, double y) {
    const double da = std::sqrt((x - ax) * (x - ax) + (y - ay) * (y - ay));
    const double db = std::sqrt((x - bx) * (x - bx) + (y - by) * (y - by));
    const double dj = std::sqrt((x - jx) * (x - jx) + (y - jy) * (y - jy));
    return std::max(ta + da, tb + db) - tj - dj;
  };
  double cx = (ax + bx + jx) / 3.0, cy = (ay + by + jy) / 3.0;
  double w = 6.0 * (1.0 + std::fabs(ta) + std::fabs(tb) + std::fabs(tj) +
                    std::fabs(ax - bx) + std::fabs(ay - by));
  for (int level = 0; level < 5; ++level) {
    double bx_best = cx, by_best = cy, fbest = g(cx, cy);
    const int n = 40;
    for (int i = 0; i <= n; ++i)
      for (int k = 0; k <= n; ++k) {
        const double x = cx - w + 2.0 * w * i / n;
        const double y = cy - w + 2.0 * w * k / n;
        const double v = g(x, y);
        if (v < fbest) {
          fbest = v;
          bx_best = x;
          by_best = y;
        }
      }
    best = std::min(best, fbest);
    cx = bx_best;
    cy = by_best;
    w = 4.0 * w / n;
  }
  return best;
}

/// d = 1 config that satisfies premises and the binary condition: the
/// jammer is placed in the causal past of the comparison region but kept
/// spacelike from both measurements.
inline JammingConfig random_valid_config_1d(RandomStream& rng, double box) {
  while (true) {
    JammingConfig c;
    c.a = random_event(rng, 1, box);
    c.b = random_event(rng, 1, box);
    if (!spacelike_raw(c.a, c.b)) continue;
    const Event apex = overlap_earliest(c.a, c.b);
    const double back = rng.next_in(0.1, 2.0);
    c.j = Event{apex.t - back, {apex.x[0] + rng.next_in(-back, back)}};
    if (!spacelike_raw(c.a, c.j) || !spacelike_raw(c.b, c.j)) continue;
    const ConfigVerdict v = config_verdict(c);
    if (v.premises_ok && v.binary_ok) return c;
  }
}

/// d >= 2 analogue: jammer slightly before both measurements, centered.
inline JammingConfig random_valid_config_nd(RandomStream& rng, int dim, double box) {
  while (true) {
    JammingConfig c;
    c.a = random_event(rng, dim, box);
    c.b = random_event(rng, dim, box);
    if (!spacelike_raw(c.a, c.b)) continue;
    c.j.t = std::min(c.a.t, c.b.t) - rng.next_in(0.05, 0.5);
    c.j.x.resize(dim);
    for (int k = 0; k < dim; ++k)
      c.j.x[k] = 0.5 * (c.a.x[k] + c.b.x[k]) + rng.next_in(-0.1, 0.1);
    if (!spacelike_raw(c.a, c.j) || !spacelike_raw(c.b, c.j)) continue;
    const ConfigVerdict v = config_verdict(c);
    if (v.premises_ok && v.binary_ok) return c;
  }
}

/// Ensemble whose members all pass premises and the binary condition,
/// spread apart so cross-config edges stay sparse but possible.
inline std::vector<JammingConfig> random_valid_ensemble(RandomStream& rng, int dim,
                                                        int max_configs) {
  const int count = 1 + static_cast<int>(rng.next_unit() * max_configs);
  std::vector<JammingConfig> configs;
  for (int i = 0; i < count; ++i) {
    JammingConfig c = dim == 1 ? random_valid_config_1d(rng, 2.0)
                               : random_valid_config_nd(rng, dim, 2.0);
    const double shift_t = rng.next_in(-4.0, 4.0);
    const double shift_x = rng.next_in(-6.0, 6.0);
    c.a.t += shift_t;
    c.b.t += shift_t;
    c.j.t += shift_t;
    for (Event* e : {&c.a, &c.b, &c.j}) e->x[0] += shift_x;
    configs.push_back(std::move(c));
  }
  return configs;
}

}  // namespace bellbox::testing
