#include "bellbox/spacetime.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "bellbox/rng.hpp"

namespace bellbox {

namespace {

constexpr double kConeTol = 1e-12;
constexpr double kVerdictTol = 1e-9;  // binary verdict / witness slack threshold

void check_dims(const Event& e, const Event& f) {
  if (e.dim() != f.dim()) throw std::invalid_argument("event dimension mismatch");
}

double spatial_dist(const Event& e, const Event& f) {
  double s = 0.0;
  for (int k = 0; k < e.dim(); ++k) {
    const double d = e.x[k] - f.x[k];
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace

IntervalClass interval_class(const Event& e, const Event& f) {
  check_dims(e, f);
  const double dt = e.t - f.t;
  const double dx = spatial_dist(e, f);
  const double q = dt * dt - dx * dx;
  if (std::fabs(q) <= kConeTol) return IntervalClass::Lightlike;
  return q > 0.0 ? IntervalClass::Timelike : IntervalClass::Spacelike;
}

bool in_forward_cone(const Event& apex, const Event& p) {
  check_dims(apex, p);
  return p.t - apex.t >= spatial_dist(p, apex) - kConeTol;
}

double cone_slack(const Event& j, const Event& p) {
  check_dims(j, p);
  return (p.t - j.t) - spatial_dist(p, j);
}

Event overlap_earliest(const Event& a, const Event& b) {
  check_dims(a, b);
  const double len = spatial_dist(a, b);
  if (a.t - b.t >= len) return a;  // a already in cone(b)
  if (b.t - a.t >= len) return b;
  // Earliest common point sits on the spatial segment: with s the distance
  // from a along it, the two cone times t_a + s and t_b + (len - s) meet at
  // s = (t_b - t_a + len) / 2.
  const double s = 0.5 * (b.t - a.t + len);
  Event apex;
  apex.t = a.t + s;
  apex.x.resize(a.x.size());
  const double frac = s / len;
  for (int k = 0; k < a.dim(); ++k) apex.x[k] = a.x[k] + frac * (b.x[k] - a.x[k]);
  return apex;
}

Event overlap_apex_1d(const Event& a, const Event& b) {
  if (a.dim() != 1 || b.dim() != 1)
    throw std::invalid_argument("overlap_apex_1d requires one space dimension");
  return overlap_earliest(a, b);
}

namespace {

// ---------------------------------------------------------------------------
// d >= 2 feasibility search.
//
// The containment problem is invariant under spatial rotations that fix the
// span of {x_b - x_a, x_j - x_a}, so any violating point can be rotated into
// that span plus one orthogonal axis: at most 3 spatial coordinates matter
// regardless of the ambient dimension. For a spatial point x the cheapest
// overlap point above it is p = (max(t_a + |x-x_a|, t_b + |x-x_b|), x), so
// minimizing the slack of p over x sweeps the entire overlap region.
// ---------------------------------------------------------------------------

using Vec3 = std::array<double, 3>;

struct ReducedFrame {
  const JammingConfig* cfg;
  int m = 0;                            // reduced spatial dimension (1..3)
  std::array<std::vector<double>, 3> axes;  // orthonormal ambient directions
  Vec3 xi_b{}, xi_j{};                  // b and j relative to a, reduced coords
  double scale = 1.0;

  explicit ReducedFrame(const JammingConfig& config) : cfg(&config) {
    const int d = config.dim();
    const auto& xa = config.a.x;
    std::vector<double> v1(d), v2(d);
    for (int k = 0; k < d; ++k) {
      v1[k] = config.b.x[k] - xa[k];
      v2[k] = config.j.x[k] - xa[k];
    }
    int rank = 0;
    auto push_axis = [&](std::vector<double> v) {
      for (int r = 0; r < rank; ++r) {
        double dot = 0.0;
        for (int k = 0; k < d; ++k) dot += v[k] * axes[r][k];
        for (int k = 0; k < d; ++k) v[k] -= dot * axes[r][k];
      }
      double norm = 0.0;
      for (double c : v) norm += c * c;
      norm = std::sqrt(norm);
      if (norm < 1e-12) return false;
      for (double& c : v) c /= norm;
      axes[rank++] = std::move(v);
      return true;
    };
    push_axis(v1);
    push_axis(v2);
    if (rank < 3 && d > rank) {
      // one direction orthogonal to the span; pick the coordinate axis with
      // the largest residual
      std::vector<double> best;
      double best_norm = 0.0;
      for (int c = 0; c < d; ++c) {
        std::vector<double> e(d, 0.0);
        e[c] = 1.0;
        for (int r = 0; r < rank; ++r) {
          double dot = axes[r][c];
          for (int k = 0; k < d; ++k) e[k] -= dot * axes[r][k];
        }
        double norm = 0.0;
        for (double cc : e) norm += cc * cc;
        if (norm > best_norm) {
          best_norm = norm;
          best = std::move(e);
        }
      }
      if (best_norm > 1e-20) push_axis(std::move(best));
    }
    m = std::max(rank, 1);
    for (int r = 0; r < rank; ++r) {
      for (int k = 0; k < d; ++k) {
        xi_b[r] += v1[k] * axes[r][k];
        xi_j[r] += v2[k] * axes[r][k];
      }
    }
    scale = 1.0 + std::max({std::fabs(config.a.t), std::fabs(config.b.t),
                            std::fabs(config.j.t), norm3(xi_b), norm3(xi_j)});
  }

  static double norm3(const Vec3& v) {
    return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  }

  static double dist3(const Vec3& u, const Vec3& v, int m) {
    double s = 0.0;
    for (int k = 0; k < m; ++k) {
      const double d = u[k] - v[k];
      s += d * d;
    }
    return std::sqrt(s);
  }

  // slack of the cheapest overlap point above reduced spatial coordinates xi
  double g(const Vec3& xi) const {
    const Vec3 zero{};
    const double da = dist3(xi, zero, m);
    const double db = dist3(xi, xi_b, m);
    const double t_cone = std::max(cfg->a.t + da, cfg->b.t + db);
    return (t_cone - cfg->j.t) - dist3(xi, xi_j, m);
  }

  // slack limit along spatial ray xi = r*u as r -> infinity
  double asymptotic(const Vec3& u) const {
    double dot_b = 0.0, dot_j = 0.0;
    for (int k = 0; k < m; ++k) {
      dot_b += xi_b[k] * u[k];
      dot_j += xi_j[k] * u[k];
    }
    return std::max(cfg->a.t, cfg->b.t - dot_b) - cfg->j.t + dot_j;
  }

  Event ambient_point(const Vec3& xi) const {
    const int d = cfg->dim();
    Event p;
    p.x.resize(d);
    for (int k = 0; k < d; ++k) {
      double c = cfg->a.x[k];
      for (int r = 0; r < m && r < static_cast<int>(axes.size()); ++r)
        if (!axes[r].empty()) c += xi[r] * axes[r][k];
      p.x[k] = c;
    }
    p.t = std::max(cfg->a.t + spatial_dist(p, cfg->a), cfg->b.t + spatial_dist(p, cfg->b));
    return p;
  }
};

std::vector<Vec3> sweep_directions(int m) {
  std::vector<Vec3> dirs;
  if (m == 1) {
    dirs.push_back({1.0, 0.0, 0.0});
    dirs.push_back({-1.0, 0.0, 0.0});
    return dirs;
  }
  if (m == 2) {
    const int n = 256;
    for (int i = 0; i < n; ++i) {
      const double phi = 2.0 * std::numbers::pi * i / n;
      dirs.push_back({std::cos(phi), std::sin(phi), 0.0});
    }
    return dirs;
  }
  // Fibonacci sphere
  const int n = 512;
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - 2.0 * (i + 0.5) / n;
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * i;
    dirs.push_back({rho * std::cos(phi), rho * std::sin(phi), z});
  }
  return dirs;
}

// Transverse escape directions: orthogonal to the a-b axis. When the
// jammer is later than both measurements these rays always leave its cone.
void add_informed_directions(int m, std::vector<Vec3>& dirs) {
  if (m >= 2) {
    dirs.push_back({0.0, 1.0, 0.0});
    dirs.push_back({0.0, -1.0, 0.0});
  }
  if (m >= 3) {
    dirs.push_back({0.0, 0.0, 1.0});
    dirs.push_back({0.0, 0.0, -1.0});
  }
}

// The asymptotic slack is a max of two linear functionals of u, so its
// minima often sit on the branch-crossing kink t_a = t_b - xi_b . u, where
// the negative window can be much narrower than the sweep spacing. The
// first axis is aligned with xi_b, so the kink set is u[0] = (t_b - t_a)/L.
void add_kink_directions(const ReducedFrame& frame, std::vector<Vec3>& dirs) {
  const double len = frame.xi_b[0];
  if (frame.m < 2 || len < 1e-12) return;
  const double c = (frame.cfg->b.t - frame.cfg->a.t) / len;
  if (std::fabs(c) >= 1.0) return;  // branches never cross on the sphere
  const double s = std::sqrt(1.0 - c * c);
  if (frame.m == 2) {
    dirs.push_back({c, s, 0.0});
    dirs.push_back({c, -s, 0.0});
    return;
  }
  const int n = 256;
  for (int i = 0; i < n; ++i) {
    const double phi = 2.0 * std::numbers::pi * i / n;
    dirs.push_back({c, s * std::cos(phi), s * std::sin(phi)});
  }
}

Vec3 normalized(Vec3 v) {
  const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  for (double& c : v) c /= n;
  return v;
}

// Local descent of the asymptotic slack over the direction sphere: tangent
// perturbations with step halving. Handles the kink minima exactly because
// the step keeps shrinking across the nonsmooth crossing.
Vec3 polish_direction(const ReducedFrame& frame, Vec3 u, double step) {
  if (frame.m < 2) return u;
  double fu = frame.asymptotic(u);
  while (step > 1e-12) {
    std::array<Vec3, 2> tangents{};
    tangents[0] = std::fabs(u[0]) + std::fabs(u[1]) > 1e-9
                      ? normalized({-u[1], u[0], 0.0})
                      : Vec3{1.0, 0.0, 0.0};
    if (frame.m == 3) {
      // completes the tangent frame; u x t0
      tangents[1] = normalized({u[1] * tangents[0][2] - u[2] * tangents[0][1],
                                u[2] * tangents[0][0] - u[0] * tangents[0][2],
                                u[0] * tangents[0][1] - u[1] * tangents[0][0]});
    }
    bool improved = false;
    const int n_tangents = frame.m - 1;
    for (int k = 0; k < n_tangents; ++k) {
      for (double sgn : {1.0, -1.0}) {
        Vec3 cand{u[0] + sgn * step * tangents[k][0], u[1] + sgn * step * tangents[k][1],
                  u[2] + sgn * step * tangents[k][2]};
        cand = normalized(cand);
        const double fc = frame.asymptotic(cand);
        if (fc < fu) {
          fu = fc;
          u = cand;
          improved = true;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return u;
}

std::optional<Event> witness_along_ray(const ReducedFrame& frame, const Vec3& u) {
  const JammingConfig& cfg = *frame.cfg;
  for (double r = 4.0 * frame.scale; r < 5e7 * frame.scale; r *= 4.0) {
    const Vec3 xi{r * u[0], r * u[1], r * u[2]};
    Event p = frame.ambient_point(xi);
    if (cone_slack(cfg.j, p) < -kVerdictTol && in_forward_cone(cfg.a, p) &&
        in_forward_cone(cfg.b, p))
      return p;
  }
  return std::nullopt;
}

Vec3 compass_min(const ReducedFrame& frame, Vec3 x, double step, double min_step,
                 int max_evals) {
  double fx = frame.g(x);
  int evals = 0;
  while (step > min_step && evals < max_evals) {
    bool improved = false;
    for (int k = 0; k < frame.m; ++k) {
      for (double s : {step, -step}) {
        Vec3 cand = x;
        cand[k] += s;
        const double fc = frame.g(cand);
        ++evals;
        if (fc < fx) {
          fx = fc;
          x = cand;
          improved = true;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return x;
}

ConfigVerdict binary_condition_1d(const JammingConfig& config) {
  ConfigVerdict verdict;
  const Event apex = overlap_earliest(config.a, config.b);
  // In 1+1 dimensions the overlap IS the forward cone of its apex, and the
  // apex minimizes the slack over that cone, so one point decides.
  const double slack = cone_slack(config.j, apex);
  verdict.min_slack = slack;
  verdict.binary_ok = slack >= -kVerdictTol;
  verdict.binary_exact = true;
  if (!verdict.binary_ok) verdict.witness = apex;
  return verdict;
}

ConfigVerdict binary_condition_nd(const JammingConfig& config, int search_budget) {
  ConfigVerdict verdict;
  verdict.binary_exact = false;
  const ReducedFrame frame(config);

  auto accept = [&](const Event& p) {
    verdict.binary_ok = false;
    verdict.binary_exact = true;  // violation re-verified exactly
    verdict.witness = p;
    verdict.min_slack = cone_slack(config.j, p);
  };

  // Stage 1: asymptotic escape rays. Sweep, keep the best few candidates,
  // then descend each on the sphere (kink minima are narrow).
  auto dirs = sweep_directions(frame.m);
  add_informed_directions(frame.m, dirs);
  add_kink_directions(frame, dirs);
  constexpr int kKeep = 8;
  std::vector<std::pair<double, Vec3>> ranked;
  ranked.reserve(dirs.size());
  for (const Vec3& u : dirs) ranked.emplace_back(frame.asymptotic(u), u);
  std::partial_sort(ranked.begin(),
                    ranked.begin() + std::min<std::size_t>(kKeep, ranked.size()),
                    ranked.end(),
                    [](const auto& x, const auto& y) { return x.first < y.first; });

  Vec3 best_dir = ranked.front().second;
  double best_asym = ranked.front().first;
  for (std::size_t i = 0; i < std::min<std::size_t>(kKeep, ranked.size()); ++i) {
    const Vec3 u = polish_direction(frame, ranked[i].second, 0.05);
    const double v = frame.asymptotic(u);
    if (v < best_asym) {
      best_asym = v;
      best_dir = u;
    }
  }
  if (best_asym < -1e-9) {
    if (auto w = witness_along_ray(frame, best_dir)) {
      accept(*w);
      return verdict;
    }
  }

  // Stage 2: multi-start descent over the reduced coordinates.
  const double w = 4.0 * frame.scale;
  std::vector<Vec3> starts;
  starts.push_back({});                      // Alice's position
  starts.push_back(frame.xi_b);              // Bob's
  starts.push_back(frame.xi_j);              // jammer's
  starts.push_back({0.5 * frame.xi_b[0], 0.5 * frame.xi_b[1], 0.5 * frame.xi_b[2]});
  const int grid_n = frame.m == 1 ? 64 : (frame.m == 2 ? 16 : 8);
  Vec3 grid_best{};
  double grid_best_val = frame.g(grid_best);
  const int gy = frame.m >= 2 ? grid_n : 1;
  const int gz = frame.m >= 3 ? grid_n : 1;
  for (int i = 0; i < grid_n; ++i)
    for (int jj = 0; jj < gy; ++jj)
      for (int k = 0; k < gz; ++k) {
        const Vec3 xi{-w + 2.0 * w * (i + 0.5) / grid_n,
                      gy > 1 ? -w + 2.0 * w * (jj + 0.5) / gy : 0.0,
                      gz > 1 ? -w + 2.0 * w * (k + 0.5) / gz : 0.0};
        const double v = frame.g(xi);
        if (v < grid_best_val) {
          grid_best_val = v;
          grid_best = xi;
        }
      }
  starts.push_back(grid_best);
  RandomStream rng = RandomStream::derive(0x5B1A57u, 0);
  while (static_cast<int>(starts.size()) < std::max(search_budget, 5))
    starts.push_back({rng.next_in(-w, w), frame.m >= 2 ? rng.next_in(-w, w) : 0.0,
                      frame.m >= 3 ? rng.next_in(-w, w) : 0.0});

  double min_found = grid_best_val;
  for (const Vec3& s : starts) {
    const Vec3 x = compass_min(frame, s, 0.5 * frame.scale, 1e-10 * frame.scale, 600);
    const double v = frame.g(x);
    min_found = std::min(min_found, v);
    if (v < -kVerdictTol) {
      Event p = frame.ambient_point(x);
      if (cone_slack(config.j, p) < -kVerdictTol && in_forward_cone(config.a, p) &&
          in_forward_cone(config.b, p)) {
        accept(p);
        return verdict;
      }
    }
  }

  verdict.binary_ok = true;  // no violation found within budget
  verdict.min_slack = min_found;
  return verdict;
}

}  // namespace

ConfigVerdict binary_condition(const JammingConfig& config, int search_budget) {
  if (search_budget < 1) throw std::invalid_argument("search_budget must be >= 1");
  if (config.a.dim() != config.b.dim() || config.a.dim() != config.j.dim())
    throw std::invalid_argument("config events must share dimension");
  if (config.a == config.b) throw std::invalid_argument("a and b must be distinct events");

  ConfigVerdict verdict = config.dim() == 1 ? binary_condition_1d(config)
                                            : binary_condition_nd(config, search_budget);
  verdict.premises_ok = interval_class(config.a, config.b) == IntervalClass::Spacelike &&
                        interval_class(config.a, config.j) == IntervalClass::Spacelike &&
                        interval_class(config.b, config.j) == IntervalClass::Spacelike;
  verdict.reversal = config.j.t > config.a.t && config.j.t > config.b.t;
  return verdict;
}

ConfigVerdict config_verdict(const JammingConfig& config, int search_budget) {
  return binary_condition(config, search_budget);
}

CausalGraph causal_loop_check(std::span<const JammingConfig> configs) {
  CausalGraph graph;
  if (configs.empty()) return graph;

  const int d = configs.front().dim();
  for (const auto& cfg : configs) {
    if (cfg.dim() != d) throw std::invalid_argument("configs must share dimension");
    const bool premises =
        interval_class(cfg.a, cfg.b) == IntervalClass::Spacelike &&
        interval_class(cfg.a, cfg.j) == IntervalClass::Spacelike &&
        interval_class(cfg.b, cfg.j) == IntervalClass::Spacelike;
    if (!premises)
      throw std::invalid_argument("config fails spacelike premises; loop check undefined");
  }

  for (std::size_t i = 0; i < configs.size(); ++i) {
    const int ci = static_cast<int>(i);
    graph.nodes.push_back({ci, 'a', configs[i].a});
    graph.nodes.push_back({ci, 'b', configs[i].b});
    graph.nodes.push_back({ci, 'j', configs[i].j});
    graph.nodes.push_back({ci, 'm', overlap_earliest(configs[i].a, configs[i].b)});
  }

  const int n = static_cast<int>(graph.nodes.size());
  std::vector<std::vector<int>> adj(n);
  auto add_edge = [&](int u, int v, CausalGraph::EdgeKind kind) {
    for (auto& e : graph.edges) {
      if (e.from == u && e.to == v) {
        if (e.kind != kind) e.kind = CausalGraph::EdgeKind::Both;
        return;
      }
    }
    graph.edges.push_back({u, v, kind});
    adj[u].push_back(v);
  };

  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v)
      if (u != v && in_forward_cone(graph.nodes[u].event, graph.nodes[v].event))
        add_edge(u, v, CausalGraph::EdgeKind::Causal);
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const int j_node = static_cast<int>(4 * i + 2);
    const int m_node = static_cast<int>(4 * i + 3);
    add_edge(j_node, m_node, CausalGraph::EdgeKind::Jamming);
  }

  // iterative DFS, three colors; a back edge closes a cycle
  std::vector<int> color(n, 0), parent(n, -1);
  for (int root = 0; root < n && graph.acyclic; ++root) {
    if (color[root] != 0) continue;
    std::vector<std::pair<int, std::size_t>> stack{{root, 0}};
    color[root] = 1;
    while (!stack.empty() && graph.acyclic) {
      auto& [u, next] = stack.back();
      if (next < adj[u].size()) {
        const int v = adj[u][next++];
        if (color[v] == 0) {
          color[v] = 1;
          parent[v] = u;
          stack.emplace_back(v, 0);
        } else if (color[v] == 1) {
          graph.acyclic = false;
          graph.cycle.clear();
          for (int w = u; w != v && w != -1; w = parent[w]) graph.cycle.push_back(w);
          graph.cycle.push_back(v);
          std::reverse(graph.cycle.begin(), graph.cycle.end());
        }
      } else {
        color[u] = 2;
        stack.pop_back();
      }
    }
  }
  return graph;
}

Event boost_1d(const Event& e, double v) {
  if (e.dim() != 1) throw std::invalid_argument("boost_1d requires one space dimension");
  if (!(std::fabs(v) < 1.0)) throw std::invalid_argument("|v| must be < 1");
  const double gamma = 1.0 / std::sqrt(1.0 - v * v);
  return {gamma * (e.t - v * e.x[0]), {gamma * (e.x[0] - v * e.t)}};
}

}  // namespace bellbox
