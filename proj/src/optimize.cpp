#include "bellbox/optimize.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "bellbox/rng.hpp"
#include "bellbox/simplex.hpp"

namespace bellbox {

int DeterministicStrategy::index() const {
  auto bit = [](int v) { return v < 0 ? 1 : 0; };
  return bit(a) | bit(a_prime) << 1 | bit(b) << 2 | bit(b_prime) << 3;
}

std::array<DeterministicStrategy, 16> DeterministicStrategy::all() {
  std::array<DeterministicStrategy, 16> out;
  for (int i = 0; i < 16; ++i) {
    auto sgn = [i](int k) { return (i >> k) & 1 ? -1 : 1; };
    out[i] = {sgn(0), sgn(1), sgn(2), sgn(3)};
  }
  return out;
}

double NsBox::correlation(int x, int y) const {
  double e = 0.0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      e += (a == b ? 1.0 : -1.0) * prob(a, b, x, y);
  return e;
}

double NsBox::marginal_a(int a, int x, int y) const {
  return prob(a, 0, x, y) + prob(a, 1, x, y);
}

double NsBox::marginal_b(int b, int x, int y) const {
  return prob(0, b, x, y) + prob(1, b, x, y);
}

double NsBox::chsh() const {
  return correlation(0, 0) + correlation(0, 1) + correlation(1, 0) - correlation(1, 1);
}

NsBox NsBox::uniform() {
  NsBox box;
  box.p.fill(0.25);
  return box;
}

NsBox NsBox::from_strategy(const DeterministicStrategy& s) {
  NsBox box;
  const int ra[2] = {s.a, s.a_prime};
  const int rb[2] = {s.b, s.b_prime};
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      box.prob(ra[x] > 0 ? 0 : 1, rb[y] > 0 ? 0 : 1, x, y) = 1.0;
  return box;
}

OptimumReport lhv_max_chsh() {
  OptimumReport report;
  report.method = OptMethod::Enumeration;
  int max_v = -4, min_v = 4;
  for (const auto& s : DeterministicStrategy::all()) {
    const int v = s.chsh();
    if (v > max_v) {
      max_v = v;
      report.maximizers.clear();
    }
    if (v == max_v) report.maximizers.push_back(s);
    min_v = std::min(min_v, v);
    ++report.iterations;
  }
  report.value = max_v;
  report.min_value = min_v;
  report.strategy = report.maximizers.front();
  return report;
}

namespace {

// |CHSH| for the singlet with a' pinned at 0.
class SingletObjective {
 public:
  SingletObjective() : model_(CorrelationModel::quantum_singlet()) {}

  double operator()(const std::array<double, 3>& v) {
    ++evals_;
    return std::fabs(chsh_value(model_, quad(v)).value);
  }

  static SettingsQuad quad(const std::array<double, 3>& v) {
    return {.a = v[0], .a_prime = 0.0, .b = v[1], .b_prime = v[2]};
  }

  long long evals() const { return evals_; }

 private:
  CorrelationModel model_;
  long long evals_ = 0;
};

// Derivative-free compass polish: best coordinate step, halving on stall.
// Capped; at the cap the best point so far is returned.
std::array<double, 3> compass_polish(SingletObjective& obj, std::array<double, 3> x,
                                     double step, double min_step,
                                     long long max_evals = 100000) {
  double fx = obj(x);
  long long evals = 0;
  while (step > min_step && evals < max_evals) {
    bool improved = false;
    std::array<double, 3> best = x;
    double fbest = fx;
    for (int k = 0; k < 3; ++k) {
      for (double s : {step, -step}) {
        auto cand = x;
        cand[k] += s;
        const double fc = obj(cand);
        ++evals;
        if (fc > fbest) {
          fbest = fc;
          best = cand;
          improved = true;
        }
      }
    }
    if (improved) {
      x = best;
      fx = fbest;
    } else {
      step *= 0.5;
    }
  }
  return x;
}

}  // namespace

OptimumReport tsirelson_search(double tolerance, int restarts, std::uint64_t seed) {
  if (!(tolerance > 0.0)) throw std::invalid_argument("tolerance must be positive");
  constexpr double pi = std::numbers::pi;
  constexpr int kGrid = 50;

  SingletObjective obj;

  std::array<double, 3> best{};
  double fbest = -1.0;
  const double step = pi / kGrid;
  for (int i = 0; i < kGrid; ++i)
    for (int j = 0; j < kGrid; ++j)
      for (int k = 0; k < kGrid; ++k) {
        const std::array<double, 3> v{i * step, j * step, k * step};
        const double f = obj(v);
        if (f > fbest) {
          fbest = f;
          best = v;
        }
      }

  const double min_step = std::min(tolerance * 1e-2, 1e-8);
  auto polish_and_keep = [&](std::array<double, 3> start, double h) {
    const auto x = compass_polish(obj, start, h, min_step);
    const double f = obj(x);
    if (f > fbest) {
      fbest = f;
      best = x;
    }
  };

  polish_and_keep(best, step);
  RandomStream rng = RandomStream::derive(seed, 0);
  for (int r = 0; r < restarts; ++r) {
    std::array<double, 3> start{rng.next_in(0.0, 2.0 * pi), rng.next_in(0.0, 2.0 * pi),
                                rng.next_in(0.0, 2.0 * pi)};
    polish_and_keep(start, pi / 8.0);
  }

  OptimumReport report;
  report.method = OptMethod::Continuous;
  report.angles = SingletObjective::quad(best);
  report.value = fbest;
  report.iterations = obj.evals();
  return report;
}

OptimumReport nonsignaling_lp_max_chsh() {
  LinearProgram lp;
  const int n = 16;
  lp.c.assign(n, 0.0);
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) {
      const double sign = (x == 1 && y == 1) ? -1.0 : 1.0;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          lp.c[NsBox::offset(a, b, x, y)] = sign * (a == b ? 1.0 : -1.0);
    }

  auto add_row = [&lp, n]() -> std::vector<double>& {
    lp.a.emplace_back(n, 0.0);
    return lp.a.back();
  };

  // normalization of each setting-pair block
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) {
      auto& row = add_row();
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) row[NsBox::offset(a, b, x, y)] = 1.0;
      lp.b.push_back(1.0);
    }
  // Alice's marginals independent of y (redundant rows are fine)
  for (int a = 0; a < 2; ++a)
    for (int x = 0; x < 2; ++x) {
      auto& row = add_row();
      for (int b = 0; b < 2; ++b) {
        row[NsBox::offset(a, b, x, 0)] += 1.0;
        row[NsBox::offset(a, b, x, 1)] -= 1.0;
      }
      lp.b.push_back(0.0);
    }
  // Bob's marginals independent of x
  for (int b = 0; b < 2; ++b)
    for (int y = 0; y < 2; ++y) {
      auto& row = add_row();
      for (int a = 0; a < 2; ++a) {
        row[NsBox::offset(a, b, 0, y)] += 1.0;
        row[NsBox::offset(a, b, 1, y)] -= 1.0;
      }
      lp.b.push_back(0.0);
    }

  const LpSolution sol = solve_simplex(lp);

  OptimumReport report;
  report.method = OptMethod::LinearProgram;
  report.iterations = sol.iterations;
  NsBox box;
  for (int i = 0; i < n; ++i) box.p[i] = std::fabs(sol.x[i]) < 1e-12 ? 0.0 : sol.x[i];
  report.box = box;
  report.value = box.chsh();
  return report;
}

}  // namespace bellbox
