#include "bellbox/chsh.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <thread>
#include <vector>

namespace bellbox {

namespace {

struct Pair {
  const char* name;
  double s1, s2;
  double sign;
};

std::array<Pair, 4> term_pairs(const SettingsQuad& q) {
  // Term order and the minus sign on (a', b') are fixed; tests also pin the
  // reordered form with the same value.
  return {{{"E(a,b)", q.a, q.b, 1.0},
           {"E(a,b')", q.a, q.b_prime, 1.0},
           {"E(a',b)", q.a_prime, q.b, 1.0},
           {"E(a',b')", q.a_prime, q.b_prime, -1.0}}};
}

}  // namespace

SettingsQuad canonical_quad() {
  constexpr double pi = std::numbers::pi;
  return {.a = 0.5 * pi, .a_prime = 0.0, .b = 0.25 * pi, .b_prime = 0.75 * pi};
}

ChshReport chsh_value(const CorrelationModel& model, const SettingsQuad& quad) {
  ChshReport report{};
  double total = 0.0;
  int i = 0;
  for (const Pair& p : term_pairs(quad)) {
    const double rel = relative_angle(p.s1, p.s2);
    const double e = correlation(model, rel);
    report.terms[i++] = {p.name, rel, e, p.sign};
    total += p.sign * e;
  }
  report.value = total;
  return report;
}

ChshReport chsh_estimate(const CorrelationModel& model, const SettingsQuad& quad,
                         long long n_per_pair, std::uint64_t seed, int threads) {
  if (n_per_pair < 1) throw std::invalid_argument("n_per_pair must be >= 1");

  const auto pairs = term_pairs(quad);
  std::array<double, 4> means{};
  std::array<double, 4> rels{};

  auto run_pair = [&](int k) {
    const double rel = relative_angle(pairs[k].s1, pairs[k].s2);
    RandomStream rng = RandomStream::derive(seed, static_cast<std::uint64_t>(k));
    long long sum = 0;
    for (long long i = 0; i < n_per_pair; ++i) {
      auto [a, b] = sample_pair(model, rel, rng);
      sum += a * b;
    }
    rels[k] = rel;
    means[k] = static_cast<double>(sum) / static_cast<double>(n_per_pair);
  };

  if (threads > 1) {
    std::vector<std::thread> pool;
    for (int k = 0; k < 4; ++k) pool.emplace_back(run_pair, k);
    for (auto& t : pool) t.join();
  } else {
    for (int k = 0; k < 4; ++k) run_pair(k);
  }

  ChshReport report{};
  double total = 0.0;
  double var_sum = 0.0;
  for (int k = 0; k < 4; ++k) {
    report.terms[k] = {pairs[k].name, rels[k], means[k], pairs[k].sign};
    total += pairs[k].sign * means[k];
    var_sum += 1.0 - means[k] * means[k];  // population variance of +-1 products
  }
  report.value = total;
  report.standard_error = std::sqrt(var_sum / static_cast<double>(n_per_pair));
  report.n_per_pair = n_per_pair;
  return report;
}

double chsh_grid_max(const CorrelationModel& model, int n) {
  if (n < 2) throw std::invalid_argument("grid must have at least 2 points per axis");
  // Directions k*pi/n differ by multiples of pi/n, so E is tabulated once.
  const double step = std::numbers::pi / n;
  std::vector<double> e(n);
  for (int d = 0; d < n; ++d) e[d] = correlation(model, d * step);

  auto idx = [n](int i, int j) {
    int d = i - j;
    if (d < 0) d = -d;
    return d;  // i, j in [0, n) so d in [0, n)
  };

  double best = 0.0;
  for (int a = 0; a < n; ++a)
    for (int ap = 0; ap < n; ++ap)
      for (int b = 0; b < n; ++b) {
        const double partial_ab = e[idx(a, b)];
        const double partial_apb = e[idx(ap, b)];
        for (int bp = 0; bp < n; ++bp) {
          const double v = partial_ab + e[idx(a, bp)] + partial_apb - e[idx(ap, bp)];
          const double av = std::fabs(v);
          if (av > best) best = av;
        }
      }
  return best;
}

}  // namespace bellbox
