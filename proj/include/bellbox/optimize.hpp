#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "bellbox/chsh.hpp"

namespace bellbox {

/// A local deterministic strategy: fixed +1/-1 responses for Alice's two
/// settings and Bob's two. There are exactly 16.
struct DeterministicStrategy {
  int a, a_prime, b, b_prime;

  /// Exact integer CHSH value of this strategy (always +2 or -2).
  int chsh() const { return a * b + a * b_prime + a_prime * b - a_prime * b_prime; }

  int index() const;  // position in the enumeration order
  static std::array<DeterministicStrategy, 16> all();

  bool operator==(const DeterministicStrategy&) const = default;
};

/// The 16 probabilities p(ab|xy) of a two-setting, two-outcome box.
/// Outcome index 0 means +1, 1 means -1; x selects a/a', y selects b/b'.
struct NsBox {
  std::array<double, 16> p{};

  static int offset(int a, int b, int x, int y) { return ((x * 2 + y) * 2 + a) * 2 + b; }
  double prob(int a, int b, int x, int y) const { return p[offset(a, b, x, y)]; }
  double& prob(int a, int b, int x, int y) { return p[offset(a, b, x, y)]; }

  double correlation(int x, int y) const;
  double marginal_a(int a, int x, int y) const;  // P(A = outcome a | x, y)
  double marginal_b(int b, int x, int y) const;
  double chsh() const;

  static NsBox uniform();
  static NsBox from_strategy(const DeterministicStrategy& s);
};

enum class OptMethod { Enumeration, Continuous, LinearProgram };

struct OptimumReport {
  double value = 0.0;
  OptMethod method = OptMethod::Enumeration;
  long long iterations = 0;

  // method-specific payloads
  std::optional<double> min_value;                        // enumeration
  std::optional<DeterministicStrategy> strategy;          // enumeration argmax
  std::vector<DeterministicStrategy> maximizers;          // enumeration ties
  std::optional<SettingsQuad> angles;                     // continuous argmax
  std::optional<NsBox> box;                               // LP argmax
};

/// Exhaustive CHSH over all 16 deterministic strategies: max 2, min -2.
/// The canonical argmax is the first maximizer in enumeration order.
OptimumReport lhv_max_chsh();

/// Maximizes |CHSH| for the singlet model over measurement angles.
/// Coarse grid with a' pinned to 0 (global rotations are flat directions),
/// then derivative-free polish to `tolerance`, plus `restarts` random
/// starting points. Converges to 2*sqrt(2).
OptimumReport tsirelson_search(double tolerance, int restarts = 10,
                               std::uint64_t seed = 42);

/// Maximizes the CHSH functional over the nonsignaling polytope by a dense
/// simplex over the 16 box probabilities. Optimum is 4 at the box whose
/// correlations are (1, 1, 1, -1).
OptimumReport nonsignaling_lp_max_chsh();

}  // namespace bellbox
