#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>

#include "bellbox/correlation.hpp"

namespace bellbox {

/// Four absolute measurement directions in a plane. Stored absolute, not
/// relative, so one quad can be fed to every model.
struct SettingsQuad {
  double a, a_prime, b, b_prime;
};

struct ChshTerm {
  std::string name;        // "E(a,b)", "E(a,b')", "E(a',b)", "E(a',b')"
  double relative_angle;   // folded into [0, pi]
  double correlation;      // E at that angle (analytic or estimated)
  double sign;             // +1 for the first three terms, -1 for the last
};

struct ChshReport {
  double value;  // signed sum of the four terms
  std::array<ChshTerm, 4> terms;
  std::optional<double> standard_error;   // empirical mode only
  std::optional<long long> n_per_pair;    // empirical mode only
};

/// The quad with successive directions a' = 0, b = pi/4, a = pi/2,
/// b' = 3pi/4: three relative angles of pi/4 and one of 3pi/4.
SettingsQuad canonical_quad();

/// E(a,b) + E(a,b') + E(a',b) - E(a',b'), each term at the folded relative
/// angle. |value| <= 4 for any four correlations in [-1, 1].
ChshReport chsh_value(const CorrelationModel& model, const SettingsQuad& quad);

/// Monte Carlo estimate of the same combination: each term is the mean of
/// n_per_pair outcome products, streams derived per pair from the root
/// seed. standard_error = sqrt(sum_k (1 - Ek^2) / n). Deterministic given
/// the seed and independent of `threads`.
ChshReport chsh_estimate(const CorrelationModel& model, const SettingsQuad& quad,
                         long long n_per_pair, std::uint64_t seed, int threads = 1);

/// max |chsh_value| over an n^4 grid of quads with directions k*pi/n,
/// k = 0..n-1. Used to confirm the classical bound for LHV-type models.
double chsh_grid_max(const CorrelationModel& model, int n_per_axis);

}  // namespace bellbox
