#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "bellbox/correlation.hpp"

namespace bellbox {

struct NsBox;  // optimize.hpp

enum class Party { A, B };

enum class AuditMode { Analytic, Empirical };

/// Verdict of a causality audit. passed <=> max_deviation <= threshold.
/// In analytic mode the deviation is a probability difference; in empirical
/// mode it is the largest |z| statistic and the threshold is the
/// Bonferroni-corrected critical value.
struct AuditReport {
  bool passed;
  double max_deviation;
  double threshold;
  AuditMode mode;
  std::string worst_case;
};

/// Joint outcome distribution as a function of the two absolute settings
/// (Alice's first). Lets the audits run against planted-fault models that
/// no CorrelationModel can represent.
using JointSource = std::function<JointDistribution(double alice, double bob)>;

JointSource joint_source(const CorrelationModel& model);

/// Probability that `party`'s outcome is +1 at the given settings.
double marginal(const CorrelationModel& model, double local, double remote, Party party);

/// Checks that each party's marginal is independent of the remote setting
/// over a grid_size x grid_size grid of directions in [0, pi].
/// Threshold 1e-12; built-in models deviate by exactly 0.
AuditReport nonsignaling_audit_analytic(const CorrelationModel& model, int grid_size);
AuditReport nonsignaling_audit_analytic(const JointSource& source, int grid_size);

/// +1 counts out of `total` trials for one (local, remote) setting pair.
struct TallyCell {
  std::uint64_t plus = 0;
  std::uint64_t total = 0;
};

/// One party's outcome tallies, indexed [local][remote].
struct PartyTallies {
  std::vector<std::vector<TallyCell>> cells;
};

/// Two-proportion z-test of every remote-setting pair against every local
/// setting, Bonferroni-corrected at the given significance. Requires at
/// least two remote settings and nonempty tallies.
AuditReport nonsignaling_audit_empirical(const PartyTallies& tallies, double significance);

/// Samples the model to build tallies for one party. Cell streams are
/// derived from (seed, cell index); `threads` does not change the result.
PartyTallies tally_party_outcomes(const CorrelationModel& model,
                                  const std::vector<double>& locals,
                                  const std::vector<double>& remotes,
                                  std::uint64_t n_per_pair, std::uint64_t seed,
                                  Party party, int threads = 1);

/// Verifies the unary jamming condition: the jammed model's single-party
/// marginals match the original's on the grid (both 1/2), to 1e-12.
/// `jammed` must be apply_jamming(original); anything else is an input error.
AuditReport unary_audit(const CorrelationModel& original, const CorrelationModel& jammed,
                        int grid_size);
AuditReport unary_audit(const JointSource& original, const JointSource& jammed,
                        int grid_size);

/// Nonsignaling check for a discrete two-setting box (LP output).
AuditReport nonsignaling_audit_box(const NsBox& box, double threshold = 1e-9);

/// Inverse standard normal CDF, accurate to ~1e-12. Used for the z-test
/// critical value.
double normal_quantile(double p);

}  // namespace bellbox
