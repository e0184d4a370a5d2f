#pragma once

#include <string>
#include <utility>

#include "bellbox/rng.hpp"

namespace bellbox {

/// Folds any finite angle into the relative-angle domain [0, pi].
/// Only differences of measurement directions matter, and the correlation
/// functions see the unoriented angle between axes.
double fold_angle(double theta);

/// fold_angle(|x - y|) for two absolute directions.
double relative_angle(double x, double y);

enum class ModelKind { LhvSaw, QuantumSinglet, SuperquantumPr, Jammed };

/// Shape of the superquantum correlation on the descending segment
/// [pi/4, 3pi/4]. SmoothSine is C1 across the joins; Linear is C0 and kept
/// as a cross-check variant.
enum class RampKind { SmoothSine, Linear };

/// What the jammer leaves behind: the classical sawtooth 1 - 2*theta/pi
/// (saturates the CHSH classical bound) or fully decorrelated outcomes.
enum class JamMode { ClassicalSaw, Zero };

class CorrelationModel {
 public:
  static CorrelationModel lhv_saw();
  static CorrelationModel quantum_singlet();
  static CorrelationModel superquantum_pr(RampKind ramp = RampKind::SmoothSine);

  ModelKind kind() const { return kind_; }
  RampKind ramp() const { return ramp_; }
  JamMode jam_mode() const { return jam_mode_; }

  /// Model wrapped by a Jammed model. Throws std::logic_error otherwise.
  CorrelationModel inner() const;

  /// Stable display name, e.g. "superquantum-pr" or "jammed(quantum-singlet)".
  std::string name() const;

  bool operator==(const CorrelationModel&) const = default;

 private:
  CorrelationModel(ModelKind kind, RampKind ramp, JamMode jam)
      : kind_(kind), ramp_(ramp), jam_mode_(jam) {}

  friend CorrelationModel apply_jamming(const CorrelationModel&, JamMode);

  ModelKind kind_;
  ModelKind inner_kind_ = ModelKind::LhvSaw;  // meaningful when kind_ == Jammed
  RampKind ramp_;
  JamMode jam_mode_;
};

/// Four joint outcome probabilities for one setting pair, ordered
/// (++, +-, -+, --). Construction from a correlation pins the
/// equal-likelihood pairing p_pp == p_mm, p_pm == p_mp and forces both
/// single-party marginals to exactly 1/2.
struct JointDistribution {
  double p_pp, p_pm, p_mp, p_mm;

  double marginal_a() const { return p_pp + p_pm; }  // P(A = +1)
  double marginal_b() const { return p_pp + p_mp; }  // P(B = +1)
  double correlation() const { return p_pp + p_mm - p_pm - p_mp; }

  /// p_pp = p_mm = (1+E)/4 and p_pm = p_mp = (1-E)/4.
  /// Throws std::logic_error if |E| > 1 beyond numerical tolerance.
  static JointDistribution from_correlation(double e);
};

/// E(theta) for the model at the folded relative angle. Always in [-1, 1].
double correlation(const CorrelationModel& model, double theta);

JointDistribution joint_distribution(const CorrelationModel& model, double theta);

/// One outcome pair (+1/-1 each) distributed per joint_distribution.
/// Consumes exactly two uniform draws per call, so trial streams stay
/// aligned no matter which branch is taken.
std::pair<int, int> sample_pair(const CorrelationModel& model, double theta,
                                RandomStream& rng);

/// Wraps a model so that its correlations become classical (mode
/// ClassicalSaw, the default) or vanish entirely (mode Zero) while the
/// single-party marginals stay at 1/2. Jamming an already jammed model is
/// an input error.
CorrelationModel apply_jamming(const CorrelationModel& model,
                               JamMode mode = JamMode::ClassicalSaw);

}  // namespace bellbox
