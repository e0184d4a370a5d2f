#include "bellbox/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace bellbox {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kQuarterPi = 0.25 * std::numbers::pi;
constexpr double kThreeQuarterPi = 0.75 * std::numbers::pi;

double saw(double theta) {
  // 1 - 2*theta/pi: classical sawtooth, LHV-realizable (shared uniform
  // hidden direction with sign readout). Clamp guards FP spill at theta=pi.
  return std::clamp(1.0 - 2.0 * theta / kPi, -1.0, 1.0);
}

double pr_ramp(double theta, RampKind ramp) {
  if (theta <= kQuarterPi) return 1.0;
  if (theta >= kThreeQuarterPi) return -1.0;
  if (ramp == RampKind::SmoothSine) return std::sin(2.0 * theta);
  return std::clamp(2.0 - 4.0 * theta / kPi, -1.0, 1.0);
}

}  // namespace

double fold_angle(double theta) {
  if (!std::isfinite(theta)) throw std::invalid_argument("angle must be finite");
  double r = std::fmod(std::fabs(theta), 2.0 * kPi);
  if (r > kPi) r = 2.0 * kPi - r;
  return r;
}

double relative_angle(double x, double y) { return fold_angle(x - y); }

CorrelationModel CorrelationModel::lhv_saw() {
  return {ModelKind::LhvSaw, RampKind::SmoothSine, JamMode::ClassicalSaw};
}

CorrelationModel CorrelationModel::quantum_singlet() {
  return {ModelKind::QuantumSinglet, RampKind::SmoothSine, JamMode::ClassicalSaw};
}

CorrelationModel CorrelationModel::superquantum_pr(RampKind ramp) {
  return {ModelKind::SuperquantumPr, ramp, JamMode::ClassicalSaw};
}

CorrelationModel CorrelationModel::inner() const {
  if (kind_ != ModelKind::Jammed) throw std::logic_error("inner(): model is not jammed");
  return {inner_kind_, ramp_, JamMode::ClassicalSaw};
}

std::string CorrelationModel::name() const {
  switch (kind_) {
    case ModelKind::LhvSaw: return "lhv-saw";
    case ModelKind::QuantumSinglet: return "quantum-singlet";
    case ModelKind::SuperquantumPr: return "superquantum-pr";
    case ModelKind::Jammed: return "jammed(" + inner().name() + ")";
  }
  return "?";
}

CorrelationModel apply_jamming(const CorrelationModel& model, JamMode mode) {
  if (model.kind() == ModelKind::Jammed)
    throw std::invalid_argument("model is already jammed");
  CorrelationModel jammed = model;
  jammed.inner_kind_ = model.kind_;
  jammed.kind_ = ModelKind::Jammed;
  jammed.jam_mode_ = mode;
  return jammed;
}

double correlation(const CorrelationModel& model, double theta) {
  const double th = fold_angle(theta);
  switch (model.kind()) {
    case ModelKind::LhvSaw: return saw(th);
    case ModelKind::QuantumSinglet: return -std::cos(th);
    case ModelKind::SuperquantumPr: return pr_ramp(th, model.ramp());
    case ModelKind::Jammed:
      return model.jam_mode() == JamMode::ClassicalSaw ? saw(th) : 0.0;
  }
  throw std::logic_error("unreachable model kind");
}

JointDistribution JointDistribution::from_correlation(double e) {
  if (!(std::fabs(e) <= 1.0 + 1e-9))
    throw std::logic_error("correlation outside [-1, 1]: model bug");
  e = std::clamp(e, -1.0, 1.0);
  const double same = (1.0 + e) / 4.0;
  const double diff = (1.0 - e) / 4.0;
  return {same, diff, diff, same};
}

JointDistribution joint_distribution(const CorrelationModel& model, double theta) {
  return JointDistribution::from_correlation(correlation(model, theta));
}

std::pair<int, int> sample_pair(const CorrelationModel& model, double theta,
                                RandomStream& rng) {
  const double e = correlation(model, theta);
  const bool equal = rng.next_unit() < 0.5 * (1.0 + e);
  const int first = rng.next_unit() < 0.5 ? 1 : -1;
  return {first, equal ? first : -first};
}

}  // namespace bellbox
