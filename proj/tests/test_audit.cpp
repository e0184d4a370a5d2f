#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "bellbox/audit.hpp"
#include "bellbox/optimize.hpp"

using namespace bellbox;

namespace {
constexpr double kPi = std::numbers::pi;

// Planted signaling fault: Bob's choice past pi/2 shifts Alice's marginal
// by epsilon. Not representable as a CorrelationModel on purpose.
JointSource faulty_source(double epsilon) {
  const auto base = CorrelationModel::superquantum_pr();
  return [base, epsilon](double alice, double bob) {
    JointDistribution jd = joint_distribution(base, relative_angle(alice, bob));
    if (bob > 0.5 * kPi) {
      jd.p_pp += epsilon;
      jd.p_mm -= epsilon;
    }
    return jd;
  };
}

}  // namespace

TEST_CASE("marginals are exactly one half for every built-in model") {
  const auto models = {CorrelationModel::superquantum_pr(),
                       CorrelationModel::quantum_singlet(), CorrelationModel::lhv_saw(),
                       apply_jamming(CorrelationModel::superquantum_pr())};
  for (const auto& model : models) {
    for (double local : {0.0, 0.3, 1.2, 2.9}) {
      for (double remote : {0.1, 1.0, 2.0, 3.1}) {
        CHECK(marginal(model, local, remote, Party::A) == 0.5);
        CHECK(marginal(model, local, remote, Party::B) == 0.5);
      }
    }
  }
}

TEST_CASE("analytic nonsignaling audit reports zero deviation") {
  for (const auto& model :
       {CorrelationModel::superquantum_pr(), CorrelationModel::quantum_singlet(),
        CorrelationModel::lhv_saw()}) {
    const AuditReport r = nonsignaling_audit_analytic(model, 100);
    CHECK(r.passed);
    CHECK(r.max_deviation == 0.0);
    CHECK(r.mode == AuditMode::Analytic);
  }
}

TEST_CASE("analytic audit detects a planted marginal fault") {
  const AuditReport r = nonsignaling_audit_analytic(faulty_source(1e-3), 50);
  CHECK_FALSE(r.passed);
  CHECK(r.max_deviation == doctest::Approx(1e-3).epsilon(1e-9));
}

TEST_CASE("empirical audit accepts identical tallies") {
  PartyTallies t;
  t.cells = {{{500, 1000}, {500, 1000}}, {{321, 1000}, {321, 1000}}};
  const AuditReport r = nonsignaling_audit_empirical(t, 0.01);
  CHECK(r.passed);
  CHECK(r.max_deviation == 0.0);
  CHECK(r.mode == AuditMode::Empirical);
}

TEST_CASE("empirical audit rejects a gross proportion shift") {
  PartyTallies t;
  t.cells = {{{600000, 1000000}, {500000, 1000000}}};
  const AuditReport r = nonsignaling_audit_empirical(t, 0.01);
  CHECK_FALSE(r.passed);
  CHECK(r.max_deviation > 100.0);  // z is about 142 here
}

TEST_CASE("empirical audit passes on sampled nonsignaling tallies") {
  const std::vector<double> locals{0.0, 0.5 * kPi};
  const std::vector<double> remotes{0.25 * kPi, 0.75 * kPi};
  const auto tallies = tally_party_outcomes(CorrelationModel::superquantum_pr(), locals,
                                            remotes, 100000, 31, Party::A);
  const AuditReport r = nonsignaling_audit_empirical(tallies, 0.01);
  CHECK(r.passed);
}

TEST_CASE("tally generation is thread-invariant") {
  const std::vector<double> locals{0.0, 1.0, 2.0};
  const std::vector<double> remotes{0.5, 1.5};
  const auto t1 = tally_party_outcomes(CorrelationModel::quantum_singlet(), locals,
                                       remotes, 5000, 9, Party::B, 1);
  const auto t4 = tally_party_outcomes(CorrelationModel::quantum_singlet(), locals,
                                       remotes, 5000, 9, Party::B, 4);
  for (std::size_t l = 0; l < locals.size(); ++l)
    for (std::size_t r = 0; r < remotes.size(); ++r)
      CHECK(t1.cells[l][r].plus == t4.cells[l][r].plus);
}

TEST_CASE("empirical audit input validation") {
  PartyTallies empty;
  CHECK_THROWS_AS(nonsignaling_audit_empirical(empty, 0.01), std::invalid_argument);
  PartyTallies one_remote;
  one_remote.cells = {{{10, 20}}};
  CHECK_THROWS_AS(nonsignaling_audit_empirical(one_remote, 0.01), std::invalid_argument);
  PartyTallies zero_total;
  zero_total.cells = {{{0, 0}, {1, 2}}};
  CHECK_THROWS_AS(nonsignaling_audit_empirical(zero_total, 0.01), std::invalid_argument);
}

TEST_CASE("empirical false-positive rate stays at or below the significance") {
  // 1000 seeded replications of a 2x2 design on a nonsignaling model.
  // Bonferroni makes the family-wise rate conservative; allow four sigma of
  // binomial slack around alpha * N so the check itself does not flake.
  const std::vector<double> locals{0.2, 1.7};
  const std::vector<double> remotes{0.9, 2.6};
  const double alpha = 0.01;
  const int reps = 1000;
  int rejections = 0;
  for (int rep = 0; rep < reps; ++rep) {
    const auto t = tally_party_outcomes(CorrelationModel::quantum_singlet(), locals,
                                        remotes, 10000, 1000 + rep, Party::A);
    if (!nonsignaling_audit_empirical(t, alpha).passed) ++rejections;
  }
  const double bound = alpha * reps + 4.0 * std::sqrt(alpha * reps * (1 - alpha));
  CHECK(rejections <= bound);
}

TEST_CASE("unary audit passes for every built-in model") {
  for (const auto& model :
       {CorrelationModel::superquantum_pr(), CorrelationModel::quantum_singlet(),
        CorrelationModel::lhv_saw(),
        CorrelationModel::superquantum_pr(RampKind::Linear)}) {
    for (JamMode mode : {JamMode::ClassicalSaw, JamMode::Zero}) {
      const AuditReport r = unary_audit(model, apply_jamming(model, mode), 60);
      CHECK(r.passed);
      CHECK(r.max_deviation == 0.0);
    }
  }
}

TEST_CASE("unary audit rejects a mismatched pair and flags a planted shift") {
  const auto pr = CorrelationModel::superquantum_pr();
  CHECK_THROWS_AS(
      unary_audit(pr, apply_jamming(CorrelationModel::quantum_singlet()), 10),
      std::invalid_argument);
  CHECK_THROWS_AS(unary_audit(pr, pr, 10), std::invalid_argument);

  // jammed marginal planted at 0.51
  const JointSource orig = joint_source(pr);
  const JointSource planted = [](double, double) {
    JointDistribution jd = JointDistribution::from_correlation(0.0);
    jd.p_pp += 0.005;
    jd.p_pm += 0.005;
    jd.p_mp -= 0.005;
    jd.p_mm -= 0.005;
    return jd;  // marginal_a = 0.51, marginal_b = 0.5
  };
  const AuditReport r = unary_audit(orig, planted, 30);
  CHECK_FALSE(r.passed);
  CHECK(r.max_deviation == doctest::Approx(0.01).epsilon(1e-9));
}

TEST_CASE("normal quantile matches the normal CDF") {
  CHECK(std::fabs(normal_quantile(0.5)) <= 1e-15);
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-10));
  CHECK(normal_quantile(0.999) == doctest::Approx(3.090232306167813).epsilon(1e-10));
  for (double p : {1e-8, 1e-4, 0.2, 0.7, 0.99, 1 - 1e-9}) {
    const double z = normal_quantile(p);
    const double back = 0.5 * std::erfc(-z / std::numbers::sqrt2);
    CHECK(back == doctest::Approx(p).epsilon(1e-9));
  }
  CHECK_THROWS_AS(normal_quantile(0.0), std::invalid_argument);
  CHECK_THROWS_AS(normal_quantile(1.0), std::invalid_argument);
}
