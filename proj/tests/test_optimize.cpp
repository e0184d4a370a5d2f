#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <vector>

#include "bellbox/audit.hpp"
#include "bellbox/rng.hpp"
#include "bellbox/simplex.hpp"
#include "bellbox/optimize.hpp"

using namespace bellbox;

namespace {
constexpr double kPi = std::numbers::pi;
const double kTsirelson = 2.0 * std::sqrt(2.0);

// Independent re-enumeration: every sign tuple, summed per the inequality.
std::vector<int> enumerate_oracle() {
  std::vector<int> values;
  for (int sa : {1, -1})
    for (int sap : {1, -1})
      for (int sb : {1, -1})
        for (int sbp : {1, -1})
          values.push_back(sa * sb + sa * sbp + sap * sb - sap * sbp);
  return values;
}

}  // namespace

TEST_CASE("deterministic strategies reach 2 and -2 and nothing else") {
  const OptimumReport r = lhv_max_chsh();
  CHECK(r.value == 2.0);
  CHECK(*r.min_value == -2.0);
  CHECK(r.iterations == 16);
  CHECK(r.method == OptMethod::Enumeration);

  const auto oracle = enumerate_oracle();
  CHECK(*std::max_element(oracle.begin(), oracle.end()) == 2);
  CHECK(*std::min_element(oracle.begin(), oracle.end()) == -2);
  for (int v : oracle) CHECK(std::abs(v) == 2);

  int oracle_max_count = 0;
  for (int v : oracle)
    if (v == 2) ++oracle_max_count;
  CHECK(static_cast<int>(r.maximizers.size()) == oracle_max_count);

  // canonical argmax is the first maximizer in enumeration order: all +1
  CHECK(r.strategy->a == 1);
  CHECK(r.strategy->a_prime == 1);
  CHECK(r.strategy->b == 1);
  CHECK(r.strategy->b_prime == 1);

  // the maximizer set matches an independent scan of all 16 strategies
  std::set<int> reported;
  for (const auto& s : r.maximizers) reported.insert(s.index());
  std::set<int> expected;
  const auto all = DeterministicStrategy::all();
  for (const auto& s : all)
    if (s.chsh() == 2) expected.insert(s.index());
  CHECK(reported == expected);
}

TEST_CASE("strategy boxes reproduce strategy values") {
  for (const auto& s : DeterministicStrategy::all()) {
    const NsBox box = NsBox::from_strategy(s);
    CHECK(box.chsh() == double(s.chsh()));
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y) {
        double block = 0.0;
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b) block += box.prob(a, b, x, y);
        CHECK(block == 1.0);
      }
    CHECK(nonsignaling_audit_box(box, 1e-12).passed);  // deterministic boxes never signal
  }
}

TEST_CASE("tsirelson search converges to 2*sqrt(2)") {
  const OptimumReport r = tsirelson_search(1e-6, 10, 42);
  CHECK(r.method == OptMethod::Continuous);
  CHECK(std::fabs(r.value - kTsirelson) <= 1e-6);

  // re-evaluating the reported angles reproduces the reported value
  const auto check = chsh_value(CorrelationModel::quantum_singlet(), *r.angles);
  CHECK(std::fabs(std::fabs(check.value) - r.value) <= 1e-9);

  // the optimal quad uses relative angles pi/4 and 3pi/4, three against one
  const SettingsQuad q = *r.angles;
  const double rels[4] = {relative_angle(q.a, q.b), relative_angle(q.a, q.b_prime),
                          relative_angle(q.a_prime, q.b),
                          relative_angle(q.a_prime, q.b_prime)};
  int quarter = 0, three_quarter = 0;
  for (double rel : rels) {
    const bool near_q = std::fabs(rel - 0.25 * kPi) < 1e-4;
    const bool near_tq = std::fabs(rel - 0.75 * kPi) < 1e-4;
    CHECK((near_q || near_tq));
    quarter += near_q;
    three_quarter += near_tq;
  }
  CHECK(((quarter == 3 && three_quarter == 1) || (quarter == 1 && three_quarter == 3)));
}

TEST_CASE("tsirelson search is stable across seeds") {
  double lo = 10.0, hi = 0.0;
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    const double v = tsirelson_search(1e-6, 5, seed).value;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  CHECK(hi - lo <= 1e-6);
  CHECK(std::fabs(hi - kTsirelson) <= 1e-6);
}

TEST_CASE("a degenerate all-equal quad cannot beat the classical bound") {
  for (double angle : {0.0, 0.7, 2.1}) {
    const SettingsQuad q{angle, angle, angle, angle};
    const auto r = chsh_value(CorrelationModel::quantum_singlet(), q);
    CHECK(std::fabs(r.value) <= 2.0);
  }
}

TEST_CASE("nonsignaling LP reaches 4 on a box matching the superquantum pattern") {
  const OptimumReport r = nonsignaling_lp_max_chsh();
  CHECK(r.method == OptMethod::LinearProgram);
  CHECK(std::fabs(r.value - 4.0) <= 1e-9);

  const NsBox& box = *r.box;
  CHECK(box.correlation(0, 0) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(box.correlation(0, 1) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(box.correlation(1, 0) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(box.correlation(1, 1) == doctest::Approx(-1.0).epsilon(1e-9));

  const AuditReport audit = nonsignaling_audit_box(box);
  CHECK(audit.passed);
  CHECK(audit.max_deviation <= 1e-9);

  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) {
      double block = 0.0;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
          CHECK(box.prob(a, b, x, y) >= -1e-12);
          block += box.prob(a, b, x, y);
        }
      CHECK(block == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("uniform box is feasible with zero objective") {
  const NsBox box = NsBox::uniform();
  CHECK(box.chsh() == 0.0);
  CHECK(nonsignaling_audit_box(box, 1e-12).passed);
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) CHECK(box.correlation(x, y) == 0.0);
}

namespace {

// Every vertex of the two-setting nonsignaling polytope: the 16 local
// deterministic boxes plus the 8 PR-type boxes p(ab|xy) uniform on outcome
// pairs with bit(a) ^ bit(b) = (x & y) ^ (alpha & x) ^ (beta & y) ^ gamma.
std::vector<NsBox> ns_polytope_vertices() {
  std::vector<NsBox> vertices;
  for (const auto& s : DeterministicStrategy::all())
    vertices.push_back(NsBox::from_strategy(s));
  for (int alpha = 0; alpha < 2; ++alpha)
    for (int beta = 0; beta < 2; ++beta)
      for (int gamma = 0; gamma < 2; ++gamma) {
        NsBox box;
        for (int x = 0; x < 2; ++x)
          for (int y = 0; y < 2; ++y)
            for (int a = 0; a < 2; ++a)
              for (int b = 0; b < 2; ++b) {
                const int parity = (x & y) ^ (alpha & x) ^ (beta & y) ^ gamma;
                box.prob(a, b, x, y) = ((a ^ b) == parity) ? 0.5 : 0.0;
              }
        vertices.push_back(box);
      }
  return vertices;
}

// The constraint system rebuilt from scratch (normalization + marginal
// independence), so the fuzz below does not share the production builder.
LinearProgram ns_lp_with_objective(const std::array<double, 16>& c) {
  LinearProgram lp;
  lp.c.assign(c.begin(), c.end());
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) {
      std::vector<double> row(16, 0.0);
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) row[NsBox::offset(a, b, x, y)] = 1.0;
      lp.a.push_back(row);
      lp.b.push_back(1.0);
    }
  for (int a = 0; a < 2; ++a)
    for (int x = 0; x < 2; ++x) {
      std::vector<double> row(16, 0.0);
      for (int b = 0; b < 2; ++b) {
        row[NsBox::offset(a, b, x, 0)] += 1.0;
        row[NsBox::offset(a, b, x, 1)] -= 1.0;
      }
      lp.a.push_back(row);
      lp.b.push_back(0.0);
    }
  for (int b = 0; b < 2; ++b)
    for (int y = 0; y < 2; ++y) {
      std::vector<double> row(16, 0.0);
      for (int a = 0; a < 2; ++a) {
        row[NsBox::offset(a, b, 0, y)] += 1.0;
        row[NsBox::offset(a, b, 1, y)] -= 1.0;
      }
      lp.a.push_back(row);
      lp.b.push_back(0.0);
    }
  return lp;
}

}  // namespace

TEST_CASE("simplex optima match brute force over the polytope vertices") {
  const auto vertices = ns_polytope_vertices();
  REQUIRE(vertices.size() == 24);
  for (const auto& v : vertices) CHECK(nonsignaling_audit_box(v, 1e-12).passed);

  RandomStream rng(6174);
  for (int trial = 0; trial < 60; ++trial) {
    std::array<double, 16> c{};
    for (double& ci : c) ci = rng.next_in(-1.0, 1.0);
    double brute = -1e300;
    for (const auto& v : vertices) {
      double val = 0.0;
      for (int i = 0; i < 16; ++i) val += c[i] * v.p[i];
      brute = std::max(brute, val);
    }
    const LpSolution sol = solve_simplex(ns_lp_with_objective(c));
    REQUIRE(std::fabs(sol.value - brute) <= 1e-9);
  }
}

TEST_CASE("the three bounds come out strictly ordered") {
  const double lhv = lhv_max_chsh().value;
  const double tsirelson = tsirelson_search(1e-6, 3, 9).value;
  const double ns = nonsignaling_lp_max_chsh().value;
  CHECK(lhv < tsirelson);
  CHECK(tsirelson < ns);
  CHECK(lhv == 2.0);
  CHECK(std::fabs(tsirelson - kTsirelson) <= 1e-6);
  CHECK(std::fabs(ns - 4.0) <= 1e-9);
}
