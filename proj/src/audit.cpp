#include "bellbox/audit.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "bellbox/optimize.hpp"

namespace bellbox {

namespace {

std::vector<double> angle_grid(int grid_size) {
  if (grid_size < 2) throw std::invalid_argument("grid_size must be >= 2");
  std::vector<double> g(grid_size);
  const double step = std::numbers::pi / (grid_size - 1);
  for (int i = 0; i < grid_size; ++i) g[i] = i * step;
  return g;
}

std::string describe(const char* fmt, double v1, double v2, double v3) {
  char buf[128];
  std::snprintf(buf, sizeof buf, fmt, v1, v2, v3);
  return buf;
}

double party_marginal(const JointDistribution& jd, Party party) {
  return party == Party::A ? jd.marginal_a() : jd.marginal_b();
}

JointDistribution eval(const JointSource& src, Party party, double local, double remote) {
  // The source takes (alice, bob); orient the pair for the audited party.
  return party == Party::A ? src(local, remote) : src(remote, local);
}

}  // namespace

JointSource joint_source(const CorrelationModel& model) {
  return [model](double alice, double bob) {
    return joint_distribution(model, relative_angle(alice, bob));
  };
}

double marginal(const CorrelationModel& model, double local, double remote, Party party) {
  return party_marginal(joint_distribution(model, relative_angle(local, remote)), party);
}

AuditReport nonsignaling_audit_analytic(const CorrelationModel& model, int grid_size) {
  return nonsignaling_audit_analytic(joint_source(model), grid_size);
}

AuditReport nonsignaling_audit_analytic(const JointSource& source, int grid_size) {
  const auto grid = angle_grid(grid_size);
  AuditReport report{true, 0.0, 1e-12, AuditMode::Analytic, "no deviation"};

  for (Party party : {Party::A, Party::B}) {
    for (double local : grid) {
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      double lo_at = 0.0, hi_at = 0.0;
      for (double remote : grid) {
        const double m = party_marginal(eval(source, party, local, remote), party);
        if (m < lo) { lo = m; lo_at = remote; }
        if (m > hi) { hi = m; hi_at = remote; }
      }
      const double dev = hi - lo;
      if (dev > report.max_deviation) {
        report.max_deviation = dev;
        report.worst_case =
            std::string("party=") + (party == Party::A ? "A" : "B") +
            describe(" local=%.6g remote_hi=%.6g remote_lo=%.6g", local, hi_at, lo_at);
      }
    }
  }
  report.passed = report.max_deviation <= report.threshold;
  return report;
}

AuditReport nonsignaling_audit_empirical(const PartyTallies& tallies, double significance) {
  if (!(significance > 0.0 && significance < 1.0))
    throw std::invalid_argument("significance must be in (0, 1)");
  const auto& cells = tallies.cells;
  if (cells.empty()) throw std::invalid_argument("empty tallies");
  const std::size_t n_remote = cells.front().size();
  if (n_remote < 2) throw std::invalid_argument("need at least 2 remote settings");
  for (const auto& row : cells) {
    if (row.size() != n_remote) throw std::invalid_argument("ragged tally table");
    for (const auto& cell : row) {
      if (cell.total == 0) throw std::invalid_argument("empty tallies");
      if (cell.plus > cell.total) throw std::invalid_argument("plus count exceeds total");
    }
  }

  const double n_tests =
      static_cast<double>(cells.size()) * (n_remote * (n_remote - 1) / 2.0);
  const double alpha_corr = significance / n_tests;  // Bonferroni
  const double z_crit = normal_quantile(1.0 - alpha_corr / 2.0);

  AuditReport report{true, 0.0, z_crit, AuditMode::Empirical, "no deviation"};
  for (std::size_t l = 0; l < cells.size(); ++l) {
    for (std::size_t r1 = 0; r1 + 1 < n_remote; ++r1) {
      for (std::size_t r2 = r1 + 1; r2 < n_remote; ++r2) {
        const auto& c1 = cells[l][r1];
        const auto& c2 = cells[l][r2];
        const double n1 = static_cast<double>(c1.total);
        const double n2 = static_cast<double>(c2.total);
        const double p1 = static_cast<double>(c1.plus) / n1;
        const double p2 = static_cast<double>(c2.plus) / n2;
        const double pooled =
            static_cast<double>(c1.plus + c2.plus) / (n1 + n2);
        const double denom = std::sqrt(pooled * (1.0 - pooled) * (1.0 / n1 + 1.0 / n2));
        double z = 0.0;
        if (denom > 0.0) z = (p1 - p2) / denom;
        else if (p1 != p2) z = std::numeric_limits<double>::infinity();
        const double az = std::fabs(z);
        if (az > report.max_deviation) {
          report.max_deviation = az;
          report.worst_case = describe("local=%.0f remotes=(%.0f %.0f) ",
                                       static_cast<double>(l), static_cast<double>(r1),
                                       static_cast<double>(r2)) +
                              describe("|z|=%.4g p1=%.6g p2=%.6g", az, p1, p2);
        }
      }
    }
  }
  report.passed = report.max_deviation <= report.threshold;
  return report;
}

PartyTallies tally_party_outcomes(const CorrelationModel& model,
                                  const std::vector<double>& locals,
                                  const std::vector<double>& remotes,
                                  std::uint64_t n_per_pair, std::uint64_t seed,
                                  Party party, int threads) {
  if (locals.empty() || remotes.empty()) throw std::invalid_argument("empty setting lists");
  if (n_per_pair == 0) throw std::invalid_argument("n_per_pair must be >= 1");

  PartyTallies tallies;
  tallies.cells.assign(locals.size(), std::vector<TallyCell>(remotes.size()));

  auto run_cell = [&](std::size_t li, std::size_t ri) {
    const std::uint64_t cell_index = li * remotes.size() + ri;
    RandomStream rng = RandomStream::derive(seed, cell_index);
    const double alice = party == Party::A ? locals[li] : remotes[ri];
    const double bob = party == Party::A ? remotes[ri] : locals[li];
    const double theta = relative_angle(alice, bob);
    std::uint64_t plus = 0;
    for (std::uint64_t i = 0; i < n_per_pair; ++i) {
      auto [oa, ob] = sample_pair(model, theta, rng);
      plus += ((party == Party::A ? oa : ob) > 0) ? 1 : 0;
    }
    tallies.cells[li][ri] = {plus, n_per_pair};
  };

  const std::size_t n_cells = locals.size() * remotes.size();
  if (threads > 1) {
    std::vector<std::thread> pool;
    const int tcount = threads;
    for (int t = 0; t < tcount; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t c = static_cast<std::size_t>(t); c < n_cells; c += tcount)
          run_cell(c / remotes.size(), c % remotes.size());
      });
    }
    for (auto& th : pool) th.join();
  } else {
    for (std::size_t c = 0; c < n_cells; ++c)
      run_cell(c / remotes.size(), c % remotes.size());
  }
  return tallies;
}

AuditReport unary_audit(const CorrelationModel& original, const CorrelationModel& jammed,
                        int grid_size) {
  if (jammed.kind() != ModelKind::Jammed || original.kind() == ModelKind::Jammed ||
      jammed.inner() != original)
    throw std::invalid_argument("unary_audit: jammed model does not wrap the original");
  return unary_audit(joint_source(original), joint_source(jammed), grid_size);
}

AuditReport unary_audit(const JointSource& original, const JointSource& jammed,
                        int grid_size) {
  const auto grid = angle_grid(grid_size);
  AuditReport report{true, 0.0, 1e-12, AuditMode::Analytic, "no deviation"};
  for (Party party : {Party::A, Party::B}) {
    for (double local : grid) {
      for (double remote : grid) {
        const double before = party_marginal(eval(original, party, local, remote), party);
        const double after = party_marginal(eval(jammed, party, local, remote), party);
        const double dev = std::fabs(after - before);
        if (dev > report.max_deviation) {
          report.max_deviation = dev;
          report.worst_case =
              std::string("party=") + (party == Party::A ? "A" : "B") +
              describe(" local=%.6g remote=%.6g marginal_shift=%.3g", local, remote,
                       dev);
        }
      }
    }
  }
  report.passed = report.max_deviation <= report.threshold;
  return report;
}

AuditReport nonsignaling_audit_box(const NsBox& box, double threshold) {
  AuditReport report{true, 0.0, threshold, AuditMode::Analytic, "no deviation"};
  auto note = [&](double dev, const char* who, int outcome, int setting) {
    if (dev > report.max_deviation) {
      report.max_deviation = dev;
      char buf[96];
      std::snprintf(buf, sizeof buf, "party=%s outcome=%d setting=%d", who, outcome,
                    setting);
      report.worst_case = buf;
    }
  };
  for (int a = 0; a < 2; ++a)
    for (int x = 0; x < 2; ++x)
      note(std::fabs(box.marginal_a(a, x, 0) - box.marginal_a(a, x, 1)), "A", a, x);
  for (int b = 0; b < 2; ++b)
    for (int y = 0; y < 2; ++y)
      note(std::fabs(box.marginal_b(b, 0, y) - box.marginal_b(b, 1, y)), "B", b, y);
  report.passed = report.max_deviation <= report.threshold;
  return report;
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("quantile needs p in (0, 1)");

  // Acklam's rational approximation, then one Halley step against erfc.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double p_low = 0.02425;

  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  const double err = 0.5 * std::erfc(-x / std::numbers::sqrt2) - p;
  const double u = err * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

}  // namespace bellbox
