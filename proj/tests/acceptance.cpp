// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance                 run every criterion
//   acceptance --criterion N   run criterion N only (exit status 1 on failure)

#include "cli.hpp"
#include "llfit/critical_tables.hpp"
#include "llfit/distribution.hpp"
#include "llfit/errors.hpp"
#include "llfit/estimation.hpp"
#include "llfit/gof.hpp"
#include "llfit/montecarlo.hpp"
#include "oracles.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace {

using llfit::ConfidenceLevel;
using llfit::GofTest;
using llfit::Sample;
using clock_type = std::chrono::steady_clock;

const std::string data_dir = LLFIT_TEST_DATA;

/// Collects failed checks for one criterion.
class Checks
{
public:
  void expect(bool ok, const std::string& what)
  {
    ++count_;
    if (!ok)
      failures_.push_back(what);
  }
  void near(double actual, double expected, double tol, const std::string& what)
  {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s: got %.6g, want %.6g +- %.3g", what.c_str(), actual, expected, tol);
    expect(std::abs(actual - expected) <= tol, buf);
  }
  bool ok() const { return failures_.empty(); }
  int count() const { return count_; }
  const std::vector<std::string>& failures() const { return failures_; }

private:
  int count_ = 0;
  std::vector<std::string> failures_;
};

double seconds_since(clock_type::time_point start)
{
  return std::chrono::duration<double>(clock_type::now() - start).count();
}

std::string fmt(const char* format, double v)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

struct TableRow
{
  double x_l;
  std::size_t n;
  double alpha, beta, loglik, ks, ad;
  bool ks_pass, ad_pass;
};

struct RowResult
{
  std::size_t n = 0;
  llfit::FitOutcome outcome;
  std::optional<llfit::GofReport> report;
};

RowResult fit_row(const std::string& path, double x_l)
{
  const auto in = llfit::cli::ingest(path, x_l);
  RowResult r{in.sample.size(), llfit::fit(in.sample), std::nullopt};
  if (r.outcome.is_regular())
    r.report = llfit::run_gof(in.sample, r.outcome);
  return r;
}

void check_rows(Checks& c, const std::string& path, const std::vector<TableRow>& rows, double tol_alpha,
                double tol_beta, double tol_loglik, std::optional<double> tol_stat)
{
  for (const auto& row : rows) {
    const std::string tag = "x_L=" + fmt("%g", row.x_l);
    const auto r = fit_row(path, row.x_l);
    c.expect(r.n == row.n, tag + ": N = " + std::to_string(r.n) + ", want " + std::to_string(row.n));
    if (!r.outcome.is_regular()) {
      c.expect(false, tag + ": no regular fit");
      continue;
    }
    const auto& f = r.outcome.regular();
    c.near(f.alpha_hat, row.alpha, tol_alpha, tag + " alpha");
    c.near(f.beta_hat, row.beta, tol_beta, tag + " beta");
    c.near(f.loglik, row.loglik, tol_loglik, tag + " ln L");
    if (tol_stat) {
      c.near(r.report->statistics.ks_scaled, row.ks, *tol_stat, tag + " sqrt(N) D");
      c.near(r.report->statistics.ad, row.ad, *tol_stat, tag + " A^2");
    }
    const auto& ks = r.report->decision(GofTest::ks, ConfidenceLevel::p95);
    const auto& ad = r.report->decision(GofTest::ad, ConfidenceLevel::p95);
    c.expect(ks.pass_interpolated == row.ks_pass, tag + ": KS 95% decision differs");
    c.expect(ad.pass_interpolated == row.ad_pass, tag + ": AD 95% decision differs");
  }
}

// 1. Bladder cancer remission times, five truncation points.
Checks criterion_1()
{
  const std::vector<TableRow> rows{
      {0, 128, 5.97, 1.695, -410.89, 0.4447, 0.2684, true, true},
      {0.25, 126, 6.11, 1.782, -402.20, 0.4344, 0.1657, true, true},
      {1, 120, 6.32, 1.877, -379.28, 0.4030, 0.1253, true, true},
      {6, 64, 8.63, 2.239, -206.00, 0.5006, 0.3086, true, true},
      {12, 31, 8.36, 2.277, -103.85, 0.4877, 0.5129, true, true},
  };
  Checks c;
  const auto start = clock_type::now();
  check_rows(c, data_dir + "/bladder.txt", rows, 0.01, 0.005, 0.02, 0.001);
  const double secs = seconds_since(start);
  c.expect(secs < 1.0, "runtime " + fmt("%.3f", secs) + " s exceeds 1 s");
  return c;
}

// 2. Untruncated bladder likelihood beats the cited reference optimum.
Checks criterion_2()
{
  Checks c;
  const auto r = fit_row(data_dir + "/bladder.txt", 0.0);
  const double ll = r.outcome.regular().loglik;
  c.expect(ll >= -410.90, "ln L = " + fmt("%.4f", ll) + " below -410.90");
  c.expect(ll > -411.4574, "ln L = " + fmt("%.4f", ll) + " does not exceed -411.4574");
  return c;
}

// 3. Annual precipitation, Berlin and Toronto.
Checks criterion_3()
{
  const std::vector<TableRow> berlin{
      {0, 141, 564.0, 11.8, -825.30, 0.6255, 0.4943, true, true},
      {300, 141, 563.9, 11.8, -825.22, 0.6286, 0.5001, true, true},
      {400, 137, 565.9, 12.1, -791.86, 0.5908, 0.4773, true, true},
      {500, 113, 574.5, 13.6, -616.60, 0.5319, 0.2926, true, true},
  };
  const std::vector<TableRow> toronto{
      {0, 85, 771.5, 11.6, -526.58, 0.5549, 0.6757, true, false},
      {300, 85, 771.5, 11.6, -526.58, 0.5551, 0.6768, true, false},
      {400, 84, 774.1, 12.3, -514.65, 0.5456, 0.6626, true, true},
      {500, 83, 775.9, 12.7, -504.75, 0.5803, 0.5240, true, true},
  };
  Checks c;
  for (const auto& [name, rows] : {std::pair{"berlin", berlin}, std::pair{"toronto", toronto}}) {
    const std::string path = data_dir + "/" + name + ".txt";
    if (!std::filesystem::exists(path)) {
      c.expect(false, std::string("fixture ") + path + " is missing");
      continue;
    }
    check_rows(c, path, rows, 0.5, 0.2, 0.5, std::nullopt);
  }
  return c;
}

// 4. Embedded critical values equal the published ones for 12 randomly drawn cells.
Checks criterion_4()
{
  struct Cell
  {
    GofTest test;
    ConfidenceLevel level;
    double p;
    long n;
    double quantile, std_err;
  };
  // Transcribed from the published appendix tables; drawn with a fixed seed.
  const std::vector<Cell> cells{
      {GofTest::ks, ConfidenceLevel::p99, 0.3, 1000, 0.9326, 0.0013},
      {GofTest::ks, ConfidenceLevel::p95, 0.1, 500, 0.7952, 0.0007},
      {GofTest::ad, ConfidenceLevel::p90, 0.4, 1000, 0.5960, 0.0010},
      {GofTest::ks, ConfidenceLevel::p99, 0.0323, 10000, 0.9171, 0.0014},
      {GofTest::ad, ConfidenceLevel::p99, 0.0, 500, 0.8998, 0.0031},
      {GofTest::ad, ConfidenceLevel::p90, 0.3, 100, 0.5865, 0.0010},
      {GofTest::ad, ConfidenceLevel::p95, 0.6, 10000, 0.7317, 0.0015},
      {GofTest::ad, ConfidenceLevel::p85, 0.3, 50, 0.5197, 0.0008},
      {GofTest::ks, ConfidenceLevel::p95, 0.0, 100, 0.7860, 0.0007},
      {GofTest::ks, ConfidenceLevel::p95, 0.5, 1000, 0.8210, 0.0007},
      {GofTest::ad, ConfidenceLevel::p85, 0.5, 100, 0.5340, 0.0007},
      {GofTest::ks, ConfidenceLevel::p95, 0.9, 1000, 0.8339, 0.0008},
  };
  Checks c;
  const auto& table = llfit::CriticalValueTable::embedded();
  for (const auto& cell : cells) {
    const std::string tag = std::string(llfit::to_string(cell.test)) + " " +
                            std::to_string(llfit::percent(cell.level)) + "% p=" + fmt("%g", cell.p) +
                            " N=" + std::to_string(cell.n);
    const auto v = table.exact(cell.test, cell.level, cell.p, cell.n);
    c.expect(v.has_value(), tag + ": missing");
    if (!v)
      continue;
    c.expect(v->quantile == cell.quantile, tag + ": quantile " + fmt("%.17g", v->quantile));
    c.expect(v->std_err == cell.std_err, tag + ": std_err " + fmt("%.17g", v->std_err));
    const auto looked_up = llfit::critical_table(cell.test, cell.level, cell.p, cell.n);
    c.expect(looked_up && *looked_up == cell.quantile, tag + ": lookup differs");
  }
  return c;
}

// 5. Interpolation formula anchors and agreement with the tables at eta = 0, N = 10000.
Checks criterion_5()
{
  Checks c;
  // Direct evaluation with the published coefficients.
  const double ks_limit = 0.1987 / 0.2470;
  const double ks_10000 = ks_limit + 0.1417 / 100.0 - 0.3753 / 10000.0;
  const double ad_10000 = 0.1927 / 0.2914 + 0.0494 / 100.0 - 0.2364 / 10000.0;

  c.near(llfit::critical_interpolated(GofTest::ks, ConfidenceLevel::p95, 0.0, 10000), ks_10000, 1e-6,
         "KS 95% eta=0 N=10000");
  c.near(llfit::critical_interpolated(GofTest::ad, ConfidenceLevel::p95, 0.0, 10000), ad_10000, 1e-6,
         "AD 95% eta=0 N=10000");
  c.near(llfit::critical_interpolated(GofTest::ks, ConfidenceLevel::p95, 0.0, 1L << 62), ks_limit, 1e-6,
         "KS 95% eta=0 N->inf");
  // Printed anchors carry five decimals.
  c.near(ks_limit, 0.80445, 5e-6, "KS 95% limit anchor");
  c.near(ks_10000, 0.80583, 5e-6, "KS 95% N=10000 anchor");
  // Every eta-dependent term vanishes at eta = 0.
  for (GofTest test : {GofTest::ks, GofTest::ad})
    for (ConfidenceLevel level : llfit::all_levels) {
      const auto& t = llfit::theta_coefficients(test, level).theta;
      c.near(llfit::critical_interpolated(test, level, 0.0, 500),
             t[2] / t[4] + t[7] / std::sqrt(500.0) + t[8] / 500.0, 1e-12, "eta=0 reduction");
    }

  const double ks_table = *llfit::critical_table(GofTest::ks, ConfidenceLevel::p95, 0.0, 10000);
  const double ad_table = *llfit::critical_table(GofTest::ad, ConfidenceLevel::p95, 0.0, 10000);
  c.near(llfit::critical_interpolated(GofTest::ks, ConfidenceLevel::p95, 0.0, 10000), ks_table, 0.005,
         "KS 95% formula vs table");
  c.near(llfit::critical_interpolated(GofTest::ad, ConfidenceLevel::p95, 0.0, 10000), ad_table, 0.005,
         "AD 95% formula vs table");
  return c;
}

// 6. Monte Carlo cell N = 30, p = 0, 10^5 replications.
Checks criterion_6()
{
  Checks c;
  llfit::SimConfig cfg;
  cfg.n = 30;
  cfg.p = 0.0;
  cfg.reps = 100000;
  cfg.levels = {ConfidenceLevel::p95};
  const auto start = clock_type::now();
  const auto res = llfit::run_cell(cfg);
  const double secs = seconds_since(start);
  std::printf("  N=30 p=0 reps=%ld kept=%ld: KS95 %.4f (%.4f)  AD95 %.4f (%.4f)  %.1f s\n", cfg.reps, res.kept,
              res.ks[0].quantile, res.ks[0].std_err, res.ad[0].quantile, res.ad[0].std_err, secs);
  c.near(res.ks[0].quantile, 0.7661, 0.01, "KS 95% quantile");
  c.near(res.ad[0].quantile, 0.6594, 0.01, "AD 95% quantile");
  c.expect(secs <= 600.0, "runtime " + fmt("%.1f", secs) + " s exceeds 10 minutes");
  return c;
}

std::vector<double> draw(std::size_t n, double p, double beta, std::uint64_t seed)
{
  return llfit::sample(llfit::TruncatedLogLogistic(std::pow(p / (1 - p), -1.0 / beta), beta, 1.0), n, seed);
}

// 7. Property suites in summary form.
Checks criterion_7()
{
  Checks c;
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  // distribution: normalization, round trip, L1 limit
  for (double beta : {0.3, 1.0, 5.0, 50.0})
    for (double eta : {0.0, 1.0, 10.0}) {
      const double x_l = eta == 0 ? 0.0 : 2.0 * std::pow(eta, 1.0 / beta);
      const llfit::TruncatedLogLogistic d(2.0, beta, x_l);
      const double total =
          oracle::integrate_positive([&](double x) { return llfit::pdf(d, x); }, x_l, 1e-10);
      c.near(total, 1.0, 1e-6, "normalization beta=" + fmt("%g", beta) + " eta=" + fmt("%g", eta));
    }
  for (int i = 0; i < 200; ++i) {
    const llfit::TruncatedLogLogistic d(0.1 + 5 * unit(gen), 0.3 + 5 * unit(gen), unit(gen));
    const double x = (d.x_l() + 0.01) * std::exp(8 * unit(gen));
    const double f = llfit::cdf(d, x);
    if (f < 1 - 1e-7)
      c.near(llfit::quantile(d, f) / x, 1.0, 1e-9, "quantile(cdf(x)) round trip");
  }
  {
    const llfit::ParetoTail g(2.0, 1.0);
    double previous = 2.0;
    for (double alpha : {0.5, 0.2, 0.1, 0.05, 0.01}) {
      const llfit::TruncatedLogLogistic f(alpha, 2.0, 1.0);
      const double l1 = oracle::integrate_interval(
          [&](double y) {
            const double x = std::exp(y);
            if (!(x > 1.0))
              return 0.0;
            return std::abs(llfit::pdf(f, x) - llfit::pareto_pdf(g, x)) * x;
          },
          0.0, 40.0);
      c.expect(l1 < previous, "L1 distance not decreasing at alpha=" + fmt("%g", alpha));
      previous = l1;
    }
    c.expect(previous < 0.05, "L1 distance at alpha=0.01 is " + fmt("%.4f", previous));
  }

  // estimation: scaling and power-transform equivariance
  for (int i = 0; i < 50; ++i) {
    const auto xs = draw(20 + 5 * i, 0.5, 0.5 + 0.1 * i, 100 + i);
    const auto base = llfit::fit(Sample(xs, 1.0));
    if (!base.is_regular())
      continue;
    for (double k : {0.01, 3.0, 1000.0}) {
      std::vector<double> ys(xs);
      for (double& y : ys)
        y *= k;
      const auto s = llfit::fit(Sample(ys, k));
      c.expect(s.is_regular(), "scaled fit not regular");
      if (s.is_regular()) {
        c.near(s.regular().alpha_hat / (k * base.regular().alpha_hat), 1.0, 1e-9, "scaling alpha");
        c.near(s.regular().beta_hat / base.regular().beta_hat, 1.0, 1e-9, "scaling beta");
      }
    }
    for (double p : {0.5, 2.0}) {
      std::vector<double> ys(xs);
      for (double& y : ys)
        y = std::pow(y, p);
      const auto s = llfit::fit(Sample(ys, 1.0));
      c.expect(s.is_regular(), "power-transformed fit not regular");
      if (s.is_regular()) {
        c.near(s.regular().beta_hat * p / base.regular().beta_hat, 1.0, 1e-8, "power beta");
        c.near(s.regular().log_lambda_hat, base.regular().log_lambda_hat,
               1e-8 * std::max(1.0, std::abs(base.regular().log_lambda_hat)), "power lambda");
      }
    }
  }

  // estimation: boundary dichotomy on 10^4 samples
  {
    std::uniform_int_distribution<int> sizes(2, 30);
    int mismatches = 0;
    for (int i = 0; i < 10000; ++i) {
      const auto xs = draw(static_cast<std::size_t>(sizes(gen)), 0.05 + 0.9 * unit(gen), 0.5 + 3 * unit(gen), gen());
      double s = 0;
      for (double x : xs)
        s += std::log(x);
      const double b0 = xs.size() / s;
      const double bc = oracle::beta_c(xs, 1.0);
      if (std::abs(b0 - bc) < 1e-9 * bc)
        continue;
      const auto out = llfit::fit(Sample(xs, 1.0));
      if (out.is_pareto() != (b0 <= bc) || (out.is_regular() && out.regular().beta_hat <= bc))
        ++mismatches;
    }
    c.expect(mismatches == 0, std::to_string(mismatches) + " dichotomy mismatches");
  }

  // estimation: all-equal closed forms
  for (double x1 : {1.5, 3.0, 40.0}) {
    const auto ns = llfit::normalize(Sample({x1, x1, x1, x1}, 1.0));
    c.near(ns.beta_c(), std::log(2.0) / std::log(x1), 1e-12 * ns.beta_c(), "beta_c = ln 2 / ln X1");
    for (double f : {1.5, 3.0}) {
      const double beta = f * ns.beta_c();
      const double expected = std::pow(x1, beta) - 2.0;
      c.near(llfit::lambda_profile(ns, beta), expected, 1e-10 * expected, "Lambda = X1^beta - 2");
    }
    double prev = -INFINITY;
    bool increasing = true;
    for (double beta = 0.05; beta < 30; beta *= 1.3) {
      const double v = llfit::profile_likelihood(ns, beta);
      increasing = increasing && v > prev;
      prev = v;
    }
    c.expect(increasing, "profile likelihood not strictly increasing for all-equal data");
  }

  // gof: rescaling invariance
  for (int i = 0; i < 30; ++i) {
    const llfit::TruncatedLogLogistic d(0.5 + 3 * unit(gen), 0.5 + 4 * unit(gen), (i % 3) * 0.7);
    const auto xs = llfit::sample(d, 50, 600 + i);
    const auto base = llfit::gof_statistics(Sample(xs, d.x_l()), d);
    for (double k : {0.001, 7.0, 1e4}) {
      std::vector<double> ys(xs);
      for (double& y : ys)
        y *= k;
      const auto s = llfit::gof_statistics(Sample(ys, k * d.x_l()), llfit::rescale(d, k));
      c.near(s.ks_scaled, base.ks_scaled, 1e-12, "KS rescaling invariance");
      c.near(s.ad, base.ad, 1e-12 * std::max(1.0, base.ad), "AD rescaling invariance");
    }
  }

  // montecarlo: worker-count determinism
  for (double p : {0.0, 0.9}) {
    llfit::SimConfig cfg;
    cfg.n = 30;
    cfg.p = p;
    cfg.reps = 100;
    cfg.workers = 1;
    const auto one = llfit::run_cell(cfg);
    cfg.workers = 8;
    const auto eight = llfit::run_cell(cfg);
    c.expect(one.ks_values == eight.ks_values && one.ad_values == eight.ad_values && one.kept == eight.kept,
             "worker count changes results at p=" + fmt("%g", p));
  }
  return c;
}

// 8. Degenerate inputs.
Checks criterion_8()
{
  Checks c;
  {
    const auto start = clock_type::now();
    const auto out = llfit::fit(Sample({3.0, 3.0, 3.0, 3.0, 3.0}, 1.0));
    c.expect(out.is_degenerate(), "all-equal sample not reported as NoFiniteMaximum");
    c.expect(seconds_since(start) < 1.0, "all-equal sample took too long");
    const auto untruncated = llfit::fit(Sample({2.0, 2.0, 2.0}, 0.0));
    c.expect(untruncated.is_degenerate(), "all-equal untruncated sample not reported as NoFiniteMaximum");
  }
  {
    const auto out = llfit::fit(Sample({2.0, 5000.0}, 1.0));
    c.expect(out.is_pareto(), "{2, 5000} not on the Pareto boundary");
    if (out.is_pareto()) {
      const double beta0 = 2.0 / (std::log(2.0) + std::log(5000.0));
      c.near(out.pareto().beta0, beta0, 1e-10, "beta0");
    }
  }
  return c;
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"llfit acceptance suite"};
  int only = 0;
  app.add_option("--criterion", only, "Run a single criterion (1-8)")->check(CLI::Range(1, 8));
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, std::function<Checks()>>> criteria{
      {"bladder cancer table reproduction", criterion_1},
      {"likelihood above the reference optimum", criterion_2},
      {"Berlin and Toronto precipitation tables", criterion_3},
      {"critical-value spot checks", criterion_4},
      {"interpolation formula anchors", criterion_5},
      {"desk-scale Monte Carlo cell", criterion_6},
      {"property suites", criterion_7},
      {"degenerate inputs", criterion_8},
  };

  bool all_ok = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int number = static_cast<int>(i) + 1;
    if (only != 0 && only != number)
      continue;
    Checks c;
    try {
      c = criteria[i].second();
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    std::printf("%s criterion %d: %s (%d checks)\n", c.ok() ? "PASS" : "FAIL", number, criteria[i].first.c_str(),
                c.count());
    for (const auto& f : c.failures())
      std::printf("    %s\n", f.c_str());
    all_ok = all_ok && c.ok();
  }
  std::fflush(stdout);
  return all_ok ? 0 : 1;
}
