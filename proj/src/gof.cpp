#include "llfit/gof.hpp"

#include "llfit/errors.hpp"

#include <algorithm>
#include <cmath>

namespace llfit {

namespace {

void check_truncation(const Sample& s, const TruncatedLogLogistic& fitted)
{
  if (s.x_l() != fitted.x_l())
    throw DomainError("fitted truncation point does not match the sample's");
}

}  // namespace

double ks_statistic(const Sample& s, const TruncatedLogLogistic& fitted)
{
  check_truncation(s, fitted);
  const auto x = s.values();
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(fitted, x[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return std::sqrt(n) * d;
}

AndersonDarling ad_statistic(const Sample& s, const TruncatedLogLogistic& fitted)
{
  check_truncation(s, fitted);
  constexpr double f_floor = 1e-300;
  constexpr double survival_floor = 1e-16;
  const auto x = s.values();
  const std::size_t n = x.size();

  bool clamped = false;
  std::vector<double> log_f(n), log_s(n);
  for (std::size_t i = 0; i < n; ++i) {
    double f = cdf(fitted, x[i]);
    double sv = survival(fitted, x[i]);
    if (f < f_floor) {
      f = f_floor;
      clamped = true;
    }
    if (sv < survival_floor) {
      sv = survival_floor;
      clamped = true;
    }
    log_f[i] = std::log(f);
    log_s[i] = std::log(sv);
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    acc += static_cast<double>(2 * i + 1) * (log_f[i] + log_s[n - 1 - i]);
  const double nn = static_cast<double>(n);
  return {-nn - acc / nn, clamped};
}

GofStatistics gof_statistics(const Sample& s, const TruncatedLogLogistic& fitted)
{
  const auto ad = ad_statistic(s, fitted);
  return {ks_statistic(s, fitted), ad.a2, s.size(), ad.clamped};
}

const LevelDecision& GofReport::decision(GofTest test, ConfidenceLevel level) const
{
  for (const auto& d : decisions) {
    if (d.test == test && d.level == level)
      return d;
  }
  throw InvalidParameter("level not present in the report");
}

GofReport run_gof(const Sample& s, const FitOutcome& outcome, std::span<const ConfidenceLevel> levels,
                  const CriticalValueTable& table)
{
  if (outcome.is_pareto())
    throw InvalidParameter("goodness-of-fit tests need a regular log-logistic fit; the sample fits the Pareto "
                           "boundary (lambda = 0)");
  if (outcome.is_degenerate())
    throw InvalidParameter("goodness-of-fit tests need a regular log-logistic fit; all observations are equal");

  const auto& fitted = outcome.regular();
  GofReport report;
  report.statistics = gof_statistics(s, fitted.distribution(s.x_l()));
  report.eta_hat = outcome.diagnostics.eta_hat;

  const long n = static_cast<long>(s.size());
  const double p = truncation_percentage(report.eta_hat);
  for (GofTest test : {GofTest::ks, GofTest::ad}) {
    const double statistic = test == GofTest::ks ? report.statistics.ks_scaled : report.statistics.ad;
    for (ConfidenceLevel level : levels) {
      LevelDecision d{test, level, statistic, critical_interpolated(test, level, report.eta_hat, n), {}, false, {}};
      d.pass_interpolated = statistic < d.critical_interpolated;
      d.critical_table = table.lookup(test, level, p, n);
      if (d.critical_table)
        d.pass_table = statistic < *d.critical_table;
      report.decisions.push_back(d);
    }
  }
  return report;
}

}  // namespace llfit
