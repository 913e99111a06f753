#pragma once

#include "llfit/critical_tables.hpp"
#include "llfit/distribution.hpp"
#include "llfit/estimation.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace llfit {

struct GofStatistics
{
  double ks_scaled = 0.0;  ///< sqrt(N) D
  double ad = 0.0;         ///< A^2
  std::size_t n = 0;
  bool ad_clamped = false;  ///< some F(X_i) was pinned into [1e-300, 1 - 1e-16]
};

/// sqrt(N) max_i max{ i/N - F(X_(i)), F(X_(i)) - (i-1)/N }.
/// @throws DomainError if the fitted truncation point differs from the sample's.
double ks_statistic(const Sample& s, const TruncatedLogLogistic& fitted);

struct AndersonDarling
{
  double a2;
  bool clamped;
};

/// A^2 = -N - (1/N) sum (2i-1) [ln F(X_(i)) + ln(1 - F(X_(N-i+1)))].
AndersonDarling ad_statistic(const Sample& s, const TruncatedLogLogistic& fitted);

GofStatistics gof_statistics(const Sample& s, const TruncatedLogLogistic& fitted);

struct LevelDecision
{
  GofTest test;
  ConfidenceLevel level;
  double statistic;
  double critical_interpolated;
  std::optional<double> critical_table;
  bool pass_interpolated;  ///< statistic < critical_interpolated
  std::optional<bool> pass_table;
};

struct GofReport
{
  GofStatistics statistics;
  double eta_hat = 0.0;
  std::vector<LevelDecision> decisions;

  const LevelDecision& decision(GofTest test, ConfidenceLevel level) const;
};

/// Both statistics against the fitted distribution, with critical values from
/// the interpolation formula and from `table`, for every requested level.
/// @throws InvalidParameter unless `outcome` is a regular fit.
GofReport run_gof(const Sample& s, const FitOutcome& outcome,
                  std::span<const ConfidenceLevel> levels = all_levels,
                  const CriticalValueTable& table = CriticalValueTable::embedded());

}  // namespace llfit
