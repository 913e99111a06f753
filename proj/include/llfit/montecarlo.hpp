#pragma once

#include "llfit/critical_tables.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace llfit {

/**
 * One cell of the critical-value simulation.
 *
 * Truncated cells (p > 0) draw from LL(alpha, beta_gen; x_L = 1) with
 * lambda = alpha^beta_gen = (1 - p) / p, i.e. eta = 1/lambda = p / (1 - p), and
 * fit with x_L = 1.  The p = 0 cell draws from the untruncated LL(1, beta_gen)
 * and fits with x_L = 0.
 */
struct SimConfig
{
  long n = 30;
  long reps = 10000;
  double p = 0.0;
  double beta_gen = 1.0;
  std::vector<ConfidenceLevel> levels{all_levels.begin(), all_levels.end()};
  std::uint64_t master_seed = 20230101;
  /// OpenMP threads; 0 uses the runtime default. Never affects results.
  int workers = 0;

  /// lambda = (1 - p) / p; infinite for p = 0.
  double lambda() const;
  /// @throws InvalidParameter unless n >= 2, reps >= 100, 0 <= p < 1, beta_gen > 0, levels non-empty.
  void validate() const;
  /// Seed-stream identifier derived from (n, p, beta_gen).
  std::uint64_t cell_id() const;
};

/// p = 1 - 1 / (1 + 1/lambda).
double percentage_from_lambda(double lambda);

struct QuantileEstimate
{
  double probability = 0.0;
  double quantile = 0.0;
  double std_err = 0.0;
  long kept = 0;
  long discarded = 0;
};

/**
 * Order-statistic quantile of sorted `values` (C = values.size()):
 *   quantile = x_(k), k = ceil(q C) (1-based)
 *   std_err  = sqrt(q (1-q) / C) / f,  f = (2m / C) / (x_(k+m) - x_(k-m)),  m = ceil(sqrt C)
 * with k +- m clipped to [1, C].
 * @throws InvalidParameter for fewer than 100 values or q outside (0, 1).
 */
QuantileEstimate quantile_with_error(std::span<const double> values, double q);

enum class ReplicateStatus : std::uint8_t { regular, pareto, failed };

struct ReplicateResult
{
  ReplicateStatus status = ReplicateStatus::failed;
  double ks = 0.0;
  double ad = 0.0;
};

/// Replicate r of a cell: draw, fit, and (for a regular fit) both statistics.
/// Depends only on (cfg.master_seed, cfg.cell_id(), r, cfg.n, cfg.p, cfg.beta_gen).
ReplicateResult simulate_replicate(const SimConfig& cfg, long r);

struct CellResult
{
  SimConfig config;
  long kept = 0;
  long discarded = 0;  ///< Pareto-boundary fits
  long failed = 0;     ///< convergence failures
  /// One entry per cfg.levels, same order. NaN quantiles when kept < 100.
  std::vector<QuantileEstimate> ks;
  std::vector<QuantileEstimate> ad;
  /// Statistics of the kept replicates, ascending.
  std::vector<double> ks_values;
  std::vector<double> ad_values;
};

/// Sort and summarize replicate results (in replicate order).
CellResult aggregate(const SimConfig& cfg, std::span<const ReplicateResult> replicates);

/// OpenMP-parallel cell. Optional progress lines go to `progress`.
CellResult run_cell(const SimConfig& cfg, std::ostream* progress = nullptr);

/// Single-threaded reference; bit-identical to run_cell.
CellResult run_cell_serial(const SimConfig& cfg);

struct TableAsset
{
  std::string text;
  std::vector<std::string> warnings;
};

/// Serialize cells in the critical-value table format with a provenance header.
/// Warns when the cells do not cover the full product of their p and N values.
TableAsset emit_table(std::span<const CellResult> cells);

/// One statistic per line, ascending, 17 significant digits.
void write_raw(std::ostream& out, const CellResult& cell, GofTest test);

}  // namespace llfit
