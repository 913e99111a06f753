#include "llfit/montecarlo.hpp"

#include "llfit/distribution.hpp"
#include "llfit/errors.hpp"
#include "llfit/estimation.hpp"
#include "llfit/gof.hpp"
#include "llfit/rng.hpp"
#include "llfit/version.hpp"

#include <omp.h>

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>

namespace llfit {

double SimConfig::lambda() const
{
  if (p == 0.0)
    return std::numeric_limits<double>::infinity();
  return (1.0 - p) / p;
}

void SimConfig::validate() const
{
  if (n < 2)
    throw InvalidParameter("simulation sample size must be at least 2");
  if (reps < 100)
    throw InvalidParameter("simulation needs at least 100 replications");
  if (!(p >= 0.0 && p < 1.0))
    throw InvalidParameter("truncation percentage must lie in [0, 1)");
  if (!(beta_gen > 0.0) || !std::isfinite(beta_gen))
    throw InvalidParameter("generator shape must be positive");
  if (levels.empty())
    throw InvalidParameter("no confidence levels requested");
  if (workers < 0)
    throw InvalidParameter("worker count must be non-negative");
}

std::uint64_t SimConfig::cell_id() const
{
  std::uint64_t h = mix64(static_cast<std::uint64_t>(n));
  h = mix64(h ^ std::bit_cast<std::uint64_t>(p));
  return mix64(h ^ std::bit_cast<std::uint64_t>(beta_gen));
}

double percentage_from_lambda(double lambda)
{
  if (!(lambda > 0.0))
    throw InvalidParameter("lambda must be positive");
  return 1.0 - 1.0 / (1.0 + 1.0 / lambda);
}

QuantileEstimate quantile_with_error(std::span<const double> values, double q)
{
  if (values.size() < 100)
    throw InvalidParameter("quantile estimation needs at least 100 values");
  if (!(q > 0.0 && q < 1.0))
    throw InvalidParameter("quantile probability must lie in (0, 1)");
  const auto c = static_cast<long>(values.size());
  const double cd = static_cast<double>(c);
  const long k = std::clamp(static_cast<long>(std::ceil(q * cd - 1e-9)), 1L, c);
  const long m = static_cast<long>(std::ceil(std::sqrt(cd)));
  const long lo = std::max(1L, k - m);
  const long hi = std::min(c, k + m);

  QuantileEstimate est;
  est.probability = q;
  est.quantile = values[k - 1];
  est.kept = c;
  const double spread = values[hi - 1] - values[lo - 1];
  if (spread > 0.0) {
    const double density = (static_cast<double>(hi - lo) / cd) / spread;
    est.std_err = std::sqrt(q * (1.0 - q) / cd) / density;
  }
  return est;
}

ReplicateResult simulate_replicate(const SimConfig& cfg, long r)
{
  const bool truncated = cfg.p > 0.0;
  const double x_l = truncated ? 1.0 : 0.0;
  // lambda = alpha^beta  =>  alpha = lambda^(1/beta); alpha = 1 for the untruncated cell.
  const double alpha = truncated ? std::pow(cfg.lambda(), 1.0 / cfg.beta_gen) : 1.0;
  const TruncatedLogLogistic generator(alpha, cfg.beta_gen, x_l);

  const auto seed = replicate_seed(cfg.master_seed, cfg.cell_id(), static_cast<std::uint64_t>(r));
  const Sample s(sample(generator, static_cast<std::size_t>(cfg.n), seed), x_l);

  ReplicateResult out;
  try {
    const FitOutcome outcome = fit(s);
    if (outcome.is_regular()) {
      const auto stats = gof_statistics(s, outcome.regular().distribution(x_l));
      out = {ReplicateStatus::regular, stats.ks_scaled, stats.ad};
    } else {
      out.status = outcome.is_pareto() ? ReplicateStatus::pareto : ReplicateStatus::failed;
    }
  } catch (const ConvergenceError&) {
    out.status = ReplicateStatus::failed;
  }
  return out;
}

CellResult aggregate(const SimConfig& cfg, std::span<const ReplicateResult> replicates)
{
  CellResult cell;
  cell.config = cfg;
  for (const auto& rep : replicates) {
    switch (rep.status) {
      case ReplicateStatus::regular:
        ++cell.kept;
        cell.ks_values.push_back(rep.ks);
        cell.ad_values.push_back(rep.ad);
        break;
      case ReplicateStatus::pareto:
        ++cell.discarded;
        break;
      case ReplicateStatus::failed:
        ++cell.failed;
        break;
    }
  }
  std::sort(cell.ks_values.begin(), cell.ks_values.end());
  std::sort(cell.ad_values.begin(), cell.ad_values.end());

  for (ConfidenceLevel level : cfg.levels) {
    QuantileEstimate ks, ad;
    if (cell.kept >= 100) {
      ks = quantile_with_error(cell.ks_values, probability(level));
      ad = quantile_with_error(cell.ad_values, probability(level));
    } else {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      ks = ad = {probability(level), nan, nan, cell.kept, 0};
    }
    ks.discarded = ad.discarded = cell.discarded;
    cell.ks.push_back(ks);
    cell.ad.push_back(ad);
  }
  return cell;
}

CellResult run_cell(const SimConfig& cfg, std::ostream* progress)
{
  cfg.validate();
  std::vector<ReplicateResult> replicates(static_cast<std::size_t>(cfg.reps));
  const int threads = cfg.workers > 0 ? cfg.workers : omp_get_max_threads();
  const long report_every = std::max(1L, cfg.reps / 20);
  std::atomic<long> done{0};

#pragma omp parallel for schedule(dynamic, 64) num_threads(threads)
  for (long r = 0; r < cfg.reps; ++r) {
    replicates[static_cast<std::size_t>(r)] = simulate_replicate(cfg, r);
    const long finished = done.fetch_add(1, std::memory_order_relaxed) + 1;
    if (progress && finished % report_every == 0) {
#pragma omp critical(llfit_progress)
      *progress << "  n=" << cfg.n << " p=" << cfg.p << ": " << finished << "/" << cfg.reps << " replications\n"
                << std::flush;
    }
  }
  return aggregate(cfg, replicates);
}

TableAsset emit_table(std::span<const CellResult> cells)
{
  TableAsset asset;
  CriticalValueTable table;
  table.add_header_line("llfit critical-value table");
  table.add_header_line("format: llfit-critical-values 1");
  table.add_header_line(std::string("generator: llfit ") + version + " (mt19937_64 streams, SplitMix64 seeding)");

  std::set<std::uint64_t> seeds;
  std::set<long> reps;
  std::set<double> ps;
  std::set<long> ns;
  for (const auto& cell : cells) {
    seeds.insert(cell.config.master_seed);
    reps.insert(cell.config.reps);
    ps.insert(cell.config.p);
    ns.insert(cell.config.n);
  }
  auto join = [](const auto& values) {
    std::ostringstream out;
    bool first = true;
    for (const auto& v : values) {
      out << (first ? "" : ",") << v;
      first = false;
    }
    return out.str();
  };
  table.add_header_line("master_seed: " + join(seeds));
  table.add_header_line("reps: " + join(reps));

  for (const auto& cell : cells) {
    const auto& cfg = cell.config;
    char line[256];
    std::snprintf(line, sizeof line, "cell p=%.10g n=%ld beta_gen=%.10g reps=%ld kept=%ld discarded=%ld failed=%ld",
                  cfg.p, cfg.n, cfg.beta_gen, cfg.reps, cell.kept, cell.discarded, cell.failed);
    table.add_header_line(line);
    for (std::size_t i = 0; i < cfg.levels.size(); ++i) {
      if (std::isnan(cell.ks[i].quantile)) {
        asset.warnings.push_back("cell p=" + std::to_string(cfg.p) + " n=" + std::to_string(cfg.n) +
                                 " kept fewer than 100 replications; omitted");
        continue;
      }
      table.insert({GofTest::ks, cfg.levels[i], cfg.p, cfg.n}, {cell.ks[i].quantile, cell.ks[i].std_err});
      table.insert({GofTest::ad, cfg.levels[i], cfg.p, cfg.n}, {cell.ad[i].quantile, cell.ad[i].std_err});
    }
  }
  table.add_header_line("columns: test level p n quantile std_err");

  std::set<std::pair<double, long>> covered;
  for (const auto& cell : cells)
    covered.insert({cell.config.p, cell.config.n});
  if (covered.size() != ps.size() * ns.size())
    asset.warnings.push_back("cells do not cover the full p x N grid (" + std::to_string(covered.size()) + " of " +
                             std::to_string(ps.size() * ns.size()) + ")");

  asset.text = table.to_text();
  return asset;
}

void write_raw(std::ostream& out, const CellResult& cell, GofTest test)
{
  const auto& values = test == GofTest::ks ? cell.ks_values : cell.ad_values;
  char buf[40];
  for (double v : values) {
    std::snprintf(buf, sizeof buf, "%.17g\n", v);
    out << buf;
  }
}

}  // namespace llfit
