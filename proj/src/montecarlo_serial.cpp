#include "llfit/montecarlo.hpp"

namespace llfit {

// Reference path for run_cell: same replicate kernel, plain loop.
CellResult run_cell_serial(const SimConfig& cfg)
{
  cfg.validate();
  std::vector<ReplicateResult> replicates;
  replicates.reserve(static_cast<std::size_t>(cfg.reps));
  for (long r = 0; r < cfg.reps; ++r)
    replicates.push_back(simulate_replicate(cfg, r));
  return aggregate(cfg, replicates);
}

}  // namespace llfit
