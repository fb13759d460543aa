#pragma once

#include "spinent/lanczos.hpp"
#include "spinent/observables.hpp"
#include "spinent/spin_model.hpp"

#include <string>
#include <vector>

namespace spinent {

inline constexpr int kMaxKeptStates = 256;

struct DmrgConfig {
  int kept_states = 64;
  int max_iterations = 600;  // growth steps, two sites each
  double energy_tol = 1e-9;  // on the change of energy per site
  int stable_steps = 3;      // consecutive steps below energy_tol
  /// Superblock eigensolver. The energy error goes as the square of the
  /// residual, so a looser tolerance than the ED default is enough.
  LanczosOptions lanczos = [] {
    LanczosOptions o;
    o.tol = 1e-8;
    o.max_krylov = 100;
    return o;
  }();

  void validate() const;
};

struct DmrgResult {
  double energy_per_site = 0.0;
  /// The two middle sites of the final superblock, ordered so the first is
  /// on the sublattice the pin pushes up.
  TwoQubitDensityMatrix central;
  MagnetizationRecord magnetization;  // from the two middle sites
  double truncation_weight = 0.0;     // largest discarded weight over the run
  double last_truncation_weight = 0.0;
  double last_delta = 0.0;
  int iterations = 0;
  int chain_length = 0;
  std::vector<std::string> warnings;
};

/// Infinite-system DMRG: both blocks grow by one site per step and are
/// truncated to `kept_states` eigenvectors of their reduced density matrix.
/// The left and right blocks are kept separately because a staggered pin
/// breaks the reflection symmetry. `params.n_sites` and `params.boundary`
/// are ignored; the chain is open and grows without bound.
/// Throws ConvergenceError if the energy per site has not settled after
/// `max_iterations` steps.
DmrgResult idmrg_ground_state(const ModelParams& params, const DmrgConfig& cfg = {});

}  // namespace spinent
