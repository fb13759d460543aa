#pragma once

#include "spinent/spin_model.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace spinent {

struct LanczosOptions {
  double tol = 1e-10;  // on ||Hv - Ev|| / max(1, |E|)
  std::uint64_t seed = 1;
  int max_krylov = 200;
  int max_restarts = 60;
  /// Also compute the first excited level to flag (quasi-)degenerate ground states.
  bool check_degeneracy = false;
  double degeneracy_threshold = 1e-8;
  std::size_t memory_budget_bytes = std::size_t{2} << 30;
};

/// Ground state of a chain Hamiltonian. Amplitudes are real because every
/// supported Hamiltonian is real in the S^z basis.
struct StateVector {
  int n_sites = 0;
  Eigen::VectorXd amplitudes;
  double energy = 0.0;
  double residual = 0.0;
  int matvecs = 0;
  /// Set only when the gap was computed (LanczosOptions::check_degeneracy).
  std::optional<double> gap;
  bool degenerate = false;
};

using MatVec = std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>;

struct EigenPair {
  Eigen::VectorXd vector;
  double value = 0.0;
  double residual = 0.0;
  int matvecs = 0;
};

/// Lowest eigenpair of a real symmetric operator given only its action.
/// Uses full reorthogonalisation with explicit restarts. `initial` seeds the
/// Krylov space (a random vector from `opts.seed` otherwise); `deflate` lists
/// orthonormal vectors whose span is projected out at every step.
/// Throws ConvergenceError after `max_restarts` unsuccessful cycles.
EigenPair lanczos_lowest(const MatVec& matvec, Eigen::Index dim, const LanczosOptions& opts,
                         const Eigen::VectorXd* initial = nullptr,
                         const std::vector<Eigen::VectorXd>& deflate = {});

/// `initial`, when given, replaces the random start vector (e.g. the ground
/// state of a nearby parameter point).
StateVector lanczos_ground_state(const SparseOperator& H, const LanczosOptions& opts,
                                 const Eigen::VectorXd* initial = nullptr);

inline StateVector lanczos_ground_state(const SparseOperator& H, double tol, std::uint64_t seed) {
  LanczosOptions opts;
  opts.tol = tol;
  opts.seed = seed;
  return lanczos_ground_state(H, opts);
}

/// Deterministic pseudo-random vector with entries uniform in [-1, 1).
Eigen::VectorXd seeded_random_vector(Eigen::Index dim, std::uint64_t seed);

}  // namespace spinent
