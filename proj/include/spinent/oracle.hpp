#pragma once

#include "spinent/entanglement.hpp"
#include "spinent/lanczos.hpp"
#include "spinent/observables.hpp"
#include "spinent/spin_model.hpp"

#include <string>
#include <string_view>
#include <utility>

// Slow reference paths used to check the production solvers.
namespace spinent::oracle {

enum class Method { dense_eig, partial_trace_direct, ls_grid, werner_analytic };

std::string_view to_string(Method m);

struct OracleReport {
  std::string quantity;
  double reference_value = 0.0;
  Method method = Method::dense_eig;
};

inline constexpr std::uint64_t kMaxDenseDimension = 4096;

/// Lowest eigenpair from a full dense eigendecomposition.
/// Throws CapacityError above kMaxDenseDimension.
StateVector dense_ground_state(const SparseOperator& H);

/// Two-site density matrix rebuilt from the sixteen Pauli-string
/// expectation values, each evaluated on the full state.
TwoQubitDensityMatrix partial_trace_direct(const StateVector& state, int i, int j);

/// Exhaustive search over real Bell vectors on a hyperspherical grid with
/// `grid_density` points per angle. For each vector the smallest admissible
/// entangled weight is bracketed by golden-section and bisection steps on
/// mineig of the partially transposed residual.
LSDecomposition ls_grid_search(const TwoQubitDensityMatrix& rho, int grid_density);

/// p |psi-><psi-| + (1 - p) I/4
TwoQubitDensityMatrix werner_state(double p);

/// (concurrence, 1 - Lambda) of the Werner state.
std::pair<double, double> werner_values(double p);

}  // namespace spinent::oracle
