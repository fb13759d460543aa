#pragma once

#include "spinent/lanczos.hpp"

#include <Eigen/Dense>

namespace spinent {

/// Two-site reduced density matrix in the basis {uu, ud, du, dd}
/// (u = S^z +1/2). Sites are 1-based with site_i < site_j.
struct TwoQubitDensityMatrix {
  Eigen::Matrix4cd rho = Eigen::Matrix4cd::Identity() / 4.0;
  int site_i = 1;
  int site_j = 2;

  int separation() const noexcept { return site_j - site_i; }
};

struct DensityMatrixCheck {
  double hermiticity_error = 0.0;  // max |rho - rho^dagger|
  double trace_error = 0.0;        // |tr rho - 1|
  double min_eigenvalue = 0.0;

  bool ok(double tol = 1e-12) const {
    return hermiticity_error <= tol && trace_error <= tol && min_eigenvalue >= -tol;
  }
};

DensityMatrixCheck check_density_matrix(const Eigen::Matrix4cd& rho);

/// Hermitian part, rescaled to unit trace, with negative eigenvalues clipped.
/// Returns the total weight that was clipped.
double project_to_density_matrix(Eigen::Matrix4cd& rho);

struct MagnetizationRecord {
  double sx_uniform = 0.0;           // (1/N) sum <S^x_i>
  double sz_staggered = 0.0;         // |(1/N) sum (-1)^i <S^z_i>|
  double sz_staggered_signed = 0.0;  // same without the absolute value
};

/// Partial trace of |psi><psi| over every site except i and j (1-based).
TwoQubitDensityMatrix reduced_density_matrix(const StateVector& state, int i, int j);

MagnetizationRecord magnetizations(const StateVector& state);

/// <S^z_k> and <S^x_k> for a 1-based site.
double site_sz(const StateVector& state, int site);
double site_sx(const StateVector& state, int site);

/// Default measurement bond (floor(N/2), floor(N/2) + separation).
std::pair<int, int> central_pair(int n_sites, int separation = 1);

}  // namespace spinent
