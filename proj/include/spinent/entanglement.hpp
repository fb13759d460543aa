#pragma once

#include "spinent/observables.hpp"

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>

namespace spinent {

/// Amplitudes of |Psi_e> = a|psi-> + b|psi+> + c|phi-> + d|phi+>, with
/// |psi+-> = (|ud> +- |du>)/sqrt2 and |phi+-> = (|uu> +- |dd>)/sqrt2.
struct BellCoefficients {
  std::complex<double> a, b, c, d;

  Eigen::Vector4cd as_vector() const { return {a, b, c, d}; }
  static BellCoefficients from_vector(const Eigen::Vector4cd& v) { return {v[0], v[1], v[2], v[3]}; }

  double a2() const { return std::norm(a); }
  double b2() const { return std::norm(b); }
  double c2() const { return std::norm(c); }
  double d2() const { return std::norm(d); }
  double norm_squared() const { return a2() + b2() + c2() + d2(); }

  /// Concurrence of the pure state, |a^2 - b^2 - c^2 + d^2| (complex squares).
  double concurrence() const { return std::abs(a * a - b * b - c * c + d * d); }

  /// The same state in the computational basis {uu, ud, du, dd}.
  Eigen::Vector4cd computational() const;
};

/// Columns are |psi->, |psi+>, |phi->, |phi+> in the computational basis.
const Eigen::Matrix4cd& bell_basis();

/// rho expressed in the Bell basis (psi-, psi+, phi-, phi+).
Eigen::Matrix4cd bell_transform(const Eigen::Matrix4cd& rho);
Eigen::Matrix4cd bell_inverse_transform(const Eigen::Matrix4cd& rho_bell);

/// Partial transpose over the second qubit.
Eigen::Matrix4cd partial_transpose(const Eigen::Matrix4cd& rho);

/// Wootters concurrence. Eigenvalues of R within -1e-12 of zero are clamped;
/// anything more negative raises NumericalError.
double concurrence(const Eigen::Matrix4cd& rho);
inline double concurrence(const TwoQubitDensityMatrix& rho) { return concurrence(rho.rho); }

struct PptResult {
  bool separable = false;
  double min_pt_eigenvalue = 0.0;
  double min_eigenvalue = 0.0;
};

/// Peres-Horodecki test, exact for two qubits: separable iff the input is
/// positive and its partial transpose has no eigenvalue below -tol_ppt.
PptResult ppt_check(const Eigen::Matrix4cd& rho, double tol_ppt = 1e-9, double tol_psd = 1e-9);
inline PptResult ppt_check(const TwoQubitDensityMatrix& rho) { return ppt_check(rho.rho); }

enum class BellMode { real, complex };

struct LsOptions {
  BellMode mode = BellMode::real;
  int starts = 64;
  std::uint64_t seed = 20050301;
  double lambda_tol = 1e-7;
  double tol_psd = 1e-9;
  double tol_ppt = 1e-9;
  double separable_concurrence = 1e-8;
  double certificate_tol = 1e-5;
  /// Locally maximise Lambda over the Bell vector once bisection has finished.
  bool polish = true;
};

struct LSDecomposition {
  double lambda = 1.0;
  std::optional<BellCoefficients> bell;  // empty when rho is separable
  TwoQubitDensityMatrix rho_s;
  double c_rho = 0.0;
  std::optional<double> c_rho_e;
  bool separable = true;
  /// c_rho - (1 - lambda) * c_rho_e; zero for the optimal split.
  double certificate_gap = 0.0;
  long evaluations = 0;

  double one_minus_lambda() const { return 1.0 - lambda; }
};

/// The decomposition failed the C(rho) = (1 - Lambda) C(rho_e) check.
class CertificateError : public std::runtime_error {
 public:
  CertificateError(const std::string& what, LSDecomposition best)
      : std::runtime_error(what), best_(std::move(best)) {}
  const LSDecomposition& best() const noexcept { return best_; }
  double gap() const noexcept { return best_.certificate_gap; }

 private:
  LSDecomposition best_;
};

/// Optimal split rho = Lambda rho_s + (1 - Lambda)|Psi_e><Psi_e| with the
/// largest separable weight Lambda.
///
/// Lambda is found by bisection. A trial value is feasible when some Bell
/// vector and some Lambda' >= Lambda leave a residual rho_s that is positive
/// with a positive partial transpose; that predicate is monotone, so the
/// bisection brackets the optimum. Feasibility is decided by a multi-start
/// Nelder-Mead search that maximises min(mineig(rho_s), mineig(rho_s^T_B)).
LSDecomposition ls_decompose(const TwoQubitDensityMatrix& rho, const LsOptions& opts = {});

/// min(mineig(rho_s), mineig(rho_s^T_B)) of rho_s = (rho - (1-lambda)|psi><psi|)/lambda,
/// with psi given by its Bell coefficients.
double residual_margin(const Eigen::Matrix4cd& rho, const BellCoefficients& bell, double lambda);

}  // namespace spinent
