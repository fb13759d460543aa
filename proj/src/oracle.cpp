#include "spinent/oracle.hpp"

#include "spinent/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace spinent::oracle {

namespace {

using cd = std::complex<double>;

double min_eig(const Eigen::Matrix4d& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues()[0];
}

Eigen::Matrix4d pt(const Eigen::Matrix4d& m) {
  return partial_transpose(m.cast<cd>()).real();
}

// Pauli matrices in the {up, down} basis; Y is kept as -iY so that it is real.
Eigen::Matrix2d pauli_real(int k) {
  Eigen::Matrix2d m;
  switch (k) {
    case 0: m << 1, 0, 0, 1; break;
    case 1: m << 0, 1, 1, 0; break;
    case 2: m << 0, -1, 1, 0; break;  // -i * sigma_y
    default: m << 1, 0, 0, -1; break;
  }
  return m;
}

Eigen::Matrix2cd pauli(int k) {
  Eigen::Matrix2cd m = pauli_real(k).cast<cd>();
  if (k == 2) m *= cd(0, 1);
  return m;
}

/// sigma_a on site p applied to the whole state; for a == 2 the result is
/// -i sigma_y |psi>, which stays real.
Eigen::VectorXd apply_pauli(const Eigen::VectorXd& psi, int site, int a) {
  if (a == 0) return psi;
  const std::uint64_t bit = std::uint64_t{1} << site;
  Eigen::VectorXd out(psi.size());
  const Eigen::Matrix2d p = pauli_real(a);
  for (Eigen::Index idx = 0; idx < psi.size(); ++idx) {
    const auto u = static_cast<std::uint64_t>(idx);
    const int s = (u & bit) ? 1 : 0;
    const auto flipped = static_cast<Eigen::Index>(u ^ bit);
    // out[idx] = sum_t p(s, t) psi[t-state]
    out[idx] = p(s, s) * psi[idx] + p(s, 1 - s) * psi[flipped];
  }
  return out;
}

struct PtRoot {
  double t = 0.0;
  bool found = false;
};

/// Smallest t in [0, 1] with mineig((rho - t P)^T_B) >= 0. The map is
/// concave in t, so it rises up to its maximum and the root lies before it.
PtRoot lower_pt_root(const Eigen::Matrix4d& rho_pt, const Eigen::Matrix4d& p_pt) {
  auto f = [&](double t) { return min_eig(rho_pt - t * p_pt); };
  if (f(0.0) >= 0.0) return {0.0, true};
  double a = 0.0;
  double b = 1.0;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - g * (b - a);
  double x2 = a + g * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int it = 0; it < 80 && b - a > 1e-12; ++it) {
    if (f1 >= 0.0 || f2 >= 0.0) break;
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = f(x1);
    }
  }
  double hi;
  if (f1 >= 0.0) hi = x1;
  else if (f2 >= 0.0) hi = x2;
  else if (f(1.0) >= 0.0) hi = 1.0;
  else return {};
  double lo = 0.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) >= 0.0) hi = mid;
    else lo = mid;
  }
  return {hi, true};
}

Eigen::Vector4d bell_to_computational(const Eigen::Vector4d& v) {
  return bell_basis().real() * v;
}

}  // namespace

std::string_view to_string(Method m) {
  switch (m) {
    case Method::dense_eig: return "dense-eig";
    case Method::partial_trace_direct: return "partial-trace-direct";
    case Method::ls_grid: return "ls-grid";
    case Method::werner_analytic: return "werner-analytic";
  }
  return "?";
}

StateVector dense_ground_state(const SparseOperator& H) {
  if (H.dimension() > kMaxDenseDimension)
    throw CapacityError("dense_ground_state: dimension " + std::to_string(H.dimension()) +
                        " exceeds " + std::to_string(kMaxDenseDimension));
  const Eigen::MatrixXd m = H.to_dense();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  if (es.info() != Eigen::Success) throw NumericalError("dense_ground_state: eigensolver failed");
  StateVector s;
  s.n_sites = H.n_sites();
  s.amplitudes = es.eigenvectors().col(0);
  s.energy = es.eigenvalues()[0];
  s.residual = (m * s.amplitudes - s.energy * s.amplitudes).norm();
  if (es.eigenvalues().size() > 1) {
    s.gap = es.eigenvalues()[1] - es.eigenvalues()[0];
    s.degenerate = *s.gap < 1e-8;
  }
  return s;
}

TwoQubitDensityMatrix partial_trace_direct(const StateVector& state, int i, int j) {
  if (i < 1 || j <= i || j > state.n_sites)
    throw std::out_of_range("partial_trace_direct: need 1 <= i < j <= N");
  const Eigen::VectorXd& psi = state.amplitudes;
  TwoQubitDensityMatrix out;
  out.site_i = i;
  out.site_j = j;
  out.rho.setZero();
  for (int a = 0; a < 4; ++a) {
    const Eigen::VectorXd pa = apply_pauli(psi, i - 1, a);
    for (int b = 0; b < 4; ++b) {
      const Eigen::VectorXd pab = apply_pauli(pa, j - 1, b);
      // <sigma_a sigma_b>; each real -i sigma_y contributes a factor i back
      cd expect = psi.dot(pab);
      if (a == 2) expect *= cd(0, 1);
      if (b == 2) expect *= cd(0, 1);
      Eigen::Matrix4cd op;
      const Eigen::Matrix2cd sa = pauli(a);
      const Eigen::Matrix2cd sb = pauli(b);
      for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) op(r, c) = sa(r / 2, c / 2) * sb(r % 2, c % 2);
      out.rho += expect * op / 4.0;
    }
  }
  return out;
}

LSDecomposition ls_grid_search(const TwoQubitDensityMatrix& rho, int grid_density) {
  if (grid_density < 9) throw std::invalid_argument("ls_grid_search: grid_density must be >= 9");
  LSDecomposition out;
  out.c_rho = concurrence(rho.rho);
  const PptResult ppt = ppt_check(rho.rho);
  if (ppt.separable) {
    out.separable = true;
    out.lambda = 1.0;
    out.c_rho = 0.0;
    out.rho_s = rho;
    return out;
  }
  out.separable = false;

  const Eigen::Matrix4d r = rho.rho.real();
  const Eigen::Matrix4d r_pt = pt(r);
  const double pi = std::numbers::pi;
  const int n = grid_density;

  double best_t = 2.0;
  Eigen::Vector4d best_v = Eigen::Vector4d::Unit(0);
  // Angles (chi, theta, phi) cover the unit 3-sphere; phi stops at pi
  // because v and -v are the same state.
  for (int i = 0; i < n; ++i) {
    const double chi = pi * i / (n - 1);
    for (int k = 0; k < n; ++k) {
      const double theta = pi * k / (n - 1);
      for (int l = 0; l < n; ++l) {
        const double phi = pi * l / (n - 1);
        Eigen::Vector4d v;
        v << std::cos(chi), std::sin(chi) * std::cos(theta),
            std::sin(chi) * std::sin(theta) * std::cos(phi),
            std::sin(chi) * std::sin(theta) * std::sin(phi);
        const Eigen::Vector4d u = bell_to_computational(v);
        const Eigen::Matrix4d p = u * u.transpose();
        const PtRoot root = lower_pt_root(r_pt, pt(p));
        if (!root.found || root.t >= best_t) continue;
        // Positivity only degrades as t grows, so failing here rules out v.
        if (min_eig(r - root.t * p) < -1e-9) continue;
        best_t = root.t;
        best_v = v;
      }
    }
  }

  if (best_t > 1.0) {
    out.lambda = 0.0;
    out.rho_s.rho = Eigen::Matrix4cd::Identity() / 4.0;
    return out;
  }
  out.lambda = 1.0 - best_t;
  for (int k = 0; k < 4; ++k)
    if (std::abs(best_v[k]) > 1e-12) {
      if (best_v[k] < 0) best_v = -best_v;
      break;
    }
  out.bell = BellCoefficients{best_v[0], best_v[1], best_v[2], best_v[3]};
  out.c_rho_e = out.bell->concurrence();
  const Eigen::Vector4cd u = out.bell->computational();
  out.rho_s.site_i = rho.site_i;
  out.rho_s.site_j = rho.site_j;
  out.rho_s.rho = out.lambda > 0.0
                      ? Eigen::Matrix4cd((rho.rho - best_t * (u * u.adjoint())) / out.lambda)
                      : Eigen::Matrix4cd(Eigen::Matrix4cd::Identity() / 4.0);
  out.certificate_gap = out.c_rho - best_t * *out.c_rho_e;
  return out;
}

TwoQubitDensityMatrix werner_state(double p) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("werner_state: p must lie in [0, 1]");
  const Eigen::Vector4cd singlet = bell_basis().col(0);
  TwoQubitDensityMatrix w;
  w.rho = p * singlet * singlet.adjoint() + (1.0 - p) * Eigen::Matrix4cd::Identity() / 4.0;
  return w;
}

std::pair<double, double> werner_values(double p) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("werner_values: p must lie in [0, 1]");
  const double c = std::max(0.0, 0.5 * (3.0 * p - 1.0));
  return {c, c};
}

}  // namespace spinent::oracle
