#include "spinent/observables.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>
#include <string>

namespace spinent {

DensityMatrixCheck check_density_matrix(const Eigen::Matrix4cd& rho) {
  DensityMatrixCheck c;
  c.hermiticity_error = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  c.trace_error = std::abs(rho.trace() - 1.0);
  const Eigen::Matrix4cd herm = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(herm, Eigen::EigenvaluesOnly);
  c.min_eigenvalue = es.eigenvalues()[0];
  return c;
}

double project_to_density_matrix(Eigen::Matrix4cd& rho) {
  Eigen::Matrix4cd herm = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(herm);
  Eigen::Vector4d w = es.eigenvalues();
  double clipped = 0.0;
  for (int k = 0; k < 4; ++k) {
    if (w[k] < 0.0) {
      clipped -= w[k];
      w[k] = 0.0;
    }
  }
  if (clipped == 0.0) {
    rho = herm / herm.trace().real();
    return 0.0;
  }
  const double total = w.sum();
  if (!(total > 0.0)) throw std::invalid_argument("matrix has no positive part");
  rho = es.eigenvectors() * (w / total).cast<std::complex<double>>().asDiagonal() *
        es.eigenvectors().adjoint();
  return clipped;
}

namespace {

void check_state(const StateVector& state) {
  if (state.n_sites < 1 ||
      state.amplitudes.size() != (Eigen::Index{1} << state.n_sites))
    throw std::invalid_argument("state vector size does not match its site count");
}

void check_site(const StateVector& state, int site) {
  if (site < 1 || site > state.n_sites)
    throw std::out_of_range("site index " + std::to_string(site) + " outside 1.." +
                            std::to_string(state.n_sites));
}

}  // namespace

TwoQubitDensityMatrix reduced_density_matrix(const StateVector& state, int i, int j) {
  check_state(state);
  check_site(state, i);
  check_site(state, j);
  if (i >= j) throw std::out_of_range("reduced_density_matrix requires i < j");

  const unsigned bi = static_cast<unsigned>(i - 1);
  const unsigned bj = static_cast<unsigned>(j - 1);
  const Eigen::Index mask_i = Eigen::Index{1} << bi;
  const Eigen::Index mask_j = Eigen::Index{1} << bj;
  const Eigen::Index dim = state.amplitudes.size();
  const auto& psi = state.amplitudes;

  Eigen::Matrix4d acc = Eigen::Matrix4d::Zero();
  for (Eigen::Index k = 0; k < dim; ++k) {
    if ((k & mask_i) || (k & mask_j)) continue;  // k enumerates environment configurations
    const Eigen::Index idx[4] = {k, k | mask_j, k | mask_i, k | mask_i | mask_j};
    double amp[4];
    for (int a = 0; a < 4; ++a) amp[a] = psi[idx[a]];
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) acc(a, b) += amp[a] * amp[b];
  }

  TwoQubitDensityMatrix out;
  out.rho = acc.cast<std::complex<double>>();
  out.site_i = i;
  out.site_j = j;
  return out;
}

double site_sz(const StateVector& state, int site) {
  check_state(state);
  check_site(state, site);
  const Eigen::Index mask = Eigen::Index{1} << (site - 1);
  double acc = 0.0;
  for (Eigen::Index k = 0; k < state.amplitudes.size(); ++k) {
    const double p = state.amplitudes[k] * state.amplitudes[k];
    acc += (k & mask) ? -0.5 * p : 0.5 * p;
  }
  return acc;
}

double site_sx(const StateVector& state, int site) {
  check_state(state);
  check_site(state, site);
  const Eigen::Index mask = Eigen::Index{1} << (site - 1);
  double acc = 0.0;
  for (Eigen::Index k = 0; k < state.amplitudes.size(); ++k)
    acc += state.amplitudes[k] * state.amplitudes[k ^ mask];
  return 0.5 * acc;
}

MagnetizationRecord magnetizations(const StateVector& state) {
  check_state(state);
  MagnetizationRecord m;
  const int n = state.n_sites;
  double sx = 0.0;
  double stag = 0.0;
  for (int site = 1; site <= n; ++site) {
    sx += site_sx(state, site);
    stag += staggered_sign(site - 1) * site_sz(state, site);
  }
  m.sx_uniform = sx / n;
  m.sz_staggered_signed = stag / n;
  m.sz_staggered = std::abs(m.sz_staggered_signed);
  return m;
}

std::pair<int, int> central_pair(int n_sites, int separation) {
  const int i = std::max(1, n_sites / 2 - (separation - 1) / 2);
  const int j = i + separation;
  if (j > n_sites) throw std::out_of_range("chain too short for the requested pair separation");
  return {i, j};
}

}  // namespace spinent
