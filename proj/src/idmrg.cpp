#include "spinent/idmrg.hpp"

#include "spinent/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace spinent {

namespace {

using Eigen::MatrixXd;

// One-site operators in the basis {up, down}. iSy = i S^y is real, and
// Sy Sy = -(iSy)(iSy).
struct SiteOps {
  MatrixXd sx, isy, sz, id;
  SiteOps() : sx(2, 2), isy(2, 2), sz(2, 2), id(MatrixXd::Identity(2, 2)) {
    sx << 0, 0.5, 0.5, 0;
    isy << 0, 0.5, -0.5, 0;
    sz << 0.5, 0, 0, -0.5;
  }
};

MatrixXd kron(const MatrixXd& a, const MatrixXd& b) {
  MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

struct Block {
  MatrixXd h;
  // operators of the site at the block edge that faces the centre
  MatrixXd sx, isy, sz;
  Eigen::Index dim() const { return h.rows(); }
};

struct Couplings {
  double jx, jy, jz, h, pin;
};

MatrixXd site_term(const SiteOps& s, const Couplings& c, double stagger) {
  return -c.h * s.sx - c.pin * stagger * s.sz;
}

MatrixXd bond(const MatrixXd& ax, const MatrixXd& ay, const MatrixXd& az, const MatrixXd& bx,
              const MatrixXd& by, const MatrixXd& bz, const Couplings& c) {
  return c.jx * kron(ax, bx) - c.jy * kron(ay, by) + c.jz * kron(az, bz);
}

/// Block plus one site on its right: basis index = block * 2 + site.
Block grow_left(const Block& b, const SiteOps& s, const Couplings& c, double stagger) {
  const MatrixXd idb = MatrixXd::Identity(b.dim(), b.dim());
  Block out;
  out.h = kron(b.h, s.id) + kron(idb, site_term(s, c, stagger)) +
          bond(b.sx, b.isy, b.sz, s.sx, s.isy, s.sz, c);
  out.sx = kron(idb, s.sx);
  out.isy = kron(idb, s.isy);
  out.sz = kron(idb, s.sz);
  return out;
}

/// One site on the left of the block: basis index = site * dim + block.
Block grow_right(const Block& b, const SiteOps& s, const Couplings& c, double stagger) {
  const MatrixXd idb = MatrixXd::Identity(b.dim(), b.dim());
  Block out;
  out.h = kron(s.id, b.h) + kron(site_term(s, c, stagger), idb) +
          bond(s.sx, s.isy, s.sz, b.sx, b.isy, b.sz, c);
  out.sx = kron(s.sx, idb);
  out.isy = kron(s.isy, idb);
  out.sz = kron(s.sz, idb);
  return out;
}

Block first_site(const SiteOps& s, const Couplings& c, double stagger) {
  return {site_term(s, c, stagger), s.sx, s.isy, s.sz};
}

/// Keep the dominant eigenvectors of a block density matrix; returns the
/// discarded weight.
double truncate(Block& b, const MatrixXd& rho, int kept) {
  if (b.dim() <= kept) return 0.0;
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(rho);
  const MatrixXd u = es.eigenvectors().rightCols(kept);
  const double total = es.eigenvalues().sum();
  const double discarded = std::max(0.0, total - es.eigenvalues().tail(kept).sum());
  b.h = u.transpose() * b.h * u;
  b.sx = u.transpose() * b.sx * u;
  b.isy = u.transpose() * b.isy * u;
  b.sz = u.transpose() * b.sz * u;
  return discarded;
}

}  // namespace

void DmrgConfig::validate() const {
  if (kept_states < 4 || kept_states > kMaxKeptStates)
    throw std::invalid_argument("kept_states must lie in [4, " + std::to_string(kMaxKeptStates) + "]");
  if (!(energy_tol > 0.0)) throw std::invalid_argument("energy_tol must be positive");
  if (max_iterations < 1) throw std::invalid_argument("max_iterations must be positive");
  if (stable_steps < 1) throw std::invalid_argument("stable_steps must be positive");
}

DmrgResult idmrg_ground_state(const ModelParams& params, const DmrgConfig& cfg) {
  ModelParams checked = params;
  checked.n_sites = std::max(checked.n_sites, 2);
  checked.validate();
  cfg.validate();

  const SiteOps s;
  const BondTerm j = bond_couplings(params);
  const Couplings c{j.jx, j.jy, j.jz, params.h, params.pin_eps};

  // With n sites in each block the chain has sites 0 .. 2n + 1. The left
  // block holds 0 .. n - 1 and the right block the last n, whose staggered
  // signs never change because the length stays even.
  Block left = first_site(s, c, staggered_sign(0));
  Block right = first_site(s, c, staggered_sign(1));

  DmrgResult out;
  double previous_energy = 0.0;
  double previous_e = 0.0;
  int stable = 0;

  for (int step = 1; step <= cfg.max_iterations; ++step) {
    const int n = step;  // sites per block before this step's growth
    const Block lenl = grow_left(left, s, c, staggered_sign(n));
    const Block renl = grow_right(right, s, c, staggered_sign(n + 1));
    const Eigen::Index dl = lenl.dim();
    const Eigen::Index dr = renl.dim();

    const MatrixXd lx = lenl.sx, ly = lenl.isy, lz = lenl.sz;
    const MatrixXd rxt = renl.sx.transpose(), ryt = renl.isy.transpose(), rzt = renl.sz.transpose();
    const MatrixXd rht = renl.h.transpose();
    MatVec matvec = [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
      const Eigen::Map<const MatrixXd> psi(x.data(), dl, dr);
      Eigen::Map<MatrixXd> out_psi(y.data(), dl, dr);
      out_psi.noalias() = lenl.h * psi;
      out_psi.noalias() += psi * rht;
      MatrixXd tmp(dl, dr);
      tmp.noalias() = lx * psi;
      out_psi.noalias() += c.jx * tmp * rxt;
      tmp.noalias() = ly * psi;
      out_psi.noalias() -= c.jy * tmp * ryt;
      tmp.noalias() = lz * psi;
      out_psi.noalias() += c.jz * tmp * rzt;
    };

    const EigenPair gs = lanczos_lowest(matvec, dl * dr, cfg.lanczos);
    const Eigen::Map<const MatrixXd> psi(gs.vector.data(), dl, dr);

    const int length = 2 * n + 2;
    const double e = step == 1 ? gs.value / length : 0.5 * (gs.value - previous_energy);
    const double delta = step == 1 ? std::abs(e) : std::abs(e - previous_e);
    previous_energy = gs.value;
    previous_e = e;

    // Two central sites: row index l * 2 + s1, column index s2 * dr' + r.
    const Eigen::Index bl = dl / 2;
    const Eigen::Index br = dr / 2;
    Eigen::Matrix4d rho = Eigen::Matrix4d::Zero();
    for (int a1 = 0; a1 < 2; ++a1)
      for (int a2 = 0; a2 < 2; ++a2)
        for (int b1 = 0; b1 < 2; ++b1)
          for (int b2 = 0; b2 < 2; ++b2) {
            double acc = 0.0;
            for (Eigen::Index l = 0; l < bl; ++l)
              acc += psi.row(l * 2 + a1).segment(a2 * br, br).dot(psi.row(l * 2 + b1).segment(b2 * br, br));
            rho(2 * a1 + a2, 2 * b1 + b2) = acc;
          }

    // Which sublattice the middle pair starts on alternates with the step;
    // report it the same way round every time, first site on the + sublattice.
    if (staggered_sign(n) < 0) {
      Eigen::Matrix4d swap = Eigen::Matrix4d::Zero();
      swap(0, 0) = swap(1, 2) = swap(2, 1) = swap(3, 3) = 1.0;
      rho = swap * rho * swap;
    }

    left = lenl;
    right = renl;
    const double wl = truncate(left, psi * psi.transpose(), cfg.kept_states);
    const double wr = truncate(right, psi.transpose() * psi, cfg.kept_states);
    out.last_truncation_weight = std::max(wl, wr);
    out.truncation_weight = std::max(out.truncation_weight, out.last_truncation_weight);

    out.energy_per_site = e;
    out.central.rho = rho.cast<std::complex<double>>();
    out.central.site_i = n + 1;
    out.central.site_j = n + 2;
    out.iterations = step;
    out.chain_length = length;
    out.last_delta = delta;

    const double sz1 = 0.5 * (rho(0, 0) + rho(1, 1) - rho(2, 2) - rho(3, 3));
    const double sz2 = 0.5 * (rho(0, 0) - rho(1, 1) + rho(2, 2) - rho(3, 3));
    const double sx1 = rho(0, 2) + rho(1, 3);
    const double sx2 = rho(0, 1) + rho(2, 3);
    out.magnetization.sx_uniform = 0.5 * (sx1 + sx2);
    out.magnetization.sz_staggered_signed = 0.5 * (sz1 - sz2);
    out.magnetization.sz_staggered = std::abs(out.magnetization.sz_staggered_signed);

    stable = (step > 1 && delta < cfg.energy_tol) ? stable + 1 : 0;
    if (stable >= cfg.stable_steps) {
      if (out.last_truncation_weight > cfg.energy_tol) {
        std::ostringstream msg;
        msg << "kept_states = " << cfg.kept_states << " discards weight "
            << out.last_truncation_weight << ", above energy_tol";
        out.warnings.push_back(msg.str());
      }
      return out;
    }
  }

  std::ostringstream msg;
  msg << "idmrg: energy per site still moving by " << out.last_delta << " after "
      << cfg.max_iterations << " steps (tolerance " << cfg.energy_tol << ")";
  throw ConvergenceError(msg.str(), out.last_delta);
}

}  // namespace spinent
