#include "spinent/spin_model.hpp"

#include "spinent/errors.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace spinent {

Boundary parse_boundary(std::string_view name) {
  if (name == "open") return Boundary::open;
  if (name == "periodic") return Boundary::periodic;
  throw std::invalid_argument("unknown boundary '" + std::string(name) + "'");
}

Frame parse_frame(std::string_view name) {
  if (name == "lab") return Frame::lab;
  if (name == "order-axis" || name == "order_axis") return Frame::order_axis;
  throw std::invalid_argument("unknown frame '" + std::string(name) + "'");
}

std::string_view to_string(Boundary b) {
  return b == Boundary::open ? "open" : "periodic";
}

std::string_view to_string(Frame f) {
  return f == Frame::lab ? "lab" : "order-axis";
}

void ModelParams::validate() const {
  if (!(j_par >= 0.0) || !(j_perp >= 0.0))
    throw std::invalid_argument("couplings must be non-negative");
  if (!(h >= 0.0)) throw std::invalid_argument("field must be non-negative");
  if (n_sites < 2) throw std::invalid_argument("n_sites must be at least 2");
  if (!(pin_eps >= 0.0) || pin_eps > kMaxPin)
    throw std::invalid_argument("pin_eps must lie in [0, 0.1]");
  if (boundary == Boundary::periodic && n_sites < 3)
    throw std::invalid_argument("periodic chains need at least 3 sites");
}

SparseOperator::SparseOperator(int n_sites, std::vector<BondTerm> bonds,
                               std::vector<double> field_x,
                               std::vector<double> field_z)
    : n_sites_(n_sites), bonds_(std::move(bonds)), field_x_(std::move(field_x)) {
  if (n_sites < 1) throw std::invalid_argument("operator needs at least one site");
  if (n_sites > kMaxEdSites)
    throw CapacityError("2^" + std::to_string(n_sites) +
                        " basis states exceed the exact-diagonalization capacity (n_sites <= " +
                        std::to_string(kMaxEdSites) + ")");
  if (field_x_.size() != static_cast<std::size_t>(n_sites) ||
      field_z.size() != static_cast<std::size_t>(n_sites))
    throw std::invalid_argument("field vectors must have one entry per site");
  for (const auto& b : bonds_) {
    if (b.i < 0 || b.j < 0 || b.i >= n_sites || b.j >= n_sites || b.i == b.j)
      throw std::invalid_argument("bond references an invalid site pair");
  }

  const std::uint64_t dim = dimension();
  diagonal_.setZero(static_cast<Eigen::Index>(dim));
  for (std::uint64_t k = 0; k < dim; ++k) {
    double d = 0.0;
    for (const auto& b : bonds_) {
      const bool same = ((k >> b.i) & 1U) == ((k >> b.j) & 1U);
      d += same ? 0.25 * b.jz : -0.25 * b.jz;
    }
    for (int s = 0; s < n_sites; ++s) {
      const double sz = ((k >> s) & 1U) ? -0.5 : 0.5;
      d -= field_z[s] * sz;
    }
    diagonal_[static_cast<Eigen::Index>(k)] = d;
  }
}

void SparseOperator::apply(std::span<const double> x, std::span<double> y) const {
  const std::uint64_t dim = dimension();
  if (x.size() != dim || y.size() != dim)
    throw std::invalid_argument("vector size does not match operator dimension");

  for (std::uint64_t k = 0; k < dim; ++k) y[k] = diagonal_[static_cast<Eigen::Index>(k)] * x[k];

  // Term by term, so the inner loops run over contiguous runs of the vector.
  for (int s = 0; s < n_sites_; ++s) {
    if (field_x_[s] == 0.0) continue;
    const double c = -0.5 * field_x_[s];
    const std::uint64_t bit = std::uint64_t{1} << s;
    for (std::uint64_t base = 0; base < dim; base += 2 * bit) {
      double* lo = y.data() + base;
      double* hi = lo + bit;
      const double* xlo = x.data() + base;
      const double* xhi = xlo + bit;
      for (std::uint64_t k = 0; k < bit; ++k) {
        lo[k] += c * xhi[k];
        hi[k] += c * xlo[k];
      }
    }
  }
  for (const auto& b : bonds_) {
    const double flip = 0.25 * (b.jx + b.jy);  // ud <-> du
    const double pair = 0.25 * (b.jx - b.jy);  // uu <-> dd
    if (flip == 0.0 && pair == 0.0) continue;
    const std::uint64_t mask = (std::uint64_t{1} << b.i) | (std::uint64_t{1} << b.j);
    for (std::uint64_t k = 0; k < dim; ++k) {
      const bool same = ((k >> b.i) & 1U) == ((k >> b.j) & 1U);
      y[k] += (same ? pair : flip) * x[k ^ mask];
    }
  }
}

Eigen::VectorXd SparseOperator::apply(const Eigen::VectorXd& x) const {
  Eigen::VectorXd y(x.size());
  apply(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())),
        std::span<double>(y.data(), static_cast<std::size_t>(y.size())));
  return y;
}

std::vector<SparseOperator::Entry> SparseOperator::entries() const {
  std::vector<Entry> out;
  const std::uint64_t dim = dimension();
  for (std::uint64_t k = 0; k < dim; ++k) {
    const double d = diagonal_[static_cast<Eigen::Index>(k)];
    if (d != 0.0) out.push_back({k, k, d});
    for (int s = 0; s < n_sites_; ++s) {
      if (field_x_[s] != 0.0) out.push_back({k, k ^ (std::uint64_t{1} << s), -0.5 * field_x_[s]});
    }
    for (const auto& b : bonds_) {
      const std::uint64_t mask = (std::uint64_t{1} << b.i) | (std::uint64_t{1} << b.j);
      const bool same = ((k >> b.i) & 1U) == ((k >> b.j) & 1U);
      const double amp = same ? 0.25 * (b.jx - b.jy) : 0.25 * (b.jx + b.jy);
      if (amp != 0.0) out.push_back({k, k ^ mask, amp});
    }
  }
  return out;
}

Eigen::MatrixXd SparseOperator::to_dense() const {
  if (n_sites_ > kMaxDenseSites)
    throw CapacityError("dense materialisation is limited to n_sites <= " +
                        std::to_string(kMaxDenseSites));
  const auto dim = static_cast<Eigen::Index>(dimension());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
  for (const auto& e : entries())
    m(static_cast<Eigen::Index>(e.row), static_cast<Eigen::Index>(e.col)) += e.value;
  return m;
}

BondTerm bond_couplings(const ModelParams& p) {
  if (p.frame == Frame::order_axis && p.j_par > p.j_perp) return {0, 0, p.j_par, p.j_perp, p.j_par};
  return {0, 0, p.j_par, p.j_par, p.j_perp};
}

SparseOperator build_hamiltonian(const ModelParams& params) {
  params.validate();
  const int n = params.n_sites;
  if (n > kMaxEdSites)
    throw CapacityError("n_sites = " + std::to_string(n) +
                        " exceeds the exact-diagonalization capacity of " +
                        std::to_string(kMaxEdSites));

  const BondTerm coupling = bond_couplings(params);
  std::vector<BondTerm> bonds;
  const int n_bonds = params.boundary == Boundary::periodic ? n : n - 1;
  for (int i = 0; i < n_bonds; ++i) {
    BondTerm b = coupling;
    b.i = i;
    b.j = (i + 1) % n;
    bonds.push_back(b);
  }
  std::vector<double> fx(n, params.h);
  std::vector<double> fz(n);
  for (int k = 0; k < n; ++k) fz[k] = params.pin_eps * staggered_sign(k);
  return SparseOperator(n, std::move(bonds), std::move(fx), std::move(fz));
}

double classical_point(const ModelParams& params) {
  return std::sqrt(2.0 * params.j_par * (params.j_par + params.j_perp));
}

}  // namespace spinent
