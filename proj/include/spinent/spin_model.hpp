#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace spinent {

enum class Boundary { open, periodic };

/// Spin-axis convention used when the Hamiltonian is written down.
///
/// `lab` is the anisotropic Heisenberg chain with the field along x exactly
/// as stated. For easy-plane couplings (j_par > j_perp) the Neel order of
/// that model points along y, which a real pinning field cannot select.
/// `order_axis` applies the global rotation by pi/2 about the field axis in
/// that case, so the order axis becomes z. The spectrum and every local-
/// unitary invariant (concurrence, separable weight) are unchanged; Bell
/// weights and magnetizations are then expressed relative to the order axis.
enum class Frame { lab, order_axis };

Boundary parse_boundary(std::string_view name);
Frame parse_frame(std::string_view name);
std::string_view to_string(Boundary b);
std::string_view to_string(Frame f);

inline constexpr int kMaxEdSites = 24;
inline constexpr int kMaxDenseSites = 12;
inline constexpr double kMaxPin = 0.1;

struct ModelParams {
  double j_par = 0.0;   // easy-plane exchange
  double j_perp = 1.0;  // easy-axis exchange
  double h = 0.0;       // transverse field along x
  int n_sites = 8;
  Boundary boundary = Boundary::open;
  double pin_eps = 0.0;  // staggered pinning amplitude along the frame's z
  Frame frame = Frame::lab;

  /// Throws std::invalid_argument when an invariant is violated.
  void validate() const;
};

/// Nearest-neighbour (or wrap-around) coupling Jx SxSx + Jy SySy + Jz SzSz.
struct BondTerm {
  int i = 0;
  int j = 0;
  double jx = 0.0;
  double jy = 0.0;
  double jz = 0.0;
};

/// Real symmetric operator on the 2^n computational basis. Bit k of a basis
/// index is site k (0-based); a set bit means spin down.
///
/// The operator is stored as its terms and applied on the fly; `entries()`
/// materialises the coordinate list and `to_dense()` the full matrix for
/// small chains.
class SparseOperator {
 public:
  struct Entry {
    std::uint64_t row;
    std::uint64_t col;
    double value;
  };

  /// field_x[k] multiplies -S^x_k, field_z[k] multiplies -S^z_k.
  SparseOperator(int n_sites, std::vector<BondTerm> bonds,
                 std::vector<double> field_x, std::vector<double> field_z);

  int n_sites() const noexcept { return n_sites_; }
  std::uint64_t dimension() const noexcept { return std::uint64_t{1} << n_sites_; }
  const std::vector<BondTerm>& bonds() const noexcept { return bonds_; }

  /// y = H x
  void apply(std::span<const double> x, std::span<double> y) const;
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;

  std::vector<Entry> entries() const;
  Eigen::MatrixXd to_dense() const;

 private:
  int n_sites_;
  std::vector<BondTerm> bonds_;
  std::vector<double> field_x_;
  Eigen::VectorXd diagonal_;
};

/// Anisotropic Heisenberg chain in a transverse field plus the staggered pin
/// -pin_eps * sum_i (-1)^i S^z_i (sites counted from 1).
SparseOperator build_hamiltonian(const ModelParams& params);

/// Exchange couplings (Jx, Jy, Jz) of one bond in the requested frame.
BondTerm bond_couplings(const ModelParams& params);

/// Field at which the ground state is an exact product state.
double classical_point(const ModelParams& params);

/// (-1)^i for the 0-based site k, i.e. -1 on the first site.
inline double staggered_sign(int k) { return (k % 2 == 0) ? -1.0 : 1.0; }

}  // namespace spinent
