#include "spinent/lanczos.hpp"

#include "spinent/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

namespace spinent {

Eigen::VectorXd seeded_random_vector(Eigen::Index dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Eigen::VectorXd v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    v[i] = 2.0 * u - 1.0;
  }
  return v;
}

namespace {

void project_out(Eigen::VectorXd& w, const std::vector<Eigen::VectorXd>& basis) {
  for (const auto& b : basis) w -= b.dot(w) * b;
}

}  // namespace

EigenPair lanczos_lowest(const MatVec& matvec, Eigen::Index dim, const LanczosOptions& opts,
                         const Eigen::VectorXd* initial,
                         const std::vector<Eigen::VectorXd>& deflate) {
  if (dim < 1) throw std::invalid_argument("lanczos: empty operator");
  const Eigen::Index free_dim = dim - static_cast<Eigen::Index>(deflate.size());
  if (free_dim < 1) throw std::invalid_argument("lanczos: deflation exhausts the space");

  const auto budget_vectors = static_cast<Eigen::Index>(
      opts.memory_budget_bytes / (sizeof(double) * static_cast<std::size_t>(dim)));
  const Eigen::Index krylov =
      std::min<Eigen::Index>({static_cast<Eigen::Index>(opts.max_krylov),
                              std::max<Eigen::Index>(20, budget_vectors), free_dim});

  Eigen::VectorXd v = initial ? *initial : seeded_random_vector(dim, opts.seed);
  project_out(v, deflate);
  if (v.norm() < 1e-300) {
    v = seeded_random_vector(dim, opts.seed + 0x9e3779b97f4a7c15ULL);
    project_out(v, deflate);
  }
  v.normalize();

  EigenPair best;
  best.residual = std::numeric_limits<double>::infinity();
  int matvecs = 0;

  Eigen::MatrixXd V(dim, krylov);
  Eigen::VectorXd w(dim);
  Eigen::VectorXd hx(dim);
  std::vector<double> alpha;
  std::vector<double> beta;

  for (int cycle = 0; cycle <= opts.max_restarts; ++cycle) {
    V.col(0) = v;
    alpha.clear();
    beta.clear();
    for (Eigen::Index j = 0; j < krylov; ++j) {
      matvec(V.col(j), w);
      ++matvecs;
      project_out(w, deflate);
      const double a = V.col(j).dot(w);
      alpha.push_back(a);
      // Three-term recurrence, then classical Gram-Schmidt against the whole
      // basis; a second pass only when the first removed most of the norm.
      w -= a * V.col(j);
      if (j > 0) w -= beta.back() * V.col(j - 1);
      double b = w.norm();
      for (int pass = 0; pass < 2; ++pass) {
        w.noalias() -= V.leftCols(j + 1) * (V.leftCols(j + 1).transpose() * w);
        project_out(w, deflate);
        const double after = w.norm();
        const bool settled = after > 0.7 * b;
        b = after;
        if (settled) break;
      }
      beta.push_back(b);

      const Eigen::Index m = j + 1;
      const bool exhausted = (m == krylov) || (b < 1e-14 * std::max(1.0, std::abs(a))) || (m == free_dim);
      // The Ritz problem is solved every few steps; its cost grows with m.
      if (!exhausted && m % 4 != 0) {
        V.col(j + 1) = w / b;
        continue;
      }
      Eigen::VectorXd diag = Eigen::Map<Eigen::VectorXd>(alpha.data(), m);
      Eigen::VectorXd sub = m > 1 ? Eigen::VectorXd(Eigen::Map<Eigen::VectorXd>(beta.data(), m - 1))
                                  : Eigen::VectorXd();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
      tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
      const double theta = tri.eigenvalues()[0];
      const double scale = std::max(1.0, std::abs(theta));
      const double estimate = std::abs(b * tri.eigenvectors()(m - 1, 0));

      if (estimate <= opts.tol * scale || exhausted) {
        Eigen::VectorXd x = V.leftCols(m) * tri.eigenvectors().col(0);
        project_out(x, deflate);
        x.normalize();
        matvec(x, hx);
        ++matvecs;
        project_out(hx, deflate);
        const double rq = x.dot(hx);
        const double residual = (hx - rq * x).norm();
        if (residual < best.residual) {
          best.vector = x;
          best.value = rq;
          best.residual = residual;
        }
        if (residual <= opts.tol * std::max(1.0, std::abs(rq))) {
          best.matvecs = matvecs;
          return best;
        }
        if (exhausted) {
          v = x;
          break;
        }
      }
      V.col(j + 1) = w / b;
    }
  }

  std::ostringstream msg;
  msg << "lanczos did not converge after " << opts.max_restarts << " restarts (residual "
      << best.residual << ")";
  throw ConvergenceError(msg.str(), best.residual);
}

StateVector lanczos_ground_state(const SparseOperator& H, const LanczosOptions& opts,
                                 const Eigen::VectorXd* initial) {
  const auto dim = static_cast<Eigen::Index>(H.dimension());
  if (dim < 2) throw std::invalid_argument("lanczos: operator dimension must be at least 2");
  MatVec mv = [&H](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
    y.resize(x.size());
    H.apply(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())),
            std::span<double>(y.data(), static_cast<std::size_t>(y.size())));
  };
  if (initial && initial->size() != dim)
    throw std::invalid_argument("lanczos: initial vector has the wrong dimension");
  EigenPair ground = lanczos_lowest(mv, dim, opts, initial);

  StateVector out;
  out.n_sites = H.n_sites();
  out.amplitudes = std::move(ground.vector);
  out.energy = ground.value;
  out.residual = ground.residual;
  out.matvecs = ground.matvecs;

  if (opts.check_degeneracy) {
    LanczosOptions excited = opts;
    excited.seed = opts.seed + 1;
    EigenPair first = lanczos_lowest(mv, dim, excited, nullptr, {out.amplitudes});
    out.matvecs += first.matvecs;
    out.gap = first.value - out.energy;
    out.degenerate = *out.gap < opts.degeneracy_threshold;
  }
  return out;
}

}  // namespace spinent
