#include "spinent/entanglement.hpp"

#include "spinent/detail/nelder_mead.hpp"
#include "spinent/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <type_traits>
#include <vector>

namespace spinent {

namespace {

using cd = std::complex<double>;

Eigen::Matrix4d real_bell_basis() {
  const double s = 1.0 / std::sqrt(2.0);
  Eigen::Matrix4d b;
  // columns: psi-, psi+, phi-, phi+ ; rows: uu, ud, du, dd
  b << 0, 0, s, s,
       s, s, 0, 0,
      -s, s, 0, 0,
       0, 0, -s, s;
  return b;
}

const Eigen::Matrix4d& bell_real() {
  static const Eigen::Matrix4d b = real_bell_basis();
  return b;
}

template <typename Matrix>
Matrix pt_second(const Matrix& m) {
  Matrix out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) out(2 * i + j, 2 * k + l) = m(2 * i + l, 2 * k + j);
  return out;
}

template <typename Matrix>
double min_eig(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es;
  es.compute(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues()[0];
}

/// Margin of the residual separable part for a real or complex density matrix.
template <typename Scalar>
class MarginEvaluator {
 public:
  using Mat = Eigen::Matrix<Scalar, 4, 4>;
  using Vec = Eigen::Matrix<Scalar, 4, 1>;

  explicit MarginEvaluator(const Mat& rho) : rho_(rho) {}

  /// `bell` must be normalised.
  double operator()(const Vec& bell, double lambda) const {
    ++count_;
    const Vec u = bell_real().cast<Scalar>() * bell;
    const Mat m = (rho_ - (1.0 - lambda) * (u * u.adjoint())) / lambda;
    return std::min(min_eig(m), min_eig(pt_second(m)));
  }

  long count() const { return count_; }
  void tick() const { ++count_; }
  const Mat& rho() const { return rho_; }

 private:
  Mat rho_;
  mutable long count_ = 0;
};

/// Point of the search space: an unnormalised Bell vector followed by the
/// angle u that places Lambda' = lambda + (1 - lambda) sin^2 u.
template <typename Scalar>
struct Coordinates;

template <>
struct Coordinates<double> {
  static constexpr int kBellDims = 4;
  static Eigen::Vector4d bell(const Eigen::VectorXd& x) { return x.head<4>(); }
  static Eigen::VectorXd pack(const Eigen::Vector4d& v) { return v; }
};

template <>
struct Coordinates<cd> {
  static constexpr int kBellDims = 8;
  static Eigen::Vector4cd bell(const Eigen::VectorXd& x) {
    Eigen::Vector4cd v;
    for (int k = 0; k < 4; ++k) v[k] = cd(x[2 * k], x[2 * k + 1]);
    return v;
  }
  static Eigen::VectorXd pack(const Eigen::Vector4cd& v) {
    Eigen::VectorXd x(8);
    for (int k = 0; k < 4; ++k) {
      x[2 * k] = v[k].real();
      x[2 * k + 1] = v[k].imag();
    }
    return x;
  }
};

Eigen::Vector4cd to_complex(const Eigen::Vector4d& v) { return v.cast<cd>(); }
Eigen::Vector4cd to_complex(const Eigen::Vector4cd& v) { return v; }

/// Fix the global phase: first non-negligible coefficient real and positive.
Eigen::Vector4cd canonical_phase(Eigen::Vector4cd v) {
  v.normalize();
  for (int k = 0; k < 4; ++k) {
    if (std::abs(v[k]) > 1e-12) {
      v *= std::conj(v[k]) / std::abs(v[k]);
      v[k] = std::abs(v[k]);
      break;
    }
  }
  return v;
}

struct Candidate {
  Eigen::VectorXd bell_coords;  // unnormalised
  double lambda = 0.0;
};

template <typename RhoScalar, typename BellScalar>
class Decomposer {
 public:
  using Coord = Coordinates<BellScalar>;
  using Mat = Eigen::Matrix<RhoScalar, 4, 4>;
  using Vec = Eigen::Matrix<BellScalar, 4, 1>;

  Decomposer(const Mat& rho, const LsOptions& opts) : eval_(rho), opts_(opts) {
    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> gauss;
    for (int s = 0; s < opts.starts; ++s) {
      Eigen::VectorXd x(Coord::kBellDims + 1);
      for (Eigen::Index k = 0; k < Coord::kBellDims; ++k) x[k] = gauss(rng);
      x.head(Coord::kBellDims).normalize();
      x[Coord::kBellDims] = std::uniform_real_distribution<double>(0.0, 1.5)(rng);
      starts_.push_back(std::move(x));
    }
  }

  long evaluations() const { return eval_.count(); }

  static std::optional<Vec> normalised(const Eigen::VectorXd& x) {
    Vec v = Coord::bell(x);
    const double n = v.norm();
    if (!(n > 1e-8)) return std::nullopt;
    return Vec(v / n);
  }

  double margin(const Eigen::VectorXd& bell_coords, double lambda) const {
    auto v = normalised(bell_coords);
    if (!v) return -1e3;
    return eval_(v->template cast<RhoScalar>(), lambda);
  }

  /// Is there a Bell vector and Lambda' >= lambda with a valid residual?
  std::optional<Candidate> feasible(double lambda, const std::optional<Candidate>& hint) {
    const double tol = std::min(opts_.tol_psd, opts_.tol_ppt);
    const Eigen::Index nb = Coord::kBellDims;
    auto lambda_of = [&](double u) {
      const double s = std::sin(u);
      return lambda + (1.0 - lambda) * s * s;
    };
    auto objective = [&](const Eigen::VectorXd& x) {
      return -margin(x.head(nb), lambda_of(x[nb]));
    };
    detail::NelderMeadOptions nm;
    nm.target = tol;
    nm.max_evals = 120 * static_cast<int>(nb + 1);
    nm.initial_step = 0.3;

    auto run = [&](const Eigen::VectorXd& x0) -> std::optional<Candidate> {
      auto res = detail::nelder_mead(objective, x0, nm);
      if (res.f <= tol) return Candidate{res.x.head(nb), lambda_of(res.x[nb])};
      return std::nullopt;
    };

    if (hint && hint->lambda >= lambda) {
      // The previous feasible point remains feasible for any smaller lambda.
      if (margin(hint->bell_coords, hint->lambda) >= -tol) return hint;
    }
    if (hint) {
      Eigen::VectorXd x0(nb + 1);
      x0.head(nb) = hint->bell_coords;
      x0[nb] = 0.0;
      if (auto c = run(x0)) return c;
    }
    for (const auto& s : starts_)
      if (auto c = run(s)) return c;
    return std::nullopt;
  }

  /// Largest Lambda feasible for this particular Bell vector, searched in
  /// [floor, ceiling]; returns floor + margin (< floor) when floor itself fails.
  double top_lambda(const Eigen::VectorXd& bell_coords, double floor, double ceiling) const {
    const double tol = std::min(opts_.tol_psd, opts_.tol_ppt);
    const double m0 = margin(bell_coords, floor);
    if (m0 < -tol) return floor + m0;
    if (margin(bell_coords, ceiling) >= -tol) return ceiling;
    double lo = floor;
    double hi = ceiling;
    while (hi - lo > 0.05 * opts_.lambda_tol) {
      const double mid = 0.5 * (lo + hi);
      if (margin(bell_coords, mid) >= -tol)
        lo = mid;
      else
        hi = mid;
    }
    return lo;
  }

  /// Smallest entangled weight t = 1 - Lambda that this Bell vector admits:
  /// the lower root of the concave map t -> mineig((rho - t P)^T_B), found by
  /// Newton steps from t = 0, which approach it from below. A residual that
  /// stops being positive is penalised so the search stays inside.
  double entangled_weight(const Eigen::VectorXd& bell_coords) const {
    const auto [t, psd] = weight_and_psd(bell_coords);
    return psd < 0.0 ? t - 1e4 * psd : t;
  }

  /// The lower PT root t and mineig(rho - t P) at that root.
  std::pair<double, double> weight_and_psd(const Eigen::VectorXd& bell_coords) const {
    auto v = normalised(bell_coords);
    if (!v) return {kInfeasible, -1.0};
    const auto u = (bell_real().cast<BellScalar>() * *v).template cast<RhoScalar>().eval();
    const Mat p = u * u.adjoint();
    const Mat p_pt = pt_second(p);
    const Mat& rho = eval_.rho();
    const Mat rho_pt = pt_second(rho);
    eval_.tick();

    double t = 0.0;
    for (int it = 0; it < 80; ++it) {
      Eigen::SelfAdjointEigenSolver<Mat> es(rho_pt - t * p_pt);
      const double f = es.eigenvalues()[0];
      if (f >= 0.0) break;
      const auto w = es.eigenvectors().col(0);
      const double slope = -std::real((w.adjoint() * p_pt * w)(0, 0));
      if (!(slope > 1e-14)) return {kInfeasible, -1.0};
      const double next = t - f / slope;
      if (next > 1.0) return {kInfeasible, -1.0};
      if (next - t <= 1e-16 * std::max(1.0, t)) {
        t = next;
        break;
      }
      t = next;
    }
    return {t, min_eig(Mat(rho - t * p))};
  }

  /// Log barrier on the positivity of the residual; infinite outside.
  double barrier_weight(const Eigen::VectorXd& bell_coords, double mu) const {
    const auto [t, psd] = weight_and_psd(bell_coords);
    if (!(psd > 0.0) || t >= kInfeasible) return std::numeric_limits<double>::infinity();
    return t - mu * std::log(psd);
  }

  /// Local minimisation of the entangled weight over the Bell vector. The
  /// objective is smooth near the optimum, unlike the bisection margin.
  Candidate refine(const Candidate& start) const {
    const Eigen::Index nb = Coord::kBellDims;
    Candidate best = start;
    double best_t = 1.0 - start.lambda;
    auto consider = [&](const Eigen::VectorXd& x) {
      const auto [t, psd] = weight_and_psd(x);
      if (psd >= 0.0 && t < best_t) {
        best_t = t;
        best.bell_coords = x.normalized();
      }
    };

    auto objective = [&](const Eigen::VectorXd& x) { return entangled_weight(x); };
    Eigen::VectorXd x = start.bell_coords.normalized();
    for (double step : {0.05, 0.01, 1e-3}) {
      detail::NelderMeadOptions nm;
      nm.max_evals = 400 * static_cast<int>(nb);
      nm.initial_step = step;
      nm.ftol = 1e-15;
      nm.xtol = 1e-12;
      nm.restarts = 3;
      x = detail::nelder_mead(objective, x, nm).x.normalized();
    }
    consider(x);

    // When the residual's positivity is also active at the optimum the
    // penalised objective has a kink there; follow a shrinking barrier from
    // the inside instead.
    Eigen::VectorXd inner;
    double inner_t = kInfeasible;
    for (const Eigen::VectorXd& y : {Eigen::VectorXd(x), Eigen::VectorXd(start.bell_coords.normalized())}) {
      const auto [t, psd] = weight_and_psd(y);
      if (psd > 0.0 && t < inner_t) {
        inner = y;
        inner_t = t;
      }
    }
    if (inner_t < kInfeasible) {
      for (double mu = 1e-4; mu > 1e-13; mu *= 0.01) {
        auto objective_mu = [&](const Eigen::VectorXd& y) { return barrier_weight(y, mu); };
        detail::NelderMeadOptions nm;
        nm.max_evals = 300 * static_cast<int>(nb);
        nm.initial_step = std::max(1e-7, 10.0 * std::sqrt(mu));
        nm.ftol = 1e-16;
        nm.xtol = 1e-13;
        nm.restarts = 2;
        inner = detail::nelder_mead(objective_mu, inner, nm).x.normalized();
        consider(inner);
      }
    }

    // The Newton root sits on the boundary to rounding; step inside by the
    // feasibility tolerance so the stored split passes its own checks.
    const double tol = std::min(opts_.tol_psd, opts_.tol_ppt);
    double lam = 1.0 - best_t;
    if (margin(best.bell_coords, lam) < -tol) lam = top_lambda(best.bell_coords, start.lambda, lam);
    if (lam > start.lambda) best.lambda = lam;
    else best = start;
    return best;
  }

  /// Dominant eigenvector of rho as a search point. For nearly pure rho the
  /// feasible Bell vectors hug it too closely for random starts to find.
  Eigen::VectorXd dominant_coords() const {
    Eigen::SelfAdjointEigenSolver<Mat> es(eval_.rho());
    const auto top = canonical_phase(to_complex(es.eigenvectors().col(3).eval()));
    const Eigen::Vector4cd bell = bell_real().cast<cd>().adjoint() * top;
    if constexpr (std::is_same_v<BellScalar, double>)
      return Coord::pack(bell.real());
    else
      return Coord::pack(bell);
  }

  static constexpr double kInfeasible = 2.0;

 private:
  MarginEvaluator<RhoScalar> eval_;
  LsOptions opts_;
  std::vector<Eigen::VectorXd> starts_;
};

template <typename RhoScalar, typename BellScalar>
LSDecomposition decompose(const Eigen::Matrix<RhoScalar, 4, 4>& rho_typed,
                          const TwoQubitDensityMatrix& rho, double c_rho, const LsOptions& opts) {
  using Dec = Decomposer<RhoScalar, BellScalar>;
  Dec dec(rho_typed, opts);

  const double ceiling = 1.0 - c_rho;  // Lambda <= 1 - C(rho) because C(Psi_e) <= 1
  std::optional<Candidate> best;
  double lo = 0.0;
  double hi = ceiling;

  if (auto c = dec.feasible(ceiling, std::nullopt)) {
    best = c;
    lo = ceiling;
  } else if (opts.polish) {
    const Candidate seed = dec.refine(Candidate{dec.dominant_coords(), 0.0});
    if (seed.lambda > 0.0) {
      best = seed;
      lo = seed.lambda;
    }
  }
  // Bisection only has to land in the right basin; refinement then fixes
  // Lambda to rounding and a last feasibility test at Lambda + lambda_tol
  // confirms the bracket.
  const double coarse = std::max(opts.lambda_tol, 1e-2);
  for (int pass = 0; pass < 8; ++pass) {
    while (hi - lo > coarse) {
      const double mid = 0.5 * (lo + hi);
      if (auto c = dec.feasible(mid, best)) {
        best = c;
        lo = std::max(mid, std::min(c->lambda, hi));
      } else {
        hi = mid;
      }
    }
    if (!best) break;
    if (opts.polish) best = dec.refine(*best);
    best->lambda = dec.top_lambda(best->bell_coords, best->lambda, ceiling);
    lo = best->lambda;
    if (hi - lo <= opts.lambda_tol) break;
    const double probe = std::min(hi, lo + opts.lambda_tol);
    auto c = dec.feasible(probe, std::nullopt);
    if (!c) {
      hi = probe;
      break;
    }
    best = c;
    lo = std::max(probe, std::min(c->lambda, hi));
  }

  LSDecomposition out;
  out.separable = false;
  out.c_rho = c_rho;
  Eigen::Vector4cd bell;
  if (!best) {
    // Nothing positive is feasible: rho is (numerically) a pure entangled state.
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(rho.rho);
    bell = bell_basis().adjoint() * es.eigenvectors().col(3);
    out.lambda = 0.0;
  } else {
    out.lambda = best->lambda;
    bell = to_complex(*Dec::normalised(best->bell_coords));
  }
  bell = canonical_phase(bell);
  const BellCoefficients coeffs = BellCoefficients::from_vector(bell);
  out.bell = coeffs;
  out.c_rho_e = coeffs.concurrence();

  const Eigen::Vector4cd u = coeffs.computational();
  out.rho_s.site_i = rho.site_i;
  out.rho_s.site_j = rho.site_j;
  if (out.lambda > 0.0) {
    out.rho_s.rho = (rho.rho - (1.0 - out.lambda) * (u * u.adjoint())) / out.lambda;
  } else {
    out.rho_s.rho = Eigen::Matrix4cd::Identity() / 4.0;
  }
  out.certificate_gap = c_rho - (1.0 - out.lambda) * *out.c_rho_e;
  out.evaluations = dec.evaluations();
  return out;
}

}  // namespace

Eigen::Vector4cd BellCoefficients::computational() const {
  return bell_real().cast<cd>() * as_vector();
}

const Eigen::Matrix4cd& bell_basis() {
  static const Eigen::Matrix4cd b = bell_real().cast<cd>();
  return b;
}

Eigen::Matrix4cd bell_transform(const Eigen::Matrix4cd& rho) {
  return bell_basis().adjoint() * rho * bell_basis();
}

Eigen::Matrix4cd bell_inverse_transform(const Eigen::Matrix4cd& rho_bell) {
  return bell_basis() * rho_bell * bell_basis().adjoint();
}

Eigen::Matrix4cd partial_transpose(const Eigen::Matrix4cd& rho) { return pt_second(rho); }

double concurrence(const Eigen::Matrix4cd& rho_in) {
  const Eigen::Matrix4cd rho = 0.5 * (rho_in + rho_in.adjoint());
  Eigen::Matrix4cd yy = Eigen::Matrix4cd::Zero();
  yy(0, 3) = -1.0;
  yy(1, 2) = 1.0;
  yy(2, 1) = 1.0;
  yy(3, 0) = -1.0;

  const Eigen::Matrix4cd r = rho * yy * rho.conjugate() * yy;
  Eigen::ComplexEigenSolver<Eigen::Matrix4cd> ces(r, false);
  for (int k = 0; k < 4; ++k) {
    if (ces.eigenvalues()[k].real() < -1e-12) {
      std::ostringstream msg;
      msg << "concurrence: R has eigenvalue " << ces.eigenvalues()[k].real()
          << " below the -1e-12 clamp; input is not a density matrix";
      throw NumericalError(msg.str());
    }
  }

  // The square roots of eig(R) are the singular values of sqrt(rho) Y sqrt(rho*),
  // which avoids taking square roots of rounding noise.
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(rho);
  Eigen::Vector4d w = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Eigen::Matrix4cd sq = es.eigenvectors() * w.cast<cd>().asDiagonal() * es.eigenvectors().adjoint();
  const Eigen::Matrix4cd x = sq * yy * sq.conjugate();
  Eigen::JacobiSVD<Eigen::Matrix4cd> svd(x);
  const Eigen::Vector4d l = svd.singularValues();  // decreasing
  return std::max(0.0, l[0] - l[1] - l[2] - l[3]);
}

PptResult ppt_check(const Eigen::Matrix4cd& rho, double tol_ppt, double tol_psd) {
  const Eigen::Matrix4cd herm = 0.5 * (rho + rho.adjoint());
  PptResult r;
  r.min_eigenvalue = min_eig(herm);
  r.min_pt_eigenvalue = min_eig(pt_second(herm));
  r.separable = r.min_eigenvalue >= -tol_psd && r.min_pt_eigenvalue >= -tol_ppt;
  return r;
}

double residual_margin(const Eigen::Matrix4cd& rho, const BellCoefficients& bell, double lambda) {
  MarginEvaluator<cd> eval(rho);
  return eval(bell.as_vector().normalized(), lambda);
}

LSDecomposition ls_decompose(const TwoQubitDensityMatrix& rho, const LsOptions& opts) {
  const double c_rho = concurrence(rho.rho);
  const PptResult ppt = ppt_check(rho.rho, opts.tol_ppt, opts.tol_psd);

  if (ppt.separable || c_rho < opts.separable_concurrence) {
    LSDecomposition out;
    out.separable = true;
    out.lambda = 1.0;
    out.c_rho = 0.0;
    out.rho_s = rho;
    return out;
  }

  const bool real_input = rho.rho.imag().cwiseAbs().maxCoeff() == 0.0;
  LSDecomposition out;
  if (opts.mode == BellMode::complex)
    out = decompose<cd, cd>(rho.rho, rho, c_rho, opts);
  else if (real_input)
    out = decompose<double, double>(rho.rho.real(), rho, c_rho, opts);
  else
    out = decompose<cd, double>(rho.rho, rho, c_rho, opts);

  if (std::abs(out.certificate_gap) > opts.certificate_tol) {
    std::ostringstream msg;
    msg << "L-S certificate failed: C(rho) = " << out.c_rho << ", (1 - Lambda) C(rho_e) = "
        << (1.0 - out.lambda) * out.c_rho_e.value_or(0.0) << ", gap " << out.certificate_gap;
    throw CertificateError(msg.str(), out);
  }
  return out;
}

}  // namespace spinent
