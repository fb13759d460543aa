#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

namespace spinent::detail {

struct NelderMeadOptions {
  int max_evals = 600;
  double initial_step = 0.25;
  double ftol = 1e-13;  // stop when the simplex spread in f drops below this
  double xtol = 1e-10;  // ... or the simplex diameter does
  /// Stop as soon as a vertex reaches f <= target.
  double target = -std::numeric_limits<double>::infinity();
  int restarts = 2;  // re-seed the simplex around the best point after convergence
};

struct NelderMeadResult {
  Eigen::VectorXd x;
  double f = std::numeric_limits<double>::infinity();
  int evals = 0;
  bool hit_target = false;
};

/// Minimises f with the standard reflection/expansion/contraction/shrink
/// moves (coefficients 1, 2, 1/2, 1/2).
inline NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                                    Eigen::VectorXd x0, const NelderMeadOptions& opts) {
  const Eigen::Index n = x0.size();
  NelderMeadResult out;
  out.x = x0;

  auto eval = [&](const Eigen::VectorXd& x) {
    ++out.evals;
    const double v = f(x);
    if (v < out.f) {
      out.f = v;
      out.x = x;
    }
    if (v <= opts.target) out.hit_target = true;
    return v;
  };

  double step = opts.initial_step;
  for (int round = 0; round <= opts.restarts; ++round) {
    std::vector<Eigen::VectorXd> pts(n + 1, out.x);
    std::vector<double> vals(n + 1);
    vals[0] = eval(pts[0]);
    for (Eigen::Index k = 0; k < n && !out.hit_target; ++k) {
      pts[k + 1][k] += step;
      vals[k + 1] = eval(pts[k + 1]);
    }
    if (out.hit_target) return out;

    std::vector<int> order(n + 1);
    const double start_best = out.f;
    while (out.evals < opts.max_evals) {
      std::iota(order.begin(), order.end(), 0);
      std::sort(order.begin(), order.end(), [&](int a, int b) { return vals[a] < vals[b]; });
      const int best = order.front();
      const int worst = order.back();
      const int second = order[n - 1];

      double diameter = 0.0;
      for (Eigen::Index k = 0; k <= n; ++k)
        diameter = std::max(diameter, (pts[k] - pts[best]).cwiseAbs().maxCoeff());
      if (vals[worst] - vals[best] <= opts.ftol || diameter <= opts.xtol) break;

      Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
      for (Eigen::Index k = 0; k <= n; ++k)
        if (k != worst) centroid += pts[k];
      centroid /= static_cast<double>(n);

      const Eigen::VectorXd xr = centroid + (centroid - pts[worst]);
      const double fr = eval(xr);
      if (out.hit_target) return out;
      if (fr < vals[best]) {
        const Eigen::VectorXd xe = centroid + 2.0 * (centroid - pts[worst]);
        const double fe = eval(xe);
        if (out.hit_target) return out;
        if (fe < fr) {
          pts[worst] = xe;
          vals[worst] = fe;
        } else {
          pts[worst] = xr;
          vals[worst] = fr;
        }
        continue;
      }
      if (fr < vals[second]) {
        pts[worst] = xr;
        vals[worst] = fr;
        continue;
      }
      const bool outside = fr < vals[worst];
      const Eigen::VectorXd xc = outside ? Eigen::VectorXd(centroid + 0.5 * (xr - centroid))
                                         : Eigen::VectorXd(centroid + 0.5 * (pts[worst] - centroid));
      const double fc = eval(xc);
      if (out.hit_target) return out;
      if (fc < (outside ? fr : vals[worst])) {
        pts[worst] = xc;
        vals[worst] = fc;
        continue;
      }
      for (Eigen::Index k = 0; k <= n; ++k) {
        if (k == best) continue;
        pts[k] = pts[best] + 0.5 * (pts[k] - pts[best]);
        vals[k] = eval(pts[k]);
        if (out.hit_target) return out;
      }
    }
    if (out.evals >= opts.max_evals) break;
    if (round > 0 && !(out.f < start_best)) break;
    step *= 0.1;
  }
  return out;
}

}  // namespace spinent::detail
