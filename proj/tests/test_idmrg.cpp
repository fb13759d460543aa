#include "spinent/entanglement.hpp"
#include "spinent/errors.hpp"
#include "spinent/idmrg.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace spinent;

namespace {

ModelParams model(double j_par, double j_perp, double h, double pin = 0.0) {
  ModelParams p;
  p.j_par = j_par;
  p.j_perp = j_perp;
  p.h = h;
  p.pin_eps = pin;
  return p;
}

DmrgConfig kept(int m) {
  DmrgConfig c;
  c.kept_states = m;
  return c;
}

}  // namespace

TEST(Idmrg, PinnedNeelEnergy) {
  const DmrgResult r = idmrg_ground_state(model(0, 1, 0, 1e-3), kept(16));
  EXPECT_NEAR(r.energy_per_site, -0.25 - 0.5e-3, 1e-9);
  EXPECT_NEAR(r.magnetization.sz_staggered, 0.5, 1e-9);
  EXPECT_NEAR(concurrence(r.central), 0.0, 1e-9);
}

TEST(Idmrg, StrongFieldLimit) {
  const double h = 2.0;
  const DmrgResult r = idmrg_ground_state(model(0, 1, h), kept(16));
  // second order in 1/h: -h/2 - 1/(32 h)
  EXPECT_NEAR(r.energy_per_site, -h / 2 - 1.0 / (32 * h), 1e-3);
  EXPECT_GT(r.magnetization.sx_uniform, 0.49);
  EXPECT_LT(r.magnetization.sz_staggered, 1e-6);
}

TEST(Idmrg, CriticalIsingEnergy) {
  // exact value -1/pi from the free-fermion solution, approached slowly
  DmrgConfig c = kept(16);
  c.energy_tol = 1e-7;
  const DmrgResult r = idmrg_ground_state(model(0, 1, 0.5), c);
  EXPECT_NEAR(r.energy_per_site, -1.0 / std::numbers::pi, 2e-5);
}

TEST(Idmrg, CentralDensityMatrixIsValid) {
  const DmrgResult r = idmrg_ground_state(model(1, 0, 1.2, 1e-3), kept(24));
  const DensityMatrixCheck chk = check_density_matrix(r.central.rho);
  EXPECT_TRUE(chk.ok(1e-10)) << chk.hermiticity_error << " " << chk.trace_error << " "
                              << chk.min_eigenvalue;
  EXPECT_EQ(r.central.separation(), 1);
  EXPECT_LT(r.central.rho.imag().cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Idmrg, EnergyMonotoneInKeptStates) {
  for (const ModelParams& p : {model(0, 1, 0.8, 1e-4), model(1, 0, 1.0, 1e-4)}) {
    double prev = 1e9;
    for (int m : {8, 16, 32, 64}) {
      const double e = idmrg_ground_state(p, kept(m)).energy_per_site;
      EXPECT_LE(e, prev + 1e-10) << "m = " << m;
      prev = e;
    }
  }
}

TEST(Idmrg, MagnetizationFromCentralSites) {
  const DmrgResult r = idmrg_ground_state(model(0, 1, 0.3, 1e-3), kept(16));
  const Eigen::Matrix4d rho = r.central.rho.real();
  const double sx_left = rho(0, 2) + rho(1, 3);
  const double sx_right = rho(0, 1) + rho(2, 3);
  EXPECT_NEAR(r.magnetization.sx_uniform, 0.5 * (sx_left + sx_right), 1e-14);
  EXPECT_GT(r.magnetization.sz_staggered, 0.4);
}

TEST(Idmrg, ReportsNonConvergence) {
  DmrgConfig c = kept(8);
  c.max_iterations = 2;
  c.energy_tol = 1e-14;
  try {
    idmrg_ground_state(model(0, 1, 0.5), c);
    FAIL() << "expected ConvergenceError";
  } catch (const ConvergenceError& e) {
    EXPECT_GT(e.best_residual(), 0.0);
  }
}

TEST(Idmrg, WarnsWhenTruncationExceedsTolerance) {
  DmrgConfig c = kept(4);
  c.energy_tol = 1e-6;
  const DmrgResult r = idmrg_ground_state(model(1, 0, 1.3, 1e-3), c);
  EXPECT_FALSE(r.warnings.empty());
  EXPECT_GT(r.last_truncation_weight, c.energy_tol);
}

TEST(Idmrg, ConfigLimits) {
  EXPECT_THROW(kept(3).validate(), std::invalid_argument);
  EXPECT_THROW(kept(257).validate(), std::invalid_argument);
  DmrgConfig c;
  c.energy_tol = 0.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  EXPECT_THROW(idmrg_ground_state(model(0, 1, 0.5), kept(300)), std::invalid_argument);
}
