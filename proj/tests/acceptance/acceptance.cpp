// End-to-end acceptance run. Prints one PASS/FAIL line per criterion with the
// measured numbers and exits non-zero if any criterion fails.

#include "spinent/entanglement.hpp"
#include "spinent/errors.hpp"
#include "spinent/idmrg.hpp"
#include "spinent/lanczos.hpp"
#include "spinent/oracle.hpp"
#include "spinent/sweep.hpp"

#include <Eigen/Eigenvalues>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace spinent;
using cd = std::complex<double>;

namespace {

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [fail: " << what << "]";
    }
  }
};

int failures = 0;

void report(int id, Verdict& v) {
  std::printf("criterion %d: %s%s\n", id, v.pass ? "PASS" : "FAIL", v.detail.str().c_str());
  std::fflush(stdout);
  if (!v.pass) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string opt(const std::optional<double>& v) {
  if (!v) return "NA";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", *v);
  return buf;
}

SweepConfig ising(int n) {
  SweepConfig c;
  c.j_par = 0.0;
  c.j_perp = 1.0;
  c.h_min = 0.0;
  c.h_max = 1.0;
  c.h_steps = 101;
  c.n_sites = n;
  return c;
}

SweepConfig xy_idmrg(double h_min, double h_max, int steps) {
  SweepConfig c;
  c.j_par = 1.0;
  c.j_perp = 0.0;
  c.h_min = h_min;
  c.h_max = h_max;
  c.h_steps = steps;
  c.backend = Backend::idmrg;
  c.frame = Frame::order_axis;
  c.kept_states = 32;
  c.pin_sequence = {1e-3, 1e-4};
  return c;
}

// Every emitted row, for the certificate and invariant checks.
std::vector<SweepRow> all_rows;

void keep(const std::vector<SweepRow>& rows) { all_rows.insert(all_rows.end(), rows.begin(), rows.end()); }

Eigen::Matrix4cd random_state(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::Matrix4cd m;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m(i, j) = cd(g(rng), g(rng));
  Eigen::Matrix4cd rho = m * m.adjoint();
  return rho / rho.trace();
}

Eigen::Matrix2cd random_unitary(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::Matrix2cd m;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) m(i, j) = cd(g(rng), g(rng));
  return Eigen::HouseholderQR<Eigen::Matrix2cd>(m).householderQ();
}

Eigen::Matrix4cd kron(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
  Eigen::Matrix4cd k;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) k.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return k;
}

double certificate_gap(const SweepRow& r) {
  if (r.separable || !r.c_rho || !r.one_minus_lambda || !r.c_rho_e) return 0.0;
  return *r.c_rho - *r.one_minus_lambda * *r.c_rho_e;
}

}  // namespace

int main() {
  std::setvbuf(stdout, nullptr, _IOLBF, 0);
  const auto start = std::chrono::steady_clock::now();

  // Ising sweeps at three sizes; N = 16 is the reference.
  std::vector<SweepResult> ising_runs;
  double ising16_seconds = 0.0;
  for (int n : {8, 12, 16}) {
    const auto t0 = std::chrono::steady_clock::now();
    ising_runs.push_back(run_sweep(ising(n)));
    if (n == 16) ising16_seconds = seconds_since(t0);
    keep(ising_runs.back().rows);
    const SweepSummary& s = ising_runs.back().summary;
    std::printf("info: Ising N=%d argmax C(rho_e) %s, argmin 1-Lambda %s, argmax C(rho) %s, errors %d\n", n,
                opt(s.argmax_c_rho_e).c_str(), opt(s.argmin_one_minus_lambda).c_str(),
                opt(s.argmax_c_rho).c_str(), s.error_rows);
  }
  const SweepResult& i16 = ising_runs.back();

  {
    Verdict v;
    const SweepSummary& s = i16.summary;
    v.detail << " N=16 argmax C(rho_e) = " << opt(s.argmax_c_rho_e) << ", argmin 1-Lambda = "
             << opt(s.argmin_one_minus_lambda) << ", sweep " << ising16_seconds << " s";
    v.require(s.argmax_c_rho_e && std::abs(*s.argmax_c_rho_e - 0.5) <= 0.02 + 1e-9, "argmax C(rho_e) not within 0.5 +- 0.02");
    v.require(s.argmin_one_minus_lambda && std::abs(*s.argmin_one_minus_lambda - 0.5) <= 0.02 + 1e-9,
              "argmin 1-Lambda not within 0.5 +- 0.02");
    v.require(s.error_rows == 0, "rows with errors");
    v.require(ising16_seconds <= 600.0, "sweep slower than 10 minutes");
    // sharpening: distance from 0.5 must not grow with N
    for (auto pick : {&SweepSummary::argmax_c_rho_e, &SweepSummary::argmin_one_minus_lambda}) {
      double prev = 1e9;
      for (const auto& run : ising_runs) {
        const auto& loc = run.summary.*pick;
        const double d = loc ? std::abs(*loc - 0.5) : 1e9;
        v.require(d <= prev + 1e-9, "location does not approach 0.5 monotonically with N");
        prev = d;
      }
    }
    report(1, v);
  }

  {
    Verdict v;
    const SweepSummary& s = i16.summary;
    v.detail << " argmax C(rho) = " << opt(s.argmax_c_rho) << ", argmax C(rho_e) = " << opt(s.argmax_c_rho_e);
    v.require(s.argmax_c_rho && s.argmax_c_rho_e && std::abs(*s.argmax_c_rho - *s.argmax_c_rho_e) > 1e-9,
              "peaks coincide");
    v.require(s.argmax_c_rho && *s.argmax_c_rho > 0.5 + 1e-9, "C(rho) peak not above h = 0.5");
    report(2, v);
  }

  // XY model through iDMRG in the frame whose z axis is the ordering axis.
  const auto t_xy = std::chrono::steady_clock::now();
  const SweepResult xy = run_sweep(xy_idmrg(1.30, 1.60, 31));
  keep(xy.rows);
  std::printf("info: XY iDMRG sweep %.0f s, errors %d\n", seconds_since(t_xy), xy.summary.error_rows);

  {
    Verdict v;
    // Ising: a2 decreasing across the transition region, small beyond it
    double prev = 2.0;
    double worst_tail = 0.0;
    int increases = 0;
    for (const auto& r : i16.rows) {
      if (!r.a2) continue;
      if (r.h >= 0.3 - 1e-9 && r.h <= 0.7 + 1e-9) {
        if (*r.a2 > prev + 1e-12) ++increases;
        prev = *r.a2;
      }
      if (r.h >= 0.55 - 1e-9) worst_tail = std::max(worst_tail, *r.a2);
    }
    v.detail << " Ising a2 increases on [0.3, 0.7]: " << increases << ", max a2 for h >= 0.55: " << worst_tail
             << "; XY a2 drop at h = " << opt(xy.summary.a2_drop);
    v.require(increases == 0, "Ising a2 not monotone near h_p");
    v.require(worst_tail < 0.02, "Ising a2 tail above 0.02");
    v.require(xy.summary.a2_drop && *xy.summary.a2_drop >= 1.40 - 1e-9 && *xy.summary.a2_drop <= 1.52 + 1e-9,
              "XY a2 crossing outside [1.40, 1.52]");
    report(3, v);
  }

  {
    Verdict v;
    const double hcl = std::numbers::sqrt2;
    SweepConfig c = xy_idmrg(hcl, hcl, 1);
    c.kept_states = 64;
    const SweepRow at = sweep_point(c, hcl);
    const SweepRow below = sweep_point(c, hcl - 0.05);
    const SweepRow above = sweep_point(c, hcl + 0.05);
    keep({at, below, above});
    const double moment = at.sx && at.sz_stag ? std::hypot(*at.sx, *at.sz_stag) : 0.0;
    v.detail << " C(rho) = " << opt(at.c_rho) << ", |m| = " << moment << ", h-0.05: a2 " << opt(below.a2) << " b2 "
             << opt(below.b2) << " d2 " << opt(below.d2) << ", h+0.05: a2 " << opt(above.a2) << " b2 "
             << opt(above.b2) << " d2 " << opt(above.d2);
    v.require(at.error.empty() && at.c_rho && *at.c_rho <= 1e-3, "C(rho) above 1e-3");
    v.require(std::abs(moment - 0.5) <= 1e-3, "moment not 1/2");
    for (const SweepRow* r : {&below, &above}) {
      const bool ok = r->a2 && std::abs(*r->a2 - 0.25) <= 0.02 && std::abs(*r->b2 - 0.5) <= 0.02 &&
                      std::abs(*r->d2 - 0.25) <= 0.02;
      v.require(ok, "Bell weights at h = " + std::to_string(r->h) + " away from (1/4, 1/2, 0, 1/4)");
    }
    report(4, v);
  }

  // Nearest-neighbour XY check for criterion 7 and the ED side of criterion 9.
  SweepConfig nnn = ising(16);
  nnn.separation = 2;
  const SweepResult ising_nnn = run_sweep(nnn);
  keep(ising_nnn.rows);

  {
    Verdict v;
    const double hp = 0.5;
    double nn_c2 = 0.0;
    for (const auto* rows : {&i16.rows, &xy.rows})
      for (const auto& r : *rows)
        if (!r.separable && r.c2) nn_c2 = std::max(nn_c2, *r.c2);
    double low_min = 1.0;
    int low_separable = 0;
    double high_max = 0.0;
    for (const auto& r : ising_nnn.rows) {
      if (r.h > 0.0 && r.h < 0.4 - 1e-9) {
        if (r.c2) low_min = std::min(low_min, *r.c2);
        else ++low_separable;
      }
      if (r.h > hp + 0.05 - 1e-9 && r.c2) high_max = std::max(high_max, *r.c2);
    }
    v.detail << " NN max c2 = " << nn_c2 << "; NNN min c2 on (0, 0.4) = " << low_min << " (" << low_separable
             << " separable rows), max c2 for h >= 0.55 = " << high_max;
    v.require(nn_c2 <= 1e-6, "nearest-neighbour c2 above 1e-6");
    v.require(low_separable == 0 && low_min > 0.01, "NNN c2 not above 0.01 for h < 0.4");
    v.require(high_max < 0.02, "NNN c2 does not vanish beyond h_p");
    report(7, v);
  }

  {
    Verdict v;
    SweepConfig c = ising(16);
    c.pin_sequence = {1e-3};
    const SweepRow r = sweep_point(c, 0.02);
    keep({r});
    v.require(r.error.empty() && r.a2.has_value(), "no entangled part at h = 0.02");
    if (r.a2) {
      const double a = std::sqrt(*r.a2), b = std::sqrt(*r.b2);
      v.detail << " |a| = " << a << ", |b| = " << b << ", |c|^2 = " << *r.c2 << ", |d|^2 = " << *r.d2;
      v.require(std::abs(a - std::numbers::sqrt2 / 2) <= 0.03 && std::abs(b - std::numbers::sqrt2 / 2) <= 0.03,
                "|a|, |b| not 1/sqrt2");
      v.require(*r.c2 <= 1e-3 && *r.d2 <= 1e-3, "c or d not zero");
    }
    report(8, v);
  }

  {
    Verdict v;
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst_e = 0.0;
    for (int k = 0; k < 20; ++k) {
      ModelParams p;
      p.j_par = u(rng);
      p.j_perp = u(rng);
      p.h = 2.0 * u(rng);
      p.pin_eps = 0.01 * u(rng);
      p.n_sites = 6 + (k % 5);
      const SparseOperator H = build_hamiltonian(p);
      worst_e = std::max(worst_e, std::abs(lanczos_ground_state(H, 1e-12, 1).energy -
                                           oracle::dense_ground_state(H).energy));
    }
    v.detail << " max |E_lanczos - E_dense| = " << worst_e;
    v.require(worst_e <= 1e-10, "energy mismatch");

    struct Model {
      const char* name;
      double j_par, j_perp;
      Frame frame;
      std::vector<double> fields;
    };
    const Model models[] = {{"Ising", 0.0, 1.0, Frame::lab, {0.1, 0.3, 0.45, 0.7, 1.0}},
                            {"XY", 1.0, 0.0, Frame::order_axis, {0.3, 0.8, 1.2, 1.7, 2.2}}};
    for (const auto& m : models) {
      double worst = 0.0;
      for (double h : m.fields) {
        SweepConfig ed;
        ed.j_par = m.j_par;
        ed.j_perp = m.j_perp;
        ed.frame = m.frame;
        ed.n_sites = 16;
        SweepConfig dm = ed;
        dm.backend = Backend::idmrg;
        dm.kept_states = 64;
        const SweepRow a = sweep_point(ed, h);
        const SweepRow b = sweep_point(dm, h);
        keep({a, b});
        const double d = a.c_rho && b.c_rho ? std::abs(*a.c_rho - *b.c_rho) : 1.0;
        v.detail << " " << m.name << " h=" << h << " dC=" << d << ";";
        worst = std::max(worst, d);
      }
      v.require(worst <= 2e-2, std::string(m.name) + " iDMRG and ED C(rho) differ by more than 2e-2");
    }
    report(9, v);
  }

  {
    // Random states last so every sweep row above is included in the row check.
    Verdict v;
    std::mt19937_64 rng(1234);
    double worst_rows = 0.0;
    int row_errors = 0;
    for (const auto& r : all_rows) {
      if (!r.error.empty()) ++row_errors;
      worst_rows = std::max(worst_rows, std::abs(certificate_gap(r)));
    }
    double worst_random = 0.0;
    int random_failures = 0;
    LsOptions opts;
    opts.mode = BellMode::complex;
    const auto t0 = std::chrono::steady_clock::now();
    for (int n = 0; n < 1000; ++n) {
      TwoQubitDensityMatrix rho;
      rho.rho = random_state(rng);
      LSDecomposition d;
      try {
        d = ls_decompose(rho, opts);
      } catch (const CertificateError& e) {
        d = e.best();
      }
      const double gap = std::abs(d.certificate_gap);
      if (gap > 1e-5) ++random_failures;
      worst_random = std::max(worst_random, gap);
    }
    v.detail << " " << all_rows.size() << " sweep rows: max gap " << worst_rows << ", " << row_errors
             << " error rows; 1000 random states: max gap " << worst_random << ", " << random_failures
             << " above 1e-5 (" << seconds_since(t0) << " s)";
    v.require(worst_rows <= 1e-5 && row_errors == 0, "sweep rows break the certificate");
    v.require(worst_random <= 1e-5, "random states break the certificate");
    report(5, v);
  }

  {
    Verdict v;
    for (double p : {0.4, 0.6, 0.8, 1.0}) {
      const auto [c, expected] = oracle::werner_values(p);
      const TwoQubitDensityMatrix w = oracle::werner_state(p);
      const LSDecomposition d = ls_decompose(w);
      const double grid = 1.0 - oracle::ls_grid_search(w, 9).lambda;
      const double a2 = d.bell ? d.bell->a2() : 0.0;
      v.detail << " p=" << p << ": 1-Lambda " << d.one_minus_lambda() << " grid " << grid << " a2 " << a2 << ";";
      v.require(std::abs(grid - expected) <= 1e-4, "grid oracle disagrees with the closed form");
      v.require(std::abs(d.one_minus_lambda() - expected) <= 1e-4 && a2 >= 0.999,
                "Werner p = " + std::to_string(p));
      (void)c;
    }
    report(6, v);
  }

  {
    Verdict v;
    std::mt19937_64 rng(77);
    // RDM invariants and reconstruction on every decomposed sweep row
    double worst_inv = 0.0, worst_rec = 0.0;
    LsOptions ls;
    for (const auto& r : all_rows) {
      if (!r.rho) continue;
      const DensityMatrixCheck chk = check_density_matrix(*r.rho);
      worst_inv = std::max({worst_inv, chk.hermiticity_error, chk.trace_error, -chk.min_eigenvalue});
      if (r.separable) continue;
      TwoQubitDensityMatrix rho;
      rho.rho = *r.rho;
      LSDecomposition d;
      try {
        d = ls_decompose(rho, ls);
      } catch (const CertificateError& e) {
        d = e.best();
      }
      const Eigen::Vector4cd u = d.bell->computational();
      const Eigen::Matrix4cd back = d.lambda * d.rho_s.rho + (1.0 - d.lambda) * (u * u.adjoint());
      worst_rec = std::max(worst_rec, (back - rho.rho).cwiseAbs().maxCoeff());
    }
    // PPT <=> concurrence on 10^4 states, excluding those within rounding of the boundary
    int mismatches = 0;
    double worst_lu = 0.0;
    for (int n = 0; n < 10000; ++n) {
      const Eigen::Matrix4cd rho = random_state(rng);
      const double c = concurrence(rho);
      const PptResult p = ppt_check(rho);
      if (std::abs(p.min_pt_eigenvalue) > 1e-9 && p.separable == (c > 1e-8)) ++mismatches;
      if (n < 1000) {
        const Eigen::Matrix4cd u = kron(random_unitary(rng), random_unitary(rng));
        worst_lu = std::max(worst_lu, std::abs(c - concurrence(Eigen::Matrix4cd(u * rho * u.adjoint()))));
      }
    }
    // byte-identical reruns through the file writer
    const auto dir = std::filesystem::temp_directory_path() / "spinent-acceptance";
    std::filesystem::create_directories(dir);
    SweepConfig c = ising(10);
    c.h_steps = 21;
    c.workers = 1;
    emit(run_sweep(c), OutputFormat::csv, (dir / "a.csv").string());
    c.workers = 4;
    emit(run_sweep(c), OutputFormat::csv, (dir / "b.csv").string());
    auto slurp = [](const std::filesystem::path& p) {
      std::ifstream in(p, std::ios::binary);
      return std::string(std::istreambuf_iterator<char>(in), {});
    };
    const bool identical = slurp(dir / "a.csv") == slurp(dir / "b.csv");

    v.detail << " RDM invariant error " << worst_inv << ", reconstruction " << worst_rec << ", PPT/C mismatches "
             << mismatches << ", LU change " << worst_lu << ", reruns identical " << (identical ? "yes" : "no");
    v.require(worst_inv <= 1e-12, "RDM invariants");
    v.require(worst_rec <= 1e-9, "reconstruction");
    v.require(mismatches == 0, "PPT and concurrence disagree");
    v.require(worst_lu <= 1e-10, "concurrence not local-unitary invariant");
    v.require(identical, "reruns differ");
    report(10, v);
  }

  {
    // Qualitative only: 1 - Lambda of the XY chain has a local minimum at h = 0.
    SweepConfig c;
    c.j_par = 1.0;
    c.j_perp = 0.0;
    c.frame = Frame::order_axis;
    c.n_sites = 12;
    c.h_min = 0.0;
    c.h_max = 0.1;
    c.h_steps = 6;
    const SweepResult r = run_sweep(c);
    std::printf("info: XY N=12 1-Lambda near h = 0:");
    for (const auto& row : r.rows) std::printf(" %s", opt(row.one_minus_lambda).c_str());
    std::printf("\n");
  }

  std::printf("acceptance: %d criterion(s) failed, %.0f s total\n", failures, seconds_since(start));
  return failures == 0 ? 0 : 1;
}
