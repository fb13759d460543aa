#include "spinent/sweep.hpp"

#include "spinent/errors.hpp"
#include "spinent/lanczos.hpp"
#include "spinent/observables.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

namespace spinent {

namespace {

using json = nlohmann::ordered_json;

std::string fmt12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string field(const std::optional<double>& v) { return v ? fmt12(*v) : "NA"; }

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' || c == '\r' ? ' ' : c;
  }
  return out + '"';
}

json value(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json matrix_json(const Eigen::Matrix4cd& m) {
  json rows = json::array();
  for (int r = 0; r < 4; ++r) {
    json row = json::array();
    for (int c = 0; c < 4; ++c) row.push_back(json::array({m(r, c).real(), m(r, c).imag()}));
    rows.push_back(row);
  }
  return rows;
}

RawPoint run_ed(const SweepConfig& cfg, double h, double pin, Eigen::VectorXd& warm) {
  ModelParams p;
  p.j_par = cfg.j_par;
  p.j_perp = cfg.j_perp;
  p.h = h;
  p.n_sites = cfg.n_sites;
  p.boundary = cfg.boundary;
  p.pin_eps = pin;
  p.frame = cfg.frame;
  const SparseOperator H = build_hamiltonian(p);

  LanczosOptions opts;
  opts.tol = cfg.lanczos_tol;
  opts.seed = cfg.seed;
  const StateVector gs = lanczos_ground_state(H, opts, warm.size() ? &warm : nullptr);
  warm = gs.amplitudes;

  const auto [i, j] = central_pair(cfg.n_sites, cfg.separation);
  const MagnetizationRecord m = magnetizations(gs);
  RawPoint out;
  out.pin = pin;
  out.energy = gs.energy / cfg.n_sites;
  out.sx = m.sx_uniform;
  out.sz_stag_signed = m.sz_staggered_signed;
  out.rho = reduced_density_matrix(gs, i, j).rho;
  return out;
}

RawPoint run_idmrg(const SweepConfig& cfg, double h, double pin) {
  ModelParams p;
  p.j_par = cfg.j_par;
  p.j_perp = cfg.j_perp;
  p.h = h;
  p.pin_eps = pin;
  p.frame = cfg.frame;
  DmrgConfig d;
  d.kept_states = cfg.kept_states;
  d.energy_tol = cfg.dmrg_energy_tol;
  d.max_iterations = cfg.dmrg_max_iterations;
  d.lanczos.seed = cfg.seed;
  const DmrgResult r = idmrg_ground_state(p, d);
  RawPoint out;
  out.pin = pin;
  out.energy = r.energy_per_site;
  out.sx = r.magnetization.sx_uniform;
  out.sz_stag_signed = r.magnetization.sz_staggered_signed;
  out.rho = r.central.rho;
  return out;
}

void fill_decomposition(SweepRow& row, const LSDecomposition& d) {
  row.separable = d.separable;
  if (d.separable) {
    row.c_rho = 0.0;
    row.one_minus_lambda = 0.0;
    return;
  }
  row.c_rho = d.c_rho;
  row.c_rho_e = d.c_rho_e;
  row.one_minus_lambda = d.one_minus_lambda();
  if (d.bell) {
    row.a2 = d.bell->a2();
    row.b2 = d.bell->b2();
    row.c2 = d.bell->c2();
    row.d2 = d.bell->d2();
  }
}

}  // namespace

Backend parse_backend(std::string_view name) {
  if (name == "ed") return Backend::ed;
  if (name == "idmrg") return Backend::idmrg;
  throw std::invalid_argument("unknown backend '" + std::string(name) + "'");
}

OutputFormat parse_format(std::string_view name) {
  if (name == "csv") return OutputFormat::csv;
  if (name == "json") return OutputFormat::json;
  throw std::invalid_argument("unknown format '" + std::string(name) + "'");
}

std::string_view to_string(Backend b) { return b == Backend::ed ? "ed" : "idmrg"; }
std::string_view to_string(OutputFormat f) { return f == OutputFormat::csv ? "csv" : "json"; }

void SweepConfig::validate() const {
  if (!(h_min <= h_max)) throw std::invalid_argument("h_min must not exceed h_max");
  if (h_min < 0.0) throw std::invalid_argument("h must be non-negative");
  if (h_steps < 1) throw std::invalid_argument("h_steps must be at least 1");
  if (separation != 1 && separation != 2) throw std::invalid_argument("separation must be 1 or 2");
  if (separation == 2 && backend != Backend::ed)
    throw std::invalid_argument("separation 2 is only available with the ed backend");
  if (j_par < 0.0 || j_perp < 0.0) throw std::invalid_argument("couplings must be non-negative");
  for (double p : pin_sequence)
    if (!(p >= 0.0) || p > kMaxPin) throw std::invalid_argument("pin values must lie in [0, 0.1]");
  if (backend == Backend::ed) {
    if (n_sites < 2 + separation) throw std::invalid_argument("n_sites too small for the measured pair");
    if (n_sites > kMaxEdSites) throw CapacityError("n_sites exceeds the exact-diagonalization capacity");
  } else {
    DmrgConfig d;
    d.kept_states = kept_states;
    d.energy_tol = dmrg_energy_tol;
    d.max_iterations = dmrg_max_iterations;
    d.validate();
  }
}

double SweepConfig::h_at(int k) const {
  if (h_steps == 1) return h_min;
  return h_min + (h_max - h_min) * k / (h_steps - 1);
}

RawPoint extrapolate_to_zero_pin(std::vector<RawPoint> points) {
  if (points.empty()) throw std::invalid_argument("extrapolate_to_zero_pin: no points");
  std::sort(points.begin(), points.end(), [](const RawPoint& a, const RawPoint& b) { return a.pin < b.pin; });
  if (points.size() == 1) return points.front();
  const RawPoint& p1 = points[0];
  const RawPoint& p2 = points[1];
  if (!(p2.pin > p1.pin)) throw std::invalid_argument("extrapolate_to_zero_pin: repeated pin value");
  // f(0) = f1 - p1 (f2 - f1) / (p2 - p1)
  const double w = p1.pin / (p2.pin - p1.pin);
  RawPoint out;
  out.pin = 0.0;
  out.energy = p1.energy - w * (p2.energy - p1.energy);
  out.sx = p1.sx - w * (p2.sx - p1.sx);
  out.sz_stag_signed = p1.sz_stag_signed - w * (p2.sz_stag_signed - p1.sz_stag_signed);
  out.rho = p1.rho - w * (p2.rho - p1.rho);
  return out;
}

SweepRow sweep_point(const SweepConfig& cfg, double h) {
  SweepRow row;
  row.h = h;
  row.backend = std::string(to_string(cfg.backend));
  std::vector<double> pins = cfg.pin_sequence;
  if (pins.empty()) pins.push_back(0.0);
  row.pin_mode = pins.size() > 1 ? "extrapolated" : (pins.front() > 0.0 ? "pinned" : "unpinned");

  try {
    Eigen::VectorXd warm;
    for (double pin : pins)
      row.raw.push_back(cfg.backend == Backend::ed ? run_ed(cfg, h, pin, warm) : run_idmrg(cfg, h, pin));
    RawPoint x = extrapolate_to_zero_pin(row.raw);

    row.energy = x.energy;
    row.sx = x.sx;
    row.sz_stag = std::abs(x.sz_stag_signed);

    // Every supported Hamiltonian is real, so rounding is all the imaginary
    // part can hold.
    if (x.rho.imag().cwiseAbs().maxCoeff() < 1e-12) x.rho = x.rho.real().cast<std::complex<double>>();
    row.clipped_weight = project_to_density_matrix(x.rho);
    if (x.rho.imag().cwiseAbs().maxCoeff() < 1e-12) x.rho = x.rho.real().cast<std::complex<double>>();
    row.rho = x.rho;

    TwoQubitDensityMatrix rho;
    rho.rho = x.rho;
    std::tie(rho.site_i, rho.site_j) =
        cfg.backend == Backend::ed ? central_pair(cfg.n_sites, cfg.separation) : std::pair{1, 2};
    LsOptions ls;
    ls.mode = cfg.bell_mode;
    try {
      fill_decomposition(row, ls_decompose(rho, ls));
    } catch (const CertificateError& e) {
      fill_decomposition(row, e.best());
      row.error = e.what();
    }
  } catch (const std::exception& e) {
    row.error = e.what();
  }
  return row;
}

SweepSummary summarize(const std::vector<SweepRow>& rows) {
  SweepSummary s;
  double best_ce = -1.0, best_c = -1.0, best_oml = 2.0;
  bool seen_a2_above = false;
  for (const auto& r : rows) {
    if (!r.error.empty()) {
      ++s.error_rows;
      continue;
    }
    if (r.c_rho_e && *r.c_rho_e > best_ce) {
      best_ce = *r.c_rho_e;
      s.argmax_c_rho_e = r.h;
    }
    if (r.c_rho && *r.c_rho > best_c) {
      best_c = *r.c_rho;
      s.argmax_c_rho = r.h;
    }
    if (!r.separable && r.one_minus_lambda && *r.one_minus_lambda < best_oml) {
      best_oml = *r.one_minus_lambda;
      s.argmin_one_minus_lambda = r.h;
    }
    if (r.a2) {
      if (*r.a2 >= 1e-3) seen_a2_above = true;
      else if (seen_a2_above && !s.a2_drop) s.a2_drop = r.h;
    }
  }
  return s;
}

SweepResult run_sweep(const SweepConfig& config) {
  config.validate();
  SweepResult result;
  result.config = config;
  result.rows.resize(static_cast<std::size_t>(config.h_steps));

  int workers = config.workers > 0 ? config.workers : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, config.h_steps);
  std::atomic<int> next{0};
  auto work = [&] {
    for (int k = next++; k < config.h_steps; k = next++)
      result.rows[static_cast<std::size_t>(k)] = sweep_point(config, config.h_at(k));
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  result.summary = summarize(result.rows);
  return result;
}

std::string to_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << kCsvHeader << '\n';
  for (const auto& r : rows) {
    out << fmt12(r.h) << ',' << field(r.energy) << ',' << field(r.sx) << ',' << field(r.sz_stag) << ','
        << field(r.c_rho) << ',' << field(r.c_rho_e) << ',' << field(r.one_minus_lambda) << ','
        << field(r.a2) << ',' << field(r.b2) << ',' << field(r.c2) << ',' << field(r.d2) << ','
        << (r.separable ? 1 : 0) << ',' << r.backend << ',' << r.pin_mode << ',' << csv_escape(r.error)
        << '\n';
  }
  return out.str();
}

std::string to_json(const SweepResult& result) {
  const SweepConfig& c = result.config;
  json cfg = {{"j_par", c.j_par},
              {"j_perp", c.j_perp},
              {"h_min", c.h_min},
              {"h_max", c.h_max},
              {"h_steps", c.h_steps},
              {"sites", c.n_sites},
              {"backend", to_string(c.backend)},
              {"kept_states", c.kept_states},
              {"pin", c.pin_sequence},
              {"separation", c.separation},
              {"boundary", to_string(c.boundary)},
              {"frame", to_string(c.frame)},
              {"bell_mode", c.bell_mode == BellMode::real ? "real" : "complex"},
              {"seed", c.seed}};

  json rows = json::array();
  for (const auto& r : result.rows) {
    json row = {{"h", r.h},
                {"energy", value(r.energy)},
                {"sx", value(r.sx)},
                {"sz_stag", value(r.sz_stag)},
                {"c_rho", value(r.c_rho)},
                {"c_rho_e", value(r.c_rho_e)},
                {"one_minus_lambda", value(r.one_minus_lambda)},
                {"a2", value(r.a2)},
                {"b2", value(r.b2)},
                {"c2", value(r.c2)},
                {"d2", value(r.d2)},
                {"separable", r.separable},
                {"backend", r.backend},
                {"pin_mode", r.pin_mode},
                {"error", r.error.empty() ? json(nullptr) : json(r.error)}};
    if (r.rho) row["rho"] = matrix_json(*r.rho);
    row["clipped_weight"] = r.clipped_weight;
    json raw = json::array();
    for (const auto& p : r.raw)
      raw.push_back({{"pin", p.pin},
                     {"energy", p.energy},
                     {"sx", p.sx},
                     {"sz_stag", std::abs(p.sz_stag_signed)},
                     {"sz_stag_signed", p.sz_stag_signed},
                     {"rho", matrix_json(p.rho)}});
    row["raw"] = raw;
    rows.push_back(row);
  }

  const SweepSummary& s = result.summary;
  json summary = {{"argmax_c_rho_e", value(s.argmax_c_rho_e)},
                  {"argmin_one_minus_lambda", value(s.argmin_one_minus_lambda)},
                  {"argmax_c_rho", value(s.argmax_c_rho)},
                  {"a2_drop", value(s.a2_drop)},
                  {"error_rows", s.error_rows}};
  json doc = {{"config", cfg}, {"rows", rows}, {"summary", summary}};
  return doc.dump(2) + "\n";
}

void emit(const SweepResult& result, OutputFormat format, const std::string& path) {
  if (result.rows.empty()) throw std::invalid_argument("emit: no rows");
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  f << (format == OutputFormat::csv ? to_csv(result.rows) : to_json(result));
  if (!f) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace spinent
