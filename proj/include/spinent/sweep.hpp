#pragma once

#include "spinent/entanglement.hpp"
#include "spinent/idmrg.hpp"
#include "spinent/spin_model.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace spinent {

enum class Backend { ed, idmrg };
enum class OutputFormat { csv, json };

Backend parse_backend(std::string_view name);
OutputFormat parse_format(std::string_view name);
std::string_view to_string(Backend b);
std::string_view to_string(OutputFormat f);

struct SweepConfig {
  double j_par = 0.0;
  double j_perp = 1.0;
  double h_min = 0.0;
  double h_max = 1.0;
  int h_steps = 101;
  int n_sites = 16;
  Backend backend = Backend::ed;
  int kept_states = 64;
  /// Pinning amplitudes run at every h; two or more are extrapolated to zero
  /// linearly from the two smallest. Empty means a single unpinned run.
  std::vector<double> pin_sequence{1e-2, 1e-3, 1e-4};
  int separation = 1;
  std::string output_path;
  OutputFormat format = OutputFormat::csv;
  Boundary boundary = Boundary::open;
  Frame frame = Frame::lab;
  BellMode bell_mode = BellMode::real;
  std::uint64_t seed = 1;
  double lanczos_tol = 1e-10;
  double dmrg_energy_tol = 1e-9;
  int dmrg_max_iterations = 600;
  int workers = 0;  // 0: one per hardware thread

  void validate() const;
  double h_at(int k) const;
};

/// One pinned run before extrapolation.
struct RawPoint {
  double pin = 0.0;
  double energy = 0.0;  // per site
  double sx = 0.0;
  double sz_stag_signed = 0.0;
  Eigen::Matrix4cd rho = Eigen::Matrix4cd::Zero();
};

struct SweepRow {
  double h = 0.0;
  std::optional<double> energy;  // per site
  std::optional<double> sx;
  std::optional<double> sz_stag;
  std::optional<double> c_rho;
  std::optional<double> c_rho_e;
  std::optional<double> one_minus_lambda;
  std::optional<double> a2, b2, c2, d2;
  bool separable = false;
  std::string backend;
  std::string pin_mode;  // unpinned | pinned | extrapolated
  std::string error;     // empty on success
  std::optional<Eigen::Matrix4cd> rho;  // the density matrix that was decomposed
  double clipped_weight = 0.0;  // removed when the extrapolated rho was made positive
  std::vector<RawPoint> raw;
};

struct SweepSummary {
  std::optional<double> argmax_c_rho_e;
  std::optional<double> argmin_one_minus_lambda;  // over inseparable rows
  std::optional<double> argmax_c_rho;
  std::optional<double> a2_drop;  // first h where a2 falls below 1e-3
  int error_rows = 0;
};

struct SweepResult {
  SweepConfig config;
  std::vector<SweepRow> rows;  // grid order
  SweepSummary summary;
};

/// Extrapolate to zero pin from the two smallest entries of `points`
/// (linear in the pin). A single point is returned unchanged.
RawPoint extrapolate_to_zero_pin(std::vector<RawPoint> points);

/// Runs every grid point; failures end up in the row's error field.
SweepResult run_sweep(const SweepConfig& config);

/// Evaluate one field value (used by run_sweep, exposed for tests).
SweepRow sweep_point(const SweepConfig& config, double h);

SweepSummary summarize(const std::vector<SweepRow>& rows);

inline constexpr std::string_view kCsvHeader =
    "h,energy,sx,sz_stag,c_rho,c_rho_e,one_minus_lambda,a2,b2,c2,d2,separable,backend,pin_mode,error";

std::string to_csv(const std::vector<SweepRow>& rows);
std::string to_json(const SweepResult& result);

/// Writes rows in the requested format; throws std::runtime_error when the
/// path cannot be written.
void emit(const SweepResult& result, OutputFormat format, const std::string& path);

}  // namespace spinent
