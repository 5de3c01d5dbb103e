#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "holo/config.hpp"

namespace holo {

/// One line of the results table. Column order is fixed (see kResultHeader).
struct ResultRow {
  std::string experiment;
  int level = 0;
  double s = 0.0;
  cplx raw;
  cplx refined;
  std::optional<cplx> oracle;
  std::optional<double> abs_error; ///< |refined - oracle| when oracle present
  double abs_D = 0.0;
  std::string warnings;
};

inline constexpr const char *kResultHeader =
    "experiment,level,s,raw_re,raw_im,refined_re,refined_im,oracle_re,"
    "oracle_im,abs_error,abs_D,warnings";

struct LevelSummary {
  int level = 0;
  std::optional<double> slope; ///< nullopt prints as n/a
  std::optional<double> max_abs_error;
};

struct RunSummary {
  std::string experiment;
  std::string mode;
  bool oracle_available = false;
  /// What the slopes were fitted on.
  std::string slope_basis;
  std::vector<LevelSummary> levels;
  std::vector<std::string> notes;
  std::vector<std::string> failed_checks;

  bool passed() const { return failed_checks.empty(); }
};

struct RunResult {
  std::vector<ResultRow> rows;
  RunSummary summary;
};

/// Measurement for the configured scene, with the seeded noise wrapper applied
/// when the config asks for it.
IntensityFunction make_config_measurement(const ExperimentConfig &config);

/// I (1 + amplitude u) with u in [-1, 1] drawn from a generator seeded by
/// `seed` and the bit pattern of the query point, so values do not depend on
/// query order.
IntensityFunction with_noise(IntensityFunction measure, double amplitude,
                             std::uint64_t seed);

/// Least-squares slope of log(errors) against log(radii); nullopt when any
/// error is not positive or the largest error is below `floor`.
std::optional<double> loglog_slope(const std::vector<double> &radii,
                                   const std::vector<double> &errors,
                                   double floor = 1e-12);

/// Single-ray recovery through the full induction.
RunResult run_recover(const ExperimentConfig &config);

/// Per-level convergence-order study over the configured radius grid. With a
/// closed-form oracle (ray starting at the source center) each level is
/// estimated from the oracle prefix and slopes are fitted to the raw
/// estimate errors; otherwise level-1 recoveries at each radius are scored by
/// reconstruction error at a far point.
RunResult run_convergence(const ExperimentConfig &config);

struct PlaneRow {
  Vec3 point;
  std::optional<cplx> recovered;
  cplx truth;
  std::optional<double> rel_error;
  int ray_index = -1;
  std::string error;
};

inline constexpr const char *kPlaneHeader =
    "experiment,x,y,z,recovered_re,recovered_im,true_re,true_im,rel_error,"
    "ray_index,error";

struct PlaneDemoResult {
  std::vector<PlaneRow> rows;
  RunSummary summary;
  std::size_t recoveries = 0;
};

PlaneDemoResult run_plane_demo(const ExperimentConfig &config);

/// Samples along the configured ray at every grid radius.
struct SynthRow {
  double s;
  Vec3 point;
  cplx psi1;
  double intensity;
};
inline constexpr const char *kSynthHeader =
    "experiment,s,x,y,z,psi1_re,psi1_im,intensity";
std::vector<SynthRow> run_synth(const ExperimentConfig &config);

std::string format_results_csv(const std::vector<ResultRow> &rows);
std::string format_plane_csv(const std::string &experiment,
                             const std::vector<PlaneRow> &rows);
std::string format_synth_csv(const std::string &experiment,
                             const std::vector<SynthRow> &rows);
std::string format_summary(const RunSummary &summary);

/// Writes <dir>/<id>_results.csv and <dir>/<id>_summary.txt; returns the
/// paths written. Throws Error naming the path on I/O failure.
std::vector<std::filesystem::path>
write_report(const std::vector<ResultRow> &rows, const RunSummary &summary,
             const std::filesystem::path &dir);

std::vector<std::filesystem::path>
write_plane_report(const PlaneDemoResult &result,
                   const std::filesystem::path &dir);

std::filesystem::path write_text(const std::filesystem::path &path,
                                 const std::string &text);

} // namespace holo
