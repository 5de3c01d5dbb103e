#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "holo/field.hpp"
#include "holo/recovery.hpp"

namespace holo {

struct ModeEntry {
  int l = 0;
  int m = 0;
  double re = 0.0;
  double im = 0.0;
  friend bool operator==(const ModeEntry &, const ModeEntry &) = default;
};

struct SceneConfig {
  Vec3 wave_vector{0.0, 0.0, 1.0};
  std::vector<ModeEntry> multipoles;
  Vec3 center;
  double r_min = 1.0;
  friend bool operator==(const SceneConfig &, const SceneConfig &) = default;
};

struct RayGeometry {
  Vec3 start;
  Vec3 direction;
  friend bool operator==(const RayGeometry &, const RayGeometry &) = default;
};

struct PlaneGeometry {
  Vec3 point;
  Vec3 u;
  Vec3 v;
  std::vector<Vec3> targets;
  double tolerance = 5e-2; ///< max relative error per target
  friend bool operator==(const PlaneGeometry &, const PlaneGeometry &) = default;
};

/// Exactly one of ray / plane is set.
struct GeometryConfig {
  std::optional<RayGeometry> ray;
  std::optional<PlaneGeometry> plane;
  friend bool operator==(const GeometryConfig &,
                         const GeometryConfig &) = default;
};

struct PlanConfig {
  std::vector<double> s_grid{1e3, 2e3, 4e3};
  std::optional<double> tau; ///< nullopt is "auto"
  int order = 2;
  bool richardson = true;
  bool align_phase = true;
  double tolerance = kDefaultTolerance;
  friend bool operator==(const PlanConfig &, const PlanConfig &) = default;
};

/// Multiplicative intensity perturbation I (1 + amplitude u), u ~ U[-1, 1].
struct NoiseConfig {
  double amplitude = 0.0;
  std::uint64_t seed = 0;
  friend bool operator==(const NoiseConfig &, const NoiseConfig &) = default;
};

struct OutputConfig {
  std::string directory = "out";
  std::string format = "csv";
  friend bool operator==(const OutputConfig &, const OutputConfig &) = default;
};

/// Optional pass/fail gates; the CLI exit status reflects them.
struct CheckConfig {
  std::optional<double> max_abs_error;
  std::optional<double> slope_min;
  std::optional<double> slope_max;
  std::vector<int> slope_levels; ///< empty means every level
  friend bool operator==(const CheckConfig &, const CheckConfig &) = default;
};

struct ExperimentConfig {
  std::string id = "experiment";
  SceneConfig scene;
  GeometryConfig geometry;
  PlanConfig plan;
  std::optional<NoiseConfig> noise;
  OutputConfig output;
  CheckConfig checks;

  WaveVector wave() const;
  RadiatingField field() const;
  SamplingPlan sampling_plan() const;
  friend bool operator==(const ExperimentConfig &,
                         const ExperimentConfig &) = default;
};

/// Parses and validates a JSON experiment document; defaults are applied for
/// every optional key. Errors are ConfigError with a field path.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path &path);

/// Inverse of parse_config (all keys written explicitly).
std::string serialize_config(const ExperimentConfig &config);

} // namespace holo
