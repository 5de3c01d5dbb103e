#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "holo/types.hpp"

// Phase recovery from intensity-only data along rays.
//
// Everything here reads a field exclusively through IntensityFunction. The
// recovery frame is the ray start q; inside that frame the plane wave is
// exp(i k.dir s) and the recovered coefficients are the gauged ones,
// exp(-i k.q) times the far-field coefficients about q.
//
// Notation used below: beta = kappa - k.dir (the detuning, > 0 away from the
// degenerate direction), and the two-point kernel determinant is
// D = 2i sin(tau (k.dir - kappa)) = -2i sin(beta tau).

namespace holo {

inline constexpr double kDirectionTolerance = 1e-12;
inline constexpr double kKernelTolerance = 1e-6;
/// Per-sample round-off assumed for measured intensities.
inline constexpr double kIntensityRoundoff = 2.3e-16;
inline constexpr double kDefaultTolerance = 1e-2;

/// beta = kappa - k.dir. Throws DegenerateDirectionError when
/// 1 - dir.k/kappa <= kDirectionTolerance.
double detuning(const WaveVector &k, const Direction &dir);

/// D = 2i sin(tau (k.dir - kappa)).
cplx kernel_determinant(double tau, const WaveVector &k, const Direction &dir);

/// tau = pi / (2 beta), which puts D = -2i (|D| maximal).
double choose_tau(const WaveVector &k, const Direction &dir);

/// Nearest radius to s that is a whole number (>= 1) of periods 2 pi / beta,
/// so that exp(i beta s) is the same at every aligned radius.
double align_radius(double s, const WaveVector &k, const Direction &dir);

/// Intensity samples recorded along one ray: (s, |psi(origin + s dir)|^2).
struct IntensityTrace {
  Vec3 frame_origin;
  Direction dir{Vec3{0.0, 0.0, 1.0}};
  std::vector<std::pair<double, double>> samples;

  /// Throws DomainError on nonpositive s, negative I or repeated s.
  void validate() const;

  /// Measurement that answers only at recorded ray points (relative match
  /// 1e-12 in s); anything else raises DomainError.
  IntensityFunction as_measurement() const;
};

/// Queries `measure` once per radius (duplicates collapsed) and records the
/// samples, sorted by s.
IntensityTrace sample_trace(const IntensityFunction &measure, const Ray &frame,
                            std::span<const double> radii);

struct SamplingPlan {
  std::vector<double> s_grid{1e3, 2e3, 4e3};
  std::optional<double> tau; ///< nullopt selects choose_tau
  int order = 2;
  bool richardson = true;
  /// Snap each base radius to align_radius before sampling.
  bool align_phase = true;
  /// Target accuracy; drives the amplification guard.
  double tolerance = kDefaultTolerance;

  /// Checks the grid (strictly ascending, positive, min >= 10 tau), order and
  /// tolerance against the resolved tau.
  void validate(double resolved_tau) const;
};

/// ã(s) = s (I(q + s dir) - 1) for the frame (q, dir).
double scaled_residual(const IntensityFunction &measure, const WaveVector &k,
                       const Ray &frame, double s);

/// Two-point extraction of F from g(s) = e^{i beta s} F + e^{-i beta s} conj(F)
/// + O(1/s) sampled at s and s + tau. Exact for the pure two-phase form.
cplx extract_leading(double g_x, double g_y, double s, double tau,
                     const WaveVector &k, const Direction &dir);

/// exp(i kappa s)/s * sum_{j<=n} prefix[j-1] / s^(j-1); no gauge factor.
cplx partial_field(std::span<const cplx> prefix, const WaveVector &k, double s);

/// True when level-n noise s^(n+1) * round-off exceeds tolerance / 10.
bool amplification_exceeded(double s, int n, double tolerance);

/// b_n(s) = s^n (ã(s) - a_n(s)), n = prefix.size(), where a_n is the scaled
/// residual of exp(i k.dir s) + partial_field(prefix, s). When `warnings` is
/// given, an amplification warning is appended if the guard trips.
double residual_b(const IntensityFunction &measure,
                  std::span<const cplx> prefix, const WaveVector &k,
                  const Ray &frame, double s,
                  std::vector<std::string> *warnings = nullptr,
                  double tolerance = kDefaultTolerance);

/// One induction step: estimate of coefficient n+1 from b_n at s and s + tau.
cplx recover_next(const IntensityFunction &measure,
                  std::span<const cplx> prefix, const WaveVector &k,
                  const Ray &frame, double s, double tau);

struct RadiusEstimate {
  double s;
  cplx value;
};

struct Refined {
  cplx value;
  /// Distance to the next-lower-order extrapolant; 0 with a single estimate.
  double spread = 0.0;
  std::vector<std::string> warnings;
};

/// Polynomial extrapolation in 1/s to s = infinity over the largest (up to
/// three) radii: two radii give (s2 F2 - s1 F1)/(s2 - s1), three add one more
/// Neville step.
Refined richardson_refine(std::span<const RadiusEstimate> estimates);

struct LevelDiagnostics {
  int level = 0; ///< coefficient index j (1-based)
  double tau = 0.0;
  double abs_D = 0.0;
  std::vector<RadiusEstimate> raw;
  cplx refined;
  double spread = 0.0;
};

struct RecoveryReport {
  /// Gauged coefficients about the ray start.
  FarFieldExpansion expansion;
  std::vector<LevelDiagnostics> per_level;
  /// Base radii actually used (after phase alignment).
  std::vector<double> radius_grid;
  std::vector<std::string> warnings;
  bool truncated = false;
  IntensityTrace trace;
};

/// Runs the induction f1 -> f2 -> ... -> f_order along `ray`, with the frame
/// origin at ray.start. Stops early (truncated = true) when the amplification
/// guard trips at some level.
RecoveryReport recover_expansion(const IntensityFunction &measure,
                                 const Ray &ray, const WaveVector &k,
                                 const SamplingPlan &plan);

/// Lower bound on reconstruction radii: 2 (|frame origin| + source_radius).
double convergence_bound(const RecoveryReport &report, double source_radius);

/// psi1 at ray.start + s_eval dir from the recovered expansion. Throws
/// OutOfZoneError below convergence_bound(report, source_radius).
cplx reconstruct_on_ray(const RecoveryReport &report, const WaveVector &k,
                        double s_eval, double source_radius);

/// Plane through `point` spanned by the orthonormal pair (u, v).
struct Plane {
  Vec3 point;
  Vec3 u;
  Vec3 v;

  void validate() const;
  Vec3 normal() const { return cross(u, v); }
};

struct PlaneTargetResult {
  Vec3 target;
  std::optional<cplx> value;
  std::string error;
  int ray_index = -1; ///< index into PlaneRecovery::rays, -1 if none
  double ray_length = 0.0;
};

struct PlaneRecovery {
  std::vector<PlaneTargetResult> targets;
  std::vector<Ray> rays;
  std::vector<RecoveryReport> reports; ///< parallel to rays
};

/// For every target x, recovers psi1(x) along the in-plane ray from
/// plane.point through x. Targets sharing a ray share one recovery. Failures
/// (off-plane target, degenerate direction, inside the convergence zone,
/// recovery errors) are recorded per target.
PlaneRecovery recover_on_plane(const IntensityFunction &measure,
                               const Plane &plane, const WaveVector &k,
                               const SamplingPlan &plan,
                               std::span<const Vec3> targets,
                               double source_radius);

} // namespace holo
