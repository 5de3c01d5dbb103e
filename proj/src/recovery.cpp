#include "holo/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "holo/errors.hpp"

namespace holo {

namespace {

constexpr double kTraceMatchTolerance = 1e-12;

// kappa - k.dir without the degeneracy check.
double raw_detuning(const WaveVector &k, const Direction &dir) {
  return k.kappa() - dot(k.vec(), dir.vec());
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

} // namespace

double detuning(const WaveVector &k, const Direction &dir) {
  const double cos_angle = dot(k.vec(), dir.vec()) / k.kappa();
  if (1.0 - cos_angle <= kDirectionTolerance)
    throw DegenerateDirectionError(
        "ray direction coincides with the propagation direction k/|k|");
  return raw_detuning(k, dir);
}

cplx kernel_determinant(double tau, const WaveVector &k, const Direction &dir) {
  return {0.0, 2.0 * std::sin(tau * (dot(k.vec(), dir.vec()) - k.kappa()))};
}

double choose_tau(const WaveVector &k, const Direction &dir) {
  return std::numbers::pi / (2.0 * detuning(k, dir));
}

double align_radius(double s, const WaveVector &k, const Direction &dir) {
  if (!(s > 0.0))
    throw DomainError("align_radius: radius must be positive");
  const double period = 2.0 * std::numbers::pi / detuning(k, dir);
  return std::max(1.0, std::round(s / period)) * period;
}

void IntensityTrace::validate() const {
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto [s, value] = samples[i];
    if (!(s > 0.0))
      throw DomainError("IntensityTrace: nonpositive radius");
    if (!(value >= 0.0))
      throw DomainError("IntensityTrace: negative intensity");
    for (std::size_t j = 0; j < i; ++j)
      if (samples[j].first == s)
        throw DomainError("IntensityTrace: repeated radius " +
                          format_double(s));
  }
}

IntensityFunction IntensityTrace::as_measurement() const {
  validate();
  auto sorted = samples;
  std::sort(sorted.begin(), sorted.end());
  return IntensityFunction([origin = frame_origin, dir = dir,
                            sorted = std::move(sorted)](const Vec3 &x) {
    const double s = dot(x - origin, dir.vec());
    auto it = std::lower_bound(
        sorted.begin(), sorted.end(), s,
        [](const auto &sample, double key) { return sample.first < key; });
    auto close = [&](auto pos) {
      return pos != sorted.end() &&
             std::abs(pos->first - s) <= kTraceMatchTolerance * std::abs(s);
    };
    if (close(it))
      return it->second;
    if (it != sorted.begin() && close(std::prev(it)))
      return std::prev(it)->second;
    throw DomainError("IntensityTrace: no sample recorded at s = " +
                      format_double(s));
  });
}

IntensityTrace sample_trace(const IntensityFunction &measure, const Ray &frame,
                            std::span<const double> radii) {
  std::vector<double> sorted(radii.begin(), radii.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

  IntensityTrace trace{frame.start, frame.dir, {}};
  trace.samples.reserve(sorted.size());
  for (double s : sorted) {
    if (!(s > 0.0))
      throw DomainError("sample_trace: radii must be positive");
    trace.samples.emplace_back(s, measure(frame.at(s)));
  }
  trace.validate();
  return trace;
}

void SamplingPlan::validate(double resolved_tau) const {
  if (!(resolved_tau > 0.0))
    throw DomainError("SamplingPlan: tau must be positive");
  if (s_grid.empty())
    throw DomainError("SamplingPlan: empty s_grid");
  for (std::size_t i = 0; i < s_grid.size(); ++i) {
    if (!(s_grid[i] > 0.0))
      throw DomainError("SamplingPlan: s_grid entries must be positive");
    if (i > 0 && !(s_grid[i] > s_grid[i - 1]))
      throw DomainError("SamplingPlan: s_grid must be strictly ascending");
  }
  if (s_grid.front() < 10.0 * resolved_tau)
    throw DomainError("SamplingPlan: min(s_grid) = " +
                      format_double(s_grid.front()) + " < 10 tau = " +
                      format_double(10.0 * resolved_tau));
  if (order < 1)
    throw DomainError("SamplingPlan: order must be >= 1");
  if (!(tolerance > 0.0))
    throw DomainError("SamplingPlan: tolerance must be positive");
}

double scaled_residual(const IntensityFunction &measure, const WaveVector &k,
                       const Ray &frame, double s) {
  (void)k;
  if (!(s > 0.0))
    throw DomainError("scaled_residual: radius must be positive");
  return s * (measure(frame.at(s)) - 1.0);
}

cplx extract_leading(double g_x, double g_y, double s, double tau,
                     const WaveVector &k, const Direction &dir) {
  const cplx D = kernel_determinant(tau, k, dir);
  if (std::abs(D) <= kKernelTolerance)
    throw DegenerateTauError("two-point kernel is degenerate: |D| = " +
                             format_double(std::abs(D)));
  // k.x - kappa|x| = -beta s on the ray through the frame origin. The common
  // phase is factored out so beta tau never comes from a difference of two
  // large rounded phases.
  const double beta = raw_detuning(k, dir);
  return std::polar(1.0, -beta * s) * (std::polar(g_x, -beta * tau) - g_y) / D;
}

cplx partial_field(std::span<const cplx> prefix, const WaveVector &k,
                   double s) {
  if (!(s > 0.0))
    throw DomainError("partial_field: radius must be positive");
  if (prefix.empty())
    return {0.0, 0.0};
  const double inv = 1.0 / s;
  cplx sum = 0.0;
  for (auto it = prefix.rbegin(); it != prefix.rend(); ++it)
    sum = sum * inv + *it;
  return std::polar(inv, k.kappa() * s) * sum;
}

bool amplification_exceeded(double s, int n, double tolerance) {
  return std::pow(s, n + 1) * kIntensityRoundoff > 0.1 * tolerance;
}

double residual_b(const IntensityFunction &measure,
                  std::span<const cplx> prefix, const WaveVector &k,
                  const Ray &frame, double s, std::vector<std::string> *warnings,
                  double tolerance) {
  const int n = static_cast<int>(prefix.size());
  if (warnings && amplification_exceeded(s, n, tolerance))
    warnings->push_back("amplification: level " + std::to_string(n + 1) +
                        " at s = " + format_double(s) + " has round-off ~" +
                        format_double(std::pow(s, n + 1) * kIntensityRoundoff) +
                        " > tolerance/10");
  const double a = scaled_residual(measure, k, frame, s);
  if (n == 0)
    return a;

  // s (|e^{i k.dir s} + p|^2 - 1) with p = e^{i kappa s} F / s, expanded as
  // 2 Re(e^{i beta s} F) + |F|^2 / s.
  const double inv = 1.0 / s;
  cplx F = 0.0;
  for (auto it = prefix.rbegin(); it != prefix.rend(); ++it)
    F = F * inv + *it;
  const double beta = raw_detuning(k, frame.dir);
  const double a_n =
      2.0 * std::real(std::polar(1.0, beta * s) * F) + std::norm(F) * inv;
  return std::pow(s, n) * (a - a_n);
}

cplx recover_next(const IntensityFunction &measure,
                  std::span<const cplx> prefix, const WaveVector &k,
                  const Ray &frame, double s, double tau) {
  detuning(k, frame.dir);
  if (!(tau > 0.0))
    throw DomainError("recover_next: tau must be positive");
  if (std::abs(kernel_determinant(tau, k, frame.dir)) <= kKernelTolerance)
    throw DegenerateTauError("recover_next: degenerate tau");
  const double g_x = residual_b(measure, prefix, k, frame, s);
  const double g_y = residual_b(measure, prefix, k, frame, s + tau);
  return extract_leading(g_x, g_y, s, tau, k, frame.dir);
}

Refined richardson_refine(std::span<const RadiusEstimate> estimates) {
  if (estimates.empty())
    throw DomainError("richardson_refine: no estimates");
  std::vector<RadiusEstimate> sorted(estimates.begin(), estimates.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const auto &a, const auto &b) { return a.s < b.s; });
  for (std::size_t i = 1; i < sorted.size(); ++i)
    if (!(sorted[i].s > sorted[i - 1].s))
      throw DomainError("richardson_refine: radii must be distinct");

  Refined out;
  if (sorted.size() == 1) {
    out.value = sorted.front().value;
    out.warnings.push_back(
        "richardson: single radius, estimate returned unrefined");
    return out;
  }

  auto linear = [](const RadiusEstimate &lo, const RadiusEstimate &hi) {
    return (hi.s * hi.value - lo.s * lo.value) / (hi.s - lo.s);
  };
  const auto n = sorted.size();
  if (n == 2) {
    out.value = linear(sorted[0], sorted[1]);
    out.spread = std::abs(out.value - sorted[1].value);
    return out;
  }
  const auto &e1 = sorted[n - 3];
  const auto &e2 = sorted[n - 2];
  const auto &e3 = sorted[n - 1];
  const cplx p12 = linear(e1, e2);
  const cplx p23 = linear(e2, e3);
  const double h1 = 1.0 / e1.s;
  const double h3 = 1.0 / e3.s;
  out.value = (h1 * p23 - h3 * p12) / (h1 - h3);
  out.spread = std::abs(out.value - p23);
  return out;
}

RecoveryReport recover_expansion(const IntensityFunction &measure,
                                 const Ray &ray, const WaveVector &k,
                                 const SamplingPlan &plan) {
  detuning(k, ray.dir);
  const double tau = plan.tau ? *plan.tau : choose_tau(k, ray.dir);
  plan.validate(tau);
  const double abs_D = std::abs(kernel_determinant(tau, k, ray.dir));
  if (abs_D <= kKernelTolerance)
    throw DegenerateTauError("recover_expansion: |D| = " +
                             format_double(abs_D) + " <= " +
                             format_double(kKernelTolerance));

  RecoveryReport report;
  report.expansion.frame_origin = ray.start;
  report.expansion.dir = ray.dir;
  report.expansion.convention = PhaseConvention::Gauged;

  std::vector<double> &radii = report.radius_grid;
  for (double s : plan.s_grid)
    radii.push_back(plan.align_phase ? align_radius(s, k, ray.dir) : s);
  for (std::size_t i = 1; i < radii.size(); ++i)
    if (!(radii[i] > radii[i - 1]))
      throw DomainError("recover_expansion: phase alignment merged radii " +
                        format_double(plan.s_grid[i - 1]) + " and " +
                        format_double(plan.s_grid[i]));

  std::vector<double> sample_radii;
  for (double s : radii) {
    sample_radii.push_back(s);
    sample_radii.push_back(s + tau);
  }
  report.trace = sample_trace(measure, ray, sample_radii);
  const IntensityFunction recorded = report.trace.as_measurement();

  const double s_max = radii.back() + tau;
  auto &coeffs = report.expansion.coeffs;
  for (int n = 0; n < plan.order; ++n) {
    if (amplification_exceeded(s_max, n, plan.tolerance)) {
      report.truncated = true;
      report.warnings.push_back(
          "amplification abort: level " + std::to_string(n + 1) +
          " round-off ~" +
          format_double(std::pow(s_max, n + 1) * kIntensityRoundoff) +
          " at s = " + format_double(s_max) + " exceeds tolerance/10 = " +
          format_double(0.1 * plan.tolerance) + "; report truncated to " +
          std::to_string(n) + " level(s)");
      break;
    }

    LevelDiagnostics level;
    level.level = n + 1;
    level.tau = tau;
    level.abs_D = abs_D;
    for (double s : radii)
      level.raw.push_back({s, recover_next(recorded, coeffs, k, ray, s, tau)});

    if (plan.richardson) {
      Refined refined = richardson_refine(level.raw);
      level.refined = refined.value;
      level.spread = refined.spread;
      for (auto &w : refined.warnings)
        report.warnings.push_back("level " + std::to_string(n + 1) + ": " + w);
    } else {
      level.refined = level.raw.back().value;
      double spread = 0.0;
      for (const auto &e : level.raw)
        spread = std::max(spread, std::abs(e.value - level.refined));
      level.spread = spread;
    }
    coeffs.push_back(level.refined);
    report.per_level.push_back(std::move(level));
  }
  return report;
}

double convergence_bound(const RecoveryReport &report, double source_radius) {
  return 2.0 * (norm(report.expansion.frame_origin) + source_radius);
}

cplx reconstruct_on_ray(const RecoveryReport &report, const WaveVector &k,
                        double s_eval, double source_radius) {
  const double bound = convergence_bound(report, source_radius);
  if (!(s_eval >= bound))
    throw OutOfZoneError("reconstruct_on_ray: s_eval = " +
                         format_double(s_eval) +
                         " is inside the convergence bound " +
                         format_double(bound));
  return eval_aw(report.expansion, k, s_eval);
}

void Plane::validate() const {
  constexpr double tol = 1e-12;
  if (std::abs(dot(u, u) - 1.0) > tol || std::abs(dot(v, v) - 1.0) > tol ||
      std::abs(dot(u, v)) > tol)
    throw DomainError("Plane: tangent pair must be orthonormal");
}

PlaneRecovery recover_on_plane(const IntensityFunction &measure,
                               const Plane &plane, const WaveVector &k,
                               const SamplingPlan &plan,
                               std::span<const Vec3> targets,
                               double source_radius) {
  plane.validate();
  const Vec3 normal = plane.normal();
  const double bound = 2.0 * (norm(plane.point) + source_radius);

  PlaneRecovery out;
  std::vector<std::string> ray_errors;
  for (const Vec3 &x : targets) {
    PlaneTargetResult result;
    result.target = x;
    const Vec3 offset = x - plane.point;
    const double R = norm(offset);
    result.ray_length = R;
    try {
      if (std::abs(dot(offset, normal)) > 1e-9 * (1.0 + R))
        throw DomainError("target is not on the plane");
      if (!(R >= bound))
        throw OutOfZoneError("target at ray length " + format_double(R) +
                             " is inside the convergence bound " +
                             format_double(bound));
      const Direction dir(offset);
      detuning(k, dir);

      int index = -1;
      for (std::size_t i = 0; i < out.rays.size(); ++i)
        if (dot(out.rays[i].dir.vec(), dir.vec()) > 1.0 - 1e-14) {
          index = static_cast<int>(i);
          break;
        }
      if (index < 0) {
        index = static_cast<int>(out.rays.size());
        out.rays.push_back(Ray{plane.point, dir});
        ray_errors.emplace_back();
        try {
          out.reports.push_back(
              recover_expansion(measure, out.rays.back(), k, plan));
        } catch (const Error &e) {
          out.reports.emplace_back();
          ray_errors.back() = e.what();
        }
      }
      result.ray_index = index;
      if (!ray_errors[index].empty())
        throw Error(ray_errors[index]);
      result.value = reconstruct_on_ray(out.reports[index], k, R, source_radius);
    } catch (const Error &e) {
      result.error = e.what();
    }
    out.targets.push_back(std::move(result));
  }
  return out;
}

} // namespace holo
