#include "holo/runner.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <random>

#include <fmt/format.h>

#include "holo/errors.hpp"

namespace holo {

namespace {

std::string num(double v) { return fmt::format("{:.17g}", v); }

std::string csv_field(const std::string &text) {
  if (text.find_first_of(",\"\n") == std::string::npos)
    return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"')
      out += '"';
    out += c;
  }
  return out + "\"";
}

std::string join(const std::vector<std::string> &items, const char *sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i)
      out += sep;
    out += items[i];
  }
  return out;
}

const RayGeometry &require_ray(const ExperimentConfig &cfg, const char *what) {
  if (!cfg.geometry.ray)
    throw ConfigError(std::string("geometry.ray: required by ") + what);
  return *cfg.geometry.ray;
}

bool oracle_frame(const ExperimentConfig &cfg) {
  return cfg.geometry.ray && cfg.geometry.ray->start == cfg.scene.center;
}

// Gauged closed-form coefficients about the ray start (= source center).
std::vector<cplx> oracle_coefficients(const ExperimentConfig &cfg,
                                      const Ray &ray, int J) {
  const WaveVector k = cfg.wave();
  auto coeffs = aw_coefficients(cfg.field(), k, ray.dir, J).coeffs;
  const cplx gauge = std::conj(k.plane_wave(ray.start));
  for (auto &c : coeffs)
    c *= gauge;
  return coeffs;
}

void apply_checks(const CheckConfig &checks, RunSummary &summary) {
  for (const auto &lv : summary.levels) {
    if (checks.max_abs_error && lv.max_abs_error &&
        *lv.max_abs_error > *checks.max_abs_error)
      summary.failed_checks.push_back(
          fmt::format("level {}: max abs error {} > {}", lv.level,
                      num(*lv.max_abs_error), num(*checks.max_abs_error)));
    const bool wanted =
        checks.slope_levels.empty() ||
        std::find(checks.slope_levels.begin(), checks.slope_levels.end(),
                  lv.level) != checks.slope_levels.end();
    if (!wanted || (!checks.slope_min && !checks.slope_max))
      continue;
    if (!lv.slope) {
      summary.notes.push_back(
          fmt::format("level {}: slope n/a, slope check skipped", lv.level));
      continue;
    }
    if ((checks.slope_min && *lv.slope < *checks.slope_min) ||
        (checks.slope_max && *lv.slope > *checks.slope_max))
      summary.failed_checks.push_back(fmt::format(
          "level {}: slope {} outside [{}, {}]", lv.level, num(*lv.slope),
          checks.slope_min ? num(*checks.slope_min) : "-inf",
          checks.slope_max ? num(*checks.slope_max) : "inf"));
  }
}

} // namespace

IntensityFunction with_noise(IntensityFunction measure, double amplitude,
                             std::uint64_t seed) {
  if (!(amplitude >= 0.0 && amplitude < 1.0))
    throw DomainError("with_noise: amplitude must lie in [0, 1)");
  return IntensityFunction([measure = std::move(measure), amplitude,
                            seed](const Vec3 &x) {
    const double clean = measure(x);
    std::seed_seq seq{seed & 0xffffffffu,
                      seed >> 32,
                      std::bit_cast<std::uint64_t>(x.x) & 0xffffffffu,
                      std::bit_cast<std::uint64_t>(x.x) >> 32,
                      std::bit_cast<std::uint64_t>(x.y) & 0xffffffffu,
                      std::bit_cast<std::uint64_t>(x.y) >> 32,
                      std::bit_cast<std::uint64_t>(x.z) & 0xffffffffu,
                      std::bit_cast<std::uint64_t>(x.z) >> 32};
    std::mt19937_64 gen(seq);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    return clean * (1.0 + amplitude * u(gen));
  });
}

IntensityFunction make_config_measurement(const ExperimentConfig &cfg) {
  IntensityFunction clean = make_measurement(cfg.field(), cfg.wave());
  if (!cfg.noise || cfg.noise->amplitude == 0.0)
    return clean;
  return with_noise(std::move(clean), cfg.noise->amplitude, cfg.noise->seed);
}

std::optional<double> loglog_slope(const std::vector<double> &radii,
                                   const std::vector<double> &errors,
                                   double floor) {
  if (radii.size() != errors.size() || radii.size() < 2)
    return std::nullopt;
  double largest = 0.0;
  for (double e : errors) {
    if (!(e > 0.0) || !std::isfinite(e))
      return std::nullopt;
    largest = std::max(largest, e);
  }
  if (largest <= floor)
    return std::nullopt;
  const double n = double(radii.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    mx += std::log(radii[i]);
    my += std::log(errors[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    const double dx = std::log(radii[i]) - mx;
    sxy += dx * (std::log(errors[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

RunResult run_recover(const ExperimentConfig &cfg) {
  const RayGeometry &geo = require_ray(cfg, "recover");
  const WaveVector k = cfg.wave();
  const Ray ray{geo.start, Direction(geo.direction)};
  const RecoveryReport report =
      recover_expansion(make_config_measurement(cfg), ray, k,
                        cfg.sampling_plan());

  RunResult out;
  RunSummary &summary = out.summary;
  summary.experiment = cfg.id;
  summary.mode = "recover";
  summary.oracle_available = oracle_frame(cfg);
  summary.slope_basis = summary.oracle_available
                            ? "raw estimate error vs oracle (recovered prefix)"
                            : "n/a (no closed-form oracle in a shifted frame)";

  std::vector<cplx> oracle;
  if (summary.oracle_available && !report.per_level.empty())
    oracle = oracle_coefficients(cfg, ray,
                                 static_cast<int>(report.per_level.size()));

  for (const auto &level : report.per_level) {
    std::vector<std::string> level_warnings;
    const std::string prefix = fmt::format("level {}: ", level.level);
    for (const auto &w : report.warnings)
      if (w.rfind(prefix, 0) == 0)
        level_warnings.push_back(w.substr(prefix.size()));

    LevelSummary ls;
    ls.level = level.level;
    std::vector<double> radii, errors;
    for (const auto &est : level.raw) {
      ResultRow row;
      row.experiment = cfg.id;
      row.level = level.level;
      row.s = est.s;
      row.raw = est.value;
      row.refined = level.refined;
      row.abs_D = level.abs_D;
      row.warnings = join(level_warnings, "; ");
      if (!oracle.empty()) {
        const cplx f = oracle[static_cast<std::size_t>(level.level - 1)];
        row.oracle = f;
        row.abs_error = std::abs(level.refined - f);
        ls.max_abs_error = *row.abs_error;
        radii.push_back(est.s);
        errors.push_back(std::abs(est.value - f));
      }
      out.rows.push_back(std::move(row));
    }
    ls.slope = loglog_slope(radii, errors);
    summary.levels.push_back(ls);
  }

  summary.notes.push_back("radius grid used: " + [&] {
    std::vector<std::string> parts;
    for (double s : report.radius_grid)
      parts.push_back(num(s));
    return join(parts, " ");
  }());
  for (const auto &w : report.warnings)
    summary.notes.push_back(w);
  if (report.truncated)
    summary.failed_checks.push_back(
        fmt::format("recovery truncated at {} of {} levels",
                    report.per_level.size(), cfg.plan.order));
  apply_checks(cfg.checks, summary);
  return out;
}

RunResult run_convergence(const ExperimentConfig &cfg) {
  const RayGeometry &geo = require_ray(cfg, "convergence");
  if (cfg.plan.s_grid.size() < 3)
    throw ConfigError("plan.s_grid: convergence study needs >= 3 radii");
  const WaveVector k = cfg.wave();
  const Ray ray{geo.start, Direction(geo.direction)};
  const SamplingPlan plan = cfg.sampling_plan();
  const double tau = plan.tau ? *plan.tau : choose_tau(k, ray.dir);
  plan.validate(tau);
  const double abs_D = std::abs(kernel_determinant(tau, k, ray.dir));
  if (abs_D <= kKernelTolerance)
    throw DegenerateTauError("convergence: degenerate tau");

  std::vector<double> radii;
  for (double s : plan.s_grid)
    radii.push_back(plan.align_phase ? align_radius(s, k, ray.dir) : s);

  const IntensityFunction measure = make_config_measurement(cfg);
  RunResult out;
  RunSummary &summary = out.summary;
  summary.experiment = cfg.id;
  summary.mode = "convergence";
  summary.oracle_available = oracle_frame(cfg);
  {
    std::vector<std::string> parts;
    for (double s : radii)
      parts.push_back(num(s));
    summary.notes.push_back("radius grid used: " + join(parts, " "));
  }

  if (summary.oracle_available) {
    summary.slope_basis = "raw estimate error vs oracle, oracle prefix";
    const auto oracle = oracle_coefficients(cfg, ray, plan.order);
    for (int n = 0; n < plan.order; ++n) {
      if (amplification_exceeded(radii.back() + tau, n, plan.tolerance)) {
        summary.failed_checks.push_back(fmt::format(
            "level {}: amplification guard tripped at s = {}", n + 1,
            num(radii.back() + tau)));
        break;
      }
      const std::span<const cplx> prefix(oracle.data(),
                                         static_cast<std::size_t>(n));
      std::vector<RadiusEstimate> raw;
      for (double s : radii)
        raw.push_back({s, recover_next(measure, prefix, k, ray, s, tau)});
      const cplx refined = plan.richardson ? richardson_refine(raw).value
                                           : raw.back().value;
      const cplx f = oracle[static_cast<std::size_t>(n)];

      LevelSummary ls;
      ls.level = n + 1;
      ls.max_abs_error = std::abs(refined - f);
      std::vector<double> errors;
      for (const auto &est : raw) {
        ResultRow row;
        row.experiment = cfg.id;
        row.level = n + 1;
        row.s = est.s;
        row.raw = est.value;
        row.refined = refined;
        row.oracle = f;
        row.abs_error = std::abs(refined - f);
        row.abs_D = abs_D;
        out.rows.push_back(std::move(row));
        errors.push_back(std::abs(est.value - f));
      }
      ls.slope = loglog_slope(radii, errors);
      summary.levels.push_back(ls);
    }
  } else {
    summary.slope_basis =
        "relative reconstruction error at a far ray point, level-1 recovery "
        "per radius";
    summary.notes.push_back(
        "oracle unavailable: ray does not start at the source center");
    const RadiatingField field = cfg.field();
    const double s_far = 10.0 * radii.back();
    const cplx truth = eval_radiated(field, k, ray.at(s_far));
    LevelSummary ls;
    ls.level = 1;
    std::vector<double> errors;
    for (double s : radii) {
      SamplingPlan single = plan;
      single.s_grid = {s};
      single.order = 1;
      single.richardson = false;
      single.align_phase = false;
      single.tau = tau;
      const RecoveryReport rep = recover_expansion(measure, ray, k, single);
      const cplx rec = reconstruct_on_ray(rep, k, s_far, cfg.scene.r_min);
      const double scale = std::abs(truth);
      errors.push_back(scale > 0.0 ? std::abs(rec - truth) / scale
                                   : std::abs(rec));
      ResultRow row;
      row.experiment = cfg.id;
      row.level = 1;
      row.s = s;
      row.raw = rep.per_level.front().raw.front().value;
      row.refined = rep.per_level.front().refined;
      row.abs_D = abs_D;
      out.rows.push_back(std::move(row));
    }
    ls.slope = loglog_slope(radii, errors);
    summary.levels.push_back(ls);
    summary.notes.push_back("far evaluation radius: " + num(s_far));
  }
  apply_checks(cfg.checks, summary);
  return out;
}

PlaneDemoResult run_plane_demo(const ExperimentConfig &cfg) {
  if (!cfg.geometry.plane)
    throw ConfigError("geometry.plane: required by plane");
  const PlaneGeometry &geo = *cfg.geometry.plane;
  const WaveVector k = cfg.wave();
  const RadiatingField field = cfg.field();
  const Plane plane{geo.point, geo.u, geo.v};
  const PlaneRecovery rec =
      recover_on_plane(make_config_measurement(cfg), plane, k,
                       cfg.sampling_plan(), geo.targets, cfg.scene.r_min);

  PlaneDemoResult out;
  out.recoveries = rec.rays.size();
  RunSummary &summary = out.summary;
  summary.experiment = cfg.id;
  summary.mode = "plane";
  summary.slope_basis = "n/a";
  double worst = 0.0;
  for (const auto &t : rec.targets) {
    PlaneRow row;
    row.point = t.target;
    row.truth = eval_radiated(field, k, t.target);
    row.ray_index = t.ray_index;
    row.recovered = t.value;
    row.error = t.error;
    if (t.value) {
      const double scale = std::abs(row.truth);
      row.rel_error = scale > 0.0 ? std::abs(*t.value - row.truth) / scale
                                  : std::abs(*t.value);
      worst = std::max(worst, *row.rel_error);
      if (*row.rel_error > geo.tolerance)
        summary.failed_checks.push_back(
            fmt::format("target ({}, {}, {}): relative error {} > {}",
                        num(t.target.x), num(t.target.y), num(t.target.z),
                        num(*row.rel_error), num(geo.tolerance)));
    } else {
      summary.failed_checks.push_back(
          fmt::format("target ({}, {}, {}): {}", num(t.target.x),
                      num(t.target.y), num(t.target.z), t.error));
    }
    out.rows.push_back(std::move(row));
  }
  summary.notes.push_back(fmt::format("targets: {}, recoveries run: {}",
                                      rec.targets.size(), rec.rays.size()));
  summary.notes.push_back("worst relative error: " + num(worst));
  return out;
}

std::vector<SynthRow> run_synth(const ExperimentConfig &cfg) {
  const RayGeometry &geo = require_ray(cfg, "synth");
  const WaveVector k = cfg.wave();
  const RadiatingField field = cfg.field();
  const Ray ray{geo.start, Direction(geo.direction)};
  std::vector<SynthRow> rows;
  for (double s : cfg.plan.s_grid) {
    const Vec3 x = ray.at(s);
    rows.push_back({s, x, eval_radiated(field, k, x), intensity(field, k, x)});
  }
  return rows;
}

std::string format_results_csv(const std::vector<ResultRow> &rows) {
  std::string out = kResultHeader;
  out += '\n';
  for (const auto &r : rows) {
    out += fmt::format(
        "{},{},{},{},{},{},{},{},{},{},{},{}\n", csv_field(r.experiment),
        r.level, num(r.s), num(r.raw.real()), num(r.raw.imag()),
        num(r.refined.real()), num(r.refined.imag()),
        r.oracle ? num(r.oracle->real()) : "",
        r.oracle ? num(r.oracle->imag()) : "",
        r.abs_error ? num(*r.abs_error) : "", num(r.abs_D),
        csv_field(r.warnings));
  }
  return out;
}

std::string format_plane_csv(const std::string &experiment,
                             const std::vector<PlaneRow> &rows) {
  std::string out = kPlaneHeader;
  out += '\n';
  for (const auto &r : rows) {
    out += fmt::format(
        "{},{},{},{},{},{},{},{},{},{},{}\n", csv_field(experiment),
        num(r.point.x), num(r.point.y), num(r.point.z),
        r.recovered ? num(r.recovered->real()) : "",
        r.recovered ? num(r.recovered->imag()) : "", num(r.truth.real()),
        num(r.truth.imag()), r.rel_error ? num(*r.rel_error) : "",
        r.ray_index, csv_field(r.error));
  }
  return out;
}

std::string format_synth_csv(const std::string &experiment,
                             const std::vector<SynthRow> &rows) {
  std::string out = kSynthHeader;
  out += '\n';
  for (const auto &r : rows)
    out += fmt::format("{},{},{},{},{},{},{},{}\n", csv_field(experiment),
                       num(r.s), num(r.point.x), num(r.point.y),
                       num(r.point.z), num(r.psi1.real()), num(r.psi1.imag()),
                       num(r.intensity));
  return out;
}

std::string format_summary(const RunSummary &s) {
  std::string out;
  out += "experiment: " + s.experiment + "\n";
  out += "mode: " + s.mode + "\n";
  out += std::string("oracle: ") +
         (s.oracle_available ? "available" : "unavailable") + "\n";
  out += "slope_basis: " + s.slope_basis + "\n";
  for (const auto &lv : s.levels)
    out += fmt::format("level {}: slope={} max_abs_error={}\n", lv.level,
                       lv.slope ? num(*lv.slope) : "n/a",
                       lv.max_abs_error ? num(*lv.max_abs_error) : "n/a");
  out += s.notes.empty() ? "notes: none\n" : "notes:\n";
  for (const auto &n : s.notes)
    out += "  - " + n + "\n";
  out += std::string("checks: ") + (s.passed() ? "passed" : "failed") + "\n";
  for (const auto &f : s.failed_checks)
    out += "  - " + f + "\n";
  return out;
}

std::filesystem::path write_text(const std::filesystem::path &path,
                                 const std::string &text) {
  std::error_code ec;
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path(), ec);
  if (ec)
    throw Error(path.parent_path().string() +
                ": cannot create directory: " + ec.message());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw Error(path.string() + ": cannot open for writing");
  out << text;
  out.flush();
  if (!out)
    throw Error(path.string() + ": write failed");
  return path;
}

std::vector<std::filesystem::path>
write_report(const std::vector<ResultRow> &rows, const RunSummary &summary,
             const std::filesystem::path &dir) {
  return {write_text(dir / (summary.experiment + "_results.csv"),
                     format_results_csv(rows)),
          write_text(dir / (summary.experiment + "_summary.txt"),
                     format_summary(summary))};
}

std::vector<std::filesystem::path>
write_plane_report(const PlaneDemoResult &result,
                   const std::filesystem::path &dir) {
  const std::string &id = result.summary.experiment;
  return {write_text(dir / (id + "_plane.csv"),
                     format_plane_csv(id, result.rows)),
          write_text(dir / (id + "_summary.txt"),
                     format_summary(result.summary))};
}

} // namespace holo
