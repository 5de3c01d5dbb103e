#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <cmath>
#include <memory>
#include <numbers>
#include <random>

#include "holo/errors.hpp"
#include "holo/field.hpp"
#include "holo/recovery.hpp"
#include "oracles.hpp"

using namespace holo;
using std::numbers::pi;

namespace {

const WaveVector kz{Vec3{0, 0, 1}};
const Direction x_axis{Vec3{1, 0, 0}};
const Direction tilted{Vec3{std::sqrt(3.0) / 2, 0, 0.5}};
const Ray origin_x{Vec3{}, x_axis};
const Ray origin_tilted{Vec3{}, tilted};

RadiatingField make_field(std::initializer_list<std::tuple<int, int, cplx>> modes,
                          Vec3 center = {}) {
  MultipoleSpectrum spec;
  for (const auto &[l, m, c] : modes)
    spec.add(l, m, c);
  return RadiatingField(spec, center, 1.0);
}

const RadiatingField kZero = make_field({});
const RadiatingField kMonopole = make_field({{0, 0, 1.0}});
const RadiatingField kDipole = make_field({{1, 0, 1.0}});

cplx f1_monopole() { return {0.0, -0.5 / std::sqrt(pi)}; }

std::vector<cplx> oracle_coeffs(const RadiatingField &f, const Direction &d,
                                int J) {
  return aw_coefficients(f, kz, d, J).coeffs;
}

struct CountingMeasure {
  std::shared_ptr<std::atomic<int>> calls = std::make_shared<std::atomic<int>>(0);
  IntensityFunction wrap(IntensityFunction inner) const {
    return IntensityFunction([inner = std::move(inner), c = calls](const Vec3 &x) {
      ++*c;
      return inner(x);
    });
  }
};

} // namespace

TEST_CASE("choose_tau examples") {
  const double tau = choose_tau(kz, x_axis);
  CHECK(tau == doctest::Approx(pi / 2).epsilon(1e-15));
  const cplx D = kernel_determinant(tau, kz, x_axis);
  CHECK(std::abs(D - cplx(0, -2)) < 1e-15);

  CHECK(choose_tau(kz, tilted) == doctest::Approx(pi).epsilon(1e-14));
  CHECK(std::abs(kernel_determinant(pi, kz, tilted) - cplx(0, -2)) < 1e-15);

  CHECK_THROWS_AS(choose_tau(kz, Direction(Vec3{0, 0, 1})),
                  DegenerateDirectionError);
  CHECK_THROWS_AS(choose_tau(WaveVector(Vec3{0, 2, 0}), Direction(Vec3{0, 5, 0})),
                  DegenerateDirectionError);
  // Just outside the tolerance is accepted.
  const double eps = 1e-5;
  CHECK_NOTHROW(choose_tau(kz, Direction(Vec3{eps, 0, 1})));
}

TEST_CASE("align_radius snaps to whole detuning periods") {
  const double period = 2 * pi; // beta = 1
  CHECK(align_radius(1000.0, kz, x_axis) == doctest::Approx(159 * period));
  CHECK(align_radius(0.1, kz, x_axis) == doctest::Approx(period));
  const double s = align_radius(4000.0, kz, tilted);
  CHECK(std::abs(std::remainder(s * 0.5, 2 * pi)) < 1e-9);
  CHECK_THROWS_AS(align_radius(-1.0, kz, x_axis), DomainError);
}

TEST_CASE("scaled_residual examples") {
  const auto zero = make_measurement(kZero, kz);
  for (double s : {1.0, 10.0, 1e3, 1e6})
    CHECK(scaled_residual(zero, kz, origin_x, s) == 0.0);

  const auto mono = make_measurement(kMonopole, kz);
  const double a = scaled_residual(mono, kz, origin_x, pi);
  CHECK(std::abs(a - 0.025331) < 1e-5);
  CHECK(std::abs(a - 1.0 / (4 * pi * pi)) < 1e-15);

  const double f1 = std::abs(f1_monopole());
  for (int i = 0; i <= 40; ++i) {
    const double s = std::pow(10.0, 2.0 + 4.0 * i / 40.0);
    CHECK(std::abs(scaled_residual(mono, kz, origin_x, s)) <= 2 * f1 + 10 / s);
  }
}

TEST_CASE("extract_leading examples") {
  const cplx F{1, 2};
  const double beta = 1.0; // kappa - k.dir for x_axis
  auto g = [&](double s) {
    return 2.0 * std::real(std::polar(1.0, beta * s) * F);
  };
  for (double s : {1.0, 17.0, 1e3, 5e5})
    for (double tau : {0.3, pi / 2, 2.0}) {
      const cplx got = extract_leading(g(s), g(s + tau), s, tau, kz, x_axis);
      // Phase arguments beta s round at the ulp of s.
      CHECK(std::abs(got - F) <= 1e-12 + 1e-15 * s * std::abs(F));
    }
  CHECK(extract_leading(0.0, 0.0, 100.0, pi / 2, kz, x_axis) == cplx{});

  const double g1x = 0.3, g1y = -1.2, g2x = 2.5, g2y = 0.7;
  const double alpha = 1.7, b = -0.4;
  const cplx lhs = extract_leading(alpha * g1x + b * g2x, alpha * g1y + b * g2y,
                                   50.0, 1.0, kz, x_axis);
  const cplx rhs = alpha * extract_leading(g1x, g1y, 50.0, 1.0, kz, x_axis) +
                   b * extract_leading(g2x, g2y, 50.0, 1.0, kz, x_axis);
  CHECK(std::abs(lhs - rhs) < 1e-14);

  CHECK_THROWS_AS(extract_leading(1.0, 1.0, 10.0, 2 * pi, kz, x_axis),
                  DegenerateTauError);
  CHECK_THROWS_AS(extract_leading(1.0, 1.0, 10.0, 1.0, kz, Direction(Vec3{0, 0, 1})),
                  DegenerateTauError);
}

TEST_CASE("property: extract_leading is exact on two-phase inputs") {
  std::mt19937_64 gen(101);
  for (int trial = 0; trial < 200; ++trial) {
    const WaveVector k(std::uniform_real_distribution<double>(0.5, 3.0)(gen) *
                       oracle::random_unit(gen));
    const Direction d(oracle::random_unit(gen));
    if (1.0 - dot(k.vec(), d.vec()) / k.kappa() <= 1e-6)
      continue;
    const double beta = detuning(k, d);
    const cplx F = oracle::random_amplitude(gen);
    // The tau phase is applied separately so the input carries no rounding
    // of beta (s + tau).
    auto g = [&](double s, double t) {
      return 2.0 * std::real(std::polar(1.0, beta * s) * std::polar(1.0, beta * t) * F);
    };
    for (double s : {1.0, 10.0, 1e3})
      for (double tau : {0.1, 1.0, pi / 2}) {
        if (std::abs(kernel_determinant(tau, k, d)) <= 1e-3)
          continue;
        const cplx got = extract_leading(g(s, 0.0), g(s, tau), s, tau, k, d);
        CHECK(std::abs(got - F) <= 1e-12);
      }
  }
}

TEST_CASE("partial_field examples") {
  CHECK(partial_field({}, kz, 3.0) == cplx{});
  const std::vector<cplx> mono{f1_monopole()};
  CHECK(std::abs(partial_field(mono, kz, pi) - cplx(0, 0.0897936)) < 1e-7);

  const std::vector<cplx> two{{0.4, -0.1}, {2.0, 3.0}};
  for (double s : {10.0, 1e2, 1e4}) {
    const cplx lead = two[0] * std::polar(1.0 / s, s);
    CHECK(std::abs(partial_field(two, kz, s) - lead) <= std::abs(two[1]) / (s * s) * (1 + 1e-12));
  }
  CHECK_THROWS_AS(partial_field(mono, kz, 0.0), DomainError);
}

TEST_CASE("residual_b examples") {
  const auto zero = make_measurement(kZero, kz);
  for (double s : {10.0, 1e3})
    CHECK(residual_b(zero, {}, kz, origin_x, s) == 0.0);

  const auto mono = make_measurement(kMonopole, kz);
  for (double s : {pi, 100.0, 1e4})
    CHECK(residual_b(mono, {}, kz, origin_x, s) ==
          scaled_residual(mono, kz, origin_x, s));

  const std::vector<cplx> exact{f1_monopole()};
  CHECK(std::abs(residual_b(mono, exact, kz, origin_x, 1e4)) <= 1e-3);

  std::vector<std::string> warnings;
  residual_b(mono, exact, kz, origin_x, 1e3, &warnings, 1e-2);
  CHECK(warnings.empty());
  residual_b(mono, std::vector<cplx>(4, cplx{}), kz, origin_x, 1e4, &warnings, 1e-2);
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("amplification") != std::string::npos);
}

TEST_CASE("property: residuals are real and match the complex-modulus route") {
  std::mt19937_64 gen(103);
  for (int trial = 0; trial < 20; ++trial) {
    MultipoleSpectrum spec;
    for (int l = 0; l <= 2; ++l)
      for (int m = -l; m <= l; ++m)
        spec.add(l, m, oracle::random_amplitude(gen));
    const RadiatingField f(spec, {}, 1.0);
    const auto measure = make_measurement(f, kz);
    const std::vector<cplx> prefix = oracle_coeffs(f, x_axis, 2);
    const double s = std::uniform_real_distribution<double>(10, 200)(gen);
    // complex route: s (psi conj(psi) - 1) with psi = e^{ik.x} + partial field
    const cplx psi = std::polar(1.0, s * dot(kz.vec(), x_axis.vec())) +
                     partial_field(prefix, kz, s);
    const cplx a_n = s * (psi * std::conj(psi) - 1.0);
    CHECK(std::abs(a_n.imag()) <= 1e-13 * std::max(1.0, std::abs(a_n)));
    const double b = residual_b(measure, prefix, kz, origin_x, s);
    const double expected = s * s * (scaled_residual(measure, kz, origin_x, s) - a_n.real());
    CHECK(std::abs(b - expected) <= 1e-9 * std::max(1.0, std::abs(expected)));
  }
}

TEST_CASE("recover_next examples") {
  const auto mono = make_measurement(kMonopole, kz);
  const cplx f1 = recover_next(mono, {}, kz, origin_x, 1e3, pi / 2);
  CHECK(std::abs(f1 - cplx(0, -0.2820948)) <= 1e-3);

  const auto dip = make_measurement(kDipole, kz);
  const std::vector<cplx> exact_f1{oracle_coeffs(kDipole, tilted, 1)[0]};
  const cplx f2 = recover_next(dip, exact_f1, kz, origin_tilted, 1e3, pi);
  CHECK(std::abs(f2 - cplx(0, -0.2443013)) <= 5e-3);

  const auto zero = make_measurement(kZero, kz);
  for (int n = 0; n < 4; ++n)
    CHECK(std::abs(recover_next(zero, std::vector<cplx>(n, cplx{}), kz,
                                origin_x, 50.0, pi / 2)) <= 1e-12);

  CHECK_THROWS_AS(recover_next(mono, {}, kz, Ray{Vec3{}, Direction(Vec3{0, 0, 1})},
                               1e3, 1.0),
                  DegenerateDirectionError);
  CHECK_THROWS_AS(recover_next(mono, {}, kz, origin_x, 1e3, pi),
                  DegenerateTauError);
}

TEST_CASE("property: level-1 error converges at first order (monopole)") {
  const auto mono = make_measurement(kMonopole, kz);
  std::vector<double> radii{1e2, 1e3, 1e4}, errors;
  for (double s : radii)
    errors.push_back(std::abs(recover_next(mono, {}, kz, origin_x, s, pi / 2) -
                              f1_monopole()));
  const double slope = oracle::loglog_slope(radii, errors);
  MESSAGE("monopole f1 slope: " << slope);
  CHECK(slope >= -1.3);
  CHECK(slope <= -0.7);
}

TEST_CASE("property: induction step with exact prefix is first order") {
  // Monopole + dipole: Re(conj(f1) f2) != 0, so the O(1/s) term of the f2
  // step does not cancel.
  const RadiatingField field = make_field({{0, 0, 1.0}, {1, 0, 1.0}});
  const auto measure = make_measurement(field, kz);
  const auto f = oracle_coeffs(field, tilted, 2);
  std::vector<double> radii{1e2, 1e3, 1e4}, errors;
  for (double s : radii)
    errors.push_back(std::abs(
        recover_next(measure, std::span(f.data(), 1), kz, origin_tilted, s, pi) -
        f[1]));
  const double slope = oracle::loglog_slope(radii, errors);
  MESSAGE("monopole+dipole f2 slope: " << slope);
  CHECK(slope >= -1.3);
  CHECK(slope <= -0.7);
}

TEST_CASE("property: pure-dipole f2 step converges at least at first order") {
  // For a single l = 1 mode f2 = i f1 (up to kappa), so Re(conj(f1) f2) = 0
  // and f3 = 0: the 1/s term of the step vanishes and the error drops faster.
  const auto dip = make_measurement(kDipole, kz);
  const auto f = oracle_coeffs(kDipole, tilted, 2);
  std::vector<double> radii{1e2, 1e3}, errors;
  for (double s : radii)
    errors.push_back(std::abs(
        recover_next(dip, std::span(f.data(), 1), kz, origin_tilted, s, pi) - f[1]));
  const double slope = oracle::loglog_slope(radii, errors);
  MESSAGE("pure dipole f2 slope (1e2..1e3): " << slope);
  CHECK(slope <= -1.7);
}

TEST_CASE("richardson_refine examples") {
  const cplx F{0.3, -0.8}, c{2.0, 5.0};
  std::vector<RadiusEstimate> est{{100.0, F + c / 100.0}, {700.0, F + c / 700.0}};
  CHECK(std::abs(richardson_refine(est).value - F) < 1e-15);

  std::vector<RadiusEstimate> konst{{1.0, F}, {2.0, F}, {3.0, F}};
  const Refined r = richardson_refine(konst);
  CHECK(std::abs(r.value - F) < 1e-15);
  CHECK(r.spread < 1e-15);

  const cplx c2{-1.0, 0.5};
  std::vector<RadiusEstimate> quad{{50.0, F + c / 50.0 + c2 / 2500.0},
                                   {100.0, F + c / 100.0 + c2 / 1e4},
                                   {400.0, F + c / 400.0 + c2 / 1.6e5}};
  CHECK(std::abs(richardson_refine(quad).value - F) < 1e-14);

  std::vector<RadiusEstimate> single{{10.0, F}};
  const Refined one = richardson_refine(single);
  CHECK(one.value == F);
  CHECK(one.warnings.size() == 1);

  std::vector<RadiusEstimate> dup{{10.0, F}, {10.0, F}};
  CHECK_THROWS_AS(richardson_refine(dup), DomainError);
}

TEST_CASE("richardson_refine on phase-aligned monopole estimates") {
  const auto mono = make_measurement(kMonopole, kz);
  const double s1 = align_radius(1e2, kz, x_axis);
  const double s2 = align_radius(1e3, kz, x_axis);
  std::vector<RadiusEstimate> est;
  for (double s : {s1, s2})
    est.push_back({s, recover_next(mono, {}, kz, origin_x, s, pi / 2)});
  const double raw_err = std::abs(est[1].value - f1_monopole());
  const double ref_err = std::abs(richardson_refine(est).value - f1_monopole());
  MESSAGE("raw " << raw_err << " refined " << ref_err);
  CHECK(ref_err <= raw_err / 10);

  // Unaligned radii leave the oscillating part of the 1/s remainder behind.
  std::vector<RadiusEstimate> plain;
  for (double s : {1e2, 1e3})
    plain.push_back({s, recover_next(mono, {}, kz, origin_x, s, pi / 2)});
  CHECK(std::abs(richardson_refine(plain).value - f1_monopole()) > 10 * ref_err);
}

TEST_CASE("SamplingPlan validation") {
  SamplingPlan plan;
  CHECK_NOTHROW(plan.validate(pi / 2));
  plan.s_grid = {10.0, 20.0};
  CHECK_THROWS_AS(plan.validate(pi / 2), DomainError); // 10 < 10 tau
  plan.s_grid = {100.0, 50.0};
  CHECK_THROWS_AS(plan.validate(1.0), DomainError);
  plan.s_grid = {100.0};
  plan.order = 0;
  CHECK_THROWS_AS(plan.validate(1.0), DomainError);
  plan.order = 1;
  CHECK_THROWS_AS(plan.validate(0.0), DomainError);
}

TEST_CASE("IntensityTrace") {
  const auto mono = make_measurement(kMonopole, kz);
  const std::vector<double> radii{30.0, 10.0, 20.0, 10.0};
  const IntensityTrace trace = sample_trace(mono, origin_x, radii);
  REQUIRE(trace.samples.size() == 3);
  CHECK(trace.samples[0].first == 10.0);
  const auto replay = trace.as_measurement();
  CHECK(replay(origin_x.at(20.0)) == mono(origin_x.at(20.0)));
  CHECK_THROWS_AS(replay(origin_x.at(25.0)), DomainError);

  IntensityTrace bad = trace;
  bad.samples.push_back({10.0, 1.0});
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad.samples.back() = {40.0, -1.0};
  CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("recover_expansion examples") {
  SamplingPlan plan;
  plan.order = 4;
  plan.s_grid = {20.0, 40.0, 80.0};
  const RecoveryReport zero =
      recover_expansion(make_measurement(kZero, kz), origin_x, kz, plan);
  REQUIRE(zero.expansion.coeffs.size() == 4);
  for (const cplx c : zero.expansion.coeffs)
    CHECK(std::abs(c) <= 1e-12);
  CHECK(zero.expansion.convention == PhaseConvention::Gauged);

  SamplingPlan mono_plan;
  mono_plan.order = 2;
  const RecoveryReport mono =
      recover_expansion(make_measurement(kMonopole, kz), origin_x, kz, mono_plan);
  REQUIRE(mono.per_level.size() == 2);
  CHECK(std::abs(mono.expansion.coeffs[0] - f1_monopole()) <= 1e-5);
  CHECK(std::abs(mono.expansion.coeffs[1]) <= 1e-2);
  for (const auto &lv : mono.per_level) {
    CHECK(lv.abs_D > 1e-6);
    CHECK(lv.raw.size() == 3);
  }
  CHECK(mono.radius_grid.size() == 3);
  CHECK(!mono.truncated);

  // Shifted frame: coefficients have no closed form; compare reconstructions.
  const Ray shifted{Vec3{5, 0, 0}, tilted};
  SamplingPlan dip_plan;
  dip_plan.order = 3;
  const RecoveryReport dip =
      recover_expansion(make_measurement(kDipole, kz), shifted, kz, dip_plan);
  for (double s : {100.0, 300.0, 1e3, 5e3}) {
    const cplx truth = eval_radiated(kDipole, kz, shifted.at(s));
    CHECK(std::abs(reconstruct_on_ray(dip, kz, s, 1.0) - truth) <=
          1e-2 * std::abs(truth));
  }
}

TEST_CASE("recover_expansion aborts levels beyond the amplification guard") {
  SamplingPlan plan;
  plan.order = 4; // level 4 at s ~ 4e3: s^4 * 2.3e-16 ~ 0.06 > 1e-3
  const RecoveryReport rep =
      recover_expansion(make_measurement(kMonopole, kz), origin_x, kz, plan);
  CHECK(rep.truncated);
  CHECK(rep.per_level.size() == 3);
  CHECK(rep.expansion.coeffs.size() == 3);
  REQUIRE(!rep.warnings.empty());
  CHECK(rep.warnings.back().find("amplification abort") != std::string::npos);
}

TEST_CASE("recover_expansion queries the measurement only on the ray samples") {
  CountingMeasure counter;
  const auto measure = counter.wrap(make_measurement(kMonopole, kz));
  SamplingPlan plan;
  plan.order = 3;
  const RecoveryReport rep = recover_expansion(measure, origin_x, kz, plan);
  CHECK(*counter.calls == 2 * static_cast<int>(plan.s_grid.size()));
  CHECK(rep.trace.samples.size() == 2 * plan.s_grid.size());
}

TEST_CASE("degenerate direction and tau never return coefficients") {
  const auto mono = make_measurement(kMonopole, kz);
  SamplingPlan plan;
  const Ray along_k{Vec3{}, Direction(Vec3{0, 0, 1})};
  CHECK_THROWS_AS(recover_expansion(mono, along_k, kz, plan),
                  DegenerateDirectionError);
  plan.tau = 2 * pi; // sin(-2 pi) ~ 2.4e-16
  CHECK_THROWS_AS(recover_expansion(mono, origin_x, kz, plan), DegenerateTauError);
}

TEST_CASE("reconstruct_on_ray examples") {
  RecoveryReport exact;
  exact.expansion = aw_coefficients(kMonopole, kz, x_axis, 1);
  exact.expansion.convention = PhaseConvention::Gauged; // q = 0: gauge is 1
  const cplx truth = eval_radiated(kMonopole, kz, {50, 0, 0});
  CHECK(std::abs(reconstruct_on_ray(exact, kz, 50.0, 1.0) - truth) <=
        1e-12 * std::abs(truth));

  RecoveryReport empty;
  CHECK(reconstruct_on_ray(empty, kz, 10.0, 1.0) == cplx{});

  SamplingPlan plan;
  const RecoveryReport rec =
      recover_expansion(make_measurement(kMonopole, kz), origin_x, kz, plan);
  const cplx t100 = eval_radiated(kMonopole, kz, {100, 0, 0});
  CHECK(std::abs(reconstruct_on_ray(rec, kz, 100.0, 1.0) - t100) <=
        1e-2 * std::abs(t100));

  CHECK_THROWS_AS(reconstruct_on_ray(rec, kz, 1.5, 1.0), OutOfZoneError);
}

TEST_CASE("property: gauge covariance of shifted frames") {
  const auto measure = make_measurement(kDipole, kz);
  SamplingPlan plan;
  plan.order = 3;
  const RecoveryReport a = recover_expansion(measure, origin_tilted, kz, plan);
  const RecoveryReport b =
      recover_expansion(measure, Ray{Vec3{} + Vec3{}, tilted}, kz, plan);
  REQUIRE(a.expansion.coeffs.size() == b.expansion.coeffs.size());
  for (std::size_t i = 0; i < a.expansion.coeffs.size(); ++i)
    CHECK(a.expansion.coeffs[i] == b.expansion.coeffs[i]);

  // A frame shifted along the same line: the two pipelines describe the same
  // physical points q + s dir = s' dir.
  const Vec3 q = 7.0 * tilted.vec();
  const RecoveryReport c = recover_expansion(measure, Ray{q, tilted}, kz, plan);
  for (double s : {200.0, 800.0, 3e3}) {
    const cplx via_origin = reconstruct_on_ray(a, kz, s + 7.0, 1.0);
    const cplx via_shift = reconstruct_on_ray(c, kz, s, 1.0);
    CHECK(std::abs(via_origin - via_shift) <= 1e-2 * std::abs(via_origin));
  }
}

TEST_CASE("recover_on_plane examples") {
  const Plane plane{Vec3{0, 0, 5}, Vec3{1, 0, 0}, Vec3{0, 1, 0}};
  SamplingPlan plan;
  plan.order = 3;
  std::vector<Vec3> targets;
  for (double x : {100.0, 150.0, 200.0})
    for (double y : {-60.0, 0.0, 60.0})
      targets.push_back({x, y, 5.0});

  const PlaneRecovery zero = recover_on_plane(make_measurement(kZero, kz), plane,
                                              kz, plan, targets, 1.0);
  for (const auto &t : zero.targets) {
    REQUIRE(t.value);
    CHECK(std::abs(*t.value) <= 1e-12);
  }

  const PlaneRecovery mono = recover_on_plane(make_measurement(kMonopole, kz),
                                              plane, kz, plan, targets, 1.0);
  for (const auto &t : mono.targets) {
    REQUIRE(t.value);
    const cplx truth = eval_radiated(kMonopole, kz, t.target);
    CHECK(std::abs(*t.value - truth) <= 5e-2 * std::abs(truth));
  }

  // Collinear targets share a single recovery.
  const std::vector<Vec3> line{{120, 0, 5}, {240, 0, 5}, {0, 150, 5}};
  const PlaneRecovery shared = recover_on_plane(make_measurement(kMonopole, kz),
                                                plane, kz, plan, line, 1.0);
  CHECK(shared.rays.size() == 2);
  CHECK(shared.targets[0].ray_index == shared.targets[1].ray_index);
  CHECK(shared.targets[2].ray_index != shared.targets[0].ray_index);
}

TEST_CASE("recover_on_plane reports per-target failures") {
  // k lies in the plane: the target straight along k is degenerate.
  const WaveVector k(Vec3{1, 0, 0});
  const Plane plane{Vec3{0, 0, 5}, Vec3{1, 0, 0}, Vec3{0, 1, 0}};
  const std::vector<Vec3> targets{{150, 0, 5}, {0, 150, 5}, {3, 0, 5}, {100, 0, 9}};
  SamplingPlan plan;
  const PlaneRecovery rec =
      recover_on_plane(make_measurement(kMonopole, k), plane, k, plan, targets, 1.0);
  CHECK(!rec.targets[0].value);
  CHECK(rec.targets[0].error.find("propagation direction") != std::string::npos);
  REQUIRE(rec.targets[1].value);
  const cplx truth = eval_radiated(kMonopole, k, targets[1]);
  CHECK(std::abs(*rec.targets[1].value - truth) <= 5e-2 * std::abs(truth));
  CHECK(!rec.targets[2].value); // inside the convergence bound
  CHECK(!rec.targets[3].value); // off the plane
}
