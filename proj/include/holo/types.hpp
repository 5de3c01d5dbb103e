#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "holo/vec3.hpp"

namespace holo {

using cplx = std::complex<double>;

/// Incident wave vector k of the plane wave exp(i k.x); caches kappa = |k|.
class WaveVector {
public:
  explicit WaveVector(const Vec3 &k);

  const Vec3 &vec() const { return k_; }
  double kappa() const { return kappa_; }

  /// Plane wave exp(i k.x).
  cplx plane_wave(const Vec3 &x) const;

private:
  Vec3 k_;
  double kappa_;
};

/// Unit vector on the sphere. The constructor normalizes; zero is rejected.
class Direction {
public:
  explicit Direction(const Vec3 &v);

  const Vec3 &vec() const { return u_; }
  double polar_cosine() const { return u_.z; }
  double azimuth() const;

  friend bool operator==(const Direction &, const Direction &) = default;

private:
  Vec3 u_;
};

/// Ray x(s) = start + s * dir, s > 0.
struct Ray {
  Vec3 start;
  Direction dir;

  Vec3 at(double s) const { return start + s * dir.vec(); }
};

enum class PhaseConvention {
  Raw,   ///< coefficients of psi1 expanded about frame_origin
  Gauged ///< raw coefficients times exp(-i k.frame_origin)
};

/// Truncated far-field (Atkinson-Wilcox) expansion along one direction:
///   psi1(q + s dir) = exp(i kappa s)/s * sum_j coeffs[j-1] / s^(j-1).
/// An empty coefficient list is the zero field.
struct FarFieldExpansion {
  Vec3 frame_origin;
  Direction dir{Vec3{0.0, 0.0, 1.0}};
  std::vector<cplx> coeffs;
  PhaseConvention convention = PhaseConvention::Raw;
};

/// Evaluates the expansion at frame_origin + s * dir. Gauged coefficients are
/// multiplied back by exp(i k.frame_origin), so the result is always the
/// physical psi1 value.
cplx eval_aw(const FarFieldExpansion &expansion, const WaveVector &k, double s);

/// Opaque measurement channel: a point in R^3 maps to the intensity
/// |psi0 + psi1|^2 there. This is the only thing recovery code ever sees of
/// a field.
class IntensityFunction {
public:
  using Fn = std::function<double(const Vec3 &)>;

  explicit IntensityFunction(Fn fn) : fn_(std::move(fn)) {}

  double operator()(const Vec3 &x) const { return fn_(x); }

private:
  Fn fn_;
};

} // namespace holo
