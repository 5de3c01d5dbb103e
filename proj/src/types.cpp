#include "holo/types.hpp"

#include <cmath>

#include "holo/errors.hpp"

namespace holo {

WaveVector::WaveVector(const Vec3 &k) : k_(k), kappa_(norm(k)) {
  if (!(kappa_ > 0.0) || !std::isfinite(kappa_))
    throw DomainError("wave vector must be finite and nonzero");
}

cplx WaveVector::plane_wave(const Vec3 &x) const {
  return std::polar(1.0, dot(k_, x));
}

Direction::Direction(const Vec3 &v) {
  const double n = norm(v);
  if (!(n > 0.0) || !std::isfinite(n))
    throw DomainError("direction must be a finite nonzero vector");
  u_ = (1.0 / n) * v;
}

double Direction::azimuth() const { return std::atan2(u_.y, u_.x); }

cplx eval_aw(const FarFieldExpansion &expansion, const WaveVector &k,
             double s) {
  if (!(s > 0.0))
    throw DomainError("eval_aw: radius must be positive");
  const auto &f = expansion.coeffs;
  if (f.empty())
    return {0.0, 0.0};
  const double inv = 1.0 / s;
  cplx sum = 0.0;
  for (auto it = f.rbegin(); it != f.rend(); ++it)
    sum = sum * inv + *it;
  cplx value = std::polar(inv, k.kappa() * s) * sum;
  if (expansion.convention == PhaseConvention::Gauged)
    value *= k.plane_wave(expansion.frame_origin);
  return value;
}

} // namespace holo
