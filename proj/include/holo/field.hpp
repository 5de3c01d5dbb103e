#pragma once

#include <map>
#include <utility>

#include "holo/types.hpp"

namespace holo {

/// Highest degree accepted by sph_hankel1 / sph_harmonic. Accuracy is only
/// characterized up to kDefaultMaxDegree.
inline constexpr int kMaxSupportedDegree = 16;
inline constexpr int kDefaultMaxDegree = 8;

/// Outgoing spherical Hankel function h_l^(1)(z), evaluated through its finite
/// closed form
///   h_l(z) = (-i)^(l+1) e^{iz}/z * sum_{k=0}^{l} a_{l,k} (i/z)^k,
///   a_{l,k} = (l+k)! / (k! (l-k)! 2^k).
cplx sph_hankel1(int l, double z);

/// a_{l,k} above; 0 <= k <= l.
double hankel_poly_coeff(int l, int k);

/// Orthonormal complex spherical harmonic Y_lm with the Condon-Shortley phase.
cplx sph_harmonic(int l, int m, const Direction &dir);

/// Sparse set of multipole amplitudes c_lm with 0 <= l <= max_degree, |m| <= l.
class MultipoleSpectrum {
public:
  using Key = std::pair<int, int>;

  explicit MultipoleSpectrum(int max_degree = kDefaultMaxDegree);

  /// Adds to (or creates) the amplitude of mode (l, m).
  void add(int l, int m, cplx amplitude);

  cplx at(int l, int m) const;
  int max_degree() const { return max_degree_; }
  /// Largest l carrying a nonzero amplitude, -1 for the empty spectrum.
  int effective_degree() const;
  bool empty() const { return entries_.empty(); }
  const std::map<Key, cplx> &entries() const { return entries_; }

private:
  int max_degree_;
  std::map<Key, cplx> entries_;
};

/// Exact radiation solution psi1 = sum c_lm h_l(kappa r) Y_lm, valid outside
/// the ball of radius r_min about center.
class RadiatingField {
public:
  RadiatingField(MultipoleSpectrum spectrum, const Vec3 &center, double r_min);

  const MultipoleSpectrum &spectrum() const { return spectrum_; }
  const Vec3 &center() const { return center_; }
  double r_min() const { return r_min_; }

private:
  MultipoleSpectrum spectrum_;
  Vec3 center_;
  double r_min_;
};

cplx eval_radiated(const RadiatingField &field, const WaveVector &k,
                   const Vec3 &x);

/// exp(i k.x) + psi1(x).
cplx eval_total(const RadiatingField &field, const WaveVector &k,
                const Vec3 &x);

/// |exp(i k.x) + psi1(x)|^2, expanded as 1 + 2 Re(conj(psi0) psi1) + |psi1|^2
/// so the unit modulus of the plane wave is exact.
double intensity(const RadiatingField &field, const WaveVector &k,
                 const Vec3 &x);

/// Closed-form far-field coefficients f_1..f_J about field.center(); raw
/// phase convention. f_j vanishes for j > effective_degree() + 1.
FarFieldExpansion aw_coefficients(const RadiatingField &field,
                                  const WaveVector &k, const Direction &dir,
                                  int J);

/// Wraps a field as an opaque intensity-only measurement.
IntensityFunction make_measurement(RadiatingField field, WaveVector k);

} // namespace holo
