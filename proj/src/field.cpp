#include "holo/field.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "holo/errors.hpp"

namespace holo {

namespace {

void check_degree(int l, const char *what) {
  if (l < 0)
    throw DomainError(std::string(what) + ": degree must be nonnegative");
  if (l > kMaxSupportedDegree)
    throw UnsupportedDegreeError(std::string(what) + ": degree " +
                                 std::to_string(l) + " exceeds " +
                                 std::to_string(kMaxSupportedDegree));
}

// (-i)^n
cplx neg_i_pow(int n) {
  switch (((n % 4) + 4) % 4) {
  case 0:
    return {1.0, 0.0};
  case 1:
    return {0.0, -1.0};
  case 2:
    return {-1.0, 0.0};
  default:
    return {0.0, 1.0};
  }
}

cplx i_pow(int n) { return neg_i_pow(-n); }

} // namespace

double hankel_poly_coeff(int l, int k) {
  if (k < 0 || k > l)
    throw DomainError("hankel_poly_coeff: need 0 <= k <= l");
  double a = 1.0;
  for (int j = 0; j < k; ++j)
    a *= double(l + j + 1) * double(l - j) / (2.0 * double(j + 1));
  return a;
}

cplx sph_hankel1(int l, double z) {
  check_degree(l, "sph_hankel1");
  if (!(z > 0.0))
    throw DomainError("sph_hankel1: argument must be positive");
  // Horner in u = i/z over the coefficients a_{l,k}.
  const cplx u{0.0, 1.0 / z};
  cplx poly = 0.0;
  for (int k = l; k >= 0; --k)
    poly = poly * u + hankel_poly_coeff(l, k);
  return neg_i_pow(l + 1) * std::polar(1.0 / z, z) * poly;
}

cplx sph_harmonic(int l, int m, const Direction &dir) {
  check_degree(l, "sph_harmonic");
  if (std::abs(m) > l)
    throw DomainError("sph_harmonic: |m| > l");
  const double theta = std::acos(std::clamp(dir.polar_cosine(), -1.0, 1.0));
  const double phi = dir.azimuth();
  const int am = std::abs(m);
  // std::sph_legendre includes the Condon-Shortley phase (-1)^m.
  const cplx y = std::sph_legendre(l, am, theta) * std::polar(1.0, am * phi);
  if (m >= 0)
    return y;
  return (am % 2 == 0 ? 1.0 : -1.0) * std::conj(y);
}

MultipoleSpectrum::MultipoleSpectrum(int max_degree) : max_degree_(max_degree) {
  check_degree(max_degree, "MultipoleSpectrum");
}

void MultipoleSpectrum::add(int l, int m, cplx amplitude) {
  if (l < 0 || l > max_degree_ || std::abs(m) > l)
    throw DomainError("MultipoleSpectrum: invalid mode (" + std::to_string(l) +
                      ", " + std::to_string(m) + ")");
  entries_[{l, m}] += amplitude;
}

cplx MultipoleSpectrum::at(int l, int m) const {
  auto it = entries_.find({l, m});
  return it == entries_.end() ? cplx{} : it->second;
}

int MultipoleSpectrum::effective_degree() const {
  int deg = -1;
  for (const auto &[key, c] : entries_)
    if (c != cplx{})
      deg = std::max(deg, key.first);
  return deg;
}

RadiatingField::RadiatingField(MultipoleSpectrum spectrum, const Vec3 &center,
                               double r_min)
    : spectrum_(std::move(spectrum)), center_(center), r_min_(r_min) {
  if (!(r_min > 0.0))
    throw DomainError("RadiatingField: r_min must be positive");
}

cplx eval_radiated(const RadiatingField &field, const WaveVector &k,
                   const Vec3 &x) {
  const Vec3 rel = x - field.center();
  const double r = norm(rel);
  if (r < field.r_min())
    throw OutOfRegionError("eval_radiated: point at distance " +
                           std::to_string(r) + " < r_min " +
                           std::to_string(field.r_min()));
  if (field.spectrum().empty())
    return {0.0, 0.0};
  const Direction dir(rel);
  const double z = k.kappa() * r;

  cplx sum = 0.0;
  int cached_l = -1;
  cplx h;
  for (const auto &[key, c] : field.spectrum().entries()) {
    const auto [l, m] = key;
    if (l != cached_l) {
      h = sph_hankel1(l, z);
      cached_l = l;
    }
    sum += c * h * sph_harmonic(l, m, dir);
  }
  return sum;
}

cplx eval_total(const RadiatingField &field, const WaveVector &k,
                const Vec3 &x) {
  return k.plane_wave(x) + eval_radiated(field, k, x);
}

double intensity(const RadiatingField &field, const WaveVector &k,
                 const Vec3 &x) {
  const cplx psi1 = eval_radiated(field, k, x);
  const cplx psi0 = k.plane_wave(x);
  return 1.0 + 2.0 * std::real(std::conj(psi0) * psi1) + std::norm(psi1);
}

FarFieldExpansion aw_coefficients(const RadiatingField &field,
                                  const WaveVector &k, const Direction &dir,
                                  int J) {
  if (J < 1)
    throw DomainError("aw_coefficients: J must be >= 1");
  FarFieldExpansion out;
  out.frame_origin = field.center();
  out.dir = dir;
  out.convention = PhaseConvention::Raw;
  out.coeffs.assign(static_cast<std::size_t>(J), cplx{});

  // psi1 = e^{i kappa r}/r * sum_k r^{-k} sum_lm c_lm Y_lm (-i)^{l+1} i^k
  //        a_{l,k} / kappa^{k+1}
  const double kappa = k.kappa();
  for (const auto &[key, c] : field.spectrum().entries()) {
    const auto [l, m] = key;
    const cplx angular = c * sph_harmonic(l, m, dir) * neg_i_pow(l + 1);
    double kpow = kappa;
    for (int j = 0; j <= l && j < J; ++j) {
      out.coeffs[j] += angular * i_pow(j) * hankel_poly_coeff(l, j) / kpow;
      kpow *= kappa;
    }
  }
  return out;
}

IntensityFunction make_measurement(RadiatingField field, WaveVector k) {
  return IntensityFunction(
      [field = std::move(field), k](const Vec3 &x) { return intensity(field, k, x); });
}

} // namespace holo
