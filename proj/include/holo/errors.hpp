#pragma once

#include <stdexcept>
#include <string>

namespace holo {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the mathematical domain of the operation.
class DomainError : public Error {
public:
  using Error::Error;
};

/// Spherical Hankel / harmonic degree above the supported bound.
class UnsupportedDegreeError : public Error {
public:
  using Error::Error;
};

/// Field evaluation requested inside the exclusion ball of a source.
class OutOfRegionError : public Error {
public:
  using Error::Error;
};

/// Ray direction coincides with the propagation direction k/|k|.
class DegenerateDirectionError : public Error {
public:
  using Error::Error;
};

/// The two-point kernel determinant 2i sin(tau (k.dir - kappa)) vanishes.
class DegenerateTauError : public Error {
public:
  using Error::Error;
};

/// Reconstruction requested inside the expansion's convergence zone.
class OutOfZoneError : public Error {
public:
  using Error::Error;
};

/// Configuration document is malformed or violates an invariant.
class ConfigError : public Error {
public:
  using Error::Error;
};

} // namespace holo
