#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace capxray {

using cplx = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using CVec3 = Eigen::Vector3cd;
using CMat3 = Eigen::Matrix3cd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr cplx kI{0.0, 1.0};

/// Base class for every error raised by the library. The CLI maps these
/// onto exit codes, so each failure category gets its own type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inputs violate a structural invariant (non-unit vectors, bad grid sizes).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A point lies outside the region where a map or formula is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An operation's documented precondition does not hold for the data.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Array shapes or grids of two operands do not match.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Parameters outside the admissible range of an estimate.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Linear solver breakdown.
class SolverError : public Error {
 public:
  using Error::Error;
};

/// File could not be read or written, or had the wrong format.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Bad experiment configuration. The message carries the line number.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Tangential projection of v at the unit vector x.
inline Vec3 tangential(const Vec3& x, const Vec3& v) { return v - x.dot(v) * x; }
inline CVec3 tangential(const Vec3& x, const CVec3& v) {
  const CVec3 xc = x.cast<cplx>();
  return v - (xc.transpose() * v)(0) * xc;
}

}  // namespace capxray
