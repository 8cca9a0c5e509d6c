// Copyright 2026 The Homodyne Project Developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef HOMODYNE_COMMON_HPP
#define HOMODYNE_COMMON_HPP

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include <quadmath.h>

namespace homodyne {

/// Quad-precision scalar used internally where double-precision cancellation
/// would swamp the tolerances this library promises.
using f128 = __float128;

using cplx = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846264338327950288;
inline constexpr double two_pi = 2.0 * pi;

/// Invalid input: bad configuration, malformed file, precondition violation.
/// The CLI maps this to exit status 2.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& msg) : std::invalid_argument(msg) {}
};

/// A numerical self-check failed (quadrature did not certify, a closed-form
/// cross-check missed its tolerance). The CLI maps this to exit status 3.
class CertificationError : public std::runtime_error {
 public:
  explicit CertificationError(const std::string& msg) : std::runtime_error(msg) {}
};

namespace detail {

inline double to_double(f128 x) { return static_cast<double>(x); }

inline f128 abs_q(f128 x) { return x < 0 ? -x : x; }

// Reduce an angle to [0, 2*pi). fmod is exact for its given arguments, so a
// value already in range passes through unchanged.
inline double reduce_angle(double theta) {
  if (!std::isfinite(theta)) throw ValidationError("angle must be finite");
  double r = std::fmod(theta, two_pi);
  if (r < 0) r += two_pi;
  if (r >= two_pi) r = 0.0;  // guards fmod rounding at the seam
  return r;
}

}  // namespace detail
}  // namespace homodyne

#endif  // HOMODYNE_COMMON_HPP
