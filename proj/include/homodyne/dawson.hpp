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

#ifndef HOMODYNE_DAWSON_HPP
#define HOMODYNE_DAWSON_HPP

#include <cmath>
#include <iomanip>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <vector>

#include "homodyne/common.hpp"
#include "homodyne/fock.hpp"

namespace homodyne {

// ---------------------------------------------------------------------------
// Dawson's integral daw(x) = exp(-x^2) int_0^x exp(t^2) dt and its derivative
// ladder. The ladder seeds the pattern functions f^{(m)} = 2 daw^{(m+1)}.
//
// All evaluation is done in quad precision. Three methods cover the base
// value: the MacLaurin series near 0, a sampled-Gaussian (Rybicki) sum in the
// core band, and the divergent 1/x expansion truncated at its smallest term
// beyond. Derivatives use the forward recurrence
//   daw^{(k+1)} = -2x daw^{(k)} - 2k daw^{(k-1)},
// which is reliable while x^2 <= 2k+1 (all recurrence solutions comparable).
// Outside that region the true derivative dips far below the dominant
// solution and the recurrence output is replaced: by the term-wise
// differentiated asymptotic series where its optimal truncation certifies,
// and by quadrature of
//   daw^{(k)}(x) = 1/2 int_0^inf exp(-t^2/4) t^k sin(x t + k pi/2) dt
// in the band where neither expansion applies.
// ---------------------------------------------------------------------------

enum class DawsonMethod { maclaurin, core, asymptotic };

namespace detail {

inline f128 daw_maclaurin_q(f128 x) {
  const f128 x2 = x * x;
  f128 term = x, sum = x;
  for (int m = 0; m < 200; ++m) {
    term *= f128(-2) * x2 / f128(2 * m + 3);
    sum += term;
    if (abs_q(term) <= f128(1e-40) * abs_q(sum)) break;
  }
  return sum;
}

// daw(x) = (1/sqrt(pi)) sum over odd n of exp(-(x-n h)^2)/n. Exponentials
// advance by running products; aliasing error ~ exp(-(pi/(2h))^2).
inline f128 daw_rybicki_q(f128 x) {
  static const f128 h = f128(1) / 8;
  static const f128 c1 = expq(f128(-4) * h * h);
  static const f128 c2 = expq(f128(-8) * h * h);
  const double xd = to_double(x);
  long n = static_cast<long>(std::ceil((xd - 13.5) * 8.0));
  if (!(n & 1)) ++n;
  const long n_hi = static_cast<long>(std::floor((xd + 13.5) * 8.0));
  f128 t = x - f128(n) * h;
  f128 u = expq(-t * t);
  f128 v = expq(f128(4) * h * t);
  f128 sum = 0;
  for (; n <= n_hi; n += 2) {
    sum += u / f128(n);
    u *= v * c1;
    v *= c2;
  }
  return sum / sqrtq(M_PIq);
}

inline f128 daw_asym_base_q(f128 x) {
  const f128 r = f128(1) / (2 * x * x);
  f128 term = f128(1) / (2 * x), sum = term, prev = abs_q(term);
  for (int j = 1; j < 400; ++j) {
    term *= f128(2 * j - 1) * r;
    if (abs_q(term) >= prev) break;
    sum += term;
    prev = abs_q(term);
    if (prev <= f128(1e-40) * abs_q(sum)) break;
  }
  return sum;
}

inline f128 daw_base_q(f128 ax, double r_small, double r_large) {
  if (ax < f128(r_small)) return daw_maclaurin_q(ax);
  if (ax < f128(r_large)) return daw_rybicki_q(ax);
  return daw_asym_base_q(ax);
}

// Term-wise differentiated 1/x expansion of daw^{(k)}. Terms may grow for a
// few steps before shrinking; the sum is accepted only when the smallest term
// reached certifies the stated tolerance.
inline bool daw_deriv_asym_q(int k, f128 x, f128* out) {
  f128 t = f128(1) / (2 * x);
  for (int i = 1; i <= k; ++i) t *= f128(i) / x;
  if (k & 1) t = -t;
  f128 sum = t;
  const f128 inv2x2 = f128(1) / (2 * x * x);
  int grow = 0;
  bool shrinking = false;
  for (int j = 0; j < 600; ++j) {
    const f128 r = f128(2 * j + k + 1) * f128(2 * j + k + 2) / f128(2 * j + 2) * inv2x2;
    const f128 tn = t * r;
    if (!shrinking) {
      if (abs_q(tn) < abs_q(t)) {
        shrinking = true;
      } else if (++grow > 10) {
        return false;
      }
    } else if (abs_q(tn) >= abs_q(t)) {
      // optimal truncation reached
      if (abs_q(t) <= f128(1e-26) + f128(1e-20) * abs_q(sum)) {
        *out = sum;
        return true;
      }
      return false;
    }
    t = tn;
    sum += t;
    if (shrinking && abs_q(t) <= f128(1e-26) + f128(1e-20) * abs_q(sum)) {
      *out = sum;
      return true;
    }
  }
  return false;
}

// Trapezoid evaluation of the sine-transform representation for every order
// up to k_max at once. sin(x t + k pi/2) cycles through {sin, cos} of x t, so
// per order the pass is a fused multiply-add over precomputed tables.
inline void daw_deriv_integral_q(f128 x, int k_max, const std::vector<char>& want,
                                 f128* out) {
  const double xd = to_double(x);
  const double dt_d = two_pi / (4.0 * (std::abs(xd) + 25.0));
  const f128 dt = f128(dt_d);
  const int n = static_cast<int>(std::ceil(30.0 / dt_d));
  std::vector<f128> gauss(n + 1), s(n + 1), c(n + 1), tpow(n + 1);
  for (int i = 1; i <= n; ++i) {
    const f128 t = f128(i) * dt;
    gauss[i] = expq(-t * t / 4);
    s[i] = sinq(x * t);
    c[i] = cosq(x * t);
    tpow[i] = 1;
  }
  for (int k = 0; k <= k_max; ++k) {
    // sin(x t + k pi/2): k mod 4 -> sin, cos, -sin, -cos
    if (k > 0)
      for (int i = 1; i <= n; ++i) tpow[i] *= f128(i) * dt;
    if (!want[k]) continue;
    f128 acc = 0;
    switch (k & 3) {
      case 0:
        for (int i = 1; i <= n; ++i) acc += gauss[i] * tpow[i] * s[i];
        break;
      case 1:
        for (int i = 1; i <= n; ++i) acc += gauss[i] * tpow[i] * c[i];
        break;
      case 2:
        for (int i = 1; i <= n; ++i) acc -= gauss[i] * tpow[i] * s[i];
        break;
      default:
        for (int i = 1; i <= n; ++i) acc -= gauss[i] * tpow[i] * c[i];
        break;
    }
    out[k] = acc * dt / 2;
  }
}

// MacLaurin series differentiated term by term; independent of the
// recurrence, usable as a cross-check for |x| up to a few units.
inline f128 daw_deriv_series_q(int k, f128 x) {
  const int m0 = k / 2;  // first m with 2m+1 >= k
  // t = c_{m0} (2 m0 + 1)! / (2 m0 + 1 - k)! x^{2 m0 + 1 - k},
  // c_m = (-1)^m m! 4^m / (2m+1)!
  f128 t = (m0 & 1) ? f128(-1) : f128(1);
  for (int i = 1; i <= m0; ++i) t *= f128(4) * f128(i);
  for (int i = 1; i <= 2 * m0 + 1 - k; ++i) t /= f128(i);
  for (int i = 0; i < 2 * m0 + 1 - k; ++i) t *= x;
  f128 sum = t;
  const f128 x2 = x * x;
  for (int m = m0; m < m0 + 400; ++m) {
    t *= f128(-2) * x2 * f128(2 * m + 2) /
         (f128(2 * m + 3 - k) * f128(2 * m + 2 - k));
    sum += t;
    if (abs_q(t) <= f128(1e-40) * abs_q(sum) + f128(1e-300)) break;
  }
  return sum;
}

inline void daw_ladder_q(f128 x, int k_max, f128* out, double r_small, double r_large) {
  const bool neg = x < 0;
  const f128 ax = neg ? -x : x;
  out[0] = daw_base_q(ax, r_small, r_large);
  if (k_max >= 1) out[1] = f128(1) - 2 * ax * out[0];
  for (int k = 1; k < k_max; ++k)
    out[k + 1] = -2 * ax * out[k] - f128(2 * k) * out[k - 1];

  // decay-zone replacement
  const double axd = to_double(ax);
  std::vector<char> pending(k_max + 1, 0);
  bool any_pending = false;
  for (int k = 2; k <= k_max; ++k) {
    if (axd * axd > 2.0 * k + 1.0) {
      f128 v;
      if (daw_deriv_asym_q(k, ax, &v)) {
        out[k] = v;
      } else {
        pending[k] = 1;
        any_pending = true;
      }
    }
  }
  if (any_pending) {
    std::vector<f128> tmp(k_max + 1);
    daw_deriv_integral_q(ax, k_max, pending, tmp.data());
    for (int k = 2; k <= k_max; ++k)
      if (pending[k]) out[k] = tmp[k];
  }

  if (neg)  // daw is odd, so daw^{(k)}(-a) = (-1)^{k+1} daw^{(k)}(a)
    for (int k = 0; k <= k_max; k += 2) out[k] = -out[k];
}

}  // namespace detail

class DawsonEvaluator {
 public:
  double switch_small = 1.0;
  double switch_large = 6.0;
  int max_derivative_order = 40;

  DawsonMethod method_for(double x) const {
    const double ax = std::abs(x);
    if (ax < switch_small) return DawsonMethod::maclaurin;
    if (ax < switch_large) return DawsonMethod::core;
    return DawsonMethod::asymptotic;
  }

  double dawson(double x) const {
    if (!std::isfinite(x)) throw ValidationError("dawson: x must be finite");
    const f128 v = detail::daw_base_q(detail::abs_q(f128(x)), switch_small, switch_large);
    return x < 0 ? -detail::to_double(v) : detail::to_double(v);
  }

  double operator()(double x) const { return dawson(x); }

  /// daw^{(0)}(x) .. daw^{(k_max)}(x).
  std::vector<double> ladder(double x, int k_max) const {
    check_order(k_max);
    if (!std::isfinite(x)) throw ValidationError("dawson ladder: x must be finite");
    std::vector<f128> buf(k_max + 1);
    detail::daw_ladder_q(f128(x), k_max, buf.data(), switch_small, switch_large);
    std::vector<double> out(k_max + 1);
    for (int k = 0; k <= k_max; ++k) out[k] = detail::to_double(buf[k]);
    return out;
  }

  double derivative(int k, double x) const { return ladder(x, k)[k]; }

  /// Term-wise differentiated MacLaurin series; the independent evaluation
  /// the recurrence ladder is certified against on moderate arguments.
  double maclaurin_derivative(int k, double x) const {
    check_order(k);
    return detail::to_double(detail::daw_deriv_series_q(k, f128(x)));
  }

 private:
  void check_order(int k) const {
    if (k < 0) throw ValidationError("dawson derivative: order must be >= 0");
    if (k > max_derivative_order)
      throw ValidationError("dawson derivative: order exceeds max_derivative_order");
  }
};

inline const DawsonEvaluator& default_dawson() {
  static const DawsonEvaluator ev;
  return ev;
}

inline double dawson(double x) { return default_dawson().dawson(x); }

inline double dawson_derivative(int k, double x) {
  return default_dawson().derivative(k, x);
}

/// Pattern function f^{(m)}(x) = 2 daw^{(m+1)}(x); f = f^{(0)} has
/// <n|f(Q)|n> = delta_{n0}.
inline double pattern_function(int m, double x) {
  if (m < 0) throw ValidationError("pattern_function: order must be >= 0");
  return 2.0 * dawson_derivative(m + 1, x);
}

// ---------------------------------------------------------------------------
// Hermite-series representation of f: f(x) = sum_n (-1)^n n!/(2^n (2n)!) H_2n(x)
// ---------------------------------------------------------------------------

inline double hermite_series_f(double x, int n_terms) {
  if (n_terms < 1) throw ValidationError("hermite_series_f: n_terms must be >= 1");
  double coef = 1.0;  // (-1)^n n! / (2^n (2n)!)
  double Hm = 1.0, Hc = 2.0 * x;
  double sum = coef * Hm;  // n = 0 term
  for (int n = 1; n < n_terms; ++n) {
    // advance H from index 2n-2 to 2n
    for (int j = 2 * n - 1; j <= 2 * n; ++j) {
      const double Hn = 2.0 * x * Hc - 2.0 * (j - 1) * Hm;
      Hm = Hc;
      Hc = Hn;
    }
    coef *= -1.0 / (4.0 * (2 * n - 1));
    sum += coef * Hc;
  }
  return sum;
}

// ---------------------------------------------------------------------------
// Closed-form integral int H_{2k}(x) H_n(x)^2 exp(-x^2) dx
//   = 2^{k+n} sqrt(pi) (2k)! (n!)^2 / ((n-k)! (k!)^2),   0 <= k <= n.
// ---------------------------------------------------------------------------

inline double gradshteyn_7_375_2(int k, int n) {
  if (k < 0 || n < 0) throw ValidationError("gradshteyn_7_375_2: indices must be >= 0");
  if (k > n)
    throw ValidationError("gradshteyn_7_375_2: k > n is outside the formula's domain");
  const double lg = (k + n) * std::log(2.0) + 0.5 * std::log(pi) + std::lgamma(2 * k + 1) +
                    2.0 * std::lgamma(n + 1) - std::lgamma(n - k + 1) -
                    2.0 * std::lgamma(k + 1);
  return std::exp(lg);
}

// ---------------------------------------------------------------------------
// Pattern-function matrix elements <a| f^{(m)}(Q) |b>
//
// Computed by quad-precision Gauss-Hermite accumulation: the high-order
// pattern functions reach ~1e16 while the integrals they enter cancel to
// below 1e-9, which double-precision summation cannot resolve.
// ---------------------------------------------------------------------------

namespace detail {

struct GhPatternTable {
  std::shared_ptr<const GhRule> rule;
  int m_max = -1;
  std::vector<std::vector<f128>> f_q;  // [m][i] = f^{(m)}(t_i)
};

inline std::shared_ptr<const GhPatternTable> gh_pattern_table(int order, int m_max) {
  static std::mutex mu;
  static std::map<int, std::shared_ptr<const GhPatternTable>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[order];
  if (slot && slot->m_max >= m_max) return slot;
  const int build_m = std::max(m_max + 4, slot ? slot->m_max : 0);
  auto table = std::make_shared<GhPatternTable>();
  table->rule = gh_rule(order);
  table->m_max = build_m;
  table->f_q.assign(build_m + 1, std::vector<f128>(order));
  const DawsonEvaluator ev;
  std::vector<f128> lad(build_m + 2);
  for (int i = 0; i < order; ++i) {
    daw_ladder_q(table->rule->nodes_q[i], build_m + 1, lad.data(), ev.switch_small,
                 ev.switch_large);
    for (int m = 0; m <= build_m; ++m) table->f_q[m][i] = 2 * lad[m + 1];
  }
  slot = table;
  return table;
}

}  // namespace detail

/// <a| f^{(m)}(Q) |b> via quad-precision Gauss-Hermite at cfg.gh_order.
inline double pattern_matrix_element(int m, int a, int b, const FockConfig& cfg) {
  if (m < 0 || a < 0 || b < 0)
    throw ValidationError("pattern_matrix_element: indices must be >= 0");
  auto ht = detail::gh_hermite_table(cfg.gh_order, std::max(a, b));
  auto ft = detail::gh_pattern_table(cfg.gh_order, m);
  const auto& rule = *ht->rule;
  f128 s = 0;
  for (int i = 0; i < rule.order; ++i)
    s += rule.wmod_q[i] * ht->h_q[a][i] * ht->h_q[b][i] * ft->f_q[m][i];
  return detail::to_double(s);
}

/// <n+k| f^{(k+2l)}(Q) |n>. For n >= l this must match
/// 2^l (-1)^k sqrt(2^k l! (l+k)!) delta_{ln}.
inline double lemma_matrix_element(int k, int l, int n, const FockConfig& cfg) {
  if (k < 0 || l < 0 || n < 0)
    throw ValidationError("lemma_matrix_element: indices must be >= 0");
  return pattern_matrix_element(k + 2 * l, n + k, n, cfg);
}

/// Closed form of the diagonal/zero structure above (value for n = l).
inline double lemma_closed_form(int k, int l) {
  const double mag =
      std::exp(l * std::log(2.0) +
               0.5 * (k * std::log(2.0) + std::lgamma(l + 1) + std::lgamma(l + k + 1)));
  return (k & 1) ? -mag : mag;
}

/// Handles for a set of pattern-function orders with certified sup bounds
/// over the Gauss-Hermite node range of a configuration.
class PatternFunctionSet {
 public:
  PatternFunctionSet(std::vector<int> orders, const FockConfig& cfg)
      : orders_(std::move(orders)) {
    int m_max = 0;
    for (int m : orders_) {
      if (m < 0) throw ValidationError("PatternFunctionSet: order must be >= 0");
      m_max = std::max(m_max, m);
    }
    auto ft = detail::gh_pattern_table(cfg.gh_order, m_max);
    for (int m : orders_) {
      double sup = 0;
      for (const f128& v : ft->f_q[m])
        sup = std::max(sup, std::abs(detail::to_double(v)));
      sup_bounds_[m] = sup;
    }
  }

  const std::vector<int>& orders() const { return orders_; }

  double sup_bound(int m) const {
    auto it = sup_bounds_.find(m);
    if (it == sup_bounds_.end())
      throw ValidationError("PatternFunctionSet: order not in set");
    return it->second;
  }

  double operator()(int m, double x) const { return pattern_function(m, x); }

 private:
  std::vector<int> orders_;
  std::map<int, double> sup_bounds_;
};

/// Tabulates (x, daw(x), daw^{(1..k_max)}(x)) rows, 17 significant digits.
inline void write_dawson_table(std::ostream& os, const std::vector<double>& xs,
                               int k_max) {
  const DawsonEvaluator ev;
  os << "x,daw";
  for (int k = 1; k <= k_max; ++k) os << ",daw_d" << k;
  os << "\n";
  os << std::setprecision(17);
  for (double x : xs) {
    const auto lad = ev.ladder(x, k_max);
    os << x;
    for (int k = 0; k <= k_max; ++k) os << "," << lad[k];
    os << "\n";
  }
}

}  // namespace homodyne

#endif  // HOMODYNE_DAWSON_HPP
