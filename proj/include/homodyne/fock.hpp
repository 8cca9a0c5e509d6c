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

#ifndef HOMODYNE_FOCK_HPP
#define HOMODYNE_FOCK_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "homodyne/common.hpp"

namespace homodyne {

// ---------------------------------------------------------------------------
// Hermite functions
//
// h_n(x) = (2^n n! sqrt(pi))^{-1/2} H_n(x) exp(-x^2/2), evaluated through the
// weighted recursion h_{n+1} = x sqrt(2/(n+1)) h_n - sqrt(n/(n+1)) h_{n-1}.
// The weighted form never touches a factorial, so it is usable far past the
// point where H_n itself overflows.
// ---------------------------------------------------------------------------

namespace detail {

template <typename Real>
inline Real hermite_h0(Real x);

template <>
inline double hermite_h0<double>(double x) {
  return 0.75112554446494248285870553477 * std::exp(-0.5 * x * x);
}

template <>
inline f128 hermite_h0<f128>(f128 x) {
  static const f128 c = powq(M_PIq, f128(-0.25));
  return c * expq(f128(-0.5) * x * x);
}

// Fills out[0..n_max] with h_0(x)..h_{n_max}(x).
template <typename Real>
inline void hermite_ladder_impl(Real x, int n_max, Real* out) {
  out[0] = hermite_h0<Real>(x);
  if (n_max == 0) return;
  out[1] = x * Real(std::sqrt(2.0)) * out[0];
  for (int n = 1; n < n_max; ++n) {
    const Real a = x * sqrtq(f128(2) / f128(n + 1));
    const Real b = sqrtq(f128(n) / f128(n + 1));
    out[n + 1] = a * out[n] - b * out[n - 1];
  }
}

template <>
inline void hermite_ladder_impl<double>(double x, int n_max, double* out) {
  out[0] = hermite_h0<double>(x);
  if (n_max == 0) return;
  out[1] = x * std::sqrt(2.0) * out[0];
  for (int n = 1; n < n_max; ++n) {
    out[n + 1] = x * std::sqrt(2.0 / (n + 1)) * out[n] -
                 std::sqrt(double(n) / (n + 1)) * out[n - 1];
  }
}

}  // namespace detail

inline std::vector<double> hermite_ladder(double x, int n_max) {
  if (n_max < 0) throw ValidationError("hermite_ladder: n_max must be >= 0");
  std::vector<double> out(n_max + 1);
  detail::hermite_ladder_impl<double>(x, n_max, out.data());
  return out;
}

/// h_n(x). Internally quad precision: for large |x| the seed value
/// exp(-x^2/2) underflows double long before h_n does.
inline double hermite_function(int n, double x) {
  if (n < 0) throw ValidationError("hermite_function: n must be >= 0");
  std::vector<f128> buf(n + 1);
  detail::hermite_ladder_impl<f128>(f128(x), n, buf.data());
  return detail::to_double(buf[n]);
}

// ---------------------------------------------------------------------------
// Gauss-Hermite quadrature
//
// Rule for the weight exp(-x^2). Stored weights are the modified Christoffel
// numbers w_i e^{t_i^2} = 1 / sum_{j<N} h_j(t_i)^2, so that
//   int f(x) h_m(x) h_n(x) dx  ~=  sum_i wmod_i h_m(t_i) h_n(t_i) f(t_i)
// with every factor of bounded size. Nodes come from the symmetric
// tridiagonal Jacobi matrix and are Newton-polished in quad precision.
// ---------------------------------------------------------------------------

namespace detail {

struct GhRule {
  int order = 0;
  std::vector<double> nodes, wmod;
  std::vector<f128> nodes_q, wmod_q;
};

inline std::shared_ptr<const GhRule> build_gh_rule(int order) {
  auto rule = std::make_shared<GhRule>();
  rule->order = order;
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(order);
  Eigen::VectorXd sub(order - 1 > 0 ? order - 1 : 0);
  for (int k = 0; k + 1 < order; ++k) sub[k] = std::sqrt(0.5 * (k + 1));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);

  rule->nodes_q.resize(order);
  rule->wmod_q.resize(order);
  rule->nodes.resize(order);
  rule->wmod.resize(order);
  std::vector<f128> h(order + 1);
  const f128 dcoef = sqrtq(f128(2) * f128(order));
  for (int i = 0; i < order; ++i) {
    f128 t = f128(es.eigenvalues()[i]);
    for (int it = 0; it < 3; ++it) {
      hermite_ladder_impl<f128>(t, order, h.data());
      const f128 den = dcoef * h[order - 1] - t * h[order];
      t -= h[order] / den;
    }
    hermite_ladder_impl<f128>(t, order, h.data());
    f128 s = 0;
    for (int j = 0; j < order; ++j) s += h[j] * h[j];
    rule->nodes_q[i] = t;
    rule->wmod_q[i] = f128(1) / s;
    rule->nodes[i] = to_double(t);
    rule->wmod[i] = to_double(rule->wmod_q[i]);
  }
  return rule;
}

inline std::shared_ptr<const GhRule> gh_rule(int order) {
  if (order < 1) throw ValidationError("gh_rule: order must be >= 1");
  static std::mutex mu;
  static std::map<int, std::shared_ptr<const GhRule>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(order);
  if (it != cache.end()) return it->second;
  auto rule = build_gh_rule(order);
  cache.emplace(order, rule);
  return rule;
}

// Hermite function values at the nodes of a rule, h_j(t_i) for j <= n_max.
// Immutable snapshots; a request past the cached order rebuilds a larger one.
struct GhHermiteTable {
  std::shared_ptr<const GhRule> rule;
  int n_max = -1;
  std::vector<std::vector<f128>> h_q;   // [j][i]
  std::vector<std::vector<double>> h;   // [j][i]
};

inline std::shared_ptr<const GhHermiteTable> gh_hermite_table(int order, int n_max) {
  static std::mutex mu;
  static std::map<int, std::shared_ptr<const GhHermiteTable>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[order];
  if (slot && slot->n_max >= n_max) return slot;
  const int build_n = std::max(n_max + 8, slot ? 2 * slot->n_max : 0);
  auto table = std::make_shared<GhHermiteTable>();
  table->rule = gh_rule(order);
  table->n_max = build_n;
  table->h_q.assign(build_n + 1, std::vector<f128>(order));
  table->h.assign(build_n + 1, std::vector<double>(order));
  std::vector<f128> col(build_n + 1);
  for (int i = 0; i < order; ++i) {
    hermite_ladder_impl<f128>(table->rule->nodes_q[i], build_n, col.data());
    for (int j = 0; j <= build_n; ++j) {
      table->h_q[j][i] = col[j];
      table->h[j][i] = to_double(col[j]);
    }
  }
  slot = table;
  return table;
}

inline double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
  double s = 0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i)
    s += 0.5 * (x[i + 1] - x[i]) * (y[i] + y[i + 1]);
  return s;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

struct FockConfig {
  int dim = 0;
  int gh_order = 0;
  std::vector<double> x_grid;

  FockConfig(int dim_, int gh_order_, std::vector<double> grid)
      : dim(dim_), gh_order(gh_order_), x_grid(std::move(grid)) {
    if (dim < 1) throw ValidationError("FockConfig: dim must be >= 1");
    if (gh_order < 2 * dim)
      throw ValidationError("FockConfig: gh_order must be >= 2*dim");
    if (x_grid.size() < 2) throw ValidationError("FockConfig: x_grid too small");
    for (std::size_t i = 0; i + 1 < x_grid.size(); ++i)
      if (!(x_grid[i] < x_grid[i + 1]))
        throw ValidationError("FockConfig: x_grid must be strictly increasing");
    const std::size_t n = x_grid.size();
    for (std::size_t i = 0; i < n; ++i)
      if (std::abs(x_grid[i] + x_grid[n - 1 - i]) > 1e-9)
        throw ValidationError("FockConfig: x_grid must be symmetric about 0");
    const double need = std::sqrt(2.0 * dim) + 3.0;
    if (x_grid.back() < need - 1e-9)
      throw ValidationError("FockConfig: x_grid must span at least +-(sqrt(2 dim)+3)");
  }

  /// Uniform symmetric grid with span sqrt(2 dim)+5 and step <= 0.02.
  static FockConfig standard(int dim, int gh_order = 0) {
    if (gh_order == 0) gh_order = std::max(256, 2 * dim);
    const double R = std::sqrt(2.0 * dim) + 5.0;
    const int half = static_cast<int>(std::ceil(R / 0.02));
    std::vector<double> grid(2 * half + 1);
    const double step = R / half;
    for (int i = 0; i <= 2 * half; ++i) grid[i] = (i - half) * step;
    grid[half] = 0.0;
    return FockConfig(dim, gh_order, std::move(grid));
  }
};

// ---------------------------------------------------------------------------
// Hermite value tables on a grid
// ---------------------------------------------------------------------------

class HermiteTable {
 public:
  HermiteTable(int order, std::vector<double> grid)
      : order_(order), grid_(std::move(grid)) {
    if (order < 0) throw ValidationError("HermiteTable: order must be >= 0");
    const int n = static_cast<int>(grid_.size());
    h_.resize(order + 1, n);
    H_.resize(order + 1, n);
    std::vector<double> col(order + 1);
    for (int i = 0; i < n; ++i) {
      detail::hermite_ladder_impl<double>(grid_[i], order, col.data());
      for (int j = 0; j <= order; ++j) h_(j, i) = col[j];
      // raw polynomial recursion; only meaningful while it stays in range
      double Hm = 1.0, Hc = 2.0 * grid_[i];
      H_(0, i) = Hm;
      if (order >= 1) H_(1, i) = Hc;
      for (int j = 1; j < order; ++j) {
        const double Hn = 2.0 * grid_[i] * Hc - 2.0 * j * Hm;
        Hm = Hc;
        Hc = Hn;
        H_(j + 1, i) = Hn;
      }
    }
  }

  int order() const { return order_; }
  const std::vector<double>& grid() const { return grid_; }
  double h(int n, int i) const { return h_(n, i); }
  double H(int n, int i) const { return H_(n, i); }
  Eigen::MatrixXd::ConstRowXpr h_row(int n) const { return h_.row(n); }

 private:
  int order_;
  std::vector<double> grid_;
  Eigen::MatrixXd h_, H_;
};

// ---------------------------------------------------------------------------
// Ladder operators on the truncated space
// ---------------------------------------------------------------------------

struct LadderOperators {
  Eigen::MatrixXd a, a_dagger, number;

  explicit LadderOperators(int dim) {
    if (dim < 1) throw ValidationError("LadderOperators: dim must be >= 1");
    a = Eigen::MatrixXd::Zero(dim, dim);
    for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(double(n));
    a_dagger = a.transpose();
    number = Eigen::MatrixXd::Zero(dim, dim);
    for (int n = 0; n < dim; ++n) number(n, n) = n;
  }
};

// ---------------------------------------------------------------------------
// Density matrices
// ---------------------------------------------------------------------------

class DensityMatrix {
 public:
  /// Checks Hermiticity (within hermit_tol of the matrix scale), unit trace
  /// (within trace_tol) and spectrum >= eig_floor, then stores the exactly
  /// symmetrized matrix.
  explicit DensityMatrix(Eigen::MatrixXcd rho, double trace_tol = 1e-12,
                         double eig_floor = -1e-10, double hermit_tol = 1e-10) {
    if (rho.rows() != rho.cols() || rho.rows() < 1)
      throw ValidationError("DensityMatrix: matrix must be square and nonempty");
    const double scale = std::max(1.0, rho.cwiseAbs().maxCoeff());
    const double gap = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    if (gap > hermit_tol * scale)
      throw ValidationError("DensityMatrix: input is not Hermitian");
    m_ = 0.5 * (rho + rho.adjoint().eval());
    const double tr = m_.trace().real();
    if (std::abs(tr - 1.0) > trace_tol)
      throw ValidationError("DensityMatrix: trace differs from 1 beyond tolerance");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < eig_floor)
      throw ValidationError("DensityMatrix: negative eigenvalue beyond tolerance");
  }

  static DensityMatrix pure(Eigen::VectorXcd psi) {
    const double n = psi.norm();
    if (n == 0) throw ValidationError("DensityMatrix::pure: zero vector");
    psi /= n;
    return DensityMatrix(psi * psi.adjoint());
  }

  int dim() const { return static_cast<int>(m_.rows()); }
  const Eigen::MatrixXcd& matrix() const { return m_; }
  cplx operator()(int i, int j) const { return m_(i, j); }

  /// Mass on the two highest retained levels; states with more than ~1e-6
  /// here produce unreliable truncated quadrature densities.
  double truncation_edge_mass() const {
    double s = 0;
    for (int n = std::max(0, dim() - 2); n < dim(); ++n) s += m_(n, n).real();
    return s;
  }

 private:
  Eigen::MatrixXcd m_;
};

inline double trace_distance(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a - b, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

inline double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  return trace_distance(a.matrix(), b.matrix());
}

/// Uhlmann fidelity (tr sqrt(sqrt(a) b sqrt(a)))^2.
inline double fidelity(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ea(a);
  Eigen::VectorXd ev = ea.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  Eigen::MatrixXcd sq = ea.eigenvectors() * ev.asDiagonal() * ea.eigenvectors().adjoint();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eb(sq * b * sq, Eigen::EigenvaluesOnly);
  const double t = eb.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  return t * t;
}

inline double fidelity(const DensityMatrix& a, const DensityMatrix& b) {
  return fidelity(a.matrix(), b.matrix());
}

// ---------------------------------------------------------------------------
// Rotated-quadrature probability densities
// ---------------------------------------------------------------------------

struct QuadratureDistribution {
  double theta = 0.0;
  std::vector<double> x;
  std::vector<double> p;
  bool truncation_warning = false;
  double imag_residual = 0.0;  // largest |Im| of the double sum, diagnostics
};

/// Exact density of Q_theta in the given state on cfg.x_grid:
///   p(x) = sum_{m,n} rho[m][n] e^{-i theta (m-n)} h_m(x) h_n(x).
/// Negative rounding residue is not clamped here.
inline QuadratureDistribution quadrature_pdf(const DensityMatrix& rho, double theta,
                                             const FockConfig& cfg) {
  if (rho.dim() > cfg.dim)
    throw ValidationError("quadrature_pdf: state dimension exceeds config dim");
  const double th = detail::reduce_angle(theta);
  const int d = rho.dim();
  Eigen::MatrixXcd rot(d, d);
  for (int m = 0; m < d; ++m)
    for (int n = 0; n < d; ++n)
      rot(m, n) = rho(m, n) * std::polar(1.0, -th * (m - n));

  QuadratureDistribution out;
  out.theta = th;
  out.x = cfg.x_grid;
  out.p.resize(cfg.x_grid.size());
  out.truncation_warning = rho.truncation_edge_mass() > 1e-6;

  Eigen::VectorXd h(d);
  std::vector<double> col(d);
  for (std::size_t i = 0; i < cfg.x_grid.size(); ++i) {
    detail::hermite_ladder_impl<double>(cfg.x_grid[i], d - 1, col.data());
    for (int n = 0; n < d; ++n) h[n] = col[n];
    const cplx v = h.cast<cplx>().dot(rot * h.cast<cplx>());
    out.p[i] = v.real();
    out.imag_residual = std::max(out.imag_residual, std::abs(v.imag()));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Matrix elements <m| g(Q) |n>
// ---------------------------------------------------------------------------

namespace detail {

inline double gh_matrix_element(const std::function<double(double)>& g, int m, int n,
                                const GhHermiteTable& table) {
  const auto& rule = *table.rule;
  double s = 0;
  for (int i = 0; i < rule.order; ++i)
    s += rule.wmod[i] * table.h[m][i] * table.h[n][i] * g(rule.nodes[i]);
  return s;
}

}  // namespace detail

/// <m| g(Q) |n> = int h_m(x) g(x) h_n(x) dx by Gauss-Hermite quadrature with
/// the exponential factors fused into the modified weights. The result is
/// certified by recomputing at twice the order; disagreement beyond
/// 1e-9 * max(1, |value|) raises CertificationError.
inline double matrix_element(const std::function<double(double)>& g, int m, int n,
                             const FockConfig& cfg) {
  if (m < 0 || n < 0) throw ValidationError("matrix_element: indices must be >= 0");
  const int n_max = std::max(m, n);
  auto t1 = detail::gh_hermite_table(cfg.gh_order, n_max);
  auto t2 = detail::gh_hermite_table(2 * cfg.gh_order, n_max);
  const double v1 = detail::gh_matrix_element(g, m, n, *t1);
  const double v2 = detail::gh_matrix_element(g, m, n, *t2);
  if (std::abs(v1 - v2) > 1e-9 * std::max(1.0, std::abs(v2)))
    throw CertificationError("matrix_element: insufficient quadrature order");
  return v2;
}

/// Full dim x dim matrix of g(Q), certified the same way as matrix_element
/// but with g evaluated once per node.
inline Eigen::MatrixXd function_matrix(const std::function<double(double)>& g, int dim,
                                       const FockConfig& cfg) {
  auto t1 = detail::gh_hermite_table(cfg.gh_order, dim - 1);
  auto t2 = detail::gh_hermite_table(2 * cfg.gh_order, dim - 1);
  Eigen::MatrixXd out(dim, dim);
  double worst = 0;
  std::vector<double> g1(t1->rule->order), g2(t2->rule->order);
  for (int i = 0; i < t1->rule->order; ++i) g1[i] = g(t1->rule->nodes[i]);
  for (int i = 0; i < t2->rule->order; ++i) g2[i] = g(t2->rule->nodes[i]);
  for (int m = 0; m < dim; ++m) {
    for (int n = m; n < dim; ++n) {
      double v1 = 0, v2 = 0;
      for (int i = 0; i < t1->rule->order; ++i)
        v1 += t1->rule->wmod[i] * t1->h[m][i] * t1->h[n][i] * g1[i];
      for (int i = 0; i < t2->rule->order; ++i)
        v2 += t2->rule->wmod[i] * t2->h[m][i] * t2->h[n][i] * g2[i];
      worst = std::max(worst, std::abs(v1 - v2) / std::max(1.0, std::abs(v2)));
      out(m, n) = out(n, m) = v2;
    }
  }
  if (worst > 1e-9)
    throw CertificationError("function_matrix: insufficient quadrature order");
  return out;
}

/// || (g(Q) a* - a* g(Q)) phi - (1/sqrt 2) g'(Q) phi ||  on the truncated
/// space, or the lowering-operator analogue
/// || (g(Q) a - a g(Q)) phi + (1/sqrt 2) g'(Q) phi ||  when lowering is set.
inline double commutator_residual(const std::function<double(double)>& g,
                                  const std::function<double(double)>& g_prime,
                                  const Eigen::VectorXcd& phi, const FockConfig& cfg,
                                  bool lowering = false) {
  const int d = cfg.dim;
  if (phi.size() != d)
    throw ValidationError("commutator_residual: phi dimension mismatch");
  if (std::abs(phi.norm() - 1.0) > 1e-12)
    throw ValidationError("commutator_residual: phi must be normalized");
  for (int i = d / 2; i < d; ++i)
    if (std::abs(phi[i]) > 1e-14)
      throw ValidationError("commutator_residual: phi must be supported on indices < dim/2");

  const Eigen::MatrixXd G = function_matrix(g, d, cfg);
  const Eigen::MatrixXd Gp = function_matrix(g_prime, d, cfg);
  const LadderOperators ops(d);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  Eigen::MatrixXd comm;
  if (!lowering)
    comm = G * ops.a_dagger - ops.a_dagger * G - inv_sqrt2 * Gp;
  else
    comm = G * ops.a - ops.a * G + inv_sqrt2 * Gp;
  return (comm.cast<cplx>() * phi).norm();
}

}  // namespace homodyne

#endif  // HOMODYNE_FOCK_HPP
