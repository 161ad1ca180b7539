#pragma once

// Deterministic product quadrature over the domains the quantization models
// integrate on: the affine chart of CP^1 / CP^2 with the normalized
// Fubini-Study volume, the weighted hyperbolic disk, circles and tori.

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cstate/error.hpp"

namespace cstate {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
/// Inhomogeneous chart coordinates (mu_1, ..., mu_n).
using ChartPoint = Eigen::VectorXcd;

enum class DomainKind { cpn_chart, disk, circle, torus, user };

struct DomainTag {
  DomainKind kind = DomainKind::cpn_chart;
  int dim = 1;  // n for a CP^n chart, d for a d-torus, 1 otherwise

  std::string label() const {
    switch (kind) {
      case DomainKind::cpn_chart: return "cpn-chart(" + std::to_string(dim) + ")";
      case DomainKind::disk: return "disk";
      case DomainKind::circle: return "circle";
      case DomainKind::torus: return "torus(" + std::to_string(dim) + ")";
      case DomainKind::user: return "user";
    }
    return "unknown";
  }
};

/// Nodes and positive weights. `params` holds the real parameter coordinates
/// of each node (angles for circle/torus rules, empty for chart rules).
struct QuadratureRule {
  std::vector<ChartPoint> nodes;
  std::vector<double> weights;
  std::vector<std::vector<double>> params;
  DomainTag domain;

  std::size_t size() const { return nodes.size(); }

  double total_mass() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
  }
};

/// Gauss rule for  int_0^1 f(t) (1-t)^alpha dt,  alpha > -1.
struct UnitGaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

namespace detail {

// Neumaier summation, applied to real and imaginary parts separately.
class CompensatedSum {
 public:
  void add(cplx v) {
    add_real(re_, re_c_, v.real());
    add_real(im_, im_c_, v.imag());
  }
  cplx value() const { return {re_ + re_c_, im_ + im_c_}; }

 private:
  static void add_real(double& sum, double& c, double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      c += (sum - t) + x;
    else
      c += (x - t) + sum;
    sum = t;
  }
  double re_ = 0.0, re_c_ = 0.0, im_ = 0.0, im_c_ = 0.0;
};

inline ChartPoint point1(cplx z) {
  ChartPoint p(1);
  p(0) = z;
  return p;
}

}  // namespace detail

/// Golub-Welsch on the monic Jacobi recurrence for (1-x)^alpha on [-1,1],
/// mapped to [0,1]. Weights are normalized to the exact moment 1/(alpha+1).
inline UnitGaussRule gauss_jacobi_unit(int order, double alpha) {
  if (order < 1) throw Error(ErrorCode::invalid_argument, "gauss order must be >= 1");
  if (!(alpha > -1.0)) throw Error(ErrorCode::invalid_argument, "jacobi exponent must exceed -1");
  const double a = alpha, b = 0.0;
  Eigen::VectorXd diag(order);
  Eigen::VectorXd sub(order > 1 ? order - 1 : 1);
  for (int n = 0; n < order; ++n) {
    const double s = 2.0 * n + a + b;
    if (n == 0)
      diag(n) = (b - a) / (a + b + 2.0);
    else
      diag(n) = (b * b - a * a) / (s * (s + 2.0));
  }
  for (int n = 1; n < order; ++n) {
    const double s = 2.0 * n + a + b;
    double bn;
    if (n == 1)
      bn = 4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + a + b) * (2.0 + a + b) * (3.0 + a + b));
    else
      bn = 4.0 * n * (n + a) * (n + b) * (n + a + b) / (s * s * (s + 1.0) * (s - 1.0));
    sub(n - 1) = std::sqrt(bn);
  }
  UnitGaussRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  if (order == 1) {
    rule.nodes[0] = 0.5 * (1.0 + diag(0));
    rule.weights[0] = 1.0 / (alpha + 1.0);
    return rule;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success)
    throw Error(ErrorCode::numerical_failure, "tridiagonal eigensolver failed");
  const double mass = 1.0 / (alpha + 1.0);
  double wsum = 0.0;
  for (int i = 0; i < order; ++i) {
    const double v0 = solver.eigenvectors()(0, i);
    rule.nodes[i] = 0.5 * (1.0 + solver.eigenvalues()(i));
    rule.weights[i] = v0 * v0;
    wsum += rule.weights[i];
  }
  for (double& w : rule.weights) w *= mass / wsum;
  return rule;
}

/// m equally spaced angles 2*pi*j/m with unit total mass. Exact for e^{ij theta}, |j| < m.
inline QuadratureRule circle_rule(std::size_t m) {
  if (m == 0) throw Error(ErrorCode::invalid_argument, "circle rule needs m >= 1");
  QuadratureRule rule;
  rule.domain = {DomainKind::circle, 1};
  for (std::size_t j = 0; j < m; ++j) {
    const double theta = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(m);
    rule.nodes.push_back(detail::point1(std::polar(1.0, theta)));
    rule.weights.push_back(1.0 / static_cast<double>(m));
    rule.params.push_back({theta});
  }
  return rule;
}

/// Product of d circle rules; node coordinates are (e^{i theta_1}, ..., e^{i theta_d}).
inline QuadratureRule torus_rule(int d, std::size_t m) {
  if (d < 1 || m == 0) throw Error(ErrorCode::invalid_argument, "torus rule needs d >= 1 and m >= 1");
  QuadratureRule rule;
  rule.domain = {DomainKind::torus, d};
  std::size_t total = 1;
  for (int i = 0; i < d; ++i) total *= m;
  for (std::size_t flat = 0; flat < total; ++flat) {
    ChartPoint p(d);
    std::vector<double> angles(d);
    std::size_t rem = flat;
    for (int i = d - 1; i >= 0; --i) {
      const std::size_t j = rem % m;
      rem /= m;
      angles[i] = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(m);
      p(i) = std::polar(1.0, angles[i]);
    }
    rule.nodes.push_back(p);
    rule.weights.push_back(1.0 / static_cast<double>(total));
    rule.params.push_back(angles);
  }
  return rule;
}

/// Chart rule for the normalized Fubini-Study volume on CP^n, n in {1, 2}.
///
/// n = 1: t = r^2/(1+r^2) turns dxdy/(pi(1+r^2)^2) into dt dtheta/(2 pi).
/// n = 2: the moment map sends the measure 2 d^4z/(pi^2 (1+|z|^2)^3) to the
/// uniform measure on the triangle; t1 = r1^2/(1+r1^2), t2 = r2^2/(1+r1^2+r2^2)
/// is a product parametrization with Jacobian 2(1-t2). Either way, Gram
/// integrands of degree <= k are polynomials in the t variables.
inline QuadratureRule cpn_chart_rule(int n, int radial_order, int angular_order) {
  if (n < 1) throw Error(ErrorCode::invalid_argument, "chart dimension must be >= 1");
  if (n > 2) throw Error(ErrorCode::unsupported_dimension, "chart rules exist for n <= 2 only");
  if (radial_order < 1 || angular_order < 1)
    throw Error(ErrorCode::invalid_argument, "quadrature orders must be >= 1");
  const UnitGaussRule g = gauss_jacobi_unit(radial_order, 0.0);
  const double two_pi = 2.0 * std::numbers::pi;
  QuadratureRule rule;
  rule.domain = {DomainKind::cpn_chart, n};
  const auto A = static_cast<std::size_t>(angular_order);
  if (n == 1) {
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      const double t = g.nodes[i];
      const double r = std::sqrt(t / (1.0 - t));
      for (std::size_t j = 0; j < A; ++j) {
        const double theta = two_pi * static_cast<double>(j) / static_cast<double>(A);
        rule.nodes.push_back(detail::point1(std::polar(r, theta)));
        rule.weights.push_back(g.weights[i] / static_cast<double>(A));
      }
    }
    return rule;
  }
  for (std::size_t i1 = 0; i1 < g.nodes.size(); ++i1) {
    const double t1 = g.nodes[i1];
    for (std::size_t i2 = 0; i2 < g.nodes.size(); ++i2) {
      const double t2 = g.nodes[i2];
      const double u1 = t1 / (1.0 - t1);
      const double u2 = t2 / ((1.0 - t2) * (1.0 - t1));
      const double w = 2.0 * (1.0 - t2) * g.weights[i1] * g.weights[i2];
      for (std::size_t j1 = 0; j1 < A; ++j1) {
        for (std::size_t j2 = 0; j2 < A; ++j2) {
          ChartPoint p(2);
          p(0) = std::polar(std::sqrt(u1), two_pi * static_cast<double>(j1) / static_cast<double>(A));
          p(1) = std::polar(std::sqrt(u2), two_pi * static_cast<double>(j2) / static_cast<double>(A));
          rule.nodes.push_back(p);
          rule.weights.push_back(w / static_cast<double>(A * A));
        }
      }
    }
  }
  return rule;
}

/// Rule for (1/hbar - 1) int_D f (1-|z|^2)^{1/hbar} dxdy / (pi (1-|z|^2)^2).
/// With t = |z|^2 the combined weight is (1/hbar - 1)(1-t)^{1/hbar - 2} dt dtheta/(2 pi);
/// the endpoint factor is handled by Gauss-Jacobi, so any real 1/hbar > 1 works.
inline QuadratureRule disk_rule(int radial_order, int angular_order, double hbar) {
  if (!(hbar > 0.0) || !(1.0 / hbar > 1.0))
    throw Error(ErrorCode::invalid_argument, "disk weight needs 1/hbar > 1");
  if (radial_order < 1 || angular_order < 1)
    throw Error(ErrorCode::invalid_argument, "quadrature orders must be >= 1");
  const double alpha = 1.0 / hbar - 2.0;
  const UnitGaussRule g = gauss_jacobi_unit(radial_order, alpha);
  const double pref = 1.0 / hbar - 1.0;
  const auto A = static_cast<std::size_t>(angular_order);
  QuadratureRule rule;
  rule.domain = {DomainKind::disk, 1};
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    const double r = std::sqrt(g.nodes[i]);
    for (std::size_t j = 0; j < A; ++j) {
      const double theta = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(A);
      rule.nodes.push_back(detail::point1(std::polar(r, theta)));
      rule.weights.push_back(pref * g.weights[i] / static_cast<double>(A));
    }
  }
  return rule;
}

/// sum_i w_i f(node_i) with compensated summation in node order.
template <class F>
cplx integrate(const QuadratureRule& rule, F&& f) {
  detail::CompensatedSum acc;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const cplx v = static_cast<cplx>(f(rule.nodes[i]));
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw Error(ErrorCode::numerical_failure, "integrand is not finite at node " + std::to_string(i), i);
    acc.add(rule.weights[i] * v);
  }
  return acc.value();
}

/// Same as integrate() but hands the integrand the real parameter coordinates.
template <class F>
cplx integrate_params(const QuadratureRule& rule, F&& f) {
  if (rule.params.size() != rule.size())
    throw Error(ErrorCode::invalid_argument, "rule carries no parameter coordinates");
  detail::CompensatedSum acc;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const cplx v = static_cast<cplx>(f(std::span<const double>(rule.params[i])));
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw Error(ErrorCode::numerical_failure, "integrand is not finite at node " + std::to_string(i), i);
    acc.add(rule.weights[i] * v);
  }
  return acc.value();
}

}  // namespace cstate
