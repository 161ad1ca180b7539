#pragma once

// Hilbert spaces of quantization: monomial section bases, Gram matrices,
// orthonormalization and the QuantModel every state module consumes.

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cstate/error.hpp"
#include "cstate/quadrature.hpp"

namespace cstate {

using SectionVec = Eigen::VectorXcd;
using Rng = std::mt19937_64;

struct MultiIndex {
  std::vector<int> exponents;

  int degree() const {
    int p = 0;
    for (int e : exponents) p += e;
    return p;
  }
  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
  friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;
};

/// All multi-indices in n variables of degree <= k, lexicographically ordered.
inline std::vector<MultiIndex> monomial_basis(int n, int k) {
  if (n < 1) throw Error(ErrorCode::invalid_argument, "monomial basis needs n >= 1");
  if (k < 0) throw Error(ErrorCode::invalid_argument, "bundle power must be >= 0");
  std::vector<MultiIndex> out;
  std::vector<int> e(n, 0);
  std::function<void(int, int)> rec = [&](int pos, int left) {
    if (pos == n) {
      out.push_back({e});
      return;
    }
    for (int a = 0; a <= left; ++a) {
      e[pos] = a;
      rec(pos + 1, left - a);
    }
    e[pos] = 0;
  };
  rec(0, k);
  std::sort(out.begin(), out.end());
  return out;
}

inline CVector eval_monomials(const std::vector<MultiIndex>& basis, const ChartPoint& z) {
  CVector v(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t a = 0; a < basis.size(); ++a) {
    cplx m = 1.0;
    for (std::size_t i = 0; i < basis[a].exponents.size(); ++i)
      for (int p = 0; p < basis[a].exponents[i]; ++p) m *= z(static_cast<Eigen::Index>(i));
    v(static_cast<Eigen::Index>(a)) = m;
  }
  return v;
}

/// A quantization instance. Immutable once built; share by const reference.
///
/// Points are expressed in the model's chart coordinates (for pullback models,
/// the ambient image coordinates). The orthonormal basis is
/// psi_j = sum_a raw_a * ortho(a, j). All "|psi(mu)|^2" quantities are
/// |trivialized value|^2 * weight(mu).
struct QuantModel {
  std::string name;
  DomainTag domain;
  int point_dim = 1;
  int chart_n = 0;  // ambient CP^n dimension, 0 when not a CP^n chart model
  int level = 0;    // bundle power k, 0 when not applicable
  std::vector<MultiIndex> monomials;

  std::function<CVector(const ChartPoint&)> raw_eval;
  std::function<double(const ChartPoint&)> weight;
  std::function<bool(const ChartPoint&)> in_domain;
  /// Lebesgue density of the rule measure; empty when the model has none.
  std::function<double(const ChartPoint&)> density;
  std::function<ChartPoint(Rng&)> sampler;
  std::function<std::vector<ChartPoint>(std::size_t, Rng&)> probes;

  QuadratureRule rule;
  CMatrix ortho;
  /// Base section s0 in orthonormal coordinates (default psi_0).
  SectionVec s0;
  std::size_t s0_index = 0;

  Eigen::Index dim() const { return ortho.cols(); }
  Eigen::Index raw_dim() const { return ortho.rows(); }
};

struct BasisValues {
  CVector values;  // trivialized psi_i(point)
  double weight = 1.0;
};

namespace detail {

inline bool finite_point(const ChartPoint& p) {
  for (Eigen::Index i = 0; i < p.size(); ++i)
    if (!std::isfinite(p(i).real()) || !std::isfinite(p(i).imag())) return false;
  return true;
}

inline void check_point(const QuantModel& model, const ChartPoint& p) {
  if (p.size() != model.point_dim)
    throw Error(ErrorCode::dimension_mismatch, "point has wrong number of coordinates");
  if (!finite_point(p) || (model.in_domain && !model.in_domain(p)))
    throw Error(ErrorCode::out_of_domain, "point lies outside the model domain");
}

}  // namespace detail

/// G_ab = sum_nodes w conj(f_a) f_b h, exactly Hermitian.
inline CMatrix gram_matrix(const std::function<CVector(const ChartPoint&)>& raw_eval,
                           const std::function<double(const ChartPoint&)>& weight,
                           const QuadratureRule& rule) {
  if (rule.size() == 0) throw Error(ErrorCode::invalid_argument, "empty quadrature rule");
  const CVector first = raw_eval(rule.nodes[0]);
  const Eigen::Index m = first.size();
  std::vector<detail::CompensatedSum> acc(static_cast<std::size_t>(m * m));
  for (std::size_t s = 0; s < rule.size(); ++s) {
    const CVector v = s == 0 ? first : raw_eval(rule.nodes[s]);
    const double h = weight(rule.nodes[s]);
    for (Eigen::Index a = 0; a < m; ++a) {
      if (!std::isfinite(v(a).real()) || !std::isfinite(v(a).imag()) || !std::isfinite(h))
        throw Error(ErrorCode::numerical_failure, "basis value not finite at node " + std::to_string(s), s);
    }
    const double wh = rule.weights[s] * h;
    for (Eigen::Index a = 0; a < m; ++a)
      for (Eigen::Index b = a; b < m; ++b)
        acc[static_cast<std::size_t>(a * m + b)].add(wh * std::conj(v(a)) * v(b));
  }
  CMatrix G(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = a; b < m; ++b) {
      const cplx g = acc[static_cast<std::size_t>(a * m + b)].value();
      G(a, b) = g;
      G(b, a) = std::conj(g);
    }
    G(a, a) = G(a, a).real();
  }
  return G;
}

inline CMatrix gram_matrix(const QuantModel& model) {
  return gram_matrix(model.raw_eval, model.weight, model.rule);
}

/// Inverse Cholesky factor: T = L^{-H} with G = L L^H, so T^H G T = I.
inline CMatrix orthonormalize(const CMatrix& G, double rel_pivot_tol = 1e-12) {
  const Eigen::Index m = G.rows();
  if (G.cols() != m) throw Error(ErrorCode::dimension_mismatch, "Gram matrix must be square");
  CMatrix L = CMatrix::Zero(m, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    cplx d = G(j, j);
    for (Eigen::Index p = 0; p < j; ++p) d -= L(j, p) * std::conj(L(j, p));
    const double scale = std::abs(G(j, j));
    if (!(d.real() > rel_pivot_tol * scale) || scale == 0.0)
      throw Error(ErrorCode::degenerate_basis, "Cholesky pivot vanishes at index " + std::to_string(j),
                  static_cast<std::size_t>(j));
    L(j, j) = std::sqrt(d.real());
    for (Eigen::Index i = j + 1; i < m; ++i) {
      cplx s = G(i, j);
      for (Eigen::Index p = 0; p < j; ++p) s -= L(i, p) * std::conj(L(j, p));
      L(i, j) = s / L(j, j);
    }
  }
  const CMatrix I = CMatrix::Identity(m, m);
  return L.adjoint().triangularView<Eigen::Upper>().solve(I);
}

struct SubspaceTransform {
  CMatrix ortho;                    // raw_dim x rank
  std::vector<Eigen::Index> kept;   // raw indices that contributed a new direction
  std::vector<Eigen::Index> discarded;
};

/// Gram-Schmidt in the G-metric, in raw index order, dropping directions whose
/// residual norm^2 falls below rel_tol times their raw norm^2. Agrees with
/// orthonormalize() when G is positive definite.
inline SubspaceTransform orthonormalize_subspace(const CMatrix& G, double rel_tol = 1e-10) {
  const Eigen::Index m = G.rows();
  SubspaceTransform out;
  std::vector<CVector> cols;
  for (Eigen::Index a = 0; a < m; ++a) {
    CVector v = CVector::Zero(m);
    v(a) = 1.0;
    const double raw_norm2 = G(a, a).real();
    for (int pass = 0; pass < 2; ++pass) {
      for (const CVector& q : cols) {
        const cplx proj = (q.adjoint() * G * v)(0);
        v -= proj * q;
      }
    }
    const double n2 = (v.adjoint() * G * v)(0).real();
    if (raw_norm2 <= 0.0 || !(n2 > rel_tol * raw_norm2)) {
      out.discarded.push_back(a);
      continue;
    }
    cols.push_back(v / std::sqrt(n2));
    out.kept.push_back(a);
  }
  out.ortho.resize(m, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) out.ortho.col(static_cast<Eigen::Index>(j)) = cols[j];
  return out;
}

inline BasisValues eval_basis(const QuantModel& model, const ChartPoint& p) {
  detail::check_point(model, p);
  BasisValues out;
  out.values = model.ortho.transpose() * model.raw_eval(p);
  out.weight = model.weight(p);
  return out;
}

/// Trivialized value of s0 at the point.
inline cplx base_section_value(const QuantModel& model, const BasisValues& bv) {
  return (model.s0.transpose() * bv.values)(0);
}

/// Section value in the unitary frame, |value|^2 = |phi(p)|^2 h(p).
inline cplx evaluate(const QuantModel& model, const SectionVec& s, const ChartPoint& p) {
  const BasisValues bv = eval_basis(model, p);
  if (s.size() != bv.values.size())
    throw Error(ErrorCode::dimension_mismatch, "section has wrong dimension");
  return (s.transpose() * bv.values)(0) * std::sqrt(bv.weight);
}

inline cplx inner_product(const SectionVec& s1, const SectionVec& s2) {
  if (s1.size() != s2.size()) throw Error(ErrorCode::dimension_mismatch, "sections differ in dimension");
  return s1.dot(s2);  // conjugates the first argument
}

/// <s1, s2> by quadrature of conj(s1) s2 h dV.
inline cplx quadrature_inner_product(const QuantModel& model, const SectionVec& s1, const SectionVec& s2) {
  if (s1.size() != model.dim() || s2.size() != model.dim())
    throw Error(ErrorCode::dimension_mismatch, "sections differ from model dimension");
  return integrate(model.rule, [&](const ChartPoint& p) {
    const CVector v = model.ortho.transpose() * model.raw_eval(p);
    const cplx a = (s1.transpose() * v)(0);
    const cplx b = (s2.transpose() * v)(0);
    return std::conj(a) * b * model.weight(p);
  });
}

/// Gram of the orthonormal basis under the model rule.
inline CMatrix orthonormal_gram(const QuantModel& model) {
  const CMatrix G = gram_matrix(model);
  return model.ortho.adjoint() * G * model.ortho;
}

inline double orthonormality_deviation(const QuantModel& model) {
  const CMatrix R = orthonormal_gram(model);
  return (R - CMatrix::Identity(R.rows(), R.cols())).cwiseAbs().maxCoeff();
}

inline SectionVec random_unit_section(Eigen::Index m, Rng& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  SectionVec s(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double re = nd(rng);
    const double im = nd(rng);
    s(i) = {re, im};
  }
  return s / s.norm();
}

inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

/// Replace the base section s0 (orthonormal coordinates); must be nonzero.
inline QuantModel with_base_section(QuantModel model, const SectionVec& s0) {
  if (s0.size() != model.dim()) throw Error(ErrorCode::dimension_mismatch, "base section dimension");
  if (s0.norm() == 0.0) throw Error(ErrorCode::invalid_argument, "base section must be nonzero");
  model.s0 = s0;
  return model;
}

struct ChartOrders {
  int radial = 64;
  int angular = 0;  // 0 selects 2k + 2
};

/// Monomial model of H^k over the CP^n chart (n in {1, 2}), orthonormalized
/// numerically from its Gram matrix.
inline QuantModel cpn_model(int n, int k, ChartOrders orders = {}) {
  if (k < 0) throw Error(ErrorCode::invalid_argument, "bundle power must be >= 0");
  const int angular = orders.angular > 0 ? orders.angular : 2 * k + 2;
  QuantModel m;
  m.name = "cpn(n=" + std::to_string(n) + ",k=" + std::to_string(k) + ")";
  m.rule = cpn_chart_rule(n, orders.radial, angular);
  m.domain = m.rule.domain;
  m.point_dim = n;
  m.chart_n = n;
  m.level = k;
  m.monomials = monomial_basis(n, k);
  const auto basis = m.monomials;
  m.raw_eval = [basis](const ChartPoint& z) { return eval_monomials(basis, z); };
  m.weight = [k](const ChartPoint& z) { return std::pow(1.0 + z.squaredNorm(), -static_cast<double>(k)); };
  m.in_domain = [](const ChartPoint& z) { return detail::finite_point(z); };
  m.density = [n](const ChartPoint& z) {
    const double pin = n == 1 ? std::numbers::pi : std::numbers::pi * std::numbers::pi;
    const double fact = n == 1 ? 1.0 : 2.0;
    return fact / (pin * std::pow(1.0 + z.squaredNorm(), n + 1));
  };
  m.sampler = [n](Rng& rng) {
    std::normal_distribution<double> nd(0.0, 1.0);
    ChartPoint z(n);
    for (int i = 0; i < n; ++i) {
      const double re = nd(rng);
      const double im = nd(rng);
      z(i) = {re, im};
    }
    return z;
  };
  // Equally spaced angles on the unit circle (n = 1) or a grid on the unit torus (n = 2).
  m.probes = [n](std::size_t count, Rng& rng) {
    std::vector<ChartPoint> out;
    const double offset = 2.0 * std::numbers::pi * uniform01(rng);
    if (n == 1) {
      for (std::size_t s = 0; s < count; ++s)
        out.push_back(detail::point1(std::polar(1.0, offset + 2.0 * std::numbers::pi * s / count)));
      return out;
    }
    const auto side = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(count))));
    for (std::size_t a = 0; a < side; ++a)
      for (std::size_t b = 0; b < side; ++b) {
        ChartPoint z(2);
        z(0) = std::polar(1.0, offset + 2.0 * std::numbers::pi * a / side);
        z(1) = std::polar(1.0, 0.5 * offset + 2.0 * std::numbers::pi * b / side);
        out.push_back(z);
      }
    return out;
  };
  m.ortho = orthonormalize(gram_matrix(m));
  m.s0 = SectionVec::Zero(m.ortho.cols());
  m.s0(0) = 1.0;
  return m;
}

/// Constants sqrt((k+1) C(k,a)) the CP^1 orthonormalization should reproduce.
inline std::vector<double> cp1_orthonormal_constants(int k) {
  std::vector<double> c(k + 1);
  double binom = 1.0;
  for (int a = 0; a <= k; ++a) {
    c[a] = std::sqrt((k + 1) * binom);
    binom = binom * (k - a) / (a + 1);
  }
  return c;
}

}  // namespace cstate
