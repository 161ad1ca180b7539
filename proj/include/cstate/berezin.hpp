#pragma once

// CP^n-symbols of operators, lifts from totally real submanifolds, the star
// product through operator composition, and the correspondence study.

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cstate/checks.hpp"
#include "cstate/coherent.hpp"
#include "cstate/error.hpp"
#include "cstate/hilbert.hpp"
#include "cstate/pullback.hpp"
#include "cstate/repn.hpp"

namespace cstate {

using OperatorMat = CMatrix;

inline constexpr double kSymbolDenominatorTol = 1e-12;

/// (c_p^H A c_q) / (c_p^H c_q) with c the coherent-state coefficient vectors.
inline cplx cpn_symbol(const QuantModel& model, const OperatorMat& A, const ChartPoint& p, const ChartPoint& q) {
  if (A.rows() != model.dim() || A.cols() != model.dim())
    throw Error(ErrorCode::dimension_mismatch, "operator does not match model dimension");
  const SectionVec cp = coherent_state(model, p).coeffs;
  const SectionVec cq = coherent_state(model, q).coeffs;
  const cplx den = cp.dot(cq);
  if (std::abs(den) < kSymbolDenominatorTol) throw Error(ErrorCode::antipodal_pair, "coherent states are orthogonal");
  return cp.dot(A * cq) / den;
}

inline cplx cpn_symbol(const QuantModel& model, const OperatorMat& A, const ChartPoint& p) {
  return cpn_symbol(model, A, p, p);
}

inline cplx star_symbol(const QuantModel& model, const OperatorMat& A1, const OperatorMat& A2, const ChartPoint& p) {
  return cpn_symbol(model, A1 * A2, p, p);
}

/// Catalog submanifold with its sample nodes; total reality is asserted, not checked.
struct TotallyRealSub {
  Embedding embedding;
  std::string label;
};

inline TotallyRealSub circle_sub(std::size_t nodes) { return {circle_embedding(nodes), "circle"}; }
inline TotallyRealSub torus_sub(std::size_t nodes_per_axis) { return {torus_embedding(2, nodes_per_axis), "torus(2)"}; }

/// Restriction of the ambient model to the sub: the pullback model over the
/// same nodes, and the change of basis C with psi~_j = sum_i psi_i C_ij, where
/// psi~_j are the ambient sections pulling back to the orthonormal basis of the sub.
struct Restriction {
  PullbackModel pullback;
  CMatrix C;
};

inline Restriction restriction(const TotallyRealSub& sub, const QuantModel& ambient) {
  detail::check_cpn_model(ambient);
  if (sub.embedding.target_n != ambient.chart_n)
    throw Error(ErrorCode::dimension_mismatch, "submanifold lives in a different chart");
  Restriction r{make_pullback_model(sub.embedding, ambient.level), {}};
  if (r.pullback.model.dim() != ambient.dim())
    throw Error(ErrorCode::not_determining_set, "restriction to the sub loses directions");
  r.C = to_orthonormal(ambient, r.pullback.model.ortho);
  return r;
}

/// E_sj = psi~_j(eps(p_s)) / sqrt(S) in the unitary frame.
inline CMatrix evaluation_matrix(const Restriction& r) {
  const QuantModel& m = r.pullback.model;
  const auto S = static_cast<Eigen::Index>(m.rule.size());
  CMatrix E(S, m.dim());
  for (Eigen::Index s = 0; s < S; ++s) {
    const ChartPoint& p = m.rule.nodes[static_cast<std::size_t>(s)];
    E.row(s) = (m.ortho.transpose() * m.raw_eval(p)).transpose() * std::sqrt(m.weight(p) / static_cast<double>(S));
  }
  return E;
}

/// Samples Y_sj = (A psi~_j)(eps(p_s)) for an ambient operator A.
inline CMatrix sample_action(const Restriction& r, const OperatorMat& A) {
  return evaluation_matrix(r) * r.C.inverse() * A * r.C;
}

struct LiftResult {
  OperatorMat op;           // in the ambient orthonormal basis
  double sigma_min = 0.0;   // of the evaluation matrix
  double sigma_max = 0.0;
};

inline LiftResult lift_recovery(const Restriction& r, const CMatrix& samples, double tol = 1e-8) {
  const CMatrix E = evaluation_matrix(r);
  if (samples.rows() != E.rows() || samples.cols() != E.cols())
    throw Error(ErrorCode::dimension_mismatch, "samples do not match the determining set");
  if (E.rows() < E.cols()) throw Error(ErrorCode::not_determining_set, "fewer nodes than basis sections");
  Eigen::JacobiSVD<CMatrix> svd(E, Eigen::ComputeThinU | Eigen::ComputeThinV);
  LiftResult out;
  out.sigma_max = svd.singularValues()(0);
  out.sigma_min = svd.singularValues()(svd.singularValues().size() - 1);
  if (!(out.sigma_min > tol)) throw Error(ErrorCode::not_determining_set, "evaluation matrix is rank deficient");
  const CMatrix Atilde = svd.solve(samples);
  out.op = r.C * Atilde * r.C.inverse();
  return out;
}

/// Real-valued smooth function on the chart with optional closed-form Wirtinger
/// derivatives.
struct SymbolFunction {
  std::function<cplx(const ChartPoint&)> f;
  std::function<CVector(const ChartPoint&)> dz;
  std::function<CVector(const ChartPoint&)> dzbar;
};

namespace detail {

inline constexpr double kFdStep = 1e-5;

inline void wirtinger_fd(const std::function<cplx(const ChartPoint&)>& f, const ChartPoint& p, CVector& dz, CVector& dzb) {
  const Eigen::Index n = p.size();
  dz.resize(n);
  dzb.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    ChartPoint a = p, b = p, c = p, d = p;
    a(i) += kFdStep;
    b(i) -= kFdStep;
    c(i) += cplx(0.0, kFdStep);
    d(i) -= cplx(0.0, kFdStep);
    const cplx fx = (f(a) - f(b)) / (2.0 * kFdStep);
    const cplx fy = (f(c) - f(d)) / (2.0 * kFdStep);
    dz(i) = 0.5 * (fx - cplx(0.0, 1.0) * fy);
    dzb(i) = 0.5 * (fx + cplx(0.0, 1.0) * fy);
  }
}

inline void derivatives(const SymbolFunction& F, const ChartPoint& p, CVector& dz, CVector& dzb) {
  if (F.dz && F.dzbar) {
    dz = F.dz(p);
    dzb = F.dzbar(p);
  } else {
    wirtinger_fd(F.f, p, dz, dzb);
  }
  for (Eigen::Index i = 0; i < dz.size(); ++i)
    if (!std::isfinite(std::abs(dz(i))) || !std::isfinite(std::abs(dzb(i))))
      throw Error(ErrorCode::numerical_failure, "symbol derivative is not finite");
}

}  // namespace detail

/// Normalization of the bracket: {F,G} = kappa * sum Ginv_jl (dF/dz_l dG/dzbar_j - dF/dzbar_j dG/dz_l)
/// with Ginv the inverse Fubini-Study metric (1+|z|^2)(I + conj(z) z^T). kappa
/// is fixed by {h_x, h_y} = h_z for the level-one su(2) moment maps.
inline constexpr cplx kPoissonKappa{0.0, -1.0};

inline cplx poisson_fs(const SymbolFunction& F, const SymbolFunction& G, const ChartPoint& p) {
  CVector Fz, Fzb, Gz, Gzb;
  detail::derivatives(F, p, Fz, Fzb);
  detail::derivatives(G, p, Gz, Gzb);
  const Eigen::Index n = p.size();
  const double N = 1.0 + p.squaredNorm();
  cplx acc = 0.0;
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index l = 0; l < n; ++l) {
      const cplx ginv = N * ((j == l ? 1.0 : 0.0) + std::conj(p(j)) * p(l));
      acc += ginv * (Fz(l) * Gzb(j) - Fzb(j) * Gz(l));
    }
  return kPoissonKappa * acc;
}

/// Intensive moment map h_lambda = tau_lambda / k with closed-form derivatives.
inline SymbolFunction moment_symbol(const CMatrix& lambda) {
  KahlerChartData kd{static_cast<int>(lambda.rows()) - 1, 1};
  return {[kd, lambda](const ChartPoint& z) { return cplx(kd.moment(lambda, z)); },
          [kd, lambda](const ChartPoint& z) { return kd.moment_dz(lambda, z); },
          [kd, lambda](const ChartPoint& z) { return kd.moment_dzbar(lambda, z); }};
}

inline SymbolFunction product_symbol(const SymbolFunction& A, const SymbolFunction& B) {
  return {[A, B](const ChartPoint& z) { return A.f(z) * B.f(z); },
          [A, B](const ChartPoint& z) { return CVector(A.dz(z) * B.f(z) + B.dz(z) * A.f(z)); },
          [A, B](const ChartPoint& z) { return CVector(A.dzbar(z) * B.f(z) + B.dzbar(z) * A.f(z)); }};
}

/// kappa measured at p: h_z(p) / B(h_x, h_y)(p) with the unnormalized bracket.
inline cplx fs_poisson_calibration(const ChartPoint& p) {
  const auto b = su2_basis();
  const cplx raw = poisson_fs(moment_symbol(b[0].lambda), moment_symbol(b[1].lambda), p) / kPoissonKappa;
  return moment_symbol(b[2].lambda).f(p) / raw;
}

/// A catalog pair: intensive operators with their classical symbols.
struct CatalogPair {
  std::string name;
  std::function<OperatorMat(const QuantModel&)> op1, op2;
  SymbolFunction sym1, sym2;
};

/// "xy": (tau_x/k, tau_y/k). "x2y": ((tau_x/k)^2, tau_y/k). "xx": (tau_x/k, tau_x/k).
inline CatalogPair catalog_pair(const std::string& name) {
  const auto b = su2_basis();
  auto lin = [](CMatrix lambda) {
    return [lambda](const QuantModel& m) { return OperatorMat(prequantum_op(m, lambda) / static_cast<double>(m.level)); };
  };
  const SymbolFunction hx = moment_symbol(b[0].lambda), hy = moment_symbol(b[1].lambda);
  if (name == "xy") return {name, lin(b[0].lambda), lin(b[1].lambda), hx, hy};
  if (name == "xx") return {name, lin(b[0].lambda), lin(b[0].lambda), hx, hx};
  if (name == "x2y") {
    auto sq = [lx = lin(b[0].lambda)](const QuantModel& m) {
      const OperatorMat X = lx(m);
      return OperatorMat(X * X);
    };
    return {name, sq, lin(b[1].lambda), product_symbol(hx, hx), hy};
  }
  throw Error(ErrorCode::invalid_config, "unknown catalog pair '" + name + "'");
}

/// Rows (k, |a1*a2 - A1 A2|, |k (a1*a2 - a2*a1) - target|) at the point p, where
/// target = -i {A1, A2}. The sign makes the Dirac rule match the represented
/// commutators [tau_i, tau_j] = -i tau_[i,j] under the calibrated bracket.
inline Table correspondence_table(const CatalogPair& pair, const ChartPoint& p, const std::vector<int>& k_list) {
  Table t;
  t.name = "correspondence-" + pair.name;
  t.columns = {"k", "star_minus_pointwise", "commutator_minus_bracket"};
  const cplx pointwise = pair.sym1.f(p) * pair.sym2.f(p);
  const cplx target = cplx(0.0, -1.0) * poisson_fs(pair.sym1, pair.sym2, p);
  for (int k : k_list) {
    if (k < 1) throw Error(ErrorCode::invalid_argument, "k must be >= 1");
    const QuantModel model = cpn_model(1, k, {std::max(64, k + 2), 0});
    const OperatorMat A1 = pair.op1(model), A2 = pair.op2(model);
    const cplx s12 = star_symbol(model, A1, A2, p);
    const cplx s21 = star_symbol(model, A2, A1, p);
    t.rows.push_back({static_cast<double>(k), std::abs(s12 - pointwise),
                      std::abs(static_cast<double>(k) * (s12 - s21) - target)});
  }
  return t;
}

struct CorrespondenceVerdict {
  bool col1_decreasing = true;
  bool col2_decreasing = true;
  double min_ratio = 0.0;  // of the commutator column
  double max_ratio = 0.0;
  bool ratio_in_window = true;
};

inline CorrespondenceVerdict assess_correspondence(const Table& t, double lo = 0.3, double hi = 0.8) {
  CorrespondenceVerdict v;
  v.min_ratio = std::numeric_limits<double>::infinity();
  v.max_ratio = -std::numeric_limits<double>::infinity();
  for (std::size_t r = 1; r < t.rows.size(); ++r) {
    if (!(t.rows[r][1] < t.rows[r - 1][1])) v.col1_decreasing = false;
    if (!(t.rows[r][2] < t.rows[r - 1][2])) v.col2_decreasing = false;
    const double ratio = t.rows[r][2] / t.rows[r - 1][2];
    v.min_ratio = std::min(v.min_ratio, ratio);
    v.max_ratio = std::max(v.max_ratio, ratio);
    if (!(ratio >= lo && ratio <= hi)) v.ratio_in_window = false;
  }
  return v;
}

struct BerezinConfig {
  std::uint64_t seed = 20240611;
  std::vector<int> k_list{8, 16, 32, 64};
  std::string pair = "xy";
  ChartPoint point = detail::point1({0.3, 0.1});
  int lift_k = 2;
  double coeff_tol = 1e-10;
  double lift_tol = 1e-8;
  double ratio_lo = 0.3;
  double ratio_hi = 0.8;
};

inline SuiteResult verify_berezin(const BerezinConfig& cfg = {}) {
  SuiteResult out;
  out.suite = "berezin";
  out.model = "cpn(n=1)";
  Rng rng(cfg.seed);

  // Symbol identities on a fixed-level model.
  const QuantModel model = cpn_model(1, cfg.lift_k);
  const Eigen::Index m = model.dim();
  auto random_op = [&]() {
    CMatrix A(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < m; ++j) A(i, j) = random_unit_section(2, rng)(0);
    return A;
  };
  double ident = 0.0, linear = 0.0, assoc = 0.0;
  const OperatorMat A = random_op(), B = random_op(), C = random_op();
  const cplx alpha(0.7, -1.3);
  for (int s = 0; s < 20; ++s) {
    const ChartPoint p = detail::point1(std::polar(1.0, 2.0 * std::numbers::pi * uniform01(rng)));
    const ChartPoint q = detail::point1(std::polar(1.0, 2.0 * std::numbers::pi * uniform01(rng)));
    cplx sI;
    try {
      sI = cpn_symbol(model, CMatrix::Identity(m, m), p, q);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::antipodal_pair) continue;
      throw;
    }
    ident = std::max(ident, std::abs(sI - 1.0));
    const cplx lhs = cpn_symbol(model, alpha * A + B, p, q);
    linear = std::max(linear, std::abs(lhs - alpha * cpn_symbol(model, A, p, q) - cpn_symbol(model, B, p, q)));
    const cplx s1 = cpn_symbol(model, (A * B) * C, p);
    const cplx s2 = cpn_symbol(model, A * (B * C), p);
    assoc = std::max(assoc, std::abs(s1 - s2) / (1.0 + std::abs(s1)));
  }
  out.checks.push_back(upper_check("symbol-identity", ident, cfg.coeff_tol));
  out.checks.push_back(upper_check("symbol-linearity", linear, cfg.coeff_tol));
  out.checks.push_back(upper_check("star-associativity", assoc, cfg.coeff_tol));

  // Lift uniqueness on the circle with S = m nodes.
  const Restriction r = restriction(circle_sub(static_cast<std::size_t>(m)), model);
  const LiftResult lift = lift_recovery(r, sample_action(r, A), cfg.lift_tol);
  out.checks.push_back(upper_check("lift-round-trip", (lift.op - A).cwiseAbs().maxCoeff(), cfg.lift_tol));
  out.checks.push_back(lower_check("determining-set-sigma-min", lift.sigma_min, cfg.lift_tol));
  out.diagnostics.push_back({"determining-set-condition", lift.sigma_max / lift.sigma_min});

  // Bracket calibration at random points.
  double calib = 0.0;
  for (int s = 0; s < 20; ++s) {
    const ChartPoint z = detail::point1({std::normal_distribution<double>()(rng), std::normal_distribution<double>()(rng)});
    calib = std::max(calib, std::abs(fs_poisson_calibration(z) - kPoissonKappa));
  }
  out.checks.push_back(upper_check("poisson-calibration", calib, 1e-10));

  const CatalogPair pair = catalog_pair(cfg.pair);
  Table t = correspondence_table(pair, cfg.point, cfg.k_list);
  const CorrespondenceVerdict v = assess_correspondence(t, cfg.ratio_lo, cfg.ratio_hi);
  out.checks.push_back(upper_check("correspondence-star-decreasing", v.col1_decreasing ? 0.0 : 1.0, 0.0));
  out.checks.push_back(upper_check("correspondence-commutator-decreasing", v.col2_decreasing ? 0.0 : 1.0, 0.0));
  out.checks.push_back(upper_check("correspondence-ratio-window", v.ratio_in_window ? 0.0 : 1.0, 0.0));
  out.diagnostics.push_back({"correspondence-ratio-min", v.min_ratio});
  out.diagnostics.push_back({"correspondence-ratio-max", v.max_ratio});
  out.tables.push_back(std::move(t));
  return out;
}

}  // namespace cstate
