#pragma once

// Rawnsley-type coherent states for any QuantModel and the quantitative
// check of their defining properties.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cstate/checks.hpp"
#include "cstate/error.hpp"
#include "cstate/hilbert.hpp"

namespace cstate {

/// Points where |s0|^2 h falls below this are treated as the zero set of s0.
inline constexpr double kBaseSectionThreshold = 1e-12;

struct CoherentState {
  ChartPoint base_point;
  SectionVec coeffs;
  double p_mu = 0.0;    // p^2 = sum |f_i|^2, f_i = psi_i / s0
  double chi_mu = 0.0;  // chi^2 = sum |psi_i|^2 h
  cplx tau_mu = 0.0;    // (s0/|s0|) chi
};

inline double chi_squared(const QuantModel& model, const ChartPoint& mu) {
  const BasisValues bv = eval_basis(model, mu);
  return bv.values.squaredNorm() * bv.weight;
}

inline bool off_base_zero_set(const QuantModel& model, const BasisValues& bv) {
  return std::norm(base_section_value(model, bv)) * bv.weight >= kBaseSectionThreshold;
}

inline CoherentState coherent_from_values(const QuantModel& model, const ChartPoint& mu,
                                          const BasisValues& bv) {
  const cplx s0v = base_section_value(model, bv);
  if (!(std::norm(s0v) * bv.weight >= kBaseSectionThreshold))
    throw Error(ErrorCode::base_section_zero, "base section vanishes at the requested point");
  const double vnorm = bv.values.norm();
  if (!(vnorm > 0.0)) throw Error(ErrorCode::numerical_failure, "basis vanishes simultaneously");
  const cplx phase = s0v / std::abs(s0v);
  CoherentState cs;
  cs.base_point = mu;
  cs.coeffs = phase * bv.values.conjugate() / vnorm;
  cs.p_mu = vnorm / std::abs(s0v);
  cs.chi_mu = vnorm * std::sqrt(bv.weight);
  cs.tau_mu = phase * cs.chi_mu;
  return cs;
}

inline CoherentState coherent_state(const QuantModel& model, const ChartPoint& mu) {
  return coherent_from_values(model, mu, eval_basis(model, mu));
}

/// The two computations of <phi_mu, phi>: g(mu)/p(mu) with g = phi/s0
/// trivialized, and the coefficient inner product.
struct OverlapPair {
  cplx formula;
  cplx direct;
  double deviation() const { return std::abs(formula - direct); }
};

inline OverlapPair overlap(const QuantModel& model, const ChartPoint& mu, const SectionVec& phi) {
  const BasisValues bv = eval_basis(model, mu);
  const CoherentState cs = coherent_from_values(model, mu, bv);
  if (phi.size() != bv.values.size()) throw Error(ErrorCode::dimension_mismatch, "section dimension");
  const cplx g = (phi.transpose() * bv.values)(0) / base_section_value(model, bv);
  return {g / cs.p_mu, inner_product(cs.coeffs, phi)};
}

struct CoherentConfig {
  std::size_t n_sections = 1000;
  std::size_t n_points = 100;
  std::uint64_t seed = 20240611;
  std::size_t n_probes = 0;  // 0 selects 2m
  double coeff_tol = 1e-10;
  double likelihood_tol = 1e-12;
  double kernel_tol = 1e-9;
  double quad_tol = 1e-6;
  double rank_tol = 1e-8;
};

/// Draw points from the model sampler, rejecting those near the zero set of s0
/// or failing `accept`.
inline std::vector<ChartPoint> sample_points(const QuantModel& model, std::size_t count, Rng& rng,
                                             const std::function<bool(const ChartPoint&)>& accept = {}) {
  if (!model.sampler) throw Error(ErrorCode::invalid_argument, "model has no sampler");
  std::vector<ChartPoint> out;
  std::size_t attempts = 0;
  while (out.size() < count) {
    if (++attempts > 1000 * (count + 1))
      throw Error(ErrorCode::numerical_failure, "sampler could not produce admissible points");
    ChartPoint p = model.sampler(rng);
    if (model.in_domain && !model.in_domain(p)) continue;
    if (accept && !accept(p)) continue;
    if (!off_base_zero_set(model, eval_basis(model, p))) continue;
    out.push_back(std::move(p));
  }
  return out;
}

namespace detail {

struct StatePoint {
  BasisValues bv;
  CoherentState cs;
};

inline StatePoint state_point(const QuantModel& model, const ChartPoint& p) {
  StatePoint sp{eval_basis(model, p), {}};
  sp.cs = coherent_from_values(model, p, sp.bv);
  return sp;
}

inline double smallest_singular_value(const CMatrix& A) {
  Eigen::JacobiSVD<CMatrix> svd(A);
  const auto& s = svd.singularValues();
  return s.size() == 0 ? 0.0 : s(s.size() - 1);
}

inline Eigen::Index numerical_rank(const CMatrix& A, double tol) {
  Eigen::JacobiSVD<CMatrix> svd(A);
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > tol) ++r;
  return r;
}

/// Checks that only involve states at a list of points: normalization, the
/// overlap formula, maximal likelihood and its equality case, dominance,
/// reproducing kernel, and overcompleteness on the probe set. Shared by the
/// coherent and squeezed suites, which differ only in the points they pass.
inline void pointwise_state_checks(const QuantModel& model, const std::vector<ChartPoint>& points,
                                   const std::vector<ChartPoint>& probes, const CoherentConfig& cfg,
                                   Rng& rng, SuiteResult& out) {
  const Eigen::Index m = model.dim();
  std::vector<StatePoint> sp;
  sp.reserve(points.size());
  for (const ChartPoint& p : points) sp.push_back(state_point(model, p));

  std::vector<SectionVec> sections;
  sections.reserve(cfg.n_sections);
  for (std::size_t s = 0; s < cfg.n_sections; ++s) sections.push_back(random_unit_section(m, rng));

  double norm_dev = 0.0, overlap_dev = 0.0, ml_violation = 0.0, ml_equality = 0.0;
  double dominance = 0.0, kernel_dev = 0.0;
  for (const StatePoint& a : sp) {
    norm_dev = std::max(norm_dev, std::abs(a.cs.coeffs.squaredNorm() - 1.0));
    const double chi2 = a.cs.chi_mu * a.cs.chi_mu;
    const double rw = std::sqrt(a.bv.weight);
    const cplx self_val = (a.cs.coeffs.transpose() * a.bv.values)(0) * rw;
    ml_equality = std::max(ml_equality, std::abs(std::norm(self_val) - chi2));
    const cplx s0v = base_section_value(model, a.bv);
    for (const SectionVec& phi : sections) {
      const cplx raw = (phi.transpose() * a.bv.values)(0);
      const cplx val = raw * rw;
      const cplx direct = a.cs.coeffs.dot(phi);
      const cplx formula = raw / s0v / a.cs.p_mu;
      overlap_dev = std::max(overlap_dev, std::abs(direct - formula));
      ml_violation = std::max(ml_violation, std::norm(val) - chi2);
      kernel_dev = std::max(kernel_dev, std::abs(direct - std::conj(self_val) * val / chi2));
    }
    const double own = std::norm(self_val);
    for (const StatePoint& b : sp) {
      const cplx other = (b.cs.coeffs.transpose() * a.bv.values)(0) * rw;
      dominance = std::max(dominance, std::norm(other) - own);
    }
  }
  out.checks.push_back(upper_check("normalization", norm_dev, cfg.coeff_tol));
  out.checks.push_back(upper_check("overlap-formula", overlap_dev, cfg.coeff_tol));
  out.checks.push_back(upper_check("maximal-likelihood", std::max(0.0, ml_violation), cfg.likelihood_tol));
  out.checks.push_back(upper_check("likelihood-equality", ml_equality, cfg.coeff_tol));
  out.checks.push_back(upper_check("dominance", std::max(0.0, dominance), cfg.likelihood_tol));
  out.checks.push_back(upper_check("reproducing-kernel", kernel_dev, cfg.kernel_tol));

  // A few unit norms by quadrature, as the independent oracle for coefficient norms.
  double quad_norm = 0.0;
  for (std::size_t i = 0; i < std::min<std::size_t>(3, sp.size()); ++i)
    quad_norm = std::max(quad_norm,
                         std::abs(quadrature_inner_product(model, sp[i].cs.coeffs, sp[i].cs.coeffs) - 1.0));
  out.diagnostics.push_back({"normalization-quadrature", quad_norm});

  CMatrix C(m, static_cast<Eigen::Index>(probes.size()));
  for (std::size_t s = 0; s < probes.size(); ++s)
    C.col(static_cast<Eigen::Index>(s)) = coherent_state(model, probes[s]).coeffs;
  out.checks.push_back(lower_check("overcompleteness", smallest_singular_value(C), cfg.rank_tol));
  out.diagnostics.push_back({"overcompleteness-rank", static_cast<double>(numerical_rank(C, cfg.rank_tol))});
  out.diagnostics.push_back({"overcompleteness-probes", static_cast<double>(probes.size())});
}

}  // namespace detail

/// Density c c^H chi^2 of the resolution-of-identity integrand. It does not
/// depend on the phase of s0, so near the zero set of s0 the continuous
/// extension conj(v) v^T h is used.
inline CMatrix resolution_density(const QuantModel& model, const BasisValues& bv) {
  if (off_base_zero_set(model, bv)) {
    const CoherentState cs = coherent_from_values(model, ChartPoint(), bv);
    return cs.coeffs * cs.coeffs.adjoint() * (cs.chi_mu * cs.chi_mu);
  }
  return bv.values.conjugate() * bv.values.transpose() * bv.weight;
}

/// R = int c(map(mu)) c(map(mu))^H chi^2(map(mu)) jac(mu) dV(mu) over the model
/// rule, skipping nodes whose image leaves the domain. With the identity map and
/// jac = 1 this is the resolution-of-identity matrix.
inline CMatrix resolution_matrix(const QuantModel& model,
                                 const std::function<std::optional<ChartPoint>(const ChartPoint&)>& map = {},
                                 const std::function<double(const ChartPoint&, const ChartPoint&)>& jac = {}) {
  const Eigen::Index m = model.dim();
  std::vector<detail::CompensatedSum> acc(static_cast<std::size_t>(m * m));
  for (std::size_t s = 0; s < model.rule.size(); ++s) {
    const ChartPoint& node = model.rule.nodes[s];
    ChartPoint target = node;
    if (map) {
      auto t = map(node);
      if (!t) continue;
      target = *t;
    }
    const double j = jac ? jac(node, target) : 1.0;
    const CMatrix D = resolution_density(model, eval_basis(model, target));
    const double w = model.rule.weights[s] * j;
    for (Eigen::Index a = 0; a < m; ++a)
      for (Eigen::Index b = 0; b < m; ++b) acc[static_cast<std::size_t>(a * m + b)].add(w * D(a, b));
  }
  CMatrix R(m, m);
  for (Eigen::Index a = 0; a < m; ++a)
    for (Eigen::Index b = 0; b < m; ++b) R(a, b) = acc[static_cast<std::size_t>(a * m + b)].value();
  return R;
}

inline double identity_deviation(const CMatrix& R) {
  return (R - CMatrix::Identity(R.rows(), R.cols())).cwiseAbs().maxCoeff();
}

/// Smallest max-entry deviation of R from c*I, with c = tr(R)/m.
inline double scalar_identity_deviation(const CMatrix& R) {
  const cplx c = R.trace() / static_cast<double>(R.rows());
  return (R - c * CMatrix::Identity(R.rows(), R.cols())).cwiseAbs().maxCoeff();
}

inline std::vector<ChartPoint> model_probes(const QuantModel& model, const CoherentConfig& cfg, Rng& rng) {
  const std::size_t count = cfg.n_probes > 0 ? cfg.n_probes : static_cast<std::size_t>(2 * model.dim());
  if (!model.probes) throw Error(ErrorCode::invalid_argument, "model has no probe set");
  return model.probes(count, rng);
}

inline SuiteResult verify_coherent(const QuantModel& model, const CoherentConfig& cfg = {}) {
  SuiteResult out;
  out.suite = "coherent";
  out.model = model.name;
  Rng rng(cfg.seed);
  const std::vector<ChartPoint> points = sample_points(model, cfg.n_points, rng);
  const std::vector<ChartPoint> probes = model_probes(model, cfg, rng);
  detail::pointwise_state_checks(model, points, probes, cfg, rng, out);
  const CMatrix R = resolution_matrix(model);
  out.checks.push_back(upper_check("resolution-of-identity", identity_deviation(R), cfg.quad_tol));
  out.diagnostics.push_back({"orthonormality", orthonormality_deviation(model)});
  return out;
}

}  // namespace cstate
