#pragma once

// Squeezed states of both types: type I squeezes the base point, type II the
// evaluation argument through the b-matrix expansion.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cstate/checks.hpp"
#include "cstate/coherent.hpp"
#include "cstate/error.hpp"
#include "cstate/hilbert.hpp"

namespace cstate {

/// Keeps real parts, scales imaginary parts by zeta. No domain check.
inline ChartPoint squeeze_raw(const ChartPoint& mu, double zeta) {
  ChartPoint out(mu.size());
  for (Eigen::Index i = 0; i < mu.size(); ++i) out(i) = {mu(i).real(), zeta * mu(i).imag()};
  return out;
}

inline std::optional<ChartPoint> try_squeeze(const QuantModel& model, const ChartPoint& mu, double zeta) {
  ChartPoint s = squeeze_raw(mu, zeta);
  if (!detail::finite_point(s) || (model.in_domain && !model.in_domain(s))) return std::nullopt;
  return s;
}

inline ChartPoint squeeze_point(const QuantModel& model, const ChartPoint& mu, double zeta) {
  auto s = try_squeeze(model, mu, zeta);
  if (!s) throw Error(ErrorCode::out_of_domain, "squeezed point leaves the chart domain");
  return *s;
}

/// Type I: the coherent state at mu_zeta.
inline CoherentState squeezed_I(const QuantModel& model, const ChartPoint& mu, double zeta) {
  return coherent_state(model, squeeze_point(model, mu, zeta));
}

struct BMatrix {
  CMatrix b;
  double residual = 0.0;           // max_i || psi~_i - sum_k b_ik psi_k ||
  double hermiticity_defect = 0.0;  // max |b_ik - conj(b_ki)|
  bool hermitian = false;
};

/// L^2 projection of psi~_i(nu) = psi_i(nu_zeta) onto the basis, by quadrature.
inline BMatrix b_matrix(const QuantModel& model, double zeta, double hermitian_tol = 1e-9) {
  const Eigen::Index m = model.dim();
  BMatrix out;
  if (zeta == 1.0) {
    out.b = CMatrix::Identity(m, m);
    out.hermitian = true;
    return out;
  }
  const auto S = static_cast<Eigen::Index>(model.rule.size());
  CMatrix V(m, S), Vt(m, S);
  Eigen::VectorXd wh(S);
  for (Eigen::Index s = 0; s < S; ++s) {
    const ChartPoint& node = model.rule.nodes[static_cast<std::size_t>(s)];
    auto sq = try_squeeze(model, node, zeta);
    if (!sq)
      throw Error(ErrorCode::out_of_domain, "squeeze moves quadrature node " + std::to_string(s) + " out of domain",
                  static_cast<std::size_t>(s));
    V.col(s) = model.ortho.transpose() * model.raw_eval(node);
    Vt.col(s) = model.ortho.transpose() * model.raw_eval(*sq);
    wh(s) = model.rule.weights[static_cast<std::size_t>(s)] * model.weight(node);
  }
  out.b = Vt * wh.asDiagonal() * V.adjoint();
  const CMatrix R = Vt - out.b * V;
  for (Eigen::Index i = 0; i < m; ++i) {
    double r2 = 0.0;
    for (Eigen::Index s = 0; s < S; ++s) r2 += wh(s) * std::norm(R(i, s));
    out.residual = std::max(out.residual, std::sqrt(r2));
  }
  out.hermiticity_defect = (out.b - out.b.adjoint()).cwiseAbs().maxCoeff();
  out.hermitian = out.hermiticity_defect <= hermitian_tol;
  return out;
}

/// Type II coefficients  (s0(mu_z)/(|s0(mu_z)| p)) sum_i conj(f_i(mu)) b_ik  in the
/// trivialization, so that zeta = 1 reproduces the coherent state exactly.
inline SectionVec squeezed_II(const QuantModel& model, const ChartPoint& mu, double zeta, const BMatrix& B) {
  const BasisValues at_mu = eval_basis(model, mu);
  const ChartPoint mz = squeeze_point(model, mu, zeta);
  const BasisValues at_mz = eval_basis(model, mz);
  const cplx s0v = base_section_value(model, at_mz);
  if (!(std::norm(s0v) * at_mz.weight >= kBaseSectionThreshold))
    throw Error(ErrorCode::base_section_zero, "base section vanishes at the squeezed point");
  const cplx phase = s0v / std::abs(s0v);
  const CVector mixed = B.b.transpose() * at_mu.values.conjugate();
  return phase * mixed / at_mz.values.norm();
}

inline SectionVec squeezed_II(const QuantModel& model, const ChartPoint& mu, double zeta) {
  return squeezed_II(model, mu, zeta, b_matrix(model, zeta));
}

/// max_i |conj(psi_i(nu)) - psi_i(conj nu)| over the points whose conjugate is in-domain.
inline double reality_defect(const QuantModel& model, const std::vector<ChartPoint>& points) {
  double dev = 0.0;
  for (const ChartPoint& p : points) {
    const ChartPoint q = p.conjugate();
    if (model.in_domain && !model.in_domain(q)) continue;
    const CVector a = eval_basis(model, p).values.conjugate();
    const CVector b = eval_basis(model, q).values;
    dev = std::max(dev, (a - b).cwiseAbs().maxCoeff());
  }
  return dev;
}

struct SqueezedConfig {
  CoherentConfig base;
  double hermitian_tol = 1e-9;
  double implication_tol = 1e-8;
};

inline std::vector<ChartPoint> squeezed_probes(const QuantModel& model, const std::vector<ChartPoint>& probes,
                                               double zeta) {
  // Use mu = P when its squeeze stays in-domain; otherwise pick mu with mu_zeta = P.
  std::vector<ChartPoint> out;
  for (const ChartPoint& p : probes) {
    if (auto s = try_squeeze(model, p, zeta)) {
      out.push_back(*s);
    } else if (zeta != 0.0 && try_squeeze(model, p, 1.0 / zeta)) {
      out.push_back(p);
    }
  }
  return out;
}

/// Change-of-variables factor |zeta|^n rho(mu_zeta)/rho(mu) turning the
/// integral over mu_zeta into one over mu.
inline double squeeze_jacobian(const QuantModel& model, const ChartPoint& mu, const ChartPoint& mz, double zeta) {
  return std::pow(std::abs(zeta), static_cast<double>(mu.size())) * model.density(mz) / model.density(mu);
}

inline SuiteResult verify_squeezed(const QuantModel& model, double zeta, const SqueezedConfig& cfg = {}) {
  if (!std::isfinite(zeta)) throw Error(ErrorCode::invalid_argument, "squeeze factor must be finite");
  SuiteResult out;
  out.suite = "squeezed";
  out.model = model.name;
  const CoherentConfig& cc = cfg.base;
  Rng rng(cc.seed);
  const std::vector<ChartPoint> base = sample_points(model, cc.n_points, rng, [&](const ChartPoint& p) {
    auto s = try_squeeze(model, p, zeta);
    return s && off_base_zero_set(model, eval_basis(model, *s));
  });
  std::vector<ChartPoint> squeezed;
  for (const ChartPoint& p : base) squeezed.push_back(squeeze_raw(p, zeta));
  const std::vector<ChartPoint> probes = squeezed_probes(model, model_probes(model, cc, rng), zeta);
  detail::pointwise_state_checks(model, squeezed, probes, cc, rng, out);

  if (model.density && zeta != 0.0) {
    const CMatrix R = resolution_matrix(
        model, [&](const ChartPoint& p) { return try_squeeze(model, p, zeta); },
        [&](const ChartPoint& p, const ChartPoint& q) { return squeeze_jacobian(model, p, q, zeta); });
    out.diagnostics.push_back({"modified-resolution", identity_deviation(R)});
    out.diagnostics.push_back({"modified-resolution-scalar", scalar_identity_deviation(R)});
    out.diagnostics.push_back({"modified-resolution-trace", (R.trace() / static_cast<double>(R.rows())).real()});
  }

  out.diagnostics.push_back({"reality-condition", reality_defect(model, base)});

  std::optional<BMatrix> B;
  try {
    B = b_matrix(model, zeta, cfg.hermitian_tol);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::out_of_domain) throw;
  }
  out.diagnostics.push_back({"b-matrix-available", B ? 1.0 : 0.0});
  if (B) {
    double diff = 0.0, norm_dev = 0.0, overlap_dev = 0.0;
    const SectionVec probe_section = random_unit_section(model.dim(), rng);
    for (const ChartPoint& p : base) {
      const SectionVec two = squeezed_II(model, p, zeta, *B);
      const CoherentState one = coherent_state(model, squeeze_raw(p, zeta));
      diff = std::max(diff, (two - one.coeffs).norm());
      norm_dev = std::max(norm_dev, std::abs(two.squaredNorm() - 1.0));
      const cplx lhs = two.dot(probe_section);
      const cplx rhs = evaluate(model, probe_section, one.base_point) / one.tau_mu;
      overlap_dev = std::max(overlap_dev, std::abs(lhs - rhs));
    }
    out.diagnostics.push_back({"b-residual", B->residual});
    out.diagnostics.push_back({"b-hermiticity-defect", B->hermiticity_defect});
    out.diagnostics.push_back({"b-hermitian", B->hermitian ? 1.0 : 0.0});
    out.diagnostics.push_back({"type-ii-vs-type-i", diff});
    out.diagnostics.push_back({"type-ii-norm", norm_dev});
    out.diagnostics.push_back({"type-ii-overlap", overlap_dev});
    if (B->hermitian)
      out.checks.push_back(upper_check("hermitian-implication", diff, cfg.implication_tol + B->residual));
  }

  if (zeta == 1.0) {
    // Coefficients of both types must coincide with the coherent state bit for bit.
    double dev = 0.0;
    const BMatrix I = B ? *B : b_matrix(model, 1.0);
    for (const ChartPoint& p : base) {
      const SectionVec c = coherent_state(model, p).coeffs;
      dev = std::max(dev, (squeezed_I(model, p, 1.0).coeffs - c).cwiseAbs().maxCoeff());
      dev = std::max(dev, (squeezed_II(model, p, 1.0, I) - c).cwiseAbs().maxCoeff());
    }
    out.checks.push_back(upper_check("zeta-one-exact", dev, 0.0));
  }
  return out;
}

}  // namespace cstate
