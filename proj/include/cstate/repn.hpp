#pragma once

// su(n+1) acting on sections of H^k over the CP^n chart: prequantum
// operators, commutation checks, Perelomov states and their agreement with
// the Rawnsley coherent states.

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "cstate/checks.hpp"
#include "cstate/coherent.hpp"
#include "cstate/error.hpp"
#include "cstate/hilbert.hpp"

namespace cstate {

/// Anti-Hermitian traceless (n+1)x(n+1) matrix.
struct LieGenerator {
  CMatrix lambda;
  std::string name;
};

inline void validate_generator(const CMatrix& lambda, int n, double tol = 1e-12) {
  if (lambda.rows() != n + 1 || lambda.cols() != n + 1)
    throw Error(ErrorCode::invalid_generator, "generator must be (n+1)x(n+1)");
  const double scale = std::max(1.0, lambda.cwiseAbs().maxCoeff());
  if ((lambda + lambda.adjoint()).cwiseAbs().maxCoeff() > tol * scale)
    throw Error(ErrorCode::invalid_generator, "generator is not anti-Hermitian");
  if (std::abs(lambda.trace()) > tol * scale) throw Error(ErrorCode::invalid_generator, "generator is not traceless");
}

/// lambda_a = -(i/2) sigma_a, so that [lambda_x, lambda_y] = lambda_z.
inline std::vector<LieGenerator> su2_basis() {
  const cplx I(0.0, 1.0);
  CMatrix sx(2, 2), sy(2, 2), sz(2, 2);
  sx << 0, 1, 1, 0;
  sy << 0, -I, I, 0;
  sz << 1, 0, 0, -1;
  return {{-0.5 * I * sx, "x"}, {-0.5 * I * sy, "y"}, {-0.5 * I * sz, "z"}};
}

/// -(i/2) times the Gell-Mann matrices; orthonormal for <X,Y> = -2 tr(XY).
inline std::vector<LieGenerator> su3_basis() {
  const cplx I(0.0, 1.0);
  std::vector<CMatrix> g(8, CMatrix::Zero(3, 3));
  g[0](0, 1) = g[0](1, 0) = 1;
  g[1](0, 1) = -I;
  g[1](1, 0) = I;
  g[2](0, 0) = 1;
  g[2](1, 1) = -1;
  g[3](0, 2) = g[3](2, 0) = 1;
  g[4](0, 2) = -I;
  g[4](2, 0) = I;
  g[5](1, 2) = g[5](2, 1) = 1;
  g[6](1, 2) = -I;
  g[6](2, 1) = I;
  const double r3 = 1.0 / std::sqrt(3.0);
  g[7](0, 0) = g[7](1, 1) = r3;
  g[7](2, 2) = -2.0 * r3;
  std::vector<LieGenerator> out;
  for (int a = 0; a < 8; ++a) out.push_back({-0.5 * I * g[static_cast<std::size_t>(a)], "l" + std::to_string(a + 1)});
  return out;
}

inline std::vector<LieGenerator> su_basis(int n) {
  if (n == 1) return su2_basis();
  if (n == 2) return su3_basis();
  throw Error(ErrorCode::unsupported_dimension, "generator bases exist for n <= 2 only");
}

/// a[i][j][l] with [lambda_i, lambda_j] = sum_l a_ij^l lambda_l, by least squares
/// in the real span of the basis.
inline std::vector<std::vector<std::vector<double>>> structure_constants(const std::vector<LieGenerator>& basis) {
  const std::size_t d = basis.size();
  const Eigen::Index N = basis.empty() ? 0 : basis[0].lambda.size();
  Eigen::MatrixXd B(2 * N, static_cast<Eigen::Index>(d));
  for (std::size_t l = 0; l < d; ++l) {
    const CMatrix& L = basis[l].lambda;
    for (Eigen::Index e = 0; e < N; ++e) {
      B(e, static_cast<Eigen::Index>(l)) = L.data()[e].real();
      B(N + e, static_cast<Eigen::Index>(l)) = L.data()[e].imag();
    }
  }
  const auto solver = B.colPivHouseholderQr();
  std::vector<std::vector<std::vector<double>>> a(d, std::vector<std::vector<double>>(d, std::vector<double>(d)));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      const CMatrix C = basis[i].lambda * basis[j].lambda - basis[j].lambda * basis[i].lambda;
      Eigen::VectorXd rhs(2 * N);
      for (Eigen::Index e = 0; e < N; ++e) {
        rhs(e) = C.data()[e].real();
        rhs(N + e) = C.data()[e].imag();
      }
      const Eigen::VectorXd x = solver.solve(rhs);
      for (std::size_t l = 0; l < d; ++l) a[i][j][l] = x(static_cast<Eigen::Index>(l));
    }
  return a;
}

namespace detail {

/// Homogeneous exponents (k - |a|, a_1, ..., a_n) of a chart monomial.
inline std::vector<int> homogeneous_exponents(const MultiIndex& a, int k) {
  std::vector<int> e{k - a.degree()};
  e.insert(e.end(), a.exponents.begin(), a.exponents.end());
  return e;
}

inline std::map<std::vector<int>, Eigen::Index> homogeneous_index(const std::vector<MultiIndex>& basis, int k) {
  std::map<std::vector<int>, Eigen::Index> idx;
  for (std::size_t a = 0; a < basis.size(); ++a)
    idx[homogeneous_exponents(basis[a], k)] = static_cast<Eigen::Index>(a);
  return idx;
}

inline void check_cpn_model(const QuantModel& model) {
  if (model.domain.kind != DomainKind::cpn_chart || model.chart_n < 1 || model.level < 0 ||
      model.ortho.rows() != model.ortho.cols())
    throw Error(ErrorCode::invalid_argument, "representation needs a full CP^n chart model");
}

}  // namespace detail

/// Matrix of dU(X) P(Z) = -sum_{p,q} X_pq Z_q dP/dZ_p on degree-k homogeneous
/// polynomials, in the raw chart monomial basis. X may be any (n+1)x(n+1) matrix.
inline CMatrix induced_generator_raw(const CMatrix& X, const std::vector<MultiIndex>& basis, int k) {
  const auto idx = detail::homogeneous_index(basis, k);
  const auto m = static_cast<Eigen::Index>(basis.size());
  const Eigen::Index np1 = X.rows();
  CMatrix M = CMatrix::Zero(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    const auto alpha = detail::homogeneous_exponents(basis[static_cast<std::size_t>(a)], k);
    for (Eigen::Index p = 0; p < np1; ++p) {
      if (alpha[static_cast<std::size_t>(p)] == 0) continue;
      for (Eigen::Index q = 0; q < np1; ++q) {
        if (X(p, q) == cplx(0.0)) continue;
        auto beta = alpha;
        beta[static_cast<std::size_t>(p)] -= 1;
        beta[static_cast<std::size_t>(q)] += 1;
        M(idx.at(beta), a) -= X(p, q) * static_cast<double>(alpha[static_cast<std::size_t>(p)]);
      }
    }
  }
  return M;
}

inline CMatrix to_orthonormal(const QuantModel& model, const CMatrix& raw_op) {
  return model.ortho.triangularView<Eigen::Upper>().solve(raw_op * model.ortho);
}

/// chi-hat = dU(lambda) in the orthonormal basis (anti-Hermitian).
inline CMatrix represented_generator(const QuantModel& model, const CMatrix& lambda) {
  detail::check_cpn_model(model);
  validate_generator(lambda, model.chart_n);
  return to_orthonormal(model, induced_generator_raw(lambda, model.monomials, model.level));
}

/// tau-hat = -i chi-hat, Hermitian; spectrum {-1/2, 1/2} for su(2) at k = 1.
inline CMatrix prequantum_op(const QuantModel& model, const CMatrix& lambda) {
  return cplx(0.0, -1.0) * represented_generator(model, lambda);
}

inline CMatrix prequantum_op(const CMatrix& lambda, int n, int k) {
  if (k < 1) throw Error(ErrorCode::invalid_argument, "prequantum operators need k >= 1");
  return prequantum_op(cpn_model(n, k), lambda);
}

struct KahlerChartData {
  int n = 1;
  int k = 1;

  static ChartPoint homogeneous(const ChartPoint& z) {
    ChartPoint Z(z.size() + 1);
    Z(0) = 1.0;
    Z.tail(z.size()) = z;
    return Z;
  }
  /// Connection form of the metric (1+|z|^2)^{-k}: theta_i dz_i with theta_i = -k conj(z_i)/(1+|z|^2).
  CVector connection(const ChartPoint& z) const { return -k * z.conjugate() / (1.0 + z.squaredNorm()); }
  /// Theta^{1,0} and Theta^{0,1} coefficients of the symmetric potential form.
  CVector theta10(const ChartPoint& z) const { return -0.5 * k * z.conjugate() / (1.0 + z.squaredNorm()); }
  CVector theta01(const ChartPoint& z) const { return 0.5 * k * z / (1.0 + z.squaredNorm()); }
  /// g_i with Theta^{0,1} = i sum g_i dconj(z_i).
  CVector g(const ChartPoint& z) const { return cplx(0.0, -1.0) * theta01(z); }
  double unitarity_defect(const ChartPoint& z) const {
    return (theta10(z).conjugate() + theta01(z)).cwiseAbs().maxCoeff();
  }
  /// tau_lambda = i k Z^H lambda Z / |Z|^2.
  double moment(const CMatrix& lambda, const ChartPoint& z) const {
    const ChartPoint Z = homogeneous(z);
    return (cplx(0.0, static_cast<double>(k)) * Z.dot(lambda * Z) / Z.squaredNorm()).real();
  }
  /// Holomorphic part X^{1,0} of the Hamiltonian vector field of tau_lambda.
  CVector hamiltonian_field(const CMatrix& lambda, const ChartPoint& z) const {
    const ChartPoint Z = homogeneous(z);
    const CVector w = lambda * Z;
    return -(w.tail(z.size()) - z * w(0));
  }
  /// Wirtinger derivative d tau / d z_a in closed form.
  CVector moment_dz(const CMatrix& lambda, const ChartPoint& z) const {
    const ChartPoint Z = homogeneous(z);
    const double N = Z.squaredNorm();
    const cplx q = Z.dot(lambda * Z);
    const CVector row = (Z.adjoint() * lambda).transpose();
    return cplx(0.0, static_cast<double>(k)) * (row.tail(z.size()) * N - q * z.conjugate()) / (N * N);
  }
  CVector moment_dzbar(const CMatrix& lambda, const ChartPoint& z) const {
    const ChartPoint Z = homogeneous(z);
    const double N = Z.squaredNorm();
    const cplx q = Z.dot(lambda * Z);
    const CVector col = lambda * Z;
    return cplx(0.0, static_cast<double>(k)) * (col.tail(z.size()) * N - q * z) / (N * N);
  }
  /// X(f) = 2 Re sum_a X^a df/dz_a for real f.
  double field_derivative(const CMatrix& field_lambda, const CMatrix& f_lambda, const ChartPoint& z) const {
    return 2.0 * hamiltonian_field(field_lambda, z).transpose().dot(moment_dz(f_lambda, z).conjugate()).real();
  }
};

/// Kostant's formula  T h = -i [X(h) + theta(X) h] + tau h  applied to the chart
/// monomial z^a at the point z.
inline cplx prequantum_pointwise(const CMatrix& lambda, int k, const MultiIndex& a, const ChartPoint& z) {
  KahlerChartData kd{static_cast<int>(z.size()), k};
  const CVector X = kd.hamiltonian_field(lambda, z);
  cplx h = 1.0;
  CVector dh = CVector::Zero(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i)
    for (int p = 0; p < a.exponents[static_cast<std::size_t>(i)]; ++p) h *= z(i);
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const int e = a.exponents[static_cast<std::size_t>(i)];
    if (e == 0) continue;
    cplx d = static_cast<double>(e);
    for (Eigen::Index j = 0; j < z.size(); ++j)
      for (int p = 0; p < a.exponents[static_cast<std::size_t>(j)] - (j == i ? 1 : 0); ++p) d *= z(j);
    dh(i) = d;
  }
  const cplx Xh = X.transpose() * dh;
  const cplx thX = kd.connection(z).transpose() * X;
  return cplx(0.0, -1.0) * (Xh + thX * h) + kd.moment(lambda, z) * h;
}

/// max over basis pairs of ||[chi_i, chi_j] - sum_l a_ij^l chi_l||_max.
inline double commutation_deviation(const QuantModel& model, const std::vector<LieGenerator>& basis) {
  const auto a = structure_constants(basis);
  std::vector<CMatrix> chi;
  for (const auto& g : basis) chi.push_back(represented_generator(model, g.lambda));
  double dev = 0.0;
  for (std::size_t i = 0; i < chi.size(); ++i)
    for (std::size_t j = 0; j < chi.size(); ++j) {
      CMatrix D = chi[i] * chi[j] - chi[j] * chi[i];
      for (std::size_t l = 0; l < chi.size(); ++l) D -= a[i][j][l] * chi[l];
      dev = std::max(dev, D.cwiseAbs().maxCoeff());
    }
  return dev;
}

inline double commutation_report(int n, int k) { return commutation_deviation(cpn_model(n, k), su_basis(n)); }

struct SpinMatrices {
  CMatrix jx, jy, jz;
};

/// Standard spin-s matrices from the ladder operators on |s, m>, m = s..-s.
inline SpinMatrices spin_ladder(int two_s) {
  const int d = two_s + 1;
  const double s = 0.5 * two_s;
  CMatrix jp = CMatrix::Zero(d, d), jz = CMatrix::Zero(d, d);
  for (int r = 0; r < d; ++r) {
    const double m = s - r;
    jz(r, r) = m;
    if (r > 0) jp(r - 1, r) = std::sqrt(s * (s + 1) - m * (m + 1));
  }
  const CMatrix jm = jp.adjoint();
  return {0.5 * (jp + jm), cplx(0.0, -0.5) * (jp - jm), jz};
}

inline Eigen::VectorXd sorted_hermitian_spectrum(const CMatrix& A) {
  const CMatrix H = 0.5 * (A + A.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(H);
  return es.eigenvalues();
}

/// Largest spectral mismatch between tau-hat_{x,y,z} at level k and the
/// spin-k/2 ladder matrices, plus the Casimir deviation from s(s+1).
inline double spin_spectrum_deviation(const QuantModel& model) {
  const auto basis = su2_basis();
  const SpinMatrices J = spin_ladder(model.level);
  const CMatrix* ref[3] = {&J.jx, &J.jy, &J.jz};
  double dev = 0.0;
  CMatrix cas = CMatrix::Zero(model.dim(), model.dim());
  for (int a = 0; a < 3; ++a) {
    const CMatrix T = prequantum_op(model, basis[static_cast<std::size_t>(a)].lambda);
    dev = std::max(dev, (sorted_hermitian_spectrum(T) - sorted_hermitian_spectrum(*ref[a])).cwiseAbs().maxCoeff());
    cas += T * T;
  }
  const double s = 0.5 * model.level;
  dev = std::max(dev, (cas - s * (s + 1) * CMatrix::Identity(cas.rows(), cas.cols())).cwiseAbs().maxCoeff());
  return dev;
}

namespace detail {

using Poly = std::map<std::vector<int>, cplx>;

inline Poly poly_mul_linear(const Poly& P, const CVector& coeffs) {
  Poly out;
  for (const auto& [e, c] : P)
    for (Eigen::Index q = 0; q < coeffs.size(); ++q) {
      if (coeffs(q) == cplx(0.0)) continue;
      auto f = e;
      f[static_cast<std::size_t>(q)] += 1;
      out[f] += c * coeffs(q);
    }
  return out;
}

}  // namespace detail

/// (U_g P)(Z) = P(g^{-1} Z) in the raw chart monomial basis.
inline CMatrix group_action_raw(const CMatrix& g, const std::vector<MultiIndex>& basis, int k) {
  const auto idx = detail::homogeneous_index(basis, k);
  const CMatrix ginv = g.inverse();
  const auto m = static_cast<Eigen::Index>(basis.size());
  const auto np1 = static_cast<std::size_t>(g.rows());
  CMatrix U = CMatrix::Zero(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    const auto alpha = detail::homogeneous_exponents(basis[static_cast<std::size_t>(a)], k);
    detail::Poly P{{std::vector<int>(np1, 0), 1.0}};
    for (std::size_t p = 0; p < np1; ++p)
      for (int r = 0; r < alpha[p]; ++r) P = detail::poly_mul_linear(P, ginv.row(static_cast<Eigen::Index>(p)).transpose());
    for (const auto& [e, c] : P) U(idx.at(e), a) += c;
  }
  return U;
}

inline void validate_special_unitary(const CMatrix& g, int n, double tol = 1e-12) {
  if (g.rows() != n + 1 || g.cols() != n + 1) throw Error(ErrorCode::non_unitary, "group element has wrong size");
  if ((g.adjoint() * g - CMatrix::Identity(n + 1, n + 1)).cwiseAbs().maxCoeff() > tol)
    throw Error(ErrorCode::non_unitary, "group element is not unitary");
  if (std::abs(g.determinant() - 1.0) > tol * 10) throw Error(ErrorCode::non_unitary, "group element has det != 1");
}

inline CMatrix represented_group_element(const QuantModel& model, const CMatrix& g) {
  detail::check_cpn_model(model);
  validate_special_unitary(g, model.chart_n);
  return to_orthonormal(model, group_action_raw(g, model.monomials, model.level));
}

/// U_g Psi_0 with Psi_0 = psi_0 (the monomial Z_0^k).
inline SectionVec perelomov_state(const QuantModel& model, const CMatrix& g) {
  return represented_group_element(model, g).col(0);
}

/// Cross-check path: exp of the represented generator along log(g).
inline CMatrix represented_group_element_exp(const QuantModel& model, const CMatrix& g) {
  detail::check_cpn_model(model);
  validate_special_unitary(g, model.chart_n);
  const CMatrix X = g.log();
  const CMatrix chi = to_orthonormal(model, induced_generator_raw(X, model.monomials, model.level));
  return chi.exp();
}

/// Haar-distributed SU(d): QR of a complex Ginibre matrix with phase fix, then
/// the determinant divided out.
inline CMatrix random_special_unitary(int d, Rng& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  CMatrix A(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      const double re = nd(rng);
      const double im = nd(rng);
      A(i, j) = {re, im};
    }
  Eigen::HouseholderQR<CMatrix> qr(A);
  CMatrix Q = qr.householderQ();
  const CMatrix R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < d; ++j) {
    const cplx r = R(j, j);
    Q.col(j) *= r / std::abs(r);
  }
  const cplx det = Q.determinant();
  return Q * std::pow(det, -1.0 / d);
}

/// Image of the base point [1:0:...:0] under g, in the chart.
inline ChartPoint group_image_of_origin(const CMatrix& g) {
  const Eigen::Index n = g.rows() - 1;
  if (std::abs(g(0, 0)) < 1e-12) throw Error(ErrorCode::chart_exit, "g moves the base point off the chart");
  ChartPoint mu(n);
  for (Eigen::Index i = 0; i < n; ++i) mu(i) = g(i + 1, 0) / g(0, 0);
  return mu;
}

/// |<U_g Psi_0, phi_{g.p0}>|; 1 when the Perelomov and Rawnsley states agree up to phase.
inline double rawnsley_perelomov_overlap(const QuantModel& model, const CMatrix& g) {
  const SectionVec psi = perelomov_state(model, g);
  const CoherentState cs = coherent_state(model, group_image_of_origin(g));
  return std::abs(psi.dot(cs.coeffs));
}

struct RepnConfig {
  std::uint64_t seed = 20240611;
  std::size_t n_group = 100;
  std::size_t n_points = 20;
  double commutation_tol = 1e-10;
  double spectrum_tol = 1e-8;
  double overlap_tol = 1e-8;
  double unitarity_tol = 1e-10;
  double projective_tol = 1e-8;
};

/// Distance of |<a, b>| from 1 for unit vectors: zero iff equal up to phase.
inline double projective_distance(const SectionVec& a, const SectionVec& b) {
  return std::abs(1.0 - std::abs(a.dot(b)));
}

inline SuiteResult verify_repn(const QuantModel& model, const RepnConfig& cfg = {}) {
  detail::check_cpn_model(model);
  SuiteResult out;
  out.suite = "repn";
  out.model = model.name;
  const int n = model.chart_n;
  const int k = model.level;
  const auto basis = su_basis(n);
  Rng rng(cfg.seed);

  out.checks.push_back(upper_check("commutation", commutation_deviation(model, basis), cfg.commutation_tol));
  if (n == 1) out.checks.push_back(upper_check("spin-spectrum", spin_spectrum_deviation(model), cfg.spectrum_tol));

  // Chart identities: Kostant's pointwise formula, unitarity of Theta, equivariance.
  KahlerChartData kd{n, k};
  double kostant = 0.0, theta = 0.0, equivariance = 0.0;
  const auto a = structure_constants(basis);
  for (std::size_t s = 0; s < cfg.n_points; ++s) {
    const ChartPoint z = model.sampler(rng);
    theta = std::max(theta, kd.unitarity_defect(z));
    const CVector raw = model.raw_eval(z);
    for (const auto& g : basis) {
      const CMatrix Traw = cplx(0.0, -1.0) * induced_generator_raw(g.lambda, model.monomials, k);
      for (std::size_t m = 0; m < model.monomials.size(); ++m) {
        const cplx direct = prequantum_pointwise(g.lambda, k, model.monomials[m], z);
        const cplx viaop = raw.transpose() * Traw.col(static_cast<Eigen::Index>(m));
        kostant = std::max(kostant, std::abs(direct - viaop) / (1.0 + std::abs(viaop)));
      }
    }
    for (std::size_t i = 0; i < basis.size(); ++i)
      for (std::size_t j = 0; j < basis.size(); ++j) {
        CMatrix c = CMatrix::Zero(n + 1, n + 1);
        for (std::size_t l = 0; l < basis.size(); ++l) c += a[i][j][l] * basis[l].lambda;
        const double lhs = kd.field_derivative(basis[i].lambda, basis[j].lambda, z);
        equivariance = std::max(equivariance, std::abs(lhs - kd.moment(c, z)));
      }
  }
  out.checks.push_back(upper_check("kostant-pointwise", kostant, cfg.commutation_tol));
  out.checks.push_back(upper_check("theta-unitarity", theta, cfg.commutation_tol));
  out.checks.push_back(upper_check("equivariance", equivariance, cfg.commutation_tol));

  double overlap_dev = 0.0, unitarity = 0.0, norm_dev = 0.0, proj = 0.0;
  std::size_t collected = 0, attempts = 0;
  while (collected < cfg.n_group) {
    if (++attempts > 100 * (cfg.n_group + 1)) throw Error(ErrorCode::numerical_failure, "group sampling stalled");
    const CMatrix g = random_special_unitary(n + 1, rng);
    const CMatrix g2 = random_special_unitary(n + 1, rng);
    CMatrix U;
    double ov = 0.0;
    try {
      U = represented_group_element(model, g);
      ov = rawnsley_perelomov_overlap(model, g);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::chart_exit || e.code() == ErrorCode::base_section_zero) continue;
      throw;
    }
    ++collected;
    overlap_dev = std::max(overlap_dev, std::abs(ov - 1.0));
    unitarity = std::max(unitarity, (U.adjoint() * U - CMatrix::Identity(U.rows(), U.cols())).cwiseAbs().maxCoeff());
    norm_dev = std::max(norm_dev, std::abs(U.col(0).norm() - 1.0));
    const CMatrix U2 = represented_group_element(model, g2);
    const CMatrix U12 = represented_group_element(model, g * g2);
    proj = std::max(proj, projective_distance(U12.col(0), U * U2.col(0)));
  }
  out.checks.push_back(upper_check("rawnsley-perelomov", overlap_dev, cfg.overlap_tol));
  out.checks.push_back(upper_check("unitarity", unitarity, cfg.unitarity_tol));
  out.checks.push_back(upper_check("perelomov-norm", norm_dev, cfg.unitarity_tol));
  out.checks.push_back(upper_check("representation-property", proj, cfg.projective_tol));

  // Isotropy character: diag(e^{i phi}, V) acts on Psi_0 by e^{-i k phi}.
  {
    const CMatrix V = random_special_unitary(n, rng);
    const double phi = 2.0 * std::numbers::pi * uniform01(rng);
    CMatrix g = CMatrix::Zero(n + 1, n + 1);
    g(0, 0) = std::polar(1.0, phi);
    g.bottomRightCorner(n, n) = V * std::polar(1.0, -phi / n);
    const SectionVec psi = perelomov_state(model, g);
    SectionVec expect = SectionVec::Zero(model.dim());
    expect(0) = std::polar(1.0, -k * phi);
    out.checks.push_back(upper_check("isotropy-character", (psi - expect).cwiseAbs().maxCoeff(), cfg.unitarity_tol));
  }
  if (k <= 4) {
    const CMatrix g = random_special_unitary(n + 1, rng);
    const CMatrix Ue = represented_group_element_exp(model, g);
    const CMatrix Ud = represented_group_element(model, g);
    out.diagnostics.push_back({"exp-cross-check", (Ue - Ud).cwiseAbs().maxCoeff()});
  }
  return out;
}

}  // namespace cstate
