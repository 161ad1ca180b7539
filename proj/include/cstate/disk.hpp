#pragma once

// Truncated weighted Bergman space on the unit disk with the explicit basis
// psi_i = sqrt(Gamma(1/hbar+i)/(Gamma(1/hbar) i!)) z^i.

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cstate/checks.hpp"
#include "cstate/coherent.hpp"
#include "cstate/error.hpp"
#include "cstate/hilbert.hpp"
#include "cstate/quadrature.hpp"
#include "cstate/squeezed.hpp"

namespace cstate {

namespace detail {
inline void check_hbar(double hbar) {
  if (!(hbar > 0.0) || !std::isfinite(hbar) || !(1.0 / hbar > 1.0))
    throw Error(ErrorCode::invalid_argument, "disk model needs 1/hbar > 1");
}
}  // namespace detail

/// c_i^2 = prod_{j=1..i} (1/hbar - 1 + j)/j, built by cumulative product.
inline std::vector<double> disk_basis_constants_sq(double hbar, int count) {
  detail::check_hbar(hbar);
  std::vector<double> c2(static_cast<std::size_t>(std::max(count, 0)));
  double acc = 1.0;
  for (int i = 0; i < count; ++i) {
    if (i > 0) acc *= (1.0 / hbar - 1.0 + i) / i;
    c2[static_cast<std::size_t>(i)] = acc;
  }
  return c2;
}

inline std::vector<double> disk_basis_constants(double hbar, int count) {
  auto c = disk_basis_constants_sq(hbar, count);
  for (double& x : c) x = std::sqrt(x);
  return c;
}

inline double disk_chi_closed_form(const ChartPoint& mu, double hbar) {
  detail::check_hbar(hbar);
  const double x = mu.squaredNorm();
  if (!(x < 1.0)) throw Error(ErrorCode::out_of_domain, "point is not inside the unit disk");
  return std::pow(1.0 - x, -1.0 / hbar);
}

/// Bound on sum_{i >= N} c_i^2 x^i: the term ratio x(1/hbar+i)/(i+1) decreases
/// in i, so the tail is at most c_N^2 x^N / (1 - r_N). Infinite when r_N >= 1.
inline double disk_tail_bound(double x, double hbar, int cutoff) {
  detail::check_hbar(hbar);
  if (x == 0.0) return 0.0;
  const double cN2 = disk_basis_constants_sq(hbar, cutoff + 1).back();
  const double rN = x * (1.0 / hbar + cutoff) / (cutoff + 1.0);
  if (!(rN < 1.0)) return std::numeric_limits<double>::infinity();
  return cN2 * std::pow(x, cutoff) / (1.0 - rN);
}

/// Model with basis psi_0..psi_{cutoff-1}. The weight (1-|z|^2)^{1/hbar} and the
/// hyperbolic area live in the rule, so the pointwise weight is 1.
inline QuantModel disk_model(double hbar, int cutoff) {
  detail::check_hbar(hbar);
  if (cutoff < 1) throw Error(ErrorCode::invalid_argument, "disk cutoff must be >= 1");
  QuantModel m;
  m.name = "disk(hbar=" + std::to_string(hbar) + ",cutoff=" + std::to_string(cutoff) + ")";
  m.rule = disk_rule(cutoff + 2, 2 * cutoff + 4, hbar);
  m.domain = m.rule.domain;
  m.point_dim = 1;
  m.monomials = monomial_basis(1, cutoff - 1);
  const auto basis = m.monomials;
  m.raw_eval = [basis](const ChartPoint& z) { return eval_monomials(basis, z); };
  m.weight = [](const ChartPoint&) { return 1.0; };
  m.in_domain = [](const ChartPoint& z) { return z.size() == 1 && std::norm(z(0)) < 1.0; };
  const double a = 1.0 / hbar;
  m.density = [a](const ChartPoint& z) {
    return (a - 1.0) * std::pow(1.0 - std::norm(z(0)), a - 2.0) / std::numbers::pi;
  };
  m.sampler = [](Rng& rng) {
    const double r = 0.7 * std::sqrt(uniform01(rng));
    const double t = 2.0 * std::numbers::pi * uniform01(rng);
    return detail::point1(std::polar(r, t));
  };
  m.probes = [](std::size_t count, Rng& rng) {
    std::vector<ChartPoint> out;
    const double offset = 2.0 * std::numbers::pi * uniform01(rng);
    for (std::size_t s = 0; s < count; ++s)
      out.push_back(detail::point1(
          std::polar(0.95, offset + 2.0 * std::numbers::pi * static_cast<double>(s) / static_cast<double>(count))));
    return out;
  };
  const auto c = disk_basis_constants(hbar, cutoff);
  m.ortho = CMatrix::Zero(cutoff, cutoff);
  for (int i = 0; i < cutoff; ++i) m.ortho(i, i) = c[static_cast<std::size_t>(i)];
  m.s0 = SectionVec::Zero(cutoff);
  m.s0(0) = 1.0;
  return m;
}

/// Increments of the truncated series at mu = radius e^{i pi/4} between each
/// cutoff and the next (the last one against twice itself): type I coefficient
/// change, type II change of the partial sums on the circle |nu| = radius, and
/// chi^2(mu_zeta) change.
inline Table disk_convergence_report(double hbar, double zeta, double radius, const std::vector<int>& cutoffs) {
  detail::check_hbar(hbar);
  if (!(radius >= 0.0 && radius < 1.0)) throw Error(ErrorCode::out_of_domain, "radius must lie in [0, 1)");
  if (cutoffs.empty()) throw Error(ErrorCode::invalid_argument, "no cutoffs given");
  const ChartPoint mu = detail::point1(std::polar(radius, std::numbers::pi / 4.0));
  const ChartPoint mz = squeeze_raw(mu, zeta);
  if (!(std::norm(mz(0)) < 1.0)) throw Error(ErrorCode::out_of_domain, "squeezed point leaves the disk");

  constexpr int kRing = 64;
  std::vector<cplx> ring_sq;  // nu_zeta for nu on the ring, when inside the disk
  for (int j = 0; j < kRing; ++j) {
    const cplx nu = std::polar(radius, 2.0 * std::numbers::pi * j / kRing);
    const cplx s{nu.real(), zeta * nu.imag()};
    if (std::norm(s) < 1.0) ring_sq.push_back(s);
  }

  struct Series {
    CVector type1;
    std::vector<cplx> type2;
    double chi2 = 0.0;
  };
  auto series = [&](int N) {
    const auto c2 = disk_basis_constants_sq(hbar, N);
    Series s;
    s.type1.resize(N);
    CVector vmu(N), vmz(N);
    cplx pmu = 1.0, pmz = 1.0;
    for (int i = 0; i < N; ++i) {
      const double c = std::sqrt(c2[static_cast<std::size_t>(i)]);
      vmu(i) = c * pmu;
      vmz(i) = c * pmz;
      pmu *= mu(0);
      pmz *= mz(0);
    }
    s.chi2 = vmz.squaredNorm();
    const double chi = std::sqrt(s.chi2);
    s.type1 = vmz.conjugate() / chi;
    for (const cplx& w : ring_sq) {
      cplx acc = 0.0, pw = 1.0;
      for (int i = 0; i < N; ++i) {
        acc += std::conj(vmu(i)) * std::sqrt(c2[static_cast<std::size_t>(i)]) * pw;
        pw *= w;
      }
      s.type2.push_back(acc / chi);
    }
    return s;
  };

  Table t;
  t.name = "disk-convergence";
  t.columns = {"cutoff", "next_cutoff", "type1_increment", "type2_increment", "chi2_increment", "tail_bound"};
  for (std::size_t j = 0; j < cutoffs.size(); ++j) {
    const int N = cutoffs[j];
    if (N < 1) throw Error(ErrorCode::invalid_argument, "cutoffs must be >= 1");
    const int Nn = j + 1 < cutoffs.size() ? cutoffs[j + 1] : 2 * N;
    if (Nn <= N) throw Error(ErrorCode::invalid_argument, "cutoffs must increase");
    const Series a = series(N), b = series(Nn);
    CVector pad = CVector::Zero(Nn);
    pad.head(N) = a.type1;
    double d2 = 0.0;
    for (std::size_t r = 0; r < ring_sq.size(); ++r) d2 = std::max(d2, std::abs(a.type2[r] - b.type2[r]));
    t.rows.push_back({static_cast<double>(N), static_cast<double>(Nn), (b.type1 - pad).norm(), d2,
                      std::abs(b.chi2 - a.chi2), disk_tail_bound(mz.squaredNorm(), hbar, N)});
  }
  return t;
}

/// Columns 2..4 of a convergence table are non-increasing, ignoring changes
/// below the rounding floor.
inline bool increments_monotone(const Table& t, double floor = 1e-14) {
  for (std::size_t r = 1; r < t.rows.size(); ++r)
    for (std::size_t c = 2; c <= 4; ++c)
      if (t.rows[r][c] > t.rows[r - 1][c] && t.rows[r][c] > floor) return false;
  return true;
}

}  // namespace cstate
