#pragma once

// Pullback quantization models over embedded circles, tori and user-supplied
// discrete embeddings in the CP^n chart.

#include <cmath>
#include <fstream>
#include <limits>
#include <functional>
#include <numbers>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cstate/coherent.hpp"
#include "cstate/error.hpp"
#include "cstate/hilbert.hpp"
#include "cstate/quadrature.hpp"

namespace cstate {

/// Parameter-domain rule whose nodes are already mapped to their images in
/// C^n; `rule.params` keeps the parameter coordinates. The rule weights are the
/// induced measure h dV = dV_Sigma, normalized to total mass 1.
struct Embedding {
  DomainKind kind = DomainKind::circle;
  int param_dim = 1;
  int target_n = 1;
  QuadratureRule rule;
  std::function<ChartPoint(std::span<const double>)> map;  // empty for user embeddings
  std::string label;
};

inline Embedding circle_embedding(std::size_t nodes) {
  Embedding e;
  e.kind = DomainKind::circle;
  e.param_dim = 1;
  e.target_n = 1;
  e.rule = circle_rule(nodes);
  e.map = [](std::span<const double> t) { return detail::point1(std::polar(1.0, t[0])); };
  e.label = "circle";
  return e;
}

/// Standard d-torus (e^{i t_1}, ..., e^{i t_d}) in the CP^d chart.
inline Embedding torus_embedding(int d, std::size_t nodes_per_axis) {
  Embedding e;
  e.kind = DomainKind::torus;
  e.param_dim = d;
  e.target_n = d;
  e.rule = torus_rule(d, nodes_per_axis);
  e.map = [d](std::span<const double> t) {
    ChartPoint p(d);
    for (int i = 0; i < d; ++i) p(i) = std::polar(1.0, t[static_cast<std::size_t>(i)]);
    return p;
  };
  e.label = "torus(" + std::to_string(d) + ")";
  return e;
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
  }
  return out;
}

}  // namespace detail

/// Reads `param...,re_z1,im_z1,...,re_zn,im_zn,weight`.
inline Embedding parse_user_embedding(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::invalid_config, "embedding file is empty");
  const auto header = detail::split_csv_line(line);
  if (header.empty() || header.back() != "weight")
    throw Error(ErrorCode::invalid_config, "embedding header must end with 'weight'");
  std::size_t first_image = header.size();
  for (std::size_t c = 0; c < header.size(); ++c)
    if (header[c].rfind("re_z", 0) == 0) {
      first_image = c;
      break;
    }
  const std::size_t n_image_cols = header.size() - 1 - first_image;
  if (first_image == header.size() || n_image_cols == 0 || n_image_cols % 2 != 0)
    throw Error(ErrorCode::invalid_config, "embedding header needs re_z/im_z column pairs");
  const int n = static_cast<int>(n_image_cols / 2);
  for (int i = 0; i < n; ++i) {
    const std::string idx = std::to_string(i + 1);
    if (header[first_image + 2 * i] != "re_z" + idx || header[first_image + 2 * i + 1] != "im_z" + idx)
      throw Error(ErrorCode::invalid_config, "embedding header columns out of order at z" + idx);
  }
  Embedding e;
  e.kind = DomainKind::user;
  e.param_dim = static_cast<int>(first_image);
  e.target_n = n;
  e.rule.domain = {DomainKind::user, static_cast<int>(first_image)};
  e.label = "user";
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = detail::split_csv_line(line);
    if (cells.size() != header.size())
      throw Error(ErrorCode::invalid_config, "embedding row " + std::to_string(row) + " has wrong column count", row);
    std::vector<double> vals;
    for (const auto& c : cells) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(c, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != c.size() || !std::isfinite(v))
        throw Error(ErrorCode::invalid_config, "embedding row " + std::to_string(row) + " has a bad number", row);
      vals.push_back(v);
    }
    ChartPoint z(n);
    for (int i = 0; i < n; ++i) z(i) = {vals[first_image + 2 * i], vals[first_image + 2 * i + 1]};
    const double w = vals.back();
    if (!(w > 0.0)) throw Error(ErrorCode::invalid_config, "embedding weights must be positive", row);
    e.rule.nodes.push_back(z);
    e.rule.weights.push_back(w);
    e.rule.params.emplace_back(vals.begin(), vals.begin() + static_cast<std::ptrdiff_t>(first_image));
  }
  if (e.rule.size() == 0) throw Error(ErrorCode::invalid_config, "embedding has no records");
  if (std::abs(e.rule.total_mass() - 1.0) > 1e-10)
    throw Error(ErrorCode::invalid_config, "embedding weights must sum to 1");
  return e;
}

inline Embedding load_user_embedding(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::invalid_config, "cannot open embedding file " + path);
  return parse_user_embedding(in);
}

struct RankReport {
  Eigen::Index raw_dim = 0;
  Eigen::Index rank = 0;
  std::vector<Eigen::Index> kept;
  std::vector<Eigen::Index> discarded;
  double min_chi2 = 0.0;  // over rule nodes
};

struct PullbackModel {
  QuantModel model;
  RankReport rank;
  Embedding embedding;
};

/// Pulls the degree <= k monomial sections of H^k on the CP^n chart back
/// along the embedding, with the ambient weight (1+|z|^2)^{-k} evaluated on
/// the image. Model points are image points.
inline PullbackModel make_pullback_model(const Embedding& emb, int k) {
  if (k < 0) throw Error(ErrorCode::invalid_argument, "bundle power must be >= 0");
  if (emb.rule.size() == 0) throw Error(ErrorCode::empty_model, "embedding has no nodes");
  const int n = emb.target_n;
  PullbackModel pm;
  pm.embedding = emb;
  QuantModel& m = pm.model;
  m.name = "pullback(" + emb.label + ",n=" + std::to_string(n) + ",k=" + std::to_string(k) + ")";
  m.domain = {emb.kind, emb.param_dim};
  m.point_dim = n;
  m.chart_n = n;
  m.level = k;
  m.monomials = monomial_basis(n, k);
  const auto basis = m.monomials;
  m.raw_eval = [basis](const ChartPoint& z) { return eval_monomials(basis, z); };
  m.weight = [k](const ChartPoint& z) { return std::pow(1.0 + z.squaredNorm(), -static_cast<double>(k)); };
  m.rule = emb.rule;

  const auto nodes = emb.rule.nodes;
  if (emb.kind == DomainKind::circle || emb.kind == DomainKind::torus) {
    m.in_domain = [](const ChartPoint& z) {
      for (Eigen::Index i = 0; i < z.size(); ++i)
        if (std::abs(std::abs(z(i)) - 1.0) > 1e-9) return false;
      return true;
    };
    const auto map = emb.map;
    const int d = emb.param_dim;
    m.sampler = [map, d](Rng& rng) {
      std::vector<double> t(static_cast<std::size_t>(d));
      for (double& x : t) x = 2.0 * std::numbers::pi * uniform01(rng);
      return map(t);
    };
    m.probes = [map, d](std::size_t count, Rng& rng) {
      std::vector<ChartPoint> out;
      const double offset = 2.0 * std::numbers::pi * uniform01(rng);
      if (d == 1) {
        for (std::size_t s = 0; s < count; ++s) {
          const double t = offset + 2.0 * std::numbers::pi * static_cast<double>(s) / static_cast<double>(count);
          out.push_back(map(std::span<const double>(&t, 1)));
        }
        return out;
      }
      const auto side = static_cast<std::size_t>(std::ceil(std::pow(static_cast<double>(count), 1.0 / d)));
      std::size_t total = 1;
      for (int i = 0; i < d; ++i) total *= side;
      for (std::size_t flat = 0; flat < total; ++flat) {
        std::vector<double> t(static_cast<std::size_t>(d));
        std::size_t rem = flat;
        for (int i = d - 1; i >= 0; --i) {
          t[static_cast<std::size_t>(i)] =
              offset / (i + 1) + 2.0 * std::numbers::pi * static_cast<double>(rem % side) / static_cast<double>(side);
          rem /= side;
        }
        out.push_back(map(t));
      }
      return out;
    };
  } else {
    m.in_domain = [nodes](const ChartPoint& z) {
      for (const ChartPoint& p : nodes)
        if (p.size() == z.size() && (p - z).norm() <= 1e-9 * (1.0 + z.norm())) return true;
      return false;
    };
    m.sampler = [nodes](Rng& rng) {
      return nodes[std::uniform_int_distribution<std::size_t>(0, nodes.size() - 1)(rng)];
    };
    m.probes = [nodes](std::size_t, Rng&) { return nodes; };
  }

  const CMatrix G = gram_matrix(m);
  pm.rank.raw_dim = G.rows();
  try {
    m.ortho = orthonormalize(G);
    for (Eigen::Index a = 0; a < G.rows(); ++a) pm.rank.kept.push_back(a);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::degenerate_basis) throw;
    SubspaceTransform sub = orthonormalize_subspace(G);
    m.ortho = sub.ortho;
    pm.rank.kept = sub.kept;
    pm.rank.discarded = sub.discarded;
  }
  pm.rank.rank = m.ortho.cols();
  if (pm.rank.rank == 0) throw Error(ErrorCode::empty_model, "pullback sections span nothing");
  m.s0 = SectionVec::Zero(m.ortho.cols());
  m.s0(0) = 1.0;

  pm.rank.min_chi2 = std::numeric_limits<double>::infinity();
  for (const ChartPoint& p : m.rule.nodes) {
    const CVector v = m.ortho.transpose() * m.raw_eval(p);
    pm.rank.min_chi2 = std::min(pm.rank.min_chi2, v.squaredNorm() * m.weight(p));
  }
  if (!(pm.rank.min_chi2 > 0.0))
    throw Error(ErrorCode::degenerate_basis, "pullback basis has a common zero on the nodes");
  return pm;
}

/// Node counts that make Gram and resolution integrands exact trigonometric sums.
inline PullbackModel circle_pullback(int k) { return make_pullback_model(circle_embedding(2 * k + 2), k); }
inline PullbackModel torus_pullback(int d, int k) {
  return make_pullback_model(torus_embedding(d, static_cast<std::size_t>(2 * k + 2)), k);
}

inline CoherentState pullback_coherent(const PullbackModel& pm, std::span<const double> params) {
  if (!pm.embedding.map) throw Error(ErrorCode::invalid_argument, "user embeddings have no parameter map");
  if (static_cast<int>(params.size()) != pm.embedding.param_dim)
    throw Error(ErrorCode::dimension_mismatch, "parameter point has wrong dimension");
  return coherent_state(pm.model, pm.embedding.map(params));
}

}  // namespace cstate
