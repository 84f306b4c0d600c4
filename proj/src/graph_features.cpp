// Copyright (c) 2026 The stratobranch authors
// SPDX-License-Identifier: Apache-2.0
#include "stratobranch/graph.hpp"

#include <cmath>

namespace stratobranch {

void BipartiteGraph::check_invariants() const {
  auto one_hot = [&](const Eigen::MatrixXd& m, int row, int from, int count) {
    Real sum = 0.0;
    for (int c = from; c < from + count; ++c) {
      const Real v = m(row, c);
      if (v != 0.0 && v != 1.0) throw Error("one-hot entry not in {0,1}");
      sum += v;
    }
    if (sum != 1.0) throw Error("one-hot block does not sum to 1");
  };
  for (int i = 0; i < n_cons; ++i) {
    const Real tight = C(i, ccol::kIsTight);
    if (tight != 0.0 && tight != 1.0) throw Error("is_tight not an indicator");
    for (int c = 0; c < ccol::kCount; ++c)
      if (!std::isfinite(C(i, c))) throw Error("non-finite constraint feature");
  }
  for (int j = 0; j < n_vars; ++j) {
    one_hot(V, j, vcol::kTypeBinary, 4);
    one_hot(V, j, vcol::kBasisBasic, 4);
    for (int c : {vcol::kHasLb, vcol::kHasUb, vcol::kSolAtLb, vcol::kSolAtUb}) {
      const Real v = V(j, c);
      if (v != 0.0 && v != 1.0) throw Error("indicator feature not in {0,1}");
    }
    const Real frac = V(j, vcol::kSolFrac);
    if (!(frac >= 0.0 && frac < 1.0)) throw Error("sol_frac outside [0,1)");
    for (int c = 0; c < vcol::kCount; ++c)
      if (!std::isfinite(V(j, c))) throw Error("non-finite variable feature");
  }
  for (const Edge& e : edges) {
    if (e.cons < 0 || e.cons >= n_cons || e.var < 0 || e.var >= n_vars)
      throw Error("edge endpoint out of range");
    if (!std::isfinite(e.coef)) throw Error("non-finite edge coefficient");
  }
  if (static_cast<int>(cand_mask.size()) != n_vars) throw Error("candidate mask length");
}

void SolverState::init(int n_vars, int n_cons) {
  incumbents.clear();
  incumbent_objs.clear();
  var_age.assign(n_vars, 0);
  cons_age.assign(n_cons, 0);
  var_last.assign(n_vars, 0.0);
  cons_last_tight.assign(n_cons, 0);
  observed_once = false;
}

namespace {

bool row_is_tight(const ConsRow& row, const std::vector<Real>& x) {
  Real lhs = 0.0;
  for (const auto& [j, a] : row.coefs) lhs += a * x[j];
  return std::abs(lhs - row.rhs) <= 1e-6 * (1.0 + std::abs(row.rhs));
}

}  // namespace

void SolverState::observe(const MilpInstance& inst, const std::vector<Real>& x) {
  if (!observed_once) {
    observed_once = true;
    var_last = x;
    for (int i = 0; i < inst.n_cons(); ++i)
      cons_last_tight[i] = row_is_tight(inst.rows[i], x) ? 1 : 0;
    return;  // ages stay 0 on the first observation
  }
  for (int j = 0; j < inst.n_vars; ++j) {
    if (std::abs(x[j] - var_last[j]) > 1e-9) {
      var_age[j] = 0;
      var_last[j] = x[j];
    } else {
      ++var_age[j];
    }
  }
  for (int i = 0; i < inst.n_cons(); ++i) {
    const std::uint8_t tight = row_is_tight(inst.rows[i], x) ? 1 : 0;
    if (tight != cons_last_tight[i]) {
      cons_age[i] = 0;
      cons_last_tight[i] = tight;
    } else {
      ++cons_age[i];
    }
  }
}

void SolverState::add_incumbent(const std::vector<Real>& x, Real obj) {
  incumbents.push_back(x);
  incumbent_objs.push_back(obj);
}

Real snapped_frac(Real x, Real int_tol) {
  const Real frac = x - std::floor(x);
  if (std::min(frac, 1.0 - frac) <= int_tol) return 0.0;
  return frac;
}

std::vector<int> fractional_candidates(const MilpInstance& inst, const std::vector<Real>& x,
                                       Real int_tol) {
  std::vector<int> cand;
  for (int j = 0; j < inst.n_vars; ++j)
    if (inst.int_mask[j] && snapped_frac(x[j], int_tol) != 0.0) cand.push_back(j);
  return cand;
}

BipartiteGraph build_graph(const MilpInstance& inst, const std::vector<Real>& node_lb,
                           const std::vector<Real>& node_ub, const LpResult& lp,
                           const SolverState& state, int depth) {
  if (lp.status != LpStatus::kOptimal) throw Error("build_graph needs an optimal LP");
  const int n = inst.n_vars, q = inst.n_cons();
  BipartiteGraph g;
  g.n_cons = q;
  g.n_vars = n;
  g.C.setZero(q, ccol::kCount);
  g.V.setZero(n, vcol::kCount);

  Real c_norm = 0.0;
  for (Real c : inst.obj) c_norm += c * c;
  c_norm = std::sqrt(c_norm);
  const Real c_denom = c_norm + 1e-8;
  const Real age_scale = 1.0 / (1.0 + static_cast<Real>(depth) * static_cast<Real>(q));

  for (int i = 0; i < q; ++i) {
    const ConsRow& row = inst.rows[i];
    Real a_norm = 0.0, dot = 0.0, lhs = 0.0;
    for (const auto& [j, a] : row.coefs) {
      a_norm += a * a;
      dot += a * inst.obj[j];
      lhs += a * lp.x[j];
    }
    a_norm = std::sqrt(a_norm);
    g.C(i, ccol::kObjCosSim) = c_norm == 0.0 ? 0.0 : dot / (a_norm * c_norm);
    g.C(i, ccol::kBias) = row.rhs / a_norm;
    g.C(i, ccol::kIsTight) =
        std::abs(lhs - row.rhs) <= 1e-6 * (1.0 + std::abs(row.rhs)) ? 1.0 : 0.0;
    g.C(i, ccol::kDualVal) = lp.duals[i] / (a_norm * c_norm + 1e-8);
    g.C(i, ccol::kAge) = static_cast<Real>(state.cons_age[i]) * age_scale;
    for (const auto& [j, a] : row.coefs)
      g.edges.push_back({static_cast<std::int32_t>(i), static_cast<std::int32_t>(j), a / a_norm});
  }

  const bool has_inc = !state.incumbents.empty();
  g.cand_mask.assign(n, false);
  for (int j = 0; j < n; ++j) {
    switch (inst.kinds[j]) {
      case VarKind::kBinary: g.V(j, vcol::kTypeBinary) = 1.0; break;
      case VarKind::kInteger: g.V(j, vcol::kTypeInteger) = 1.0; break;
      case VarKind::kImplicitInteger: g.V(j, vcol::kTypeImplicitInt) = 1.0; break;
      case VarKind::kContinuous: g.V(j, vcol::kTypeContinuous) = 1.0; break;
    }
    g.V(j, vcol::kObjCoef) = inst.obj[j] / c_denom;
    const Real lb = node_lb[j], ub = node_ub[j];
    const bool has_lb = std::isfinite(lb), has_ub = std::isfinite(ub);
    g.V(j, vcol::kHasLb) = has_lb ? 1.0 : 0.0;
    g.V(j, vcol::kHasUb) = has_ub ? 1.0 : 0.0;
    const Real x = lp.x[j];
    g.V(j, vcol::kSolAtLb) =
        has_lb && std::abs(x - lb) <= 1e-6 * std::max(1.0, std::abs(lb)) ? 1.0 : 0.0;
    g.V(j, vcol::kSolAtUb) =
        has_ub && std::abs(x - ub) <= 1e-6 * std::max(1.0, std::abs(ub)) ? 1.0 : 0.0;
    const Real frac = inst.int_mask[j] ? snapped_frac(x) : 0.0;
    g.V(j, vcol::kSolFrac) = frac;
    if (inst.int_mask[j] && frac != 0.0) g.cand_mask[j] = true;
    switch (lp.basis[j]) {
      case BasisStatus::kBasic: g.V(j, vcol::kBasisBasic) = 1.0; break;
      case BasisStatus::kAtLower: g.V(j, vcol::kBasisAtLower) = 1.0; break;
      case BasisStatus::kAtUpper: g.V(j, vcol::kBasisAtUpper) = 1.0; break;
      case BasisStatus::kFree: g.V(j, vcol::kBasisFree) = 1.0; break;
    }
    g.V(j, vcol::kReducedCost) = lp.reduced_costs[j] / c_denom;
    g.V(j, vcol::kAge) = static_cast<Real>(state.var_age[j]) * age_scale;
    g.V(j, vcol::kSolVal) = x;
    if (has_inc) {
      g.V(j, vcol::kIncVal) = state.incumbents.back()[j];
      Real avg = 0.0;
      for (const auto& inc : state.incumbents) avg += inc[j];
      g.V(j, vcol::kAvgIncVal) = avg / static_cast<Real>(state.incumbents.size());
    }
  }
  return g;
}

std::uint64_t FeatureStats::fingerprint() const {
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto mix = [&h](const double* p, std::size_t count) { h = fnv1a64(p, count * sizeof(double), h); };
  mix(v_mean.data(), 19);
  mix(v_std.data(), 19);
  mix(c_mean.data(), 5);
  mix(c_std.data(), 5);
  mix(&e_mean, 1);
  mix(&e_std, 1);
  return h;
}

FeatureStats normalize_dataset_stats(const std::vector<const BipartiteGraph*>& graphs) {
  if (graphs.size() < 2) throw Error("normalize_dataset_stats needs at least 2 samples");
  FeatureStats s;
  s.v_mean.setZero();
  s.v_std.setZero();
  s.c_mean.setZero();
  s.c_std.setZero();

  // Stacked-row population moments per column.
  std::int64_t v_rows = 0, c_rows = 0, e_rows = 0;
  Eigen::VectorXd v_sum = Eigen::VectorXd::Zero(19), v_sq = Eigen::VectorXd::Zero(19);
  Eigen::VectorXd c_sum = Eigen::VectorXd::Zero(5), c_sq = Eigen::VectorXd::Zero(5);
  Real e_sum = 0.0, e_sq = 0.0;
  for (const BipartiteGraph* g : graphs) {
    v_rows += g->n_vars;
    c_rows += g->n_cons;
    v_sum += g->V.colwise().sum();
    v_sq += g->V.array().square().matrix().colwise().sum();
    c_sum += g->C.colwise().sum();
    c_sq += g->C.array().square().matrix().colwise().sum();
    for (const auto& e : g->edges) {
      e_sum += e.coef;
      e_sq += e.coef * e.coef;
      ++e_rows;
    }
  }
  if (v_rows == 0 || c_rows == 0 || e_rows == 0) throw Error("empty dataset");
  auto finish = [](Eigen::VectorXd& mean, Eigen::VectorXd& std, const Eigen::VectorXd& sum,
                   const Eigen::VectorXd& sq, std::int64_t rows) {
    mean = sum / static_cast<Real>(rows);
    for (int c = 0; c < mean.size(); ++c) {
      const Real var = std::max(0.0, sq[c] / static_cast<Real>(rows) - mean[c] * mean[c]);
      std[c] = std::max(std::sqrt(var), 1e-8);
    }
  };
  finish(s.v_mean, s.v_std, v_sum, v_sq, v_rows);
  finish(s.c_mean, s.c_std, c_sum, c_sq, c_rows);
  s.e_mean = e_sum / static_cast<Real>(e_rows);
  s.e_std = std::max(std::sqrt(std::max(0.0, e_sq / static_cast<Real>(e_rows) - s.e_mean * s.e_mean)),
                     1e-8);
  return s;
}

BipartiteGraph standardize(const BipartiteGraph& g, const FeatureStats& stats) {
  BipartiteGraph out = g;
  for (int c = 0; c < 19; ++c)
    out.V.col(c) = (g.V.col(c).array() - stats.v_mean[c]) / stats.v_std[c];
  for (int c = 0; c < 5; ++c)
    out.C.col(c) = (g.C.col(c).array() - stats.c_mean[c]) / stats.c_std[c];
  for (auto& e : out.edges) e.coef = (e.coef - stats.e_mean) / stats.e_std;
  return out;
}

}  // namespace stratobranch
