// Copyright (c) 2026 The stratobranch authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <vector>

#include "stratobranch/lp.hpp"
#include "stratobranch/milp.hpp"

namespace stratobranch {

// Frozen feature column order. docs/feature_columns.md mirrors this table;
// the sample container stores matrices in exactly this layout.
namespace vcol {
enum : int {
  kTypeBinary = 0,
  kTypeInteger,
  kTypeImplicitInt,
  kTypeContinuous,
  kObjCoef,
  kHasLb,
  kHasUb,
  kSolAtLb,
  kSolAtUb,
  kSolFrac,
  kBasisBasic,
  kBasisAtLower,
  kBasisAtUpper,
  kBasisFree,
  kReducedCost,
  kAge,
  kSolVal,
  kIncVal,
  kAvgIncVal,
  kCount,  // 19
};
}
namespace ccol {
enum : int {
  kObjCosSim = 0,
  kBias,
  kIsTight,
  kDualVal,
  kAge,
  kCount,  // 5
};
}

struct BipartiteGraph {
  int n_cons = 0;
  int n_vars = 0;
  Eigen::MatrixXd C;  // n_cons x 5
  Eigen::MatrixXd V;  // n_vars x 19
  struct Edge {
    std::int32_t cons = 0;
    std::int32_t var = 0;
    Real coef = 0.0;
  };
  std::vector<Edge> edges;
  std::vector<bool> cand_mask;

  void check_invariants() const;  // one-hot sums, ranges, finiteness
};

// Per-solve feature bookkeeping: incumbents found so far plus the age
// counters, defined as consecutive LP observations since the tracked value
// (variable solution value / constraint tightness) last changed.
struct SolverState {
  std::vector<std::vector<Real>> incumbents;
  std::vector<Real> incumbent_objs;
  std::vector<std::int32_t> var_age, cons_age;
  std::vector<Real> var_last;
  std::vector<std::uint8_t> cons_last_tight;
  bool observed_once = false;

  void init(int n_vars, int n_cons);
  void observe(const MilpInstance& inst, const std::vector<Real>& x);
  void add_incumbent(const std::vector<Real>& x, Real obj);
};

// Fractional part with integrality snapping: values within int_tol of an
// integer report 0. Continuous variables always report 0.
Real snapped_frac(Real x, Real int_tol = kDefaultTol.int_tol);

std::vector<int> fractional_candidates(const MilpInstance& inst, const std::vector<Real>& x,
                                       Real int_tol = kDefaultTol.int_tol);

// Assembles the bipartite graph of one node. node_lb/node_ub are the node's
// tightened bounds; lp must be optimal.
BipartiteGraph build_graph(const MilpInstance& inst, const std::vector<Real>& node_lb,
                           const std::vector<Real>& node_ub, const LpResult& lp,
                           const SolverState& state, int depth);

// Per-column standardization statistics (population std, floored at 1e-8).
struct FeatureStats {
  Eigen::VectorXd v_mean{19}, v_std{19};
  Eigen::VectorXd c_mean{5}, c_std{5};
  Real e_mean = 0.0, e_std = 1.0;

  std::uint64_t fingerprint() const;
};

FeatureStats normalize_dataset_stats(const std::vector<const BipartiteGraph*>& graphs);
BipartiteGraph standardize(const BipartiteGraph& g, const FeatureStats& stats);

}  // namespace stratobranch
