// Copyright (c) 2026 The stratobranch authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "stratobranch/graph.hpp"
#include "stratobranch/lp.hpp"

namespace stratobranch {

// Score contribution of an LP-infeasible child. Deliberately an absolute
// constant: a cap scaled by the node bound would not survive the
// objective-offset of equivalent-instance transformations, while argmax
// semantics (prefer variables that prune) are preserved either way.
inline constexpr Real kSbInfCap = 1e9;

struct BnbNode {
  int id = 0;
  int parent_id = -1;
  int depth = 0;
  std::vector<Real> lb, ub;  // tightened copies of the instance bounds
  LpResult lp;
  std::vector<int> candidates;
};

struct SbScore {
  int var = -1;
  Real delta_down = 0.0, delta_up = 0.0;
  Real score = 0.0;
  bool down_feasible = true, up_feasible = true;
};

enum class SolveStatus : std::uint8_t { kOptimal, kInfeasible, kLimit };

struct BranchDecision {
  int node_id = 0, depth = 0, n_cand = 0, chosen_var = -1;
};

struct SolveReport {
  SolveStatus status = SolveStatus::kLimit;
  bool has_incumbent = false;
  Real incumbent_obj = kInf;
  std::vector<Real> incumbent;
  std::int64_t nodes = 0;
  Real wall_seconds = 0.0;
  Real root_bound = 0.0;
  int root_candidates = 0;
  std::vector<BranchDecision> decisions;
};

struct SolveLimits {
  std::int64_t max_nodes = -1;  // < 0: unlimited
  Real max_seconds = -1.0;
};

// Everything a branching rule may ask about the node being processed.
// Strong-branching scores and the feature graph are computed lazily and
// cached for the node's lifetime.
class NodeContext {
 public:
  NodeContext(const MilpInstance& inst, const BnbNode& node, const SolverState& state,
              int n_root_candidates, const LpOptions& opts)
      : inst_(inst), node_(node), state_(state), n_root_(n_root_candidates), opts_(opts) {}

  const MilpInstance& instance() const { return inst_; }
  const BnbNode& node() const { return node_; }
  const SolverState& state() const { return state_; }
  const std::vector<int>& candidates() const { return node_.candidates; }
  int n_root_candidates() const { return n_root_; }

  const SbScore& sb_score(int var);
  const std::vector<SbScore>& sb_all();
  const BipartiteGraph& graph();

 private:
  const MilpInstance& inst_;
  const BnbNode& node_;
  const SolverState& state_;
  int n_root_;
  const LpOptions& opts_;
  std::vector<std::optional<SbScore>> sb_cache_;
  std::optional<std::vector<SbScore>> sb_all_;
  std::optional<BipartiteGraph> graph_;
};

class BranchingPolicy {
 public:
  virtual ~BranchingPolicy() = default;
  virtual std::string name() const = 0;
  virtual int choose(NodeContext& ctx) = 0;
  virtual void begin_solve(std::uint64_t /*seed*/) {}
};

// Evaluates one candidate: bound improvements of the two tentative children.
SbScore sb_score(const MilpInstance& inst, const BnbNode& node, int var,
                 const LpOptions& opts = {});

// Argmax of the strong-branching scores, lowest variable index on ties.
std::pair<int, std::vector<SbScore>> full_strong_branch(const MilpInstance& inst,
                                                        const BnbNode& node,
                                                        const LpOptions& opts = {});

std::unique_ptr<BranchingPolicy> make_strong_branching_policy();
std::unique_ptr<BranchingPolicy> make_random_policy(std::uint64_t seed);

using NodeObserver = std::function<void(NodeContext&, int chosen_var)>;

// Best-bound branch-and-bound. Deterministic for a fixed policy and seed.
SolveReport solve(const MilpInstance& inst, BranchingPolicy& policy, const SolveLimits& limits,
                  const NodeObserver& observer = {}, const LpOptions& opts = {},
                  std::uint64_t seed = 0);

}  // namespace stratobranch
