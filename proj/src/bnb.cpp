// Copyright (c) 2026 The stratobranch authors
// SPDX-License-Identifier: Apache-2.0
#include "stratobranch/bnb.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <queue>

namespace stratobranch {

namespace {

LpResult solve_child(const MilpInstance& inst, const BnbNode& parent, int var, bool down,
                     const LpOptions& opts) {
  std::vector<Real> lb = parent.lb, ub = parent.ub;
  const Real x = parent.lp.x[var];
  if (down)
    ub[var] = std::floor(x);
  else
    lb[var] = std::ceil(x);
  LpResult lp = lp_solve_bounded(inst, lb, ub, opts);
  if (lp.status == LpStatus::kIterationLimit)
    throw Error("child LP hit the pivot limit at node " + std::to_string(parent.id));
  if (lp.status == LpStatus::kUnbounded)
    throw Error("child LP unbounded below a bounded parent (numerical failure)");
  return lp;
}

}  // namespace

SbScore sb_score(const MilpInstance& inst, const BnbNode& node, int var, const LpOptions& opts) {
  SbScore s;
  s.var = var;
  const Real z = node.lp.obj;
  const LpResult down = solve_child(inst, node, var, /*down=*/true, opts);
  const LpResult up = solve_child(inst, node, var, /*down=*/false, opts);
  s.down_feasible = down.status == LpStatus::kOptimal;
  s.up_feasible = up.status == LpStatus::kOptimal;
  s.delta_down = s.down_feasible ? down.obj - z : kSbInfCap;
  s.delta_up = s.up_feasible ? up.obj - z : kSbInfCap;
  s.score = s.delta_down + s.delta_up;
  return s;
}

std::pair<int, std::vector<SbScore>> full_strong_branch(const MilpInstance& inst,
                                                        const BnbNode& node,
                                                        const LpOptions& opts) {
  if (node.candidates.empty()) throw Error("full_strong_branch: empty candidate set");
  std::vector<SbScore> scores;
  scores.reserve(node.candidates.size());
  int best = node.candidates.front();
  Real best_score = -kInf;
  for (int var : node.candidates) {
    scores.push_back(sb_score(inst, node, var, opts));
    if (scores.back().score > best_score) {
      best_score = scores.back().score;
      best = var;
    }
  }
  return {best, std::move(scores)};
}

const SbScore& NodeContext::sb_score(int var) {
  if (sb_cache_.empty()) sb_cache_.resize(inst_.n_vars);
  if (!sb_cache_[var]) sb_cache_[var] = stratobranch::sb_score(inst_, node_, var, opts_);
  return *sb_cache_[var];
}

const std::vector<SbScore>& NodeContext::sb_all() {
  if (!sb_all_) {
    std::vector<SbScore> scores;
    scores.reserve(node_.candidates.size());
    for (int var : node_.candidates) scores.push_back(sb_score(var));
    sb_all_ = std::move(scores);
  }
  return *sb_all_;
}

const BipartiteGraph& NodeContext::graph() {
  if (!graph_) graph_ = build_graph(inst_, node_.lb, node_.ub, node_.lp, state_, node_.depth);
  return *graph_;
}

namespace {

class StrongBranchingPolicy final : public BranchingPolicy {
 public:
  std::string name() const override { return "strong-branching"; }
  int choose(NodeContext& ctx) override {
    const auto& scores = ctx.sb_all();
    int best = ctx.candidates().front();
    Real best_score = -kInf;
    for (const SbScore& s : scores)
      if (s.score > best_score) {
        best_score = s.score;
        best = s.var;
      }
    return best;
  }
};

class RandomPolicy final : public BranchingPolicy {
 public:
  explicit RandomPolicy(std::uint64_t seed) : seed_(seed), rng_(seed) {}
  std::string name() const override { return "random"; }
  void begin_solve(std::uint64_t seed) override { rng_ = Rng(seed_ ^ seed); }
  int choose(NodeContext& ctx) override {
    const auto& cand = ctx.candidates();
    return cand[static_cast<std::size_t>(rng_.uniform_int(0, static_cast<int>(cand.size()) - 1))];
  }

 private:
  std::uint64_t seed_;
  Rng rng_;
};

}  // namespace

std::unique_ptr<BranchingPolicy> make_strong_branching_policy() {
  return std::make_unique<StrongBranchingPolicy>();
}

std::unique_ptr<BranchingPolicy> make_random_policy(std::uint64_t seed) {
  return std::make_unique<RandomPolicy>(seed);
}

SolveReport solve(const MilpInstance& inst, BranchingPolicy& policy, const SolveLimits& limits,
                  const NodeObserver& observer, const LpOptions& opts, std::uint64_t seed) {
  inst.validate();
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&t0] {
    return std::chrono::duration<Real>(std::chrono::steady_clock::now() - t0).count();
  };

  SolveReport report;
  policy.begin_solve(seed);

  BnbNode root;
  root.id = 0;
  root.depth = 0;
  root.lb = inst.lb;
  root.ub = inst.ub;
  root.lp = lp_solve(inst, opts);
  if (root.lp.status == LpStatus::kIterationLimit)
    throw Error("root LP hit the pivot limit");
  if (root.lp.status == LpStatus::kUnbounded)
    throw Error("LP relaxation is unbounded; instance rejected");
  if (root.lp.status == LpStatus::kInfeasible) {
    report.status = SolveStatus::kInfeasible;
    report.nodes = 1;
    report.wall_seconds = elapsed();
    return report;
  }
  root.candidates = fractional_candidates(inst, root.lp.x);
  report.root_bound = root.lp.obj;
  report.root_candidates = static_cast<int>(root.candidates.size());

  SolverState state;
  state.init(inst.n_vars, inst.n_cons());

  // Best-bound: lowest LP bound first, then lowest node id.
  struct QueueEntry {
    Real bound;
    int id;
    std::shared_ptr<BnbNode> node;
    bool operator>(const QueueEntry& o) const {
      return bound != o.bound ? bound > o.bound : id > o.id;
    }
  };
  std::priority_queue<QueueEntry, std::vector<QueueEntry>, std::greater<QueueEntry>> queue;
  queue.push({root.lp.obj, 0, std::make_shared<BnbNode>(std::move(root))});
  int next_id = 1;

  bool hit_limit = false;
  while (!queue.empty()) {
    if (limits.max_nodes >= 0 && report.nodes >= limits.max_nodes) {
      hit_limit = true;
      break;
    }
    if (limits.max_seconds >= 0.0 && elapsed() > limits.max_seconds) {
      hit_limit = true;
      break;
    }
    const QueueEntry entry = queue.top();
    queue.pop();
    BnbNode& node = *entry.node;
    ++report.nodes;

    if (report.has_incumbent && node.lp.obj >= report.incumbent_obj - 1e-9) continue;

    state.observe(inst, node.lp.x);

    if (node.candidates.empty()) {
      if (!report.has_incumbent || node.lp.obj < report.incumbent_obj) {
        report.has_incumbent = true;
        report.incumbent_obj = node.lp.obj;
        report.incumbent = node.lp.x;
        state.add_incumbent(node.lp.x, node.lp.obj);
      }
      continue;
    }

    NodeContext ctx(inst, node, state, report.root_candidates, opts);
    const int chosen = policy.choose(ctx);
    if (std::find(node.candidates.begin(), node.candidates.end(), chosen) ==
        node.candidates.end())
      throw Error("policy '" + policy.name() + "' chose a non-candidate variable");
    if (observer) observer(ctx, chosen);
    report.decisions.push_back(
        {node.id, node.depth, static_cast<int>(node.candidates.size()), chosen});

    for (const bool down : {true, false}) {
      LpResult lp = solve_child(inst, node, chosen, down, opts);
      if (lp.status != LpStatus::kOptimal) continue;  // infeasible child pruned
      if (report.has_incumbent && lp.obj >= report.incumbent_obj - 1e-9) continue;
      auto child = std::make_shared<BnbNode>();
      child->id = next_id++;
      child->parent_id = node.id;
      child->depth = node.depth + 1;
      child->lb = node.lb;
      child->ub = node.ub;
      if (down)
        child->ub[chosen] = std::floor(node.lp.x[chosen]);
      else
        child->lb[chosen] = std::ceil(node.lp.x[chosen]);
      child->lp = std::move(lp);
      child->candidates = fractional_candidates(inst, child->lp.x);
      queue.push({child->lp.obj, child->id, std::move(child)});
    }
  }

  report.status = hit_limit ? SolveStatus::kLimit
                            : (report.has_incumbent ? SolveStatus::kOptimal
                                                    : SolveStatus::kInfeasible);
  report.wall_seconds = elapsed();
  return report;
}

}  // namespace stratobranch
