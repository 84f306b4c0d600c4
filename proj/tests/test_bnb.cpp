// Copyright (c) 2026 The stratobranch authors
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>

#include "stratobranch/instance_gen.hpp"
#include "stratobranch/randmilp.hpp"
#include "stratobranch/sample.hpp"
#include "support/test_util.hpp"

using namespace stratobranch;

namespace {

BnbNode root_node(const MilpInstance& inst) {
  BnbNode node;
  node.id = 0;
  node.depth = 0;
  node.lb = inst.lb;
  node.ub = inst.ub;
  node.lp = lp_solve(inst);
  REQUIRE(node.lp.status == LpStatus::kOptimal);
  node.candidates = fractional_candidates(inst, node.lp.x);
  return node;
}

}  // namespace

TEST_CASE("fractional candidate detection") {
  const MilpInstance inst = testutil::make_two_var();
  CHECK(fractional_candidates(inst, {1.0, 0.5}) == std::vector<int>{1});
  CHECK(fractional_candidates(inst, {1.0, 0.0}).empty());
  const BnbNode root = root_node(testutil::make_knapsack());
  CHECK_FALSE(root.candidates.empty());
}

TEST_CASE("strong-branching score on the two-variable example") {
  const MilpInstance inst = testutil::make_two_var();
  const BnbNode root = root_node(inst);
  REQUIRE(root.lp.obj == doctest::Approx(-1.5));
  REQUIRE(root.candidates.size() == 1);
  const int j = root.candidates[0];

  const SbScore s = sb_score(inst, root, j);
  CHECK(s.delta_down == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(s.delta_up == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(s.score == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(s.delta_down >= -1e-6);
  CHECK(s.delta_up >= -1e-6);
}

TEST_CASE("symmetric candidates score equally and ties pick the lower index") {
  // Two decoupled copies of the two-variable example: x2 and x4 are
  // interchangeable, both fractional at the root vertex.
  MilpInstance inst;
  inst.name = "sym_pair";
  inst.n_vars = 4;
  inst.obj = {-1, -1, -1, -1};
  inst.lb = {0, 0, 0, 0};
  inst.ub = {1, 1, 1, 1};
  inst.int_mask = {true, true, true, true};
  inst.kinds.assign(4, VarKind::kBinary);
  ConsRow r1, r2;
  r1.coefs = {{0, 1.0}, {1, 1.0}};
  r1.rhs = 1.5;
  r2.coefs = {{2, 1.0}, {3, 1.0}};
  r2.rhs = 1.5;
  inst.rows = {r1, r2};

  const BnbNode root = root_node(inst);
  REQUIRE(root.candidates.size() >= 2);
  auto [best, scores] = full_strong_branch(inst, root);
  for (std::size_t k = 1; k < scores.size(); ++k)
    CHECK(scores[k].score == doctest::Approx(scores[0].score).epsilon(1e-9));
  CHECK(best == root.candidates.front());
}

TEST_CASE("both children infeasible caps the score") {
  // 0.4 <= x <= 0.6 with x integer: both tentative branches are empty.
  MilpInstance inst;
  inst.name = "cap";
  inst.n_vars = 1;
  inst.obj = {-1.0};
  inst.lb = {0.0};
  inst.ub = {1.0};
  inst.int_mask = {true};
  inst.kinds = {VarKind::kBinary};
  ConsRow up, down;
  up.coefs = {{0, 1.0}};
  up.rhs = 0.6;
  down.coefs = {{0, -1.0}};
  down.rhs = -0.4;
  inst.rows = {up, down};

  const BnbNode root = root_node(inst);
  REQUIRE(root.candidates == std::vector<int>{0});
  const SbScore s = sb_score(inst, root, 0);
  CHECK_FALSE(s.down_feasible);
  CHECK_FALSE(s.up_feasible);
  CHECK(s.score == 2.0 * kSbInfCap);
}

TEST_CASE("single candidate short-circuits to itself") {
  const MilpInstance inst = testutil::make_two_var();
  const BnbNode root = root_node(inst);
  auto [best, scores] = full_strong_branch(inst, root);
  CHECK(best == root.candidates[0]);
  CHECK(scores.size() == 1);
}

TEST_CASE("knapsack argmax matches per-candidate recomputation") {
  const MilpInstance inst = testutil::make_knapsack();
  const BnbNode root = root_node(inst);
  auto [best, scores] = full_strong_branch(inst, root);
  Real best_score = -kInf;
  int expect = -1;
  for (int var : root.candidates) {
    const SbScore s = sb_score(inst, root, var);
    if (s.score > best_score) {
      best_score = s.score;
      expect = var;
    }
  }
  CHECK(best == expect);
}

TEST_CASE("branch and bound solves the knapsack exactly") {
  const MilpInstance inst = testutil::make_knapsack();
  auto policy = make_strong_branching_policy();
  const SolveReport report = solve(inst, *policy, {});
  REQUIRE(report.status == SolveStatus::kOptimal);
  CHECK(report.incumbent_obj == doctest::Approx(-9.0).epsilon(1e-9));
  CHECK(report.nodes >= 1);
  CHECK(check_feasible(inst, report.incumbent, 1e-6));
}

TEST_CASE("integral root finishes in one node") {
  MilpInstance inst = testutil::make_knapsack();
  inst.rows[0].rhs = 10.0;  // weight row slack: LP optimum is all-ones
  auto policy = make_strong_branching_policy();
  const SolveReport report = solve(inst, *policy, {});
  REQUIRE(report.status == SolveStatus::kOptimal);
  CHECK(report.nodes == 1);
  CHECK(report.incumbent_obj == doctest::Approx(-12.0));
}

TEST_CASE("exactness and determinism on random tiny instances") {
  int checked = 0;
  auto policy = make_strong_branching_policy();
  for (std::uint64_t seed = 0; seed < 40 && checked < 25; ++seed) {
    Rng rng(seed * 991 + 13);
    RandomMilpOptions opts;
    opts.max_int_vars = 8;
    const MilpInstance inst = random_generic_milp(rng, opts);
    const BruteForceResult bf = brute_force_opt(inst);
    const SolveReport report = solve(inst, *policy, {});
    if (!bf.feasible) {
      CHECK(report.status == SolveStatus::kInfeasible);
      continue;
    }
    REQUIRE(report.status == SolveStatus::kOptimal);
    CHECK(report.incumbent_obj == doctest::Approx(bf.obj).epsilon(1e-6));
    ++checked;

    const SolveReport again = solve(inst, *policy, {});
    CHECK(again.nodes == report.nodes);
    CHECK(again.incumbent_obj == report.incumbent_obj);
    REQUIRE(again.decisions.size() == report.decisions.size());
    for (std::size_t k = 0; k < report.decisions.size(); ++k) {
      CHECK(again.decisions[k].node_id == report.decisions[k].node_id);
      CHECK(again.decisions[k].chosen_var == report.decisions[k].chosen_var);
    }
  }
  CHECK(checked >= 20);
}

TEST_CASE("child bounds never improve past the parent") {
  Rng rng(2024);
  RandomMilpOptions ropts;
  ropts.require_fractional_root = true;
  const MilpInstance inst = random_generic_milp(rng, ropts);
  auto policy = make_strong_branching_policy();
  std::map<int, Real> bound_by_id;
  const NodeObserver observer = [&](NodeContext& ctx, int) {
    const BnbNode& node = ctx.node();
    bound_by_id[node.id] = node.lp.obj;
    const auto it = bound_by_id.find(node.parent_id);
    if (it != bound_by_id.end()) CHECK(node.lp.obj >= it->second - 1e-6);
  };
  solve(inst, *policy, {}, observer);
  CHECK(bound_by_id.size() >= 1);
}

TEST_CASE("node and time limits report kLimit") {
  // The independent-set relaxation sits at half-integral vertices, so the
  // tree is guaranteed to have more than two nodes.
  GenSpec spec;
  spec.family = Family::kIndependentSet;
  spec.seed = 3;
  spec.graph_nodes = 16;
  spec.edge_prob = 0.35;
  const MilpInstance inst = generate(spec);
  auto policy = make_strong_branching_policy();
  SolveLimits limits;
  limits.max_nodes = 2;
  const SolveReport report = solve(inst, *policy, limits);
  CHECK(report.status == SolveStatus::kLimit);
  CHECK(report.nodes <= 2);
}

TEST_CASE("random policy matches SB optima; SB explores fewer nodes mostly") {
  auto sb = make_strong_branching_policy();
  auto rnd = make_random_policy(99);
  int sb_not_worse = 0, compared = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    GenSpec spec;
    spec.family = Family::kSetCovering;
    spec.seed = 100 + seed;
    spec.rows = 25;
    spec.cols = 50;
    spec.density = 0.1;
    const MilpInstance inst = generate(spec);
    const SolveReport a = solve(inst, *sb, {});
    const SolveReport b = solve(inst, *rnd, {}, {}, {}, /*seed=*/seed);
    REQUIRE(a.status == SolveStatus::kOptimal);
    REQUIRE(b.status == SolveStatus::kOptimal);
    CHECK(a.incumbent_obj == doctest::Approx(b.incumbent_obj).epsilon(1e-9));
    ++compared;
    if (a.nodes <= b.nodes) ++sb_not_worse;
  }
  CHECK(compared == 20);
  CHECK(sb_not_worse >= 16);  // >= 80%
}

TEST_CASE("expert collection emits one sample per branched node") {
  const MilpInstance inst = testutil::make_knapsack();
  CollectOptions opts;
  CollectStats stats;
  const auto samples = collect_expert_samples({inst}, opts, &stats);

  auto policy = make_strong_branching_policy();
  const SolveReport report = solve(inst, *policy, {});
  CHECK(samples.size() == report.decisions.size());
  REQUIRE(!samples.empty());

  const TrainingSample& root = samples.front();
  CHECK(root.depth == 0);
  CHECK(static_cast<int>(root.cand.size()) == root.n_root);
  for (const TrainingSample& s : samples) {
    REQUIRE(!s.cand.empty());
    std::size_t best = 0;
    for (std::size_t k = 1; k < s.sb_scores.size(); ++k)
      if (s.sb_scores[k] > s.sb_scores[best]) best = k;
    CHECK(s.label_var == s.cand[best]);
    CHECK(s.provenance == kProvOriginal);
  }
}

TEST_CASE("sample container round-trips bit-exactly") {
  GenSpec spec;
  spec.family = Family::kIndependentSet;
  spec.seed = 8;
  spec.graph_nodes = 12;
  spec.edge_prob = 0.4;
  const MilpInstance inst = generate(spec);
  CollectOptions opts;
  auto samples = collect_expert_samples({inst}, opts, nullptr);
  REQUIRE(!samples.empty());

  const auto dir = std::filesystem::temp_directory_path();
  const std::string p1 = (dir / "sb_samples_a.bin").string();
  const std::string p2 = (dir / "sb_samples_b.bin").string();
  SampleManifest manifest;
  manifest.instance_ids = {0};
  manifest.seed = 8;
  manifest.config_hash = "test";
  manifest.produced_by = "unit";
  write_samples(p1, samples, manifest);

  SampleManifest back;
  const auto loaded = read_samples(p1, &back);
  REQUIRE(loaded.size() == samples.size());
  CHECK(back.seed == 8);
  for (std::size_t k = 0; k < samples.size(); ++k) {
    CHECK(loaded[k].label_var == samples[k].label_var);
    CHECK(loaded[k].graph.V == samples[k].graph.V);
    CHECK(loaded[k].graph.C == samples[k].graph.C);
    CHECK(loaded[k].cand == samples[k].cand);
    CHECK(loaded[k].sb_scores == samples[k].sb_scores);
    CHECK(loaded[k].graph.cand_mask == samples[k].graph.cand_mask);
    CHECK(loaded[k].node_lb == samples[k].node_lb);
    CHECK(loaded[k].node_ub == samples[k].node_ub);
    CHECK(loaded[k].has_incumbent == samples[k].has_incumbent);
  }

  write_samples(p2, loaded, manifest);
  std::ifstream f1(p1, std::ios::binary), f2(p2, std::ios::binary);
  const std::string b1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
  const std::string b2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
  CHECK(b1 == b2);
  std::filesystem::remove(p1);
  std::filesystem::remove(p2);
  std::filesystem::remove(p1 + ".manifest.json");
  std::filesystem::remove(p2 + ".manifest.json");
}
