// Copyright (c) 2026 The stratobranch authors
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "stratobranch/derive.hpp"
#include "stratobranch/instance_gen.hpp"
#include "stratobranch/randmilp.hpp"
#include "support/test_util.hpp"

using namespace stratobranch;

namespace {

BnbNode root_node(const MilpInstance& inst) {
  BnbNode node;
  node.lb = inst.lb;
  node.ub = inst.ub;
  node.lp = lp_solve(inst);
  REQUIRE(node.lp.status == LpStatus::kOptimal);
  node.candidates = fractional_candidates(inst, node.lp.x);
  return node;
}

bool lp_point_feasible(const MilpInstance& inst, const std::vector<Real>& x, Real tol) {
  for (int j = 0; j < inst.n_vars; ++j)
    if (x[j] < inst.lb[j] - tol || x[j] > inst.ub[j] + tol) return false;
  for (const ConsRow& row : inst.rows) {
    Real lhs = 0.0;
    for (const auto& [j, a] : row.coefs) lhs += a * x[j];
    if (lhs > row.rhs + tol * (1.0 + std::abs(row.rhs))) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("affine map sampling honors the config") {
  const MilpInstance inst = testutil::make_knapsack();
  DerivationConfig cfg;
  cfg.t_range = 0;
  const AffineMap map = sample_affine_map(inst, cfg, 1);
  for (Real t : map.shift) CHECK(t == 0.0);

  cfg.t_range = 5;
  const AffineMap a = sample_affine_map(inst, cfg, 7);
  const AffineMap b = sample_affine_map(inst, cfg, 7);
  CHECK(a.signs == b.signs);
  CHECK(a.shift == b.shift);

  // Sign flip with unit shift complements a binary variable.
  AffineMap comp{{-1.0, 1.0, 1.0}, {1.0, 0.0, 0.0}};
  const auto y = map_point(comp, {1.0, 0.0, 0.0});
  CHECK(y[0] == 0.0);
  const auto back = unmap_point(comp, y);
  CHECK(back[0] == 1.0);
}

TEST_CASE("identity map leaves the instance bit-exact") {
  const MilpInstance inst = testutil::make_knapsack();
  AffineMap id{{1, 1, 1}, {0, 0, 0}};
  const MilpInstance t = lt_transform_instance(inst, id);
  MilpInstance renamed = t;
  renamed.name = inst.name;
  CHECK(to_json(renamed) == to_json(inst));
}

TEST_CASE("worked two-variable transformation") {
  const MilpInstance inst = testutil::make_two_var();
  AffineMap map{{1.0, -1.0}, {0.0, 1.0}};
  const MilpInstance t = lt_transform_instance(inst, map);

  CHECK(t.obj == std::vector<Real>{-1.0, 1.0});
  REQUIRE(t.rows.size() == 1);
  CHECK(t.rows[0].coefs == std::vector<std::pair<int, Real>>{{0, 1.0}, {1, -1.0}});
  CHECK(t.rows[0].rhs == doctest::Approx(0.5));
  CHECK(t.lb == std::vector<Real>{0.0, 0.0});
  CHECK(t.ub == std::vector<Real>{1.0, 1.0});
  CHECK(t.kinds[1] == VarKind::kBinary);  // complemented binary stays binary

  const Real gamma = lt_objective_offset(inst, map);
  CHECK(gamma == doctest::Approx(-1.0));

  const LpResult orig = lp_solve(inst);
  const LpResult trans = lp_solve(t);
  REQUIRE(orig.status == LpStatus::kOptimal);
  REQUIRE(trans.status == LpStatus::kOptimal);
  CHECK(trans.obj == doctest::Approx(-0.5));
  CHECK(orig.obj == doctest::Approx(trans.obj + gamma));
}

TEST_CASE("pure sign flips are involutions") {
  Rng rng(5);
  const MilpInstance inst = random_generic_milp(rng);
  DerivationConfig cfg;
  cfg.t_range = 0;
  const AffineMap map = sample_affine_map(inst, cfg, 9);
  const MilpInstance twice = lt_transform_instance(lt_transform_instance(inst, map), map);
  MilpInstance renamed = twice;
  renamed.name = inst.name;
  CHECK(to_json(renamed) == to_json(inst));
}

TEST_CASE("feasible-region bijection and objective offset on random pairs") {
  DerivationConfig cfg;
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 140 && checked < 100; ++seed) {
    Rng rng(seed * 613 + 11);
    const MilpInstance inst = random_generic_milp(rng);
    const LpResult lp = lp_solve(inst);
    if (lp.status != LpStatus::kOptimal) continue;
    const AffineMap map = sample_affine_map(inst, cfg, seed + 1);
    const MilpInstance trans = lt_transform_instance(inst, map);
    const Real gamma = lt_objective_offset(inst, map);

    // phi maps the original optimum to a feasible point of the image.
    const auto mapped = map_point(map, lp.x);
    CHECK(lp_point_feasible(trans, mapped, kDefaultTol.feas_tol * 10));

    const LpResult tlp = lp_solve(trans);
    REQUIRE(tlp.status == LpStatus::kOptimal);
    CHECK(std::abs(lp.obj - (tlp.obj + gamma)) <= 1e-6 * (1.0 + std::abs(lp.obj)));

    // And the inverse maps the image optimum back into the original region.
    const auto pulled = unmap_point(map, tlp.x);
    CHECK(lp_point_feasible(inst, pulled, kDefaultTol.feas_tol * 10));
    ++checked;
  }
  CHECK(checked >= 100);
}

TEST_CASE("strong-branching scores are invariant under the transformation") {
  DerivationConfig cfg;
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 80 && checked < 40; ++seed) {
    Rng rng(seed * 271 + 3);
    RandomMilpOptions opts;
    opts.require_fractional_root = true;
    const MilpInstance inst = random_generic_milp(rng, opts);
    const AffineMap map = sample_affine_map(inst, cfg, seed + 17);
    const MilpInstance trans = lt_transform_instance(inst, map);

    const BnbNode a = root_node(inst);
    const BnbNode b = root_node(trans);
    REQUIRE(a.candidates == b.candidates);  // diagonal map keeps indices
    auto [ja, sa] = full_strong_branch(inst, a);
    auto [jb, sb_] = full_strong_branch(trans, b);
    CHECK(ja == jb);
    REQUIRE(sa.size() == sb_.size());
    for (std::size_t k = 0; k < sa.size(); ++k) {
      CHECK(std::abs(sa[k].score - sb_[k].score) <=
            1e-6 * (1.0 + std::abs(sa[k].score)));
      // Children swap under sign flips.
      const bool child_roles_ok =
          sa[k].down_feasible == sb_[k].up_feasible || map.signs[sa[k].var] == 1.0;
      CHECK(child_roles_ok);
    }
    ++checked;
  }
  CHECK(checked >= 40);
}

TEST_CASE("redundant row arithmetic follows the definition") {
  MilpInstance inst;
  inst.name = "rc";
  inst.n_vars = 3;
  inst.obj = {1, 1, 1};
  inst.lb = {0, 0, 0};
  inst.ub = {5, 5, 5};
  inst.int_mask = {false, false, false};
  inst.kinds.assign(3, VarKind::kContinuous);
  ConsRow r1, r2;
  r1.coefs = {{0, 1.0}, {1, 1.0}};
  r1.rhs = 2.0;
  r2.coefs = {{1, 1.0}, {2, 1.0}};
  r2.rhs = 1.0;
  inst.rows = {r1, r2};

  DerivationConfig cfg;
  cfg.rc_fraction = 0.5;  // ceil(0.5*2) = 1 row
  const RcAugmentation rc = rc_augment_instance(inst, cfg, 3);
  REQUIRE(rc.n_added == 1);
  const ConsRow& add = rc.instance.rows.back();
  CHECK(add.coefs == std::vector<std::pair<int, Real>>{{0, 1.0}, {1, 2.0}, {2, 1.0}});
  CHECK(add.rhs == 3.0);
}

TEST_CASE("redundant rows change neither the LP nor strong branching") {
  DerivationConfig cfg;
  cfg.rc_fraction = 0.4;
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 80 && checked < 40; ++seed) {
    Rng rng(seed * 431 + 29);
    RandomMilpOptions opts;
    opts.require_fractional_root = true;
    const MilpInstance inst = random_generic_milp(rng, opts);
    const RcAugmentation rc = rc_augment_instance(inst, cfg, seed);
    if (rc.n_added == 0) continue;

    const LpResult a = lp_solve(inst);
    const LpResult b = lp_solve(rc.instance);
    REQUIRE(a.status == LpStatus::kOptimal);
    REQUIRE(b.status == LpStatus::kOptimal);
    CHECK(std::abs(a.obj - b.obj) <= 1e-9 * (1.0 + std::abs(a.obj)));
    // Duals on the original rows are preserved whenever the added rows are
    // slack at the optimum. When a redundant row is tight (both parents
    // active), the augmented dual is degenerate and may legitimately shift
    // weight onto the new row.
    bool added_rows_slack = true;
    for (int k = 0; k < rc.n_added; ++k) {
      const ConsRow& row = rc.instance.rows[inst.n_cons() + k];
      Real lhs = 0.0;
      for (const auto& [j, v] : row.coefs) lhs += v * b.x[j];
      if (row.rhs - lhs <= 1e-6 * (1.0 + std::abs(row.rhs))) added_rows_slack = false;
    }
    if (added_rows_slack)
      for (int i = 0; i < inst.n_cons(); ++i)
        CHECK(std::abs(a.duals[i] - b.duals[i]) <= 1e-6 * (1.0 + std::abs(a.duals[i])));

    const BnbNode na = root_node(inst);
    const BnbNode nb = root_node(rc.instance);
    REQUIRE(na.candidates == nb.candidates);
    auto [ja, sa] = full_strong_branch(inst, na);
    auto [jb, sb_] = full_strong_branch(rc.instance, nb);
    CHECK(ja == jb);
    for (std::size_t k = 0; k < sa.size(); ++k)
      CHECK(std::abs(sa[k].score - sb_[k].score) <= 1e-6 * (1.0 + std::abs(sa[k].score)));
    ++checked;
  }
  CHECK(checked >= 40);
}

TEST_CASE("rc graph mapping adds zeroed vertices and leaves V untouched") {
  Rng rng(77);
  RandomMilpOptions opts;
  opts.require_fractional_root = true;
  const MilpInstance inst = random_generic_milp(rng, opts);
  const LpResult lp = lp_solve(inst);
  SolverState state;
  state.init(inst.n_vars, inst.n_cons());
  state.observe(inst, lp.x);
  const BipartiteGraph g = build_graph(inst, inst.lb, inst.ub, lp, state, 0);

  SUBCASE("zero rows is the identity") {
    const BipartiteGraph same = rc_augment_graph(g, {}, inst.obj);
    CHECK(same.C == g.C);
    CHECK(same.V == g.V);
    CHECK(same.edges.size() == g.edges.size());
  }

  DerivationConfig cfg;
  cfg.rc_fraction = 0.5;
  const RcAugmentation rc = rc_augment_instance(inst, cfg, 5);
  REQUIRE(rc.n_added >= 1);
  std::vector<ConsRow> added(rc.instance.rows.end() - rc.n_added, rc.instance.rows.end());
  const BipartiteGraph aug = rc_augment_graph(g, added, inst.obj);
  CHECK(aug.n_cons == g.n_cons + rc.n_added);
  CHECK(aug.V == g.V);
  for (int k = 0; k < rc.n_added; ++k) {
    const int i = g.n_cons + k;
    Real norm = 0.0;
    for (const auto& [j, a] : added[k].coefs) norm += a * a;
    norm = std::sqrt(norm);
    CHECK(aug.C(i, ccol::kBias) == doctest::Approx(added[k].rhs / norm).epsilon(1e-12));
    CHECK(aug.C(i, ccol::kIsTight) == 0.0);
    CHECK(aug.C(i, ccol::kDualVal) == 0.0);
    CHECK(aug.C(i, ccol::kAge) == 0.0);
  }
}

TEST_CASE("graph-level transformation maps features exactly") {
  Rng rng(123);
  RandomMilpOptions opts;
  opts.require_fractional_root = true;
  const MilpInstance inst = random_generic_milp(rng, opts);
  const LpResult lp = lp_solve(inst);
  SolverState state;
  state.init(inst.n_vars, inst.n_cons());
  state.observe(inst, lp.x);
  const BipartiteGraph g = build_graph(inst, inst.lb, inst.ub, lp, state, 0);

  SUBCASE("identity map is bit-exact") {
    AffineMap id{std::vector<Real>(inst.n_vars, 1.0), std::vector<Real>(inst.n_vars, 0.0)};
    LtGraphInputs in{inst, inst.lb, inst.ub, false};
    const BipartiteGraph same = lt_transform_graph(g, id, in);
    CHECK(same.C == g.C);
    CHECK(same.V == g.V);
    for (std::size_t k = 0; k < g.edges.size(); ++k) CHECK(same.edges[k].coef == g.edges[k].coef);
  }

  SUBCASE("sol_frac complement under a sign flip") {
    AffineMap flip{std::vector<Real>(inst.n_vars, -1.0), std::vector<Real>(inst.n_vars, 0.0)};
    for (int j = 0; j < inst.n_vars; ++j)
      if (!inst.int_mask[j]) flip.shift[j] = 0.0;
    LtGraphInputs in{inst, inst.lb, inst.ub, false};
    const BipartiteGraph t = lt_transform_graph(g, flip, in);
    for (int j = 0; j < inst.n_vars; ++j) {
      const Real f = g.V(j, vcol::kSolFrac);
      CHECK(t.V(j, vcol::kSolFrac) == (f == 0.0 ? 0.0 : 1.0 - f));
      CHECK(t.V(j, vcol::kHasLb) == g.V(j, vcol::kHasUb));
      CHECK(t.V(j, vcol::kReducedCost) == -g.V(j, vcol::kReducedCost));
    }
    for (int i = 0; i < inst.n_cons(); ++i) {
      CHECK(t.C(i, ccol::kDualVal) == g.C(i, ccol::kDualVal));
      CHECK(t.C(i, ccol::kObjCosSim) == g.C(i, ccol::kObjCosSim));
    }
  }
}

TEST_CASE("build and transform commute at the root") {
  DerivationConfig cfg;
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 60 && checked < 30; ++seed) {
    Rng rng(seed * 157 + 41);
    RandomMilpOptions opts;
    opts.require_fractional_root = true;
    const MilpInstance inst = random_generic_milp(rng, opts);
    const AffineMap map = sample_affine_map(inst, cfg, seed + 5);
    const MilpInstance trans = lt_transform_instance(inst, map);

    const LpResult lp = lp_solve(inst);
    const LpResult tlp = lp_solve(trans);
    if (lp.status != LpStatus::kOptimal || tlp.status != LpStatus::kOptimal) continue;

    SolverState sa, sb_;
    sa.init(inst.n_vars, inst.n_cons());
    sa.observe(inst, lp.x);
    sb_.init(trans.n_vars, trans.n_cons());
    sb_.observe(trans, tlp.x);

    const BipartiteGraph g = build_graph(inst, inst.lb, inst.ub, lp, sa, 0);
    const BipartiteGraph mapped =
        lt_transform_graph(g, map, LtGraphInputs{inst, inst.lb, inst.ub, false});
    const BipartiteGraph rebuilt = build_graph(trans, trans.lb, trans.ub, tlp, sb_, 0);

    REQUIRE(mapped.n_vars == rebuilt.n_vars);
    REQUIRE(mapped.n_cons == rebuilt.n_cons);
    for (int j = 0; j < mapped.n_vars; ++j)
      for (int c = 0; c < vcol::kCount; ++c)
        CHECK(std::abs(mapped.V(j, c) - rebuilt.V(j, c)) <= 1e-6);
    for (int i = 0; i < mapped.n_cons; ++i)
      for (int c = 0; c < ccol::kCount; ++c)
        CHECK(std::abs(mapped.C(i, c) - rebuilt.C(i, c)) <= 1e-6);
    REQUIRE(mapped.edges.size() == rebuilt.edges.size());
    for (std::size_t k = 0; k < mapped.edges.size(); ++k)
      CHECK(std::abs(mapped.edges[k].coef - rebuilt.edges[k].coef) <= 1e-6);
    CHECK(mapped.cand_mask == rebuilt.cand_mask);
    ++checked;
  }
  CHECK(checked >= 30);
}

TEST_CASE("perturbations are seeded, optional, and zero-mean") {
  Rng rng(55);
  const MilpInstance inst = random_generic_milp(rng);
  const LpResult lp = lp_solve(inst);
  REQUIRE(lp.status == LpStatus::kOptimal);
  SolverState state;
  state.init(inst.n_vars, inst.n_cons());
  state.observe(inst, lp.x);
  const BipartiteGraph g = build_graph(inst, inst.lb, inst.ub, lp, state, 0);

  SUBCASE("sigma zero is the identity") {
    CHECK(perturb_objective(g, 0.0, 1).V == g.V);
    CHECK(perturb_duals(g, 0.0, 1).C == g.C);
  }
  SUBCASE("fixed seed reproduces the noise") {
    const BipartiteGraph a = perturb_objective(g, 0.05, 9);
    const BipartiteGraph b = perturb_objective(g, 0.05, 9);
    CHECK(a.V == b.V);
    const BipartiteGraph c = perturb_objective(g, 0.05, 10);
    CHECK(a.V != c.V);
  }
  SUBCASE("noise is empirically zero-mean") {
    const Real sigma = 0.5;
    Real col_std = 0.0, mean_col = 0.0;
    for (int j = 0; j < g.n_vars; ++j) mean_col += g.V(j, vcol::kObjCoef);
    mean_col /= g.n_vars;
    for (int j = 0; j < g.n_vars; ++j) {
      const Real d = g.V(j, vcol::kObjCoef) - mean_col;
      col_std += d * d;
    }
    col_std = std::max(std::sqrt(col_std / g.n_vars), 1e-8);

    std::int64_t draws = 0;
    Real sum = 0.0;
    for (std::uint64_t s = 0; draws < 100000; ++s) {
      const BipartiteGraph p = perturb_objective(g, sigma, s);
      for (int j = 0; j < g.n_vars; ++j) {
        sum += p.V(j, vcol::kObjCoef) - g.V(j, vcol::kObjCoef);
        ++draws;
      }
    }
    const Real noise_std = sigma * col_std;
    const Real mean = sum / static_cast<Real>(draws);
    CHECK(std::abs(mean) <= 3.0 * noise_std / std::sqrt(static_cast<Real>(draws)));
  }
}

TEST_CASE("augmentation balances group sizes toward the max") {
  GenSpec spec;
  spec.family = Family::kIndependentSet;
  spec.seed = 21;
  spec.graph_nodes = 12;
  spec.edge_prob = 0.4;
  const MilpInstance inst = generate(spec);
  CollectOptions copts;
  auto collected = collect_expert_samples({inst}, copts, nullptr);
  REQUIRE(!collected.empty());

  // Synthesize a 10-vs-100 group split from the first sample.
  std::vector<TrainingSample> samples;
  for (int k = 0; k < 110; ++k) {
    TrainingSample s = collected[0];
    s.group_id = k < 10 ? 0 : 1;
    samples.push_back(std::move(s));
  }

  DerivationConfig cfg;
  cfg.seed = 3;
  const auto augmented = augment_dataset(samples, {inst}, cfg);
  std::size_t g0 = 0, g1 = 0, derived = 0;
  for (const auto& s : augmented) {
    (s.group_id == 0 ? g0 : g1)++;
    if (s.provenance != kProvOriginal) ++derived;
  }
  CHECK(g0 == 100);
  CHECK(g1 == 100);
  CHECK(derived == 90);

  SUBCASE("equal sizes add nothing") {
    std::vector<TrainingSample> even(samples.begin(), samples.begin() + 20);
    for (int k = 0; k < 20; ++k) even[k].group_id = k % 2;
    CHECK(augment_dataset(even, {inst}, cfg).size() == 20);
  }
  SUBCASE("zero probabilities add nothing") {
    DerivationConfig off = cfg;
    off.p_equivalent = 0.0;
    off.p_perturbed = 0.0;
    CHECK(augment_dataset(samples, {inst}, off).size() == samples.size());
  }
}
