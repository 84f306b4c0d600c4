// Copyright (c) 2026 The stratobranch authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "stratobranch/milp.hpp"
#include "stratobranch/sample.hpp"

namespace stratobranch {

struct DerivationConfig {
  Real p_equivalent = 0.35;  // per equivalent method (sign/shift, redundant rows)
  Real p_perturbed = 0.10;   // per perturbation method
  Real sigma_c = 0.01, sigma_A = 0.01, sigma_b = 0.01, sigma_y = 0.01;
  int t_range = 5;          // integer shifts drawn from [-t_range, t_range]
  Real rc_fraction = 0.03;  // fraction of rows to add as redundant sums
  std::uint64_t seed = 0;

  void validate() const;
};

// ---- sign-flip-plus-shift equivalence -------------------------------------

// Uniform +-1 signs; integer shifts on the integrality set, zero shifts on
// continuous variables.
AffineMap sample_affine_map(const MilpInstance& inst, const DerivationConfig& cfg,
                            std::uint64_t seed);

// x_hat = signs .* x + shift and its inverse.
std::vector<Real> map_point(const AffineMap& map, const std::vector<Real>& x);
std::vector<Real> unmap_point(const AffineMap& map, const std::vector<Real>& x_hat);

// Transformed bounds with the role swap under negative signs.
std::pair<std::vector<Real>, std::vector<Real>> map_bounds(const AffineMap& map,
                                                           const std::vector<Real>& lb,
                                                           const std::vector<Real>& ub);

// The equivalent instance: c_hat = Tc, A_hat = AT, b_hat = b + ATt, sorted
// transformed bounds, integrality carried through (binary may turn into a
// shifted integer and vice versa).
MilpInstance lt_transform_instance(const MilpInstance& inst, const AffineMap& map);

// gamma with c'x = c_hat' x_hat + gamma for corresponding points.
Real lt_objective_offset(const MilpInstance& inst, const AffineMap& map);

// Feature-level image of the same transformation. Needs the node the graph
// was built from: the instance rows (bias shift), the node bounds (variable
// kind flips), and whether an incumbent existed (the zero sentinel of the
// incumbent columns is not shifted).
struct LtGraphInputs {
  const MilpInstance& inst;
  const std::vector<Real>& node_lb;
  const std::vector<Real>& node_ub;
  bool has_incumbent = false;
};

BipartiteGraph lt_transform_graph(const BipartiteGraph& g, const AffineMap& map,
                                  const LtGraphInputs& in);

// ---- redundant-constraint equivalence -------------------------------------

struct RcAugmentation {
  MilpInstance instance;  // original rows plus the appended redundant rows
  int n_added = 0;        // the last n_added rows are redundant sums
};

// Appends ceil(rc_fraction * q) rows, each the sum of a uniformly drawn
// linearly independent row pair. Pairs that stay dependent after 100 draws
// are skipped with a log line.
RcAugmentation rc_augment_instance(const MilpInstance& inst, const DerivationConfig& cfg,
                                   std::uint64_t seed);

// Adds one constraint vertex per redundant row: cosine/bias recomputed from
// (a_r, b_r), tightness/dual/age zeroed, edges normalized by ||a_r||.
BipartiteGraph rc_augment_graph(const BipartiteGraph& g, const std::vector<ConsRow>& new_rows,
                                const std::vector<Real>& obj);

// ---- Gaussian perturbations (feature level) --------------------------------

BipartiteGraph perturb_objective(const BipartiteGraph& g, Real sigma_c, std::uint64_t seed);
BipartiteGraph perturb_constraints(const BipartiteGraph& g, Real sigma_A, Real sigma_b,
                                   std::uint64_t seed);
BipartiteGraph perturb_duals(const BipartiteGraph& g, Real sigma_y, std::uint64_t seed);

// ---- dataset balancing ------------------------------------------------------

struct AugmentStats {
  std::int64_t added_lt = 0, added_rc = 0, added_obj = 0, added_cons = 0, added_dual = 0;
};

// Balances group sizes toward the largest group by deriving new samples from
// the group's original members. Samples must carry group ids; instances are
// aligned by instance_id. Derived samples inherit the source group id and are
// tagged with their provenance.
std::vector<TrainingSample> augment_dataset(const std::vector<TrainingSample>& samples,
                                            const std::vector<MilpInstance>& instances,
                                            const DerivationConfig& cfg,
                                            AugmentStats* stats = nullptr);

}  // namespace stratobranch
