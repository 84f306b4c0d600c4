// Copyright (c) 2026 The stratobranch authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "stratobranch/milp.hpp"

namespace stratobranch {

// Small random MILPs with continuous coefficient draws, used by the property
// and verification suites. Generic coefficients keep the LP optima unique
// almost surely, which the feature-level equivalence checks rely on.
// Feasibility is by construction (the rhs leaves a strict margin around an
// interior point); boundedness holds because every variable without an upper
// bound gets a strictly positive objective coefficient.
struct RandomMilpOptions {
  int min_int_vars = 2, max_int_vars = 6;
  int min_cont_vars = 0, max_cont_vars = 3;
  int min_rows = 2, max_rows = 6;
  int max_int_bound = 3;          // integer boxes [0, 1..max_int_bound]
  Real unbounded_prob = 0.15;     // chance a continuous variable has no upper bound
  bool require_fractional_root = false;  // resample until the root LP is fractional
};

MilpInstance random_generic_milp(Rng& rng, const RandomMilpOptions& opts = {});

}  // namespace stratobranch
