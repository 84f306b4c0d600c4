// Copyright (c) 2026 The stratobranch authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "stratobranch/milp.hpp"

namespace stratobranch {

enum class LpStatus : std::uint8_t { kOptimal, kInfeasible, kUnbounded, kIterationLimit };

enum class BasisStatus : std::uint8_t { kBasic, kAtLower, kAtUpper, kFree };

// Result of solving the LP relaxation (integrality dropped).
//
// Rows are a_i'x <= b_i under minimization. Reported duals are the
// nonnegative shadow prices y_i = -(c_B' B^-1)_i >= 0 at optimality, so the
// reduced costs satisfy r_j = c_j + A_{:,j}' y (the simplex reduced cost) and
// strong duality reads  c'x* = -b'y + sum_{nonbasic j} r_j xbar_j.
struct LpResult {
  LpStatus status = LpStatus::kInfeasible;
  std::vector<Real> x;              // structural solution, length n
  Real obj = 0.0;
  std::vector<Real> duals;          // y per row, length q
  std::vector<Real> reduced_costs;  // r per structural variable
  std::vector<BasisStatus> basis;   // per structural variable
  int iterations = 0;
};

struct LpOptions {
  Real feas_tol = kDefaultTol.feas_tol;
  Real opt_tol = kDefaultTol.opt_tol;
  int max_pivots = 50000;
};

// Bounded-variable primal simplex (two-phase, dense revised form with an
// explicit basis inverse). Deterministic: Dantzig pricing, lowest-index tie
// breaks, permanent switch to Bland's rule after 50 consecutive degenerate
// pivots. Throws Error only on internal invariant violations; limits are
// reported through status.
LpResult lp_solve(const MilpInstance& inst, const LpOptions& opts = {});

// Same, with node-local bounds overriding the instance bounds.
LpResult lp_solve_bounded(const MilpInstance& inst, const std::vector<Real>& lb,
                          const std::vector<Real>& ub, const LpOptions& opts = {});

struct BruteForceResult {
  bool feasible = false;
  std::vector<Real> x;
  Real obj = kInf;
};

// Test oracle: enumerates every integer assignment on the (finite) integer
// grid, solving the residual continuous LP for each. Exact up to LP tolerance.
// Refuses grids larger than oracle_cap.
BruteForceResult brute_force_opt(const MilpInstance& inst,
                                 std::uint64_t oracle_cap = (1ull << 20),
                                 const LpOptions& opts = {});

}  // namespace stratobranch
