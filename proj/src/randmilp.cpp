// Copyright (c) 2026 The stratobranch authors
// SPDX-License-Identifier: Apache-2.0
#include "stratobranch/randmilp.hpp"

#include <algorithm>
#include <cmath>

#include "stratobranch/lp.hpp"

namespace stratobranch {

namespace {

MilpInstance draw_once(Rng& rng, const RandomMilpOptions& opts) {
  const int n_int = static_cast<int>(rng.uniform_int(opts.min_int_vars, opts.max_int_vars));
  const int n_cont = static_cast<int>(rng.uniform_int(opts.min_cont_vars, opts.max_cont_vars));
  const int n = n_int + n_cont;

  MilpInstance inst;
  inst.name = "generic";
  inst.n_vars = n;
  inst.obj.resize(n);
  inst.lb.assign(n, 0.0);
  inst.ub.assign(n, 0.0);
  inst.int_mask.assign(n, false);
  inst.kinds.assign(n, VarKind::kContinuous);

  for (int j = 0; j < n_int; ++j) {
    inst.int_mask[j] = true;
    inst.ub[j] = static_cast<Real>(rng.uniform_int(1, opts.max_int_bound));
    inst.kinds[j] = inst.ub[j] == 1.0 ? VarKind::kBinary : VarKind::kInteger;
    inst.obj[j] = rng.normal();
  }
  for (int j = n_int; j < n; ++j) {
    if (rng.bernoulli(opts.unbounded_prob)) {
      inst.ub[j] = kInf;
      inst.obj[j] = 0.1 + std::abs(rng.normal());
    } else {
      inst.ub[j] = rng.uniform_real(1.0, 5.0);
      inst.obj[j] = rng.normal();
    }
  }

  // Interior point the rhs margins are anchored to.
  std::vector<Real> x0(n);
  for (int j = 0; j < n; ++j) {
    const Real top = std::isfinite(inst.ub[j]) ? inst.ub[j] : 3.0;
    x0[j] = rng.uniform_real(0.0, top);
  }

  const int q = static_cast<int>(rng.uniform_int(opts.min_rows, opts.max_rows));
  for (int i = 0; i < q; ++i) {
    const int k = static_cast<int>(rng.uniform_int(2, std::min(n, 4)));
    std::vector<int> vars;
    while (static_cast<int>(vars.size()) < k) {
      const int j = static_cast<int>(rng.uniform_int(0, n - 1));
      if (std::find(vars.begin(), vars.end(), j) == vars.end()) vars.push_back(j);
    }
    std::sort(vars.begin(), vars.end());
    ConsRow row;
    Real lhs0 = 0.0;
    for (int j : vars) {
      const Real a = rng.normal();
      row.coefs.emplace_back(j, a);
      lhs0 += a * x0[j];
    }
    row.rhs = lhs0 + 0.1 + 0.5 * std::abs(rng.normal());
    inst.rows.push_back(std::move(row));
  }
  inst.validate();
  return inst;
}

}  // namespace

MilpInstance random_generic_milp(Rng& rng, const RandomMilpOptions& opts) {
  for (int attempt = 0; attempt < 200; ++attempt) {
    MilpInstance inst = draw_once(rng, opts);
    if (!opts.require_fractional_root) return inst;
    const LpResult lp = lp_solve(inst);
    if (lp.status != LpStatus::kOptimal) continue;
    for (int j = 0; j < inst.n_vars; ++j) {
      if (!inst.int_mask[j]) continue;
      const Real frac = lp.x[j] - std::floor(lp.x[j]);
      if (std::min(frac, 1.0 - frac) > kDefaultTol.int_tol) return inst;
    }
  }
  throw Error("random_generic_milp: no fractional-root draw in 200 attempts");
}

}  // namespace stratobranch
