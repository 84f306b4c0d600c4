// Copyright (c) 2026 The stratobranch authors
// SPDX-License-Identifier: Apache-2.0
#include "stratobranch/instance_gen.hpp"

#include <algorithm>
#include <cmath>

namespace stratobranch {

const char* family_name(Family f) {
  switch (f) {
    case Family::kSetCovering: return "set_covering";
    case Family::kCombinatorialAuction: return "combinatorial_auction";
    case Family::kFacilityLocation: return "facility_location";
    case Family::kIndependentSet: return "independent_set";
  }
  throw Error("bad family");
}

Family family_from_name(const std::string& s) {
  if (s == "set_covering") return Family::kSetCovering;
  if (s == "combinatorial_auction") return Family::kCombinatorialAuction;
  if (s == "facility_location") return Family::kFacilityLocation;
  if (s == "independent_set") return Family::kIndependentSet;
  throw Error("unknown family '" + s + "'");
}

void GenSpec::validate() const {
  auto positive = [](int v, const char* what) {
    if (v < 1) throw Error(std::string("GenSpec: ") + what + " must be >= 1");
  };
  switch (family) {
    case Family::kSetCovering:
      positive(rows, "rows");
      positive(cols, "cols");
      if (!(density > 0.0 && density <= 1.0)) throw Error("GenSpec: density must be in (0,1]");
      break;
    case Family::kCombinatorialAuction:
      positive(items, "items");
      positive(bids, "bids");
      break;
    case Family::kFacilityLocation:
      positive(customers, "customers");
      positive(facilities, "facilities");
      break;
    case Family::kIndependentSet:
      positive(graph_nodes, "graph_nodes");
      if (!(edge_prob > 0.0 && edge_prob <= 1.0))
        throw Error("GenSpec: edge_prob must be in (0,1]");
      break;
  }
}

namespace {

void set_binary_vars(MilpInstance& inst, int n) {
  inst.n_vars = n;
  inst.lb.assign(n, 0.0);
  inst.ub.assign(n, 1.0);
  inst.int_mask.assign(n, true);
  inst.kinds.assign(n, VarKind::kBinary);
}

// min c'x, cover every row at least once. Rows stored as -sum x_j <= -1.
MilpInstance gen_set_covering(const GenSpec& spec, Rng& rng) {
  const int m = spec.rows, n = spec.cols;
  MilpInstance inst;
  set_binary_vars(inst, n);
  inst.obj.resize(n);
  for (int j = 0; j < n; ++j) inst.obj[j] = static_cast<Real>(rng.uniform_int(1, 100));

  std::vector<std::vector<int>> row_cols(m);
  for (int j = 0; j < n; ++j) {
    int covered = 0;
    for (int i = 0; i < m; ++i) {
      if (rng.bernoulli(spec.density)) {
        row_cols[i].push_back(j);
        ++covered;
      }
    }
    if (covered == 0) row_cols[rng.uniform_int(0, m - 1)].push_back(j);
  }
  for (int i = 0; i < m; ++i)
    if (row_cols[i].empty()) row_cols[i].push_back(static_cast<int>(rng.uniform_int(0, n - 1)));

  for (int i = 0; i < m; ++i) {
    std::sort(row_cols[i].begin(), row_cols[i].end());
    row_cols[i].erase(std::unique(row_cols[i].begin(), row_cols[i].end()), row_cols[i].end());
    ConsRow row;
    row.rhs = -1.0;
    for (int j : row_cols[i]) row.coefs.emplace_back(j, -1.0);
    inst.rows.push_back(std::move(row));
  }
  return inst;
}

// Winner determination: one binary per bid, each item sold at most once,
// maximize total price (stored as minimization of the negated prices).
MilpInstance gen_auction(const GenSpec& spec, Rng& rng) {
  const int items = spec.items, bids = spec.bids;
  MilpInstance inst;
  set_binary_vars(inst, bids);
  inst.obj.resize(bids);

  std::vector<Real> item_value(items);
  for (int i = 0; i < items; ++i) item_value[i] = rng.uniform_real(1.0, 10.0);

  std::vector<std::vector<int>> item_bids(items);
  const int max_bundle = std::min(items, 5);
  for (int b = 0; b < bids; ++b) {
    const int size = static_cast<int>(rng.uniform_int(1, max_bundle));
    std::vector<int> bundle;
    while (static_cast<int>(bundle.size()) < size) {
      const int it = static_cast<int>(rng.uniform_int(0, items - 1));
      if (std::find(bundle.begin(), bundle.end(), it) == bundle.end()) bundle.push_back(it);
    }
    std::sort(bundle.begin(), bundle.end());
    Real price = 0.0;
    for (int it : bundle) {
      price += item_value[it];
      item_bids[it].push_back(b);
    }
    price *= rng.uniform_real(0.8, 1.2);
    inst.obj[b] = -price;
  }
  for (int i = 0; i < items; ++i) {
    if (item_bids[i].empty()) continue;
    ConsRow row;
    row.rhs = 1.0;
    for (int b : item_bids[i]) row.coefs.emplace_back(b, 1.0);
    inst.rows.push_back(std::move(row));
  }
  if (inst.rows.empty()) throw Error("auction generator produced no constraints");
  return inst;
}

// Binary open decision per facility plus continuous assignment fractions.
// Demand rows -sum_f x_cf <= -1, capacity rows sum_c d_c x_cf - cap_f y_f <= 0.
MilpInstance gen_facility(const GenSpec& spec, Rng& rng) {
  const int C = spec.customers, F = spec.facilities;
  MilpInstance inst;
  const int n = F + C * F;  // y_f first, then x_cf grouped by customer
  inst.n_vars = n;
  inst.lb.assign(n, 0.0);
  inst.ub.assign(n, 1.0);
  inst.int_mask.assign(n, false);
  inst.kinds.assign(n, VarKind::kContinuous);
  for (int f = 0; f < F; ++f) {
    inst.int_mask[f] = true;
    inst.kinds[f] = VarKind::kBinary;
  }
  auto xvar = [&](int c, int f) { return F + c * F + f; };

  std::vector<Real> demand(C);
  Real total_demand = 0.0;
  for (int c = 0; c < C; ++c) {
    demand[c] = static_cast<Real>(rng.uniform_int(5, 35));
    total_demand += demand[c];
  }
  const Real base_cap = std::ceil(1.2 * total_demand / F);
  std::vector<Real> capacity(F);
  for (int f = 0; f < F; ++f)
    capacity[f] = base_cap + static_cast<Real>(rng.uniform_int(0, static_cast<int>(base_cap)));

  inst.obj.assign(n, 0.0);
  for (int f = 0; f < F; ++f) inst.obj[f] = static_cast<Real>(rng.uniform_int(100, 300));
  for (int c = 0; c < C; ++c)
    for (int f = 0; f < F; ++f) inst.obj[xvar(c, f)] = demand[c] * rng.uniform_real(1.0, 6.0);

  for (int c = 0; c < C; ++c) {
    ConsRow row;
    row.rhs = -1.0;
    for (int f = 0; f < F; ++f) row.coefs.emplace_back(xvar(c, f), -1.0);
    inst.rows.push_back(std::move(row));
  }
  for (int f = 0; f < F; ++f) {
    ConsRow row;
    row.rhs = 0.0;
    row.coefs.emplace_back(f, -capacity[f]);
    for (int c = 0; c < C; ++c) row.coefs.emplace_back(xvar(c, f), demand[c]);
    inst.rows.push_back(std::move(row));
  }
  return inst;
}

// One binary per graph node, x_u + x_v <= 1 per edge, maximize selected nodes.
MilpInstance gen_independent_set(const GenSpec& spec, Rng& rng) {
  const int n = spec.graph_nodes;
  MilpInstance inst;
  set_binary_vars(inst, n);
  inst.obj.assign(n, -1.0);
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (rng.bernoulli(spec.edge_prob)) {
        ConsRow row;
        row.rhs = 1.0;
        row.coefs.emplace_back(u, 1.0);
        row.coefs.emplace_back(v, 1.0);
        inst.rows.push_back(std::move(row));
      }
  return inst;
}

}  // namespace

MilpInstance generate(const GenSpec& spec) {
  spec.validate();
  for (int attempt = 0; attempt < 100; ++attempt) {
    Rng rng(spec.seed + 0x9e3779b97f4a7c15ull * static_cast<std::uint64_t>(attempt));
    MilpInstance inst;
    switch (spec.family) {
      case Family::kSetCovering: inst = gen_set_covering(spec, rng); break;
      case Family::kCombinatorialAuction: inst = gen_auction(spec, rng); break;
      case Family::kFacilityLocation: inst = gen_facility(spec, rng); break;
      case Family::kIndependentSet: inst = gen_independent_set(spec, rng); break;
    }
    if (inst.rows.empty()) continue;  // e.g. an edgeless graph draw
    inst.name = std::string(family_name(spec.family)) + "-" + std::to_string(spec.seed);
    inst.validate();
    return inst;
  }
  throw Error("generate: no valid instance after 100 attempts");
}

std::vector<Real> feasible_witness(const GenSpec& spec, const MilpInstance& inst) {
  std::vector<Real> x(inst.n_vars, 0.0);
  switch (spec.family) {
    case Family::kSetCovering:
      x.assign(inst.n_vars, 1.0);
      break;
    case Family::kCombinatorialAuction:
    case Family::kIndependentSet:
      break;  // empty selection
    case Family::kFacilityLocation: {
      const int F = spec.facilities, C = spec.customers;
      // All facilities open; fill customers greedily against the remaining
      // capacity (total capacity >= 1.2 * total demand by construction).
      std::vector<Real> remaining(F);
      for (int f = 0; f < F; ++f) {
        x[f] = 1.0;
        const ConsRow& cap_row = inst.rows[C + f];
        remaining[f] = -cap_row.coefs[0].second;  // capacity coefficient is -cap_f
      }
      for (int c = 0; c < C; ++c) {
        Real needed = 1.0;
        for (int f = 0; f < F && needed > 1e-12; ++f) {
          // demand of customer c appears as the coefficient of x_cf in capacity row f
          Real dem = 0.0;
          for (const auto& [j, a] : inst.rows[C + f].coefs)
            if (j == F + c * F + f) {
              dem = a;
              break;
            }
          if (dem <= 0.0) continue;
          const Real frac = std::min(needed, remaining[f] / dem);
          if (frac <= 0.0) continue;
          x[F + c * F + f] = frac;
          remaining[f] -= frac * dem;
          needed -= frac;
        }
        if (needed > 1e-9) throw Error("facility witness: capacity exhausted");
      }
      break;
    }
  }
  return x;
}

}  // namespace stratobranch
