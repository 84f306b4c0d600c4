// Copyright (c) 2026 The stratobranch authors
// SPDX-License-Identifier: Apache-2.0
#include "stratobranch/derive.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

namespace stratobranch {

void DerivationConfig::validate() const {
  if (!(p_equivalent >= 0.0 && p_equivalent <= 1.0) ||
      !(p_perturbed >= 0.0 && p_perturbed <= 1.0))
    throw Error("DerivationConfig: probabilities must be in [0,1]");
  if (sigma_c < 0 || sigma_A < 0 || sigma_b < 0 || sigma_y < 0)
    throw Error("DerivationConfig: sigmas must be >= 0");
  if (t_range < 0) throw Error("DerivationConfig: t_range must be >= 0");
  if (rc_fraction < 0) throw Error("DerivationConfig: rc_fraction must be >= 0");
}

AffineMap sample_affine_map(const MilpInstance& inst, const DerivationConfig& cfg,
                            std::uint64_t seed) {
  cfg.validate();
  Rng rng(seed);
  AffineMap map;
  map.signs.resize(inst.n_vars);
  map.shift.assign(inst.n_vars, 0.0);
  for (int j = 0; j < inst.n_vars; ++j) {
    map.signs[j] = rng.bernoulli(0.5) ? 1.0 : -1.0;
    if (inst.int_mask[j])
      map.shift[j] = static_cast<Real>(rng.uniform_int(-cfg.t_range, cfg.t_range));
  }
  return map;
}

std::vector<Real> map_point(const AffineMap& map, const std::vector<Real>& x) {
  std::vector<Real> out(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) out[j] = map.signs[j] * x[j] + map.shift[j];
  return out;
}

std::vector<Real> unmap_point(const AffineMap& map, const std::vector<Real>& x_hat) {
  std::vector<Real> out(x_hat.size());
  for (std::size_t j = 0; j < x_hat.size(); ++j)
    out[j] = map.signs[j] * (x_hat[j] - map.shift[j]);
  return out;
}

std::pair<std::vector<Real>, std::vector<Real>> map_bounds(const AffineMap& map,
                                                           const std::vector<Real>& lb,
                                                           const std::vector<Real>& ub) {
  const std::size_t n = lb.size();
  std::vector<Real> lo(n), hi(n);
  for (std::size_t j = 0; j < n; ++j) {
    const Real a = map.signs[j] * lb[j] + map.shift[j];
    const Real b = map.signs[j] * ub[j] + map.shift[j];
    lo[j] = std::min(a, b);
    hi[j] = std::max(a, b);
  }
  return {std::move(lo), std::move(hi)};
}

MilpInstance lt_transform_instance(const MilpInstance& inst, const AffineMap& map) {
  map.validate(inst);
  MilpInstance out;
  out.name = inst.name + "+lt";
  out.n_vars = inst.n_vars;
  out.obj.resize(inst.n_vars);
  for (int j = 0; j < inst.n_vars; ++j) out.obj[j] = map.signs[j] * inst.obj[j];
  for (const ConsRow& row : inst.rows) {
    ConsRow t;
    t.rhs = row.rhs;
    for (const auto& [j, a] : row.coefs) {
      t.coefs.emplace_back(j, a * map.signs[j]);
      t.rhs += a * map.signs[j] * map.shift[j];  // b + A T t
    }
    out.rows.push_back(std::move(t));
  }
  std::tie(out.lb, out.ub) = map_bounds(map, inst.lb, inst.ub);
  out.int_mask = inst.int_mask;
  out.kinds.resize(inst.n_vars);
  for (int j = 0; j < inst.n_vars; ++j)
    out.kinds[j] = classify_kind(inst.int_mask[j], inst.kinds[j], out.lb[j], out.ub[j]);
  out.validate();
  return out;
}

Real lt_objective_offset(const MilpInstance& inst, const AffineMap& map) {
  Real gamma = 0.0;
  for (int j = 0; j < inst.n_vars; ++j) gamma -= inst.obj[j] * map.signs[j] * map.shift[j];
  return gamma;
}

BipartiteGraph lt_transform_graph(const BipartiteGraph& g, const AffineMap& map,
                                  const LtGraphInputs& in) {
  if (static_cast<int>(map.signs.size()) != g.n_vars)
    throw Error("lt_transform_graph: map/graph size mismatch");
  if (g.n_cons != in.inst.n_cons()) throw Error("lt_transform_graph: row count mismatch");
  BipartiteGraph out = g;

  for (int i = 0; i < g.n_cons; ++i) {
    const ConsRow& row = in.inst.rows[i];
    Real norm = 0.0, shift = 0.0;
    for (const auto& [j, a] : row.coefs) {
      norm += a * a;
      shift += a * map.signs[j] * map.shift[j];  // (A T t)_i
    }
    out.C(i, ccol::kBias) = g.C(i, ccol::kBias) + shift / std::sqrt(norm);
  }

  for (std::size_t k = 0; k < out.edges.size(); ++k)
    out.edges[k].coef = g.edges[k].coef * map.signs[g.edges[k].var];

  const auto [new_lb, new_ub] = map_bounds(map, in.node_lb, in.node_ub);
  for (int j = 0; j < g.n_vars; ++j) {
    const Real s = map.signs[j];
    const Real t = map.shift[j];
    const bool integral = g.V(j, vcol::kTypeBinary) == 1.0 || g.V(j, vcol::kTypeInteger) == 1.0;
    if (integral) {
      const bool binary_now = new_lb[j] == 0.0 && new_ub[j] == 1.0;
      out.V(j, vcol::kTypeBinary) = binary_now ? 1.0 : 0.0;
      out.V(j, vcol::kTypeInteger) = binary_now ? 0.0 : 1.0;
    }
    out.V(j, vcol::kObjCoef) = s * g.V(j, vcol::kObjCoef);
    out.V(j, vcol::kReducedCost) = s * g.V(j, vcol::kReducedCost);
    if (s < 0.0) {
      std::swap(out.V(j, vcol::kHasLb), out.V(j, vcol::kHasUb));
      std::swap(out.V(j, vcol::kSolAtLb), out.V(j, vcol::kSolAtUb));
      // The active bound of a nonbasic variable swaps with the bound roles.
      // (Table-level counterpart of the has_lb/has_ub exchange; a rebuilt
      // graph of the transformed node reports exactly this.)
      std::swap(out.V(j, vcol::kBasisAtLower), out.V(j, vcol::kBasisAtUpper));
      const Real frac = g.V(j, vcol::kSolFrac);
      out.V(j, vcol::kSolFrac) = frac == 0.0 ? 0.0 : 1.0 - frac;
    }
    out.V(j, vcol::kSolVal) = s * g.V(j, vcol::kSolVal) + t;
    if (in.has_incumbent) {
      out.V(j, vcol::kIncVal) = s * g.V(j, vcol::kIncVal) + t;
      out.V(j, vcol::kAvgIncVal) = s * g.V(j, vcol::kAvgIncVal) + t;
    }
  }
  return out;
}

namespace {

// Linear independence of two sparse rows via proportionality.
bool rows_independent(const ConsRow& a, const ConsRow& b, int n_vars) {
  std::vector<Real> da(n_vars, 0.0), db(n_vars, 0.0);
  for (const auto& [j, v] : a.coefs) da[j] = v;
  for (const auto& [j, v] : b.coefs) db[j] = v;
  Real lambda = 0.0;
  bool have_lambda = false;
  for (int j = 0; j < n_vars; ++j) {
    if (da[j] == 0.0 && db[j] == 0.0) continue;
    if (da[j] == 0.0 || db[j] == 0.0) return true;  // support mismatch
    const Real r = db[j] / da[j];
    if (!have_lambda) {
      lambda = r;
      have_lambda = true;
    } else if (std::abs(r - lambda) > 1e-12 * std::max(1.0, std::abs(lambda))) {
      return true;
    }
  }
  return false;
}

ConsRow sum_rows(const ConsRow& a, const ConsRow& b) {
  ConsRow out;
  out.rhs = a.rhs + b.rhs;
  std::vector<std::pair<int, Real>> merged(a.coefs.begin(), a.coefs.end());
  for (const auto& [j, v] : b.coefs) {
    bool found = false;
    for (auto& [mj, mv] : merged)
      if (mj == j) {
        mv += v;
        found = true;
        break;
      }
    if (!found) merged.emplace_back(j, v);
  }
  std::sort(merged.begin(), merged.end());
  for (const auto& [j, v] : merged)
    if (v != 0.0) out.coefs.emplace_back(j, v);
  return out;
}

}  // namespace

RcAugmentation rc_augment_instance(const MilpInstance& inst, const DerivationConfig& cfg,
                                   std::uint64_t seed) {
  cfg.validate();
  RcAugmentation out;
  out.instance = inst;
  out.instance.name = inst.name + "+rc";
  const int q = inst.n_cons();
  if (q < 2) return out;
  const int target = static_cast<int>(std::ceil(cfg.rc_fraction * q));
  Rng rng(seed);
  for (int k = 0; k < target; ++k) {
    bool added = false;
    for (int attempt = 0; attempt < 100 && !added; ++attempt) {
      const int i = static_cast<int>(rng.uniform_int(0, q - 1));
      int j = static_cast<int>(rng.uniform_int(0, q - 2));
      if (j >= i) ++j;
      if (!rows_independent(inst.rows[i], inst.rows[j], inst.n_vars)) continue;
      ConsRow row = sum_rows(inst.rows[i], inst.rows[j]);
      if (row.coefs.empty()) continue;
      out.instance.rows.push_back(std::move(row));
      ++out.n_added;
      added = true;
    }
    if (!added) {
      std::cerr << "rc_augment: no independent row pair found after 100 draws on '"
                << inst.name << "', skipping\n";
      break;
    }
  }
  out.instance.validate();
  return out;
}

BipartiteGraph rc_augment_graph(const BipartiteGraph& g, const std::vector<ConsRow>& new_rows,
                                const std::vector<Real>& obj) {
  BipartiteGraph out = g;
  Real c_norm = 0.0;
  for (Real c : obj) c_norm += c * c;
  c_norm = std::sqrt(c_norm);
  for (const ConsRow& row : new_rows) {
    Real a_norm = 0.0, dot = 0.0;
    for (const auto& [j, a] : row.coefs) {
      a_norm += a * a;
      dot += a * obj[j];
    }
    a_norm = std::sqrt(a_norm);
    if (a_norm == 0.0) throw Error("rc_augment_graph: zero redundant row");
    const int i = out.n_cons++;
    out.C.conservativeResize(out.n_cons, ccol::kCount);
    out.C(i, ccol::kObjCosSim) = c_norm == 0.0 ? 0.0 : dot / (a_norm * c_norm);
    out.C(i, ccol::kBias) = row.rhs / a_norm;
    out.C(i, ccol::kIsTight) = 0.0;
    out.C(i, ccol::kDualVal) = 0.0;
    out.C(i, ccol::kAge) = 0.0;
    for (const auto& [j, a] : row.coefs)
      out.edges.push_back({static_cast<std::int32_t>(i), static_cast<std::int32_t>(j),
                           a / a_norm});
  }
  return out;
}

namespace {

Real column_std(const Eigen::VectorXd& col) {
  const Real mean = col.mean();
  const Real var = (col.array() - mean).square().mean();
  return std::max(std::sqrt(var), 1e-8);
}

}  // namespace

BipartiteGraph perturb_objective(const BipartiteGraph& g, Real sigma_c, std::uint64_t seed) {
  BipartiteGraph out = g;
  if (sigma_c == 0.0) return out;
  Rng rng(seed);
  const Real std_c = column_std(g.V.col(vcol::kObjCoef));
  for (int j = 0; j < g.n_vars; ++j)
    out.V(j, vcol::kObjCoef) += sigma_c * std_c * rng.normal();
  return out;
}

BipartiteGraph perturb_constraints(const BipartiteGraph& g, Real sigma_A, Real sigma_b,
                                   std::uint64_t seed) {
  BipartiteGraph out = g;
  if (sigma_A == 0.0 && sigma_b == 0.0) return out;
  Rng rng(seed);
  if (sigma_A > 0.0 && !g.edges.empty()) {
    Eigen::VectorXd coefs(static_cast<int>(g.edges.size()));
    for (std::size_t k = 0; k < g.edges.size(); ++k) coefs[static_cast<int>(k)] = g.edges[k].coef;
    const Real std_a = column_std(coefs);
    for (auto& e : out.edges) e.coef += sigma_A * std_a * rng.normal();
  }
  if (sigma_b > 0.0 && g.n_cons > 0) {
    const Real std_b = column_std(g.C.col(ccol::kBias));
    for (int i = 0; i < g.n_cons; ++i) out.C(i, ccol::kBias) += sigma_b * std_b * rng.normal();
  }
  return out;
}

BipartiteGraph perturb_duals(const BipartiteGraph& g, Real sigma_y, std::uint64_t seed) {
  BipartiteGraph out = g;
  if (sigma_y == 0.0 || g.n_cons == 0) return out;
  Rng rng(seed);
  const Real std_y = column_std(g.C.col(ccol::kDualVal));
  for (int i = 0; i < g.n_cons; ++i) out.C(i, ccol::kDualVal) += sigma_y * std_y * rng.normal();
  return out;
}

namespace {

TrainingSample derive_lt(const TrainingSample& src, const MilpInstance& inst,
                         const DerivationConfig& cfg, std::uint64_t seed) {
  const AffineMap map = sample_affine_map(inst, cfg, seed);
  TrainingSample out = src;
  out.provenance = kProvLt;
  LtGraphInputs in{inst, src.node_lb, src.node_ub, src.has_incumbent != 0};
  out.graph = lt_transform_graph(src.graph, map, in);
  std::tie(out.node_lb, out.node_ub) = map_bounds(map, src.node_lb, src.node_ub);
  return out;  // candidate set, scores, label unchanged under the index map
}

TrainingSample derive_rc(const TrainingSample& src, const MilpInstance& inst,
                         const DerivationConfig& cfg, std::uint64_t seed) {
  // Redundant rows are drawn from the instance's own rows; the sample graph
  // shares that row set by construction.
  const RcAugmentation rc = rc_augment_instance(inst, cfg, seed);
  TrainingSample out = src;
  out.provenance = kProvRc;
  std::vector<ConsRow> added(rc.instance.rows.end() - rc.n_added, rc.instance.rows.end());
  out.graph = rc_augment_graph(src.graph, added, inst.obj);
  return out;
}

}  // namespace

std::vector<TrainingSample> augment_dataset(const std::vector<TrainingSample>& samples,
                                            const std::vector<MilpInstance>& instances,
                                            const DerivationConfig& cfg, AugmentStats* stats) {
  cfg.validate();
  for (const TrainingSample& s : samples)
    if (s.group_id < 0) throw Error("augment_dataset: samples must carry group ids");

  int n_groups = 0;
  for (const TrainingSample& s : samples) n_groups = std::max(n_groups, s.group_id + 1);
  std::vector<std::vector<std::size_t>> members(n_groups);
  for (std::size_t k = 0; k < samples.size(); ++k)
    members[samples[k].group_id].push_back(k);
  std::size_t max_size = 0;
  for (const auto& m : members) max_size = std::max(max_size, m.size());

  std::vector<TrainingSample> out = samples;
  Rng rng(cfg.seed);
  AugmentStats local;
  for (int g = 0; g < n_groups; ++g) {
    if (members[g].empty()) continue;
    std::size_t size = members[g].size();
    const bool can_grow = cfg.p_equivalent > 0.0 || cfg.p_perturbed > 0.0;
    int passes = 0;
    while (size < max_size && can_grow && passes < 100000) {
      ++passes;
      for (std::size_t idx : members[g]) {
        if (size >= max_size) break;
        const TrainingSample& src = samples[idx];
        if (src.instance_id < 0 ||
            src.instance_id >= static_cast<std::int32_t>(instances.size()))
          throw Error("augment_dataset: sample instance_id out of range");
        const MilpInstance& inst = instances[src.instance_id];
        struct Method {
          std::uint8_t tag;
          Real p;
        };
        const Method methods[] = {{kProvLt, cfg.p_equivalent},
                                  {kProvRc, cfg.p_equivalent},
                                  {kProvObjPert, cfg.p_perturbed},
                                  {kProvConsPert, cfg.p_perturbed},
                                  {kProvDualPert, cfg.p_perturbed}};
        for (const Method& m : methods) {
          if (size >= max_size) break;
          if (!rng.bernoulli(m.p)) continue;
          const std::uint64_t sub_seed = rng.next_u64();
          TrainingSample derived;
          switch (m.tag) {
            case kProvLt:
              derived = derive_lt(src, inst, cfg, sub_seed);
              ++local.added_lt;
              break;
            case kProvRc:
              derived = derive_rc(src, inst, cfg, sub_seed);
              ++local.added_rc;
              break;
            case kProvObjPert:
              derived = src;
              derived.provenance = kProvObjPert;
              derived.graph = perturb_objective(src.graph, cfg.sigma_c, sub_seed);
              ++local.added_obj;
              break;
            case kProvConsPert:
              derived = src;
              derived.provenance = kProvConsPert;
              derived.graph = perturb_constraints(src.graph, cfg.sigma_A, cfg.sigma_b, sub_seed);
              ++local.added_cons;
              break;
            case kProvDualPert:
              derived = src;
              derived.provenance = kProvDualPert;
              derived.graph = perturb_duals(src.graph, cfg.sigma_y, sub_seed);
              ++local.added_dual;
              break;
          }
          out.push_back(finalize_sample(std::move(derived)));
          // Derived samples keep the source label; finalize only quantizes.
          out.back().label_var = src.label_var;
          ++size;
        }
      }
    }
  }
  if (stats) *stats = local;
  return out;
}

}  // namespace stratobranch
