// Copyright (c) 2026 The stratobranch authors
// SPDX-License-Identifier: Apache-2.0
#include "stratobranch/sample.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <iostream>

#include <json.hpp>

namespace stratobranch {

const char* provenance_name(std::uint8_t p) {
  switch (p) {
    case kProvOriginal: return "original";
    case kProvLt: return "lt_equivalent";
    case kProvRc: return "rc_equivalent";
    case kProvObjPert: return "objective_perturbed";
    case kProvConsPert: return "constraint_perturbed";
    case kProvDualPert: return "dual_perturbed";
  }
  return "unknown";
}

namespace {

Real q32(Real v) { return static_cast<Real>(static_cast<float>(v)); }

constexpr char kMagic[8] = {'S', 'B', 'S', 'M', 'P', 'V', '0', '1'};

struct Writer {
  std::vector<char> buf;
  template <typename T>
  void put(T v) {
    const std::size_t at = buf.size();
    buf.resize(at + sizeof(T));
    std::memcpy(buf.data() + at, &v, sizeof(T));
  }
};

struct Reader {
  const char* p;
  const char* end;
  template <typename T>
  T get() {
    if (p + sizeof(T) > end) throw Error("sample container truncated");
    T v;
    std::memcpy(&v, p, sizeof(T));
    p += sizeof(T);
    return v;
  }
};

}  // namespace

TrainingSample finalize_sample(TrainingSample s) {
  for (int i = 0; i < s.graph.n_cons; ++i)
    for (int c = 0; c < ccol::kCount; ++c) s.graph.C(i, c) = q32(s.graph.C(i, c));
  for (int j = 0; j < s.graph.n_vars; ++j)
    for (int c = 0; c < vcol::kCount; ++c) s.graph.V(j, c) = q32(s.graph.V(j, c));
  for (auto& e : s.graph.edges) e.coef = q32(e.coef);
  for (Real& v : s.node_lb) v = q32(v);
  for (Real& v : s.node_ub) v = q32(v);
  for (Real& v : s.sb_scores) v = q32(v);
  if (!s.cand.empty()) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < s.sb_scores.size(); ++k)
      if (s.sb_scores[k] > s.sb_scores[best]) best = k;
    s.label_var = s.cand[best];
  }
  return s;
}

void write_samples(const std::string& path, const std::vector<TrainingSample>& samples,
                   const SampleManifest& manifest) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out.write(kMagic, sizeof(kMagic));
  const std::uint64_t n = samples.size();
  out.write(reinterpret_cast<const char*>(&n), sizeof(n));

  for (const TrainingSample& s : samples) {
    Writer w;
    w.put<std::uint8_t>(s.provenance);
    w.put<std::uint8_t>(s.has_incumbent);
    w.put<std::int32_t>(s.instance_id);
    w.put<std::int32_t>(s.depth);
    w.put<std::int32_t>(s.n_root);
    w.put<std::int32_t>(s.group_id);
    w.put<std::int32_t>(s.label_var);
    w.put<std::int32_t>(s.graph.n_cons);
    w.put<std::int32_t>(s.graph.n_vars);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(s.graph.edges.size()));
    w.put<std::uint32_t>(static_cast<std::uint32_t>(s.cand.size()));
    for (int i = 0; i < s.graph.n_cons; ++i)
      for (int c = 0; c < ccol::kCount; ++c) w.put<float>(static_cast<float>(s.graph.C(i, c)));
    for (int j = 0; j < s.graph.n_vars; ++j)
      for (int c = 0; c < vcol::kCount; ++c) w.put<float>(static_cast<float>(s.graph.V(j, c)));
    for (const auto& e : s.graph.edges) {
      w.put<std::int32_t>(e.cons);
      w.put<std::int32_t>(e.var);
      w.put<float>(static_cast<float>(e.coef));
    }
    for (Real b : s.node_lb) w.put<float>(static_cast<float>(b));
    for (Real b : s.node_ub) w.put<float>(static_cast<float>(b));
    for (std::int32_t c : s.cand) w.put<std::int32_t>(c);
    for (Real sc : s.sb_scores) w.put<float>(static_cast<float>(sc));

    const std::uint32_t len = static_cast<std::uint32_t>(w.buf.size());
    out.write(reinterpret_cast<const char*>(&len), sizeof(len));
    out.write(w.buf.data(), static_cast<std::streamsize>(w.buf.size()));
  }
  if (!out) throw Error("write failed for '" + path + "'");

  nlohmann::json m;
  m["n_samples"] = manifest.n_samples ? manifest.n_samples
                                      : static_cast<std::int64_t>(samples.size());
  m["feature_dims"] = {{"var", manifest.var_dim}, {"cons", manifest.cons_dim},
                       {"edge", manifest.edge_dim}};
  m["instance_ids"] = manifest.instance_ids;
  m["seed"] = manifest.seed;
  m["config_hash"] = manifest.config_hash;
  m["produced_by"] = manifest.produced_by;
  std::ofstream mf(path + ".manifest.json");
  mf << m.dump(2) << '\n';
}

std::vector<TrainingSample> read_samples(const std::string& path, SampleManifest* manifest_out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() < sizeof(kMagic) + sizeof(std::uint64_t) ||
      std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0)
    throw Error("'" + path + "' is not a sample container");

  Reader r{bytes.data() + sizeof(kMagic), bytes.data() + bytes.size()};
  const std::uint64_t n = r.get<std::uint64_t>();
  std::vector<TrainingSample> samples;
  samples.reserve(n);
  for (std::uint64_t rec = 0; rec < n; ++rec) {
    const std::uint32_t len = r.get<std::uint32_t>();
    if (r.p + len > r.end) throw Error("sample container truncated");
    const char* rec_end = r.p + len;
    TrainingSample s;
    s.provenance = r.get<std::uint8_t>();
    s.has_incumbent = r.get<std::uint8_t>();
    s.instance_id = r.get<std::int32_t>();
    s.depth = r.get<std::int32_t>();
    s.n_root = r.get<std::int32_t>();
    s.group_id = r.get<std::int32_t>();
    s.label_var = r.get<std::int32_t>();
    s.graph.n_cons = r.get<std::int32_t>();
    s.graph.n_vars = r.get<std::int32_t>();
    const std::uint32_t n_edges = r.get<std::uint32_t>();
    const std::uint32_t n_cand = r.get<std::uint32_t>();
    s.graph.C.resize(s.graph.n_cons, ccol::kCount);
    s.graph.V.resize(s.graph.n_vars, vcol::kCount);
    for (int i = 0; i < s.graph.n_cons; ++i)
      for (int c = 0; c < ccol::kCount; ++c) s.graph.C(i, c) = r.get<float>();
    for (int j = 0; j < s.graph.n_vars; ++j)
      for (int c = 0; c < vcol::kCount; ++c) s.graph.V(j, c) = r.get<float>();
    s.graph.edges.resize(n_edges);
    for (auto& e : s.graph.edges) {
      e.cons = r.get<std::int32_t>();
      e.var = r.get<std::int32_t>();
      e.coef = r.get<float>();
    }
    s.node_lb.resize(s.graph.n_vars);
    for (auto& b : s.node_lb) b = r.get<float>();
    s.node_ub.resize(s.graph.n_vars);
    for (auto& b : s.node_ub) b = r.get<float>();
    s.cand.resize(n_cand);
    for (auto& c : s.cand) c = r.get<std::int32_t>();
    s.sb_scores.resize(n_cand);
    for (auto& sc : s.sb_scores) sc = r.get<float>();
    s.graph.cand_mask.assign(s.graph.n_vars, false);
    for (std::int32_t c : s.cand) s.graph.cand_mask[c] = true;
    if (r.p != rec_end) throw Error("sample record length mismatch");
    samples.push_back(std::move(s));
  }

  if (manifest_out) {
    std::ifstream mf(path + ".manifest.json");
    if (mf) {
      nlohmann::json m = nlohmann::json::parse(mf);
      manifest_out->n_samples = m.value("n_samples", static_cast<std::int64_t>(samples.size()));
      manifest_out->instance_ids =
          m.value("instance_ids", std::vector<std::int32_t>{});
      manifest_out->seed = m.value("seed", std::uint64_t{0});
      manifest_out->config_hash = m.value("config_hash", std::string{});
      manifest_out->produced_by = m.value("produced_by", std::string{});
    } else {
      manifest_out->n_samples = static_cast<std::int64_t>(samples.size());
    }
  }
  return samples;
}

std::vector<TrainingSample> collect_expert_samples(const std::vector<MilpInstance>& instances,
                                                   const CollectOptions& opts,
                                                   CollectStats* stats) {
  std::vector<TrainingSample> samples;
  auto policy = make_strong_branching_policy();
  for (std::size_t idx = 0; idx < instances.size(); ++idx) {
    const MilpInstance& inst = instances[idx];
    std::vector<TrainingSample> local;
    const NodeObserver observer = [&](NodeContext& ctx, int /*chosen*/) {
      TrainingSample s;
      s.provenance = kProvOriginal;
      s.instance_id = static_cast<std::int32_t>(idx);
      s.depth = ctx.node().depth;
      s.n_root = ctx.n_root_candidates();
      s.graph = ctx.graph();
      s.node_lb = ctx.node().lb;
      s.node_ub = ctx.node().ub;
      s.has_incumbent = ctx.state().incumbents.empty() ? 0 : 1;
      const auto& sb = ctx.sb_all();
      s.cand.reserve(sb.size());
      s.sb_scores.reserve(sb.size());
      for (const SbScore& sc : sb) {
        s.cand.push_back(sc.var);
        s.sb_scores.push_back(sc.score);
      }
      local.push_back(finalize_sample(std::move(s)));
    };
    try {
      const SolveReport report = solve(inst, *policy, opts.limits, observer, opts.lp);
      if (stats) {
        ++stats->instances_solved;
        stats->nodes_total += report.nodes;
      }
    } catch (const Error& e) {
      if (!opts.skip_failed_instances) throw;
      std::cerr << "collect: skipping instance " << idx << " (" << inst.name
                << "): " << e.what() << '\n';
      if (stats) ++stats->instances_skipped;
      continue;
    }
    for (auto& s : local) samples.push_back(std::move(s));
  }
  return samples;
}

}  // namespace stratobranch
