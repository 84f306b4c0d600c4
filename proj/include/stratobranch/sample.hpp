// Copyright (c) 2026 The stratobranch authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "stratobranch/bnb.hpp"
#include "stratobranch/graph.hpp"

namespace stratobranch {

enum Provenance : std::uint8_t {
  kProvOriginal = 0,
  kProvLt = 1,
  kProvRc = 2,
  kProvObjPert = 3,
  kProvConsPert = 4,
  kProvDualPert = 5,
};

const char* provenance_name(std::uint8_t p);

// One expert decision: the node's bipartite graph, its candidate set, the
// full strong-branching score vector, and the argmax label. Tensors are
// quantized to the container's 32-bit precision at creation so an in-memory
// sample and its serialized form agree exactly.
struct TrainingSample {
  std::uint8_t provenance = kProvOriginal;
  std::uint8_t has_incumbent = 0;
  std::int32_t instance_id = 0;
  std::int32_t depth = 0;
  std::int32_t n_root = 0;
  std::int32_t group_id = -1;  // -1 until assigned
  std::int32_t label_var = -1;
  BipartiteGraph graph;
  std::vector<Real> node_lb, node_ub;  // tightened bounds of the node
  std::vector<std::int32_t> cand;
  std::vector<Real> sb_scores;  // aligned with cand
};

// Quantizes tensors/scores through float and recomputes the label as the
// argmax of the quantized score vector (lowest index on ties).
TrainingSample finalize_sample(TrainingSample s);

struct SampleManifest {
  std::int64_t n_samples = 0;
  int var_dim = vcol::kCount, cons_dim = ccol::kCount, edge_dim = 1;
  std::vector<std::int32_t> instance_ids;  // unique, ascending
  std::uint64_t seed = 0;
  std::string config_hash;
  std::string produced_by;
};

// Length-prefixed little-endian binary container plus a JSON sidecar
// ("<path>.manifest.json"). Round-trips bit-exactly.
void write_samples(const std::string& path, const std::vector<TrainingSample>& samples,
                   const SampleManifest& manifest);
std::vector<TrainingSample> read_samples(const std::string& path,
                                         SampleManifest* manifest_out = nullptr);

struct CollectOptions {
  SolveLimits limits;
  bool skip_failed_instances = false;
  LpOptions lp;
};

struct CollectStats {
  int instances_solved = 0;
  int instances_skipped = 0;
  std::int64_t nodes_total = 0;
};

// Rolls out the strong-branching policy on each instance and emits one
// sample per branched node. Deterministic for fixed inputs and seed.
std::vector<TrainingSample> collect_expert_samples(const std::vector<MilpInstance>& instances,
                                                   const CollectOptions& opts,
                                                   CollectStats* stats = nullptr);

}  // namespace stratobranch
