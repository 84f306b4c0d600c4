// Copyright (c) 2026 The stratobranch authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "stratobranch/milp.hpp"

namespace stratobranch {

enum class Family : std::uint8_t {
  kSetCovering,
  kCombinatorialAuction,
  kFacilityLocation,
  kIndependentSet,
};

const char* family_name(Family f);
Family family_from_name(const std::string& s);

// Desk-scale defaults per family; unused size fields are ignored.
struct GenSpec {
  Family family = Family::kSetCovering;
  std::uint64_t seed = 0;
  // set covering
  int rows = 60, cols = 120;
  Real density = 0.05;
  // combinatorial auction
  int items = 30, bids = 60;
  // capacitated facility location
  int customers = 15, facilities = 10;
  // maximum independent set
  int graph_nodes = 50;
  Real edge_prob = 0.25;

  void validate() const;
};

// Seeded generator; every instance is feasible by construction and normalized
// to minimization with <= rows.
MilpInstance generate(const GenSpec& spec);

// A feasible point the generator can vouch for (all-ones cover, empty
// selection, all facilities open, ...), used by the feasibility properties.
std::vector<Real> feasible_witness(const GenSpec& spec, const MilpInstance& inst);

}  // namespace stratobranch
