// Copyright (c) 2026 The stratobranch authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "stratobranch/common.hpp"

namespace stratobranch {

enum class VarKind : std::uint8_t { kBinary, kInteger, kImplicitInteger, kContinuous };

// One sparse constraint row a_i' x <= rhs.
struct ConsRow {
  std::vector<std::pair<int, Real>> coefs;  // (column, coefficient), unique in-range columns
  Real rhs = 0.0;
};

// Minimization MILP:  min c'x  s.t.  A x <= b,  l <= x <= u,  x_j integral for j in int_mask.
struct MilpInstance {
  std::string name;
  int n_vars = 0;
  std::vector<Real> obj;        // c
  std::vector<ConsRow> rows;    // A, b
  std::vector<Real> lb, ub;     // l, u; +-inf allowed
  std::vector<bool> int_mask;   // integrality set
  std::vector<VarKind> kinds;

  int n_cons() const { return static_cast<int>(rows.size()); }

  // Throws Error on any violated structural invariant.
  void validate() const;
};

// Derives the variable kind consistent with the integrality mask and bounds:
// integral on exactly [0, 1] is binary.
VarKind classify_kind(bool integral, VarKind previous, Real lb, Real ub);

// All constraints, bounds, and integrality within tol.
bool check_feasible(const MilpInstance& inst, const std::vector<Real>& x, Real tol);

// Sign-flip-plus-integer-shift change of variables x_hat = signs .* x + shift.
// shift is integral on integer variables.
struct AffineMap {
  std::vector<Real> signs;  // entries +1 or -1
  std::vector<Real> shift;  // t; integral on the integrality set

  void validate(const MilpInstance& inst) const;
};

// JSON text schema round-trips bit-exactly for finite values; infinities are
// written as the string sentinels "inf" / "-inf".
std::string to_json(const MilpInstance& inst);
MilpInstance instance_from_json(const std::string& text);
void write_instance(const MilpInstance& inst, const std::string& path);
MilpInstance read_instance(const std::string& path);

}  // namespace stratobranch
