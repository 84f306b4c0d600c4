// Copyright (c) 2026 The stratobranch authors
// SPDX-License-Identifier: Apache-2.0
#include "stratobranch/milp.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

namespace stratobranch {

void MilpInstance::validate() const {
  if (n_vars <= 0) throw Error("instance '" + name + "': n_vars must be positive");
  auto expect_len = [&](std::size_t got, const char* what) {
    if (got != static_cast<std::size_t>(n_vars))
      throw Error("instance '" + name + "': " + what + " length mismatch");
  };
  expect_len(obj.size(), "obj");
  expect_len(lb.size(), "lb");
  expect_len(ub.size(), "ub");
  expect_len(int_mask.size(), "int_mask");
  expect_len(kinds.size(), "kinds");

  for (int j = 0; j < n_vars; ++j) {
    if (std::isnan(lb[j]) || std::isnan(ub[j])) throw Error("NaN bound");
    if (std::isfinite(lb[j]) && std::isfinite(ub[j]) && lb[j] > ub[j])
      throw Error("instance '" + name + "': lb > ub at variable " + std::to_string(j));
    if (kinds[j] == VarKind::kBinary) {
      if (!int_mask[j] || lb[j] != 0.0 || ub[j] != 1.0)
        throw Error("instance '" + name + "': binary variable " + std::to_string(j) +
                    " must be integral on [0, 1]");
    }
    if (int_mask[j] && kinds[j] == VarKind::kContinuous)
      throw Error("instance '" + name + "': continuous variable in integrality set");
  }

  for (std::size_t i = 0; i < rows.size(); ++i) {
    const ConsRow& row = rows[i];
    if (row.coefs.empty())
      throw Error("instance '" + name + "': constraint " + std::to_string(i) + " has no entries");
    std::unordered_set<int> seen;
    for (const auto& [j, a] : row.coefs) {
      if (j < 0 || j >= n_vars)
        throw Error("instance '" + name + "': column index out of range in row " +
                    std::to_string(i));
      if (!seen.insert(j).second)
        throw Error("instance '" + name + "': duplicate column in row " + std::to_string(i));
      if (!std::isfinite(a)) throw Error("non-finite constraint coefficient");
    }
    if (!std::isfinite(row.rhs)) throw Error("non-finite rhs");
  }
}

VarKind classify_kind(bool integral, VarKind previous, Real lb, Real ub) {
  if (!integral) return previous;
  return (lb == 0.0 && ub == 1.0) ? VarKind::kBinary : VarKind::kInteger;
}

bool check_feasible(const MilpInstance& inst, const std::vector<Real>& x, Real tol) {
  if (x.size() != static_cast<std::size_t>(inst.n_vars))
    throw Error("check_feasible: x length mismatch");
  for (int j = 0; j < inst.n_vars; ++j) {
    if (x[j] < inst.lb[j] - tol || x[j] > inst.ub[j] + tol) return false;
    if (inst.int_mask[j] && std::abs(x[j] - std::round(x[j])) > tol) return false;
  }
  for (const ConsRow& row : inst.rows) {
    Real lhs = 0.0;
    for (const auto& [j, a] : row.coefs) lhs += a * x[j];
    if (lhs > row.rhs + tol * (1.0 + std::abs(row.rhs))) return false;
  }
  return true;
}

void AffineMap::validate(const MilpInstance& inst) const {
  if (signs.size() != static_cast<std::size_t>(inst.n_vars) || shift.size() != signs.size())
    throw Error("AffineMap: dimension mismatch");
  for (int j = 0; j < inst.n_vars; ++j) {
    if (signs[j] != 1.0 && signs[j] != -1.0) throw Error("AffineMap: sign must be +-1");
    if (inst.int_mask[j] && shift[j] != std::round(shift[j]))
      throw Error("AffineMap: non-integer shift on integer variable");
  }
}

namespace {

using nlohmann::json;

json bound_to_json(Real v) {
  if (v == kInf) return json("inf");
  if (v == -kInf) return json("-inf");
  return json(v);
}

Real bound_from_json(const json& j) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
    throw Error("bad bound sentinel '" + s + "'");
  }
  return j.get<Real>();
}

const char* kind_name(VarKind k) {
  switch (k) {
    case VarKind::kBinary: return "binary";
    case VarKind::kInteger: return "integer";
    case VarKind::kImplicitInteger: return "implicit_integer";
    case VarKind::kContinuous: return "continuous";
  }
  throw Error("bad kind");
}

VarKind kind_from_name(const std::string& s) {
  if (s == "binary") return VarKind::kBinary;
  if (s == "integer") return VarKind::kInteger;
  if (s == "implicit_integer") return VarKind::kImplicitInteger;
  if (s == "continuous") return VarKind::kContinuous;
  throw Error("unknown variable kind '" + s + "'");
}

}  // namespace

std::string to_json(const MilpInstance& inst) {
  json j;
  j["name"] = inst.name;
  j["n_vars"] = inst.n_vars;
  j["obj"] = inst.obj;
  json bounds = json::array();
  for (int v = 0; v < inst.n_vars; ++v)
    bounds.push_back(json::array({bound_to_json(inst.lb[v]), bound_to_json(inst.ub[v])}));
  j["bounds"] = std::move(bounds);
  json kinds = json::array();
  for (VarKind k : inst.kinds) kinds.push_back(kind_name(k));
  j["kinds"] = std::move(kinds);
  json rows = json::array();
  for (const ConsRow& row : inst.rows) {
    json r;
    json coefs = json::array();
    for (const auto& [col, a] : row.coefs) coefs.push_back(json::array({col, a}));
    r["coefs"] = std::move(coefs);
    r["rhs"] = row.rhs;
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  return j.dump(2);
}

MilpInstance instance_from_json(const std::string& text) {
  json j = json::parse(text);
  MilpInstance inst;
  inst.name = j.at("name").get<std::string>();
  inst.n_vars = j.at("n_vars").get<int>();
  inst.obj = j.at("obj").get<std::vector<Real>>();
  for (const json& b : j.at("bounds")) {
    inst.lb.push_back(bound_from_json(b.at(0)));
    inst.ub.push_back(bound_from_json(b.at(1)));
  }
  for (const json& k : j.at("kinds")) {
    const VarKind kind = kind_from_name(k.get<std::string>());
    inst.kinds.push_back(kind);
    inst.int_mask.push_back(kind == VarKind::kBinary || kind == VarKind::kInteger);
  }
  for (const json& r : j.at("rows")) {
    ConsRow row;
    row.rhs = r.at("rhs").get<Real>();
    for (const json& c : r.at("coefs"))
      row.coefs.emplace_back(c.at(0).get<int>(), c.at(1).get<Real>());
    inst.rows.push_back(std::move(row));
  }
  inst.validate();
  return inst;
}

void write_instance(const MilpInstance& inst, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << to_json(inst) << '\n';
}

MilpInstance read_instance(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return instance_from_json(buf.str());
}

}  // namespace stratobranch
