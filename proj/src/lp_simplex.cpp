// Copyright (c) 2026 The stratobranch authors
// SPDX-License-Identifier: Apache-2.0
//
// Bounded-variable primal simplex in dense revised form.
//
// The problem min c'x, Ax <= b, l <= x <= u is solved over the extended
// column set [structural | slacks | artificials] with Ax + s = b. Phase 1
// drives artificials (added only for rows whose initial slack is negative)
// to zero; phase 2 optimizes c. The basis inverse is kept explicitly and
// refactorized periodically through Eigen's LU.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "stratobranch/lp.hpp"

namespace stratobranch {

namespace {

enum class ColStatus : std::uint8_t { kBasic, kAtLower, kAtUpper, kFree };

constexpr Real kPivotTol = 1e-9;    // smallest usable pivot magnitude
constexpr Real kDegenStep = 1e-11;  // step below this counts as degenerate
constexpr int kBlandTrigger = 50;   // consecutive degenerate pivots before Bland
constexpr int kRefactorEvery = 200;

struct SparseCol {
  std::vector<std::pair<int, Real>> entries;  // (row, coef)
};

class Simplex {
 public:
  Simplex(const MilpInstance& inst, const std::vector<Real>& lb, const std::vector<Real>& ub,
          const LpOptions& opts)
      : inst_(inst), opts_(opts), n_(inst.n_vars), q_(inst.n_cons()) {
    cols_.resize(n_ + q_);
    lo_.assign(n_ + q_, 0.0);
    hi_.assign(n_ + q_, kInf);
    for (int j = 0; j < n_; ++j) {
      lo_[j] = lb[j];
      hi_[j] = ub[j];
    }
    rhs_.resize(q_);
    for (int i = 0; i < q_; ++i) {
      rhs_[i] = inst.rows[i].rhs;
      for (const auto& [j, a] : inst.rows[i].coefs) cols_[j].entries.emplace_back(i, a);
      cols_[n_ + i].entries.emplace_back(i, 1.0);  // slack
    }
  }

  LpResult run() {
    LpResult res;
    for (int j = 0; j < n_; ++j)
      if (lo_[j] > hi_[j]) return res;  // empty box, kInfeasible

    if (q_ == 0) return solve_unconstrained();

    init_basis();
    setup_artificials();

    if (n_art_ > 0) {
      std::vector<Real> phase1_cost(num_cols(), 0.0);
      for (int a = 0; a < n_art_; ++a) phase1_cost[n_ + q_ + a] = 1.0;
      const IterStatus st = iterate(phase1_cost, /*allow_unbounded=*/false);
      if (st == IterStatus::kIterationLimit) {
        res.status = LpStatus::kIterationLimit;
        res.iterations = iterations_;
        return res;
      }
      refactorize();
      Real infeas = 0.0;
      for (int r = 0; r < q_; ++r)
        if (basis_[r] >= n_ + q_) infeas += beta_[r];
      Real bscale = 1.0;
      for (int i = 0; i < q_; ++i) bscale = std::max(bscale, std::abs(rhs_[i]));
      if (infeas > opts_.feas_tol * bscale) {
        res.status = LpStatus::kInfeasible;
        res.iterations = iterations_;
        return res;
      }
      // Lock artificials at zero for phase 2.
      for (int a = 0; a < n_art_; ++a) hi_[n_ + q_ + a] = 0.0;
    }

    std::vector<Real> cost(num_cols(), 0.0);
    for (int j = 0; j < n_; ++j) cost[j] = inst_.obj[j];
    const IterStatus st = iterate(cost, /*allow_unbounded=*/true);
    res.iterations = iterations_;
    if (st == IterStatus::kIterationLimit) {
      res.status = LpStatus::kIterationLimit;
      return res;
    }
    if (st == IterStatus::kUnbounded) {
      res.status = LpStatus::kUnbounded;
      res.obj = -kInf;
      return res;
    }
    refactorize();
    extract(cost, res);
    return res;
  }

 private:
  enum class IterStatus { kOptimal, kUnbounded, kIterationLimit };

  int num_cols() const { return n_ + q_ + n_art_; }

  Real col_value(int j) const {
    const int r = basis_row_[j];
    return r >= 0 ? beta_[r] : val_[j];
  }

  LpResult solve_unconstrained() {
    LpResult res;
    res.x.assign(n_, 0.0);
    res.reduced_costs.assign(n_, 0.0);
    res.basis.assign(n_, BasisStatus::kFree);
    for (int j = 0; j < n_; ++j) {
      const Real c = inst_.obj[j];
      if (c > 0.0 || (c == 0.0 && std::isfinite(lo_[j]))) {
        if (!std::isfinite(lo_[j])) {
          if (c != 0.0) {
            res.status = LpStatus::kUnbounded;
            res.obj = -kInf;
            return res;
          }
        } else {
          res.x[j] = lo_[j];
          res.basis[j] = BasisStatus::kAtLower;
        }
      } else if (c < 0.0 || std::isfinite(hi_[j])) {
        if (!std::isfinite(hi_[j])) {
          res.status = LpStatus::kUnbounded;
          res.obj = -kInf;
          return res;
        }
        res.x[j] = hi_[j];
        res.basis[j] = BasisStatus::kAtUpper;
      }
      res.reduced_costs[j] = c;
      res.obj += c * res.x[j];
    }
    res.status = LpStatus::kOptimal;
    return res;
  }

  void init_basis() {
    status_.assign(n_ + q_, ColStatus::kAtLower);
    val_.assign(n_ + q_, 0.0);
    basis_row_.assign(n_ + q_, -1);
    basis_.resize(q_);
    for (int j = 0; j < n_; ++j) {
      if (std::isfinite(lo_[j])) {
        status_[j] = ColStatus::kAtLower;
        val_[j] = lo_[j];
      } else if (std::isfinite(hi_[j])) {
        status_[j] = ColStatus::kAtUpper;
        val_[j] = hi_[j];
      } else {
        status_[j] = ColStatus::kFree;
        val_[j] = 0.0;
      }
    }
    for (int i = 0; i < q_; ++i) {
      const int slack = n_ + i;
      basis_[i] = slack;
      basis_row_[slack] = i;
      status_[slack] = ColStatus::kBasic;
    }
    binv_ = Eigen::MatrixXd::Identity(q_, q_);
    recompute_beta();
  }

  void setup_artificials() {
    n_art_ = 0;
    for (int i = 0; i < q_; ++i) {
      if (beta_[i] >= 0.0) continue;
      const int art = n_ + q_ + n_art_;
      ++n_art_;
      cols_.push_back(SparseCol{{{i, -1.0}}});
      lo_.push_back(0.0);
      hi_.push_back(kInf);
      status_.push_back(ColStatus::kBasic);
      val_.push_back(0.0);
      basis_row_.push_back(i);

      const int slack = basis_[i];
      status_[slack] = ColStatus::kAtLower;
      val_[slack] = 0.0;
      basis_row_[slack] = -1;
      basis_[i] = art;
      binv_.row(i) *= -1.0;
      beta_[i] = -beta_[i];
    }
  }

  void recompute_beta() {
    Eigen::VectorXd adj = Eigen::Map<const Eigen::VectorXd>(rhs_.data(), q_);
    for (int j = 0; j < num_cols(); ++j) {
      if (basis_row_[j] >= 0 || val_[j] == 0.0) continue;
      for (const auto& [r, a] : cols_[j].entries) adj[r] -= a * val_[j];
    }
    Eigen::VectorXd bt = binv_ * adj;
    beta_.assign(bt.data(), bt.data() + q_);
  }

  void refactorize() {
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(q_, q_);
    for (int r = 0; r < q_; ++r)
      for (const auto& [row, a] : cols_[basis_[r]].entries) B(row, r) = a;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);
    binv_ = lu.inverse();
    recompute_beta();
  }

  Eigen::VectorXd dual_of(const std::vector<Real>& cost) const {
    Eigen::VectorXd cb(q_);
    for (int r = 0; r < q_; ++r) cb[r] = cost[basis_[r]];
    return binv_.transpose() * cb;
  }

  Real reduced_cost(const std::vector<Real>& cost, const Eigen::VectorXd& y, int j) const {
    Real d = cost[j];
    for (const auto& [r, a] : cols_[j].entries) d -= y[r] * a;
    return d;
  }

  IterStatus iterate(const std::vector<Real>& cost, bool allow_unbounded) {
    int degen_run = 0;
    while (true) {
      if (iterations_ >= opts_.max_pivots) return IterStatus::kIterationLimit;

      const Eigen::VectorXd y = dual_of(cost);

      // Pricing: Dantzig most-violating column, lowest index on ties;
      // Bland's lowest eligible index once triggered.
      int enter = -1;
      Real best_viol = opts_.opt_tol;
      int dir = +1;
      for (int j = 0; j < num_cols(); ++j) {
        if (basis_row_[j] >= 0 || lo_[j] == hi_[j]) continue;
        const Real d = reduced_cost(cost, y, j);
        Real viol = 0.0;
        int jdir = 0;
        if (status_[j] == ColStatus::kAtLower && d < -opts_.opt_tol) {
          viol = -d;
          jdir = +1;
        } else if (status_[j] == ColStatus::kAtUpper && d > opts_.opt_tol) {
          viol = d;
          jdir = -1;
        } else if (status_[j] == ColStatus::kFree && std::abs(d) > opts_.opt_tol) {
          viol = std::abs(d);
          jdir = d < 0 ? +1 : -1;
        } else {
          continue;
        }
        if (bland_) {
          enter = j;
          dir = jdir;
          break;
        }
        if (viol > best_viol) {
          best_viol = viol;
          enter = j;
          dir = jdir;
        }
      }
      if (enter < 0) return IterStatus::kOptimal;

      // Entering column in the current basis frame.
      Eigen::VectorXd m = Eigen::VectorXd::Zero(q_);
      for (const auto& [r, a] : cols_[enter].entries) m[r] = a;
      const Eigen::VectorXd w = binv_ * m;

      // Ratio test. beta_r moves at rate delta_r = -dir * w_r per unit step.
      Real t_bound = kInf;
      if (std::isfinite(lo_[enter]) && std::isfinite(hi_[enter]))
        t_bound = hi_[enter] - lo_[enter];
      Real t_min = t_bound;
      int leave_row = -1;
      for (int r = 0; r < q_; ++r) {
        if (std::abs(w[r]) <= kPivotTol) continue;
        const Real delta = -static_cast<Real>(dir) * w[r];
        const int k = basis_[r];
        Real ratio;
        if (delta > 0.0) {
          if (!std::isfinite(hi_[k])) continue;
          ratio = (hi_[k] - beta_[r]) / delta;
        } else {
          if (!std::isfinite(lo_[k])) continue;
          ratio = (lo_[k] - beta_[r]) / delta;
        }
        if (ratio < 0.0) ratio = 0.0;  // basic marginally past its bound
        if (ratio < t_min - 1e-12) {
          t_min = ratio;
          leave_row = r;
        } else if (leave_row >= 0 && ratio <= t_min + 1e-12) {
          // Tie: prefer the larger pivot for stability, then the lower column
          // id (always the lower id under Bland).
          const bool better = bland_ ? basis_[r] < basis_[leave_row]
                                     : std::abs(w[r]) > std::abs(w[leave_row]) + 1e-15 ||
                                           (std::abs(std::abs(w[r]) - std::abs(w[leave_row])) <=
                                                1e-15 &&
                                            basis_[r] < basis_[leave_row]);
          if (better) leave_row = r;
        } else if (leave_row < 0 && ratio <= t_min) {
          t_min = ratio;
          leave_row = r;
        }
      }

      if (!std::isfinite(t_min) && leave_row < 0 && !std::isfinite(t_bound)) {
        if (!allow_unbounded) throw Error("simplex: unbounded phase-1 subproblem");
        return IterStatus::kUnbounded;
      }

      const Real t = std::min(t_min, t_bound);
      ++iterations_;
      if (t <= kDegenStep) {
        if (++degen_run >= kBlandTrigger) bland_ = true;
      } else {
        degen_run = 0;
      }

      // Move the basic values.
      if (t != 0.0)
        for (int r = 0; r < q_; ++r) beta_[r] -= static_cast<Real>(dir) * t * w[r];

      if (leave_row < 0 || t_bound <= t_min) {
        // Bound flip: the entering variable crosses to its other bound.
        status_[enter] = dir > 0 ? ColStatus::kAtUpper : ColStatus::kAtLower;
        val_[enter] = dir > 0 ? hi_[enter] : lo_[enter];
        continue;
      }

      // Basis exchange.
      const int leave = basis_[leave_row];
      const Real delta_leave = -static_cast<Real>(dir) * w[leave_row];
      status_[leave] = delta_leave > 0.0 ? ColStatus::kAtUpper : ColStatus::kAtLower;
      val_[leave] = delta_leave > 0.0 ? hi_[leave] : lo_[leave];
      basis_row_[leave] = -1;

      const Real enter_val = val_[enter] + static_cast<Real>(dir) * t;
      const Real piv = w[leave_row];
      binv_.row(leave_row) /= piv;
      for (int r = 0; r < q_; ++r) {
        if (r == leave_row || w[r] == 0.0) continue;
        binv_.row(r) -= w[r] * binv_.row(leave_row);
      }
      basis_[leave_row] = enter;
      basis_row_[enter] = leave_row;
      status_[enter] = ColStatus::kBasic;
      beta_[leave_row] = enter_val;

      if (iterations_ % kRefactorEvery == 0) refactorize();
    }
  }

  void extract(const std::vector<Real>& cost, LpResult& res) const {
    res.status = LpStatus::kOptimal;
    res.x.resize(n_);
    res.basis.resize(n_);
    res.reduced_costs.assign(n_, 0.0);
    for (int j = 0; j < n_; ++j) {
      res.x[j] = col_value(j);
      switch (status_[j]) {
        case ColStatus::kBasic: res.basis[j] = BasisStatus::kBasic; break;
        case ColStatus::kAtLower: res.basis[j] = BasisStatus::kAtLower; break;
        case ColStatus::kAtUpper: res.basis[j] = BasisStatus::kAtUpper; break;
        case ColStatus::kFree: res.basis[j] = BasisStatus::kFree; break;
      }
    }
    res.obj = 0.0;
    for (int j = 0; j < n_; ++j) res.obj += inst_.obj[j] * res.x[j];

    const Eigen::VectorXd y = dual_of(cost);
    res.duals.resize(q_);
    for (int i = 0; i < q_; ++i) res.duals[i] = -y[i];
    for (int j = 0; j < n_; ++j)
      if (status_[j] != ColStatus::kBasic) res.reduced_costs[j] = reduced_cost(cost, y, j);
    res.iterations = iterations_;
  }

  const MilpInstance& inst_;
  const LpOptions& opts_;
  int n_ = 0, q_ = 0, n_art_ = 0;
  std::vector<SparseCol> cols_;
  std::vector<Real> lo_, hi_, rhs_;
  std::vector<ColStatus> status_;
  std::vector<Real> val_;
  std::vector<int> basis_, basis_row_;
  std::vector<Real> beta_;
  Eigen::MatrixXd binv_;
  int iterations_ = 0;
  bool bland_ = false;
};

}  // namespace

LpResult lp_solve_bounded(const MilpInstance& inst, const std::vector<Real>& lb,
                          const std::vector<Real>& ub, const LpOptions& opts) {
  if (lb.size() != static_cast<std::size_t>(inst.n_vars) || ub.size() != lb.size())
    throw Error("lp_solve_bounded: bound length mismatch");
  Simplex solver(inst, lb, ub, opts);
  return solver.run();
}

LpResult lp_solve(const MilpInstance& inst, const LpOptions& opts) {
  return lp_solve_bounded(inst, inst.lb, inst.ub, opts);
}

BruteForceResult brute_force_opt(const MilpInstance& inst, std::uint64_t oracle_cap,
                                 const LpOptions& opts) {
  std::vector<int> int_vars;
  for (int j = 0; j < inst.n_vars; ++j)
    if (inst.int_mask[j]) int_vars.push_back(j);

  std::uint64_t grid = 1;
  for (int j : int_vars) {
    if (!std::isfinite(inst.lb[j]) || !std::isfinite(inst.ub[j]))
      throw Error("brute_force_opt: integer variable " + std::to_string(j) +
                  " has infinite bounds");
    const Real span = std::floor(inst.ub[j]) - std::ceil(inst.lb[j]) + 1.0;
    if (span <= 0) return {};  // no integer point in the box
    if (span > static_cast<Real>(oracle_cap) || grid > oracle_cap / static_cast<std::uint64_t>(span))
      throw Error("brute_force_opt: integer grid exceeds oracle_cap");
    grid *= static_cast<std::uint64_t>(span);
  }

  const bool pure_integer = int_vars.size() == static_cast<std::size_t>(inst.n_vars);
  BruteForceResult best;

  std::vector<Real> assign(int_vars.size());
  for (std::size_t k = 0; k < int_vars.size(); ++k) assign[k] = std::ceil(inst.lb[int_vars[k]]);

  std::vector<Real> lb = inst.lb, ub = inst.ub;
  for (std::uint64_t it = 0; it < grid; ++it) {
    if (pure_integer) {
      std::vector<Real> x(inst.n_vars);
      for (std::size_t k = 0; k < int_vars.size(); ++k) x[int_vars[k]] = assign[k];
      bool ok = true;
      for (const ConsRow& row : inst.rows) {
        Real lhs = 0.0;
        for (const auto& [j, a] : row.coefs) lhs += a * x[j];
        if (lhs > row.rhs + opts.feas_tol * (1.0 + std::abs(row.rhs))) {
          ok = false;
          break;
        }
      }
      if (ok) {
        Real obj = 0.0;
        for (int j = 0; j < inst.n_vars; ++j) obj += inst.obj[j] * x[j];
        if (!best.feasible || obj < best.obj) {
          best.feasible = true;
          best.obj = obj;
          best.x = std::move(x);
        }
      }
    } else {
      for (std::size_t k = 0; k < int_vars.size(); ++k) lb[int_vars[k]] = ub[int_vars[k]] = assign[k];
      const LpResult lp = lp_solve_bounded(inst, lb, ub, opts);
      if (lp.status == LpStatus::kOptimal && (!best.feasible || lp.obj < best.obj)) {
        best.feasible = true;
        best.obj = lp.obj;
        best.x = lp.x;
      }
    }
    // Odometer step, lowest index fastest.
    for (std::size_t k = 0; k < int_vars.size(); ++k) {
      if (assign[k] + 1.0 <= std::floor(inst.ub[int_vars[k]])) {
        assign[k] += 1.0;
        break;
      }
      assign[k] = std::ceil(inst.lb[int_vars[k]]);
    }
  }
  return best;
}

}  // namespace stratobranch
