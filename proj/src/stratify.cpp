// Copyright (c) 2026 The stratobranch authors
// SPDX-License-Identifier: Apache-2.0
#include "stratobranch/stratify.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace stratobranch {

Eigen::VectorXd summary_vector(const TrainingSample& sample) {
  const BipartiteGraph& g = sample.graph;
  if (g.n_vars == 0 || g.n_cons == 0) throw Error("summary_vector: empty graph");
  Eigen::VectorXd out(kSummaryDim);
  int at = 0;
  for (int c = 0; c < vcol::kCount; ++c) out[at++] = g.V.col(c).mean();
  for (int c = 0; c < vcol::kCount; ++c) {
    const Real mean = g.V.col(c).mean();
    out[at++] = std::sqrt((g.V.col(c).array() - mean).square().mean());
  }
  for (int c = 0; c < ccol::kCount; ++c) out[at++] = g.C.col(c).mean();
  out[at++] = static_cast<Real>(sample.cand.size()) / static_cast<Real>(g.n_vars);
  out[at++] = static_cast<Real>(g.edges.size()) /
              (static_cast<Real>(g.n_cons) * static_cast<Real>(g.n_vars));
  return out;
}

namespace {

Real lloyd(const Eigen::MatrixXd& points, Eigen::MatrixXd& centroids,
           std::vector<int>& assign) {
  const int n = static_cast<int>(points.rows());
  const int m = static_cast<int>(centroids.rows());
  assign.assign(n, 0);
  Real sse = 0.0;
  for (int iter = 0; iter < 300; ++iter) {
    // Assignment step (ties to the lower cluster id).
    sse = 0.0;
    for (int p = 0; p < n; ++p) {
      int best = 0;
      Real best_d = (points.row(p) - centroids.row(0)).squaredNorm();
      for (int c = 1; c < m; ++c) {
        const Real d = (points.row(p) - centroids.row(c)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      assign[p] = best;
      sse += best_d;
    }
    // Update step.
    Eigen::MatrixXd next = Eigen::MatrixXd::Zero(m, points.cols());
    std::vector<int> count(m, 0);
    for (int p = 0; p < n; ++p) {
      next.row(assign[p]) += points.row(p);
      ++count[assign[p]];
    }
    for (int c = 0; c < m; ++c) {
      if (count[c] > 0) {
        next.row(c) /= static_cast<Real>(count[c]);
      } else {
        // Reseed an empty cluster to the farthest point.
        int far = 0;
        Real far_d = -1.0;
        for (int p = 0; p < n; ++p) {
          const Real d = (points.row(p) - centroids.row(assign[p])).squaredNorm();
          if (d > far_d) {
            far_d = d;
            far = p;
          }
        }
        next.row(c) = points.row(far);
      }
    }
    const Real shift = (next - centroids).rowwise().norm().maxCoeff();
    centroids = next;
    if (shift < 1e-6) break;
  }
  // Final assignment for the converged centroids.
  sse = 0.0;
  for (int p = 0; p < n; ++p) {
    int best = 0;
    Real best_d = (points.row(p) - centroids.row(0)).squaredNorm();
    for (int c = 1; c < m; ++c) {
      const Real d = (points.row(p) - centroids.row(c)).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = c;
      }
    }
    assign[p] = best;
    sse += best_d;
  }
  return sse;
}

Eigen::MatrixXd kmeanspp_init(const Eigen::MatrixXd& points, int m, Rng& rng) {
  const int n = static_cast<int>(points.rows());
  Eigen::MatrixXd centroids(m, points.cols());
  centroids.row(0) = points.row(rng.uniform_int(0, n - 1));
  Eigen::VectorXd dist(n);
  for (int p = 0; p < n; ++p) dist[p] = (points.row(p) - centroids.row(0)).squaredNorm();
  for (int c = 1; c < m; ++c) {
    const Real total = dist.sum();
    int pick = 0;
    if (total <= 0.0) {
      pick = static_cast<int>(rng.uniform_int(0, n - 1));
    } else {
      const Real r = rng.uniform01() * total;
      Real acc = 0.0;
      for (int p = 0; p < n; ++p) {
        acc += dist[p];
        if (acc >= r) {
          pick = p;
          break;
        }
      }
    }
    centroids.row(c) = points.row(pick);
    for (int p = 0; p < n; ++p)
      dist[p] = std::min(dist[p], (points.row(p) - centroids.row(c)).squaredNorm());
  }
  return centroids;
}

std::vector<KmeansResult> kmeans_chain(const Eigen::MatrixXd& points, int m_max,
                                       std::uint64_t seed) {
  const int n = static_cast<int>(points.rows());
  if (m_max < 1 || m_max > n) throw Error("kmeans: need 1 <= m <= #points");
  Rng rng(seed);
  std::vector<KmeansResult> chain;
  chain.reserve(m_max);
  for (int m = 1; m <= m_max; ++m) {
    KmeansResult fresh;
    fresh.centroids = kmeanspp_init(points, m, rng);
    fresh.sse = lloyd(points, fresh.centroids, fresh.assign);

    if (m == 1) {
      chain.push_back(std::move(fresh));
      continue;
    }
    // Warm start: previous centroids plus the farthest point. Lloyd cannot
    // increase SSE, so this branch pins SSE(m) <= SSE(m-1).
    const KmeansResult& prev = chain.back();
    KmeansResult warm;
    warm.centroids.resize(m, points.cols());
    warm.centroids.topRows(m - 1) = prev.centroids;
    int far = 0;
    Real far_d = -1.0;
    for (int p = 0; p < n; ++p) {
      const Real d = (points.row(p) - prev.centroids.row(prev.assign[p])).squaredNorm();
      if (d > far_d) {
        far_d = d;
        far = p;
      }
    }
    warm.centroids.row(m - 1) = points.row(far);
    warm.sse = lloyd(points, warm.centroids, warm.assign);

    chain.push_back(fresh.sse < warm.sse ? std::move(fresh) : std::move(warm));
  }
  return chain;
}

}  // namespace

KmeansResult kmeans(const Eigen::MatrixXd& points, int m, std::uint64_t seed) {
  return kmeans_chain(points, m, seed).back();
}

std::vector<Real> kmeans_sse_curve(const Eigen::MatrixXd& points, int m_max,
                                   std::uint64_t seed) {
  std::vector<Real> curve;
  for (const KmeansResult& r : kmeans_chain(points, m_max, seed)) curve.push_back(r.sse);
  return curve;
}

int elbow_select(const Eigen::MatrixXd& points, int m_lo, int m_hi, std::uint64_t seed) {
  const int n = static_cast<int>(points.rows());
  if (m_lo < 2 || m_hi < m_lo) throw Error("elbow_select: need 2 <= m_lo <= m_hi");
  m_hi = std::min(m_hi, n - 1 > m_lo ? n - 1 : m_lo);
  if (m_hi + 1 > n) throw Error("elbow_select: range exceeds #points");
  const std::vector<Real> sse = kmeans_sse_curve(points, m_hi + 1, seed);
  int best_m = m_lo;
  Real best_curv = -kInf;
  for (int m = m_lo; m <= m_hi; ++m) {
    const Real curv = sse[m - 2] - 2.0 * sse[m - 1] + sse[m];  // sse[k-1] holds SSE(k)
    if (curv > best_curv + 1e-12) {
      best_curv = curv;
      best_m = m;
    }
  }
  return best_m;
}

GroupFit fit_groups(const std::vector<TrainingSample>& samples, int m_lo, int m_hi,
                    std::uint64_t seed) {
  if (samples.size() < 2) throw Error("fit_groups: need at least 2 samples");
  const int n = static_cast<int>(samples.size());
  Eigen::MatrixXd raw(n, kSummaryDim);
  for (int k = 0; k < n; ++k) raw.row(k) = summary_vector(samples[k]).transpose();

  GroupFit fit;
  GroupModel& model = fit.model;
  model.seed = seed;
  model.mean = raw.colwise().mean();
  model.std.resize(kSummaryDim);
  for (int c = 0; c < kSummaryDim; ++c) {
    const Real var = (raw.col(c).array() - model.mean[c]).square().mean();
    model.std[c] = std::max(std::sqrt(var), 1e-8);
  }
  Eigen::MatrixXd pts = raw;
  for (int c = 0; c < kSummaryDim; ++c)
    pts.col(c) = (raw.col(c).array() - model.mean[c]) / model.std[c];

  const int m = elbow_select(pts, m_lo, std::min(m_hi, n - 1), seed);
  const KmeansResult km = kmeans(pts, m, seed);
  model.m = m;
  model.centroids = km.centroids;

  // Order clusters by ascending mean node depth (cluster id on ties).
  std::vector<Real> depth_sum(m, 0.0);
  std::vector<int> count(m, 0);
  for (int k = 0; k < n; ++k) {
    depth_sum[km.assign[k]] += samples[k].depth;
    ++count[km.assign[k]];
  }
  std::vector<int> clusters(m);
  std::iota(clusters.begin(), clusters.end(), 0);
  std::stable_sort(clusters.begin(), clusters.end(), [&](int a, int b) {
    const Real da = count[a] ? depth_sum[a] / count[a] : kInf;
    const Real db = count[b] ? depth_sum[b] / count[b] : kInf;
    return da != db ? da < db : a < b;
  });
  model.order.assign(m, 0);
  for (int rank = 0; rank < m; ++rank) model.order[clusters[rank]] = rank;

  fit.group_ids.resize(n);
  for (int k = 0; k < n; ++k) fit.group_ids[k] = model.order[km.assign[k]];
  return fit;
}

std::vector<int> assign_groups(const std::vector<TrainingSample>& samples,
                               const GroupModel& model) {
  if (!model.fitted()) throw Error("assign_groups: model is not fitted");
  std::vector<int> out(samples.size());
  for (std::size_t k = 0; k < samples.size(); ++k) {
    Eigen::VectorXd p = summary_vector(samples[k]);
    for (int c = 0; c < kSummaryDim; ++c) p[c] = (p[c] - model.mean[c]) / model.std[c];
    int best = 0;
    Real best_d = (p.transpose() - model.centroids.row(0)).squaredNorm();
    for (int c = 1; c < model.m; ++c) {
      const Real d = (p.transpose() - model.centroids.row(c)).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = c;
      }
    }
    out[k] = model.order[best];
  }
  return out;
}

std::string group_model_to_json(const GroupModel& model) {
  nlohmann::json j;
  j["m"] = model.m;
  j["seed"] = model.seed;
  j["config_hash"] = model.config_hash;
  j["order"] = model.order;
  j["mean"] = std::vector<Real>(model.mean.data(), model.mean.data() + model.mean.size());
  j["std"] = std::vector<Real>(model.std.data(), model.std.data() + model.std.size());
  nlohmann::json rows = nlohmann::json::array();
  for (int r = 0; r < model.centroids.rows(); ++r) {
    std::vector<Real> row(model.centroids.cols());
    for (int c = 0; c < model.centroids.cols(); ++c) row[c] = model.centroids(r, c);
    rows.push_back(row);
  }
  j["centroids"] = std::move(rows);
  return j.dump(2);
}

GroupModel group_model_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  GroupModel model;
  model.m = j.at("m").get<int>();
  model.seed = j.at("seed").get<std::uint64_t>();
  model.config_hash = j.value("config_hash", "");
  model.order = j.at("order").get<std::vector<int>>();
  const auto mean = j.at("mean").get<std::vector<Real>>();
  const auto std_ = j.at("std").get<std::vector<Real>>();
  model.mean = Eigen::Map<const Eigen::VectorXd>(mean.data(), mean.size());
  model.std = Eigen::Map<const Eigen::VectorXd>(std_.data(), std_.size());
  const auto& rows = j.at("centroids");
  model.centroids.resize(rows.size(), model.mean.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto row = rows[r].get<std::vector<Real>>();
    for (std::size_t c = 0; c < row.size(); ++c) model.centroids(r, c) = row[c];
  }
  return model;
}

void write_group_model(const GroupModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << group_model_to_json(model) << '\n';
}

GroupModel read_group_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return group_model_from_json(buf.str());
}

}  // namespace stratobranch
