// Copyright (c) 2026 The stratobranch authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include "stratobranch/sample.hpp"

namespace stratobranch {

// Fixed-length node summary fed to the clustering: per-column mean and std of
// V (2x19), per-column mean of C (5), candidate fraction, edge density.
// Depth is deliberately excluded; it only orders the fitted groups.
inline constexpr int kSummaryDim = 2 * vcol::kCount + ccol::kCount + 2;  // 45

Eigen::VectorXd summary_vector(const TrainingSample& sample);

struct KmeansResult {
  std::vector<int> assign;
  Eigen::MatrixXd centroids;  // m x d
  Real sse = 0.0;
};

// Seeded k-means. Each cluster count k is fitted as the better of a
// k-means++ Lloyd run and a warm start from the (k-1)-solution plus the
// farthest point, which makes SSE non-increasing in m by construction.
KmeansResult kmeans(const Eigen::MatrixXd& points, int m, std::uint64_t seed);

// SSE for every k in [1, m_max] from the same incremental chain.
std::vector<Real> kmeans_sse_curve(const Eigen::MatrixXd& points, int m_max, std::uint64_t seed);

// Maximum-curvature elbow: argmax of sse[m-1] - 2 sse[m] + sse[m+1] over the
// interior of [m_lo, m_hi], smaller m on ties.
int elbow_select(const Eigen::MatrixXd& points, int m_lo, int m_hi, std::uint64_t seed);

struct GroupModel {
  int m = 0;
  Eigen::MatrixXd centroids;        // in standardized summary space
  std::vector<int> order;           // cluster id -> depth-ordered group id
  Eigen::VectorXd mean, std;        // summary standardization
  std::uint64_t seed = 0;
  std::string config_hash;

  bool fitted() const { return m > 0; }
};

struct GroupFit {
  GroupModel model;
  std::vector<int> group_ids;  // per input sample, already depth-ordered
};

// Standardizes summaries, picks m by the elbow over [m_lo, m_hi], clusters,
// and orders groups by ascending mean node depth.
GroupFit fit_groups(const std::vector<TrainingSample>& samples, int m_lo, int m_hi,
                    std::uint64_t seed);

// Nearest-centroid assignment through the depth ordering. Derived samples
// inherit their source group instead of passing through this.
std::vector<int> assign_groups(const std::vector<TrainingSample>& samples,
                               const GroupModel& model);

std::string group_model_to_json(const GroupModel& model);
GroupModel group_model_from_json(const std::string& text);
void write_group_model(const GroupModel& model, const std::string& path);
GroupModel read_group_model(const std::string& path);

}  // namespace stratobranch
