#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "cityzoom/geometry.hpp"

namespace cityzoom {

struct Cluster {
  Vec3 centroid;
  /// Indices into the clustered point list, ascending.
  std::vector<std::size_t> members;

  friend bool operator==(const Cluster&, const Cluster&) = default;
};

/// Partition of a point list. Every point belongs to exactly one cluster.
struct ClusterSet {
  std::vector<Cluster> clusters;

  std::size_t point_count() const;
  /// cluster index per point
  std::vector<std::size_t> assignment() const;

  friend bool operator==(const ClusterSet&, const ClusterSet&) = default;
};

/// clamp(ceil(sqrt(n)), 1, 64)
std::size_t default_cluster_count(std::size_t n);

struct KMeansResult {
  ClusterSet clusters;
  int iterations{0};
  /// Within-cluster squared distance after the initial assignment and after
  /// every subsequent update and assignment step.
  std::vector<double> objective_history;
};

/// Lloyd's algorithm from k-means++ seeding. Stops when assignments are stable
/// or after 100 iterations. Clusters that end up empty are dropped. Throws
/// ValidationError unless 1 <= k <= points.size().
KMeansResult kmeans(std::span<const Vec3> points, std::size_t k, std::uint64_t seed);

ClusterSet cluster_kmeans(std::span<const Vec3> points, std::size_t k, std::uint64_t seed);

/// Sum of squared distances from each point to its cluster centroid.
double kmeans_objective(std::span<const Vec3> points, const ClusterSet& clusters);

/// Flat-kernel mean shift. Each point climbs until its shift drops below 1e-3
/// (at most 100 iterations); modes closer than bandwidth / 2 are merged, the
/// first converged mode (in point order) representing the cluster. Throws
/// ValidationError unless bandwidth > 0.
ClusterSet cluster_meanshift(std::span<const Vec3> points, double bandwidth);

}  // namespace cityzoom
