#include "cityzoom/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "cityzoom/error.hpp"
#include "cityzoom/random.hpp"

namespace cityzoom {
namespace {

constexpr int kMaxIterations = 100;
constexpr double kShiftTolerance = 1e-3;

std::vector<Vec3> seed_plus_plus(std::span<const Vec3> points, std::size_t k, Rng& rng) {
  const std::size_t n = points.size();
  std::vector<Vec3> centers;
  centers.reserve(k);
  std::vector<bool> taken(n, false);
  const auto first = static_cast<std::size_t>(rng.uniform(0, n - 1));
  centers.push_back(points[first]);
  taken[first] = true;

  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) d2[i] = squared_distance(points[i], centers[0]);

  while (centers.size() < k) {
    double total = 0;
    for (std::size_t i = 0; i < n; ++i) total += d2[i];
    std::size_t pick = n;
    if (total > 0) {
      const double r = rng.unit() * total;
      double acc = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (d2[i] <= 0) continue;
        acc += d2[i];
        pick = i;
        if (acc > r) break;
      }
    } else {
      // Only duplicates of chosen centers remain.
      pick = static_cast<std::size_t>(std::find(taken.begin(), taken.end(), false) - taken.begin());
    }
    taken[pick] = true;
    centers.push_back(points[pick]);
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], squared_distance(points[i], centers.back()));
    }
  }
  return centers;
}

double assign(std::span<const Vec3> points, const std::vector<Vec3>& centers,
              std::vector<std::size_t>& labels) {
  double objective = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_c = 0;
    for (std::size_t c = 0; c < centers.size(); ++c) {
      const double d = squared_distance(points[i], centers[c]);
      if (d < best) {
        best = d;
        best_c = c;
      }
    }
    labels[i] = best_c;
    objective += best;
  }
  return objective;
}

double update(std::span<const Vec3> points, const std::vector<std::size_t>& labels,
              std::vector<Vec3>& centers) {
  std::vector<Vec3> sums(centers.size());
  std::vector<std::size_t> counts(centers.size(), 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    sums[labels[i]] += points[i];
    ++counts[labels[i]];
  }
  for (std::size_t c = 0; c < centers.size(); ++c) {
    if (counts[c]) centers[c] = sums[c] * (1.0 / static_cast<double>(counts[c]));
  }
  double objective = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    objective += squared_distance(points[i], centers[labels[i]]);
  }
  return objective;
}

ClusterSet collect(const std::vector<Vec3>& centers, const std::vector<std::size_t>& labels) {
  std::vector<Cluster> all(centers.size());
  for (std::size_t c = 0; c < centers.size(); ++c) all[c].centroid = centers[c];
  for (std::size_t i = 0; i < labels.size(); ++i) all[labels[i]].members.push_back(i);
  ClusterSet out;
  for (auto& c : all) {
    if (!c.members.empty()) out.clusters.push_back(std::move(c));
  }
  return out;
}

struct CellKey {
  std::int64_t x, y, z;
  bool operator==(const CellKey&) const = default;
};

struct CellHash {
  std::size_t operator()(const CellKey& k) const noexcept {
    std::uint64_t h = static_cast<std::uint64_t>(k.x) * 0x9E3779B97F4A7C15ULL;
    h ^= static_cast<std::uint64_t>(k.y) * 0xC2B2AE3D27D4EB4FULL + (h << 6) + (h >> 2);
    h ^= static_cast<std::uint64_t>(k.z) * 0x165667B19E3779F9ULL + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

class Grid {
 public:
  Grid(std::span<const Vec3> points, double cell) : points_(points), cell_(cell) {
    for (std::size_t i = 0; i < points.size(); ++i) cells_[key(points[i])].push_back(i);
  }

  /// Mean of all points within `radius` (== cell size) of `p`.
  Vec3 window_mean(Vec3 p) const {
    const CellKey k = key(p);
    const double r2 = cell_ * cell_;
    Vec3 sum;
    std::size_t count = 0;
    for (std::int64_t dx = -1; dx <= 1; ++dx) {
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        for (std::int64_t dz = -1; dz <= 1; ++dz) {
          auto it = cells_.find({k.x + dx, k.y + dy, k.z + dz});
          if (it == cells_.end()) continue;
          for (std::size_t i : it->second) {
            if (squared_distance(points_[i], p) <= r2) {
              sum += points_[i];
              ++count;
            }
          }
        }
      }
    }
    return count ? sum * (1.0 / static_cast<double>(count)) : p;
  }

 private:
  CellKey key(Vec3 p) const {
    return {static_cast<std::int64_t>(std::floor(p.x / cell_)),
            static_cast<std::int64_t>(std::floor(p.y / cell_)),
            static_cast<std::int64_t>(std::floor(p.z / cell_))};
  }

  std::span<const Vec3> points_;
  double cell_;
  std::unordered_map<CellKey, std::vector<std::size_t>, CellHash> cells_;
};

}  // namespace

std::size_t ClusterSet::point_count() const {
  std::size_t n = 0;
  for (const auto& c : clusters) n += c.members.size();
  return n;
}

std::vector<std::size_t> ClusterSet::assignment() const {
  std::vector<std::size_t> out(point_count());
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    for (std::size_t m : clusters[c].members) out.at(m) = c;
  }
  return out;
}

std::size_t default_cluster_count(std::size_t n) {
  const auto k = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
  return std::clamp<std::size_t>(k, 1, 64);
}

KMeansResult kmeans(std::span<const Vec3> points, std::size_t k, std::uint64_t seed) {
  if (k < 1) throw ValidationError("k-means needs k >= 1");
  if (k > points.size()) {
    throw ValidationError("k-means needs k <= number of points (k = " + std::to_string(k) +
                          ", points = " + std::to_string(points.size()) + ")");
  }
  Rng rng(seed);
  std::vector<Vec3> centers = seed_plus_plus(points, k, rng);
  std::vector<std::size_t> labels(points.size());

  KMeansResult result;
  result.objective_history.push_back(assign(points, centers, labels));
  std::vector<std::size_t> next(points.size());
  bool converged = false;
  for (int it = 1; it <= kMaxIterations && !converged; ++it) {
    result.iterations = it;
    result.objective_history.push_back(update(points, labels, centers));
    result.objective_history.push_back(assign(points, centers, next));
    converged = next == labels;
    labels.swap(next);
  }
  // Centroids must be the means of the final members.
  if (!converged) result.objective_history.push_back(update(points, labels, centers));
  result.clusters = collect(centers, labels);
  return result;
}

ClusterSet cluster_kmeans(std::span<const Vec3> points, std::size_t k, std::uint64_t seed) {
  return kmeans(points, k, seed).clusters;
}

double kmeans_objective(std::span<const Vec3> points, const ClusterSet& clusters) {
  double j = 0;
  for (const auto& c : clusters.clusters) {
    for (std::size_t m : c.members) j += squared_distance(points[m], c.centroid);
  }
  return j;
}

ClusterSet cluster_meanshift(std::span<const Vec3> points, double bandwidth) {
  if (!(bandwidth > 0)) throw ValidationError("mean shift bandwidth must be > 0");
  const Grid grid(points, bandwidth);
  const double merge2 = (bandwidth * 0.5) * (bandwidth * 0.5);

  ClusterSet out;
  for (std::size_t i = 0; i < points.size(); ++i) {
    Vec3 mode = points[i];
    for (int it = 0; it < kMaxIterations; ++it) {
      const Vec3 next = grid.window_mean(mode);
      const double shift = distance(next, mode);
      mode = next;
      if (shift < kShiftTolerance) break;
    }
    std::size_t target = out.clusters.size();
    for (std::size_t c = 0; c < out.clusters.size(); ++c) {
      if (squared_distance(out.clusters[c].centroid, mode) <= merge2) {
        target = c;
        break;
      }
    }
    if (target == out.clusters.size()) out.clusters.push_back(Cluster{mode, {}});
    out.clusters[target].members.push_back(i);
  }
  return out;
}

}  // namespace cityzoom
