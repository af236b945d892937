#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "qkdnet/estimate.hpp"
#include "qkdnet/link_model.hpp"

namespace qkdnet {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

/// Points in the square [0, side]^2, with either the Euclidean or the torus
/// (wraparound) metric. Holds a bucket grid for nearest-point queries.
class PointSet {
 public:
  PointSet(std::vector<Point> points, double side, bool wraparound);

  std::span<const Point> points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  double side() const { return side_; }
  bool wraparound() const { return wraparound_; }
  const Point& operator[](std::size_t i) const { return points_[i]; }

  /// Shortest displacement from `from` to `to` (minimum image on the torus).
  Point displacement(Point from, Point to) const;
  double distance(Point a, Point b) const;
  /// Maps a point back into [0, side)^2 on the torus; identity otherwise.
  Point wrap(Point p) const;

  /// Index of the closest point; ties go to the lowest index.
  std::size_t nearest(Point p) const;

 private:
  std::size_t nearest_exhaustive(Point p) const;

  std::vector<Point> points_;
  double side_;
  bool wraparound_;
  int cells_per_side_ = 1;
  double cell_size_ = 1.0;
  std::vector<std::vector<std::uint32_t>> buckets_;
};

/// Homogeneous Poisson process: Poisson(intensity * side^2) points, i.i.d.
/// uniform in the square. Deterministic for a given seed.
PointSet sample_poisson(double intensity, double side, std::uint64_t seed, bool wraparound = false);

/// DomainError on an empty node set.
std::size_t nearest_node(const PointSet& nodes, Point p);

/// Node sequence visited by the Markov-path routing policy.
struct MarkovPath {
  std::vector<std::size_t> node_indices;
  std::vector<double> hop_lengths;  ///< km, size() == node_indices.size() - 1

  double total_length() const;
};

/// Voronoi cells crossed by the segment u -> v, in order, found by sampling
/// the segment at `step_km` and re-sampling ten times finer around every
/// change of nearest node. A zero step selects 1/64 of the mean node spacing.
/// On the torus the segment follows the minimum-image displacement.
MarkovPath markov_path(const PointSet& nodes, Point u, Point v, double step_km = 0.0);

using CostFunction = std::function<double(double)>;

struct McConfig {
  int side_in_alpha = 20;        ///< torus side in units of alpha_bb
  int samples = 10'000;          ///< routed pairs or access queries in total
  int samples_per_replica = 500; ///< one node set is drawn per this many samples
  std::uint64_t seed = 1;
  int workers = 0;               ///< 0: hardware concurrency

  void validate() const;
};

/// Torus estimate of kappa_bb: mean of sum_i C(hop_i) / |u - v| over random
/// pairs separated by at least 2 alpha_bb. The standard error is computed from
/// per-node-set batch means.
McEstimate estimate_kappa_bb_mc(const CostFunction& cost, double alpha_bb, const McConfig& cfg);
McEstimate estimate_kappa_bb_mc(const LinkModel& model, const CostParams& costs, double alpha_bb,
                                const McConfig& cfg);

/// Torus estimate of kappa_loc = 2 E[C(distance to nearest node)].
McEstimate estimate_kappa_loc_mc(const CostFunction& cost, double alpha_bb, const McConfig& cfg);
McEstimate estimate_kappa_loc_mc(const LinkModel& model, const CostParams& costs,
                                 double alpha_bb, const McConfig& cfg);

/// Line-oriented geometry dump: one `node x y` line per node followed by one
/// `path i j k ...` line per path.
void write_geometry(std::ostream& out, const PointSet& nodes, std::span<const MarkovPath> paths);

struct GeometryDump {
  std::vector<Point> nodes;
  std::vector<std::vector<std::size_t>> paths;
};

/// Parses write_geometry output. DomainError on malformed lines.
GeometryDump read_geometry(std::istream& in);

}  // namespace qkdnet
