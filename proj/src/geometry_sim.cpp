#include "qkdnet/geometry_sim.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include <fmt/core.h>
#include <fmt/ostream.h>

#include "qkdnet/detail/parallel.hpp"
#include "qkdnet/errors.hpp"

namespace qkdnet {

namespace {

constexpr std::uint64_t kStreamBackbone = 0xbb;
constexpr std::uint64_t kStreamLocal = 0x10c;
constexpr double kMaxExpectedPoints = 5e7;

double squared(Point d) { return d.x * d.x + d.y * d.y; }

}  // namespace

PointSet::PointSet(std::vector<Point> points, double side, bool wraparound)
    : points_(std::move(points)), side_(side), wraparound_(wraparound) {
  if (!(side_ > 0.0) || !std::isfinite(side_)) {
    throw DomainError(fmt::format("point set side must be positive, got {}", side_));
  }
  for (const Point& p : points_) {
    if (!(p.x >= 0.0 && p.x <= side_ && p.y >= 0.0 && p.y <= side_)) {
      throw DomainError(fmt::format("point ({}, {}) lies outside [0, {}]^2", p.x, p.y, side_));
    }
  }
  if (points_.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw DomainError("point set too large");
  }
  cells_per_side_ = std::clamp(static_cast<int>(std::sqrt(static_cast<double>(points_.size()))), 1,
                               2048);
  cell_size_ = side_ / cells_per_side_;
  buckets_.resize(static_cast<std::size_t>(cells_per_side_) * cells_per_side_);
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const int cx = std::clamp(static_cast<int>(points_[i].x / cell_size_), 0, cells_per_side_ - 1);
    const int cy = std::clamp(static_cast<int>(points_[i].y / cell_size_), 0, cells_per_side_ - 1);
    buckets_[static_cast<std::size_t>(cy) * cells_per_side_ + cx].push_back(
        static_cast<std::uint32_t>(i));
  }
}

Point PointSet::displacement(Point from, Point to) const {
  Point d{to.x - from.x, to.y - from.y};
  if (wraparound_) {
    d.x -= side_ * std::round(d.x / side_);
    d.y -= side_ * std::round(d.y / side_);
  }
  return d;
}

double PointSet::distance(Point a, Point b) const { return std::sqrt(squared(displacement(a, b))); }

Point PointSet::wrap(Point p) const {
  if (!wraparound_) return p;
  auto fold = [this](double c) {
    double r = c - side_ * std::floor(c / side_);
    return r >= side_ ? 0.0 : r;
  };
  return {fold(p.x), fold(p.y)};
}

std::size_t PointSet::nearest_exhaustive(Point p) const {
  std::size_t best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const double d2 = squared(displacement(p, points_[i]));
    if (d2 < best_d2) {
      best_d2 = d2;
      best = i;
    }
  }
  return best;
}

std::size_t PointSet::nearest(Point p) const {
  if (points_.empty()) throw DomainError("nearest: empty point set");
  const Point q = wrap(p);
  const int n = cells_per_side_;
  const int cx = std::clamp(static_cast<int>(std::floor(q.x / cell_size_)), 0, n - 1);
  const int cy = std::clamp(static_cast<int>(std::floor(q.y / cell_size_)), 0, n - 1);

  constexpr auto kNone = std::numeric_limits<std::size_t>::max();
  std::size_t best = kNone;
  double best_d2 = std::numeric_limits<double>::infinity();
  auto scan = [&](int bx, int by) {
    if (wraparound_) {
      bx = ((bx % n) + n) % n;
      by = ((by % n) + n) % n;
    } else if (bx < 0 || by < 0 || bx >= n || by >= n) {
      return;
    }
    for (const std::uint32_t idx : buckets_[static_cast<std::size_t>(by) * n + bx]) {
      const double d2 = squared(displacement(q, points_[idx]));
      if (d2 < best_d2 || (d2 == best_d2 && idx < best)) {
        best_d2 = d2;
        best = idx;
      }
    }
  };

  for (int r = 0;; ++r) {
    if (wraparound_ && 2 * r + 1 >= n) return nearest_exhaustive(q);
    if (!wraparound_ && r > n) break;
    if (r == 0) {
      scan(cx, cy);
    } else {
      for (int dx = -r; dx <= r; ++dx) {
        scan(cx + dx, cy - r);
        scan(cx + dx, cy + r);
      }
      for (int dy = -r + 1; dy <= r - 1; ++dy) {
        scan(cx - r, cy + dy);
        scan(cx + r, cy + dy);
      }
    }
    // Buckets outside ring r are at least r cells away from q.
    const double reach = r * cell_size_;
    if (best != kNone && best_d2 < reach * reach) break;
  }
  return best;
}

PointSet sample_poisson(double intensity, double side, std::uint64_t seed, bool wraparound) {
  if (!(intensity > 0.0) || !(side > 0.0)) {
    throw DomainError("sample_poisson: intensity and side must be positive");
  }
  const double mean = intensity * side * side;
  if (mean > kMaxExpectedPoints) {
    throw DomainError(fmt::format("sample_poisson: expected count {} is too large", mean));
  }
  std::mt19937_64 rng(seed);
  std::poisson_distribution<long long> count(mean);
  std::uniform_real_distribution<double> coord(0.0, side);
  const long long n = count(rng);
  std::vector<Point> pts;
  pts.reserve(static_cast<std::size_t>(n));
  for (long long i = 0; i < n; ++i) {
    const double x = coord(rng);
    const double y = coord(rng);
    pts.push_back({x, y});
  }
  return PointSet(std::move(pts), side, wraparound);
}

std::size_t nearest_node(const PointSet& nodes, Point p) {
  if (nodes.empty()) throw DomainError("nearest_node: empty node set");
  return nodes.nearest(p);
}

double MarkovPath::total_length() const {
  double sum = 0.0;
  for (const double h : hop_lengths) sum += h;
  return sum;
}

MarkovPath markov_path(const PointSet& nodes, Point u, Point v, double step_km) {
  if (nodes.empty()) throw DomainError("markov_path: empty node set");
  const Point d = nodes.displacement(u, v);
  const double length = std::hypot(d.x, d.y);
  if (!(length > 0.0)) throw DomainError("markov_path: endpoints coincide");
  if (!(step_km > 0.0)) {
    step_km = nodes.side() / std::sqrt(static_cast<double>(nodes.size())) / 64.0;
  }
  constexpr int kRefine = 10;
  const long long steps = std::max(1LL, static_cast<long long>(std::ceil(length / step_km)));
  auto at = [&](double t) { return nodes.wrap(Point{u.x + t * d.x, u.y + t * d.y}); };

  std::vector<std::size_t> ids{nodes.nearest(u)};
  std::size_t previous = ids.back();
  double t_previous = 0.0;
  for (long long i = 1; i <= steps; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(steps);
    const std::size_t current = nodes.nearest(i == steps ? v : at(t));
    if (current != previous) {
      for (int j = 1; j < kRefine; ++j) {
        const std::size_t mid = nodes.nearest(at(t_previous + (t - t_previous) * j / kRefine));
        if (mid != ids.back()) ids.push_back(mid);
      }
      if (current != ids.back()) ids.push_back(current);
    }
    previous = current;
    t_previous = t;
  }

  MarkovPath path;
  path.node_indices = std::move(ids);
  path.hop_lengths.reserve(path.node_indices.size() - 1);
  for (std::size_t i = 1; i < path.node_indices.size(); ++i) {
    path.hop_lengths.push_back(
        nodes.distance(nodes[path.node_indices[i - 1]], nodes[path.node_indices[i]]));
  }
  return path;
}

void McConfig::validate() const {
  if (side_in_alpha < 10) {
    throw DomainError(fmt::format("mc.side_in_alpha must be >= 10, got {}", side_in_alpha));
  }
  if (samples < 100) throw DomainError(fmt::format("mc.samples must be >= 100, got {}", samples));
  if (samples_per_replica < 1) throw DomainError("mc.samples_per_replica must be >= 1");
}

namespace {

// Draws node sets until one is non-empty; the retry index keeps it deterministic.
PointSet torus_nodes(double alpha_bb, double side, std::uint64_t seed, std::uint64_t stream,
                     std::size_t replica) {
  for (std::uint64_t attempt = 0;; ++attempt) {
    PointSet nodes = sample_poisson(1.0 / (alpha_bb * alpha_bb), side,
                                    detail::derive_seed(seed, stream, replica + (attempt << 32)),
                                    true);
    if (!nodes.empty()) return nodes;
  }
}

template <typename PerReplica>
McEstimate run_replicas(const McConfig& cfg, PerReplica&& per_replica) {
  const std::size_t replicas =
      static_cast<std::size_t>((cfg.samples + cfg.samples_per_replica - 1) / cfg.samples_per_replica);
  std::vector<double> batch(std::max<std::size_t>(replicas, 2));
  detail::parallel_for(batch.size(), cfg.workers,
                       [&](std::size_t r) { batch[r] = per_replica(r); });
  return summarize(batch);
}

}  // namespace

McEstimate estimate_kappa_bb_mc(const CostFunction& cost, double alpha_bb, const McConfig& cfg) {
  cfg.validate();
  if (!(alpha_bb > 0.0)) throw DomainError("alpha_bb must be positive");
  const double side = cfg.side_in_alpha * alpha_bb;
  const double min_separation = 2.0 * alpha_bb;
  return run_replicas(cfg, [&](std::size_t r) {
    const PointSet nodes = torus_nodes(alpha_bb, side, cfg.seed, kStreamBackbone, r);
    std::mt19937_64 rng(detail::derive_seed(cfg.seed, kStreamBackbone + 1, r));
    std::uniform_real_distribution<double> coord(0.0, side);
    double sum = 0.0;
    for (int k = 0; k < cfg.samples_per_replica; ++k) {
      Point u;
      Point v;
      double separation = 0.0;
      do {
        u = {coord(rng), coord(rng)};
        v = {coord(rng), coord(rng)};
        separation = nodes.distance(u, v);
      } while (separation < min_separation);
      const MarkovPath path = markov_path(nodes, u, v, alpha_bb / 64.0);
      double path_cost = 0.0;
      for (const double hop : path.hop_lengths) path_cost += cost(hop);
      sum += path_cost / separation;
    }
    return sum / cfg.samples_per_replica;
  });
}

McEstimate estimate_kappa_bb_mc(const LinkModel& model, const CostParams& costs, double alpha_bb,
                                const McConfig& cfg) {
  return estimate_kappa_bb_mc([&](double d) { return per_bit_cost(model, costs, d); }, alpha_bb,
                              cfg);
}

McEstimate estimate_kappa_loc_mc(const CostFunction& cost, double alpha_bb, const McConfig& cfg) {
  cfg.validate();
  if (!(alpha_bb > 0.0)) throw DomainError("alpha_bb must be positive");
  const double side = cfg.side_in_alpha * alpha_bb;
  return run_replicas(cfg, [&](std::size_t r) {
    const PointSet nodes = torus_nodes(alpha_bb, side, cfg.seed, kStreamLocal, r);
    std::mt19937_64 rng(detail::derive_seed(cfg.seed, kStreamLocal + 1, r));
    std::uniform_real_distribution<double> coord(0.0, side);
    double sum = 0.0;
    for (int k = 0; k < cfg.samples_per_replica; ++k) {
      const Point q{coord(rng), coord(rng)};
      sum += 2.0 * cost(nodes.distance(q, nodes[nodes.nearest(q)]));
    }
    return sum / cfg.samples_per_replica;
  });
}

McEstimate estimate_kappa_loc_mc(const LinkModel& model, const CostParams& costs,
                                 double alpha_bb, const McConfig& cfg) {
  return estimate_kappa_loc_mc([&](double d) { return per_bit_cost(model, costs, d); }, alpha_bb,
                               cfg);
}

void write_geometry(std::ostream& out, const PointSet& nodes, std::span<const MarkovPath> paths) {
  for (const Point& p : nodes.points()) fmt::print(out, "node {:.17g} {:.17g}\n", p.x, p.y);
  for (const MarkovPath& path : paths) {
    out << "path";
    for (const std::size_t id : path.node_indices) out << ' ' << id;
    out << '\n';
  }
}

GeometryDump read_geometry(std::istream& in) {
  GeometryDump dump;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    fields.imbue(std::locale::classic());
    std::string tag;
    fields >> tag;
    if (tag == "node") {
      Point p;
      if (!(fields >> p.x >> p.y) || !(fields >> std::ws).eof()) {
        throw DomainError(fmt::format("geometry line {}: expected `node x y`", line_no));
      }
      dump.nodes.push_back(p);
    } else if (tag == "path") {
      std::vector<std::size_t> ids;
      std::size_t id = 0;
      while (fields >> id) {
        if (id >= dump.nodes.size()) {
          throw DomainError(fmt::format("geometry line {}: unknown node id {}", line_no, id));
        }
        ids.push_back(id);
      }
      if (!fields.eof() || ids.empty()) {
        throw DomainError(fmt::format("geometry line {}: malformed path", line_no));
      }
      dump.paths.push_back(std::move(ids));
    } else {
      throw DomainError(fmt::format("geometry line {}: unknown record `{}`", line_no, tag));
    }
  }
  return dump;
}

}  // namespace qkdnet
