#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "qkdnet/errors.hpp"
#include "qkdnet/geometry_sim.hpp"

using namespace qkdnet;

namespace {

std::size_t brute_nearest(const PointSet& s, Point p) {
  std::size_t best = 0;
  double best_d = INFINITY;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double d = s.distance(p, s[i]);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

// Cells crossed by the segment, by very fine uniform sampling.
std::vector<std::size_t> dense_path(const PointSet& s, Point u, Point v, int samples) {
  const Point d = s.displacement(u, v);
  std::vector<std::size_t> ids;
  for (int i = 0; i <= samples; ++i) {
    const double t = static_cast<double>(i) / samples;
    const std::size_t id = brute_nearest(s, s.wrap({u.x + t * d.x, u.y + t * d.y}));
    if (ids.empty() || ids.back() != id) ids.push_back(id);
  }
  return ids;
}

}  // namespace

TEST_SUITE("geometry_sim") {

TEST_CASE("torus metric") {
  const PointSet torus({}, 10.0, true);
  CHECK(torus.distance({0.5, 0.5}, {9.5, 9.5}) == doctest::Approx(std::sqrt(2.0)));
  CHECK(torus.displacement({9.0, 1.0}, {1.0, 9.0}).x == doctest::Approx(2.0));
  CHECK(torus.displacement({9.0, 1.0}, {1.0, 9.0}).y == doctest::Approx(-2.0));
  CHECK(torus.wrap({-1.0, 21.0}).x == doctest::Approx(9.0));
  CHECK(torus.wrap({-1.0, 21.0}).y == doctest::Approx(1.0));
  const PointSet plane({}, 10.0, false);
  CHECK(plane.distance({0.5, 0.5}, {9.5, 9.5}) == doctest::Approx(9.0 * std::sqrt(2.0)));
  CHECK_THROWS_AS(PointSet({{11.0, 0.0}}, 10.0, false), DomainError);
  CHECK_THROWS_AS(PointSet({}, 0.0, false), DomainError);
}

TEST_CASE("nearest node matches exhaustive search") {
  std::mt19937_64 rng(1);
  for (bool wrap : {false, true}) {
    for (double intensity : {0.02, 0.5, 3.0}) {
      const PointSet s = sample_poisson(intensity, 20.0, 99, wrap);
      REQUIRE(!s.empty());
      std::uniform_real_distribution<double> coord(-2.0, 22.0);
      for (int k = 0; k < 2000; ++k) {
        const Point q{coord(rng), coord(rng)};
        const Point inside = wrap ? s.wrap(q) : q;
        CHECK(s.distance(inside, s[nearest_node(s, q)]) ==
              doctest::Approx(s.distance(inside, s[brute_nearest(s, inside)])));
      }
    }
  }
  CHECK_THROWS_AS(nearest_node(PointSet({}, 1.0, true), {0.5, 0.5}), DomainError);
}

TEST_CASE("nearest node ties go to the lowest index") {
  const PointSet s({{1.0, 1.0}, {3.0, 1.0}, {2.0, 3.0}}, 4.0, false);
  CHECK(nearest_node(s, {2.0, 1.0}) == 0);
  const PointSet t({{3.0, 1.0}, {1.0, 1.0}}, 4.0, false);
  CHECK(nearest_node(t, {2.0, 1.0}) == 0);
}

TEST_CASE("Poisson sampling") {
  const double intensity = 0.01;
  const double side = 100.0;
  double total = 0.0;
  const int runs = 400;
  for (int seed = 0; seed < runs; ++seed) total += sample_poisson(intensity, side, seed).size();
  const double mean = total / runs;
  // Poisson(100): the mean over 400 runs has standard error 0.5.
  CHECK(std::abs(mean - 100.0) < 2.5);
  const auto a = sample_poisson(intensity, side, 7, true);
  const auto b = sample_poisson(intensity, side, 7, true);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
  CHECK_THROWS_AS(sample_poisson(0.0, 1.0, 1), DomainError);
  CHECK_THROWS_AS(sample_poisson(1.0, 1e5, 1), DomainError);
}

TEST_CASE("Markov path follows the cells crossed by the segment") {
  const double alpha = 1.0;
  const PointSet s = sample_poisson(1.0 / (alpha * alpha), 12.0, 5, true);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> coord(0.0, 12.0);
  int agree = 0;
  const int trials = 150;
  for (int k = 0; k < trials; ++k) {
    const Point u{coord(rng), coord(rng)};
    const Point v{coord(rng), coord(rng)};
    if (s.distance(u, v) < 0.1) continue;
    const MarkovPath path = markov_path(s, u, v, alpha / 64.0);
    REQUIRE(path.hop_lengths.size() + 1 == path.node_indices.size());
    CHECK(path.node_indices.front() == nearest_node(s, u));
    CHECK(path.node_indices.back() == nearest_node(s, v));
    for (std::size_t i = 1; i < path.node_indices.size(); ++i) {
      CHECK(path.node_indices[i] != path.node_indices[i - 1]);
      CHECK(path.hop_lengths[i - 1] ==
            doctest::Approx(s.distance(s[path.node_indices[i - 1]], s[path.node_indices[i]])));
    }
    agree += path.node_indices == dense_path(s, u, v, 20000);
  }
  // Slivers thinner than the refined step may be missed; that should be rare.
  CHECK(agree >= trials - 3);
}

TEST_CASE("Markov path in a single cell") {
  const PointSet s({{5.0, 5.0}}, 10.0, false);
  const MarkovPath p = markov_path(s, {1.0, 1.0}, {9.0, 9.0});
  CHECK(p.node_indices.size() == 1);
  CHECK(p.total_length() == 0.0);
  CHECK_THROWS_AS(markov_path(s, {1.0, 1.0}, {1.0, 1.0}), DomainError);
}

TEST_CASE("geometry dump round trip") {
  const PointSet s = sample_poisson(0.2, 10.0, 3, true);
  const MarkovPath path = markov_path(s, {1.0, 1.0}, {8.0, 6.0});
  std::stringstream buf;
  write_geometry(buf, s, std::span<const MarkovPath>(&path, 1));
  const GeometryDump dump = read_geometry(buf);
  REQUIRE(dump.nodes.size() == s.size());
  for (std::size_t i = 0; i < s.size(); ++i) CHECK(dump.nodes[i] == s[i]);
  REQUIRE(dump.paths.size() == 1);
  CHECK(dump.paths[0] == path.node_indices);
}

TEST_CASE("malformed geometry is rejected") {
  for (const char* text : {"node 1\n", "node 1 2 3\n", "node 1 2\npath 0 5\n", "node 1 2\npath\n",
                           "edge 0 1\n", "node 1 2\npath 0 x\n"}) {
    std::istringstream in(text);
    CAPTURE(text);
    CHECK_THROWS_AS(read_geometry(in), DomainError);
  }
}

TEST_CASE("MC configuration checks") {
  McConfig c;
  CHECK_NOTHROW(c.validate());
  c.side_in_alpha = 5;
  CHECK_THROWS_AS(c.validate(), DomainError);
  c = McConfig{};
  c.samples = 10;
  CHECK_THROWS_AS(c.validate(), DomainError);
}

TEST_CASE("MC estimators: determinism and variance scaling") {
  const auto cost = [](double d) { return std::exp(d / 10.0); };
  McConfig a;
  a.samples = 2000;
  a.seed = 4;
  a.workers = 1;
  McConfig b = a;
  b.workers = 4;
  CHECK(estimate_kappa_bb_mc(cost, 10.0, a).estimate == estimate_kappa_bb_mc(cost, 10.0, b).estimate);
  CHECK(estimate_kappa_loc_mc(cost, 10.0, a).estimate == estimate_kappa_loc_mc(cost, 10.0, b).estimate);

  McConfig big = a;
  big.samples = 8000;
  const double ratio = estimate_kappa_loc_mc(cost, 10.0, big).std_error /
                       estimate_kappa_loc_mc(cost, 10.0, a).std_error;
  // Four times the samples: half the standard error, up to batch-variance noise.
  CHECK(ratio > 0.35);
  CHECK(ratio < 0.7);
}

}
