#include <algorithm>
#include <numeric>
#include <sstream>

#include <doctest.h>

#include "adaptnet/clustering.hpp"
#include "adaptnet/error.hpp"
#include "oracles.hpp"

using namespace adaptnet;

namespace {

std::vector<Trajectory> fixture_curves() {
  return {oracle::curve({{0, 0}, {1, 0}, {2, 1}}),     oracle::curve({{0, 1}, {1, 1}, {2, 2}}),
          oracle::curve({{0, 0.5}, {1.5, 0}, {2, 0}}), oracle::curve({{20, 20}, {21, 20}, {22, 22}}),
          oracle::curve({{20, 21}, {22, 21}}),         oracle::curve({{19, 20}, {21, 19}, {22, 20}})};
}

DistanceMatrix brute_matrix(const std::vector<Trajectory>& ts) {
  DistanceMatrix m(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) {
    for (std::size_t j = i + 1; j < ts.size(); ++j) m.set(i, j, oracle::frechet_bruteforce(ts[i], ts[j]));
  }
  return m;
}

bool swap_optimal(const DistanceMatrix& d, const Clustering& c) {
  for (std::size_t slot = 0; slot < c.k; ++slot) {
    for (std::size_t cand = 0; cand < d.size(); ++cand) {
      if (std::find(c.medoids.begin(), c.medoids.end(), cand) != c.medoids.end()) continue;
      auto trial = c.medoids;
      trial[slot] = cand;
      if (oracle::medoid_cost(d, trial) < c.cost - 1e-12) return false;
    }
  }
  return true;
}

}  // namespace

TEST_SUITE("clustering") {
  TEST_CASE("pairwise matrix shapes") {
    const auto one = pairwise_frechet(std::vector<Trajectory>{oracle::curve({{1, 2}, {3, 4}})});
    CHECK(one.size() == 1);
    CHECK(one(0, 0) == 0.0);
    const auto c = oracle::curve({{1, 2}, {3, 4}});
    const auto two = pairwise_frechet(std::vector<Trajectory>{c, c});
    for (double v : two.values()) CHECK(v == 0.0);
    CHECK_THROWS_AS(pairwise_frechet(std::vector<Trajectory>{c, Trajectory{}}), InvalidInput);
    CHECK_THROWS_AS(pairwise_frechet(std::vector<Trajectory>{}), InvalidInput);
  }

  TEST_CASE("pairwise matrix equals coupling enumeration") {
    Rng rng(4);
    std::vector<Trajectory> ts{oracle::random_curve(rng, 4), oracle::random_curve(rng, 6), oracle::random_curve(rng, 5)};
    CHECK(pairwise_frechet(ts) == brute_matrix(ts));
  }

  TEST_CASE("distance matrix validation") {
    CHECK_THROWS_AS(DistanceMatrix(2, {0, 1, 2, 0}), InvalidInput);
    CHECK_THROWS_AS(DistanceMatrix(2, {1, 1, 1, 0}), InvalidInput);
    CHECK_THROWS_AS(DistanceMatrix(2, {0, -1, -1, 0}), InvalidInput);
    CHECK_THROWS_AS(DistanceMatrix(2, {0, 1, 1}), InvalidInput);
  }

  TEST_CASE("k equal to n gives every item its own medoid") {
    Rng rng(2);
    std::vector<Trajectory> ts;
    for (int i = 0; i < 5; ++i) ts.push_back(oracle::random_curve(rng, 4));
    const auto c = k_medoids(pairwise_frechet(ts), 5, 9);
    CHECK(c.cost == 0.0);
    CHECK(c.medoids == std::vector<std::size_t>{0, 1, 2, 3, 4});
    CHECK(c.assignment == std::vector<std::size_t>{0, 1, 2, 3, 4});
  }

  TEST_CASE("duplicated groups split exactly") {
    const auto a = oracle::curve({{0, 0}, {5, 0}});
    const auto b = oracle::curve({{500, 500}, {505, 500}});
    const std::vector<Trajectory> ts{a, b, a, b, a, b};
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto c = k_medoids(pairwise_frechet(ts), 2, seed);
      CHECK(c.cost == 0.0);
      CHECK(c.assignment[0] == c.assignment[2]);
      CHECK(c.assignment[0] == c.assignment[4]);
      CHECK(c.assignment[1] == c.assignment[3]);
      CHECK(c.assignment[1] == c.assignment[5]);
      CHECK(c.assignment[0] != c.assignment[1]);
    }
  }

  TEST_CASE("fixture cost equals the exhaustive medoid pair minimum") {
    const auto d = brute_matrix(fixture_curves());
    const auto c = k_medoids(d, 2, 3);
    CHECK(c.cost == doctest::Approx(oracle::exhaustive_medoid_cost(d, 2)).epsilon(1e-12));
  }

  TEST_CASE("swap optimality and determinism on random instances") {
    Rng rng(21);
    for (int trial = 0; trial < 30; ++trial) {
      const std::size_t n = 4 + rng.uniform_index(5);
      const std::size_t k = 1 + rng.uniform_index(3);
      std::vector<Trajectory> ts;
      for (std::size_t i = 0; i < n; ++i) ts.push_back(oracle::random_curve(rng, 3 + rng.uniform_index(3), 0, 50));
      const auto d = pairwise_frechet(ts);
      const auto c = k_medoids(d, k, trial);
      CHECK(c == k_medoids(d, k, trial));
      CHECK(std::is_sorted(c.medoids.begin(), c.medoids.end()));
      CHECK(c.cost == doctest::Approx(clustering_cost(d, c.medoids)));
      CHECK(swap_optimal(d, c));
      for (std::size_t slot = 0; slot < k; ++slot) CHECK(c.assignment[c.medoids[slot]] == slot);
      if (n <= 8 && k <= 3) CHECK(c.cost >= oracle::exhaustive_medoid_cost(d, k) - 1e-12);
    }
  }

  TEST_CASE("nearest medoid ties resolve to the lowest medoid position") {
    DistanceMatrix d(3);
    d.set(0, 1, 2.0);
    d.set(0, 2, 2.0);
    d.set(1, 2, 4.0);
    const std::vector<std::size_t> medoids{1, 2};
    CHECK(assign_to_medoids(d, medoids) == std::vector<std::size_t>{0, 0, 1});
  }

  TEST_CASE("permutation equivariance on a unique partition") {
    const auto a = oracle::curve({{0, 0}, {5, 0}});
    const auto b = oracle::curve({{500, 500}, {505, 500}});
    const auto e = oracle::curve({{0, 900}, {5, 900}});
    const std::vector<Trajectory> ts{a, b, e, a, b, e};
    const std::vector<std::size_t> perm{4, 2, 0, 5, 1, 3};
    std::vector<Trajectory> permuted;
    for (auto p : perm) permuted.push_back(ts[p]);
    const auto c = k_medoids(pairwise_frechet(ts), 3, 1);
    const auto cp = k_medoids(pairwise_frechet(permuted), 3, 1);
    for (std::size_t i = 0; i < ts.size(); ++i) {
      for (std::size_t j = 0; j < ts.size(); ++j) {
        CHECK((c.assignment[perm[i]] == c.assignment[perm[j]]) == (cp.assignment[i] == cp.assignment[j]));
      }
    }
  }

  TEST_CASE("k out of range") {
    const auto d = pairwise_frechet(std::vector<Trajectory>{oracle::curve({{0, 0}}), oracle::curve({{1, 1}})});
    CHECK_THROWS_AS(k_medoids(d, 3, 0), InvalidInput);
    CHECK_THROWS_AS(k_medoids(d, 0, 0), InvalidInput);
    CHECK_THROWS_AS(k_medoids(d, 1, 0, 0), InvalidInput);
  }

  TEST_CASE("restarts never raise the cost of the first draw") {
    Rng rng(23);
    for (int trial = 0; trial < 40; ++trial) {
      std::vector<Trajectory> ts;
      for (int i = 0; i < 8; ++i) ts.push_back(oracle::random_curve(rng, 4, 0, 50));
      const auto d = pairwise_frechet(ts);
      const auto one = k_medoids(d, 3, trial, 1);
      const auto many = k_medoids(d, 3, trial, 8);
      CHECK(many.cost <= one.cost + 1e-12);
      CHECK(swap_optimal(d, one));
    }
  }

  TEST_CASE("report centroids are point means") {
    const std::vector<Trajectory> single{oracle::curve({{0, 0}, {2, 0}})};
    const auto c1 = k_medoids(pairwise_frechet(single), 1, 0);
    const auto r1 = cluster_report(c1, single);
    REQUIRE(r1.size() == 1);
    CHECK(r1[0].centroid.x == 1.0);
    CHECK(r1[0].centroid.y == 0.0);

    const std::vector<Trajectory> two{oracle::curve({{0, 0}}), oracle::curve({{50, 50}})};
    const auto r2 = cluster_report(k_medoids(pairwise_frechet(two), 2, 0), two);
    REQUIRE(r2.size() == 2);
    CHECK(r2[0].size == 1);
    CHECK(r2[1].size == 1);

    const auto ts = fixture_curves();
    const auto c = k_medoids(pairwise_frechet(ts), 2, 5);
    const auto r = cluster_report(c, ts);
    std::size_t total = 0;
    for (const auto& s : r) {
      double sx = 0.0, sy = 0.0;
      std::size_t count = 0;
      for (std::size_t i = 0; i < ts.size(); ++i) {
        if (c.assignment[i] != s.cluster) continue;
        for (const auto& p : ts[i].points()) {
          sx += p.x;
          sy += p.y;
          ++count;
        }
      }
      CHECK(s.centroid.x == doctest::Approx(sx / count));
      CHECK(s.centroid.y == doctest::Approx(sy / count));
      CHECK(s.medoid == c.medoids[s.cluster]);
      total += s.size;
    }
    CHECK(total == ts.size());
    // Hand sums: first group 9 points at (9.5, 5.5), second group 8 points at (167, 163).
    CHECK(r[0].centroid.x == doctest::Approx(9.5 / 9.0));
    CHECK(r[1].centroid.y == doctest::Approx(163.0 / 8.0));
  }

  TEST_CASE("report rejects inconsistent input") {
    const std::vector<Trajectory> ts{oracle::curve({{0, 0}}), oracle::curve({{1, 1}})};
    auto c = k_medoids(pairwise_frechet(ts), 1, 0);
    CHECK_THROWS_AS(cluster_report(c, std::vector<Trajectory>{ts[0]}), InvalidInput);
  }

  TEST_CASE("silhouette on well separated groups is near one") {
    const auto ts = fixture_curves();
    const auto d = pairwise_frechet(ts);
    CHECK(silhouette_score(d, k_medoids(d, 2, 0)) > 0.8);
  }

  TEST_CASE("clusters csv layout") {
    const auto ts = fixture_curves();
    const auto c = k_medoids(pairwise_frechet(ts), 2, 0);
    std::ostringstream out;
    write_clusters_csv(out, c, ts);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "traj_id,cluster,medoid,centroid_x,centroid_y");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 6);
  }
}
