#include <doctest.h>

#include "adaptnet/kernels.hpp"
#include "oracles.hpp"

using namespace adaptnet;

TEST_SUITE("kernels") {
  TEST_CASE("parallel Frechet matrix equals the serial reference") {
    Rng rng(1);
    std::vector<Trajectory> ts;
    for (int i = 0; i < 24; ++i) ts.push_back(oracle::random_curve(rng, 3 + rng.uniform_index(20), 0, 100));
    CHECK(kernels::frechet_matrix_parallel(ts) == kernels::frechet_matrix_serial(ts));
  }

  TEST_CASE("parallel batch scoring equals the serial reference") {
    Rng rng(2);
    std::vector<Trajectory> refs, cands;
    for (int i = 0; i < 5; ++i) refs.push_back(prepare_for_comparison(oracle::random_curve(rng, 10, 0, 100), 16));
    for (int i = 0; i < 40; ++i) cands.push_back(prepare_for_comparison(oracle::random_curve(rng, 12, 0, 100), 16));
    const auto a = kernels::score_batch_serial(cands, refs, 20.0);
    const auto b = kernels::score_batch_parallel(cands, refs, 20.0);
    CHECK(a == b);
    for (std::size_t i = 0; i < cands.size(); ++i) CHECK(a[i] == relevance_score_prepared(cands[i], refs, 20.0));
    CHECK(kernels::max_threads() >= 1);
  }
}
