#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "amd/eps_candidates.hpp"
#include "amd/multi_density.hpp"
#include "support.hpp"

#include <numeric>
#include <random>

using namespace amd;

namespace {

Dataset<double> column(const std::vector<double>& xs) {
  MatrixX<double> p(static_cast<Index>(xs.size()), 1);
  for (std::size_t i = 0; i < xs.size(); ++i) p(static_cast<Index>(i), 0) = xs[i];
  return Dataset<double>(p);
}

KdisValues<double> kdis_of(std::vector<double> v) {
  KdisValues<double> k;
  k.values = v;
  std::sort(v.begin(), v.end());
  k.sorted = std::move(v);
  k.k = 1;
  return k;
}

}  // namespace

TEST_CASE("k-dis values") {
  const SortedNeighborDistances<double> snd(column({0, 1, 3}));
  auto k = compute_kdis(snd, 1);
  CHECK(k.values == std::vector<double>{1, 1, 2});
  CHECK(k.sorted == std::vector<double>{1, 1, 2});
  CHECK(compute_kdis(snd, 2).values == std::vector<double>{3, 2, 3});
  CHECK_THROWS_AS(compute_kdis(snd, 0), InputError);
  CHECK_THROWS_AS(compute_kdis(snd, 3), InputError);

  const SortedNeighborDistances<double> dup(column({5, 5, 9}));
  k = compute_kdis(dup, 1);
  CHECK(k.values[0] == 0.0);
  CHECK(k.values[1] == 0.0);
}

TEST_CASE("histogram of bimodal values has two peaks") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> lo(0.1, 0.01), hi(10.0, 0.2);
  std::vector<double> v;
  for (int i = 0; i < 200; ++i) v.push_back(std::abs(i % 2 ? lo(rng) : hi(rng)));
  const auto h = build_histogram(kdis_of(v));
  CHECK(h.bins() == 15);  // ceil(sqrt(200))
  CHECK(h.n_peaks == 2);
  CHECK(std::accumulate(h.counts.begin(), h.counts.end(), Index{0}) == 200);
  for (Index pk : h.peaks) {
    const auto u = static_cast<std::size_t>(pk);
    if (u > 0) CHECK(h.smoothed[u] >= h.smoothed[u - 1]);
    if (u + 1 < h.smoothed.size()) CHECK(h.smoothed[u] >= h.smoothed[u + 1]);
  }
  const auto c = candidate_eps(kdis_of(v), h);
  REQUIRE(c.eps_values.size() == 2);
  CHECK(c.eps_values[0] == doctest::Approx(0.1).epsilon(0.1));
  CHECK(c.eps_values[1] == doctest::Approx(10.0).epsilon(0.05));
}

TEST_CASE("constant values give one bin and one peak") {
  const auto h = build_histogram(kdis_of({2, 2, 2, 2}));
  CHECK(h.bins() == 1);
  CHECK(h.n_peaks == 1);
  const auto c = candidate_eps(kdis_of({2, 2, 2, 2}), h);
  CHECK(c.eps_values == std::vector<double>{2});
}

TEST_CASE("smoothing and peak finding") {
  const std::vector<double> flat_top{0, 3, 3, 3, 0};
  CHECK(find_peaks(flat_top, 0.1) == std::vector<Index>{2});
  const std::vector<double> edge{5, 1, 1, 4};
  CHECK(find_peaks(edge, 0.1) == std::vector<Index>{0, 3});
  const std::vector<double> small{10, 9.8, 9.9, 0};
  CHECK(find_peaks(small, 0.5) == std::vector<Index>{0});  // 9.9 rises only 0.1 above its higher base
  CHECK(find_peaks(small, 0.05) == std::vector<Index>{0, 2});
  const std::vector<double> twins{10, 9.8, 10, 0};
  CHECK(find_peaks(twins, 0.5).size() == 2);  // equal heights do not shadow each other

  const auto h = build_histogram(kdis_of({0, 0, 0, 1, 2, 3, 4, 4, 4}), Index{3});
  CHECK(h.counts == std::vector<Index>{4, 1, 4});  // edges 0, 4/3, 8/3, 4
  CHECK(h.smoothed[0] == doctest::Approx(2.5));
  CHECK(h.smoothed[1] == doctest::Approx(3.0));
  CHECK(h.smoothed[2] == doctest::Approx(2.5));
  CHECK(h.peaks == std::vector<Index>{1});  // smoothing merges the two raw maxima
  CHECK_THROWS_AS(build_histogram(kdis_of({1, 2}), Index{0}), InputError);
}

TEST_CASE("1-D k-means small cases") {
  const std::vector<double> a{1, 1, 1, 10, 10, 10};
  auto km = kmeans_1d<double>(a, 2);
  CHECK(km.centers == std::vector<double>{1, 10});
  CHECK(km.assignment == std::vector<Index>{0, 0, 0, 1, 1, 1});

  const std::vector<double> b{0, 2, 10};
  km = kmeans_1d<double>(b, 2);
  CHECK(km.centers[0] == doctest::Approx(1.0));
  CHECK(km.centers[1] == doctest::Approx(10.0));
  CHECK(km.sse(b) == doctest::Approx(2.0));

  const std::vector<double> c{3, 7, 1, 9};
  CHECK(kmeans_1d<double>(c, 1).centers[0] == doctest::Approx(5.0));

  CHECK_THROWS_AS(kmeans_1d<double>(a, 3), InputError);
  CHECK_THROWS_AS(kmeans_1d<double>(a, 0), InputError);
}

TEST_CASE("1-D k-means reaches the exhaustive contiguous optimum") {
  std::mt19937_64 rng(23);
  for (int rep = 0; rep < 300; ++rep) {
    const int distinct = std::uniform_int_distribution<int>(1, 12)(rng);
    std::vector<double> pool;
    for (int i = 0; i < distinct; ++i) pool.push_back(std::uniform_real_distribution<double>(0, 100)(rng));
    std::vector<double> v(pool);
    const int extra = std::uniform_int_distribution<int>(0, 20)(rng);
    for (int i = 0; i < extra; ++i) v.push_back(pool[static_cast<std::size_t>(rng() % pool.size())]);
    std::shuffle(v.begin(), v.end(), rng);
    const Index K = std::min<Index>(distinct, std::uniform_int_distribution<Index>(1, 3)(rng));
    const auto km = kmeans_1d<double>(v, K);
    CHECK(km.sse(v) == doctest::Approx(testing::brute_force_kmeans_sse(v, K)).epsilon(1e-9));
    CHECK(std::is_sorted(km.centers.begin(), km.centers.end()));
    for (std::size_t i = 0; i < v.size(); ++i)  // every value sits at its nearest centre
      for (Index k = 0; k < K; ++k)
        CHECK(std::abs(v[i] - km.centers[static_cast<std::size_t>(km.assignment[i])]) <=
              std::abs(v[i] - km.centers[static_cast<std::size_t>(k)]) + 1e-12);
  }
}

TEST_CASE("candidate eps overrides") {
  const auto k = kdis_of({1, 1, 2, 5, 5, 9});
  const auto h = build_histogram(k);
  auto c = candidate_eps(k, h, Index{1});
  REQUIRE(c.eps_values.size() == 1);
  CHECK(c.eps_values[0] == doctest::Approx(23.0 / 6.0));
  c = candidate_eps(k, h, Index{4});
  CHECK(c.eps_values == std::vector<double>{1, 2, 5, 9});
  CHECK(c.n_peaks_used == 4);
  CHECK_THROWS_AS(candidate_eps(k, h, Index{5}), InputError);
  CHECK_THROWS_AS(candidate_eps(k, h, Index{0}), InputError);
}

TEST_CASE("three-density blobs give three peaks") {
  const auto spec = load_blobs_spec(AMD_DATA_DIR "/blobs/blobs1.json");
  const auto ds = generate_blobs(spec);
  const auto r = amd_dbscan(ds);
  CHECK(r.histogram.n_peaks == 3);
  CHECK(r.candidates.eps_values.size() == 3);
}
