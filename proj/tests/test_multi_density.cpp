#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "amd/metrics.hpp"
#include "amd/multi_density.hpp"
#include "support.hpp"

#include <random>

using namespace amd;

namespace {

Dataset<double> column(std::initializer_list<double> xs) {
  MatrixX<double> p(static_cast<Index>(xs.size()), 1);
  Index i = 0;
  for (double x : xs) p(i++, 0) = x;
  return Dataset<double>(p);
}

// Square lattice of side m with the given spacing, offset by (ox, oy).
void lattice(MatrixX<double>& p, Index& row, Index m, double spacing, double ox, double oy) {
  for (Index a = 0; a < m; ++a)
    for (Index b = 0; b < m; ++b, ++row) {
      p(row, 0) = ox + spacing * static_cast<double>(a);
      p(row, 1) = oy + spacing * static_cast<double>(b);
    }
}

}  // namespace

TEST_CASE("obtain_min_pts examples") {
  MatrixX<double> sq(4, 2);
  sq << 0, 0, 1, 0, 0, 1, 1, 1;
  const SortedNeighborDistances<double> complete{Dataset<double>(sq)};
  CHECK(obtain_min_pts(complete, ActiveMask{}, 2.0) == 3);

  const SortedNeighborDistances<double> line(column({0, 1, 3}));
  CHECK(obtain_min_pts(line, ActiveMask{}, 1.5) == 1);

  const SortedNeighborDistances<double> pairs(column({0, 1, 100, 101}));
  CHECK(obtain_min_pts(pairs, ActiveMask{}, 1.0) == 1);

  // inactive points neither count nor are counted
  CHECK(obtain_min_pts(complete, ActiveMask{1, 1, 0, 0}, 2.0) == 1);
  CHECK_THROWS_AS(obtain_min_pts(complete, ActiveMask{1, 0, 0, 0}, 2.0), InputError);
}

TEST_CASE("candidate dedupe drops zero radii and merges near-equal ones") {
  CHECK(dedupe_candidates<double>({2.0, 0.0, 1.0, 1.0 + 1e-12, 3.0}) == std::vector<double>{1.0, 2.0, 3.0});
  const auto ds = column({0, 1, 2, 3, 4});
  CHECK_THROWS_AS(multi_density_cluster(ds, SortedNeighborDistances<double>(ds), std::vector<double>{0.0}), InputError);
}

TEST_CASE("one candidate reduces to plain DBSCAN") {
  std::mt19937_64 rng(8);
  for (int rep = 0; rep < 20; ++rep) {
    const Dataset<double> ds(testing::random_points(rng, 50, 2, rep % 2 == 0));
    const SortedNeighborDistances<double> snd(ds);
    const double eps = std::uniform_real_distribution<double>(0.5, 3.0)(rng);
    const auto md = multi_density_cluster(ds, snd, std::vector<double>{eps});
    REQUIRE(md.layers.size() == 1);
    const auto plain = dbscan(ds, snd, DbscanParams<double>{eps, md.layers[0].min_pts});
    CHECK(md.clustering.labels == plain.labels);
    CHECK(md.clustering.num_clusters == plain.num_clusters);
    CHECK(md.layers[0].min_pts == obtain_min_pts(snd, ActiveMask{}, eps));
  }
}

TEST_CASE("dense and sparse lattices separate layer by layer") {
  MatrixX<double> p(200, 2);
  Index row = 0;
  lattice(p, row, 10, 0.1, 0.0, 0.0);   // dense: spacing 0.1
  lattice(p, row, 10, 1.0, 50.0, 0.0);  // sparse: spacing 1.0
  const Dataset<double> ds(p);
  const SortedNeighborDistances<double> snd(ds);
  const auto md = multi_density_cluster(ds, snd, std::vector<double>{0.15, 1.5});

  CHECK(md.clustering.num_clusters == 2);
  CHECK(md.clustering.noise_count() == 0);
  for (Index i = 0; i < 100; ++i) {
    CHECK(md.clustering.labels[static_cast<std::size_t>(i)] == 0);
    CHECK(md.clustering.layer_of[static_cast<std::size_t>(i)] == 0);
    CHECK(md.clustering.labels[static_cast<std::size_t>(i + 100)] == 1);
    CHECK(md.clustering.layer_of[static_cast<std::size_t>(i + 100)] == 1);
  }
  REQUIRE(md.layers.size() == 2);
  // layer 0: within 0.15 a dense point sees its 8-neighbourhood (diagonal 0.141),
  // 684 neighbours in all; sparse points see none, so round(684 / 200) = 3
  CHECK(md.layers[0].min_pts == 3);
  CHECK(md.layers[0].points_clustered == 100);
  CHECK(md.layers[1].points_clustered == 100);

  // the same answer from the reference engine, layer by layer
  const auto ref0 = testing::reference_dbscan(p, 0.15, md.layers[0].min_pts);
  for (Index i = 0; i < 100; ++i) CHECK(ref0[static_cast<std::size_t>(i)] == 0);
  for (Index i = 100; i < 200; ++i) CHECK(ref0[static_cast<std::size_t>(i)] == kNoise);
}

TEST_CASE("layered output is a partition and is deterministic") {
  BlobsSpec spec;
  spec.seed = 4;
  spec.clusters = {{{0.0, 0.0}, 0.2, 120}, {{10.0, 0.0}, 1.5, 120}, {{0.0, 12.0}, 0.6, 120}};
  spec.noise_count = 10;
  spec.noise_min = {-5, -5};
  spec.noise_max = {15, 17};
  const auto ds = generate_blobs(spec);
  const auto a = amd_dbscan(ds);
  const auto b = amd_dbscan(ds);
  CHECK(a.clustering.labels == b.clustering.labels);
  CHECK(a.clustering.layer_of == b.clustering.layer_of);

  Label mx = -1;
  for (std::size_t i = 0; i < a.clustering.labels.size(); ++i) {
    const Label l = a.clustering.labels[i];
    mx = std::max(mx, l);
    CHECK((l == kNoise) == (a.clustering.layer_of[i] == -1));
  }
  CHECK(mx + 1 == a.clustering.num_clusters);
  Index clustered = 0;
  for (const auto& l : a.layers) clustered += l.points_clustered;
  CHECK(clustered + a.clustering.noise_count() == ds.size());
  CHECK(std::is_sorted(a.candidates.eps_values.begin(), a.candidates.eps_values.end()));
}

TEST_CASE("two identical well-separated blobs") {
  BlobsSpec spec;
  spec.seed = 12;
  spec.clusters = {{{0.0, 0.0}, 0.5, 60}, {{30.0, 0.0}, 0.5, 60}};
  const auto ds = generate_blobs(spec);
  const auto r = amd_dbscan(ds);
  CHECK(r.clustering.num_clusters == 2);
  CHECK(accuracy(*ds.truth(), r.clustering.labels) == 1.0);
}

TEST_CASE("forced k and peaks bypass adaptation") {
  const auto ds = testing::two_blobs(3);
  PipelineOptions opt;
  opt.k = 3;
  opt.peaks = 1;
  const auto r = amd_dbscan(ds, opt);
  CHECK_FALSE(r.adaptation.has_value());
  CHECK(r.k == 3);
  CHECK(r.candidates.eps_values.size() == 1);
  CHECK_THROWS_AS(amd_dbscan(column({0, 1, 2})), InputError);
}
