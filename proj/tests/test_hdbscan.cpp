#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "dmnr/filter.hpp"
#include "dmnr/hdbscan.hpp"
#include "dmnr/rescue.hpp"
#include "reference.hpp"
#include "test_helpers.hpp"

using dmnr::ClusterLabeling;
using dmnr::HdbscanParams;
using dmnr::KdTree;
using dmnr::Point;
using dmnr::PointCloud;

TEST_CASE("core distances on colinear points") {
    PointCloud cloud;
    cloud.points = {Point{0, 0, 0, 0}, Point{1, 0, 0, 0}, Point{2, 0, 0, 0}};
    const KdTree tree(cloud);
    CHECK(dmnr::core_distances(tree, 1) == std::vector<double>{1, 1, 1});
    CHECK(dmnr::core_distances(tree, 2) == std::vector<double>{2, 1, 2});
}

TEST_CASE("core distances match brute-force sorted rows") {
    std::mt19937_64 rng(41);
    const PointCloud cloud = dmnr_test::random_cloud(rng, 300, 15.0);
    const KdTree tree(cloud);
    for (const int ms : {1, 5, 10}) {
        const auto got = dmnr::core_distances(tree, ms);
        const auto want = dmnr_ref::core_distances(cloud, ms);
        REQUIRE(got.size() == want.size());
        for (std::size_t i = 0; i < got.size(); ++i) {
            CHECK(got[i] == Catch::Approx(want[i]).epsilon(1e-12));
        }
    }
}

TEST_CASE("core distances require enough points") {
    PointCloud cloud;
    cloud.points = {Point{0, 0, 0, 0}, Point{1, 0, 0, 0}};
    const KdTree tree(cloud);
    CHECK_THROWS_AS(dmnr::core_distances(tree, 2), dmnr::EmptyNeighborhoodError);
}

TEST_CASE("mutual reachability dominates distance and core distances") {
    std::mt19937_64 rng(43);
    const PointCloud cloud = dmnr_test::random_cloud(rng, 60, 5.0);
    const KdTree tree(cloud);
    const auto core = dmnr::core_distances(tree, 4);
    const auto edges = dmnr::mutual_reachability_mst(cloud, core);
    REQUIRE(edges.size() == cloud.size() - 1);
    for (const auto& e : edges) {
        const double d = dmnr_ref::dist(cloud.points[e.a], cloud.points[e.b]);
        CHECK(e.weight >= d - 1e-12);
        CHECK(e.weight >= std::max(core[e.a], core[e.b]) - 1e-12);
    }
}

TEST_CASE("parallel mst equals the sequential edge list bitwise") {
    std::mt19937_64 rng(97);
    // above the parallel cutoff; duplicates included to exercise ties
    dmnr::PointCloud cloud = dmnr_test::random_cloud(rng, 9000, 40.0);
    for (int i = 0; i < 50; ++i) cloud.points.push_back(cloud.points[i]);
    const dmnr::KdTree tree(cloud);
    const auto core = dmnr::core_distances(tree, 5);
    const auto seq = dmnr::mutual_reachability_mst(cloud, core, 1);
    const auto par = dmnr::mutual_reachability_mst(cloud, core, 4);
    REQUIRE(seq.size() == par.size());
    for (std::size_t i = 0; i < seq.size(); ++i) {
        CHECK(seq[i].a == par[i].a);
        CHECK(seq[i].b == par[i].b);
        CHECK(seq[i].weight == par[i].weight);
    }
}

TEST_CASE("mst total weight equals the exhaustive oracle") {
    std::mt19937_64 rng(47);
    for (const std::size_t n : {50, 200, 500}) {
        const PointCloud cloud = dmnr_test::random_cloud(rng, n, 25.0);
        const KdTree tree(cloud);
        const int ms = 5;
        const auto core = dmnr::core_distances(tree, ms);
        const auto edges = dmnr::mutual_reachability_mst(cloud, core);
        double total = 0.0;
        for (const auto& e : edges) total += e.weight;
        const double want = dmnr_ref::mst_total_weight(cloud, ms);
        CHECK(total == Catch::Approx(want).epsilon(1e-9));
    }
}

namespace {

struct BlobScene {
    PointCloud cloud;
    std::vector<int> generator;  // blob id per point
};

BlobScene three_blobs(std::uint64_t seed, std::size_t per_blob = 200,
                      double sigma = 0.5, double separation_sigmas = 20.0) {
    std::mt19937_64 rng(seed);
    BlobScene scene;
    const double sep = separation_sigmas * sigma;
    const double centers[3][3] = {{0, 0, 0}, {sep, 0, 0}, {0, sep, 0}};
    for (int b = 0; b < 3; ++b) {
        const auto blob = dmnr_test::gaussian_blob(
            rng, per_blob, centers[b][0], centers[b][1], centers[b][2], sigma);
        dmnr_test::append(scene.cloud, blob);
        for (std::size_t i = 0; i < per_blob; ++i) scene.generator.push_back(b);
    }
    return scene;
}

// fraction of points whose label maps 1:1 to their generating blob
double blob_purity(const BlobScene& scene, const ClusterLabeling& labeling) {
    std::map<std::pair<int, int>, std::size_t> votes;
    for (std::size_t i = 0; i < scene.cloud.size(); ++i) {
        ++votes[{scene.generator[i], labeling.labels[i]}];
    }
    std::map<int, int> best;  // generator -> majority label
    std::map<int, std::size_t> best_count;
    for (const auto& [key, count] : votes) {
        if (count > best_count[key.first]) {
            best_count[key.first] = count;
            best[key.first] = key.second;
        }
    }
    std::size_t pure = 0;
    for (std::size_t i = 0; i < scene.cloud.size(); ++i) {
        if (labeling.labels[i] >= 0 &&
            labeling.labels[i] == best[scene.generator[i]]) {
            ++pure;
        }
    }
    return static_cast<double>(pure) / static_cast<double>(scene.cloud.size());
}

}  // namespace

TEST_CASE("three separated blobs come back as three clusters") {
    HdbscanParams params;
    params.min_cluster_size = 20;
    params.min_samples = 5;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const BlobScene scene = three_blobs(seed);
        const auto labeling = dmnr::hdbscan(scene.cloud, params);
        REQUIRE(labeling.cluster_count == 3);
        CHECK(blob_purity(scene, labeling) >= 0.99);
        // distinct majority labels per blob
        std::set<int> majors;
        for (int b = 0; b < 3; ++b) {
            std::map<int, int> counts;
            for (std::size_t i = 0; i < scene.cloud.size(); ++i) {
                if (scene.generator[i] == b) ++counts[labeling.labels[i]];
            }
            int major = -2, cmax = -1;
            for (const auto& [label, c] : counts) {
                if (c > cmax) {
                    cmax = c;
                    major = label;
                }
            }
            majors.insert(major);
        }
        CHECK(majors.size() == 3);
    }
}

TEST_CASE("identical points form a single cluster with no noise") {
    PointCloud cloud;
    for (int i = 0; i < 40; ++i) cloud.points.push_back(Point{1, 2, 3, 0});
    HdbscanParams params;
    params.min_cluster_size = 20;
    params.min_samples = 5;
    const auto labeling = dmnr::hdbscan(cloud, params);
    CHECK(labeling.cluster_count == 1);
    for (const auto label : labeling.labels) CHECK(label == 0);
}

TEST_CASE("too few points is an error") {
    std::mt19937_64 rng(53);
    const PointCloud cloud = dmnr_test::random_cloud(rng, 10, 5.0);
    HdbscanParams params;
    params.min_cluster_size = 20;
    CHECK_THROWS_AS(dmnr::hdbscan(cloud, params), dmnr::TooFewPointsError);
}

TEST_CASE("hdbscan output is identical across runs") {
    const BlobScene scene = three_blobs(77);
    HdbscanParams params;
    params.min_cluster_size = 20;
    params.min_samples = 5;
    const auto a = dmnr::hdbscan(scene.cloud, params);
    const auto b = dmnr::hdbscan(scene.cloud, params);
    CHECK(a.labels == b.labels);
    CHECK(a.cluster_count == b.cluster_count);
}

TEST_CASE("every cluster has at least min_cluster_size members") {
    std::mt19937_64 rng(59);
    for (int trial = 0; trial < 10; ++trial) {
        PointCloud cloud = dmnr_test::random_cloud(rng, 150, 10.0);
        dmnr_test::append(cloud,
                          dmnr_test::gaussian_blob(rng, 120, 30, 0, 0, 0.4));
        HdbscanParams params;
        params.min_cluster_size = 15;
        params.min_samples = 5;
        const auto labeling = dmnr::hdbscan(cloud, params);
        std::map<int, std::size_t> sizes;
        for (const auto label : labeling.labels) {
            if (label >= 0) ++sizes[label];
        }
        CHECK(sizes.size() == static_cast<std::size_t>(labeling.cluster_count));
        for (const auto& [label, size] : sizes) {
            CHECK(size >= 15);
        }
    }
}

TEST_CASE("rescue") {
    using dmnr::Partition;
    using dmnr::StageTag;
    using dmnr::Verdict;

    const auto make_partition = [](const std::vector<int>& kept) {
        Partition p;
        for (const int k : kept) {
            p.verdicts.push_back(k ? Verdict::Kept : Verdict::Outlier);
            p.tags.push_back(k ? StageTag::DensityRetained
                               : StageTag::DensityRejected);
        }
        return p;
    };

    SECTION("h == 0 is the identity") {
        const auto part = make_partition({1, 0, 1, 0});
        ClusterLabeling labeling;
        labeling.labels = {0, 0, 0, 0};
        labeling.cluster_count = 1;
        const auto out = dmnr::rescue(part, labeling, 0);
        CHECK(out.verdicts == part.verdicts);
    }

    SECTION("single cluster rescues all its outliers") {
        const auto part = make_partition({1, 0, 0, 1});
        ClusterLabeling labeling;
        labeling.labels = {0, 0, 0, 0};
        labeling.cluster_count = 1;
        const auto out = dmnr::rescue(part, labeling, 1);
        CHECK(out.kept_count() == 4);
        CHECK(out.tags[1] == StageTag::Rescued);
        CHECK(out.tags[2] == StageTag::Rescued);
        // untouched verdicts keep their original tags
        CHECK(out.tags[0] == StageTag::DensityRetained);
    }

    SECTION("ranking is by kept-member count, not total size") {
        // cluster A: 100 kept + 10 outliers; cluster B: 5 kept + 500 outliers
        Partition part;
        ClusterLabeling labeling;
        labeling.cluster_count = 2;
        for (int i = 0; i < 110; ++i) {
            labeling.labels.push_back(0);
            part.verdicts.push_back(i < 100 ? Verdict::Kept : Verdict::Outlier);
            part.tags.push_back(i < 100 ? StageTag::DensityRetained
                                        : StageTag::DensityRejected);
        }
        for (int i = 0; i < 505; ++i) {
            labeling.labels.push_back(1);
            part.verdicts.push_back(i < 5 ? Verdict::Kept : Verdict::Outlier);
            part.tags.push_back(i < 5 ? StageTag::DensityRetained
                                      : StageTag::DensityRejected);
        }
        const auto out = dmnr::rescue(part, labeling, 1);
        // A's 10 outliers flip, B untouched
        std::size_t rescued = 0;
        for (std::size_t n = 0; n < out.size(); ++n) {
            if (out.tags[n] == StageTag::Rescued) {
                ++rescued;
                CHECK(labeling.labels[n] == 0);
            }
        }
        CHECK(rescued == 10);
        CHECK(out.kept_count() == 115);
    }

    SECTION("unclustered points are never rescued") {
        const auto part = make_partition({1, 0, 0});
        ClusterLabeling labeling;
        labeling.labels = {0, 0, -1};
        labeling.cluster_count = 1;
        const auto out = dmnr::rescue(part, labeling, 5);
        CHECK(out.verdicts[2] == Verdict::Outlier);
        CHECK(out.verdicts[1] == Verdict::Kept);
    }

    SECTION("length mismatch is an error") {
        const auto part = make_partition({1, 0});
        ClusterLabeling labeling;
        labeling.labels = {0};
        labeling.cluster_count = 1;
        CHECK_THROWS_AS(dmnr::rescue(part, labeling, 1),
                        dmnr::LengthMismatchError);
    }
}

TEST_CASE("dmnr_h") {
    SECTION("h == 0 reduces to dmnr exactly") {
        std::mt19937_64 rng(61);
        PointCloud cloud = dmnr_test::random_cloud(rng, 200, 20.0, 0.3);
        dmnr::DmnrParams params;
        params.rescue_clusters = 0;
        dmnr::HdbscanParams hparams;
        hparams.min_cluster_size = 10;
        hparams.min_samples = 5;
        const auto base = dmnr::dmnr(cloud, params);
        const auto composed = dmnr::dmnr_h(cloud, params, hparams);
        CHECK(base.verdicts == composed.verdicts);
        CHECK(base.tags == composed.tags);
    }

    SECTION("rescue monotonicity: dmnr_h keeps a superset of dmnr") {
        std::mt19937_64 rng(67);
        for (int trial = 0; trial < 20; ++trial) {
            PointCloud cloud = dmnr_test::random_cloud(rng, 150, 25.0, 0.2);
            dmnr_test::append(cloud, dmnr_test::gaussian_blob(
                                         rng, 100, dmnr_test::uniform(rng, -20, 20),
                                         dmnr_test::uniform(rng, -20, 20), 0.0, 0.8));
            dmnr::DmnrParams params;
            dmnr::HdbscanParams hparams;
            hparams.min_cluster_size = 10;
            hparams.min_samples = 5;
            const auto base = dmnr::dmnr(cloud, params);
            const auto withRescue = dmnr::dmnr_h(cloud, params, hparams);
            std::set<int> rescued_clusters;
            const auto labeling = dmnr::hdbscan(cloud, hparams);
            for (std::size_t n = 0; n < cloud.size(); ++n) {
                if (base.verdicts[n] == dmnr::Verdict::Kept) {
                    CHECK(withRescue.verdicts[n] == dmnr::Verdict::Kept);
                }
                if (withRescue.tags[n] == dmnr::StageTag::Rescued) {
                    CHECK(labeling.labels[n] >= 0);
                    rescued_clusters.insert(labeling.labels[n]);
                }
            }
            CHECK(rescued_clusters.size() <=
                  static_cast<std::size_t>(params.rescue_clusters));
        }
    }

    SECTION("a sparse wall fragment clustered with the kept wall is rescued") {
        // two dense walls, one with a sparse fringe; stage 2 keeps the walls
        // but rejects the fringe, clustering pulls the fringe back
        std::mt19937_64 rng(71);
        PointCloud cloud;
        const auto add_wall = [&](double x) {
            for (int u = 0; u < 40; ++u) {
                for (int v = 0; v < 12; ++v) {
                    cloud.points.push_back(
                        Point{x + dmnr_test::uniform(rng, -0.02, 0.02),
                              -4.0 + 0.2 * u, -1.0 + 0.2 * v, 0.0});
                }
            }
        };
        add_wall(20.0);
        add_wall(-20.0);
        const std::size_t wall_count = cloud.size();
        // fringe extends the first wall, clearly sparser but within reach
        for (int u = 0; u < 6; ++u) {
            cloud.points.push_back(Point{20.0, 4.4 + 0.45 * u, 0.0, 0.0});
        }
        dmnr::DmnrParams params;
        params.height_mode = dmnr::HeightMode::Fixed;
        params.fixed_h1 = 100.0;
        params.fixed_h2 = 1000.0;  // disable stage 1: everything faces stage 2
        params.k1 = 0.025;         // keeps the walls, rejects the sparse fringe
        params.k3 = 0.0;
        dmnr::HdbscanParams hparams;
        // forbids splits inside a 480-point wall, so each wall is one cluster
        hparams.min_cluster_size = 300;
        hparams.min_samples = 3;

        const auto base = dmnr::dmnr(cloud, params);
        REQUIRE(base.kept_count() >= wall_count);  // both walls survive
        std::size_t fringe_rejected = 0;
        for (std::size_t n = wall_count; n < cloud.size(); ++n) {
            if (base.verdicts[n] == dmnr::Verdict::Outlier) ++fringe_rejected;
        }
        REQUIRE(fringe_rejected > 0);

        const auto rescued = dmnr::dmnr_h(cloud, params, hparams);
        for (std::size_t n = wall_count; n < cloud.size(); ++n) {
            CHECK(rescued.verdicts[n] == dmnr::Verdict::Kept);
        }
    }
}
