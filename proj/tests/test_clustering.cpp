#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "vbe/clustering.hpp"
#include "vbe/random.hpp"

using namespace vbe;

namespace {

std::set<std::set<AccountId>> bloc_sets(const Partition& p) {
    std::set<std::set<AccountId>> out;
    for (const auto& b : p.blocs) out.insert(std::set<AccountId>(b.begin(), b.end()));
    return out;
}

} // namespace

TEST_CASE("distance kinds") {
    std::vector<double> a = {1, 0}, b = {0, 1};
    CHECK(distance(a, b, DistanceKind::euclidean) == doctest::Approx(std::sqrt(2.0)));
    CHECK(distance(a, b, DistanceKind::cosine) == doctest::Approx(1.0));
    CHECK(distance(a, a, DistanceKind::cosine) == doctest::Approx(0.0));
    std::vector<double> z = {0, 0};
    CHECK(distance(a, z, DistanceKind::cosine) == doctest::Approx(1.0)); // zero-vector convention
}

TEST_CASE("k-means separates an obvious 1-d gap") {
    std::vector<AccountId> ids = {"a", "b", "c", "d"};
    std::vector<std::vector<double>> rows = {{0.0}, {0.1}, {5.0}, {5.1}};
    KMeansConfig cfg;
    cfg.k = 2;
    auto out = cluster_rows(ids, rows, cfg);
    auto blocs = bloc_sets(out.partition);
    CHECK(blocs.count({"a", "b"}) == 1);
    CHECK(blocs.count({"c", "d"}) == 1);
    CHECK(out.effective_k == 2);
}

TEST_CASE("k-means is deterministic for a fixed seed") {
    std::mt19937_64 rng(123);
    std::vector<AccountId> ids;
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < 40; ++i) {
        ids.push_back("v" + std::to_string(i));
        rows.push_back({uniform_in(rng, -1, 1), uniform_in(rng, -1, 1), uniform_in(rng, -1, 1)});
    }
    KMeansConfig cfg;
    cfg.k = 4;
    cfg.seed = 99;
    auto a = cluster_rows(ids, rows, cfg);
    auto b = cluster_rows(ids, rows, cfg);
    CHECK(a.assignments == b.assignments);
    CHECK(a.inertia == b.inertia);
    CHECK(a.centroids == b.centroids);
}

TEST_CASE("k-means is equivariant under row permutation") {
    std::mt19937_64 rng(321);
    std::vector<AccountId> ids;
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < 25; ++i) {
        ids.push_back("v" + std::to_string(i));
        rows.push_back({uniform_in(rng, -1, 1), uniform_in(rng, -1, 1)});
    }
    KMeansConfig cfg;
    cfg.k = 3;
    cfg.seed = 7;
    auto base = cluster_rows(ids, rows, cfg);

    std::vector<std::size_t> perm(ids.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    for (std::size_t i = perm.size(); i > 1; --i) std::swap(perm[i - 1], perm[uniform_index(rng, i)]);
    std::vector<AccountId> pids;
    std::vector<std::vector<double>> prows;
    for (std::size_t i : perm) {
        pids.push_back(ids[i]);
        prows.push_back(rows[i]);
    }
    auto shuffled = cluster_rows(pids, prows, cfg);
    CHECK(bloc_sets(base.partition) == bloc_sets(shuffled.partition));
    CHECK(base.inertia == doctest::Approx(shuffled.inertia).epsilon(1e-12));
}

TEST_CASE("k reduces to the number of distinct rows") {
    std::vector<AccountId> ids = {"a", "b", "c", "d", "e", "f"};
    std::vector<std::vector<double>> rows = {{1, 0}, {1, 0}, {0, 1}, {0, 1}, {1, 1}, {1, 1}};
    KMeansConfig cfg;
    cfg.k = 5;
    auto out = cluster_rows(ids, rows, cfg);
    CHECK(out.effective_k == 3);
    CHECK(out.partition.blocs.size() == 3);
    for (const auto& b : out.partition.blocs) CHECK(!b.empty());
    CHECK(out.inertia == doctest::Approx(0.0));
}

TEST_CASE("inertia trace is non-increasing") {
    std::mt19937_64 rng(555);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<AccountId> ids;
        std::vector<std::vector<double>> rows;
        std::size_t n = 10 + uniform_index(rng, 40);
        for (std::size_t i = 0; i < n; ++i) {
            ids.push_back("v" + std::to_string(i));
            rows.push_back({uniform_in(rng, -2, 2), uniform_in(rng, -2, 2)});
        }
        KMeansConfig cfg;
        cfg.k = 3;
        cfg.seed = derive_seed(555, static_cast<std::uint64_t>(trial));
        auto out = cluster_rows(ids, rows, cfg);
        REQUIRE(!out.inertia_trace.empty());
        for (std::size_t i = 1; i < out.inertia_trace.size(); ++i)
            CHECK(out.inertia_trace[i] <= out.inertia_trace[i - 1] + 1e-9);
        CHECK(out.inertia == doctest::Approx(out.inertia_trace.back()));
    }
}

TEST_CASE("k-means input validation") {
    KMeansConfig cfg;
    cfg.k = 0;
    CHECK_THROWS_AS(cfg.validate(), ParameterError);
    cfg = KMeansConfig{};
    CHECK_THROWS_AS(cluster_rows({}, {}, cfg), ParameterError);
    CHECK_THROWS_AS(cluster_rows({"a"}, {{1.0}, {2.0}}, cfg), ParameterError); // size mismatch
}

TEST_CASE("signature clustering groups identical sign patterns") {
    UtilityMatrix u;
    u.players = {"a", "b", "c", "d", "e"};
    u.elections = {"e0", "e1"};
    u.values = {{1.0, -2.0}, {3.0, -0.5}, {-1.0, 1.0}, {0.01, 0.0}, {0.05, -0.05}};
    auto p = signature_clustering(u, 0.05);
    auto blocs = bloc_sets(p);
    CHECK(blocs.count({"a", "b"}) == 1);      // "+-"
    CHECK(blocs.count({"c"}) == 1);           // "-+"
    CHECK(blocs.count({"d", "e"}) == 1);      // deadzone, |u| <= eps inclusive
    REQUIRE(p.labels.size() == p.blocs.size());
}

TEST_CASE("apathetic set is boundary-inclusive") {
    UtilityMatrix u;
    u.players = {"a", "b", "c"};
    u.elections = {"e0"};
    u.values = {{0.05}, {-0.05}, {0.0500001}};
    auto a = apathetic_set(u, 0.05);
    CHECK(a == std::set<AccountId>{"a", "b"});
}

TEST_CASE("ballot normalization weights unpopular columns up") {
    // 4 ballots; column 0 funded once, column 1 funded three times
    std::vector<std::vector<double>> ballots = {{1, 1}, {0, 1}, {0, 1}, {0, 0}};
    auto norm = normalize_ballots(ballots);

    double w0 = std::log(5.0 / 2.0) + 1.0;
    double w1 = std::log(5.0 / 4.0) + 1.0;
    CHECK(norm[0][0] / norm[0][1] == doctest::Approx(w0 / w1).epsilon(1e-12));

    // unit rows, zero rows untouched
    CHECK(norm[1][1] == doctest::Approx(1.0));
    CHECK(norm[3][0] == 0.0);
    CHECK(norm[3][1] == 0.0);

    CHECK_THROWS_AS(normalize_ballots({{-1.0}}), ValidationError);
    CHECK_THROWS_AS(normalize_ballots({{0.0}, {0.0}}), ValidationError);
    CHECK_THROWS_AS(normalize_ballots({}), ParameterError);
}

TEST_CASE("ballot clustering is deterministic") {
    std::mt19937_64 rng(42);
    std::vector<AccountId> ids;
    std::vector<std::vector<double>> ballots;
    for (int i = 0; i < 20; ++i) {
        ids.push_back("v" + std::to_string(i));
        std::vector<double> row(5, 0.0);
        row[uniform_index(rng, 5)] = uniform_in(rng, 1.0, 10.0);
        row[uniform_index(rng, 5)] = uniform_in(rng, 1.0, 10.0);
        ballots.push_back(row);
    }
    KMeansConfig cfg;
    cfg.k = 3;
    auto a = cluster_ballots(ids, ballots, cfg);
    auto b = cluster_ballots(ids, ballots, cfg, DistanceKind::euclidean);
    CHECK(a.assignments == b.assignments);
}
