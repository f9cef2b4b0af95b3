#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <string>
#include <vector>

#include "vbe/ingestion.hpp"
#include "vbe/pipeline.hpp"
#include "vbe/random.hpp"

using namespace vbe;

namespace {

const std::string kFixtures = FIXTURE_DIR;

struct Synth {
    std::vector<Election> elections;
    std::vector<VoteRecord> votes;
    TokenMap tokens;
};

Synth make_synth(std::size_t n_elections, std::size_t n_voters, std::uint64_t seed) {
    Synth s;
    std::mt19937_64 rng(seed);
    for (std::size_t j = 0; j < n_elections; ++j)
        s.elections.push_back({"p" + std::to_string(j), static_cast<int>(j),
                               RoundTag::unspecified, 2, false, ""});
    for (std::size_t i = 0; i < n_voters; ++i) {
        AccountId a = "v" + std::to_string(100 + i);
        s.tokens.balances[a] = uniform_in(rng, 1.0, 20.0);
        for (std::size_t j = 0; j < n_elections; ++j) {
            if (uniform01(rng) < 0.2) continue;
            VoteRecord r;
            r.election = s.elections[j].id;
            r.voter = a;
            r.choice = uniform01(rng) < 0.5 ? Choice::For : Choice::Against;
            r.voting_power = s.tokens.balances[a];
            r.timestamp = static_cast<std::int64_t>(j);
            s.votes.push_back(r);
        }
    }
    return s;
}

} // namespace

TEST_CASE("window layout over 25 elections") {
    auto s = make_synth(25, 12, 1);
    PipelineConfig cfg;
    cfg.clustering.k = 2;

    auto series = window_series(s.votes, s.tokens, s.elections, cfg);
    REQUIRE(series.results.size() == 2); // length 10, stride 10, partial tail dropped
    CHECK(series.results[0].first_ordinal == 0);
    CHECK(series.results[0].last_ordinal == 9);
    CHECK(series.results[1].first_ordinal == 10);
    CHECK(series.results[1].last_ordinal == 19);

    cfg.window.stride = 1;
    series = window_series(s.votes, s.tokens, s.elections, cfg);
    CHECK(series.results.size() == 16);
    for (std::size_t i = 0; i < series.results.size(); ++i) {
        CHECK(series.results[i].window_index == static_cast<int>(i));
        CHECK(series.results[i].elections.size() == 10);
    }

    cfg.window.stride = 10;
    cfg.window.drop_partial_tail = false;
    series = window_series(s.votes, s.tokens, s.elections, cfg);
    CHECK(series.results.size() == 3);
    CHECK(series.results[2].elections.size() == 5);
}

TEST_CASE("window series is deterministic and reproducible") {
    auto s = make_synth(30, 20, 2);
    PipelineConfig cfg;
    cfg.clustering.seed = 42;
    auto a = window_series(s.votes, s.tokens, s.elections, cfg);
    auto b = window_series(s.votes, s.tokens, s.elections, cfg);
    CHECK(series_to_json(a).dump() == series_to_json(b).dump());
}

TEST_CASE("participation counts accounts with any vote in the window") {
    std::vector<Election> elections;
    for (int j = 0; j < 10; ++j)
        elections.push_back({"p" + std::to_string(j), j, RoundTag::unspecified, 2, false, ""});
    TokenMap tokens;
    tokens.balances = {{"a", 10}, {"b", 10}, {"c", 10}, {"d", 10}};
    std::vector<VoteRecord> votes;
    for (const auto& who : {"a", "b", "c"}) {
        VoteRecord r;
        r.election = "p0";
        r.voter = who;
        r.choice = Choice::For;
        votes.push_back(r);
    }
    PipelineConfig cfg;
    cfg.clustering.k = 2;
    auto series = window_series(votes, tokens, elections, cfg);
    REQUIRE(series.results.size() == 1);
    CHECK(series.results[0].participation == doctest::Approx(0.75));

    cfg.include_inactive = false;
    series = window_series(votes, tokens, elections, cfg);
    CHECK(series.results[0].participation == doctest::Approx(1.0));
    std::size_t total = 0;
    for (auto sz : series.results[0].cluster_sizes) total += sz;
    CHECK(total == 3); // "d" excluded
}

TEST_CASE("ballot voting power weighting and degenerate windows") {
    std::vector<Election> elections;
    for (int j = 0; j < 10; ++j)
        elections.push_back({"p" + std::to_string(j), j, RoundTag::unspecified, 2, false, ""});
    TokenMap tokens;
    tokens.balances = {{"a", 1}, {"b", 1}};
    std::vector<VoteRecord> votes;
    VoteRecord r;
    r.election = "p0";
    r.voter = "a";
    r.choice = Choice::For;
    r.voting_power = 7.0;
    votes.push_back(r);

    PipelineConfig cfg;
    cfg.clustering.k = 2;
    cfg.weight_source = WeightSource::ballot_voting_power;
    auto series = window_series(votes, tokens, elections, cfg);
    REQUIRE(series.results.size() == 1);
    CHECK(!series.results[0].degenerate);
    CHECK(series.results[0].largest_bloc_share == doctest::Approx(1.0)); // only a has weight

    // no voting power anywhere -> degenerate window, entropy 0
    votes[0].voting_power = 0.0;
    series = window_series(votes, tokens, elections, cfg);
    REQUIRE(series.results.size() == 1);
    CHECK(series.results[0].degenerate);
    CHECK(series.results[0].values.at("min_entropy") == 0.0);
    CHECK(series.results[0].largest_bloc_share == 1.0);
}

TEST_CASE("pipeline input validation") {
    auto s = make_synth(12, 5, 3);
    PipelineConfig cfg;
    s.elections[1].ordinal = s.elections[0].ordinal;
    CHECK_THROWS_AS(window_series(s.votes, s.tokens, s.elections, cfg), ValidationError);

    s = make_synth(12, 5, 3);
    for (auto& [_, b] : s.tokens.balances) b = 0.0;
    CHECK_THROWS_AS(window_series(s.votes, s.tokens, s.elections, cfg), DegenerateDataError);

    cfg.measures.clear();
    CHECK_THROWS_AS(cfg.validate(), ParameterError);
}

TEST_CASE("aggregate statistics") {
    WindowSeries series;
    series.measure_names = {"min_entropy"};
    for (double v : {0.78, 0.66}) {
        WindowResult w;
        w.values["min_entropy"] = v;
        series.results.push_back(w);
    }
    auto aggs = aggregate(series);
    const auto& a = aggs.at("min_entropy");
    CHECK(a.avg == doctest::Approx(0.72).epsilon(1e-12));
    CHECK(a.stddev == doctest::Approx(0.06).epsilon(1e-9)); // population stddev
    CHECK(a.min == doctest::Approx(0.66));
    CHECK(a.max == doctest::Approx(0.78));
    CHECK(a.current == doctest::Approx(0.66));

    CHECK_THROWS_AS(aggregate(WindowSeries{}), DegenerateDataError);
}

TEST_CASE("round comparison verdicts") {
    auto make_series = [](std::vector<double> vals) {
        WindowSeries s;
        s.measure_names = {"min_entropy"};
        for (double v : vals) {
            WindowResult w;
            w.values["min_entropy"] = v;
            s.results.push_back(w);
        }
        s.aggregates = aggregate(s);
        return s;
    };
    auto a = make_series({1.0, 0.9});
    auto b = make_series({0.5, 0.6});
    CHECK(compare_rounds(a, b).overall == RoundVerdict::a_more_decentralized);
    CHECK(compare_rounds(b, a).overall == RoundVerdict::b_more_decentralized);
    CHECK(compare_rounds(a, a).overall == RoundVerdict::tie);
    CHECK_THROWS_AS(compare_rounds(a, WindowSeries{}), DegenerateDataError);
}

TEST_CASE("baselines on the uniform fixture") {
    auto tokens = load_balances_csv(kFixtures + "/balances_uniform10.csv");
    auto report = baselines(tokens);
    CHECK(report.gini_index == doctest::Approx(0.0));
    CHECK(report.nakamoto_coefficient == 6);
    CHECK(report.trivial.at("min_entropy") == doctest::Approx(std::log2(10.0)));
    CHECK(report.trivial.at("shannon") == doctest::Approx(std::log2(10.0)));
}

TEST_CASE("report emission and json round trip") {
    auto s = make_synth(20, 10, 4);
    PipelineConfig cfg;
    cfg.clustering.k = 2;
    auto series = window_series(s.votes, s.tokens, s.elections, cfg);
    auto base = baselines(s.tokens, cfg.measures);

    auto json_text = emit_report(series, base, cfg, ReportFormat::json);
    auto doc = nlohmann::ordered_json::parse(json_text);
    CHECK(doc.contains("config"));
    CHECK(doc.contains("windows"));
    CHECK(doc.contains("aggregates"));
    CHECK(doc.contains("baselines"));
    CHECK(doc["windows"].size() == series.results.size());

    auto restored = series_from_json(series_to_json(series));
    CHECK(series_to_json(restored).dump() == series_to_json(series).dump());

    auto csv_text = emit_report(series, base, cfg, ReportFormat::csv);
    CHECK(csv_text.rfind("window_index,first_ordinal,last_ordinal,min_entropy,shannon,"
                         "participation,largest_bloc_share\n", 0) == 0);
}
