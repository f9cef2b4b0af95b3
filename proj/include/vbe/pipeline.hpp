#pragma once

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "vbe/clustering.hpp"
#include "vbe/core.hpp"
#include "vbe/errors.hpp"
#include "vbe/metrics.hpp"
#include "vbe/random.hpp"

namespace vbe {

using ordered_json = nlohmann::ordered_json;

enum class WeightSource { static_balances, ballot_voting_power };

inline std::string to_string(WeightSource w) {
    return w == WeightSource::static_balances ? "static_balances" : "ballot_voting_power";
}

struct PipelineConfig {
    WindowSpec window;
    std::vector<EntropyMeasure> measures = {EntropyMeasure::min_entropy(),
                                            EntropyMeasure::shannon()};
    KMeansConfig clustering;
    DistanceKind distance = DistanceKind::euclidean;
    WeightSource weight_source = WeightSource::static_balances;
    bool include_inactive = true;

    void validate() const {
        window.validate();
        clustering.validate();
        if (measures.empty()) throw ParameterError("pipeline needs at least one measure");
        for (const auto& m : measures) m.validate();
    }
};

struct WindowResult {
    int window_index = 0;
    int first_ordinal = 0;
    int last_ordinal = 0;
    std::vector<ElectionId> elections;
    std::map<std::string, double> values; // measure name -> bits
    std::vector<std::size_t> cluster_sizes;
    std::vector<double> cluster_masses;
    double largest_bloc_share = 0.0;
    double participation = 0.0;
    bool degenerate = false; // no usable token mass in the window
};

struct MeasureAggregates {
    double avg = 0.0;
    double stddev = 0.0; // population
    double min = 0.0;
    double max = 0.0;
    double current = 0.0; // last window
};

struct WindowSeries {
    std::vector<WindowResult> results;
    std::map<std::string, MeasureAggregates> aggregates;
    std::vector<std::string> measure_names;
};

inline std::map<std::string, MeasureAggregates> aggregate(const WindowSeries& series) {
    if (series.results.empty()) throw DegenerateDataError("aggregate over empty window series");
    std::map<std::string, MeasureAggregates> out;
    for (const auto& name : series.measure_names) {
        MeasureAggregates agg;
        double sum = 0.0, sumsq = 0.0;
        agg.min = std::numeric_limits<double>::infinity();
        agg.max = -std::numeric_limits<double>::infinity();
        for (const auto& w : series.results) {
            double v = w.values.at(name);
            sum += v;
            sumsq += v * v;
            agg.min = std::min(agg.min, v);
            agg.max = std::max(agg.max, v);
            agg.current = v;
        }
        const double n = static_cast<double>(series.results.size());
        agg.avg = sum / n;
        agg.stddev = std::sqrt(std::max(sumsq / n - agg.avg * agg.avg, 0.0));
        out[name] = agg;
    }
    return out;
}

/// End-to-end windowed oVBE: for each window of consecutive elections, build
/// the vote sub-matrix, cluster it, and measure token-weighted entropy over
/// the resulting blocs. Deterministic given the config seed.
inline WindowSeries window_series(const std::vector<VoteRecord>& records, const TokenMap& tokens,
                                  const std::vector<Election>& elections,
                                  const PipelineConfig& config) {
    config.validate();
    if (!(tokens.total() > 0.0)) throw DegenerateDataError("zero total token balance");

    std::vector<Election> ordered = elections;
    std::sort(ordered.begin(), ordered.end(),
              [](const Election& a, const Election& b) { return a.ordinal < b.ordinal; });
    for (std::size_t i = 1; i < ordered.size(); ++i)
        if (ordered[i].ordinal == ordered[i - 1].ordinal)
            throw ValidationError("duplicate election ordinal");

    WindowSeries series;
    for (const auto& m : config.measures) series.measure_names.push_back(m.name());

    std::vector<AccountId> universe;
    universe.reserve(tokens.balances.size());
    for (const auto& [acct, _] : tokens.balances) universe.push_back(acct);

    const int len = config.window.length;
    const int stride = config.window.stride;
    int window_index = 0;
    for (std::size_t start = 0; start < ordered.size();
         start += static_cast<std::size_t>(stride)) {
        std::size_t end = start + static_cast<std::size_t>(len);
        if (end > ordered.size()) {
            if (config.window.drop_partial_tail) break;
            end = ordered.size();
        }
        std::vector<ElectionId> eids;
        std::set<ElectionId> eset;
        for (std::size_t i = start; i < end; ++i) {
            eids.push_back(ordered[i].id);
            eset.insert(ordered[i].id);
        }
        std::vector<VoteRecord> window_votes;
        for (const auto& r : records)
            if (eset.count(r.election)) window_votes.push_back(r);

        VoteMatrix full = build_vote_matrix(window_votes, eids, universe);

        // optionally drop accounts with no activity in this window
        std::vector<AccountId> ids;
        std::vector<std::vector<double>> rows;
        for (std::size_t i = 0; i < full.accounts.size(); ++i) {
            bool active = std::any_of(full.rows[i].begin(), full.rows[i].end(),
                                      [](double v) { return v != 0.0; });
            if (config.include_inactive || active) {
                ids.push_back(full.accounts[i]);
                rows.push_back(full.rows[i]);
            }
        }
        WindowResult wr;
        wr.window_index = window_index++;
        wr.first_ordinal = ordered[start].ordinal;
        wr.last_ordinal = ordered[end - 1].ordinal;
        wr.elections = eids;

        std::size_t active_count = 0;
        for (const auto& row : rows)
            if (std::any_of(row.begin(), row.end(), [](double v) { return v != 0.0; }))
                ++active_count;
        wr.participation = rows.empty()
                               ? 0.0
                               : static_cast<double>(active_count) / static_cast<double>(rows.size());

        // window token weights
        TokenMap weights;
        if (config.weight_source == WeightSource::static_balances) {
            for (const auto& id : ids) weights.balances[id] = tokens.balances.at(id);
        } else {
            for (const auto& id : ids) weights.balances[id] = 0.0;
            for (const auto& r : window_votes) {
                auto it = weights.balances.find(r.voter);
                if (it != weights.balances.end()) it->second += r.voting_power.value_or(0.0);
            }
        }

        if (ids.empty() || !(weights.total() > 0.0)) {
            wr.degenerate = true;
            for (const auto& name : series.measure_names) wr.values[name] = 0.0;
            wr.largest_bloc_share = 1.0;
            series.results.push_back(std::move(wr));
            continue;
        }

        KMeansConfig kc = config.clustering;
        kc.seed = derive_seed(config.clustering.seed, static_cast<std::uint64_t>(wr.window_index));
        ClusteringOutcome outcome = cluster_rows(ids, rows, kc);

        auto masses = bloc_tokens(outcome.partition, weights);
        for (const auto& bloc : outcome.partition.blocs) wr.cluster_sizes.push_back(bloc.size());
        wr.cluster_masses = masses;
        double total_mass = std::accumulate(masses.begin(), masses.end(), 0.0);
        wr.largest_bloc_share = *std::max_element(masses.begin(), masses.end()) / total_mass;
        for (const auto& m : config.measures)
            wr.values[m.name()] = detail::entropy_of_shares(detail::shares_of(masses), m);
        series.results.push_back(std::move(wr));
    }

    if (!series.results.empty()) series.aggregates = aggregate(series);
    return series;
}

enum class RoundVerdict { a_more_decentralized, b_more_decentralized, tie };

inline std::string to_string(RoundVerdict v) {
    switch (v) {
        case RoundVerdict::a_more_decentralized: return "a_more_decentralized";
        case RoundVerdict::b_more_decentralized: return "b_more_decentralized";
        default: return "tie";
    }
}

struct RoundComparison {
    struct PerMeasure {
        double avg_a = 0.0;
        double avg_b = 0.0;
        double difference = 0.0; // avg_a - avg_b
        RoundVerdict verdict = RoundVerdict::tie;
    };
    std::map<std::string, PerMeasure> measures;
    RoundVerdict overall = RoundVerdict::tie;
};

inline RoundComparison compare_rounds(const WindowSeries& a, const WindowSeries& b,
                                      double tolerance = 1e-12) {
    if (a.results.empty() || b.results.empty())
        throw DegenerateDataError("compare_rounds needs two non-empty series");
    if (a.measure_names != b.measure_names)
        throw ParameterError("compare_rounds: series measure sets differ");

    RoundComparison cmp;
    int a_wins = 0, b_wins = 0;
    for (const auto& name : a.measure_names) {
        RoundComparison::PerMeasure pm;
        pm.avg_a = a.aggregates.at(name).avg;
        pm.avg_b = b.aggregates.at(name).avg;
        pm.difference = pm.avg_a - pm.avg_b;
        if (pm.difference > tolerance) {
            pm.verdict = RoundVerdict::a_more_decentralized;
            ++a_wins;
        } else if (pm.difference < -tolerance) {
            pm.verdict = RoundVerdict::b_more_decentralized;
            ++b_wins;
        }
        cmp.measures[name] = pm;
    }
    if (a_wins > 0 && b_wins == 0)
        cmp.overall = RoundVerdict::a_more_decentralized;
    else if (b_wins > 0 && a_wins == 0)
        cmp.overall = RoundVerdict::b_more_decentralized;
    return cmp;
}

struct BaselineReport {
    double gini_index = 0.0;
    int nakamoto_coefficient = 0;
    std::map<std::string, double> trivial; // measure name -> trivial clustering entropy
};

inline BaselineReport baselines(const TokenMap& tokens,
                                const std::vector<EntropyMeasure>& measures = {
                                    EntropyMeasure::min_entropy(), EntropyMeasure::shannon()}) {
    BaselineReport report;
    report.gini_index = gini(tokens);
    report.nakamoto_coefficient = nakamoto(tokens, 0.5);
    for (const auto& m : measures) report.trivial[m.name()] = trivial_vbe(tokens, m);
    return report;
}

// --- report emission -------------------------------------------------------

inline ordered_json config_to_json(const PipelineConfig& config) {
    ordered_json j;
    j["window"] = {{"length", config.window.length},
                   {"stride", config.window.stride},
                   {"drop_partial_tail", config.window.drop_partial_tail}};
    j["measures"] = ordered_json::array();
    for (const auto& m : config.measures) j["measures"].push_back(m.name());
    j["normalize"] = !config.measures.empty() && config.measures.front().normalize;
    j["clustering"] = {{"k", config.clustering.k},
                       {"seed", config.clustering.seed},
                       {"max_iterations", config.clustering.max_iterations},
                       {"tolerance", config.clustering.tolerance},
                       {"n_init", config.clustering.n_init}};
    j["distance"] = config.distance == DistanceKind::euclidean ? "euclidean" : "cosine";
    j["weight_source"] = to_string(config.weight_source);
    j["include_inactive"] = config.include_inactive;
    return j;
}

inline ordered_json series_to_json(const WindowSeries& series) {
    ordered_json j;
    j["windows"] = ordered_json::array();
    for (const auto& w : series.results) {
        ordered_json wj;
        wj["window_index"] = w.window_index;
        wj["first_ordinal"] = w.first_ordinal;
        wj["last_ordinal"] = w.last_ordinal;
        wj["elections"] = w.elections;
        ordered_json vals;
        for (const auto& name : series.measure_names) vals[name] = w.values.at(name);
        wj["values"] = vals;
        wj["cluster_sizes"] = w.cluster_sizes;
        wj["cluster_masses"] = w.cluster_masses;
        wj["largest_bloc_share"] = w.largest_bloc_share;
        wj["participation"] = w.participation;
        wj["degenerate"] = w.degenerate;
        j["windows"].push_back(std::move(wj));
    }
    ordered_json aggs;
    for (const auto& name : series.measure_names) {
        if (!series.aggregates.count(name)) continue;
        const auto& a = series.aggregates.at(name);
        aggs[name] = {{"avg", a.avg},
                      {"std", a.stddev},
                      {"min", a.min},
                      {"max", a.max},
                      {"current", a.current}};
    }
    j["aggregates"] = aggs;
    j["measure_names"] = series.measure_names;
    return j;
}

inline WindowSeries series_from_json(const ordered_json& j) {
    WindowSeries series;
    series.measure_names = j.at("measure_names").get<std::vector<std::string>>();
    for (const auto& wj : j.at("windows")) {
        WindowResult w;
        w.window_index = wj.at("window_index").get<int>();
        w.first_ordinal = wj.at("first_ordinal").get<int>();
        w.last_ordinal = wj.at("last_ordinal").get<int>();
        w.elections = wj.at("elections").get<std::vector<ElectionId>>();
        for (const auto& name : series.measure_names)
            w.values[name] = wj.at("values").at(name).get<double>();
        w.cluster_sizes = wj.at("cluster_sizes").get<std::vector<std::size_t>>();
        w.cluster_masses = wj.at("cluster_masses").get<std::vector<double>>();
        w.largest_bloc_share = wj.at("largest_bloc_share").get<double>();
        w.participation = wj.at("participation").get<double>();
        w.degenerate = wj.at("degenerate").get<bool>();
        series.results.push_back(std::move(w));
    }
    if (!series.results.empty()) series.aggregates = aggregate(series);
    return series;
}

inline ordered_json baselines_to_json(const BaselineReport& b) {
    ordered_json j;
    j["gini"] = b.gini_index;
    j["nakamoto"] = b.nakamoto_coefficient;
    ordered_json t;
    for (const auto& [name, v] : b.trivial) t[name] = v;
    j["trivial_vbe"] = t;
    return j;
}

enum class ReportFormat { json, csv };

/// Full report document: {config, windows[], aggregates, baselines}.
/// Field names are part of the compatibility contract.
inline std::string emit_report(const WindowSeries& series, const BaselineReport& baseline,
                               const PipelineConfig& config, ReportFormat format) {
    if (format == ReportFormat::json) {
        ordered_json j;
        j["config"] = config_to_json(config);
        ordered_json sj = series_to_json(series);
        j["windows"] = sj["windows"];
        j["aggregates"] = sj["aggregates"];
        j["measure_names"] = sj["measure_names"];
        j["baselines"] = baselines_to_json(baseline);
        return j.dump(2) + "\n";
    }

    std::ostringstream out;
    out << std::setprecision(17);
    out << "window_index,first_ordinal,last_ordinal";
    for (const auto& name : series.measure_names) out << "," << name;
    out << ",participation,largest_bloc_share\n";
    for (const auto& w : series.results) {
        out << w.window_index << "," << w.first_ordinal << "," << w.last_ordinal;
        for (const auto& name : series.measure_names) out << "," << w.values.at(name);
        out << "," << w.participation << "," << w.largest_bloc_share << "\n";
    }
    return out.str();
}

inline ordered_json comparison_to_json(const RoundComparison& cmp) {
    ordered_json j;
    ordered_json ms;
    for (const auto& [name, pm] : cmp.measures)
        ms[name] = {{"avg_a", pm.avg_a},
                    {"avg_b", pm.avg_b},
                    {"difference", pm.difference},
                    {"verdict", to_string(pm.verdict)}};
    j["measures"] = ms;
    j["overall"] = to_string(cmp.overall);
    return j;
}

} // namespace vbe
