// Command-line front end: windowed oVBE reports, round comparison, theorem
// verification, token-distribution baselines, and synthetic data generation.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vbe/ingestion.hpp"
#include "vbe/pipeline.hpp"
#include "vbe/theory_lab.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitDegenerate = 2;
constexpr int kExitUsage = 64;

struct CommonOpts {
    std::string votes_path;
    std::string balances_path;
    std::string proposals_path;
    std::string out_path;       // empty = stdout
    std::string format = "json";
    int window = 10;
    int stride = 10;
    int k = 3;
    std::uint64_t seed = 42;
    std::string measures = "min_entropy,shannon";
    std::string distance = "euclidean";
    bool include_inactive = true;
    std::string weight_source = "static_balances";
    bool normalize = false;
    bool lenient = false;
};

void add_dataset_flags(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--votes", o.votes_path, "votes CSV (proposal_id,voter,choice,voting_power,timestamp)")
        ->required();
    cmd->add_option("--balances", o.balances_path, "balances CSV (address,balance)")->required();
    cmd->add_option("--proposals", o.proposals_path, "proposals CSV (proposal_id,ordinal,title,round_tag)")
        ->required();
    cmd->add_flag("--lenient", o.lenient, "zero-fill voters missing from balances instead of failing");
}

void add_pipeline_flags(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--out", o.out_path, "output path (default: stdout)");
    cmd->add_option("--format", o.format, "json|csv")->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--window", o.window, "window length in proposals");
    cmd->add_option("--stride", o.stride, "window stride in proposals");
    cmd->add_option("--k", o.k, "number of clusters");
    cmd->add_option("--seed", o.seed, "random seed");
    cmd->add_option("--measures", o.measures, "comma list: min_entropy, shannon, renyi_<alpha>");
    cmd->add_option("--distance", o.distance, "euclidean|cosine")
        ->check(CLI::IsMember({"euclidean", "cosine"}));
    cmd->add_flag("--include-inactive,!--exclude-inactive", o.include_inactive,
                  "keep accounts with no votes in a window");
    cmd->add_option("--weight-source", o.weight_source, "static_balances|ballot_voting_power")
        ->check(CLI::IsMember({"static_balances", "ballot_voting_power"}));
    cmd->add_flag("--normalize", o.normalize, "divide each entropy by log2(bloc count)");
}

std::vector<vbe::EntropyMeasure> parse_measures(const std::string& spec, bool normalize) {
    std::vector<vbe::EntropyMeasure> out;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = vbe::detail::trim(item);
        if (item.empty()) continue;
        if (item == "min_entropy") {
            out.push_back(vbe::EntropyMeasure::min_entropy(normalize));
        } else if (item == "shannon") {
            out.push_back(vbe::EntropyMeasure::shannon(normalize));
        } else if (item.rfind("renyi_", 0) == 0) {
            auto alpha = vbe::detail::parse_double(item.substr(6));
            if (!alpha) throw vbe::ParameterError("bad renyi measure spec '" + item + "'");
            out.push_back(vbe::EntropyMeasure::renyi(*alpha, normalize));
        } else {
            throw vbe::ParameterError("unknown measure '" + item + "'");
        }
    }
    if (out.empty()) throw vbe::ParameterError("no measures given");
    return out;
}

vbe::PipelineConfig make_config(const CommonOpts& o) {
    vbe::PipelineConfig cfg;
    cfg.window.length = o.window;
    cfg.window.stride = o.stride;
    cfg.measures = parse_measures(o.measures, o.normalize);
    cfg.clustering.k = o.k;
    cfg.clustering.seed = o.seed;
    cfg.distance = o.distance == "cosine" ? vbe::DistanceKind::cosine : vbe::DistanceKind::euclidean;
    cfg.weight_source = o.weight_source == "ballot_voting_power"
                            ? vbe::WeightSource::ballot_voting_power
                            : vbe::WeightSource::static_balances;
    cfg.include_inactive = o.include_inactive;
    cfg.validate();
    return cfg;
}

vbe::Dataset load_dataset(const CommonOpts& o) {
    vbe::Dataset ds;
    ds.proposals = vbe::load_proposals_csv(o.proposals_path);
    ds.votes = vbe::load_votes_csv(o.votes_path).records;
    ds.balances = vbe::load_balances_csv(o.balances_path);
    auto report = vbe::validate_dataset(ds, o.lenient);
    for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
    return ds;
}

void write_out(const std::string& out_path, const std::string& text) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw vbe::ValidationError("cannot write " + out_path);
    out << text;
}

int cmd_compute(const CommonOpts& o) {
    auto cfg = make_config(o);
    auto ds = load_dataset(o);
    auto series = vbe::window_series(ds.votes, ds.balances, ds.proposals, cfg);
    if (series.results.empty())
        throw vbe::DegenerateDataError("no complete windows (need >= window length proposals)");
    auto base = vbe::baselines(ds.balances, cfg.measures);
    auto fmt = o.format == "csv" ? vbe::ReportFormat::csv : vbe::ReportFormat::json;
    write_out(o.out_path, vbe::emit_report(series, base, cfg, fmt));
    return kExitOk;
}

int cmd_compare_rounds(const CommonOpts& o) {
    auto cfg = make_config(o);
    auto ds = load_dataset(o);

    auto split = [&](vbe::RoundTag tag) {
        std::vector<vbe::Election> props;
        std::set<vbe::ElectionId> ids;
        for (const auto& e : ds.proposals)
            if (e.round_tag == tag) {
                props.push_back(e);
                ids.insert(e.id);
            }
        std::vector<vbe::VoteRecord> votes;
        for (const auto& v : ds.votes)
            if (ids.count(v.election)) votes.push_back(v);
        return std::pair{props, votes};
    };
    auto [props_a, votes_a] = split(vbe::RoundTag::offchain);
    auto [props_b, votes_b] = split(vbe::RoundTag::onchain);
    if (props_a.empty() || props_b.empty())
        throw vbe::ValidationError("compare-rounds needs proposals tagged offchain and onchain");

    auto series_a = vbe::window_series(votes_a, ds.balances, props_a, cfg);
    auto series_b = vbe::window_series(votes_b, ds.balances, props_b, cfg);
    if (series_a.results.empty() || series_b.results.empty())
        throw vbe::DegenerateDataError("a round produced no complete windows");

    auto cmp = vbe::compare_rounds(series_a, series_b);
    vbe::ordered_json j;
    j["config"] = vbe::config_to_json(cfg);
    j["round_a"] = vbe::series_to_json(series_a);
    j["round_b"] = vbe::series_to_json(series_b);
    j["comparison"] = vbe::comparison_to_json(cmp);
    write_out(o.out_path, j.dump(2) + "\n");
    return kExitOk;
}

int cmd_verify(const std::string& theorem_name, int trials, std::uint64_t seed,
               const std::string& out_path) {
    auto theorem = vbe::parse_theorem(theorem_name);
    if (!theorem) {
        std::cerr << "unknown theorem '" << theorem_name << "'\n";
        return kExitUsage;
    }
    if (trials < 1) {
        std::cerr << "--trials must be >= 1\n";
        return kExitUsage;
    }
    auto report = vbe::verify_theorem(*theorem, trials, seed);
    write_out(out_path, report.to_json().dump(2) + "\n");
    return report.all_passed() ? kExitOk : kExitValidation;
}

int cmd_baselines(const std::string& balances_path, const std::string& measures,
                  const std::string& out_path) {
    auto tokens = vbe::load_balances_csv(balances_path);
    auto report = vbe::baselines(tokens, parse_measures(measures, false));
    write_out(out_path, vbe::baselines_to_json(report).dump(2) + "\n");
    return kExitOk;
}

std::string choice_label(const std::optional<vbe::Choice>& c) {
    if (!c) return "abstain";
    switch (*c) {
        case vbe::Choice::For: return "for";
        case vbe::Choice::Against: return "against";
        case vbe::Choice::Abstain: return "abstain";
    }
    return "abstain";
}

int cmd_gen_synthetic(std::uint64_t seed, int players, int elections, double collapse_strength,
                      const std::string& out_dir) {
    if (players < 1 || elections < 1) {
        std::cerr << "--players and --elections must be >= 1\n";
        return kExitUsage;
    }
    auto [round1, round2] = vbe::gen_consensus_collapse_pair(
        seed, static_cast<std::size_t>(players), static_cast<std::size_t>(elections),
        collapse_strength);

    // one combined dataset: round-2 ordinals continue after round 1
    std::ofstream props(out_dir + "/proposals.csv");
    std::ofstream votes(out_dir + "/votes.csv");
    std::ofstream bals(out_dir + "/balances.csv");
    if (!props || !votes || !bals)
        throw vbe::ValidationError("cannot write into directory " + out_dir);

    props << "proposal_id,ordinal,title,round_tag\n";
    for (const auto& e : round1.proposals)
        props << e.id << "," << e.ordinal << ",," << to_string(e.round_tag) << "\n";
    for (const auto& e : round2.proposals)
        props << e.id << "," << (e.ordinal + elections) << ",," << to_string(e.round_tag) << "\n";

    votes << "proposal_id,voter,choice,voting_power,timestamp\n";
    for (const auto* round : {&round1, &round2})
        for (const auto& v : round->votes)
            votes << v.election << "," << v.voter << "," << choice_label(v.choice) << ","
                  << v.voting_power.value_or(0.0) << "," << v.timestamp.value_or(0) << "\n";

    bals << "address,balance\n";
    bals.precision(17);
    for (const auto& [addr, b] : round1.balances.balances) bals << addr << "," << b << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"DAO decentralization metrics: observable voting-bloc entropy"};
    app.require_subcommand(1);
    app.set_config("--config");

    CommonOpts compute_opts, compare_opts;
    auto* compute = app.add_subcommand("compute", "windowed oVBE report from a dataset");
    add_dataset_flags(compute, compute_opts);
    add_pipeline_flags(compute, compute_opts);

    auto* compare = app.add_subcommand("compare-rounds",
                                       "compare offchain- vs onchain-tagged proposal rounds");
    add_dataset_flags(compare, compare_opts);
    add_pipeline_flags(compare, compare_opts);

    std::string theorem_name, verify_out;
    int trials = 500;
    std::uint64_t verify_seed = 42;
    auto* verify = app.add_subcommand("verify", "randomized transformation-theorem checks");
    verify->add_option("--theorem", theorem_name,
                       "sybil|apathy|delegation|herding|slates|bribery|internal_bribery|"
                       "external_bribery|quadratic")
        ->required();
    verify->add_option("--trials", trials, "number of random trials");
    verify->add_option("--seed", verify_seed, "random seed");
    verify->add_option("--out", verify_out, "output path (default: stdout)");

    std::string base_balances, base_measures = "min_entropy,shannon", base_out;
    auto* base = app.add_subcommand("baselines", "gini, nakamoto, and trivial-clustering entropy");
    base->add_option("--balances", base_balances, "balances CSV")->required();
    base->add_option("--measures", base_measures, "comma list of entropy measures");
    base->add_option("--out", base_out, "output path (default: stdout)");

    std::uint64_t gen_seed = 42;
    int gen_players = 50, gen_elections = 20;
    double collapse_strength = 0.5;
    std::string out_dir = ".";
    auto* gen = app.add_subcommand("gen-synthetic", "two-round synthetic governance dataset");
    gen->add_option("--seed", gen_seed, "random seed");
    gen->add_option("--players", gen_players, "number of token holders");
    gen->add_option("--elections", gen_elections, "proposals per round");
    gen->add_option("--collapse-strength", collapse_strength,
                    "probability a dissenting round-2 vote flips to the round-1 plurality");
    gen->add_option("--out-dir", out_dir, "directory for the generated CSVs");

    try {
        app.parse(argc, argv);
        if (compute->parsed()) return cmd_compute(compute_opts);
        if (compare->parsed()) return cmd_compare_rounds(compare_opts);
        if (verify->parsed()) return cmd_verify(theorem_name, trials, verify_seed, verify_out);
        if (base->parsed()) return cmd_baselines(base_balances, base_measures, base_out);
        if (gen->parsed())
            return cmd_gen_synthetic(gen_seed, gen_players, gen_elections, collapse_strength,
                                     out_dir);
        return kExitUsage;
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? kExitOk : kExitUsage;
    } catch (const vbe::ParameterError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const vbe::DegenerateDataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDegenerate;
    } catch (const vbe::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
}
