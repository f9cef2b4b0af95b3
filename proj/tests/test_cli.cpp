#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace {

const std::string kCli = VBE_CLI_PATH;
const std::string kFixtures = FIXTURE_DIR;

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

RunResult run(const std::string& args) {
    static int counter = 0;
    auto dir = std::filesystem::temp_directory_path();
    auto out_path = dir / ("vbe_cli_out_" + std::to_string(counter) + ".txt");
    auto err_path = dir / ("vbe_cli_err_" + std::to_string(counter) + ".txt");
    ++counter;

    std::string cmd =
        kCli + " " + args + " > " + out_path.string() + " 2> " + err_path.string();
    int status = std::system(cmd.c_str());

    RunResult r;
#ifdef _WIN32
    r.exit_code = status;
#else
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
#endif
    auto slurp = [](const std::filesystem::path& p) {
        std::ifstream in(p);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    r.out = slurp(out_path);
    r.err = slurp(err_path);
    std::filesystem::remove(out_path);
    std::filesystem::remove(err_path);
    return r;
}

std::string dataset_flags() {
    return "--votes " + kFixtures + "/votes.csv --balances " + kFixtures +
           "/balances.csv --proposals " + kFixtures + "/proposals.csv";
}

} // namespace

TEST_CASE("compute emits a full json report") {
    auto r = run("compute " + dataset_flags() + " --window 10 --stride 10 --k 3 --seed 42");
    REQUIRE(r.exit_code == 0);
    auto doc = nlohmann::json::parse(r.out);
    CHECK(doc.contains("config"));
    CHECK(doc.contains("windows"));
    CHECK(doc.contains("aggregates"));
    CHECK(doc.contains("baselines"));
    CHECK(doc["windows"].size() == 4); // 40 proposals, window 10, stride 10
    CHECK(doc["config"]["clustering"]["seed"] == 42);
    for (const auto& w : doc["windows"]) {
        CHECK(w["participation"].get<double>() >= 0.0);
        CHECK(w["participation"].get<double>() <= 1.0);
        CHECK(w["largest_bloc_share"].get<double>() > 0.0);
    }
}

TEST_CASE("compute csv format") {
    auto r = run("compute " + dataset_flags() + " --format csv");
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.rfind("window_index,first_ordinal,last_ordinal,min_entropy,shannon,"
                      "participation,largest_bloc_share\n", 0) == 0);
}

TEST_CASE("compute honors measure selection") {
    auto r = run("compute " + dataset_flags() + " --measures min_entropy,renyi_2");
    REQUIRE(r.exit_code == 0);
    auto doc = nlohmann::json::parse(r.out);
    CHECK(doc["measure_names"] == nlohmann::json::array({"min_entropy", "renyi_2"}));

    auto bad = run("compute " + dataset_flags() + " --measures bogus");
    CHECK(bad.exit_code == 64);
}

TEST_CASE("compute is byte-identical across runs") {
    auto a = run("compute " + dataset_flags() + " --seed 7");
    auto b = run("compute " + dataset_flags() + " --seed 7");
    REQUIRE(a.exit_code == 0);
    CHECK(a.out == b.out);
    CHECK(!a.out.empty());
}

TEST_CASE("exit codes") {
    // usage: missing required flags / unknown subcommand
    CHECK(run("compute").exit_code == 64);
    CHECK(run("frobnicate").exit_code == 64);
    CHECK(run("verify --theorem nonsense").exit_code == 64);
    CHECK(run("verify --theorem sybil --trials 0").exit_code == 64);

    // validation: unreadable input
    auto missing = run("compute --votes nope.csv --balances nope.csv --proposals nope.csv");
    CHECK(missing.exit_code == 1);

    // degenerate: window longer than the proposal list
    auto degen = run("compute " + dataset_flags() + " --window 1000");
    CHECK(degen.exit_code == 2);
}

TEST_CASE("compare-rounds on the two-round fixture") {
    auto r = run("compare-rounds " + dataset_flags() + " --window 10 --stride 10");
    REQUIRE(r.exit_code == 0);
    auto doc = nlohmann::json::parse(r.out);
    REQUIRE(doc.contains("comparison"));
    CHECK(doc["comparison"].contains("overall"));
    CHECK(doc["comparison"]["measures"].contains("min_entropy"));
    CHECK(doc["round_a"]["windows"].size() == 2);
    CHECK(doc["round_b"]["windows"].size() == 2);
}

TEST_CASE("verify subcommand") {
    auto r = run("verify --theorem sybil --trials 25 --seed 5");
    REQUIRE(r.exit_code == 0);
    auto doc = nlohmann::json::parse(r.out);
    CHECK(doc["theorem"] == "sybil");
    CHECK(doc["trials"] == 25);
    CHECK(doc["passes"] == 25);
}

TEST_CASE("baselines subcommand") {
    auto r = run("baselines --balances " + kFixtures + "/balances_uniform10.csv");
    REQUIRE(r.exit_code == 0);
    auto doc = nlohmann::json::parse(r.out);
    CHECK(doc["nakamoto"] == 6);
    CHECK(doc["gini"].get<double>() == doctest::Approx(0.0));
    CHECK(doc["trivial_vbe"]["min_entropy"].get<double>() == doctest::Approx(std::log2(10.0)));
}

TEST_CASE("gen-synthetic produces a loadable dataset") {
    auto dir = std::filesystem::temp_directory_path() / "vbe_gen_test";
    std::filesystem::create_directories(dir);
    auto r = run("gen-synthetic --seed 3 --players 20 --elections 12 --collapse-strength 0.8 "
                 "--out-dir " + dir.string());
    REQUIRE(r.exit_code == 0);
    CHECK(std::filesystem::exists(dir / "votes.csv"));
    CHECK(std::filesystem::exists(dir / "balances.csv"));
    CHECK(std::filesystem::exists(dir / "proposals.csv"));

    auto compute = run("compute --votes " + (dir / "votes.csv").string() + " --balances " +
                       (dir / "balances.csv").string() + " --proposals " +
                       (dir / "proposals.csv").string() + " --window 12");
    CHECK(compute.exit_code == 0);
    std::filesystem::remove_all(dir);
}
