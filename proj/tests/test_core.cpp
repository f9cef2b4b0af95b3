#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "vbe/core.hpp"

using namespace vbe;

TEST_CASE("token map totals and validation") {
    TokenMap t;
    t.balances = {{"a", 1.5}, {"b", 2.5}, {"c", 0.0}};
    CHECK(t.total() == doctest::Approx(4.0));
    CHECK_NOTHROW(t.validate());

    t.balances["d"] = -1.0;
    CHECK_THROWS_AS(t.validate(), ValidationError);
    t.balances.erase("d");
    t.balances[""] = 1.0;
    CHECK_THROWS_AS(t.validate(), ValidationError);
}

TEST_CASE("round tag parsing") {
    CHECK(parse_round_tag("OffChain") == RoundTag::offchain);
    CHECK(parse_round_tag("onchain") == RoundTag::onchain);
    CHECK(parse_round_tag("") == RoundTag::unspecified);
    CHECK(!parse_round_tag("midchain"));
}

TEST_CASE("choice encoding") {
    CHECK(encode_choice(std::optional<Choice>{Choice::For}) == 1);
    CHECK(encode_choice(std::optional<Choice>{Choice::Against}) == -1);
    CHECK(encode_choice(std::optional<Choice>{Choice::Abstain}) == 0);
    CHECK(encode_choice(std::optional<Choice>{}) == 0);

    CHECK(encode_choice(0, 4) == 1);
    CHECK(encode_choice(1, 4) == -1);
    CHECK(encode_choice(2, 4) == 0);
    CHECK(encode_choice(3, 4) == 0);
    CHECK_THROWS_AS(encode_choice(4, 4), ValidationError);
    CHECK_THROWS_AS(encode_choice(0, 1), ParameterError);

    VoteRecord r;
    r.choice_index = 2;
    CHECK_THROWS_AS(encode_choice(r, 2), ValidationError); // binary election
    CHECK(encode_choice(r, 3) == 0);
}

namespace {

VoteRecord vote(ElectionId e, AccountId v, Choice c, std::int64_t ts) {
    VoteRecord r;
    r.election = std::move(e);
    r.voter = std::move(v);
    r.choice = c;
    r.timestamp = ts;
    return r;
}

} // namespace

TEST_CASE("vote matrix shape and fill") {
    std::vector<VoteRecord> votes = {
        vote("e1", "a", Choice::For, 10),
        vote("e2", "a", Choice::Against, 11),
        vote("e1", "b", Choice::Abstain, 12),
    };
    auto m = build_vote_matrix(votes, {"e1", "e2"}, {"a", "b", "c"});
    REQUIRE(m.rows.size() == 3);
    REQUIRE(m.rows[0].size() == 2);
    CHECK(m.rows[0][0] == 1.0);
    CHECK(m.rows[0][1] == -1.0);
    CHECK(m.rows[1][0] == 0.0); // abstain
    CHECK(m.rows[2][0] == 0.0); // never voted
}

TEST_CASE("duplicate votes resolve by timestamp, then file order") {
    std::vector<VoteRecord> votes = {
        vote("e1", "a", Choice::For, 20),
        vote("e1", "a", Choice::Against, 10), // older, loses
    };
    auto m = build_vote_matrix(votes, {"e1"}, {"a"});
    CHECK(m.rows[0][0] == 1.0);

    std::vector<VoteRecord> tied = {
        vote("e1", "a", Choice::For, 20),
        vote("e1", "a", Choice::Against, 20), // same ts, later row wins
    };
    m = build_vote_matrix(tied, {"e1"}, {"a"});
    CHECK(m.rows[0][0] == -1.0);
}

TEST_CASE("vote matrix rejects dangling references") {
    std::vector<VoteRecord> votes = {vote("eX", "a", Choice::For, 1)};
    CHECK_THROWS_AS(build_vote_matrix(votes, {"e1"}, {"a"}), ValidationError);
    votes = {vote("e1", "zz", Choice::For, 1)};
    CHECK_THROWS_AS(build_vote_matrix(votes, {"e1"}, {"a"}), ValidationError);
}

TEST_CASE("bloc token masses") {
    TokenMap t;
    t.balances = {{"a", 3.0}, {"b", 5.0}, {"c", 2.0}};
    Partition p;
    p.blocs = {{"a", "c"}, {"b"}};
    auto masses = bloc_tokens(p, t);
    REQUIRE(masses.size() == 2);
    CHECK(masses[0] == doctest::Approx(5.0));
    CHECK(masses[1] == doctest::Approx(5.0));

    p.blocs = {{"a", "ghost"}};
    CHECK_THROWS_AS(bloc_tokens(p, t), ValidationError);
    CHECK(bloc_tokens(p, t, true)[0] == doctest::Approx(3.0)); // lenient skips
}

TEST_CASE("partition validity") {
    std::set<AccountId> universe = {"a", "b", "c"};
    Partition p;
    p.blocs = {{"a", "b"}, {"c"}};
    CHECK(is_valid_partition(p, universe));

    p.blocs = {{"a", "b"}};
    CHECK(!is_valid_partition(p, universe)); // missing c
    p.blocs = {{"a", "b"}, {"b", "c"}};
    CHECK(!is_valid_partition(p, universe)); // overlap
    p.blocs = {{"a", "b", "c"}, {}};
    CHECK(!is_valid_partition(p, universe)); // empty bloc
}
