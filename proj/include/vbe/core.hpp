#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "vbe/errors.hpp"

namespace vbe {

using AccountId = std::string;
using ElectionId = std::string;

/// Account -> non-negative token balance. The distribution every metric weighs.
struct TokenMap {
    std::map<AccountId, double> balances;

    double total() const {
        double t = 0.0;
        for (const auto& [_, b] : balances) t += b;
        return t;
    }

    void validate() const {
        for (const auto& [id, b] : balances) {
            if (id.empty()) throw ValidationError("empty account id in token map");
            if (!(b >= 0.0) || !std::isfinite(b))
                throw ValidationError("negative or non-finite balance for account " + id);
        }
    }
};

enum class RoundTag { offchain, onchain, unspecified };

inline std::string to_string(RoundTag t) {
    switch (t) {
        case RoundTag::offchain: return "offchain";
        case RoundTag::onchain: return "onchain";
        default: return "unspecified";
    }
}

inline std::optional<RoundTag> parse_round_tag(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    if (s == "offchain") return RoundTag::offchain;
    if (s == "onchain") return RoundTag::onchain;
    if (s == "unspecified" || s.empty()) return RoundTag::unspecified;
    return std::nullopt;
}

struct Election {
    ElectionId id;
    int ordinal = 0;
    RoundTag round_tag = RoundTag::unspecified;
    int arity = 2;
    bool allocation = false; // allocation-ballot election (vector choices)
    std::string title;
};

enum class Choice { For, Against, Abstain };

struct VoteRecord {
    ElectionId election;
    AccountId voter;
    std::optional<Choice> choice;                 // binary-mode choice
    std::optional<int> choice_index;              // arity > 2
    std::vector<double> allocation_choice;        // allocation mode
    std::optional<double> voting_power;
    std::optional<std::int64_t> timestamp;
};

/// accounts x elections ternary matrix (rows are per-account voting histories).
struct VoteMatrix {
    std::vector<AccountId> accounts;
    std::vector<ElectionId> elections;
    std::vector<std::vector<double>> rows; // entries in {-1, 0, +1} in binary mode
};

/// Disjoint, non-empty blocs of accounts.
struct Partition {
    std::vector<std::vector<AccountId>> blocs;
    std::vector<std::string> labels; // optional, parallel to blocs when present
};

/// Rolling-window parameters over the chronological proposal order.
struct WindowSpec {
    int length = 10;
    int stride = 10;
    bool drop_partial_tail = true;

    void validate() const {
        if (length < 1) throw ParameterError("window length must be >= 1");
        if (stride < 1) throw ParameterError("window stride must be >= 1");
    }
};

/// players x elections cardinal utilities; entry (P, e) = util_P(e, true).
/// util(e, false) is implicitly the negation and never stored.
struct UtilityMatrix {
    std::vector<AccountId> players;
    std::vector<ElectionId> elections;
    std::vector<std::vector<double>> values;

    void validate() const {
        if (values.size() != players.size())
            throw ValidationError("utility matrix row count does not match players");
        for (const auto& row : values) {
            if (row.size() != elections.size())
                throw ValidationError("utility matrix column count does not match elections");
            for (double v : row)
                if (!std::isfinite(v)) throw ValidationError("non-finite utility");
        }
    }
};

inline int encode_choice(const std::optional<Choice>& choice) {
    if (!choice) return 0;
    switch (*choice) {
        case Choice::For: return +1;
        case Choice::Against: return -1;
        case Choice::Abstain: return 0;
    }
    return 0;
}

// Multi-choice encoding: choice 0 -> +1, choice 1 -> -1, everything else -> 0.
inline int encode_choice(int choice_index, int arity) {
    if (arity < 2) throw ParameterError("election arity must be >= 2");
    if (choice_index < 0 || choice_index >= arity)
        throw ValidationError("choice index out of range for arity");
    if (choice_index == 0) return +1;
    if (choice_index == 1) return -1;
    return 0;
}

inline int encode_choice(const VoteRecord& r, int arity = 2) {
    if (r.choice) return encode_choice(r.choice);
    if (r.choice_index) {
        if (arity == 2 && *r.choice_index >= 2)
            throw ValidationError("choice index >= 2 in binary-mode election");
        return encode_choice(*r.choice_index, std::max(arity, 2));
    }
    return 0;
}

/// Builds the ternary vote-history matrix. Duplicate (voter, election) votes
/// resolve to the greatest timestamp; ties keep the later record in file order.
inline VoteMatrix build_vote_matrix(const std::vector<VoteRecord>& records,
                                    const std::vector<ElectionId>& elections,
                                    const std::vector<AccountId>& accounts,
                                    const std::map<ElectionId, int>& arities = {}) {
    std::map<ElectionId, std::size_t> ecol;
    for (std::size_t j = 0; j < elections.size(); ++j) ecol[elections[j]] = j;
    std::map<AccountId, std::size_t> arow;
    for (std::size_t i = 0; i < accounts.size(); ++i) arow[accounts[i]] = i;

    // winner[i][j] = (timestamp, file index) of the vote currently holding the cell
    struct Claim {
        std::int64_t ts;
        std::size_t file_index;
        bool taken = false;
    };
    std::vector<std::vector<Claim>> winner(accounts.size(), std::vector<Claim>(elections.size()));

    VoteMatrix m;
    m.accounts = accounts;
    m.elections = elections;
    m.rows.assign(accounts.size(), std::vector<double>(elections.size(), 0.0));

    for (std::size_t idx = 0; idx < records.size(); ++idx) {
        const VoteRecord& r = records[idx];
        auto ej = ecol.find(r.election);
        if (ej == ecol.end())
            throw ValidationError("vote references unknown election " + r.election);
        auto ai = arow.find(r.voter);
        if (ai == arow.end())
            throw ValidationError("vote references unknown account " + r.voter);

        std::int64_t ts = r.timestamp.value_or(0);
        Claim& c = winner[ai->second][ej->second];
        if (c.taken && (c.ts > ts || (c.ts == ts && c.file_index > idx))) continue;
        c = Claim{ts, idx, true};
        int arity = 2;
        if (auto it = arities.find(r.election); it != arities.end()) arity = it->second;
        m.rows[ai->second][ej->second] = static_cast<double>(encode_choice(r, arity));
    }
    return m;
}

/// Sum of balances per bloc, in bloc order.
inline std::vector<double> bloc_tokens(const Partition& partition, const TokenMap& tokens,
                                       bool lenient = false) {
    std::vector<double> masses;
    masses.reserve(partition.blocs.size());
    for (const auto& bloc : partition.blocs) {
        double mass = 0.0;
        for (const auto& acct : bloc) {
            auto it = tokens.balances.find(acct);
            if (it == tokens.balances.end()) {
                if (!lenient)
                    throw ValidationError("account " + acct + " in partition has no balance");
                continue;
            }
            mass += it->second;
        }
        masses.push_back(mass);
    }
    return masses;
}

/// True iff blocs are non-empty, pairwise disjoint, and cover exactly `universe`.
inline bool is_valid_partition(const Partition& partition, const std::set<AccountId>& universe) {
    std::set<AccountId> seen;
    for (const auto& bloc : partition.blocs) {
        if (bloc.empty()) return false;
        for (const auto& acct : bloc) {
            if (!seen.insert(acct).second) return false; // duplicate across blocs
        }
    }
    return seen == universe;
}

} // namespace vbe
