#pragma once

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "vbe/core.hpp"
#include "vbe/errors.hpp"

namespace vbe {

struct Dataset {
    std::vector<Election> proposals;
    std::vector<VoteRecord> votes;
    TokenMap balances;
    std::vector<std::string> provenance;
};

struct RowError {
    std::size_t line = 0; // 1-based, header included
    std::string reason;
};

struct VotesLoad {
    std::vector<VoteRecord> records;
    std::vector<RowError> rejected;
    std::size_t rows_in = 0;
};

struct ValidationReport {
    std::vector<std::string> warnings;
    bool clean() const { return warnings.empty(); }
};

enum class ExportDialect { offchain_snapshot_style, onchain_tally_style };

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

// Quote-aware CSV field splitter.
inline std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(field);
            field.clear();
        } else if (c != '\r') {
            field.push_back(c);
        }
    }
    out.push_back(field);
    return out;
}

inline std::optional<double> parse_double(const std::string& s) {
    const std::string t = trim(s);
    if (t.empty()) return std::nullopt;
    try {
        std::size_t pos = 0;
        double v = std::stod(t, &pos);
        if (pos != t.size()) return std::nullopt;
        return v;
    } catch (...) {
        return std::nullopt;
    }
}

inline std::optional<std::int64_t> parse_int(const std::string& s) {
    const std::string t = trim(s);
    if (t.empty()) return std::nullopt;
    try {
        std::size_t pos = 0;
        std::int64_t v = std::stoll(t, &pos);
        if (pos != t.size()) return std::nullopt;
        return v;
    } catch (...) {
        return std::nullopt;
    }
}

inline std::ifstream open_or_throw(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open file: " + path);
    return in;
}

inline std::map<std::string, std::size_t> header_index(const std::string& header_line,
                                                       const std::vector<std::string>& required,
                                                       const std::string& path) {
    auto fields = split_csv(header_line);
    std::map<std::string, std::size_t> idx;
    for (std::size_t i = 0; i < fields.size(); ++i) idx[lower(trim(fields[i]))] = i;
    for (const auto& col : required)
        if (!idx.count(col))
            throw ValidationError(path + ": missing required column '" + col + "'");
    return idx;
}

} // namespace detail

/// Versioned alias table for vote-choice labels. Unknown labels are errors,
/// never guessed.
inline std::optional<Choice> parse_choice_label(const std::string& raw) {
    static const std::map<std::string, Choice> aliases = {
        {"for", Choice::For},         {"yes", Choice::For},     {"yae", Choice::For},
        {"aye", Choice::For},         {"approve", Choice::For}, {"accept", Choice::For},
        {"in favor", Choice::For},    {"support", Choice::For},
        {"against", Choice::Against}, {"no", Choice::Against},  {"nay", Choice::Against},
        {"reject", Choice::Against},  {"deny", Choice::Against},{"oppose", Choice::Against},
        {"abstain", Choice::Abstain}, {"neutral", Choice::Abstain},
    };
    auto it = aliases.find(detail::lower(detail::trim(raw)));
    if (it == aliases.end()) return std::nullopt;
    return it->second;
}

/// votes.csv schema: proposal_id,voter,choice,voting_power,timestamp
inline VotesLoad load_votes_csv(const std::string& path) {
    auto in = detail::open_or_throw(path);
    std::string line;
    if (!std::getline(in, line)) throw ValidationError(path + ": empty file (no header)");
    auto idx = detail::header_index(line, {"proposal_id", "voter", "choice"}, path);

    VotesLoad load;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::trim(line).empty()) continue;
        ++load.rows_in;
        auto f = detail::split_csv(line);
        auto field = [&](const std::string& name) -> std::string {
            auto it = idx.find(name);
            if (it == idx.end() || it->second >= f.size()) return "";
            return detail::trim(f[it->second]);
        };

        VoteRecord r;
        r.election = field("proposal_id");
        r.voter = field("voter");
        if (r.election.empty() || r.voter.empty()) {
            load.rejected.push_back({lineno, "missing proposal_id or voter"});
            continue;
        }
        auto choice = parse_choice_label(field("choice"));
        if (!choice) {
            load.rejected.push_back({lineno, "unknown choice label '" + field("choice") + "'"});
            continue;
        }
        r.choice = choice;

        const std::string vp = field("voting_power");
        if (!vp.empty()) {
            auto v = detail::parse_double(vp);
            if (!v) {
                load.rejected.push_back({lineno, "unparseable voting_power '" + vp + "'"});
                continue;
            }
            if (*v < 0.0) {
                load.rejected.push_back({lineno, "negative voting_power"});
                continue;
            }
            r.voting_power = *v;
        }
        const std::string ts = field("timestamp");
        if (!ts.empty()) {
            auto t = detail::parse_int(ts);
            if (!t) {
                load.rejected.push_back({lineno, "unparseable timestamp '" + ts + "'"});
                continue;
            }
            r.timestamp = *t;
        }
        load.records.push_back(std::move(r));
    }
    return load;
}

/// balances.csv schema: address,balance. Duplicate addresses are summed
/// (case-insensitively after trimming); negatives are rejected row-by-row.
inline TokenMap load_balances_csv(const std::string& path,
                                  std::vector<RowError>* rejected = nullptr) {
    auto in = detail::open_or_throw(path);
    std::string line;
    if (!std::getline(in, line)) throw DegenerateDataError(path + ": empty balances file");
    auto idx = detail::header_index(line, {"address", "balance"}, path);

    TokenMap tokens;
    std::map<std::string, AccountId> canonical; // lowercase -> first-seen spelling
    std::size_t lineno = 1;
    auto reject = [&](std::size_t ln, const std::string& why) {
        if (rejected) rejected->push_back({ln, why});
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::trim(line).empty()) continue;
        auto f = detail::split_csv(line);
        if (f.size() <= std::max(idx["address"], idx["balance"])) {
            reject(lineno, "short row");
            continue;
        }
        AccountId addr = detail::trim(f[idx["address"]]);
        if (addr.empty()) {
            reject(lineno, "empty address");
            continue;
        }
        auto bal = detail::parse_double(f[idx["balance"]]);
        if (!bal) {
            reject(lineno, "unparseable balance");
            continue;
        }
        if (*bal < 0.0) {
            reject(lineno, "negative balance");
            continue;
        }
        std::string key = detail::lower(addr);
        auto [it, fresh] = canonical.emplace(key, addr);
        tokens.balances[it->second] += *bal;
        (void)fresh;
    }
    if (tokens.balances.empty()) throw DegenerateDataError(path + ": no usable balance rows");
    return tokens;
}

/// proposals.csv schema: proposal_id,ordinal,title,round_tag
inline std::vector<Election> load_proposals_csv(const std::string& path) {
    auto in = detail::open_or_throw(path);
    std::string line;
    if (!std::getline(in, line)) throw ValidationError(path + ": empty file (no header)");
    auto idx = detail::header_index(line, {"proposal_id", "ordinal"}, path);

    std::vector<Election> out;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::trim(line).empty()) continue;
        auto f = detail::split_csv(line);
        auto field = [&](const std::string& name) -> std::string {
            auto it = idx.find(name);
            if (it == idx.end() || it->second >= f.size()) return "";
            return detail::trim(f[it->second]);
        };
        Election e;
        e.id = field("proposal_id");
        auto ord = detail::parse_int(field("ordinal"));
        if (e.id.empty() || !ord)
            throw ValidationError(path + ": bad proposal row at line " + std::to_string(lineno));
        e.ordinal = static_cast<int>(*ord);
        e.title = field("title");
        auto tag = parse_round_tag(field("round_tag"));
        if (!tag)
            throw ValidationError(path + ": unknown round_tag at line " + std::to_string(lineno));
        e.round_tag = *tag;
        out.push_back(std::move(e));
    }
    return out;
}

/// Structured JSON exports shaped like the two common governance platforms.
/// offchain_snapshot_style: votes carry a 1-based choice index into the
/// proposal's choice-label list. onchain_tally_style: votes carry a support
/// value 0/1/2 meaning Against/For/Abstain.
inline Dataset load_platform_export(const std::string& path, ExportDialect dialect) {
    auto in = detail::open_or_throw(path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(path + ": invalid JSON: " + e.what());
    }
    if (!doc.is_object() || !doc.contains("proposals") || !doc.contains("votes"))
        throw ValidationError(path + ": unknown export layout (need proposals[] and votes[])");

    Dataset ds;
    ds.provenance.push_back(path);
    const RoundTag tag = dialect == ExportDialect::offchain_snapshot_style ? RoundTag::offchain
                                                                           : RoundTag::onchain;
    std::map<ElectionId, std::vector<std::string>> choice_labels;
    int ordinal = 0;
    for (const auto& p : doc["proposals"]) {
        Election e;
        e.id = p.value("id", std::string{});
        if (e.id.empty()) throw ValidationError(path + ": proposal without id");
        e.ordinal = p.contains("ordinal") ? p["ordinal"].get<int>() : ordinal;
        ++ordinal;
        e.title = p.value("title", std::string{});
        e.round_tag = tag;
        if (dialect == ExportDialect::offchain_snapshot_style) {
            if (!p.contains("choices"))
                throw ValidationError(path + ": snapshot-style proposal missing choices[]");
            auto labels = p["choices"].get<std::vector<std::string>>();
            e.arity = static_cast<int>(labels.size());
            choice_labels[e.id] = std::move(labels);
        }
        ds.proposals.push_back(std::move(e));
    }

    for (const auto& v : doc["votes"]) {
        VoteRecord r;
        if (dialect == ExportDialect::offchain_snapshot_style) {
            r.election = v.value("proposal", std::string{});
            r.voter = v.value("voter", std::string{});
            if (!v.contains("choice"))
                throw ValidationError(path + ": snapshot-style vote missing choice");
            int one_based = v["choice"].get<int>();
            auto it = choice_labels.find(r.election);
            if (it == choice_labels.end())
                throw ValidationError(path + ": vote references unknown proposal " + r.election);
            if (one_based < 1 || one_based > static_cast<int>(it->second.size()))
                throw ValidationError(path + ": choice index out of range for proposal " +
                                      r.election);
            auto choice = parse_choice_label(it->second[static_cast<std::size_t>(one_based - 1)]);
            if (!choice)
                throw ValidationError(path + ": unmappable choice label '" +
                                      it->second[static_cast<std::size_t>(one_based - 1)] + "'");
            r.choice = choice;
            if (v.contains("vp")) r.voting_power = v["vp"].get<double>();
            if (v.contains("created")) r.timestamp = v["created"].get<std::int64_t>();
        } else {
            r.election = v.value("proposalId", std::string{});
            r.voter = v.value("voter", std::string{});
            if (!v.contains("support"))
                throw ValidationError(path + ": tally-style vote missing support");
            int support = v["support"].get<int>();
            switch (support) {
                case 0: r.choice = Choice::Against; break;
                case 1: r.choice = Choice::For; break;
                case 2: r.choice = Choice::Abstain; break;
                default:
                    throw ValidationError(path + ": unknown support value " +
                                          std::to_string(support));
            }
            if (v.contains("weight")) {
                if (v["weight"].is_string()) {
                    auto w = detail::parse_double(v["weight"].get<std::string>());
                    if (!w) throw ValidationError(path + ": unparseable vote weight");
                    r.voting_power = *w;
                } else {
                    r.voting_power = v["weight"].get<double>();
                }
            }
            if (v.contains("timestamp")) r.timestamp = v["timestamp"].get<std::int64_t>();
        }
        if (r.election.empty() || r.voter.empty())
            throw ValidationError(path + ": vote missing proposal or voter");
        ds.votes.push_back(std::move(r));
    }
    return ds;
}

/// Enforces referential integrity and canonicalizes the dataset in place.
/// Dangling proposal references are always fatal; voters missing from
/// balances are zero-filled with a warning in lenient mode and fatal otherwise.
inline ValidationReport validate_dataset(Dataset& ds, bool lenient) {
    ValidationReport report;
    ds.balances.validate();

    std::set<ElectionId> known;
    std::set<int> ordinals;
    std::vector<Election> sorted = ds.proposals;
    std::sort(sorted.begin(), sorted.end(),
              [](const Election& a, const Election& b) { return a.ordinal < b.ordinal; });
    for (const auto& e : sorted) {
        if (e.id.empty()) throw ValidationError("proposal with empty id");
        if (!known.insert(e.id).second) throw ValidationError("duplicate proposal id " + e.id);
        if (!ordinals.insert(e.ordinal).second)
            throw ValidationError("duplicate proposal ordinal " + std::to_string(e.ordinal));
        if (e.arity < 2 && !e.allocation)
            throw ValidationError("proposal " + e.id + " has arity < 2");
    }
    ds.proposals = std::move(sorted);

    std::map<std::string, AccountId> canonical; // lowercase -> spelling in balances
    for (const auto& [acct, _] : ds.balances.balances)
        canonical.emplace(detail::lower(detail::trim(acct)), acct);

    for (auto& v : ds.votes) {
        if (!known.count(v.election))
            throw ValidationError("vote references unknown proposal " + v.election);
        std::string key = detail::lower(detail::trim(v.voter));
        auto it = canonical.find(key);
        if (it == canonical.end()) {
            if (!lenient)
                throw ValidationError("voter " + v.voter + " has no balance entry");
            AccountId spelled = detail::trim(v.voter);
            ds.balances.balances[spelled] = 0.0;
            canonical.emplace(key, spelled);
            report.warnings.push_back("voter " + spelled + " zero-filled in balances");
            v.voter = spelled;
        } else {
            v.voter = it->second;
        }
    }
    return report;
}

} // namespace vbe
