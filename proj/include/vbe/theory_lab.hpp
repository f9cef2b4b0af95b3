#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "vbe/clustering.hpp"
#include "vbe/core.hpp"
#include "vbe/errors.hpp"
#include "vbe/ingestion.hpp"
#include "vbe/metrics.hpp"
#include "vbe/random.hpp"

namespace vbe {

/// A DAO with explicit latent utilities: the substrate for transformation
/// experiments. Quorum q is the strict threshold a bought outcome must cross.
struct SyntheticDao {
    std::vector<AccountId> players;
    TokenMap tokens;
    UtilityMatrix utilities;
    double epsilon = 0.05;
    double quorum = 0.5;

    double total_tokens() const { return tokens.total(); }
};

/// Min-entropy VBE of the DAO under exact signature clustering.
inline double dao_vbe(const SyntheticDao& dao) {
    Partition p = signature_clustering(dao.utilities, dao.epsilon);
    return min_entropy(p, dao.tokens);
}

inline double largest_bloc_mass(const SyntheticDao& dao) {
    Partition p = signature_clustering(dao.utilities, dao.epsilon);
    auto masses = bloc_tokens(p, dao.tokens);
    return *std::max_element(masses.begin(), masses.end());
}

struct TransformOutcome {
    SyntheticDao before;
    SyntheticDao after;
    std::string transform_name;
    double vbe_before = 0.0;
    double vbe_after = 0.0;
    double largest_bloc_before = 0.0;
    double largest_bloc_after = 0.0;
};

namespace detail {

inline TransformOutcome make_outcome(std::string name, SyntheticDao before, SyntheticDao after) {
    TransformOutcome out;
    out.transform_name = std::move(name);
    out.vbe_before = dao_vbe(before);
    out.vbe_after = dao_vbe(after);
    out.largest_bloc_before = largest_bloc_mass(before);
    out.largest_bloc_after = largest_bloc_mass(after);
    double t0 = before.total_tokens(), t1 = after.total_tokens();
    if (std::abs(t0 - t1) > 1e-9 * std::max(1.0, std::abs(t0)))
        throw ValidationError("transformation changed the total token supply");
    out.before = std::move(before);
    out.after = std::move(after);
    return out;
}

inline std::size_t player_index(const SyntheticDao& dao, const AccountId& player) {
    auto it = std::find(dao.players.begin(), dao.players.end(), player);
    if (it == dao.players.end()) throw ParameterError("unknown player " + player);
    return static_cast<std::size_t>(it - dao.players.begin());
}

} // namespace detail

enum class TokenDist { uniform, pareto };

/// Deterministic random DAO. The requested fraction of players is drawn
/// inside the epsilon-deadzone; everyone else gets per-election utilities
/// with magnitude strictly above epsilon.
inline SyntheticDao gen_random_dao(std::uint64_t seed, std::size_t n_players,
                                   std::size_t m_elections, TokenDist dist = TokenDist::uniform,
                                   double pareto_alpha = 1.16, double utility_scale = 10.0,
                                   double apathetic_fraction = 0.0, double epsilon = 0.05,
                                   double quorum = 0.5) {
    if (n_players < 1 || m_elections < 1)
        throw ParameterError("gen_random_dao needs n_players >= 1 and m_elections >= 1");
    if (apathetic_fraction < 0.0 || apathetic_fraction > 1.0)
        throw ParameterError("apathetic_fraction must lie in [0, 1]");
    if (dist == TokenDist::pareto && !(pareto_alpha > 0.0))
        throw ParameterError("pareto alpha must be > 0");
    if (!(utility_scale > epsilon)) throw ParameterError("utility_scale must exceed epsilon");

    std::mt19937_64 rng(derive_seed(seed, 0xda0));
    SyntheticDao dao;
    dao.epsilon = epsilon;
    dao.quorum = quorum;
    for (std::size_t i = 0; i < n_players; ++i) {
        std::ostringstream os;
        os << "p" << std::setw(4) << std::setfill('0') << i;
        dao.players.push_back(os.str());
    }
    for (const auto& p : dao.players) {
        double b = dist == TokenDist::uniform
                       ? uniform_in(rng, 0.1, 10.0)
                       : std::pow(1.0 - uniform01(rng), -1.0 / pareto_alpha); // xm = 1
        dao.tokens.balances[p] = b;
    }

    // deterministic shuffled subset of apathetic players
    std::vector<std::size_t> order(n_players);
    for (std::size_t i = 0; i < n_players; ++i) order[i] = i;
    for (std::size_t i = n_players; i > 1; --i)
        std::swap(order[i - 1], order[uniform_index(rng, i)]);
    auto apathetic_count =
        static_cast<std::size_t>(std::llround(apathetic_fraction * static_cast<double>(n_players)));
    std::set<std::size_t> apathetic(order.begin(),
                                    order.begin() + static_cast<std::ptrdiff_t>(apathetic_count));

    dao.utilities.players = dao.players;
    for (std::size_t j = 0; j < m_elections; ++j) dao.utilities.elections.push_back("e" + std::to_string(j));
    dao.utilities.values.assign(n_players, std::vector<double>(m_elections, 0.0));
    for (std::size_t i = 0; i < n_players; ++i) {
        for (std::size_t j = 0; j < m_elections; ++j) {
            if (apathetic.count(i)) {
                dao.utilities.values[i][j] = uniform_in(rng, -epsilon, epsilon);
            } else {
                double mag = epsilon + (utility_scale - epsilon) * uniform01(rng);
                dao.utilities.values[i][j] = uniform01(rng) < 0.5 ? mag : -mag;
            }
        }
    }
    return dao;
}

/// Sybil split: one player divides her tokens across new accounts that
/// inherit her utility row. Min-entropy VBE is invariant.
inline TransformOutcome t_mult(const SyntheticDao& dao, const AccountId& player,
                               const std::vector<double>& split) {
    std::size_t pi = detail::player_index(dao, player);
    double balance = dao.tokens.balances.at(player);
    double sum = 0.0;
    for (double s : split) {
        if (s < 0.0) throw ParameterError("negative split mass");
        sum += s;
    }
    if (std::abs(sum - balance) > 1e-9 * std::max(1.0, balance))
        throw ParameterError("split does not sum to the player's balance");

    SyntheticDao after = dao;
    after.tokens.balances[player] = 0.0;
    for (std::size_t s = 0; s < split.size(); ++s) {
        AccountId sybil = player + "#s" + std::to_string(s);
        after.players.push_back(sybil);
        after.tokens.balances[sybil] = split[s];
        after.utilities.players.push_back(sybil);
        after.utilities.values.push_back(dao.utilities.values[pi]);
    }
    return detail::make_outcome("t_mult", dao, std::move(after));
}

/// Apathy: the subset's utility rows collapse to zero (canonical deadzone point).
inline TransformOutcome t_apath(const SyntheticDao& dao, const std::set<AccountId>& subset) {
    SyntheticDao after = dao;
    for (const auto& p : subset) {
        std::size_t pi = detail::player_index(dao, p);
        std::fill(after.utilities.values[pi].begin(), after.utilities.values[pi].end(), 0.0);
    }
    return detail::make_outcome("t_apath", dao, std::move(after));
}

/// Delegation: apathetic players move their full balances to delegates.
inline TransformOutcome t_deleg(const SyntheticDao& dao, const std::set<AccountId>& apathetic_subset,
                                const std::map<AccountId, AccountId>& allocation) {
    std::set<AccountId> apathetic = apathetic_set(dao.utilities, dao.epsilon);
    for (const auto& p : apathetic_subset)
        if (!apathetic.count(p))
            throw ParameterError("delegating player " + p + " is not apathetic");
    SyntheticDao after = dao;
    for (const auto& p : apathetic_subset) {
        auto it = allocation.find(p);
        if (it == allocation.end()) throw ParameterError("no delegate for " + p);
        const AccountId& d = it->second;
        if (apathetic_subset.count(d)) throw ParameterError("delegate " + d + " is inside the delegating set");
        detail::player_index(dao, d);
        after.tokens.balances[d] += after.tokens.balances.at(p);
        after.tokens.balances[p] = 0.0;
    }
    return detail::make_outcome("t_deleg", dao, std::move(after));
}

namespace detail {

// Herding/bribery share the same utility flip: anyone not already strictly
// supporting the direction ends at |old| + epsilon toward it, the minimal
// change consistent with the cost bound.
inline void flip_toward(SyntheticDao& dao, const std::set<AccountId>& subset, bool toward_true) {
    for (const auto& p : subset) {
        std::size_t pi = player_index(dao, p);
        for (double& u : dao.utilities.values[pi]) {
            double signed_u = toward_true ? u : -u;
            if (signed_u > dao.epsilon) continue;
            double flipped = std::abs(u) + dao.epsilon;
            u = toward_true ? flipped : -flipped;
        }
    }
}

} // namespace detail

inline TransformOutcome t_herd(const SyntheticDao& dao, const std::set<AccountId>& subset,
                               bool toward_true = true) {
    SyntheticDao after = dao;
    detail::flip_toward(after, subset, toward_true);
    return detail::make_outcome("t_herd", dao, std::move(after));
}

inline TransformOutcome t_bribe(const SyntheticDao& dao, const std::set<AccountId>& subset,
                                bool toward_true = true) {
    SyntheticDao after = dao;
    detail::flip_toward(after, subset, toward_true);
    return detail::make_outcome("t_bribe", dao, std::move(after));
}

/// Slates: elections bundled into groups; per-slate utility is the sum of the
/// constituents. slate_partition holds election indices and must cover all.
inline TransformOutcome t_slates(const SyntheticDao& dao,
                                 const std::vector<std::vector<std::size_t>>& slate_partition) {
    const std::size_t m = dao.utilities.elections.size();
    std::vector<bool> covered(m, false);
    for (const auto& slate : slate_partition) {
        if (slate.empty()) throw ParameterError("empty slate");
        for (std::size_t e : slate) {
            if (e >= m || covered[e]) throw ParameterError("slate partition must cover each election once");
            covered[e] = true;
        }
    }
    if (std::find(covered.begin(), covered.end(), false) != covered.end())
        throw ParameterError("slate partition does not cover all elections");

    SyntheticDao after = dao;
    after.utilities.elections.clear();
    after.utilities.values.assign(dao.players.size(),
                                  std::vector<double>(slate_partition.size(), 0.0));
    for (std::size_t s = 0; s < slate_partition.size(); ++s) {
        after.utilities.elections.push_back("slate" + std::to_string(s));
        for (std::size_t i = 0; i < dao.players.size(); ++i) {
            double sum = 0.0;
            for (std::size_t e : slate_partition[s]) sum += dao.utilities.values[i][e];
            after.utilities.values[i][s] = sum;
        }
    }
    return detail::make_outcome("t_slates", dao, std::move(after));
}

/// Cost to flip one player toward `direction` in one election:
/// max(2 * (opposing utility magnitude) + epsilon, 0); aligned players are free.
inline double bribe_cost(const SyntheticDao& dao, const AccountId& player, std::size_t election,
                         bool toward_true = true) {
    std::size_t pi = detail::player_index(dao, player);
    if (election >= dao.utilities.elections.size()) throw ParameterError("election index out of range");
    double u = dao.utilities.values[pi][election];
    double signed_u = toward_true ? u : -u;
    return std::max(-2.0 * signed_u + dao.epsilon, 0.0);
}

/// Master Theorem check: with totals equal, the largest-bloc ordering and the
/// min-entropy VBE ordering must agree (strictness included).
inline bool check_master(const TransformOutcome& outcome, double tolerance = 1e-9) {
    double t0 = outcome.before.total_tokens(), t1 = outcome.after.total_tokens();
    if (std::abs(t0 - t1) > 1e-9 * std::max(1.0, std::abs(t0)))
        throw ValidationError("check_master precondition: token totals differ");
    double d_mass = (outcome.largest_bloc_after - outcome.largest_bloc_before) / t0;
    double d_vbe = outcome.vbe_before - outcome.vbe_after;
    auto sign = [tolerance](double x) { return x > tolerance ? 1 : (x < -tolerance ? -1 : 0); };
    return sign(d_mass) == sign(d_vbe);
}

namespace detail {

struct BriberySides {
    double support = 0.0;               // mass already voting toward the direction
    std::vector<std::size_t> bribable;  // player indices that are not
};

inline BriberySides bribery_sides(const SyntheticDao& dao, std::size_t election, bool toward_true,
                                  std::optional<std::size_t> briber = std::nullopt) {
    BriberySides sides;
    for (std::size_t i = 0; i < dao.players.size(); ++i) {
        double u = dao.utilities.values[i][election];
        double signed_u = toward_true ? u : -u;
        bool aligned = signed_u > dao.epsilon;
        if (aligned || (briber && *briber == i)) {
            sides.support += dao.tokens.balances.at(dao.players[i]);
        } else {
            sides.bribable.push_back(i);
        }
    }
    return sides;
}

} // namespace detail

enum class SearchMode { brute_force, greedy };

/// Minimum total token mass an internal briber must buy so that
/// support + bribed mass strictly exceeds quorum * total. nullopt = infeasible.
inline std::optional<double> min_bribe_tokens_internal(const SyntheticDao& dao, std::size_t election,
                                                       const AccountId& briber, SearchMode mode,
                                                       bool toward_true = true) {
    std::size_t bi = detail::player_index(dao, briber);
    auto sides = detail::bribery_sides(dao, election, toward_true, bi);
    const double need = dao.quorum * dao.total_tokens();
    if (sides.support > need) return 0.0;

    std::vector<double> masses;
    for (std::size_t i : sides.bribable) masses.push_back(dao.tokens.balances.at(dao.players[i]));
    double all = sides.support;
    for (double m : masses) all += m;
    if (!(all > need)) return std::nullopt;

    if (mode == SearchMode::greedy) {
        std::sort(masses.begin(), masses.end(), std::greater<double>());
        double acc = sides.support, bought = 0.0;
        for (double m : masses) {
            acc += m;
            bought += m;
            if (acc > need) return bought;
        }
        return std::nullopt;
    }

    if (masses.size() > 20) throw ParameterError("brute force limited to <= 20 bribable players");
    double best = std::numeric_limits<double>::infinity();
    const std::uint32_t subsets = 1u << masses.size();
    for (std::uint32_t s = 0; s < subsets; ++s) {
        double mass = 0.0;
        for (std::size_t i = 0; i < masses.size(); ++i)
            if (s & (1u << i)) mass += masses[i];
        if (sides.support + mass > need) best = std::min(best, mass);
    }
    return best;
}

/// Minimum number of players an external entity must corrupt for a strict
/// quorum majority. nullopt = infeasible.
inline std::optional<int> min_bribe_players_external(const SyntheticDao& dao, std::size_t election,
                                                     SearchMode mode, bool toward_true = true) {
    auto sides = detail::bribery_sides(dao, election, toward_true);
    const double need = dao.quorum * dao.total_tokens();
    if (sides.support > need) return 0;

    std::vector<double> masses;
    for (std::size_t i : sides.bribable) masses.push_back(dao.tokens.balances.at(dao.players[i]));
    double all = sides.support;
    for (double m : masses) all += m;
    if (!(all > need)) return std::nullopt;

    if (mode == SearchMode::greedy) {
        std::sort(masses.begin(), masses.end(), std::greater<double>());
        double acc = sides.support;
        int count = 0;
        for (double m : masses) {
            acc += m;
            ++count;
            if (acc > need) return count;
        }
        return std::nullopt;
    }

    if (masses.size() > 20) throw ParameterError("brute force limited to <= 20 bribable players");
    int best = static_cast<int>(masses.size()) + 1;
    const std::uint32_t subsets = 1u << masses.size();
    for (std::uint32_t s = 0; s < subsets; ++s) {
        double mass = 0.0;
        int count = 0;
        for (std::size_t i = 0; i < masses.size(); ++i)
            if (s & (1u << i)) {
                mass += masses[i];
                ++count;
            }
        if (sides.support + mass > need) best = std::min(best, count);
    }
    return best;
}

/// True iff the player's relative weight grows under quadratic voting.
inline bool qv_benefit(const AccountId& player, const TokenMap& tokens) {
    double total = 0.0, total_sqrt = 0.0;
    for (const auto& [_, b] : tokens.balances) {
        total += b;
        total_sqrt += std::sqrt(b);
    }
    if (!(total > 0.0)) throw DegenerateDataError("qv_benefit over zero-total distribution");
    auto it = tokens.balances.find(player);
    if (it == tokens.balances.end()) throw ParameterError("unknown player " + player);
    return it->second / total < std::sqrt(it->second) / total_sqrt;
}

/// Maximum fraction of total voting weight a briber controls with the given
/// budget; weight is tokens or sqrt(tokens) per the quadratic flag.
inline double controlled_fraction(const SyntheticDao& dao, std::size_t election, double budget,
                                  bool quadratic, SearchMode mode, bool toward_true = true) {
    if (budget < 0.0) throw ParameterError("budget must be >= 0");
    auto sides = detail::bribery_sides(dao, election, toward_true);

    auto weight_of = [&](std::size_t i) {
        double b = dao.tokens.balances.at(dao.players[i]);
        return quadratic ? std::sqrt(b) : b;
    };
    double total_weight = 0.0;
    for (std::size_t i = 0; i < dao.players.size(); ++i) total_weight += weight_of(i);
    if (!(total_weight > 0.0)) throw DegenerateDataError("zero total voting weight");

    double aligned_weight = 0.0;
    {
        std::set<std::size_t> bribable(sides.bribable.begin(), sides.bribable.end());
        for (std::size_t i = 0; i < dao.players.size(); ++i)
            if (!bribable.count(i)) aligned_weight += weight_of(i);
    }

    std::vector<double> costs, weights;
    for (std::size_t i : sides.bribable) {
        costs.push_back(bribe_cost(dao, dao.players[i], election, toward_true));
        weights.push_back(weight_of(i));
    }

    double best = 0.0;
    if (mode == SearchMode::greedy) {
        std::vector<std::size_t> order(costs.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            bool fa = costs[a] == 0.0, fb = costs[b] == 0.0;
            if (fa != fb) return fa;
            return weights[a] / std::max(costs[a], 1e-300) > weights[b] / std::max(costs[b], 1e-300);
        });
        double spent = 0.0;
        for (std::size_t i : order) {
            if (spent + costs[i] > budget) continue;
            spent += costs[i];
            best += weights[i];
        }
    } else {
        if (costs.size() > 20) throw ParameterError("brute force limited to <= 20 bribable players");
        const std::uint32_t subsets = 1u << costs.size();
        for (std::uint32_t s = 0; s < subsets; ++s) {
            double cost = 0.0, w = 0.0;
            for (std::size_t i = 0; i < costs.size(); ++i)
                if (s & (1u << i)) {
                    cost += costs[i];
                    w += weights[i];
                }
            if (cost <= budget) best = std::max(best, w);
        }
    }
    return (aligned_weight + best) / total_weight;
}

// --- randomized theorem verification ---------------------------------------

enum class Theorem {
    sybil,
    apathy,
    delegation,
    herding,
    slates,
    bribery,
    internal_bribery,
    external_bribery,
    quadratic
};

inline std::optional<Theorem> parse_theorem(const std::string& name) {
    static const std::map<std::string, Theorem> names = {
        {"sybil", Theorem::sybil},
        {"apathy", Theorem::apathy},
        {"delegation", Theorem::delegation},
        {"herding", Theorem::herding},
        {"slates", Theorem::slates},
        {"bribery", Theorem::bribery},
        {"internal_bribery", Theorem::internal_bribery},
        {"external_bribery", Theorem::external_bribery},
        {"quadratic", Theorem::quadratic},
    };
    auto it = names.find(name);
    if (it == names.end()) return std::nullopt;
    return it->second;
}

inline std::string to_string(Theorem t) {
    switch (t) {
        case Theorem::sybil: return "sybil";
        case Theorem::apathy: return "apathy";
        case Theorem::delegation: return "delegation";
        case Theorem::herding: return "herding";
        case Theorem::slates: return "slates";
        case Theorem::bribery: return "bribery";
        case Theorem::internal_bribery: return "internal_bribery";
        case Theorem::external_bribery: return "external_bribery";
        case Theorem::quadratic: return "quadratic";
    }
    return "unknown";
}

struct VerificationReport {
    Theorem theorem = Theorem::sybil;
    int trials = 0;
    int passes = 0;
    std::vector<std::string> counterexamples; // capped

    bool all_passed() const { return passes == trials; }

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["theorem"] = vbe::to_string(theorem);
        j["trials"] = trials;
        j["passes"] = passes;
        j["counterexamples"] = counterexamples;
        return j;
    }
};

namespace detail {

inline std::set<AccountId> union_of_random_blocs(const SyntheticDao& dao, std::mt19937_64& rng) {
    Partition p = signature_clustering(dao.utilities, dao.epsilon);
    std::set<AccountId> subset;
    for (const auto& bloc : p.blocs)
        if (uniform01(rng) < 0.5)
            for (const auto& a : bloc) subset.insert(a);
    return subset;
}

// Boosts the apathetic bloc until it is the heaviest bloc, with slack.
inline void make_inactivity_whale_dominant(SyntheticDao& dao, double slack_factor) {
    Partition p = signature_clustering(dao.utilities, dao.epsilon);
    auto masses = bloc_tokens(p, dao.tokens);
    std::set<AccountId> apathetic = apathetic_set(dao.utilities, dao.epsilon);
    double apathetic_mass = 0.0, max_other = 0.0;
    for (std::size_t b = 0; b < p.blocs.size(); ++b) {
        bool is_apathetic = apathetic.count(p.blocs[b].front()) > 0;
        if (is_apathetic)
            apathetic_mass = masses[b];
        else
            max_other = std::max(max_other, masses[b]);
    }
    double target = max_other * slack_factor + 1.0;
    if (apathetic_mass < target) {
        const AccountId& boost = *apathetic.begin();
        dao.tokens.balances[boost] += target - apathetic_mass;
    }
}

// m = 1 bribery instance: a strictly-largest supporting bloc that still sits
// below quorum, plus opposed and deadzone blocs. Bloc masses are constructed
// directly (support in (0.36, 0.46) of total, the rest split so neither
// remaining bloc overtakes support), then player balances are rescaled per
// bloc to hit those targets.
inline SyntheticDao gen_bribery_instance(std::uint64_t seed, std::size_t n) {
    std::mt19937_64 rng(derive_seed(seed, 0xb1b));
    SyntheticDao dao;
    dao.epsilon = 0.1;
    dao.quorum = 0.5;
    dao.utilities.elections = {"e0"};

    std::vector<int> bloc(n); // 0 = support, 1 = opposed, 2 = deadzone
    for (std::size_t i = 0; i < n; ++i) bloc[i] = i < 3 ? static_cast<int>(i) : static_cast<int>(uniform_index(rng, 3));
    for (std::size_t i = 0; i < n; ++i) {
        dao.players.push_back("p" + std::to_string(100 + i));
        double u = bloc[i] == 0 ? uniform_in(rng, 0.2, 5.0)
                                : (bloc[i] == 1 ? uniform_in(rng, -5.0, -0.2)
                                                : uniform_in(rng, -0.05, 0.05));
        dao.utilities.values.push_back({u});
        dao.tokens.balances[dao.players[i]] = uniform_in(rng, 1.0, 10.0);
    }
    dao.utilities.players = dao.players;

    // target shares: support largest but under quorum; the split of the
    // remainder keeps both other blocs strictly smaller than support
    double support_share = uniform_in(rng, 0.36, 0.46);
    double rest = 1.0 - support_share;
    double opposed_share = rest / 2.0 + uniform_in(rng, -0.03, 0.03);
    std::vector<double> target = {support_share, opposed_share, rest - opposed_share};

    std::vector<double> raw(3, 0.0);
    for (std::size_t i = 0; i < n; ++i) raw[bloc[i]] += dao.tokens.balances.at(dao.players[i]);
    const double scale_total = 100.0;
    for (std::size_t i = 0; i < n; ++i) {
        double& b = dao.tokens.balances.at(dao.players[i]);
        b = b / raw[bloc[i]] * target[bloc[i]] * scale_total;
    }
    return dao;
}

inline std::string describe_failure(const TransformOutcome& o) {
    std::ostringstream os;
    os.precision(17);
    os << o.transform_name << ": vbe " << o.vbe_before << " -> " << o.vbe_after << ", largest bloc "
       << o.largest_bloc_before << " -> " << o.largest_bloc_after;
    return os.str();
}

} // namespace detail

/// Runs seeded random trials of one theorem; preconditions are enforced by
/// generator construction. Failures are reported, not thrown.
inline VerificationReport verify_theorem(Theorem theorem, int trials, std::uint64_t seed) {
    if (trials < 1) throw ParameterError("trials must be >= 1");
    VerificationReport report;
    report.theorem = theorem;
    report.trials = trials;

    auto record = [&](bool ok, const std::string& why) {
        if (ok)
            ++report.passes;
        else if (report.counterexamples.size() < 5)
            report.counterexamples.push_back(why);
    };

    for (int t = 0; t < trials; ++t) {
        std::uint64_t trial_seed = derive_seed(seed, static_cast<std::uint64_t>(t));
        std::mt19937_64 rng(trial_seed);

        switch (theorem) {
            case Theorem::sybil: {
                auto dao = gen_random_dao(trial_seed, 6 + uniform_index(rng, 15),
                                          1 + uniform_index(rng, 4), TokenDist::uniform, 1.16, 10.0,
                                          uniform01(rng) * 0.4);
                AccountId player = dao.players[uniform_index(rng, dao.players.size())];
                double balance = dao.tokens.balances.at(player);
                std::size_t parts = 2 + uniform_index(rng, 5);
                std::vector<double> split(parts, 0.0);
                double acc = 0.0;
                for (std::size_t i = 0; i + 1 < parts; ++i) {
                    split[i] = (balance - acc) * uniform01(rng);
                    acc += split[i];
                }
                split[parts - 1] = balance - acc;
                auto out = t_mult(dao, player, split);
                bool ok = std::abs(out.vbe_after - out.vbe_before) <= 1e-12 && check_master(out);
                record(ok, detail::describe_failure(out));
                break;
            }
            case Theorem::apathy: {
                auto dao = gen_random_dao(trial_seed, 6 + uniform_index(rng, 15),
                                          1 + uniform_index(rng, 4), TokenDist::uniform, 1.16, 10.0,
                                          0.1 + uniform01(rng) * 0.4);
                detail::make_inactivity_whale_dominant(dao, 1.0);
                std::set<AccountId> subset;
                for (const auto& p : dao.players)
                    if (uniform01(rng) < 0.4) subset.insert(p);
                auto out = t_apath(dao, subset);
                bool ok = out.vbe_after <= out.vbe_before + 1e-12 && check_master(out);
                record(ok, detail::describe_failure(out));
                break;
            }
            case Theorem::delegation: {
                auto dao = gen_random_dao(trial_seed, 8 + uniform_index(rng, 15),
                                          1 + uniform_index(rng, 4), TokenDist::uniform, 1.16, 10.0,
                                          0.3 + uniform01(rng) * 0.4);
                detail::make_inactivity_whale_dominant(dao, 2.0);
                std::set<AccountId> apathetic = apathetic_set(dao.utilities, dao.epsilon);
                std::vector<AccountId> actives;
                for (const auto& p : dao.players)
                    if (!apathetic.count(p)) actives.push_back(p);
                if (actives.empty()) { // all-apathetic draw; delegation undefined
                    record(true, "");
                    break;
                }
                std::vector<AccountId> delegates;
                std::size_t nd = 1 + uniform_index(rng, std::min<std::size_t>(3, actives.size()));
                for (std::size_t i = 0; i < nd; ++i)
                    delegates.push_back(actives[uniform_index(rng, actives.size())]);

                Partition part = signature_clustering(dao.utilities, dao.epsilon);
                auto part_masses = bloc_tokens(part, dao.tokens);
                double apathetic_mass = 0.0, max_other = 0.0;
                for (std::size_t b = 0; b < part.blocs.size(); ++b) {
                    if (apathetic.count(part.blocs[b].front()))
                        apathetic_mass = part_masses[b];
                    else
                        max_other = std::max(max_other, part_masses[b]);
                }
                double budget = apathetic_mass - max_other; // keeps every delegate bloc under tokens(A)
                std::set<AccountId> subset;
                std::map<AccountId, AccountId> allocation;
                double moved = 0.0;
                for (const auto& p : apathetic) {
                    double b = dao.tokens.balances.at(p);
                    if (moved + b > budget) continue;
                    moved += b;
                    subset.insert(p);
                    allocation[p] = delegates[uniform_index(rng, delegates.size())];
                }
                auto out = t_deleg(dao, subset, allocation);
                bool ok = out.vbe_after >= out.vbe_before - 1e-12 && check_master(out);
                record(ok, detail::describe_failure(out));
                break;
            }
            case Theorem::herding:
            case Theorem::bribery: {
                auto dao = gen_random_dao(trial_seed, 6 + uniform_index(rng, 15),
                                          1 + uniform_index(rng, 4), TokenDist::uniform, 1.16, 10.0,
                                          uniform01(rng) * 0.4);
                // whole-bloc subsets: partial splits of a bloc are outside the
                // theorem's aligned-subset reading
                std::set<AccountId> subset = detail::union_of_random_blocs(dao, rng);
                auto out = theorem == Theorem::herding ? t_herd(dao, subset, true)
                                                       : t_bribe(dao, subset, true);
                bool ok = out.vbe_after <= out.vbe_before + 1e-12 && check_master(out);
                if (theorem == Theorem::bribery && ok) {
                    bool grew = out.largest_bloc_after >
                                out.largest_bloc_before + 1e-9 * out.before.total_tokens();
                    bool dropped = out.vbe_after < out.vbe_before - 1e-12;
                    ok = grew == dropped;
                }
                record(ok, detail::describe_failure(out));
                break;
            }
            case Theorem::slates: {
                // bloc archetypes with distinct sign patterns; identical rows
                // within a bloc keep slate sums bloc-consistent
                std::size_t m = 2 + uniform_index(rng, 5);
                std::size_t nb = 2 + uniform_index(rng, 4);
                std::set<std::string> seen;
                std::vector<std::vector<double>> archetypes;
                while (archetypes.size() < nb) {
                    std::vector<double> row(m);
                    std::string sig;
                    for (auto& u : row) {
                        double roll = uniform01(rng);
                        u = roll < 0.2 ? 0.0 : (roll < 0.6 ? uniform_in(rng, 0.2, 5.0)
                                                           : uniform_in(rng, -5.0, -0.2));
                        sig.push_back(u == 0.0 ? '0' : (u > 0.0 ? '+' : '-'));
                    }
                    if (seen.insert(sig).second) archetypes.push_back(std::move(row));
                }
                SyntheticDao dao;
                dao.epsilon = 0.1;
                std::size_t n = nb + uniform_index(rng, 12);
                for (std::size_t j = 0; j < m; ++j) dao.utilities.elections.push_back("e" + std::to_string(j));
                for (std::size_t i = 0; i < n; ++i) {
                    dao.players.push_back("p" + std::to_string(100 + i));
                    std::size_t a = i < nb ? i : uniform_index(rng, nb);
                    dao.utilities.values.push_back(archetypes[a]);
                    dao.tokens.balances[dao.players.back()] = uniform_in(rng, 0.5, 10.0);
                }
                dao.utilities.players = dao.players;

                std::size_t groups = 1 + uniform_index(rng, m);
                std::vector<std::vector<std::size_t>> slates(groups);
                for (std::size_t e = 0; e < m; ++e) slates[uniform_index(rng, groups)].push_back(e);
                std::erase_if(slates, [](const auto& s) { return s.empty(); });

                auto out = t_slates(dao, slates);
                bool ok = out.vbe_after <= out.vbe_before + 1e-12 && check_master(out);
                record(ok, detail::describe_failure(out));
                break;
            }
            case Theorem::internal_bribery:
            case Theorem::external_bribery: {
                auto dao = detail::gen_bribery_instance(trial_seed, 6 + uniform_index(rng, 7));
                auto sides = detail::bribery_sides(dao, 0, true);
                AccountId briber = dao.players[0]; // a supporter by construction

                SyntheticDao after = dao;
                bool identity = uniform01(rng) < 0.5;
                if (!identity) {
                    // bribe non-supporters to cross the quorum
                    std::vector<std::size_t> pool = sides.bribable;
                    for (std::size_t i = pool.size(); i > 1; --i)
                        std::swap(pool[i - 1], pool[uniform_index(rng, i)]);
                    double total = dao.total_tokens();
                    double acc = sides.support;
                    std::set<AccountId> bought;
                    for (std::size_t i : pool) {
                        bought.insert(dao.players[i]);
                        acc += dao.tokens.balances.at(dao.players[i]);
                        if (acc > dao.quorum * total) break;
                    }
                    detail::flip_toward(after, bought, true);
                }

                bool ok = false;
                std::ostringstream why;
                try {
                    double vbe0 = dao_vbe(dao), vbe1 = dao_vbe(after);
                    bool vbe_dropped = vbe1 < vbe0 - 1e-12;
                    if (theorem == Theorem::internal_bribery) {
                        auto n1 = min_bribe_tokens_internal(dao, 0, briber, SearchMode::brute_force);
                        auto n2 = min_bribe_tokens_internal(after, 0, briber, SearchMode::brute_force);
                        auto g1 = min_bribe_tokens_internal(dao, 0, briber, SearchMode::greedy);
                        bool bicond = n1 && n2 && ((*n1 > *n2 + 1e-12) == vbe_dropped);
                        bool greedy_ok = g1 && n1 && *g1 >= *n1 - 1e-12;
                        ok = bicond && greedy_ok;
                        if (!ok)
                            why << "internal n1=" << (n1 ? *n1 : -1.0) << " n2=" << (n2 ? *n2 : -1.0)
                                << " vbe " << vbe0 << "->" << vbe1;
                    } else {
                        auto n1 = min_bribe_players_external(dao, 0, SearchMode::brute_force);
                        auto n2 = min_bribe_players_external(after, 0, SearchMode::brute_force);
                        ok = n1 && n2 && ((*n1 > *n2) == vbe_dropped);
                        if (!ok)
                            why << "external n1=" << (n1 ? *n1 : -1) << " n2=" << (n2 ? *n2 : -1)
                                << " vbe " << vbe0 << "->" << vbe1;
                    }
                } catch (const std::exception& e) {
                    why << "exception: " << e.what();
                }
                record(ok, why.str());
                break;
            }
            case Theorem::quadratic: {
                std::size_t n = 5 + uniform_index(rng, 8);
                SyntheticDao dao;
                dao.epsilon = 0.1;
                dao.utilities.elections = {"e0"};
                for (std::size_t i = 0; i < n; ++i) {
                    dao.players.push_back("p" + std::to_string(100 + i));
                    double b = std::pow(1.0 - uniform01(rng), -1.0 / 1.2); // heavy tail
                    dao.tokens.balances[dao.players.back()] = b;
                }
                double total = 0.0, total_sqrt = 0.0;
                for (const auto& [_, b] : dao.tokens.balances) {
                    total += b;
                    total_sqrt += std::sqrt(b);
                }
                double cutoff = (total / total_sqrt) * (total / total_sqrt);
                std::vector<AccountId> small, large;
                for (const auto& p : dao.players) {
                    double b = dao.tokens.balances.at(p);
                    // a guard band around the cutoff keeps the benefit margin
                    // comfortably away from floating-point noise
                    if (b < cutoff * (1.0 - 1e-3))
                        small.push_back(p);
                    else if (b > cutoff * (1.0 + 1e-3))
                        large.push_back(p);
                }
                bool want_benefiting = uniform01(rng) < 0.5;
                const auto& pool = want_benefiting ? (small.empty() ? large : small)
                                                   : (large.empty() ? small : large);
                if (pool.empty()) { // every balance sits on the cutoff; skip
                    record(true, "");
                    break;
                }

                std::set<AccountId> controlled;
                controlled.insert(pool[uniform_index(rng, pool.size())]);
                for (const auto& p : pool)
                    if (uniform01(rng) < 0.5) controlled.insert(p);

                const double budget = 6.0 * dao.epsilon * static_cast<double>(n) + 1.0;
                dao.utilities.values.assign(n, {0.0});
                for (std::size_t i = 0; i < n; ++i) {
                    const AccountId& p = dao.players[i];
                    if (controlled.count(p))
                        dao.utilities.values[i][0] = uniform01(rng) < 0.5
                                                         ? uniform_in(rng, 0.2, 2.0) // votes true
                                                         : uniform_in(rng, 0.05, 0.1); // cheap deadzone
                    else
                        dao.utilities.values[i][0] = -budget; // cost 2*budget + eps, unaffordable
                }
                dao.utilities.players = dao.players;

                SyntheticDao quad = dao;
                for (std::size_t i = 0; i < n; ++i)
                    if (!controlled.count(dao.players[i]))
                        quad.utilities.values[i][0] *= 2.0; // changed, still unaffordable

                bool unchanged_benefiting_exists = false;
                for (const auto& p : controlled)
                    if (qv_benefit(p, dao.tokens)) unchanged_benefiting_exists = true;

                double f = controlled_fraction(dao, 0, budget, false, SearchMode::brute_force);
                double fq = controlled_fraction(quad, 0, budget, true, SearchMode::brute_force);
                bool ok = (f < fq - 1e-12) == unchanged_benefiting_exists;
                std::ostringstream why;
                why.precision(17);
                why << "quadratic f=" << f << " f'=" << fq << " exists="
                    << unchanged_benefiting_exists;
                record(ok, why.str());
                break;
            }
        }
    }
    return report;
}

/// Two synthetic voting rounds over the same population. Round 1 carries a
/// 70/30 faction split voting coherently, so the per-election plurality is
/// anchored to the majority faction; round 2 flips each vote dissenting from
/// the round-1 per-election plurality with probability collapse_strength,
/// which drifts minority voters into the majority bloc.
inline std::pair<Dataset, Dataset> gen_consensus_collapse_pair(std::uint64_t seed,
                                                               std::size_t n_players,
                                                               std::size_t m_elections,
                                                               double collapse_strength) {
    if (collapse_strength < 0.0 || collapse_strength > 1.0)
        throw ParameterError("collapse_strength must lie in [0, 1]");
    std::mt19937_64 rng(derive_seed(seed, 0xcc));

    Dataset round1, round2;
    for (std::size_t i = 0; i < n_players; ++i) {
        std::ostringstream os;
        os << "0x" << std::setw(4) << std::setfill('0') << i;
        double b = uniform_in(rng, 1.0, 100.0);
        round1.balances.balances[os.str()] = b;
    }
    round2.balances = round1.balances;

    std::vector<AccountId> voters;
    for (const auto& [a, _] : round1.balances.balances) voters.push_back(a);
    std::map<AccountId, bool> faction; // true = majority faction
    for (std::size_t i = 0; i < voters.size(); ++i) faction[voters[i]] = (i % 10 < 7);

    for (std::size_t j = 0; j < m_elections; ++j) {
        Election e1{"r1_p" + std::to_string(j), static_cast<int>(j), RoundTag::offchain, 2, false, ""};
        Election e2{"r2_p" + std::to_string(j), static_cast<int>(j), RoundTag::onchain, 2, false, ""};
        round1.proposals.push_back(e1);
        round2.proposals.push_back(e2);

        bool faction_a_favors = uniform01(rng) < 0.5;
        int for_count = 0, against_count = 0;
        std::vector<std::pair<AccountId, Choice>> cast;
        for (const auto& v : voters) {
            if (uniform01(rng) > 0.95) continue; // abstains by absence
            bool with_faction = uniform01(rng) < 0.9;
            bool favors = faction.at(v) == faction_a_favors ? with_faction : !with_faction;
            Choice c = favors ? Choice::For : Choice::Against;
            (c == Choice::For ? for_count : against_count)++;
            cast.emplace_back(v, c);
        }
        Choice plurality = against_count > for_count ? Choice::Against : Choice::For;
        for (const auto& [voter, choice] : cast) {
            VoteRecord r1;
            r1.election = e1.id;
            r1.voter = voter;
            r1.choice = choice;
            r1.timestamp = static_cast<std::int64_t>(j);
            round1.votes.push_back(r1);

            VoteRecord r2 = r1;
            r2.election = e2.id;
            if (choice != plurality && uniform01(rng) < collapse_strength) r2.choice = plurality;
            round2.votes.push_back(r2);
        }
    }
    round1.provenance.push_back("synthetic consensus-collapse round 1");
    round2.provenance.push_back("synthetic consensus-collapse round 2");
    return {std::move(round1), std::move(round2)};
}

} // namespace vbe
