#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "vbe/core.hpp"
#include "vbe/errors.hpp"
#include "vbe/random.hpp"

namespace vbe {

enum class DistanceKind { euclidean, cosine };

inline double distance(const std::vector<double>& a, const std::vector<double>& b,
                       DistanceKind kind) {
    if (a.size() != b.size()) throw ParameterError("distance: dimension mismatch");
    switch (kind) {
        case DistanceKind::euclidean: {
            double s = 0.0;
            for (std::size_t i = 0; i < a.size(); ++i) {
                double d = a[i] - b[i];
                s += d * d;
            }
            return std::sqrt(s);
        }
        case DistanceKind::cosine: {
            double dot = 0.0, na = 0.0, nb = 0.0;
            for (std::size_t i = 0; i < a.size(); ++i) {
                dot += a[i] * b[i];
                na += a[i] * a[i];
                nb += b[i] * b[i];
            }
            // A zero vector is maximally distant from everything by convention.
            if (na == 0.0 || nb == 0.0) return 1.0;
            return 1.0 - dot / (std::sqrt(na) * std::sqrt(nb));
        }
    }
    return 0.0;
}

struct KMeansConfig {
    int k = 3;
    std::uint64_t seed = 42;
    int max_iterations = 300;
    double tolerance = 1e-6;
    int n_init = 10;

    void validate() const {
        if (k < 1) throw ParameterError("kmeans k must be >= 1");
        if (max_iterations < 1) throw ParameterError("kmeans max_iterations must be >= 1");
        if (n_init < 1) throw ParameterError("kmeans n_init must be >= 1");
    }
};

struct ClusteringOutcome {
    Partition partition;
    std::vector<std::vector<double>> centroids;
    double inertia = 0.0;
    int iterations_run = 0;
    int effective_k = 0;                  // k after duplicate-row reduction
    std::vector<double> inertia_trace;    // inertia after each assignment step
    std::vector<int> assignments;         // per input row, in input order
};

namespace detail {

inline double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

struct LloydResult {
    std::vector<int> assignments;
    std::vector<std::vector<double>> centroids;
    double inertia = 0.0;
    int iterations = 0;
    std::vector<double> trace;
};

// One seeded k-means++ / Lloyd run over `rows`. Ties in nearest-centroid
// assignment break toward the lowest cluster index.
inline LloydResult lloyd_run(const std::vector<std::vector<double>>& rows, int k,
                             std::uint64_t seed, int max_iterations, double tolerance) {
    const std::size_t n = rows.size();
    std::mt19937_64 rng(seed);
    LloydResult res;

    // k-means++ seeding
    std::vector<std::vector<double>> centroids;
    centroids.reserve(static_cast<std::size_t>(k));
    centroids.push_back(rows[uniform_index(rng, n)]);
    std::vector<double> d2(n);
    while (centroids.size() < static_cast<std::size_t>(k)) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& c : centroids) best = std::min(best, sq_dist(rows[i], c));
            d2[i] = best;
            total += best;
        }
        if (total == 0.0) {
            centroids.push_back(rows[uniform_index(rng, n)]);
            continue;
        }
        double target = uniform01(rng) * total;
        std::size_t pick = n - 1;
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            acc += d2[i];
            if (acc >= target) {
                pick = i;
                break;
            }
        }
        centroids.push_back(rows[pick]);
    }

    std::vector<int> assign(n, 0);
    for (int iter = 0; iter < max_iterations; ++iter) {
        // assignment step
        double inertia = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            int bi = 0;
            for (int c = 0; c < k; ++c) {
                double d = sq_dist(rows[i], centroids[static_cast<std::size_t>(c)]);
                if (d < best) {
                    best = d;
                    bi = c;
                }
            }
            assign[i] = bi;
            inertia += best;
        }

        // empty-cluster repair: reseed with the point farthest from its centroid
        std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
        for (std::size_t i = 0; i < n; ++i) counts[static_cast<std::size_t>(assign[i])]++;
        bool repaired = false;
        for (int c = 0; c < k; ++c) {
            if (counts[static_cast<std::size_t>(c)] > 0) continue;
            std::size_t far = 0;
            double fd = -1.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (counts[static_cast<std::size_t>(assign[i])] <= 1) continue;
                double d = sq_dist(rows[i], centroids[static_cast<std::size_t>(assign[i])]);
                if (d > fd) {
                    fd = d;
                    far = i;
                }
            }
            if (fd <= 0.0) continue; // nothing to steal; cluster stays empty
            counts[static_cast<std::size_t>(assign[far])]--;
            assign[far] = c;
            counts[static_cast<std::size_t>(c)] = 1;
            centroids[static_cast<std::size_t>(c)] = rows[far];
            repaired = true;
        }
        if (repaired) {
            inertia = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                inertia += sq_dist(rows[i], centroids[static_cast<std::size_t>(assign[i])]);
        }
        res.trace.push_back(inertia);
        res.iterations = iter + 1;

        // update step
        const std::size_t dim = rows[0].size();
        std::vector<std::vector<double>> next(static_cast<std::size_t>(k),
                                              std::vector<double>(dim, 0.0));
        std::vector<std::size_t> cnt(static_cast<std::size_t>(k), 0);
        for (std::size_t i = 0; i < n; ++i) {
            auto c = static_cast<std::size_t>(assign[i]);
            cnt[c]++;
            for (std::size_t j = 0; j < dim; ++j) next[c][j] += rows[i][j];
        }
        double shift = 0.0;
        for (std::size_t c = 0; c < static_cast<std::size_t>(k); ++c) {
            if (cnt[c] == 0) {
                next[c] = centroids[c];
                continue;
            }
            for (std::size_t j = 0; j < dim; ++j) next[c][j] /= static_cast<double>(cnt[c]);
            shift = std::max(shift, sq_dist(next[c], centroids[c]));
        }
        centroids = std::move(next);
        if (std::sqrt(shift) < tolerance) break;
    }

    // final assignment against the converged centroids
    double inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double best = std::numeric_limits<double>::infinity();
        int bi = 0;
        for (int c = 0; c < k; ++c) {
            double d = sq_dist(rows[i], centroids[static_cast<std::size_t>(c)]);
            if (d < best) {
                best = d;
                bi = c;
            }
        }
        assign[i] = bi;
        inertia += best;
    }
    if (res.trace.empty() || inertia < res.trace.back()) res.trace.push_back(inertia);
    res.assignments = std::move(assign);
    res.centroids = std::move(centroids);
    res.inertia = inertia;
    return res;
}

} // namespace detail

/// Lloyd iteration from k-means++ seeding over labeled rows; deterministic
/// given the seed, best of n_init restarts by inertia. Seeding operates on
/// rows sorted by account id, so input order does not change the result.
inline ClusteringOutcome cluster_rows(const std::vector<AccountId>& ids,
                                      const std::vector<std::vector<double>>& rows,
                                      const KMeansConfig& config) {
    config.validate();
    if (rows.empty()) throw ParameterError("kmeans: empty matrix");
    if (ids.size() != rows.size()) throw ParameterError("kmeans: ids/rows size mismatch");

    // canonical order by account id
    std::vector<std::size_t> order(rows.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return ids[a] < ids[b]; });
    std::vector<std::vector<double>> canon;
    canon.reserve(rows.size());
    for (std::size_t i : order) canon.push_back(rows[i]);

    std::set<std::vector<double>> distinct(canon.begin(), canon.end());
    const int k = static_cast<int>(
        std::min<std::size_t>(static_cast<std::size_t>(config.k), distinct.size()));

    detail::LloydResult best;
    bool have = false;
    for (int restart = 0; restart < config.n_init; ++restart) {
        auto run = detail::lloyd_run(canon, k, derive_seed(config.seed, static_cast<std::uint64_t>(restart)),
                                     config.max_iterations, config.tolerance);
        if (!have || run.inertia < best.inertia) {
            best = std::move(run);
            have = true;
        }
    }

    ClusteringOutcome out;
    out.effective_k = k;
    out.centroids = best.centroids;
    out.inertia = best.inertia;
    out.iterations_run = best.iterations;
    out.inertia_trace = best.trace;
    out.assignments.assign(rows.size(), 0);
    for (std::size_t pos = 0; pos < order.size(); ++pos)
        out.assignments[order[pos]] = best.assignments[pos];
    out.partition.blocs.assign(static_cast<std::size_t>(k), {});
    for (std::size_t pos = 0; pos < order.size(); ++pos)
        out.partition.blocs[static_cast<std::size_t>(best.assignments[pos])].push_back(
            ids[order[pos]]);
    // drop clusters that stayed empty after repair (duplicated rows < k)
    std::erase_if(out.partition.blocs, [](const auto& b) { return b.empty(); });
    return out;
}

inline ClusteringOutcome kmeans(const VoteMatrix& matrix, const KMeansConfig& config) {
    return cluster_rows(matrix.accounts, matrix.rows, config);
}

namespace detail {

inline std::string signature_of(const std::vector<double>& utilities, double epsilon) {
    std::string sig;
    sig.reserve(utilities.size());
    for (double u : utilities) {
        if (std::abs(u) <= epsilon)
            sig.push_back('0');
        else
            sig.push_back(u > 0.0 ? '+' : '-');
    }
    return sig;
}

} // namespace detail

/// Exact clustering by ternary per-election utility signature; the all-zero
/// signature bloc is the apathetic bloc. Satisfies both clustering assumptions
/// the transformation theorems rely on.
inline Partition signature_clustering(const UtilityMatrix& u, double epsilon) {
    if (epsilon < 0.0) throw ParameterError("epsilon must be >= 0");
    u.validate();
    Partition p;
    std::map<std::string, std::size_t> bloc_of;
    for (std::size_t i = 0; i < u.players.size(); ++i) {
        std::string sig = detail::signature_of(u.values[i], epsilon);
        auto it = bloc_of.find(sig);
        if (it == bloc_of.end()) {
            bloc_of.emplace(sig, p.blocs.size());
            p.blocs.push_back({u.players[i]});
            p.labels.push_back(sig);
        } else {
            p.blocs[it->second].push_back(u.players[i]);
        }
    }
    return p;
}

/// Players whose every election utility has magnitude <= epsilon (boundary inclusive).
inline std::set<AccountId> apathetic_set(const UtilityMatrix& u, double epsilon) {
    std::set<AccountId> out;
    for (std::size_t i = 0; i < u.players.size(); ++i) {
        bool all = true;
        for (double v : u.values[i])
            if (std::abs(v) > epsilon) {
                all = false;
                break;
            }
        if (all) out.insert(u.players[i]);
    }
    return out;
}

/// Inverse-popularity column weighting (smoothed idf analogue) followed by
/// row L2 normalization; zero rows are left zero.
inline std::vector<std::vector<double>> normalize_ballots(
    const std::vector<std::vector<double>>& ballots) {
    if (ballots.empty()) throw ParameterError("normalize_ballots: no ballots");
    const std::size_t m = ballots[0].size();
    bool any_nonzero = false;
    for (const auto& row : ballots) {
        if (row.size() != m) throw ParameterError("normalize_ballots: ragged matrix");
        for (double v : row) {
            if (v < 0.0) throw ValidationError("negative allocation entry");
            if (v > 0.0) any_nonzero = true;
        }
    }
    if (!any_nonzero) throw ValidationError("normalize_ballots: all-zero ballot matrix");

    const double big_r = static_cast<double>(ballots.size());
    std::vector<double> weight(m, 1.0);
    for (std::size_t j = 0; j < m; ++j) {
        double r_j = 0.0;
        for (const auto& row : ballots)
            if (row[j] > 0.0) r_j += 1.0;
        weight[j] = std::log((1.0 + big_r) / (1.0 + r_j)) + 1.0;
    }

    std::vector<std::vector<double>> out = ballots;
    for (auto& row : out) {
        double norm2 = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            row[j] *= weight[j];
            norm2 += row[j] * row[j];
        }
        if (norm2 > 0.0) {
            double inv = 1.0 / std::sqrt(norm2);
            for (double& v : row) v *= inv;
        }
    }
    return out;
}

/// K-means over popularity-normalized allocation ballots. Rows are unit-norm
/// after normalization, which makes euclidean and cosine orderings agree.
inline ClusteringOutcome cluster_ballots(const std::vector<AccountId>& ids,
                                         const std::vector<std::vector<double>>& ballots,
                                         const KMeansConfig& config,
                                         DistanceKind kind = DistanceKind::cosine) {
    (void)kind;
    return cluster_rows(ids, normalize_ballots(ballots), config);
}

} // namespace vbe
