#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "vbe/core.hpp"
#include "vbe/errors.hpp"

namespace vbe {

enum class MeasureKind { min_entropy, shannon, renyi };

struct EntropyMeasure {
    MeasureKind kind = MeasureKind::min_entropy;
    double alpha = 2.0;    // renyi only; alpha >= 0, alpha != 1
    bool normalize = false;

    static EntropyMeasure min_entropy(bool normalize = false) {
        return EntropyMeasure{MeasureKind::min_entropy, 0.0, normalize};
    }
    static EntropyMeasure shannon(bool normalize = false) {
        return EntropyMeasure{MeasureKind::shannon, 0.0, normalize};
    }
    static EntropyMeasure renyi(double alpha, bool normalize = false) {
        return EntropyMeasure{MeasureKind::renyi, alpha, normalize};
    }

    void validate() const {
        if (kind == MeasureKind::renyi) {
            if (!(alpha >= 0.0)) throw ParameterError("renyi alpha must be >= 0");
            if (alpha == 1.0) throw ParameterError("renyi alpha = 1 is shannon; use shannon");
        }
    }

    std::string name() const {
        switch (kind) {
            case MeasureKind::min_entropy: return "min_entropy";
            case MeasureKind::shannon: return "shannon";
            case MeasureKind::renyi: {
                std::ostringstream os;
                os << "renyi_" << alpha;
                return os.str();
            }
        }
        return "unknown";
    }
};

struct MetricReport {
    double vbe_value = 0.0;
    std::vector<double> bloc_shares; // nonzero shares, sum to 1
    EntropyMeasure measure;
    std::size_t bloc_count = 0;      // blocs with nonzero mass
    double largest_bloc_share = 0.0;
};

namespace detail {

// Nonzero shares of a mass vector. Throws when the total carries no signal.
inline std::vector<double> shares_of(const std::vector<double>& masses) {
    double total = 0.0;
    for (double m : masses) {
        if (!(m >= 0.0) || !std::isfinite(m)) throw ValidationError("negative or non-finite bloc mass");
        total += m;
    }
    if (!(total > 0.0)) throw DegenerateDataError("all bloc masses are zero");
    std::vector<double> shares;
    shares.reserve(masses.size());
    for (double m : masses)
        if (m > 0.0) shares.push_back(m / total);
    return shares;
}

inline double entropy_of_shares(const std::vector<double>& shares, const EntropyMeasure& measure) {
    measure.validate();
    if (shares.empty()) throw DegenerateDataError("empty share vector");
    double raw = 0.0;
    switch (measure.kind) {
        case MeasureKind::min_entropy: {
            double pmax = *std::max_element(shares.begin(), shares.end());
            raw = -std::log2(pmax);
            break;
        }
        case MeasureKind::shannon: {
            for (double p : shares) raw -= p * std::log2(p); // zero shares already dropped
            break;
        }
        case MeasureKind::renyi: {
            if (measure.alpha == 0.0) {
                raw = std::log2(static_cast<double>(shares.size()));
            } else {
                double s = 0.0;
                for (double p : shares) s += std::pow(p, measure.alpha);
                raw = std::log2(s) / (1.0 - measure.alpha);
            }
            break;
        }
    }
    if (measure.normalize && shares.size() >= 2) raw /= std::log2(static_cast<double>(shares.size()));
    return std::max(raw, 0.0);
}

} // namespace detail

inline double min_entropy(const Partition& partition, const TokenMap& tokens) {
    return detail::entropy_of_shares(detail::shares_of(bloc_tokens(partition, tokens)),
                                     EntropyMeasure::min_entropy());
}

inline double shannon_entropy(const Partition& partition, const TokenMap& tokens) {
    return detail::entropy_of_shares(detail::shares_of(bloc_tokens(partition, tokens)),
                                     EntropyMeasure::shannon());
}

inline double renyi_entropy(double alpha, const Partition& partition, const TokenMap& tokens) {
    return detail::entropy_of_shares(detail::shares_of(bloc_tokens(partition, tokens)),
                                     EntropyMeasure::renyi(alpha));
}

/// Token-weighted entropy of a partition under the selected measure.
inline MetricReport vbe(const Partition& partition, const TokenMap& tokens,
                        const EntropyMeasure& measure) {
    MetricReport report;
    report.measure = measure;
    report.bloc_shares = detail::shares_of(bloc_tokens(partition, tokens));
    report.bloc_count = report.bloc_shares.size();
    report.largest_bloc_share =
        *std::max_element(report.bloc_shares.begin(), report.bloc_shares.end());
    report.vbe_value = detail::entropy_of_shares(report.bloc_shares, measure);
    return report;
}

/// Entropy of the singleton-per-account partition; the upper bound for
/// min-entropy over any coarser partition of the same accounts.
inline double trivial_vbe(const TokenMap& tokens, const EntropyMeasure& measure) {
    std::vector<double> masses;
    masses.reserve(tokens.balances.size());
    for (const auto& [_, b] : tokens.balances) masses.push_back(b);
    return detail::entropy_of_shares(detail::shares_of(masses), measure);
}

/// Mean absolute pairwise difference normalized by 2 n^2 mu.
inline double gini(const TokenMap& tokens) {
    const std::size_t n = tokens.balances.size();
    if (n == 0) throw DegenerateDataError("gini of empty token map");
    std::vector<double> x;
    x.reserve(n);
    for (const auto& [_, b] : tokens.balances) x.push_back(b);
    double total = std::accumulate(x.begin(), x.end(), 0.0);
    if (!(total > 0.0)) throw DegenerateDataError("gini of zero-total distribution");

    // O(n log n) via sorted prefix sums; equals the pairwise-sum definition.
    std::sort(x.begin(), x.end());
    double cum = 0.0, weighted = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        weighted += static_cast<double>(i) * x[i] - cum; // sum_{j<i} (x_i - x_j)
        cum += x[i];
    }
    double mu = total / static_cast<double>(n);
    return 2.0 * weighted / (2.0 * static_cast<double>(n) * static_cast<double>(n) * mu);
}

/// Minimum number of accounts whose combined balance strictly exceeds
/// threshold * total (sort descending, accumulate).
inline int nakamoto(const TokenMap& tokens, double threshold = 0.5) {
    if (!(threshold > 0.0) || !(threshold < 1.0))
        throw ParameterError("nakamoto threshold must lie in (0, 1)");
    std::vector<double> x;
    x.reserve(tokens.balances.size());
    for (const auto& [_, b] : tokens.balances) x.push_back(b);
    double total = std::accumulate(x.begin(), x.end(), 0.0);
    if (!(total > 0.0)) throw DegenerateDataError("nakamoto of zero-total distribution");
    std::sort(x.begin(), x.end(), std::greater<double>());
    double acc = 0.0;
    int count = 0;
    for (double b : x) {
        acc += b;
        ++count;
        if (acc > threshold * total) return count;
    }
    return count; // unreachable for threshold < 1, kept for safety
}

} // namespace vbe
