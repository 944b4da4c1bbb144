#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "tubewire/util.hpp"

namespace tubewire::stats {

enum class Marker { pos_strong, pos, zero, neg, neg_strong };

std::string_view marker_symbol(Marker m);  // "+**", "+*", "0", "-*", "-**"

struct PermutationResult {
    double observed_delta = 0;
    int permutation_count = 0;
    // Fraction of permuted deltas at least as extreme as the observed one,
    // measured in the observed delta's direction.
    double tail_percentile = 0;
    Marker marker = Marker::zero;
    std::uint64_t seed = 0;

    bool significant_at(double tail_cutoff) const { return tail_percentile <= tail_cutoff; }
};

// Derives the marker from the tail against the 0.5% / 2.5% cutoffs.
Marker marker_from_tail(double observed_delta, double tail_percentile);

// Two-sided permutation test for a difference in group means. Labels are
// permuted P times; permutation i draws its shuffle from (seed, i), so the
// loop parallelizes without changing the result.
PermutationResult perm_test_mean_diff(std::span<const double> group_a, std::span<const double> group_b,
                                      int permutations = 10000, std::uint64_t seed = 1,
                                      int threads = 0);

// Pearson's r. Throws on n < 3, mismatched lengths, or zero variance.
double pearson(std::span<const double> x, std::span<const double> y);

// Spearman's rho with average ranks for ties.
double spearman(std::span<const double> x, std::span<const double> y);

// Average ranks (1-based) with ties sharing the mean of their positions.
std::vector<double> average_ranks(std::span<const double> values);

// Permutation significance of Spearman's rho; permutations shuffle one vector.
PermutationResult perm_test_correlation(std::span<const double> x, std::span<const double> y,
                                        int permutations = 10000, std::uint64_t seed = 1,
                                        int threads = 0);

struct RankDistanceResult {
    std::int64_t common_topic_count = 0;
    double distance = 0;  // root mean square rank gap over common topics
};

// Ranking: topic id -> rank (1 = most frequent).
using Ranking = std::map<std::string, double>;

// Ranks topics by descending count; ties broken by topic id, producing
// distinct integer ranks.
Ranking rank_by_frequency(const std::map<std::string, std::int64_t>& counts);

// Root-mean-square rank distance over the topics common to both rankings.
RankDistanceResult rank_distance(const Ranking& ranking_1, const Ranking& ranking_2);

struct ProportionTestResult {
    double chi_square = 0;
    bool significant_at_95 = false;
};

// 2x2 chi-square for equality of proportions, one degree of freedom.
ProportionTestResult two_proportion_test(std::int64_t k1, std::int64_t n1, std::int64_t k2,
                                         std::int64_t n2);

}  // namespace tubewire::stats
