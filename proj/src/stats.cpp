#include "tubewire/stats.hpp"

#include <atomic>
#include <cmath>
#include <numeric>
#include <random>

namespace tubewire::stats {

std::string_view marker_symbol(Marker m) {
    switch (m) {
        case Marker::pos_strong: return "+**";
        case Marker::pos: return "+*";
        case Marker::zero: return "0";
        case Marker::neg: return "-*";
        case Marker::neg_strong: return "-**";
    }
    return "0";
}

Marker marker_from_tail(double observed_delta, double tail_percentile) {
    if (tail_percentile <= 0.005)
        return observed_delta >= 0 ? Marker::pos_strong : Marker::neg_strong;
    if (tail_percentile <= 0.025)
        return observed_delta >= 0 ? Marker::pos : Marker::neg;
    return Marker::zero;
}

namespace {

void check_permutation_count(int permutations) {
    if (permutations < 100)
        throw ValidationError("permutation count below 100 is unstable");
}

PermutationResult finish(double delta, int permutations, std::uint64_t seed, std::int64_t extreme) {
    PermutationResult r;
    r.observed_delta = delta;
    r.permutation_count = permutations;
    r.seed = seed;
    r.tail_percentile = static_cast<double>(extreme) / static_cast<double>(permutations);
    r.marker = marker_from_tail(delta, r.tail_percentile);
    return r;
}

}  // namespace

PermutationResult perm_test_mean_diff(std::span<const double> group_a, std::span<const double> group_b,
                                      int permutations, std::uint64_t seed, int threads) {
    if (group_a.empty() || group_b.empty())
        throw ValidationError("perm_test_mean_diff requires two non-empty groups");
    check_permutation_count(permutations);

    const std::size_t na = group_a.size();
    const std::size_t n = na + group_b.size();
    std::vector<double> pooled(n);
    std::copy(group_a.begin(), group_a.end(), pooled.begin());
    std::copy(group_b.begin(), group_b.end(), pooled.begin() + static_cast<std::ptrdiff_t>(na));

    const double total = std::accumulate(pooled.begin(), pooled.end(), 0.0);
    double sum_a = 0;
    for (double v : group_a) sum_a += v;
    const double nb = static_cast<double>(n - na);
    const auto delta_from_sum = [&](double sa) {
        return sa / static_cast<double>(na) - (total - sa) / nb;
    };
    const double delta = delta_from_sum(sum_a);

    std::atomic<std::int64_t> extreme{0};
    parallel_chunks(static_cast<std::size_t>(permutations), threads,
                    [&](std::size_t begin, std::size_t end) {
                        std::vector<std::size_t> idx(n);
                        std::int64_t local = 0;
                        for (std::size_t p = begin; p < end; ++p) {
                            std::iota(idx.begin(), idx.end(), 0);
                            std::mt19937_64 rng(mix_seed(seed, p));
                            // Partial Fisher-Yates: only the first na slots matter.
                            double sa = 0;
                            for (std::size_t i = 0; i < na; ++i) {
                                std::uniform_int_distribution<std::size_t> pick(i, n - 1);
                                std::swap(idx[i], idx[pick(rng)]);
                                sa += pooled[idx[i]];
                            }
                            const double dp = delta_from_sum(sa);
                            if (delta >= 0 ? dp >= delta : dp <= delta) ++local;
                        }
                        extreme += local;
                    });
    return finish(delta, permutations, seed, extreme.load());
}

std::vector<double> average_ranks(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double shared = 0.5 * static_cast<double>(i + j) + 1.0;  // mean of positions, 1-based
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = shared;
        i = j + 1;
    }
    return ranks;
}

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        throw ValidationError("pearson: length mismatch");
    if (x.size() < 3)
        throw ValidationError("pearson: need at least 3 observations");
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0 || syy == 0)
        throw ValidationError("pearson: zero variance input");
    return sxy / std::sqrt(sxx * syy);
}

double spearman(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        throw ValidationError("spearman: length mismatch");
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    return pearson(rx, ry);
}

PermutationResult perm_test_correlation(std::span<const double> x, std::span<const double> y,
                                        int permutations, std::uint64_t seed, int threads) {
    check_permutation_count(permutations);
    const std::vector<double> rx = average_ranks(x);
    std::vector<double> ry = average_ranks(y);
    const double delta = pearson(rx, ry);  // Spearman of the raw inputs

    // Permuting y permutes its ranks, and rank means/variances are shuffle
    // invariant, so each permuted rho reduces to a dot product.
    const std::size_t n = rx.size();
    const double nn = static_cast<double>(n);
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += rx[i];
        my += ry[i];
    }
    mx /= nn;
    my /= nn;
    double sxx = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    const double denom = std::sqrt(sxx * syy);

    std::atomic<std::int64_t> extreme{0};
    parallel_chunks(static_cast<std::size_t>(permutations), threads,
                    [&](std::size_t begin, std::size_t end) {
                        std::vector<double> perm(ry.size());
                        std::int64_t local = 0;
                        for (std::size_t p = begin; p < end; ++p) {
                            std::copy(ry.begin(), ry.end(), perm.begin());
                            std::mt19937_64 rng(mix_seed(seed, p));
                            std::shuffle(perm.begin(), perm.end(), rng);
                            double dot = 0;
                            for (std::size_t i = 0; i < n; ++i) dot += rx[i] * perm[i];
                            const double dp = (dot - nn * mx * my) / denom;
                            if (delta >= 0 ? dp >= delta : dp <= delta) ++local;
                        }
                        extreme += local;
                    });
    return finish(delta, permutations, seed, extreme.load());
}

Ranking rank_by_frequency(const std::map<std::string, std::int64_t>& counts) {
    std::vector<const std::pair<const std::string, std::int64_t>*> order;
    order.reserve(counts.size());
    for (const auto& kv : counts) order.push_back(&kv);
    std::sort(order.begin(), order.end(), [](const auto* a, const auto* b) {
        if (a->second != b->second) return a->second > b->second;
        return a->first < b->first;
    });
    Ranking ranking;
    for (std::size_t i = 0; i < order.size(); ++i)
        ranking[order[i]->first] = static_cast<double>(i + 1);
    return ranking;
}

RankDistanceResult rank_distance(const Ranking& ranking_1, const Ranking& ranking_2) {
    RankDistanceResult r;
    double sum_sq = 0;
    for (const auto& [topic, rank1] : ranking_1) {
        auto it = ranking_2.find(topic);
        if (it == ranking_2.end()) continue;
        const double gap = std::abs(rank1 - it->second);
        sum_sq += gap * gap;
        ++r.common_topic_count;
    }
    if (r.common_topic_count == 0)
        throw ValidationError("rank_distance: no common topics");
    r.distance = std::sqrt(sum_sq / static_cast<double>(r.common_topic_count));
    return r;
}

ProportionTestResult two_proportion_test(std::int64_t k1, std::int64_t n1, std::int64_t k2,
                                         std::int64_t n2) {
    if (n1 < 1 || n2 < 1)
        throw ValidationError("two_proportion_test: empty group");
    if (k1 < 0 || k1 > n1 || k2 < 0 || k2 > n2)
        throw ValidationError("two_proportion_test: k outside [0, n]");
    const double a = static_cast<double>(k1), b = static_cast<double>(n1 - k1);
    const double c = static_cast<double>(k2), d = static_cast<double>(n2 - k2);
    const double n = a + b + c + d;
    const double col1 = a + c, col2 = b + d, row1 = a + b, row2 = c + d;
    if (col1 == 0 || col2 == 0)
        throw ValidationError("two_proportion_test: degenerate table");
    ProportionTestResult r;
    const double det = a * d - b * c;
    r.chi_square = n * det * det / (row1 * row2 * col1 * col2);
    // 0.95 quantile of chi-square with 1 df.
    r.significant_at_95 = r.chi_square > 3.8414588206941245;
    return r;
}

}  // namespace tubewire::stats
