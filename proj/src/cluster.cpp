#include "tubewire/cluster.hpp"

#include <cmath>
#include <fstream>
#include <numeric>

namespace tubewire::cluster {

namespace {

double cosine(const profiles::CategoryVector& a, const profiles::CategoryVector& b) {
    double dot = 0, na = 0, nb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0 || nb == 0)
        throw ValidationError("cosine similarity of a zero vector");
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

struct ActiveCluster {
    std::vector<std::size_t> members;  // indices into the input
    std::string rep;                   // smallest member user id
    bool alive = true;
};

}  // namespace

ClusterReport cluster_users(const std::vector<CategoryDistribution>& distributions,
                            const std::vector<std::string>& bios, const FeatureMatrix& features,
                            const ClusterOptions& options) {
    const std::size_t n = distributions.size();
    if (options.k < 1)
        throw ValidationError("cluster_users: k must be positive");
    if (n < static_cast<std::size_t>(options.k))
        throw ValidationError("cluster_users: fewer eligible users (" + std::to_string(n) +
                              ") than clusters (" + std::to_string(options.k) + ")");
    if (bios.size() != n)
        throw ValidationError("cluster_users: bios misaligned with distributions");
    for (const auto& [name, column] : features)
        if (column.size() != n)
            throw ValidationError("cluster_users: feature column misaligned: " + name);

    // pairwise similarities, then UPGMA-style merging on the similarity matrix
    std::vector<double> sim(n * n, 0.0);
    parallel_chunks(n, options.threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j)
                    sim[i * n + j] = cosine(distributions[i].weights, distributions[j].weights);
    });

    ClusterReport report;
    if (n > 1) {
        double lo = 2, hi = -2;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                lo = std::min(lo, sim[i * n + j]);
                hi = std::max(hi, sim[i * n + j]);
            }
        report.degenerate_similarity = hi - lo < 1e-12;
    }

    std::vector<ActiveCluster> clusters(n);
    for (std::size_t i = 0; i < n; ++i) {
        clusters[i].members = {i};
        clusters[i].rep = distributions[i].user_id;
    }

    std::size_t alive = n;
    while (alive > static_cast<std::size_t>(options.k)) {
        // best pair by (similarity, then smallest reps)
        std::size_t best_a = 0, best_b = 0;
        double best_sim = -2;
        bool found = false;
        for (std::size_t a = 0; a < n; ++a) {
            if (!clusters[a].alive) continue;
            for (std::size_t b = a + 1; b < n; ++b) {
                if (!clusters[b].alive) continue;
                const double s = sim[a * n + b];
                const auto& lo_rep = std::min(clusters[a].rep, clusters[b].rep);
                const auto& hi_rep = std::max(clusters[a].rep, clusters[b].rep);
                bool better = false;
                if (!found || s > best_sim) {
                    better = true;
                } else if (s == best_sim) {
                    const auto& cur_lo = std::min(clusters[best_a].rep, clusters[best_b].rep);
                    const auto& cur_hi = std::max(clusters[best_a].rep, clusters[best_b].rep);
                    better = std::tie(lo_rep, hi_rep) < std::tie(cur_lo, cur_hi);
                }
                if (better) {
                    best_sim = s;
                    best_a = a;
                    best_b = b;
                    found = true;
                }
            }
        }

        // merge b into a; average linkage keeps sim(A u B, C) as the mean
        // pairwise member similarity
        auto& ca = clusters[best_a];
        auto& cb = clusters[best_b];
        const double wa = static_cast<double>(ca.members.size());
        const double wb = static_cast<double>(cb.members.size());
        for (std::size_t c = 0; c < n; ++c) {
            if (!clusters[c].alive || c == best_a || c == best_b) continue;
            const double merged = (wa * sim[best_a * n + c] + wb * sim[best_b * n + c]) / (wa + wb);
            sim[best_a * n + c] = sim[c * n + best_a] = merged;
        }
        ca.members.insert(ca.members.end(), cb.members.begin(), cb.members.end());
        ca.rep = std::min(ca.rep, cb.rep);
        cb.alive = false;
        cb.members.clear();
        --alive;
    }

    // stable cluster numbering by smallest member id
    std::vector<const ActiveCluster*> final_clusters;
    for (const auto& c : clusters)
        if (c.alive) final_clusters.push_back(&c);
    std::sort(final_clusters.begin(), final_clusters.end(),
              [](const ActiveCluster* a, const ActiveCluster* b) { return a->rep < b->rep; });

    // global means per category and per feature for the delta block
    profiles::CategoryVector global_mean{};
    for (const auto& d : distributions)
        for (std::size_t c = 0; c < global_mean.size(); ++c) global_mean[c] += d.weights[c];
    for (auto& g : global_mean) g /= static_cast<double>(n);

    std::map<std::string, std::pair<double, double>> feature_stats;  // name -> (mean, sigma)
    for (const auto& [name, column] : features)
        feature_stats[name] = {mean(column), stddev_population(column)};

    int index = 0;
    for (const ActiveCluster* c : final_clusters) {
        ClusterSummary summary;
        summary.cluster = index;
        for (std::size_t m : c->members) summary.members.push_back(distributions[m].user_id);
        std::sort(summary.members.begin(), summary.members.end());

        // discriminative categories: largest within-cluster mean minus global mean
        profiles::CategoryVector cluster_mean{};
        for (std::size_t m : c->members)
            for (std::size_t cc = 0; cc < cluster_mean.size(); ++cc)
                cluster_mean[cc] += distributions[m].weights[cc];
        for (auto& v : cluster_mean) v /= static_cast<double>(c->members.size());
        std::vector<std::size_t> cat_order(cluster_mean.size());
        std::iota(cat_order.begin(), cat_order.end(), 0);
        std::sort(cat_order.begin(), cat_order.end(), [&](std::size_t a, std::size_t b) {
            const double da = cluster_mean[a] - global_mean[a];
            const double db = cluster_mean[b] - global_mean[b];
            if (da != db) return da > db;
            return a < b;
        });
        for (std::size_t i = 0; i < 5 && i < cat_order.size(); ++i)
            summary.discriminative_categories.push_back(
                std::string(category_name(static_cast<Category>(cat_order[i]))));

        // top bio terms
        std::vector<std::string> cluster_bios;
        for (std::size_t m : c->members) cluster_bios.push_back(bios[m]);
        summary.top_bio_terms = top_bio_terms(cluster_bios, bundled_stopwords());

        // feature deltas at the 1% level (permutation test, cluster vs rest)
        std::vector<bool> in_cluster(n, false);
        for (std::size_t m : c->members) in_cluster[m] = true;
        std::uint64_t feature_stream = 0;
        for (const auto& [name, column] : features) {
            const auto stream = feature_stream++;
            std::vector<double> inside, outside;
            for (std::size_t i = 0; i < n; ++i)
                (in_cluster[i] ? inside : outside).push_back(column[i]);
            if (inside.empty() || outside.empty()) continue;
            const auto& [gmean, gsigma] = feature_stats.at(name);
            if (gsigma == 0) continue;  // constant column, delta ranking collapses
            const auto test = stats::perm_test_mean_diff(
                inside, outside, options.permutations,
                mix_seed(options.seed, (static_cast<std::uint64_t>(index) << 32) | stream),
                options.threads);
            // 1% two-sided = 0.5% in the observed direction
            if (test.tail_percentile > 0.005) continue;
            ClusterSummary::FeatureDelta delta;
            delta.feature = name;
            delta.cluster_mean = mean(inside);
            delta.global_mean = gmean;
            delta.delta_over_sigma = std::abs(delta.cluster_mean - gmean) / gsigma;
            delta.marker = test.marker;
            summary.significant_deltas.push_back(std::move(delta));
        }
        std::sort(summary.significant_deltas.begin(), summary.significant_deltas.end(),
                  [](const auto& a, const auto& b) {
                      if (a.delta_over_sigma != b.delta_over_sigma)
                          return a.delta_over_sigma > b.delta_over_sigma;
                      return a.feature < b.feature;
                  });

        for (const auto& uid : summary.members) report.assignments[uid] = index;
        report.clusters.push_back(std::move(summary));
        ++index;
    }
    return report;
}

AlignmentReport interest_alignment(const std::vector<std::string>& user_ids,
                                   const std::vector<profiles::InterestVector>& twitter,
                                   const std::vector<profiles::InterestVector>& youtube) {
    const std::size_t n = user_ids.size();
    if (twitter.size() != n || youtube.size() != n)
        throw ValidationError("interest_alignment: misaligned inputs");
    if (n == 0)
        throw ValidationError("interest_alignment: no users");

    constexpr std::size_t kC = kInterestCategoryCount;
    AlignmentReport report;

    // column sums; a category with zero mass on either side is excluded
    std::array<double, kC> col_t{}, col_y{};
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < kC; ++c) {
            col_t[c] += twitter[i][c];
            col_y[c] += youtube[i][c];
        }
    std::array<bool, kC> included{};
    for (std::size_t c = 0; c < kC; ++c) {
        included[c] = col_t[c] > 0 && col_y[c] > 0;
        if (!included[c]) report.excluded_categories.push_back(static_cast<Category>(c));
    }

    // hat = column-normalized, tilde = row-normalized hat
    std::vector<std::array<double, kC>> tilde_t(n), tilde_y(n);
    std::vector<bool> usable(n, true);
    for (std::size_t i = 0; i < n; ++i) {
        double row_t = 0, row_y = 0;
        for (std::size_t c = 0; c < kC; ++c) {
            if (!included[c]) continue;
            tilde_t[i][c] = twitter[i][c] / col_t[c];
            tilde_y[i][c] = youtube[i][c] / col_y[c];
            row_t += tilde_t[i][c];
            row_y += tilde_y[i][c];
        }
        if (row_t == 0 || row_y == 0) {
            usable[i] = false;
            ++report.excluded_users;
            continue;
        }
        for (std::size_t c = 0; c < kC; ++c) {
            tilde_t[i][c] /= row_t;
            tilde_y[i][c] /= row_y;
        }
    }

    for (std::size_t c = 0; c < kC; ++c) {
        if (!included[c]) continue;
        std::vector<double> diffs;
        for (std::size_t i = 0; i < n; ++i)
            if (usable[i]) diffs.push_back(tilde_t[i][c] - tilde_y[i][c]);
        if (diffs.empty()) continue;
        AlignmentRow row;
        row.category = static_cast<Category>(c);
        row.user_count = static_cast<std::int64_t>(diffs.size());
        row.mean_difference = mean(diffs);
        row.median_difference = median(std::move(diffs));
        report.rows.push_back(row);
    }
    return report;
}

std::vector<std::string> top_bio_terms(const std::vector<std::string>& bios,
                                       const std::set<std::string>& stopwords, std::size_t count) {
    if (bios.empty())
        throw ValidationError("top_bio_terms: empty cluster");
    std::map<std::string, std::int64_t> document_frequency;
    for (const auto& bio : bios) {
        std::set<std::string> seen;
        for (const auto& token : tokenize_words(bio)) {
            if (stopwords.count(token)) continue;
            if (seen.insert(token).second) ++document_frequency[token];
        }
    }
    std::vector<std::pair<std::string, std::int64_t>> ranked(document_frequency.begin(),
                                                             document_frequency.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    std::vector<std::string> terms;
    for (std::size_t i = 0; i < count && i < ranked.size(); ++i) terms.push_back(ranked[i].first);
    while (terms.size() < count) terms.push_back("-");
    return terms;
}

const std::set<std::string>& bundled_stopwords() {
    static const std::set<std::string> stopwords = {
        "a",    "about", "all",  "am",    "an",   "and",  "are",  "as",    "at",   "be",   "but",
        "by",   "can",   "do",   "for",   "from", "get",  "have", "he",    "her",  "his",  "i",
        "if",   "in",    "is",   "it",    "its",  "just", "like", "love",  "me",   "my",   "no",
        "not",  "of",    "on",   "or",    "our",  "out",  "she",  "so",    "that", "the",  "their",
        "they", "this",  "to",   "up",    "us",   "we",   "what", "when",  "who",  "will", "with",
        "you",  "your",  "im",   "dont",  "follow", "tweets", "tweet", "twitter", "official",
    };
    return stopwords;
}

void write_clusters_tsv(const ClusterReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw ValidationError("cannot write " + path);
    out << "cluster\tsize\tdiscriminative_categories\ttop_bio_terms\tsignificant_deltas\n";
    for (const auto& c : report.clusters) {
        out << c.cluster << '\t' << c.members.size() << '\t';
        for (std::size_t i = 0; i < c.discriminative_categories.size(); ++i)
            out << (i ? "," : "") << c.discriminative_categories[i];
        out << '\t';
        for (std::size_t i = 0; i < c.top_bio_terms.size(); ++i)
            out << (i ? "," : "") << c.top_bio_terms[i];
        out << '\t';
        for (std::size_t i = 0; i < c.significant_deltas.size(); ++i) {
            const auto& d = c.significant_deltas[i];
            out << (i ? "," : "") << d.feature << (d.cluster_mean >= d.global_mean ? "+" : "-");
        }
        out << '\n';
    }
    out << "# assignments\n";
    for (const auto& [uid, cl] : report.assignments) out << uid << '\t' << cl << '\n';
}

void write_alignment_tsv(const AlignmentReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw ValidationError("cannot write " + path);
    out << "category\tuser_count\tmean_difference\tmedian_difference\n";
    for (const auto& row : report.rows)
        out << category_name(row.category) << '\t' << row.user_count << '\t'
            << format_double(row.mean_difference) << '\t' << format_double(row.median_difference)
            << '\n';
    for (const auto& c : report.excluded_categories)
        out << "# excluded (zero column): " << category_name(c) << '\n';
}

}  // namespace tubewire::cluster
