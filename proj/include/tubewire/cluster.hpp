#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tubewire/profiles.hpp"
#include "tubewire/stats.hpp"

namespace tubewire::cluster {

// Per-user share distribution over the 19 video categories, summing to 1.
struct CategoryDistribution {
    std::string user_id;
    profiles::CategoryVector weights{};
};

struct ClusterSummary {
    int cluster = 0;
    std::vector<std::string> members;  // sorted user ids
    std::vector<std::string> discriminative_categories;  // top 5
    std::vector<std::string> top_bio_terms;              // top 5, "-" padded
    struct FeatureDelta {
        std::string feature;
        double cluster_mean = 0;
        double global_mean = 0;
        double delta_over_sigma = 0;  // |cluster - global| / global sigma
        stats::Marker marker = stats::Marker::zero;
    };
    std::vector<FeatureDelta> significant_deltas;  // 1% level, ranked by |delta|/sigma
};

struct ClusterReport {
    std::map<std::string, int> assignments;  // user id -> cluster index
    std::vector<ClusterSummary> clusters;
    bool degenerate_similarity = false;  // all pairwise similarities equal
};

struct ClusterOptions {
    int k = 8;
    int permutations = 1000;       // for the feature-delta tests
    std::uint64_t seed = 1;
    int threads = 0;
};

// Named per-user feature columns aligned with the user-id vector; used for
// the significant-delta block of the report.
using FeatureMatrix = std::map<std::string, std::vector<double>>;

// Agglomerative merging (average linkage on cosine similarity) down to k
// clusters. Merge ties break on the smallest member id, so the result is
// independent of input order.
ClusterReport cluster_users(const std::vector<CategoryDistribution>& distributions,
                            const std::vector<std::string>& bios, const FeatureMatrix& features,
                            const ClusterOptions& options = {});

struct AlignmentRow {
    Category category;
    double mean_difference = 0;    // c~T - c~Y across users
    double median_difference = 0;
    std::int64_t user_count = 0;
};

struct AlignmentReport {
    std::vector<AlignmentRow> rows;
    std::vector<Category> excluded_categories;  // all-zero columns
    std::int64_t excluded_users = 0;            // zero rows after column exclusion
};

// Twitter-vs-YouTube interest alignment: column-normalize both matrices per
// category, row-normalize per user, then report the per-category
// distribution of differences.
AlignmentReport interest_alignment(const std::vector<std::string>& user_ids,
                                   const std::vector<profiles::InterestVector>& twitter,
                                   const std::vector<profiles::InterestVector>& youtube);

// Top-5 bio terms by within-cluster document frequency; ties by term;
// padded with "-" when fewer than five qualify.
std::vector<std::string> top_bio_terms(const std::vector<std::string>& bios,
                                       const std::set<std::string>& stopwords,
                                       std::size_t count = 5);

const std::set<std::string>& bundled_stopwords();

void write_clusters_tsv(const ClusterReport& report, const std::string& path);
void write_alignment_tsv(const AlignmentReport& report, const std::string& path);

}  // namespace tubewire::cluster
