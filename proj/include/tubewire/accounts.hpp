#pragma once

#include <set>
#include <string>
#include <vector>

#include "tubewire/ingest.hpp"

namespace tubewire::accounts {

// Per (sharer handle, uploader channel) statistics over retained events.
struct PairStats {
    std::string twitter_handle;
    std::string youtube_channel;
    std::int64_t pair_share_count = 0;  // sum of occurrences of (u_t, u_y)
    std::int64_t user_total_shares = 0; // t_shares of the sharer
    double lcs_short = 0;               // |LCS| / min(|u_t|, |u_y|)
    double lcs_long = 0;                // |LCS| / max(|u_t|, |u_y|)
    double share_ratio = 0;             // pair_share_count / user_total_shares
};

struct PromoConfig {
    double branch1_lcs_short = 0.75;
    double branch1_lcs_long = 0.5;
    double branch2_lcs_short = 0.5;
    double branch2_lcs_long = 0.3;
    double branch2_share_ratio = 0.5;   // strict >
    double branch3_share_ratio = 0.6;   // >=
    double mean_shares_per_user = 0;    // mu, from compute_pair_stats
};

enum class Label { regular, promotional };

struct Classification {
    std::string user_id;
    Label label = Label::regular;
    int fired_branch = 0;  // 0 for regular
    // Firing pair for promotional users; otherwise the pair with the highest
    // lcs_short (ties by channel) so the audit file always names a channel.
    std::string best_pair_channel;
    double lcs_short = 0;
    double lcs_long = 0;
    double share_ratio = 0;
    std::int64_t total_shares = 0;
};

struct PairStatsReport {
    std::vector<PairStats> pairs;          // sorted by (handle, channel)
    double mean_shares_per_user = 0;       // mu over all sharers
    std::int64_t skipped_unknown_uploader = 0;
};

struct Partition {
    std::set<std::string> promotional;  // user ids
    std::set<std::string> regular;
    std::vector<Classification> details;  // sorted by user_id
    double mean_shares_per_user = 0;
};

// Longest contiguous common substring of the two inputs, ties broken by the
// earliest start in `a`. Inputs must be non-empty; a pair with no common
// character yields the empty string (metrics 0).
std::string longest_common_substring(std::string_view a, std::string_view b);

// Handle normalization applied before the LCS: lowercase + trim. Underscores
// and other inner characters are kept.
std::string normalize_handle(std::string_view handle);

// Fills lcs/ratio metrics for a (handle, channel) pair.
PairStats make_pair_stats(const std::string& twitter_handle, const std::string& youtube_channel,
                          std::int64_t pair_share_count, std::int64_t user_total_shares);

PairStatsReport compute_pair_stats(const ingest::EventStore& store);

// Three-branch filter per pair: branch 1 (name similarity alone), branch 2
// (weaker similarity + concentration + activity above mu), branch 3
// (concentration + activity above mu). First firing pair wins; pairs are
// visited in channel order.
Classification classify_account(const std::string& user_id, const std::vector<PairStats>& stats,
                                const PromoConfig& config);

// Every sharer lands in exactly one set. Users whose every event lacks an
// uploader handle have no pairs and classify as regular.
Partition partition_users(const ingest::EventStore& store, PromoConfig config, int threads = 0);

// accounts.tsv with one row per sharer.
void write_accounts_tsv(const Partition& partition, const std::string& path);
Partition read_accounts_tsv(const std::string& path);

}  // namespace tubewire::accounts
