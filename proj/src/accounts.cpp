#include "tubewire/accounts.hpp"

#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

namespace tubewire::accounts {

std::string normalize_handle(std::string_view handle) {
    return to_lower(trim(handle));
}

std::string longest_common_substring(std::string_view a, std::string_view b) {
    if (a.empty() || b.empty())
        throw ValidationError("longest_common_substring requires non-empty inputs");

    // dp[j] = length of the common suffix of a[..i] and b[..j].
    std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
    std::size_t best_len = 0, best_start = 0;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            if (a[i - 1] != b[j - 1]) {
                cur[j] = 0;
                continue;
            }
            cur[j] = prev[j - 1] + 1;
            const std::size_t start = i - cur[j];
            if (cur[j] > best_len || (cur[j] == best_len && start < best_start)) {
                best_len = cur[j];
                best_start = start;
            }
        }
        std::swap(prev, cur);
    }
    return std::string(a.substr(best_start, best_len));
}

PairStats make_pair_stats(const std::string& twitter_handle, const std::string& youtube_channel,
                          std::int64_t pair_share_count, std::int64_t user_total_shares) {
    PairStats s;
    s.twitter_handle = twitter_handle;
    s.youtube_channel = youtube_channel;
    s.pair_share_count = pair_share_count;
    s.user_total_shares = user_total_shares;
    if (pair_share_count <= 0 || user_total_shares < pair_share_count)
        throw ValidationError("inconsistent pair counts for " + twitter_handle);
    s.share_ratio = static_cast<double>(pair_share_count) / static_cast<double>(user_total_shares);

    const std::string ta = normalize_handle(twitter_handle);
    const std::string yb = normalize_handle(youtube_channel);
    if (ta.empty() || yb.empty())
        throw ValidationError("empty handle after normalization: '" + twitter_handle + "' / '" +
                              youtube_channel + "'");
    const std::size_t lcs_len = longest_common_substring(ta, yb).size();
    s.lcs_short = static_cast<double>(lcs_len) / static_cast<double>(std::min(ta.size(), yb.size()));
    s.lcs_long = static_cast<double>(lcs_len) / static_cast<double>(std::max(ta.size(), yb.size()));
    return s;
}

PairStatsReport compute_pair_stats(const ingest::EventStore& store) {
    PairStatsReport report;

    // user_id -> channel -> count, plus channel-attributable totals.
    std::map<std::string, std::map<std::string, std::int64_t>> counts;
    std::map<std::string, std::int64_t> totals;
    for (const auto& e : store.events) {
        const auto& channel = store.video(e.video_id).uploader_handle;
        if (trim(channel).empty()) {
            ++report.skipped_unknown_uploader;
            continue;
        }
        ++counts[e.user_id][channel];
        ++totals[e.user_id];
    }

    double total_sum = 0;
    for (const auto& [uid, t] : totals) total_sum += static_cast<double>(t);
    report.mean_shares_per_user = totals.empty() ? 0.0 : total_sum / static_cast<double>(totals.size());

    for (const auto& [uid, channels] : counts) {
        const auto& handle = store.user(uid).handle;
        for (const auto& [channel, count] : channels)
            report.pairs.push_back(make_pair_stats(handle, channel, count, totals.at(uid)));
    }
    return report;
}

Classification classify_account(const std::string& user_id, const std::vector<PairStats>& stats,
                                const PromoConfig& config) {
    Classification c;
    c.user_id = user_id;

    std::vector<const PairStats*> ordered;
    ordered.reserve(stats.size());
    for (const auto& s : stats) ordered.push_back(&s);
    std::sort(ordered.begin(), ordered.end(), [](const PairStats* a, const PairStats* b) {
        return a->youtube_channel < b->youtube_channel;
    });

    const double mu = config.mean_shares_per_user;
    for (const PairStats* p : ordered) {
        int branch = 0;
        if (p->lcs_short >= config.branch1_lcs_short && p->lcs_long >= config.branch1_lcs_long) {
            branch = 1;  // no activity gate on branch 1
        } else if (p->lcs_short >= config.branch2_lcs_short && p->lcs_long >= config.branch2_lcs_long &&
                   p->share_ratio > config.branch2_share_ratio &&
                   static_cast<double>(p->user_total_shares) > mu) {
            branch = 2;
        } else if (p->share_ratio >= config.branch3_share_ratio &&
                   static_cast<double>(p->user_total_shares) > mu) {
            branch = 3;
        }
        if (branch != 0) {
            c.label = Label::promotional;
            c.fired_branch = branch;
            c.best_pair_channel = p->youtube_channel;
            c.lcs_short = p->lcs_short;
            c.lcs_long = p->lcs_long;
            c.share_ratio = p->share_ratio;
            c.total_shares = p->user_total_shares;
            return c;
        }
    }

    // Regular: report the closest-looking pair for the audit trail.
    const PairStats* best = nullptr;
    for (const PairStats* p : ordered)
        if (!best || p->lcs_short > best->lcs_short) best = p;
    if (best) {
        c.best_pair_channel = best->youtube_channel;
        c.lcs_short = best->lcs_short;
        c.lcs_long = best->lcs_long;
        c.share_ratio = best->share_ratio;
        c.total_shares = best->user_total_shares;
    }
    return c;
}

Partition partition_users(const ingest::EventStore& store, PromoConfig config, int threads) {
    PairStatsReport pair_report = compute_pair_stats(store);
    config.mean_shares_per_user = pair_report.mean_shares_per_user;

    std::unordered_map<std::string, std::vector<PairStats>> by_user_handle;
    for (auto& p : pair_report.pairs) by_user_handle[p.twitter_handle].push_back(std::move(p));

    const std::vector<std::string> sharers = store.sharer_ids();
    std::vector<Classification> details(sharers.size());
    parallel_chunks(sharers.size(), threads, [&](std::size_t begin, std::size_t end) {
        static const std::vector<PairStats> kNoPairs;
        for (std::size_t i = begin; i < end; ++i) {
            const auto& handle = store.user(sharers[i]).handle;
            auto it = by_user_handle.find(handle);
            details[i] = classify_account(sharers[i], it == by_user_handle.end() ? kNoPairs : it->second,
                                          config);
        }
    });

    Partition part;
    part.mean_shares_per_user = config.mean_shares_per_user;
    for (auto& c : details) {
        (c.label == Label::promotional ? part.promotional : part.regular).insert(c.user_id);
        part.details.push_back(std::move(c));
    }
    return part;
}

void write_accounts_tsv(const Partition& partition, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw ValidationError("cannot write " + path);
    out << "user_id\tlabel\tfired_branch\tbest_pair_channel\tlcs_s\tlcs_l\tshare_ratio\ttotal_shares\n";
    for (const auto& c : partition.details) {
        out << c.user_id << '\t' << (c.label == Label::promotional ? "promotional" : "regular") << '\t'
            << c.fired_branch << '\t' << c.best_pair_channel << '\t' << format_double(c.lcs_short)
            << '\t' << format_double(c.lcs_long) << '\t' << format_double(c.share_ratio) << '\t'
            << c.total_shares << '\n';
    }
}

Partition read_accounts_tsv(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ValidationError("cannot open " + path);
    Partition part;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (header) {
            header = false;
            continue;
        }
        if (trim(line).empty()) continue;
        std::istringstream row(line);
        Classification c;
        std::string label, field;
        std::getline(row, c.user_id, '\t');
        std::getline(row, label, '\t');
        std::getline(row, field, '\t');
        c.fired_branch = std::stoi(field);
        std::getline(row, c.best_pair_channel, '\t');
        std::getline(row, field, '\t');
        c.lcs_short = std::stod(field);
        std::getline(row, field, '\t');
        c.lcs_long = std::stod(field);
        std::getline(row, field, '\t');
        c.share_ratio = std::stod(field);
        std::getline(row, field, '\t');
        c.total_shares = std::stoll(field);
        c.label = label == "promotional" ? Label::promotional : Label::regular;
        (c.label == Label::promotional ? part.promotional : part.regular).insert(c.user_id);
        part.details.push_back(std::move(c));
    }
    return part;
}

}  // namespace tubewire::accounts
