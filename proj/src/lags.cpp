#include "tubewire/lags.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace tubewire::lags {

LagDistribution::LagDistribution(std::vector<double> lags_seconds) : sample_(std::move(lags_seconds)) {
    for (double v : sample_)
        if (v < 0)
            throw ValidationError("negative inter-event time in lag sample");
    std::sort(sample_.begin(), sample_.end());
    if (sample_.empty()) return;

    cached_quantiles_.resize(101);
    for (int p = 0; p <= 100; ++p) cached_quantiles_[p] = quantile(p / 100.0);

    // log10-spaced bins, 10 per decade, with an underflow bin for [0, 1).
    const double max_lag = sample_.back();
    if (max_lag < 1.0) {
        bins_.push_back({0.0, 1.0, static_cast<std::int64_t>(sample_.size())});
        return;
    }
    const int top_decade = static_cast<int>(std::ceil(std::log10(max_lag) * 10.0)) + 1;
    bins_.push_back({0.0, 1.0, 0});
    for (int step = 0; step < top_decade; ++step)
        bins_.push_back({std::pow(10.0, step / 10.0), std::pow(10.0, (step + 1) / 10.0), 0});
    for (double v : sample_) {
        std::size_t idx = 0;
        if (v >= 1.0)
            idx = 1 + std::min<std::size_t>(static_cast<std::size_t>(std::log10(v) * 10.0), bins_.size() - 2);
        // guard against fp rounding at bin edges
        while (idx + 1 < bins_.size() && v >= bins_[idx].high) ++idx;
        while (idx > 0 && v < bins_[idx].low) --idx;
        ++bins_[idx].count;
    }
}

double LagDistribution::quantile(double q) const {
    if (sample_.empty())
        throw ValidationError("quantile of an empty lag distribution");
    if (q < 0 || q > 1)
        throw ValidationError("quantile level outside [0,1]");
    const double pos = q * static_cast<double>(sample_.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= sample_.size()) return sample_.back();
    const double frac = pos - static_cast<double>(lo);
    return sample_[lo] * (1.0 - frac) + sample_[lo + 1] * frac;
}

double LagDistribution::cdf(double t) const {
    if (sample_.empty())
        throw ValidationError("cdf of an empty lag distribution");
    const auto it = std::upper_bound(sample_.begin(), sample_.end(), t);
    return static_cast<double>(it - sample_.begin()) / static_cast<double>(sample_.size());
}

std::vector<std::pair<double, double>> LagDistribution::cdf_grid() const {
    std::vector<std::pair<double, double>> rows;
    for (const auto& bin : bins_) rows.emplace_back(bin.high, cdf(bin.high));
    return rows;
}

std::map<std::string, double> per_user_median_lags(const ingest::EventStore& store,
                                                   const std::vector<std::string>& user_ids) {
    std::map<std::string, std::vector<double>> lags;
    for (const auto& id : user_ids) lags[id];
    for (const auto& e : store.events) {
        auto it = lags.find(e.user_id);
        if (it != lags.end()) it->second.push_back(static_cast<double>(e.lag));
    }
    std::map<std::string, double> medians;
    for (auto& [id, values] : lags) {
        if (values.empty())
            throw ValidationError("user has no retained events: " + id);
        medians[id] = median(std::move(values));
    }
    return medians;
}

double group_median_lag(const std::vector<double>& per_user_medians) {
    if (per_user_medians.empty())
        throw ValidationError("group_median_lag of an empty group");
    return median(per_user_medians);
}

double group_median_lag(const ingest::EventStore& store, const std::vector<std::string>& user_group) {
    const auto medians = per_user_median_lags(store, user_group);
    std::vector<double> values;
    values.reserve(medians.size());
    for (const auto& [id, m] : medians) values.push_back(m);
    return group_median_lag(values);
}

LagDistribution category_lag_cdf(const ingest::EventStore& store, Category category) {
    if (category == Category::finance)
        throw ValidationError("finance is not a video category");
    std::vector<double> lags;
    for (const auto& e : store.events)
        if (store.video(e.video_id).category == category) lags.push_back(static_cast<double>(e.lag));
    return LagDistribution(std::move(lags));
}

std::vector<DecileRow> activity_deciles(const ingest::EventStore& store) {
    struct UserActivity {
        std::string user_id;
        std::int64_t shares = 0;
        std::vector<double> lags;
    };
    std::map<std::string, UserActivity> users;
    for (const auto& e : store.events) {
        auto& u = users.try_emplace(e.user_id).first->second;
        u.user_id = e.user_id;
        ++u.shares;
        u.lags.push_back(static_cast<double>(e.lag));
    }
    if (users.size() < 10)
        throw ValidationError("activity_deciles needs at least 10 users");

    std::vector<UserActivity> ranked;
    ranked.reserve(users.size());
    for (auto& [id, u] : users) ranked.push_back(std::move(u));
    std::sort(ranked.begin(), ranked.end(), [](const UserActivity& a, const UserActivity& b) {
        if (a.shares != b.shares) return a.shares < b.shares;
        return a.user_id < b.user_id;
    });

    const std::size_t n = ranked.size();
    const std::size_t base = n / 10;
    const std::size_t remainder = n % 10;
    std::vector<DecileRow> rows;
    std::size_t cursor = 0;
    for (int d = 0; d < 10; ++d) {
        const std::size_t size = base + (static_cast<std::size_t>(d) < remainder ? 1 : 0);
        DecileRow row;
        row.decile = d + 1;
        row.user_count = static_cast<std::int64_t>(size);
        std::vector<double> user_medians;
        for (std::size_t i = cursor; i < cursor + size; ++i) {
            row.min_shares = i == cursor ? ranked[i].shares : row.min_shares;
            row.max_shares = ranked[i].shares;
            user_medians.push_back(median(std::move(ranked[i].lags)));
        }
        row.median_of_median_lags = median(user_medians);
        rows.push_back(row);
        cursor += size;
    }
    return rows;
}

void write_cdf_tsv(const LagDistribution& dist, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw ValidationError("cannot write " + path);
    out << "lag_seconds\tcdf\n";
    for (const auto& [t, f] : dist.cdf_grid())
        out << format_double(t) << '\t' << format_double(f) << '\n';
}

void write_deciles_tsv(const std::vector<DecileRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw ValidationError("cannot write " + path);
    out << "decile\tuser_count\tmin_shares\tmax_shares\tmedian_of_median_lag_seconds\n";
    for (const auto& r : rows)
        out << r.decile << '\t' << r.user_count << '\t' << r.min_shares << '\t' << r.max_shares << '\t'
            << format_double(r.median_of_median_lags) << '\n';
}

}  // namespace tubewire::lags
