#include "tubewire/pipeline.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>

#include <json.hpp>

#include "tubewire/stats.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace tubewire::pipeline {

namespace {

constexpr const char* kVersion = "tubewire 0.1.0";

template <typename T>
T guarded(const char* stage, const std::function<T()>& fn) {
    try {
        return fn();
    } catch (const StageError&) {
        throw;
    } catch (const ValidationError& e) {
        throw StageError(stage, e.what(), true);
    } catch (const std::exception& e) {
        throw StageError(stage, e.what(), false);
    }
}

std::string category_slug(Category c) {
    std::string slug;
    for (char ch : category_name(c)) {
        if (std::isalnum(static_cast<unsigned char>(ch)))
            slug.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
        else if (!slug.empty() && slug.back() != '_')
            slug.push_back('_');
    }
    while (!slug.empty() && slug.back() == '_') slug.pop_back();
    return slug;
}

// Demographic groups for the marker-matrix and group-median reports.
using GroupPredicate = std::function<bool(const profiles::UserFeatures&)>;

const std::vector<std::pair<std::string, GroupPredicate>>& demographic_groups() {
    static const std::vector<std::pair<std::string, GroupPredicate>> groups = {
        {"male", [](const auto& f) { return f.gender == profiles::Gender::male; }},
        {"female", [](const auto& f) { return f.gender == profiles::Gender::female; }},
        {"urban", [](const auto& f) { return f.geo == profiles::Geo::urban_us; }},
        {"rural", [](const auto& f) { return f.geo == profiles::Geo::rural_us; }},
        {"student", [](const auto& f) { return f.role_student; }},
        {"mother", [](const auto& f) { return f.role_mother; }},
        {"father", [](const auto& f) { return f.role_father; }},
        {"us",
         [](const auto& f) {
             return f.geo == profiles::Geo::urban_us || f.geo == profiles::Geo::rural_us ||
                    f.geo == profiles::Geo::us_other;
         }},
    };
    return groups;
}

struct NamedColumn {
    std::string name;
    std::function<std::optional<double>(const profiles::UserFeatures&, const UserRecord&)> value;
};

std::optional<double> opt(double v) {
    return v;
}

const std::vector<NamedColumn>& twitter_feature_columns() {
    // grouped as social / sharing / influence, in the report's row order
    static const std::vector<NamedColumn> columns = {
        {"friends_count", [](const auto&, const auto& u) { return opt(double(u.friends_count)); }},
        {"mentioned_user_count",
         [](const auto&, const auto& u) { return opt(double(u.mentioned_user_count)); }},
        {"retweet_fraction", [](const auto&, const auto& u) { return opt(u.retweet_fraction); }},
        {"hashtag_fraction", [](const auto&, const auto& u) { return opt(u.hashtag_fraction); }},
        {"youtube_url_fraction", [](const auto&, const auto& u) { return opt(u.youtube_url_fraction); }},
        {"other_url_fraction",
         [](const auto&, const auto& u) {
             return opt(std::max(0.0, u.url_fraction - u.youtube_url_fraction));
         }},
        {"followers_count", [](const auto&, const auto& u) { return opt(double(u.followers_count)); }},
        {"retweeted_tweet_fraction",
         [](const auto&, const auto& u) { return opt(u.retweeted_tweet_fraction); }},
        {"mean_nonzero_retweet_count",
         [](const auto&, const auto& u) { return opt(u.mean_nonzero_retweet_count); }},
        {"avg_follower_followers", [](const auto& f, const auto&) { return opt(f.avg_follower_followers); }},
    };
    return columns;
}

const std::vector<NamedColumn>& youtube_feature_columns() {
    static const std::vector<NamedColumn> columns = {
        {"median_views",
         [](const auto& f, const auto&) -> std::optional<double> { return f.aggregates.median_views; }},
        {"median_polarization",
         [](const auto& f, const auto&) -> std::optional<double> {
             return f.aggregates.median_polarization;
         }},
        {"median_lag", [](const auto& f, const auto&) { return opt(f.aggregates.median_lag); }},
        {"frac_music",
         [](const auto& f, const auto&) {
             return opt(f.category_fractions[static_cast<std::size_t>(Category::music)]);
         }},
        {"frac_sports",
         [](const auto& f, const auto&) {
             return opt(f.category_fractions[static_cast<std::size_t>(Category::sports)]);
         }},
        {"frac_news",
         [](const auto& f, const auto&) {
             return opt(f.category_fractions[static_cast<std::size_t>(Category::news_politics)]);
         }},
    };
    return columns;
}

}  // namespace

ingest::EventStore stage_ingest(const PipelineConfig& config, const std::string& store_dir) {
    return guarded<ingest::EventStore>("ingest", [&] {
        ingest::CleansingConfig cleansing;
        cleansing.cutoff = config.cutoff;
        cleansing.as_of = config.as_of;
        auto store = ingest::cleanse(
            ingest::parse_streams(config.users_path, config.videos_path, config.events_path,
                                  config.threads),
            cleansing);
        ingest::save_store(store, store_dir);
        return store;
    });
}

accounts::Partition stage_classify(const ingest::EventStore& store, const std::string& accounts_path,
                                   int threads) {
    return guarded<accounts::Partition>("classify", [&] {
        auto partition = accounts::partition_users(store, accounts::PromoConfig{}, threads);
        accounts::write_accounts_tsv(partition, accounts_path);
        return partition;
    });
}

std::vector<profiles::UserFeatures> stage_features(const ingest::EventStore& store,
                                                   const PipelineConfig& config,
                                                   const std::string& features_path) {
    return guarded<std::vector<profiles::UserFeatures>>("features", [&] {
        profiles::FeatureContext ctx;
        ctx.polarization = config.polarization;
        ctx.weight_video_stats_by_event = config.weight_video_stats_by_event;

        // loaded tables must outlive extract_features
        std::optional<profiles::NameDictionary> names;
        std::optional<profiles::Gazetteer> gazetteer;
        std::optional<profiles::TopCities> top_cities;
        std::optional<profiles::InterestDirectory> directory;
        std::optional<profiles::CategoryMapping> category_map;
        std::optional<profiles::PoliticalSeeds> seeds;
        if (!config.names_path.empty())
            ctx.names = &names.emplace(profiles::NameDictionary::load_tsv(config.names_path));
        if (!config.gazetteer_path.empty())
            ctx.gazetteer = &gazetteer.emplace(profiles::Gazetteer::load_tsv(config.gazetteer_path));
        if (!config.top_cities_path.empty())
            ctx.top_cities = &top_cities.emplace(profiles::TopCities::load(config.top_cities_path));
        if (!config.directory_path.empty())
            ctx.directory = &directory.emplace(profiles::InterestDirectory::load_tsv(config.directory_path));
        if (!config.category_map_path.empty())
            ctx.category_map =
                &category_map.emplace(profiles::CategoryMapping::load_tsv(config.category_map_path));
        if (!config.seeds_path.empty())
            ctx.seeds = &seeds.emplace(profiles::PoliticalSeeds::load_tsv(config.seeds_path));

        auto features = profiles::extract_features(store, ctx, config.threads);
        profiles::write_features_jsonl(features, features_path);
        return features;
    });
}

void stage_lags(const ingest::EventStore& store, const accounts::Partition& partition,
                const std::vector<profiles::UserFeatures>& features, const std::string& out_dir,
                const LagsSelection& selection) {
    guarded<int>("lags", [&] {
        fs::create_directories(out_dir);

        if (selection.by_category) {
            for (Category c : video_categories()) {
                const auto dist = lags::category_lag_cdf(store, c);
                if (dist.empty()) continue;
                lags::write_cdf_tsv(dist,
                                    (fs::path(out_dir) / ("lag_cdf_" + category_slug(c) + ".tsv")).string());
            }
        }

        if (selection.by_group) {
            // per-group medians of the per-user median lags, in hours
            std::ofstream out(fs::path(out_dir) / "groups.tsv");
            out << "group\tuser_count\tmedian_of_median_lag_hours\n";
            auto emit = [&](const std::string& name, const std::vector<std::string>& ids) {
                if (ids.empty()) return;
                const double m = lags::group_median_lag(store, ids);
                out << name << '\t' << ids.size() << '\t' << format_double(m / 3600.0) << '\n';
            };
            emit("promotional", {partition.promotional.begin(), partition.promotional.end()});
            emit("non-promotional", {partition.regular.begin(), partition.regular.end()});
            for (const auto& [name, pred] : demographic_groups()) {
                std::vector<std::string> ids;
                for (const auto& f : features)
                    if (partition.regular.count(f.user_id) && pred(f)) ids.push_back(f.user_id);
                emit(name, ids);
            }
            for (auto leaning : {profiles::Leaning::left, profiles::Leaning::right}) {
                std::vector<std::string> ids;
                for (const auto& f : features)
                    if (partition.regular.count(f.user_id) && f.leaning == leaning)
                        ids.push_back(f.user_id);
                emit(std::string(profiles::leaning_name(leaning)), ids);
            }
        }

        if (selection.by_decile)
            lags::write_deciles_tsv(lags::activity_deciles(store),
                                    (fs::path(out_dir) / "deciles.tsv").string());
        return 0;
    });
}

void stage_stats(const ingest::EventStore& store, const std::vector<profiles::UserFeatures>& features,
                 const accounts::Partition& partition, const PipelineConfig& config,
                 const std::string& out_dir) {
    guarded<int>("stats", [&] {
        fs::create_directories(out_dir);

        // non-promotional users drive the population statistics
        std::vector<const profiles::UserFeatures*> population;
        for (const auto& f : features)
            if (partition.regular.count(f.user_id)) population.push_back(&f);

        // marker matrix: group vs complement permutation tests on per-user medians
        {
            std::ofstream out(fs::path(out_dir) / "demographics.tsv");
            out << "feature";
            for (const auto& [name, pred] : demographic_groups()) out << '\t' << name;
            out << '\n';
            const std::vector<std::pair<std::string, std::function<std::optional<double>(
                                                         const profiles::UserFeatures&)>>>
                rows = {
                    {"views", [](const auto& f) { return f.aggregates.median_views; }},
                    {"polarization", [](const auto& f) { return f.aggregates.median_polarization; }},
                    {"lag", [](const auto& f) { return std::optional<double>(f.aggregates.median_lag); }},
                };
            std::uint64_t stream = 0;
            for (const auto& [row_name, value] : rows) {
                out << row_name;
                for (const auto& [group_name, pred] : demographic_groups()) {
                    std::vector<double> inside, outside;
                    for (const auto* f : population) {
                        const auto v = value(*f);
                        if (!v) continue;
                        (pred(*f) ? inside : outside).push_back(*v);
                    }
                    ++stream;
                    if (inside.empty() || outside.empty()) {
                        out << "\tna";
                        continue;
                    }
                    const auto r = stats::perm_test_mean_diff(inside, outside, config.permutations,
                                                              mix_seed(config.seed, stream),
                                                              config.threads);
                    out << '\t' << stats::marker_symbol(r.marker);
                }
                out << '\n';
            }
        }

        // Twitter-feature vs YouTube-feature rank correlations
        {
            std::ofstream out(fs::path(out_dir) / "correlations.tsv");
            out << "twitter_feature\tyoutube_feature\trho\tmarker\tdisplay\n";
            std::uint64_t stream = 1000;
            for (const auto& trow : twitter_feature_columns()) {
                for (const auto& ycol : youtube_feature_columns()) {
                    std::vector<double> x, y;
                    for (const auto* f : population) {
                        const auto xv = trow.value(*f, store.user(f->user_id));
                        const auto yv = ycol.value(*f, store.user(f->user_id));
                        if (!xv || !yv) continue;
                        x.push_back(*xv);
                        y.push_back(*yv);
                    }
                    ++stream;
                    if (x.size() < 3) {
                        out << trow.name << '\t' << ycol.name << "\tna\tna\tna\n";
                        continue;
                    }
                    double rho;
                    stats::Marker marker;
                    try {
                        const auto r = stats::perm_test_correlation(x, y, config.permutations,
                                                                    mix_seed(config.seed, stream),
                                                                    config.threads);
                        rho = r.observed_delta;
                        marker = r.marker;
                    } catch (const ValidationError&) {  // zero-variance column
                        out << trow.name << '\t' << ycol.name << "\tna\tna\tna\n";
                        continue;
                    }
                    // display layer: 1% significance, |rho| floor at 0.05,
                    // 0.1 marks the strong ("bold") entries
                    std::string display = "0";
                    const bool significant =
                        marker == stats::Marker::pos_strong || marker == stats::Marker::neg_strong;
                    if (significant && std::abs(rho) >= 0.05) {
                        display = rho > 0 ? "+" : "-";
                        if (std::abs(rho) > 0.1) display += "B";
                    }
                    out << trow.name << '\t' << ycol.name << '\t' << format_double(rho) << '\t'
                        << stats::marker_symbol(marker) << '\t' << display << '\n';
                }
            }
        }

        // politics: per-leaning political share means, topic rank distances,
        // and a two-proportion contrast on bio lexicon hits
        {
            std::ofstream out(fs::path(out_dir) / "politics.tsv");
            out << "section\tkey\tvalue\n";

            std::map<profiles::Leaning, std::vector<const profiles::UserFeatures*>> by_leaning;
            for (const auto* f : population) by_leaning[f->leaning].push_back(f);
            for (const auto& [leaning, members] : by_leaning) {
                std::vector<double> ratios;
                for (const auto* f : members)
                    if (f->political_ratio_defined) ratios.push_back(f->political_ratio);
                if (ratios.empty()) continue;
                out << "political_share_mean\t" << profiles::leaning_name(leaning) << '\t'
                    << format_double(mean(ratios)) << '\n';
                out << "group_size\t" << profiles::leaning_name(leaning) << '\t' << members.size() << '\n';
            }

            // topic rankings per group over shared videos
            auto topic_counts = [&](const std::function<bool(const std::string&)>& in_group) {
                std::map<std::string, std::int64_t> counts;
                for (const auto& e : store.events) {
                    if (!in_group(e.user_id)) continue;
                    for (const auto& t : store.video(e.video_id).topics) ++counts[t];
                }
                return counts;
            };
            std::map<std::string, std::set<std::string>> leaning_members;
            for (const auto* f : population)
                leaning_members[std::string(profiles::leaning_name(f->leaning))].insert(f->user_id);
            std::set<std::string> all_members;
            for (const auto* f : population) all_members.insert(f->user_id);

            std::map<std::string, stats::Ranking> rankings;
            for (const auto& [name, members] : leaning_members) {
                const auto counts =
                    topic_counts([&](const std::string& uid) { return members.count(uid) > 0; });
                if (!counts.empty()) rankings[name] = stats::rank_by_frequency(counts);
            }
            {
                const auto counts =
                    topic_counts([&](const std::string& uid) { return all_members.count(uid) > 0; });
                if (!counts.empty()) rankings["all"] = stats::rank_by_frequency(counts);
            }
            for (auto it = rankings.begin(); it != rankings.end(); ++it)
                for (auto jt = std::next(it); jt != rankings.end(); ++jt) {
                    try {
                        const auto d = stats::rank_distance(it->second, jt->second);
                        out << "rank_distance\t" << it->first << ":" << jt->first << '\t'
                            << format_double(d.distance) << '\n';
                    } catch (const ValidationError&) {
                        // no common topics between these groups
                    }
                }

            // bio-lexicon contrast between followers and non-followers of the
            // most-followed left seed present in the data
            const profiles::PoliticalSeeds* seeds = &profiles::PoliticalSeeds::bundled();
            std::optional<profiles::PoliticalSeeds> loaded;
            if (!config.seeds_path.empty())
                seeds = &loaded.emplace(profiles::PoliticalSeeds::load_tsv(config.seeds_path));
            std::string anchor_id;
            std::int64_t anchor_followers = -1;
            for (const auto& [uid, u] : store.users) {
                if (!seeds->left_handles.count(to_lower(trim(u.handle)))) continue;
                if (u.followers_count > anchor_followers) {
                    anchor_followers = u.followers_count;
                    anchor_id = uid;
                }
            }
            if (!anchor_id.empty()) {
                static const std::vector<std::string> l_words = {"liberal", "progressive", "democrat"};
                static const std::vector<std::string> r_words = {"conservative", "republican"};
                auto bio_hits = [&](const UserRecord& u, const std::vector<std::string>& lexicon) {
                    const auto tokens = tokenize_words(u.bio);
                    for (const auto& w : lexicon)
                        if (std::find(tokens.begin(), tokens.end(), w) != tokens.end()) return true;
                    return false;
                };
                std::int64_t follower_n = 0, follower_l = 0, follower_r = 0;
                std::int64_t other_n = 0, other_l = 0, other_r = 0;
                for (const auto* f : population) {
                    const UserRecord& u = store.user(f->user_id);
                    const bool follows = std::find(u.friend_ids.begin(), u.friend_ids.end(),
                                                   anchor_id) != u.friend_ids.end();
                    (follows ? follower_n : other_n) += 1;
                    (follows ? follower_l : other_l) += bio_hits(u, l_words);
                    (follows ? follower_r : other_r) += bio_hits(u, r_words);
                }
                out << "anchor_followers\t" << store.user(anchor_id).handle << '\t' << follower_n << '\n';
                auto contrast = [&](const char* key, std::int64_t k1, std::int64_t k2) {
                    if (follower_n == 0 || other_n == 0) return;
                    try {
                        const auto r = stats::two_proportion_test(k1, follower_n, k2, other_n);
                        out << "two_proportion\t" << key << '\t' << format_double(r.chi_square)
                            << (r.significant_at_95 ? "\tsignificant" : "\tnot_significant") << '\n';
                    } catch (const ValidationError&) {
                        out << "two_proportion\t" << key << "\tdegenerate\n";
                    }
                };
                contrast("l_words", follower_l, other_l);
                contrast("r_words", follower_r, other_r);
            }
        }
        return 0;
    });
}

PredictOutcome stage_predict(const ingest::EventStore& store, const std::vector<std::string>& group_users,
                             const PipelineConfig& config, const std::string& out_dir) {
    return guarded<PredictOutcome>("predict", [&] {
        fs::create_directories(out_dir);
        PredictOutcome outcome;
        const auto vectors = popularity::attention_vectors(store, group_users,
                                                           config.min_final_view_age_days, config.threads);
        outcome.vectors = vectors.size();
        popularity::write_attention_tsv(vectors, (fs::path(out_dir) / "attention.tsv").string());

        // single-factor views-vs-metric reports: log-log correlations, power
        // laws and the binned means behind them
        const std::vector<std::pair<std::string, std::function<double(const popularity::AttentionVector&)>>>
            metrics = {
                {"S", [](const auto& v) { return v.shares; }},
                {"I", [](const auto& v) { return v.impact; }},
                {"E", [](const auto& v) { return v.exposure; }},
                {"E2", [](const auto& v) { return v.second_order_exposure; }},
                {"A", [](const auto& v) { return v.share_of_voice; }},
            };
        {
            std::ofstream corr(fs::path(out_dir) / "metric_correlations.tsv");
            corr << "metric\tpearson_log\tspearman_log\tn\n";
            std::ofstream laws(fs::path(out_dir) / "power_laws.tsv");
            laws << "metric\texponent\tstderr\tn\n";
            for (const auto& [name, value] : metrics) {
                std::vector<double> x, y, lx, ly;
                for (const auto& v : vectors) {
                    const double m = value(v);
                    if (m <= 0 || v.final_views <= 0) continue;
                    x.push_back(m);
                    y.push_back(v.final_views);
                    lx.push_back(std::log(m));
                    ly.push_back(std::log(v.final_views));
                }
                if (x.size() >= 10) {
                    try {
                        corr << name << '\t' << format_double(stats::pearson(lx, ly)) << '\t'
                             << format_double(stats::spearman(lx, ly)) << '\t' << x.size() << '\n';
                        const auto fit = popularity::power_law_fit(x, y);
                        laws << name << '\t' << format_double(fit.exponent) << '\t'
                             << format_double(fit.stderr_exponent) << '\t' << fit.n << '\n';
                    } catch (const ValidationError&) {
                        corr << name << "\tna\tna\t" << x.size() << '\n';
                    }
                } else {
                    corr << name << "\tna\tna\t" << x.size() << '\n';
                }
            }
        }
        if (!vectors.empty()) {
            std::vector<double> shares, views;
            for (const auto& v : vectors) {
                if (v.shares <= 0) continue;
                shares.push_back(v.shares);
                views.push_back(v.final_views);
            }
            if (!shares.empty()) {
                const auto edges =
                    popularity::log_bin_edges(*std::min_element(shares.begin(), shares.end()),
                                              *std::max_element(shares.begin(), shares.end()));
                const auto rows = popularity::binned_means(shares, views, edges);
                std::ofstream out(fs::path(out_dir) / "binned_views_by_shares.tsv");
                out << "bin_low\tbin_high\tbin_center\tcount\tmean_views\tstderr\n";
                for (const auto& r : rows)
                    out << format_double(r.bin_low) << '\t' << format_double(r.bin_high) << '\t'
                        << format_double(r.bin_center) << '\t' << r.count << '\t'
                        << format_double(r.mean_y) << '\t' << format_double(r.stderr_y) << '\n';
            }
        }

        if (vectors.size() >= 50) {
            const auto fit = popularity::fit_substitutes_model(vectors);
            popularity::write_fit_json(fit, (fs::path(out_dir) / "fit.json").string());
            outcome.fitted = true;
            if (static_cast<int>(vectors.size()) >= 10 * config.cv_folds) {
                const auto cv = popularity::cross_validate(vectors, config.cv_folds, config.seed,
                                                           config.popular_threshold);
                popularity::write_cv_json(cv, (fs::path(out_dir) / "cv.json").string());
                outcome.cross_validated = true;
            }
        }
        return outcome;
    });
}

cluster::ClusterReport stage_cluster(const ingest::EventStore& store,
                                     const std::vector<profiles::UserFeatures>& features,
                                     const PipelineConfig& config, const std::string& out_dir) {
    return guarded<cluster::ClusterReport>("cluster", [&] {
        fs::create_directories(out_dir);

        std::vector<const profiles::UserFeatures*> eligible;
        for (const auto& f : features)
            if (f.active_for_clustering) eligible.push_back(&f);

        std::vector<cluster::CategoryDistribution> distributions;
        std::vector<std::string> bios;
        std::vector<std::string> ids;
        for (const auto* f : eligible) {
            cluster::CategoryDistribution d;
            d.user_id = f->user_id;
            d.weights = f->category_fractions;
            distributions.push_back(std::move(d));
            bios.push_back(store.user(f->user_id).bio);
            ids.push_back(f->user_id);
        }

        cluster::FeatureMatrix matrix;
        auto add_column = [&](const std::string& name,
                              const std::function<std::optional<double>(const profiles::UserFeatures&,
                                                                        const UserRecord&)>& value) {
            std::vector<double> column;
            std::vector<bool> defined;
            double sum = 0;
            std::int64_t n = 0;
            for (const auto* f : eligible) {
                const auto v = value(*f, store.user(f->user_id));
                defined.push_back(v.has_value());
                column.push_back(v.value_or(0.0));
                if (v) {
                    sum += *v;
                    ++n;
                }
            }
            if (n == 0) return;
            const double fill = sum / static_cast<double>(n);  // neutral under mean-diff tests
            for (std::size_t i = 0; i < column.size(); ++i)
                if (!defined[i]) column[i] = fill;
            matrix[name] = std::move(column);
        };
        for (const auto& c : twitter_feature_columns()) add_column(c.name, c.value);
        for (const auto& c : youtube_feature_columns()) add_column(c.name, c.value);
        add_column("male", [](const auto& f, const auto&) {
            return opt(f.gender == profiles::Gender::male ? 1.0 : 0.0);
        });
        add_column("female", [](const auto& f, const auto&) {
            return opt(f.gender == profiles::Gender::female ? 1.0 : 0.0);
        });
        add_column("lag_stddev", [](const auto& f, const auto&) { return opt(f.aggregates.lag_stddev); });
        add_column("mean_lag", [](const auto& f, const auto&) { return opt(f.aggregates.mean_lag); });
        add_column("num_videos_shared",
                   [](const auto& f, const auto&) { return opt(double(f.aggregates.num_videos_shared)); });
        for (Category c : interest_categories())
            add_column("T_" + category_slug(c), [c](const auto& f, const auto&) {
                return opt(f.interests[static_cast<std::size_t>(c)]);
            });
        for (Category c : video_categories())
            add_column("Y_" + category_slug(c), [c](const auto& f, const auto&) {
                return opt(f.category_fractions[static_cast<std::size_t>(c)]);
            });

        cluster::ClusterOptions options;
        options.k = config.cluster_k;
        options.permutations = config.permutations;
        options.seed = config.seed;
        options.threads = config.threads;
        auto report = cluster::cluster_users(distributions, bios, matrix, options);
        cluster::write_clusters_tsv(report, (fs::path(out_dir) / "clusters.tsv").string());

        // interest alignment over the same eligible users
        std::vector<profiles::InterestVector> twitter, youtube;
        for (const auto* f : eligible) {
            twitter.push_back(f->interests);
            profiles::InterestVector y{};
            for (std::size_t c = 0; c < f->category_fractions.size(); ++c) y[c] = f->category_fractions[c];
            youtube.push_back(y);
        }
        const auto alignment = cluster::interest_alignment(ids, twitter, youtube);
        cluster::write_alignment_tsv(alignment, (fs::path(out_dir) / "alignment.tsv").string());
        return report;
    });
}

void run_pipeline(const PipelineConfig& config, const std::string& out_dir) {
    fs::create_directories(out_dir);
    const fs::path base(out_dir);

    const auto store = stage_ingest(config, (base / "store").string());
    const auto partition = stage_classify(store, (base / "accounts.tsv").string(), config.threads);
    const auto features = stage_features(store, config, (base / "features.jsonl").string());
    stage_lags(store, partition, features, (base / "lags").string());
    stage_stats(store, features, partition, config, (base / "stats").string());

    const std::vector<std::string> regular_ids(partition.regular.begin(), partition.regular.end());
    const std::vector<std::string> promo_ids(partition.promotional.begin(), partition.promotional.end());
    const auto regular_outcome = stage_predict(store, regular_ids, config, (base / "predict_regular").string());
    const auto promo_outcome = stage_predict(store, promo_ids, config, (base / "predict_promo").string());
    const auto clusters = stage_cluster(store, features, config, (base / "clusters").string());

    ordered_json manifest;
    manifest["version"] = kVersion;
    ordered_json cfg;
    cfg["cutoff"] = config.cutoff;
    cfg["as_of"] = store.config.as_of;
    cfg["cluster_k"] = config.cluster_k;
    cfg["cv_folds"] = config.cv_folds;
    cfg["permutations"] = config.permutations;
    cfg["seed"] = config.seed;
    cfg["polarization_like_exponent"] = config.polarization.like_exponent;
    cfg["polarization_dislike_exponent"] = config.polarization.dislike_exponent;
    cfg["weight_video_stats_by_event"] = config.weight_video_stats_by_event;
    cfg["min_final_view_age_days"] = config.min_final_view_age_days;
    cfg["popular_threshold"] = config.popular_threshold;
    manifest["config"] = cfg;
    ordered_json counts;
    counts["users"] = store.users.size();
    counts["videos"] = store.videos.size();
    counts["events_retained"] = store.events.size();
    counts["events_quarantined"] = store.quarantined.size();
    counts["events_removed_negative_lag"] = store.report.removed_negative_lag;
    counts["events_removed_legacy"] = store.report.removed_legacy_video_events;
    counts["videos_removed_legacy"] = store.report.removed_legacy_videos;
    counts["sharers"] = partition.details.size();
    counts["promotional"] = partition.promotional.size();
    counts["regular"] = partition.regular.size();
    counts["features_rows"] = features.size();
    counts["attention_vectors_regular"] = regular_outcome.vectors;
    counts["attention_vectors_promotional"] = promo_outcome.vectors;
    counts["clusters"] = clusters.clusters.size();
    counts["clustered_users"] = clusters.assignments.size();
    manifest["counts"] = counts;
    ordered_json stages;
    stages["predict_regular_fitted"] = regular_outcome.fitted;
    stages["predict_regular_cross_validated"] = regular_outcome.cross_validated;
    stages["predict_promotional_fitted"] = promo_outcome.fitted;
    stages["predict_promotional_cross_validated"] = promo_outcome.cross_validated;
    stages["mean_shares_per_user"] = partition.mean_shares_per_user;
    manifest["stages"] = stages;

    std::ofstream out(base / "manifest.json");
    out << manifest.dump(2) << "\n";
}

}  // namespace tubewire::pipeline
