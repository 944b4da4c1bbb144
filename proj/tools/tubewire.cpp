// Command-line front end: each subcommand runs one pipeline stage against
// files on disk, `run` executes the whole thing into a report bundle.

#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "tubewire/pipeline.hpp"
#include "tubewire/synth.hpp"

namespace fs = std::filesystem;
using namespace tubewire;

namespace {

struct CommonArgs {
    int threads = 0;
    std::uint64_t seed = 1;
};

std::string require_store(const std::string& dir) {
    if (!fs::exists(fs::path(dir) / "manifest.json"))
        throw ValidationError("store directory not found (run `tubewire ingest` first): " + dir);
    return dir;
}

Timestamp parse_date_arg(const std::string& text) {
    return text.empty() ? 0 : parse_timestamp(text);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"tubewire: tweet-to-video sharing analytics"};
    app.require_subcommand(1);

    CommonArgs common;
    app.add_option("--threads", common.threads, "worker threads (default: TUBEWIRE_THREADS or auto)");

    // ---- ingest ----
    auto* ingest_cmd = app.add_subcommand("ingest", "parse, validate and cleanse the three record streams");
    std::string users_path, videos_path, events_path, out_dir, cutoff = "2012-01-01", as_of;
    ingest_cmd->add_option("--users", users_path, "users.jsonl")->required();
    ingest_cmd->add_option("--videos", videos_path, "videos.jsonl")->required();
    ingest_cmd->add_option("--events", events_path, "events.jsonl")->required();
    ingest_cmd->add_option("--cutoff", cutoff, "drop videos uploaded before this date");
    ingest_cmd->add_option("--as-of", as_of, "crawl date for the final-views age filter (default: derived)");
    ingest_cmd->add_option("--out", out_dir, "store output directory")->required();

    // ---- classify ----
    auto* classify_cmd = app.add_subcommand("classify", "label promotional vs regular sharers");
    std::string store_dir, accounts_out = "accounts.tsv";
    classify_cmd->add_option("--store", store_dir, "store directory")->required();
    classify_cmd->add_option("--out", accounts_out, "accounts.tsv output path");

    // ---- features ----
    auto* features_cmd = app.add_subcommand("features", "derive per-user profile features");
    std::string f_store, features_out = "features.jsonl";
    std::string names_path, gazetteer_path, top_cities_path, directory_path, seeds_path, category_map_path;
    features_cmd->add_option("--store", f_store, "store directory")->required();
    features_cmd->add_option("--out", features_out, "features.jsonl output path");
    features_cmd->add_option("--names", names_path, "name dictionary tsv (default: bundled)");
    features_cmd->add_option("--gazetteer", gazetteer_path, "gazetteer tsv (default: bundled)");
    features_cmd->add_option("--top-cities", top_cities_path, "top cities list (default: bundled)");
    features_cmd->add_option("--directory", directory_path, "interest directory tsv");
    features_cmd->add_option("--seeds", seeds_path, "political seeds tsv (default: bundled)");
    features_cmd->add_option("--category-map", category_map_path, "interest tag to category tsv");
    bool refit_polarization = false;
    features_cmd->add_flag("--refit-polarization", refit_polarization,
                           "recompute the polarization exponents from this corpus");

    // ---- lags ----
    auto* lags_cmd = app.add_subcommand("lags", "inter-event time analytics");
    std::string l_store, l_accounts, l_features, l_out = "lags";
    std::string l_by = "category";
    lags_cmd->add_option("--store", l_store, "store directory")->required();
    lags_cmd->add_option("--by", l_by, "category|group|decile (group needs --accounts)")
        ->check(CLI::IsMember({"category", "group", "decile"}));
    lags_cmd->add_option("--accounts", l_accounts, "accounts.tsv from classify");
    lags_cmd->add_option("--features", l_features, "features.jsonl from features");
    lags_cmd->add_option("--out", l_out, "output directory");

    // ---- stats ----
    auto* stats_cmd = app.add_subcommand("stats", "marker matrices and significance reports");
    std::string s_store, s_features, s_accounts, s_out = "stats";
    int s_permutations = 1000;
    stats_cmd->add_option("--store", s_store, "store directory")->required();
    stats_cmd->add_option("--features", s_features, "features.jsonl")->required();
    stats_cmd->add_option("--accounts", s_accounts, "accounts.tsv")->required();
    stats_cmd->add_option("--permutations", s_permutations, "permutations per test");
    stats_cmd->add_option("--seed", common.seed, "randomization seed");
    stats_cmd->add_option("--out", s_out, "output directory");

    // ---- predict ----
    auto* predict_cmd = app.add_subcommand("predict", "first-week attention metrics and the views model");
    std::string p_store, p_accounts, p_group = "regular", p_out = "predict";
    int p_cv = 10;
    predict_cmd->add_option("--store", p_store, "store directory")->required();
    predict_cmd->add_option("--accounts", p_accounts, "accounts.tsv from classify")->required();
    predict_cmd->add_option("--group", p_group, "regular|promo")
        ->check(CLI::IsMember({"regular", "promo"}));
    predict_cmd->add_option("--cv", p_cv, "cross-validation folds");
    predict_cmd->add_option("--seed", common.seed, "fold shuffle seed");
    predict_cmd->add_option("--out", p_out, "output directory");

    // ---- cluster ----
    auto* cluster_cmd = app.add_subcommand("cluster", "group users by shared-category distributions");
    std::string c_store, c_features, c_out = "clusters";
    int c_k = 8, c_permutations = 1000;
    cluster_cmd->add_option("--store", c_store, "store directory")->required();
    cluster_cmd->add_option("--features", c_features, "features.jsonl")->required();
    cluster_cmd->add_option("--k", c_k, "number of clusters");
    cluster_cmd->add_option("--permutations", c_permutations, "permutations per delta test");
    cluster_cmd->add_option("--seed", common.seed, "randomization seed");
    cluster_cmd->add_option("--out", c_out, "output directory");

    // ---- synth ----
    auto* synth_cmd = app.add_subcommand("synth", "generate a planted-parameter synthetic dataset");
    synth::SyntheticConfig synth_config;
    std::string synth_out = "synth";
    synth_cmd->add_option("--users", synth_config.user_count, "sharer count");
    synth_cmd->add_option("--videos", synth_config.video_count, "video count");
    synth_cmd->add_option("--events", synth_config.event_count, "event count");
    synth_cmd->add_option("--promo-fraction", synth_config.promo_fraction, "promotional user fraction");
    synth_cmd->add_option("--sigma", synth_config.views_noise_sigma, "log-space views noise");
    synth_cmd->add_option("--scale", synth_config.views_scale, "views scale constant");
    synth_cmd->add_option("--promo-lag-hours", synth_config.promo_lag_median_hours,
                          "planted promotional lag median");
    synth_cmd->add_option("--regular-lag-hours", synth_config.regular_lag_median_hours,
                          "planted regular lag median");
    synth_cmd->add_option("--left-fraction", synth_config.left_fraction, "left-leaning user fraction");
    synth_cmd->add_option("--right-fraction", synth_config.right_fraction, "right-leaning user fraction");
    synth_cmd->add_option("--seed", synth_config.seed, "generator seed");
    synth_cmd->add_option("--out", synth_out, "output directory");

    // ---- run ----
    auto* run_cmd = app.add_subcommand("run", "full pipeline into a report bundle");
    pipeline::PipelineConfig run_config;
    std::string run_out = "bundle", run_cutoff = "2012-01-01", run_as_of;
    run_cmd->add_option("--users", run_config.users_path, "users.jsonl")->required();
    run_cmd->add_option("--videos", run_config.videos_path, "videos.jsonl")->required();
    run_cmd->add_option("--events", run_config.events_path, "events.jsonl")->required();
    run_cmd->add_option("--out", run_out, "bundle output directory");
    run_cmd->add_option("--cutoff", run_cutoff, "cleansing cutoff date");
    run_cmd->add_option("--as-of", run_as_of, "crawl date (default: derived)");
    run_cmd->add_option("--k", run_config.cluster_k, "clusters");
    run_cmd->add_option("--cv", run_config.cv_folds, "cross-validation folds");
    run_cmd->add_option("--permutations", run_config.permutations, "permutations per test");
    run_cmd->add_option("--seed", run_config.seed, "randomization seed");
    run_cmd->add_option("--names", run_config.names_path, "name dictionary tsv");
    run_cmd->add_option("--gazetteer", run_config.gazetteer_path, "gazetteer tsv");
    run_cmd->add_option("--top-cities", run_config.top_cities_path, "top cities list");
    run_cmd->add_option("--directory", run_config.directory_path, "interest directory tsv");
    run_cmd->add_option("--seeds", run_config.seeds_path, "political seeds tsv");
    run_cmd->add_option("--category-map", run_config.category_map_path, "tag to category tsv");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(ingest_cmd)) {
            pipeline::PipelineConfig config;
            config.users_path = users_path;
            config.videos_path = videos_path;
            config.events_path = events_path;
            config.cutoff = parse_timestamp(cutoff);
            config.as_of = parse_date_arg(as_of);
            config.threads = common.threads;
            const auto store = pipeline::stage_ingest(config, out_dir);
            std::cout << "store written to " << out_dir << ": " << store.users.size() << " users, "
                      << store.videos.size() << " videos, " << store.events.size()
                      << " events retained, " << store.quarantined.size() << " quarantined\n";
        } else if (app.got_subcommand(classify_cmd)) {
            const auto store = ingest::load_store(require_store(store_dir));
            const auto partition = pipeline::stage_classify(store, accounts_out, common.threads);
            std::cout << "classified " << partition.details.size() << " sharers: "
                      << partition.promotional.size() << " promotional, " << partition.regular.size()
                      << " regular (mu=" << format_double(partition.mean_shares_per_user) << ")\n";
        } else if (app.got_subcommand(features_cmd)) {
            const auto store = ingest::load_store(require_store(f_store));
            pipeline::PipelineConfig config;
            config.names_path = names_path;
            config.gazetteer_path = gazetteer_path;
            config.top_cities_path = top_cities_path;
            config.directory_path = directory_path;
            config.seeds_path = seeds_path;
            config.category_map_path = category_map_path;
            config.threads = common.threads;
            if (refit_polarization) {
                config.polarization = videometrics::refit_polarization_exponents(store);
                std::cout << "refit polarization exponents: a="
                          << format_double(config.polarization.like_exponent)
                          << " b=" << format_double(config.polarization.dislike_exponent) << "\n";
            }
            const auto features = pipeline::stage_features(store, config, features_out);
            std::cout << "wrote " << features.size() << " feature rows to " << features_out << "\n";
        } else if (app.got_subcommand(lags_cmd)) {
            const auto store = ingest::load_store(require_store(l_store));
            accounts::Partition partition;
            if (!l_accounts.empty()) partition = accounts::read_accounts_tsv(l_accounts);
            std::vector<profiles::UserFeatures> features;
            if (!l_features.empty()) features = profiles::read_features_jsonl(l_features);
            if (l_by == "group" && l_accounts.empty())
                throw ValidationError("lags --by group needs --accounts from `tubewire classify`");
            pipeline::LagsSelection selection;
            selection.by_category = l_by == "category";
            selection.by_group = l_by == "group";
            selection.by_decile = l_by == "decile";
            pipeline::stage_lags(store, partition, features, l_out, selection);
            std::cout << "lag analytics written to " << l_out << "\n";
        } else if (app.got_subcommand(stats_cmd)) {
            const auto store = ingest::load_store(require_store(s_store));
            const auto features = profiles::read_features_jsonl(s_features);
            const auto partition = accounts::read_accounts_tsv(s_accounts);
            pipeline::PipelineConfig config;
            config.permutations = s_permutations;
            config.seed = common.seed;
            config.threads = common.threads;
            pipeline::stage_stats(store, features, partition, config, s_out);
            std::cout << "significance reports written to " << s_out << "\n";
        } else if (app.got_subcommand(predict_cmd)) {
            const auto store = ingest::load_store(require_store(p_store));
            if (!fs::exists(p_accounts))
                throw ValidationError("accounts file not found (run `tubewire classify` first): " +
                                      p_accounts);
            const auto partition = accounts::read_accounts_tsv(p_accounts);
            const auto& group = p_group == "promo" ? partition.promotional : partition.regular;
            pipeline::PipelineConfig config;
            config.cv_folds = p_cv;
            config.seed = common.seed;
            config.threads = common.threads;
            const auto outcome = pipeline::stage_predict(
                store, {group.begin(), group.end()}, config, p_out);
            std::cout << "attention vectors: " << outcome.vectors << ", model "
                      << (outcome.fitted ? "fitted" : "skipped (too few vectors)") << ", cv "
                      << (outcome.cross_validated ? "done" : "skipped") << "\n";
        } else if (app.got_subcommand(cluster_cmd)) {
            const auto store = ingest::load_store(require_store(c_store));
            const auto features = profiles::read_features_jsonl(c_features);
            pipeline::PipelineConfig config;
            config.cluster_k = c_k;
            config.permutations = c_permutations;
            config.seed = common.seed;
            config.threads = common.threads;
            const auto report = pipeline::stage_cluster(store, features, config, c_out);
            std::cout << "clustered " << report.assignments.size() << " users into "
                      << report.clusters.size() << " clusters\n";
        } else if (app.got_subcommand(synth_cmd)) {
            const auto truth = synth::generate_synthetic(synth_config, synth_out);
            std::cout << "synthetic dataset in " << synth_out << ": " << truth.sharer_count
                      << " sharers (" << truth.promo_user_ids.size() << " promotional), as-of "
                      << format_timestamp(truth.as_of) << "\n";
        } else if (app.got_subcommand(run_cmd)) {
            run_config.cutoff = parse_timestamp(run_cutoff);
            run_config.as_of = parse_date_arg(run_as_of);
            run_config.threads = common.threads;
            pipeline::run_pipeline(run_config, run_out);
            std::cout << "report bundle written to " << run_out << "\n";
        }
    } catch (const pipeline::StageError& e) {
        std::cerr << "error in stage " << e.what() << "\n";
        return e.is_validation() ? 1 : 2;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
