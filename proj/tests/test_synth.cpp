#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>

#include <json.hpp>

#include "helpers.hpp"
#include "tubewire/accounts.hpp"
#include "tubewire/pipeline.hpp"
#include "tubewire/popularity.hpp"
#include "tubewire/synth.hpp"

using namespace tubewire;
using namespace testutil;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

ingest::EventStore load_generated(const fs::path& dir, Timestamp as_of) {
    ingest::CleansingConfig config;
    config.as_of = as_of;
    return ingest::cleanse(ingest::parse_streams((dir / "users.jsonl").string(),
                                                 (dir / "videos.jsonl").string(),
                                                 (dir / "events.jsonl").string()),
                           config);
}

}  // namespace

TEST_CASE("generator output is byte-identical for a fixed seed") {
    TempDir a("synth_a"), b("synth_b");
    synth::SyntheticConfig config;
    config.seed = 123;
    synth::generate_synthetic(config, a.path.string());
    synth::generate_synthetic(config, b.path.string());
    for (const char* name : {"users.jsonl", "videos.jsonl", "events.jsonl", "directory.tsv",
                             "ground_truth.json"})
        CHECK(slurp(a.path / name) == slurp(b.path / name));

    synth::SyntheticConfig other = config;
    other.seed = 124;
    TempDir c("synth_c");
    synth::generate_synthetic(other, c.path.string());
    CHECK(slurp(a.path / "events.jsonl") != slurp(c.path / "events.jsonl"));
}

TEST_CASE("infeasible configs are rejected") {
    synth::SyntheticConfig config;
    config.video_count = 2000;
    config.event_count = 1999;
    TempDir dir("synth_bad");
    CHECK_THROWS_AS(synth::generate_synthetic(config, dir.path.string()), ValidationError);

    synth::SyntheticConfig negative;
    negative.views_noise_sigma = -1;
    CHECK_THROWS_AS(synth::generate_synthetic(negative, dir.path.string()), ValidationError);
}

TEST_CASE("every video has at least one share and counts match the config") {
    TempDir dir("synth_cover");
    synth::SyntheticConfig config;
    config.seed = 5;
    auto truth = synth::generate_synthetic(config, dir.path.string());
    auto store = load_generated(dir.path, truth.as_of);

    CHECK(store.report.input_events ==
          config.event_count + (config.plant_cleansing_noise ? truth.noise_event_count : 0));
    CHECK(static_cast<std::int64_t>(store.events.size()) == config.event_count);

    std::set<std::string> with_events;
    for (const auto& e : store.events) with_events.insert(e.video_id);
    CHECK(with_events.size() == store.videos.size());  // min one share per surviving video
    CHECK(static_cast<std::int64_t>(store.videos.size()) == config.video_count);
}

TEST_CASE("planted promotional users are recovered by the default filter") {
    TempDir dir("synth_promo");
    synth::SyntheticConfig config;
    config.seed = 11;
    auto truth = synth::generate_synthetic(config, dir.path.string());
    auto store = load_generated(dir.path, truth.as_of);
    auto partition = accounts::partition_users(store, accounts::PromoConfig{});

    std::size_t recovered = 0;
    for (const auto& uid : truth.promo_user_ids)
        if (partition.promotional.count(uid)) ++recovered;
    CHECK(static_cast<double>(recovered) >=
          0.95 * static_cast<double>(truth.promo_user_ids.size()));

    // intended branches fire
    std::size_t branch_matches = 0;
    for (const auto& d : partition.details) {
        auto it = truth.users.find(d.user_id);
        if (it == truth.users.end() || !it->second.promotional) continue;
        if (d.fired_branch == it->second.intended_branch) ++branch_matches;
    }
    CHECK(static_cast<double>(branch_matches) >=
          0.9 * static_cast<double>(truth.promo_user_ids.size()));

    // no regular user is mislabeled on the planted data
    for (const auto& uid : truth.regular_user_ids) CHECK(partition.regular.count(uid) == 1);
}

TEST_CASE("planted exponents round-trip through ingest, attention and fit") {
    TempDir dir("synth_eq1");
    synth::SyntheticConfig config;
    config.user_count = 150;
    config.video_count = 900;
    config.event_count = 4000;
    config.views_noise_sigma = 0.6;
    config.seed = 17;
    auto truth = synth::generate_synthetic(config, dir.path.string());
    auto store = load_generated(dir.path, truth.as_of);

    auto vectors = popularity::attention_vectors(store, truth.regular_user_ids);
    REQUIRE(vectors.size() >= 400);
    auto fit = popularity::fit_substitutes_model(vectors);
    for (std::size_t i = 0; i < 5; ++i) {
        CAPTURE(i);
        CHECK(std::abs(fit.exponents[i] - config.exponents[i]) < 4.0 * fit.stderrs[i] + 0.02);
    }
    CHECK(fit.r_squared > 0.3);
}

TEST_CASE("promotional and regular first-week event sets are disjoint") {
    TempDir dir("synth_disjoint");
    synth::SyntheticConfig config;
    config.seed = 31;
    auto truth = synth::generate_synthetic(config, dir.path.string());
    auto store = load_generated(dir.path, truth.as_of);
    auto partition = accounts::partition_users(store, accounts::PromoConfig{});

    auto slice = ingest::first_week_slice(store);
    std::set<std::string> regular_tweets, promo_tweets;
    for (const auto& [vid, events] : slice)
        for (const auto& e : events) {
            if (partition.regular.count(e.user_id)) regular_tweets.insert(e.tweet_id);
            if (partition.promotional.count(e.user_id)) promo_tweets.insert(e.tweet_id);
        }
    for (const auto& t : regular_tweets) CHECK(promo_tweets.count(t) == 0);
    CHECK(!regular_tweets.empty());
    CHECK(!promo_tweets.empty());
}

TEST_CASE("planted lag medians separate promotional from regular sharers") {
    TempDir dir("synth_lag");
    synth::SyntheticConfig config;
    config.seed = 19;
    auto truth = synth::generate_synthetic(config, dir.path.string());
    auto store = load_generated(dir.path, truth.as_of);
    const double promo = lags::group_median_lag(store, truth.promo_user_ids);
    const double regular = lags::group_median_lag(store, truth.regular_user_ids);
    CHECK(promo < regular);
    CHECK(promo / 3600.0 == doctest::Approx(config.promo_lag_median_hours).epsilon(0.5));
    CHECK(regular / 3600.0 == doctest::Approx(config.regular_lag_median_hours).epsilon(0.5));
}

TEST_CASE("full pipeline bundle is byte-identical across two runs") {
    TempDir data("pipe_data");
    synth::SyntheticConfig config;
    config.seed = 23;
    auto truth = synth::generate_synthetic(config, data.path.string());

    pipeline::PipelineConfig pc;
    pc.users_path = (data.path / "users.jsonl").string();
    pc.videos_path = (data.path / "videos.jsonl").string();
    pc.events_path = (data.path / "events.jsonl").string();
    pc.directory_path = (data.path / "directory.tsv").string();
    pc.as_of = truth.as_of;
    pc.cluster_k = 4;
    pc.permutations = 200;
    pc.seed = 9;

    TempDir out_a("pipe_a"), out_b("pipe_b");
    pc.threads = 1;
    pipeline::run_pipeline(pc, out_a.path.string());
    pc.threads = 4;  // thread count must not leak into any artifact
    pipeline::run_pipeline(pc, out_b.path.string());

    std::vector<fs::path> files_a;
    for (const auto& entry : fs::recursive_directory_iterator(out_a.path))
        if (entry.is_regular_file()) files_a.push_back(fs::relative(entry.path(), out_a.path));
    std::sort(files_a.begin(), files_a.end());
    REQUIRE(!files_a.empty());
    for (const auto& rel : files_a) {
        CAPTURE(rel.string());
        REQUIRE(fs::exists(out_b.path / rel));
        CHECK(slurp(out_a.path / rel) == slurp(out_b.path / rel));
    }
}

TEST_CASE("bundle manifest row counts match the generated dataset") {
    TempDir data("manifest_data");
    synth::SyntheticConfig config;
    config.seed = 37;
    auto truth = synth::generate_synthetic(config, data.path.string());

    pipeline::PipelineConfig pc;
    pc.users_path = (data.path / "users.jsonl").string();
    pc.videos_path = (data.path / "videos.jsonl").string();
    pc.events_path = (data.path / "events.jsonl").string();
    pc.directory_path = (data.path / "directory.tsv").string();
    pc.as_of = truth.as_of;
    pc.cluster_k = 4;
    pc.permutations = 200;
    TempDir out("manifest_out");
    pipeline::run_pipeline(pc, out.path.string());

    std::ifstream in(out.path / "manifest.json");
    nlohmann::json manifest = nlohmann::json::parse(in);
    const auto& counts = manifest.at("counts");
    CHECK(counts.at("events_retained").get<std::int64_t>() == config.event_count);
    CHECK(counts.at("videos").get<std::int64_t>() == config.video_count);
    CHECK(counts.at("sharers").get<std::int64_t>() == truth.sharer_count);
    CHECK(counts.at("promotional").get<std::int64_t>() ==
          static_cast<std::int64_t>(truth.promo_user_ids.size()));
    CHECK(counts.at("features_rows").get<std::int64_t>() == truth.sharer_count);
    CHECK(counts.at("events_removed_negative_lag").get<std::int64_t>() +
              counts.at("events_removed_legacy").get<std::int64_t>() ==
          truth.noise_event_count);
}

TEST_CASE("pipeline aborts with the stage name on bad input") {
    pipeline::PipelineConfig pc;
    pc.users_path = "/nonexistent/users.jsonl";
    pc.videos_path = "/nonexistent/videos.jsonl";
    pc.events_path = "/nonexistent/events.jsonl";
    TempDir out("pipe_fail");
    try {
        pipeline::run_pipeline(pc, out.path.string());
        FAIL("expected StageError");
    } catch (const pipeline::StageError& e) {
        CHECK(e.stage() == "ingest");
        CHECK(e.is_validation());
    }
}

TEST_CASE("ground truth round trip") {
    TempDir dir("synth_gt");
    synth::SyntheticConfig config;
    config.seed = 29;
    auto truth = synth::generate_synthetic(config, dir.path.string());
    auto loaded = synth::read_ground_truth((dir.path / "ground_truth.json").string());
    CHECK(loaded.as_of == truth.as_of);
    CHECK(loaded.users.size() == truth.users.size());
    CHECK(loaded.promo_user_ids.size() == truth.promo_user_ids.size());
    for (const auto& [uid, gt] : truth.users) {
        const auto& l = loaded.users.at(uid);
        CHECK(l.leaning == gt.leaning);
        CHECK(l.promotional == gt.promotional);
        CHECK(l.intended_branch == gt.intended_branch);
    }
}
