#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "helpers.hpp"
#include "tubewire/profiles.hpp"
#include "tubewire/synth.hpp"

using namespace tubewire;
using namespace tubewire::profiles;
using namespace testutil;

TEST_CASE("gender: exact first-token lookup") {
    NameDictionary dict;
    dict.add("john", Gender::male);
    dict.add("mary", Gender::female);
    CHECK(infer_gender("John Smith", dict) == Gender::male);
    CHECK(infer_gender("Xq7 Bot", dict) == Gender::unknown);
    // hyphenated token is not an exact match
    CHECK(infer_gender("mary-jane d.", dict) == Gender::unknown);
    CHECK(infer_gender("", dict) == Gender::unknown);
    CHECK(infer_gender("  mary anne", dict) == Gender::female);
}

TEST_CASE("roles: token lists with word boundaries") {
    auto r = infer_roles("proud mom of two");
    CHECK(r.mother);
    CHECK_FALSE(r.father);
    CHECK_FALSE(r.student);

    auto r2 = infer_roles("studying CS; husband");
    CHECK(r2.student);
    CHECK(r2.father);
    CHECK_FALSE(r2.mother);

    auto r3 = infer_roles("motherboard enthusiast");
    CHECK_FALSE(r3.mother);

    auto r4 = infer_roles("Wife, MOM, dreamer");
    CHECK(r4.mother);
}

TEST_CASE("geo: urban, rural, country-level, non-US, unknown") {
    Gazetteer gaz;
    gaz.add("chicago, il", {"US", "chicago"});
    gaz.add("peoria, il", {"US", "peoria"});
    gaz.add("usa", {"US", ""});
    gaz.add("london", {"GB", "london"});
    TopCities top;
    top.add("Chicago");

    CHECK(infer_geo("Chicago, IL", gaz, top) == Geo::urban_us);
    CHECK(infer_geo("Peoria, IL", gaz, top) == Geo::rural_us);
    CHECK(infer_geo("USA", gaz, top) == Geo::us_other);
    CHECK(infer_geo("London", gaz, top) == Geo::non_us);
    CHECK(infer_geo("", gaz, top) == Geo::unknown);
    CHECK(infer_geo("Mars Colony 7", gaz, top) == Geo::unknown);
}

TEST_CASE("bundled gazetteer resolves comma forms through the city prefix") {
    const auto& gaz = Gazetteer::bundled();
    const auto& top = TopCities::bundled();
    CHECK(infer_geo("Chicago, IL", gaz, top) == Geo::urban_us);
    CHECK(infer_geo("peoria", gaz, top) == Geo::rural_us);
    CHECK(infer_geo("United States", gaz, top) == Geo::us_other);
    CHECK(infer_geo("London", gaz, top) == Geo::non_us);
}

namespace {

// store with one sharer whose friends are directory-listed hub users
struct InterestFixture {
    ingest::EventStore store;
    InterestDirectory directory;

    InterestFixture() {
        const Timestamp base = parse_timestamp("2013-06-01");
        auto sharer = make_user("u1", "main");
        sharer.friend_ids = {"f_espn", "f_x", "f_unlisted"};
        auto espn = make_user("f_espn", "espn");
        auto x = make_user("f_x", "mixmaster");
        auto unlisted = make_user("f_unlisted", "nobody");
        auto video = make_video("v1", "chan", base);
        std::vector<SharingEvent> events = {make_event("t1", "u1", "v1", base + 60)};
        store = ingest::cleanse(store_from_records({sharer, espn, x, unlisted}, {video}, events), {});

        directory.add({"espn", "sports", 99});
        directory.add({"MixMaster", "music", 33});
    }
};

}  // namespace

TEST_CASE("interest distribution: prominence weighting") {
    InterestFixture fx;
    const auto& user = fx.store.user("u1");

    std::int64_t matched = 0;
    auto weights = interest_distribution(user, fx.store, fx.directory, CategoryMapping::bundled(), &matched);
    CHECK(matched == 2);
    CHECK(weights[static_cast<std::size_t>(Category::sports)] == doctest::Approx(99.0 / 132.0));
    CHECK(weights[static_cast<std::size_t>(Category::music)] == doctest::Approx(33.0 / 132.0));

    double sum = 0;
    for (double w : weights) sum += w;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("interest distribution: single friend gives weight 1; no match gives zero vector") {
    InterestFixture fx;
    auto solo = make_user("u2", "solo");
    solo.friend_ids = {"f_espn"};
    fx.store.users["u2"] = solo;

    std::int64_t matched = 0;
    auto weights = interest_distribution(solo, fx.store, fx.directory, CategoryMapping::bundled(), &matched);
    CHECK(matched == 1);
    CHECK(weights[static_cast<std::size_t>(Category::sports)] == doctest::Approx(1.0));

    auto lonely = make_user("u3", "lonely");
    lonely.friend_ids = {"f_unlisted"};
    fx.store.users["u3"] = lonely;
    weights = interest_distribution(lonely, fx.store, fx.directory, CategoryMapping::bundled(), &matched);
    CHECK(matched == 0);
    for (double w : weights) CHECK(w == 0.0);
}

TEST_CASE("interest distribution ignores duplicate friend ids") {
    InterestFixture fx;
    auto dup = make_user("u4", "dup");
    dup.friend_ids = {"f_espn", "f_espn", "f_x"};
    fx.store.users["u4"] = dup;
    auto weights = interest_distribution(dup, fx.store, fx.directory, CategoryMapping::bundled());
    CHECK(weights[static_cast<std::size_t>(Category::sports)] == doctest::Approx(99.0 / 132.0));
}

TEST_CASE("leaning: majority, tie, none; order and duplicates do not matter") {
    const Timestamp base = parse_timestamp("2013-06-01");
    auto left1 = make_user("L1", "barackobama");
    auto left2 = make_user("L2", "JoeBiden");
    auto right1 = make_user("R1", "mittromney");
    auto video = make_video("v1", "chan", base);

    auto majority = make_user("u1", "a");
    majority.friend_ids = {"L1", "L2", "R1"};
    auto tied = make_user("u2", "b");
    tied.friend_ids = {"R1", "L1"};
    auto none = make_user("u3", "c");
    auto dup = make_user("u4", "d");
    dup.friend_ids = {"R1", "R1", "R1", "L1", "L2"};  // distinct: 1 right, 2 left

    std::vector<SharingEvent> events = {make_event("t1", "u1", "v1", base + 60)};
    auto store = ingest::cleanse(
        store_from_records({left1, left2, right1, majority, tied, none, dup}, {video}, events), {});

    const auto& seeds = PoliticalSeeds::bundled();
    CHECK(infer_leaning(store.user("u1"), store, seeds) == Leaning::left);
    CHECK(infer_leaning(store.user("u2"), store, seeds) == Leaning::apolitical);
    CHECK(infer_leaning(store.user("u3"), store, seeds) == Leaning::apolitical);
    CHECK(infer_leaning(store.user("u4"), store, seeds) == Leaning::left);

    auto shuffled = store.user("u1");
    std::reverse(shuffled.friend_ids.begin(), shuffled.friend_ids.end());
    CHECK(infer_leaning(shuffled, store, seeds) == Leaning::left);
}

TEST_CASE("political ratio over retained events") {
    const Timestamp base = parse_timestamp("2013-06-01");
    std::vector<UserRecord> users = {make_user("u1", "a"), make_user("u2", "b")};
    std::vector<VideoRecord> videos = {
        make_video("v_news", "c", base, Category::news_politics),
        make_video("v_music1", "c", base, Category::music),
        make_video("v_music2", "c", base, Category::music),
        make_video("v_music3", "c", base, Category::music),
    };
    std::vector<SharingEvent> events = {
        make_event("t1", "u1", "v_news", base + 1),
        make_event("t2", "u1", "v_music1", base + 2),
        make_event("t3", "u1", "v_music2", base + 3),
        make_event("t4", "u1", "v_music3", base + 4),
        make_event("t5", "u2", "v_news", base + 5),
    };
    auto store = ingest::cleanse(store_from_records(users, videos, events), {});
    CHECK(political_ratio(store.user("u1"), store) == doctest::Approx(0.25));
    CHECK(political_ratio(store.user("u2"), store) == doctest::Approx(1.0));

    auto stranger = make_user("u9", "z");
    CHECK_THROWS_AS(political_ratio(stranger, store), ValidationError);
}

TEST_CASE("planted synthetic groups recover the political means within 0.02") {
    TempDir dir("polsynth");
    synth::SyntheticConfig config;
    config.user_count = 400;
    config.video_count = 1200;
    config.event_count = 10000;
    config.left_fraction = 0.3;
    config.right_fraction = 0.3;
    config.seed = 7;
    auto truth = synth::generate_synthetic(config, dir.path.string());

    auto store = ingest::cleanse(
        ingest::parse_streams((dir.path / "users.jsonl").string(), (dir.path / "videos.jsonl").string(),
                              (dir.path / "events.jsonl").string()),
        {});
    FeatureContext ctx;
    auto features = extract_features(store, ctx);

    std::map<std::string, std::vector<double>> ratios;
    for (const auto& f : features) {
        const auto& gt = truth.users.at(f.user_id);
        if (gt.promotional) continue;
        ratios[gt.leaning].push_back(f.political_ratio);
    }
    CHECK(std::abs(mean(ratios.at("left")) - config.mu_left) < 0.02);
    CHECK(std::abs(mean(ratios.at("right")) - config.mu_right) < 0.02);
    CHECK(std::abs(mean(ratios.at("apolitical")) - config.mu_apolitical) < 0.02);
}

TEST_CASE("extract_features ties everything together and is thread independent") {
    const Timestamp base = parse_timestamp("2013-06-01");
    auto sharer = make_user("u1", "main");
    sharer.display_name = "John Smith";
    sharer.bio = "proud dad, studying music";
    sharer.location_raw = "Chicago";
    sharer.friend_ids = {"f_espn"};
    auto espn = make_user("f_espn", "espn");
    std::vector<VideoRecord> videos = {make_video("v1", "chan", base, Category::music),
                                       make_video("v2", "chan", base, Category::news_politics)};
    std::vector<SharingEvent> events = {make_event("t1", "u1", "v1", base + 60),
                                        make_event("t2", "u1", "v2", base + 120)};
    auto store = ingest::cleanse(store_from_records({sharer, espn}, videos, events), {});

    InterestDirectory directory;
    directory.add({"espn", "sports", 99});
    FeatureContext ctx;
    ctx.directory = &directory;

    auto features = extract_features(store, ctx, 1);
    REQUIRE(features.size() == 1);
    const auto& f = features[0];
    CHECK(f.gender == Gender::male);
    CHECK(f.role_father);
    CHECK(f.role_student);
    CHECK_FALSE(f.role_mother);
    CHECK(f.geo == Geo::urban_us);
    CHECK(f.interests_matched);
    CHECK(f.political_ratio == doctest::Approx(0.5));
    CHECK(f.category_fractions[static_cast<std::size_t>(Category::music)] == doctest::Approx(0.5));
    CHECK_FALSE(f.active_for_clustering);  // 2 videos, 1 matched friend

    auto parallel = extract_features(store, ctx, 4);
    REQUIRE(parallel.size() == 1);
    CHECK(parallel[0].gender == f.gender);
    CHECK(parallel[0].political_ratio == f.political_ratio);
}

TEST_CASE("features jsonl round trip") {
    const Timestamp base = parse_timestamp("2013-06-01");
    auto sharer = make_user("u1", "main");
    sharer.display_name = "Mary Lee";
    std::vector<VideoRecord> videos = {make_video("v1", "chan", base)};
    std::vector<SharingEvent> events = {make_event("t1", "u1", "v1", base + 60)};
    auto store = ingest::cleanse(store_from_records({sharer}, videos, events), {});
    auto features = extract_features(store, FeatureContext{});

    TempDir dir("featrt");
    const std::string path = (dir.path / "features.jsonl").string();
    write_features_jsonl(features, path);
    auto loaded = read_features_jsonl(path);
    REQUIRE(loaded.size() == features.size());
    CHECK(loaded[0].user_id == features[0].user_id);
    CHECK(loaded[0].gender == features[0].gender);
    CHECK(loaded[0].political_ratio == features[0].political_ratio);
    CHECK(loaded[0].aggregates.median_lag == features[0].aggregates.median_lag);
    CHECK(loaded[0].category_fractions == features[0].category_fractions);
}

TEST_CASE("table loaders reject malformed rows") {
    TempDir dir("tables");
    {
        std::ofstream out(dir.path / "names.tsv");
        out << "john\tmale\nbad_row_without_gender\n";
    }
    CHECK_THROWS_AS(NameDictionary::load_tsv((dir.path / "names.tsv").string()), ValidationError);
    {
        std::ofstream out(dir.path / "seeds.tsv");
        out << "someone\tleft\nsomeone\tright\n";
    }
    CHECK_THROWS_AS(PoliticalSeeds::load_tsv((dir.path / "seeds.tsv").string()), ValidationError);
    {
        std::ofstream out(dir.path / "dir.tsv");
        out << "espn\tsports\t99\nespn\tsports\t50\n";
    }
    CHECK_THROWS_AS(InterestDirectory::load_tsv((dir.path / "dir.tsv").string()), ValidationError);
}
