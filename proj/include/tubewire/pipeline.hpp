#pragma once

#include <string>

#include "tubewire/accounts.hpp"
#include "tubewire/cluster.hpp"
#include "tubewire/ingest.hpp"
#include "tubewire/lags.hpp"
#include "tubewire/popularity.hpp"
#include "tubewire/profiles.hpp"

namespace tubewire::pipeline {

struct PipelineConfig {
    std::string users_path;
    std::string videos_path;
    std::string events_path;

    // optional lookup-table overrides; empty string = bundled default
    std::string names_path;
    std::string gazetteer_path;
    std::string top_cities_path;
    std::string directory_path;  // no default: interests stay unmatched without it
    std::string seeds_path;
    std::string category_map_path;

    Timestamp cutoff = parse_timestamp("2012-01-01");
    Timestamp as_of = 0;  // 0 = derive from the data
    int cluster_k = 8;
    int cv_folds = 10;
    int permutations = 1000;
    std::uint64_t seed = 1;
    int threads = 0;
    videometrics::PolarizationParams polarization;
    bool weight_video_stats_by_event = false;
    double min_final_view_age_days = 30.0;
    double popular_threshold = 10000.0;
};

// Wraps a failing stage with its name; the CLI reports "stage: cause" and
// keeps the validation-vs-internal distinction for the exit code.
class StageError : public Error {
public:
    StageError(const std::string& stage, const std::string& cause, bool validation)
        : Error(stage + ": " + cause), stage_(stage), validation_(validation) {}
    const std::string& stage() const { return stage_; }
    bool is_validation() const { return validation_; }

private:
    std::string stage_;
    bool validation_;
};

// ---- individual stages (each reads prior outputs plus config) ----

ingest::EventStore stage_ingest(const PipelineConfig& config, const std::string& store_dir);

accounts::Partition stage_classify(const ingest::EventStore& store, const std::string& accounts_path,
                                   int threads);

std::vector<profiles::UserFeatures> stage_features(const ingest::EventStore& store,
                                                   const PipelineConfig& config,
                                                   const std::string& features_path);

struct LagsSelection {
    bool by_category = true;
    bool by_group = true;
    bool by_decile = true;
};

void stage_lags(const ingest::EventStore& store, const accounts::Partition& partition,
                const std::vector<profiles::UserFeatures>& features, const std::string& out_dir,
                const LagsSelection& selection = {});

void stage_stats(const ingest::EventStore& store, const std::vector<profiles::UserFeatures>& features,
                 const accounts::Partition& partition, const PipelineConfig& config,
                 const std::string& out_dir);

struct PredictOutcome {
    std::size_t vectors = 0;
    bool fitted = false;
    bool cross_validated = false;
};

PredictOutcome stage_predict(const ingest::EventStore& store, const std::vector<std::string>& group_users,
                             const PipelineConfig& config, const std::string& out_dir);

cluster::ClusterReport stage_cluster(const ingest::EventStore& store,
                                     const std::vector<profiles::UserFeatures>& features,
                                     const PipelineConfig& config, const std::string& out_dir);

// Full pipeline into a report bundle; deterministic for fixed inputs and
// config. Writes manifest.json last.
void run_pipeline(const PipelineConfig& config, const std::string& out_dir);

}  // namespace tubewire::pipeline
