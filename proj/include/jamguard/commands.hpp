#pragma once

#include <optional>
#include <string>
#include <vector>

#include "jamguard/pipeline.hpp"

namespace jamguard {

/// Options shared by every subcommand.
struct CommandOptions {
    std::optional<std::string> config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::vector<std::string> models;
    std::optional<std::string> scenario;
    std::optional<std::string> evidence_path;  // bnm
    bool force = false;                        // report

    /// Defaults, then the config file, then the flags.
    PipelineConfig resolve() const;
};

/// Artifact locations below the output directory.
struct ArtifactPaths {
    std::string root;
    std::string dataset() const;
    std::string models_dir() const;
    std::string model(const std::string& name) const;  // .json, or .bin for the ESN
    std::string scaler() const;
    std::string split() const;
    std::string manifest() const;
    std::string eval_json() const;
    std::string eval_md() const;
    std::string roc_dir() const;
    std::string bnm_json() const;
    std::string bnm_md() const;
    std::string posterior_json() const;
    std::string correction_json() const;
    std::string correction_md() const;
    std::string bench_json() const;
    std::string bench_md() const;
    std::string report_md() const;
    std::string report_json() const;
};

// Each command returns 0 on success and throws jamguard::Error on failure.
int cmd_gen(const PipelineConfig& cfg);
int cmd_train(const PipelineConfig& cfg);
int cmd_eval(const PipelineConfig& cfg);
int cmd_bnm(const PipelineConfig& cfg, const std::optional<std::string>& evidence_path = std::nullopt);
int cmd_correct(const PipelineConfig& cfg);
int cmd_bench(const PipelineConfig& cfg);
int cmd_report(const PipelineConfig& cfg, bool force = false);
/// gen, train, eval, bnm, correct, bench, report.
int cmd_all(const PipelineConfig& cfg);

}  // namespace jamguard
