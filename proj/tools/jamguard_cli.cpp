#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "jamguard/commands.hpp"
#include "jamguard/error.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Jamming detection pipeline: synthetic KPI generation, detectors, Bayesian-network correction"};
    app.require_subcommand(1);

    jamguard::CommandOptions opt;
    std::string config, out, scenario, evidence;
    std::uint64_t seed = 0;
    auto* config_opt = app.add_option("--config", config, "Pipeline config JSON")->check(CLI::ExistingFile);
    auto* seed_opt = app.add_option("--seed", seed, "Master seed (overrides the config)");
    auto* out_opt = app.add_option("--out", out, "Output directory");
    app.add_option("--model", opt.models, "Restrict to these models (repeatable)");
    auto* scen_opt = app.add_option("--scenario", scenario, "Scenario id used by bnm and correct");

    auto* gen = app.add_subcommand("gen", "Generate the labelled dataset CSV");
    auto* train = app.add_subcommand("train", "Train and save the selected models");
    auto* eval = app.add_subcommand("eval", "Evaluate saved models: ROC/AUC, Youden threshold, confusion");
    auto* bnm = app.add_subcommand("bnm", "Fit the Bayesian network and optionally answer a posterior query");
    auto* ev_opt = bnm->add_option("--evidence", evidence, "JSON evidence file, e.g. {\"PUSCH_SNR\": 15.3, \"CQI\": 12}");
    auto* correct = app.add_subcommand("correct", "Correct a weakened ESN with the fitted network");
    auto* bench = app.add_subcommand("bench", "Time training and per-window inference");
    auto* report = app.add_subcommand("report", "Collate all artifacts into one Markdown summary");
    report->add_flag("--force", opt.force, "Accept artifacts with different config hashes");
    auto* all = app.add_subcommand("all", "Run gen, train, eval, bnm, correct, bench and report");

    CLI11_PARSE(app, argc, argv);

    if (*config_opt) opt.config_path = config;
    if (*seed_opt) opt.seed = seed;
    if (*out_opt) opt.out_dir = out;
    if (*scen_opt) opt.scenario = scenario;
    if (*ev_opt) opt.evidence_path = evidence;

    try {
        const auto cfg = opt.resolve();
        if (*gen) return jamguard::cmd_gen(cfg);
        if (*train) return jamguard::cmd_train(cfg);
        if (*eval) return jamguard::cmd_eval(cfg);
        if (*bnm) return jamguard::cmd_bnm(cfg, opt.evidence_path);
        if (*correct) return jamguard::cmd_correct(cfg);
        if (*bench) return jamguard::cmd_bench(cfg);
        if (*report) return jamguard::cmd_report(cfg, opt.force);
        if (*all) return jamguard::cmd_all(cfg);
    } catch (const std::exception& e) {
        std::cerr << "jamguard: error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
