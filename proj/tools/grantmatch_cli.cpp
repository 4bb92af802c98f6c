// grantmatch: ingest grant documents, mine association rules, estimate
// research fields and match grants to researchers.
//
// Exit codes: 0 success, 1 input error, 2 configuration error.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "grantmatch/grantmatch.hpp"

namespace {

constexpr int kInputError = 1;
constexpr int kConfigError = 2;

struct Options {
    std::string config;
    std::string min_supp;
    std::string min_conf;
    std::string out;
};

grantmatch::PipelineConfig resolve(const Options& opts) {
    grantmatch::PipelineConfig cfg;
    if (!opts.config.empty()) cfg = grantmatch::load_config(opts.config);
    if (!opts.min_supp.empty()) grantmatch::apply_setting(cfg, "min_supp", opts.min_supp);
    if (!opts.min_conf.empty()) grantmatch::apply_setting(cfg, "min_conf", opts.min_conf);
    if (!opts.out.empty()) grantmatch::apply_setting(cfg, "out_dir", opts.out);
    if (cfg.out_dir.empty()) throw grantmatch::ConfigError("no output directory (set out_dir or pass --out)");
    cfg.params.validate();
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Classify grant announcements and researcher profiles into a research-field taxonomy and match them"};
    app.require_subcommand(1);

    Options opts;
    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", opts.config, "Pipeline configuration file (key = value)");
        cmd->add_option("--min-supp", opts.min_supp, "Minimum support: p/q, decimal, or 'auto'");
        cmd->add_option("--min-conf", opts.min_conf, "Minimum confidence: p/q or decimal");
        cmd->add_option("--out", opts.out, "Output directory");
    };

    using Stage = void (*)(const grantmatch::PipelineConfig&, grantmatch::StageLog);
    const std::pair<const char*, std::pair<const char*, Stage>> commands[] = {
        {"ingest", {"Turn corpus documents into transaction files", grantmatch::cmd_ingest}},
        {"mine", {"Mine association rules from transaction files", grantmatch::cmd_mine}},
        {"report", {"Estimate research fields and write the match report", grantmatch::cmd_report}},
        {"match", {"Match existing field estimates against researchers", grantmatch::cmd_match}},
        {"run", {"Run ingest, mine and report in sequence", grantmatch::cmd_run}},
    };
    Stage selected = nullptr;
    for (const auto& [name, entry] : commands) {
        auto* cmd = app.add_subcommand(name, entry.first);
        add_common(cmd);
        cmd->callback([&selected, stage = entry.second] { selected = stage; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kConfigError;
    }

    try {
        const auto cfg = resolve(opts);
        selected(cfg, {std::cout, std::cerr});
    } catch (const grantmatch::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const grantmatch::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInputError;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInputError;
    }
    return 0;
}
