#pragma once

// Staged batch pipeline over an output directory:
//
//   ingest  corpus/<grant>/*.html|*.txt   -> transactions/<grant>.jsonl
//   mine    transactions/<grant>.jsonl    -> rules/<grant>.jsonl
//   report  rules/ + researchers + taxonomy -> estimates/*.jsonl, report/*
//
// Every stage reads only files written by the stage before it, and every
// file is written to a temporary name and renamed into place.

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "grantmatch/errors.hpp"
#include "grantmatch/fieldest.hpp"
#include "grantmatch/ingest.hpp"
#include "grantmatch/matching.hpp"
#include "grantmatch/mining.hpp"
#include "grantmatch/taxonomy.hpp"
#include "grantmatch/tokenizer.hpp"

namespace grantmatch {

namespace fs = std::filesystem;

struct PipelineConfig {
    fs::path corpus_dir;
    fs::path taxonomy_path;
    fs::path researchers_path;
    fs::path stopwords_path; // optional
    fs::path out_dir;
    MiningParams params;
    TokenizerConfig tokenizer; // stopwords and phrases are filled in by the stages
    GrantScoring scoring = GrantScoring::support_weighted;
    MatchOptions match;
};

namespace detail {

inline std::string trim(std::string_view s) { return trim_cell(s); }

inline std::size_t parse_count(const std::string& key, const std::string& value) {
    std::size_t n = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), n);
    if (value.empty() || ec != std::errc{} || ptr != value.data() + value.size())
        throw ConfigError(key + ": expected a non-negative integer, got '" + value + "'");
    return n;
}

inline Rational parse_config_rational(const std::string& key, const std::string& value) {
    try {
        return parse_rational(value);
    } catch (const ArgumentError& e) {
        throw ConfigError(key + ": " + e.what());
    }
}

} // namespace detail

// Applies one `key = value` setting. Relative paths resolve against `base`.
inline void apply_setting(PipelineConfig& cfg, const std::string& key, const std::string& value, const fs::path& base = {}) {
    const auto path = [&] { return fs::path(value).is_absolute() || base.empty() ? fs::path(value) : base / value; };
    if (key == "corpus_dir") cfg.corpus_dir = path();
    else if (key == "taxonomy") cfg.taxonomy_path = path();
    else if (key == "researchers") cfg.researchers_path = path();
    else if (key == "stopwords") cfg.stopwords_path = value.empty() ? fs::path{} : path();
    else if (key == "out_dir") cfg.out_dir = path();
    else if (key == "min_supp") {
        if (value == "auto") cfg.params.min_supp.reset();
        else cfg.params.min_supp = detail::parse_config_rational(key, value);
    } else if (key == "min_conf") cfg.params.min_conf = detail::parse_config_rational(key, value);
    else if (key == "max_len") cfg.params.max_len = detail::parse_count(key, value);
    else if (key == "tokenizer") cfg.tokenizer.name = value;
    else if (key == "tokenizer_command") cfg.tokenizer.command = value;
    else if (key == "min_len") cfg.tokenizer.min_len = detail::parse_count(key, value);
    else if (key == "grant_scoring") {
        if (value == "support") cfg.scoring = GrantScoring::support_weighted;
        else if (value == "count") cfg.scoring = GrantScoring::hit_count;
        else throw ConfigError("grant_scoring: expected 'support' or 'count', got '" + value + "'");
    } else if (key == "match_top_k") {
        cfg.match.top_k = detail::parse_count(key, value);
        if (cfg.match.top_k == 0) throw ConfigError("match_top_k must be at least 1");
    } else throw ConfigError("unknown configuration key '" + key + "'");
}

// `key = value` lines; '#' starts a comment.
inline PipelineConfig parse_config(std::istream& in, const fs::path& base = {}) {
    PipelineConfig cfg;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        if (detail::trim(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
        apply_setting(cfg, detail::trim(std::string_view(line).substr(0, eq)),
                      detail::trim(std::string_view(line).substr(eq + 1)), base);
    }
    return cfg;
}

inline PipelineConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    return parse_config(in, path.parent_path());
}

namespace stage {

inline fs::path transactions_dir(const PipelineConfig& c) { return c.out_dir / "transactions"; }
inline fs::path rules_dir(const PipelineConfig& c) { return c.out_dir / "rules"; }
inline fs::path estimates_dir(const PipelineConfig& c) { return c.out_dir / "estimates"; }
inline fs::path report_dir(const PipelineConfig& c) { return c.out_dir / "report"; }

inline std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw InputError("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw InputError("cannot read " + p.string());
    return ss.str();
}

inline void write_atomically(const fs::path& p, const std::string& content) {
    fs::create_directories(p.parent_path());
    auto tmp = p;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw InputError("cannot write " + tmp.string());
        out << content;
        out.close();
        if (!out) throw InputError("cannot write " + tmp.string());
    }
    fs::rename(tmp, p);
}

// Removes *.jsonl files in `dir` not named in `keep` (left over from earlier runs).
inline void prune_stale(const fs::path& dir, const std::set<std::string>& keep) {
    if (!fs::is_directory(dir)) return;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.path().extension() == ".jsonl" && !keep.contains(entry.path().filename().string()))
            fs::remove(entry.path());
}

// Sorted stems of the *.jsonl files in `dir`.
inline std::vector<std::string> grant_files(const fs::path& dir) {
    std::vector<std::string> grants;
    if (!fs::is_directory(dir)) return grants;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".jsonl") grants.push_back(entry.path().stem().string());
    std::sort(grants.begin(), grants.end());
    return grants;
}

inline Taxonomy read_taxonomy(const PipelineConfig& cfg) {
    if (cfg.taxonomy_path.empty()) throw InputError("no taxonomy configured");
    if (!fs::is_regular_file(cfg.taxonomy_path)) throw InputError("taxonomy not found: " + cfg.taxonomy_path.string());
    std::istringstream in(read_file(cfg.taxonomy_path));
    return load_taxonomy(in);
}

inline Tokenizer make_tokenizer(const PipelineConfig& cfg, const Taxonomy& taxonomy) {
    auto tc = cfg.tokenizer;
    if (!cfg.stopwords_path.empty()) {
        std::ifstream in(cfg.stopwords_path);
        if (!in) throw ConfigError("cannot read stopwords file " + cfg.stopwords_path.string());
        tc.stopwords = load_stopwords(in);
    }
    tc.phrases = taxonomy.keywords();
    return Tokenizer(std::move(tc));
}

} // namespace stage

struct StageLog {
    std::ostream& out;  // one summary line per grant
    std::ostream& warn; // per-item problems
};

inline std::vector<Document> read_grant_documents(const fs::path& grant_dir, const std::string& grant, StageLog log,
                                                  std::size_t& failures) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(grant_dir))
        if (entry.is_regular_file()) files.push_back(entry.path());
    std::sort(files.begin(), files.end());

    std::vector<Document> docs;
    for (const auto& file : files) {
        const auto ext = file.extension().string();
        SourceKind kind;
        if (ext == ".html" || ext == ".htm") kind = SourceKind::html;
        else if (ext == ".txt") kind = SourceKind::text;
        else {
            log.warn << "warning: " << grant << ": skipping " << file.filename().string()
                     << (ext == ".pdf" ? " (convert PDF files to .txt first)" : " (unsupported file type)") << '\n';
            continue;
        }
        try {
            auto body = stage::read_file(file);
            if (!text::is_valid_utf8(body)) throw InputError(file.string() + " is not valid UTF-8");
            docs.push_back({grant + "/" + file.filename().string(), kind, std::move(body)});
        } catch (const InputError& e) {
            log.warn << "warning: " << grant << ": " << e.what() << '\n';
            ++failures;
        }
    }
    return docs;
}

inline void cmd_ingest(const PipelineConfig& cfg, StageLog log) {
    if (!fs::is_directory(cfg.corpus_dir)) throw InputError("corpus directory not found: " + cfg.corpus_dir.string());
    const auto taxonomy = stage::read_taxonomy(cfg);
    const auto tokenizer = stage::make_tokenizer(cfg, taxonomy);

    std::vector<fs::path> grant_dirs;
    for (const auto& entry : fs::directory_iterator(cfg.corpus_dir))
        if (entry.is_directory()) grant_dirs.push_back(entry.path());
    std::sort(grant_dirs.begin(), grant_dirs.end());
    if (grant_dirs.empty()) throw InputError("corpus directory has no grant subdirectories: " + cfg.corpus_dir.string());

    std::set<std::string> written;
    std::size_t files_seen = 0;
    std::size_t failures = 0;
    for (const auto& dir : grant_dirs) {
        const auto grant = dir.filename().string();
        std::size_t grant_failures = 0;
        const auto docs = read_grant_documents(dir, grant, log, grant_failures);
        failures += grant_failures;
        files_seen += docs.size() + grant_failures;
        if (docs.empty()) {
            log.warn << "warning: " << grant << ": no readable documents\n";
            continue;
        }
        try {
            const auto db = build_transactions(docs, tokenizer);
            std::ostringstream out;
            write_transactions(db, out);
            stage::write_atomically(stage::transactions_dir(cfg) / (grant + ".jsonl"), out.str());
            written.insert(grant + ".jsonl");
            log.out << grant << ": M=" << db.size() << " items=" << db.item_universe().size() << '\n';
        } catch (const InputError& e) {
            log.warn << "warning: " << grant << ": " << e.what() << '\n';
        }
    }
    if (files_seen > 0 && failures == files_seen) throw InputError("no corpus file could be read");
    if (written.empty()) throw InputError("no grant produced any transactions");
    stage::prune_stale(stage::transactions_dir(cfg), written);
}

inline void cmd_mine(const PipelineConfig& cfg, StageLog log) {
    cfg.params.validate();
    const auto grants = stage::grant_files(stage::transactions_dir(cfg));
    if (grants.empty()) throw InputError("no transaction files in " + stage::transactions_dir(cfg).string());

    std::set<std::string> written;
    for (const auto& grant : grants) {
        std::istringstream in(stage::read_file(stage::transactions_dir(cfg) / (grant + ".jsonl")));
        const auto db = read_transactions(in);
        if (db.empty()) {
            log.warn << "warning: " << grant << ": empty transaction database, skipped\n";
            continue;
        }
        const auto result = mine(db, cfg.params);
        std::ostringstream out;
        write_rules(result.rules, out);
        stage::write_atomically(stage::rules_dir(cfg) / (grant + ".jsonl"), out.str());
        written.insert(grant + ".jsonl");
        log.out << grant << ": M=" << db.size() << " min_supp=" << to_string(result.min_supp)
                << (cfg.params.min_supp ? "" : " (auto)") << " min_conf=" << to_string(cfg.params.min_conf)
                << " itemsets=" << result.itemsets.size() << " rules=" << result.rules.size() << '\n';
    }
    stage::prune_stale(stage::rules_dir(cfg), written);
}

inline std::vector<ResearcherRecord> read_researcher_file(const PipelineConfig& cfg) {
    if (cfg.researchers_path.empty()) throw InputError("no researchers file configured");
    std::istringstream in(stage::read_file(cfg.researchers_path));
    return read_researchers(in);
}

// Joins researcher estimates to records and matches every grant estimate.
inline void cmd_match(const PipelineConfig& cfg, StageLog log) {
    const auto taxonomy = stage::read_taxonomy(cfg);
    const auto records = read_researcher_file(cfg);

    std::istringstream gin(stage::read_file(stage::estimates_dir(cfg) / "grants.jsonl"));
    const auto grants = read_estimates(gin);
    std::istringstream rin(stage::read_file(stage::estimates_dir(cfg) / "researchers.jsonl"));
    const auto researcher_estimates = read_estimates(rin);

    std::map<std::string, const ResearcherRecord*> by_id;
    for (const auto& r : records) by_id[r.id] = &r;
    std::vector<ResearcherProfile> profiles;
    for (const auto& e : researcher_estimates) {
        const auto it = by_id.find(e.subject_id);
        if (it == by_id.end()) throw InputError("estimate for unknown researcher '" + e.subject_id + "'");
        profiles.push_back({*it->second, e});
    }

    const auto reports = match_all(grants, profiles, taxonomy, cfg.match);
    stage::write_atomically(stage::report_dir(cfg) / "matches.json", to_json(reports).dump(2) + "\n");
    stage::write_atomically(stage::report_dir(cfg) / "matches.txt", render_table(reports));
    for (const auto& r : reports) {
        log.out << r.grant_id << ": field=" << (r.grant_field ? r.grant_field->value : "none");
        for (const auto level : kMatchedLevels) log.out << ' ' << to_string(level) << '=' << r.counts.at(level);
        log.out << '\n';
    }
}

inline void cmd_report(const PipelineConfig& cfg, StageLog log) {
    const auto taxonomy = stage::read_taxonomy(cfg);
    const auto tokenizer = stage::make_tokenizer(cfg, taxonomy);
    const auto records = read_researcher_file(cfg);
    const auto grants = stage::grant_files(stage::rules_dir(cfg));
    if (grants.empty()) throw InputError("no rule files in " + stage::rules_dir(cfg).string());

    std::vector<FieldEstimate> grant_estimates;
    std::ostringstream summary;
    summary << "# grant, research field, strongest rules (support, confidence)\n";
    for (const auto& grant : grants) {
        std::istringstream in(stage::read_file(stage::rules_dir(cfg) / (grant + ".jsonl")));
        const auto rules = read_rules(in);
        auto estimate = estimate_grant_field(grant, rules, taxonomy, cfg.scoring);
        summary << grant << '\t';
        if (estimate.top) {
            const auto parents = taxonomy.ancestors(*estimate.top);
            summary << parents.area << " / " << parents.discipline << " / " << *estimate.top;
        } else {
            summary << "none";
        }
        summary << '\n';
        for (std::size_t i = 0; i < rules.size() && i < 3; ++i) summary << "  " << format_rule(rules[i]) << '\n';
        grant_estimates.push_back(std::move(estimate));
    }

    std::vector<FieldEstimate> researcher_estimates;
    researcher_estimates.reserve(records.size());
    for (const auto& r : records) researcher_estimates.push_back(estimate_researcher_field(r, taxonomy, tokenizer));

    std::ostringstream g;
    write_estimates(grant_estimates, g);
    stage::write_atomically(stage::estimates_dir(cfg) / "grants.jsonl", g.str());
    std::ostringstream r;
    write_estimates(researcher_estimates, r);
    stage::write_atomically(stage::estimates_dir(cfg) / "researchers.jsonl", r.str());
    stage::write_atomically(stage::report_dir(cfg) / "rules.txt", summary.str());

    cmd_match(cfg, log);
}

inline void cmd_run(const PipelineConfig& cfg, StageLog log) {
    cmd_ingest(cfg, log);
    cmd_mine(cfg, log);
    cmd_report(cfg, log);
}

} // namespace grantmatch
