#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "grantmatch/pipeline.hpp"
#include "scratch.hpp"

using namespace grantmatch;
namespace fs = std::filesystem;

namespace {

PipelineConfig fixture_config(const fs::path& out) {
    auto cfg = load_config(fixtures::dir() / "pipeline.conf");
    cfg.out_dir = out;
    return cfg;
}

struct Quiet {
    std::ostringstream out;
    std::ostringstream warn;
    StageLog log() { return {out, warn}; }
};

std::vector<std::vector<std::string>> item_lists(const fs::path& transactions_file) {
    std::istringstream in(fixtures::slurp(transactions_file));
    std::vector<std::vector<std::string>> out;
    const auto db = read_transactions(in);
    for (const auto& t : db.transactions()) out.push_back(t.items);
    return out;
}

// The five-transaction example as a one-document corpus, one paragraph per transaction.
void write_five_transactions_corpus(const fs::path& root) {
    scratch::write(root / "corpus/five/db.txt", "item1 item2\n\nitem2 item3 item5\n\nitem2 item3\n\nitem4\n\nitem2 item3\n");
    scratch::write(root / "taxonomy.tsv", "area\tdiscipline\tfield\tkeyword\nA\tD\tF\titem2\n");
    scratch::write(root / "researchers.jsonl", "");
    scratch::write(root / "run.conf", "corpus_dir = corpus\ntaxonomy = taxonomy.tsv\nresearchers = researchers.jsonl\n"
                                      "min_supp = auto\nmin_conf = 0.8\n");
}

} // namespace

TEST(Config, ParsesKeysAndResolvesRelativePaths) {
    std::istringstream in("# comment\ncorpus_dir = corpus\nmin_supp = 3/10  # inline\nmin_conf=0.9\nmax_len = 3\n"
                          "tokenizer = whitespace\nmin_len = 3\ngrant_scoring = count\nmatch_top_k = 2\n");
    const auto cfg = parse_config(in, "/base");
    EXPECT_EQ(cfg.corpus_dir, fs::path("/base/corpus"));
    EXPECT_EQ(cfg.params.min_supp, Rational(3, 10));
    EXPECT_EQ(cfg.params.min_conf, Rational(9, 10));
    EXPECT_EQ(cfg.params.max_len, 3u);
    EXPECT_EQ(cfg.tokenizer.name, "whitespace");
    EXPECT_EQ(cfg.tokenizer.min_len, 3u);
    EXPECT_EQ(cfg.scoring, GrantScoring::hit_count);
    EXPECT_EQ(cfg.match.top_k, 2u);
}

TEST(Config, Errors) {
    const auto parse = [](const std::string& s) {
        std::istringstream in(s);
        return parse_config(in);
    };
    EXPECT_THROW(parse("colour = blue\n"), ConfigError);
    EXPECT_THROW(parse("just words\n"), ConfigError);
    EXPECT_THROW(parse("min_conf = lots\n"), ConfigError);
    EXPECT_THROW(parse("max_len = -1\n"), ConfigError);
    EXPECT_THROW(parse("grant_scoring = magic\n"), ConfigError);
    EXPECT_THROW(load_config("/nonexistent/grantmatch.conf"), ConfigError);
    EXPECT_FALSE(parse("min_supp = auto\n").params.min_supp);
}

TEST(Ingest, OneTransactionFilePerGrant) {
    scratch::Dir out;
    Quiet q;
    cmd_ingest(fixture_config(out.path()), q.log());
    for (const char* g : {"grant-ai", "grant-food", "grant-lit"})
        EXPECT_TRUE(fs::exists(out / ("transactions/" + std::string(g) + ".jsonl"))) << g;
    EXPECT_NE(q.out.str().find("grant-ai: M=8"), std::string::npos) << q.out.str();
}

TEST(Ingest, EmptyOrMissingCorpusIsAnInputError) {
    scratch::Dir dir;
    auto cfg = fixture_config(dir / "out");
    Quiet q;
    cfg.corpus_dir = dir / "missing";
    EXPECT_THROW(cmd_ingest(cfg, q.log()), InputError);
    fs::create_directories(dir / "empty");
    cfg.corpus_dir = dir / "empty";
    EXPECT_THROW(cmd_ingest(cfg, q.log()), InputError);
}

TEST(Ingest, HtmlGrantMatchesStrippedTextTwin) {
    scratch::Dir dir;
    const auto html = fixtures::slurp(fixtures::dir() / "corpus/grant-lit/call.html");
    scratch::write(dir / "corpus/as-html/call.html", html);
    scratch::write(dir / "corpus/as-text/call.txt", strip_html(html));
    auto cfg = fixture_config(dir / "out");
    cfg.corpus_dir = dir / "corpus";
    Quiet q;
    cmd_ingest(cfg, q.log());
    EXPECT_EQ(item_lists(dir / "out/transactions/as-html.jsonl"), item_lists(dir / "out/transactions/as-text.jsonl"));
}

TEST(Ingest, SkipsUnsupportedFilesWithWarning) {
    scratch::Dir dir;
    scratch::write(dir / "corpus/g/notes.txt", "robot intelligence");
    scratch::write(dir / "corpus/g/brochure.pdf", "%PDF-1.4");
    auto cfg = fixture_config(dir / "out");
    cfg.corpus_dir = dir / "corpus";
    Quiet q;
    cmd_ingest(cfg, q.log());
    EXPECT_NE(q.warn.str().find("brochure.pdf"), std::string::npos);
    EXPECT_TRUE(fs::exists(dir / "out/transactions/g.jsonl"));
}

TEST(Ingest, AllFilesUnreadableIsAnInputError) {
    scratch::Dir dir;
    scratch::write(dir / "corpus/g/bad.txt", "not utf-8 \xFF\xFE");
    auto cfg = fixture_config(dir / "out");
    cfg.corpus_dir = dir / "corpus";
    Quiet q;
    EXPECT_THROW(cmd_ingest(cfg, q.log()), InputError);
}

TEST(Mine, FiveTransactionsCorpusGivesOneRule) {
    scratch::Dir dir;
    write_five_transactions_corpus(dir.path());
    auto cfg = load_config(dir / "run.conf");
    cfg.out_dir = dir / "out";
    Quiet q;
    cmd_ingest(cfg, q.log());
    cmd_mine(cfg, q.log());
    EXPECT_NE(q.out.str().find("min_supp=2/5 (auto)"), std::string::npos) << q.out.str();
    const auto rules = fixtures::slurp(dir / "out/rules/five.jsonl");
    EXPECT_EQ(rules, "{\"lhs\":[\"item3\"],\"rhs\":[\"item2\"],\"support\":\"3/5\",\"confidence\":\"1/1\"}\n");

    cmd_mine(cfg, q.log());
    EXPECT_EQ(fixtures::slurp(dir / "out/rules/five.jsonl"), rules);
}

TEST(Mine, NoTransactionFilesIsAnInputError) {
    scratch::Dir dir;
    auto cfg = fixture_config(dir.path());
    Quiet q;
    EXPECT_THROW(cmd_mine(cfg, q.log()), InputError);
}

TEST(Mine, EmptyDatabaseIsSkippedWithWarning) {
    scratch::Dir dir;
    auto cfg = fixture_config(dir.path());
    scratch::write(dir / "transactions/empty.jsonl", "");
    scratch::write(dir / "transactions/one.jsonl", "{\"doc\":\"d\",\"ordinal\":0,\"items\":[\"a\",\"b\"]}\n");
    Quiet q;
    cmd_mine(cfg, q.log());
    EXPECT_NE(q.warn.str().find("empty"), std::string::npos);
    EXPECT_FALSE(fs::exists(dir / "rules/empty.jsonl"));
    EXPECT_TRUE(fs::exists(dir / "rules/one.jsonl"));
}

TEST(Report, ZeroResearchersGivesEmptyEntries) {
    scratch::Dir dir;
    auto cfg = fixture_config(dir / "out");
    scratch::write(dir / "nobody.jsonl", "");
    cfg.researchers_path = dir / "nobody.jsonl";
    Quiet q;
    cmd_run(cfg, q.log());
    std::istringstream in(fixtures::slurp(dir / "out/report/matches.json"));
    const auto j = nlohmann::json::parse(in);
    ASSERT_EQ(j["reports"].size(), 3u);
    for (const auto& r : j["reports"]) EXPECT_TRUE(r["entries"].empty());
}

TEST(Report, MissingTaxonomyIsAnInputError) {
    scratch::Dir dir;
    auto cfg = fixture_config(dir / "out");
    Quiet q;
    cmd_ingest(cfg, q.log());
    cmd_mine(cfg, q.log());
    cfg.taxonomy_path = dir / "missing.tsv";
    EXPECT_THROW(cmd_report(cfg, q.log()), InputError);
}

TEST(Cli, ExitCodes) {
    scratch::Dir dir;
    const auto conf = (fixtures::dir() / "pipeline.conf").string();
    const auto out = dir.path().string();
    EXPECT_EQ(scratch::run_cli("run --config '" + conf + "' --out '" + out + "'"), 0);
    EXPECT_TRUE(fs::exists(dir / "report/matches.txt"));

    // configuration errors
    EXPECT_EQ(scratch::run_cli("mine --config '" + conf + "' --out '" + out + "' --min-conf 1.01"), 2);
    EXPECT_EQ(scratch::run_cli("mine --config '" + conf + "' --out '" + out + "' --min-supp 0"), 2);
    EXPECT_EQ(scratch::run_cli("mine --config /nonexistent.conf --out '" + out + "'"), 2);
    EXPECT_EQ(scratch::run_cli("frobnicate"), 2);
    EXPECT_EQ(scratch::run_cli(""), 2);

    // input errors
    scratch::Dir empty;
    fs::create_directories(empty / "corpus");
    scratch::write(empty / "run.conf", "corpus_dir = corpus\ntaxonomy = " + (fixtures::dir() / "taxonomy.tsv").string() + "\n");
    EXPECT_EQ(scratch::run_cli("ingest --config '" + (empty / "run.conf").string() + "' --out '" + out + "'"), 1);
    scratch::write(empty / "bad-tax.conf", "taxonomy = nothing-here.tsv\nresearchers = " +
                                               (fixtures::dir() / "researchers.jsonl").string() + "\n");
    EXPECT_EQ(scratch::run_cli("report --config '" + (empty / "bad-tax.conf").string() + "' --out '" + out + "'"), 1);
}

TEST(Cli, UnknownFieldInEstimatesIsAnInputError) {
    scratch::Dir dir;
    const auto conf = (fixtures::dir() / "pipeline.conf").string();
    const auto out = dir.path().string();
    ASSERT_EQ(scratch::run_cli("run --config '" + conf + "' --out '" + out + "'"), 0);
    EXPECT_EQ(scratch::run_cli("match --config '" + conf + "' --out '" + out + "'"), 0);
    scratch::write(dir / "estimates/grants.jsonl", R"({"subject":"grant-x","top":"Astrophysics","ranked":[["Astrophysics","1/1"]]})" "\n");
    EXPECT_EQ(scratch::run_cli("match --config '" + conf + "' --out '" + out + "'"), 1);
}

TEST(Pipeline, StaleOutputsArePruned) {
    scratch::Dir dir;
    auto cfg = fixture_config(dir.path());
    scratch::write(dir / "transactions/old-grant.jsonl", "{\"doc\":\"d\",\"ordinal\":0,\"items\":[\"a\"]}\n");
    Quiet q;
    cmd_run(cfg, q.log());
    EXPECT_FALSE(fs::exists(dir / "transactions/old-grant.jsonl"));
    EXPECT_FALSE(fs::exists(dir / "rules/old-grant.jsonl"));
}
