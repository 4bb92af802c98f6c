#pragma once

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "grantmatch/grantmatch.hpp"

namespace fixtures {

inline std::filesystem::path dir() { return GRANTMATCH_FIXTURE_DIR; }

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline grantmatch::Taxonomy taxonomy() {
    std::ifstream in(dir() / "taxonomy.tsv");
    return grantmatch::load_taxonomy(in);
}

inline grantmatch::TransactionDb db(const std::vector<std::vector<std::string>>& rows) {
    std::vector<grantmatch::Transaction> ts;
    for (std::size_t i = 0; i < rows.size(); ++i) ts.push_back({"t", i, rows[i]});
    return grantmatch::TransactionDb(std::move(ts));
}

// The five-transaction example database used to illustrate support and
// confidence: {1,2} {2,3,5} {2,3} {4} {2,3}.
inline grantmatch::TransactionDb five_transactions() {
    return db({{"Item1", "Item2"}, {"Item2", "Item3", "Item5"}, {"Item2", "Item3"}, {"Item4"}, {"Item2", "Item3"}});
}

inline grantmatch::TokenizerConfig tokenizer_config(const grantmatch::Taxonomy& t) {
    grantmatch::TokenizerConfig cfg;
    std::ifstream in(dir() / "stopwords.txt");
    cfg.stopwords = grantmatch::load_stopwords(in);
    cfg.phrases = t.keywords();
    return cfg;
}

} // namespace fixtures
