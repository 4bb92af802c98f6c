#pragma once

// Documents -> paragraphs -> item sets. One non-empty paragraph is one
// transaction; the transaction database is the input to mining.

#include <algorithm>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "grantmatch/errors.hpp"
#include "grantmatch/html.hpp"
#include "grantmatch/text.hpp"
#include "grantmatch/tokenizer.hpp"

namespace grantmatch {

enum class SourceKind { html, text };

struct Document {
    std::string id;
    SourceKind kind = SourceKind::text;
    std::string body;
};

struct Transaction {
    std::string doc_id;
    std::size_t ordinal = 0;        // paragraph index within the document
    std::vector<std::string> items; // sorted, unique, non-empty

    friend bool operator==(const Transaction&, const Transaction&) = default;
};

using ItemId = std::uint32_t;

// Immutable. Alongside the string form it keeps every transaction encoded as
// sorted ids into item_universe(); ids follow string order, so comparing id
// sequences compares the strings lexicographically.
class TransactionDb {
public:
    TransactionDb() = default;

    explicit TransactionDb(std::vector<Transaction> transactions) : transactions_(std::move(transactions)) {
        std::set<std::string> universe;
        for (auto& t : transactions_) {
            std::sort(t.items.begin(), t.items.end());
            t.items.erase(std::unique(t.items.begin(), t.items.end()), t.items.end());
            if (t.items.empty())
                throw ArgumentError("transaction " + t.doc_id + "#" + std::to_string(t.ordinal) + " has no items");
            universe.insert(t.items.begin(), t.items.end());
        }
        universe_.assign(universe.begin(), universe.end());
        encoded_.reserve(transactions_.size());
        for (const auto& t : transactions_) {
            std::vector<ItemId> ids;
            ids.reserve(t.items.size());
            for (const auto& item : t.items) ids.push_back(*find_item(item));
            encoded_.push_back(std::move(ids));
        }
    }

    const std::vector<Transaction>& transactions() const noexcept { return transactions_; }
    std::size_t size() const noexcept { return transactions_.size(); }
    bool empty() const noexcept { return transactions_.empty(); }
    const std::vector<std::string>& item_universe() const noexcept { return universe_; }
    const std::vector<std::vector<ItemId>>& encoded() const noexcept { return encoded_; }

    std::optional<ItemId> find_item(std::string_view item) const {
        const auto it = std::lower_bound(universe_.begin(), universe_.end(), item);
        if (it == universe_.end() || *it != item) return std::nullopt;
        return static_cast<ItemId>(it - universe_.begin());
    }

    friend bool operator==(const TransactionDb& a, const TransactionDb& b) { return a.transactions_ == b.transactions_; }

private:
    std::vector<Transaction> transactions_;
    std::vector<std::string> universe_;
    std::vector<std::vector<ItemId>> encoded_;
};

// Splits on runs of blank (whitespace-only) lines; paragraphs come back
// trimmed, empty ones dropped.
inline std::vector<std::string> segment_paragraphs(std::string_view text) {
    const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v'; };
    std::vector<std::string> paragraphs;
    std::string current;
    const auto flush = [&] {
        const auto first = std::find_if_not(current.begin(), current.end(), is_space);
        const auto last = std::find_if_not(current.rbegin(), current.rend(), is_space).base();
        if (first < last) paragraphs.emplace_back(first, last);
        current.clear();
    };
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto nl = text.find('\n', start);
        const auto line = text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
        if (std::all_of(line.begin(), line.end(), is_space)) {
            flush();
        } else {
            if (!current.empty()) current += '\n';
            current.append(line);
        }
        if (nl == std::string_view::npos) break;
        start = nl + 1;
    }
    flush();
    return paragraphs;
}

// Transactions of one document, in paragraph order; empty item sets dropped.
inline std::vector<Transaction> document_transactions(const Document& doc, const Tokenizer& tokenizer) {
    const auto plain = doc.kind == SourceKind::html ? strip_html(doc.body) : doc.body;
    std::vector<Transaction> out;
    const auto paragraphs = segment_paragraphs(plain);
    for (std::size_t k = 0; k < paragraphs.size(); ++k) {
        auto items = tokenizer.tokenize(paragraphs[k]);
        if (items.empty()) continue;
        out.push_back({doc.id, k, {items.begin(), items.end()}});
    }
    return out;
}

inline TransactionDb build_transactions(const std::vector<Document>& corpus, const Tokenizer& tokenizer) {
    if (corpus.empty()) throw InputError("corpus is empty");
    std::set<std::string_view> ids;
    std::vector<Transaction> all;
    for (const auto& doc : corpus) {
        if (!ids.insert(doc.id).second) throw InputError("duplicate document id '" + doc.id + "'");
        if (!text::is_valid_utf8(doc.body)) throw InputError("document '" + doc.id + "' is not valid UTF-8");
        auto ts = document_transactions(doc, tokenizer);
        all.insert(all.end(), std::make_move_iterator(ts.begin()), std::make_move_iterator(ts.end()));
    }
    if (all.empty()) throw InputError("no mineable content");
    return TransactionDb(std::move(all));
}

inline TransactionDb build_transactions(const std::vector<Document>& corpus, const TokenizerConfig& cfg) {
    return build_transactions(corpus, Tokenizer(cfg));
}

// {"doc":"...","ordinal":N,"items":["...",...]} per line.
inline void write_transactions(const TransactionDb& db, std::ostream& out) {
    for (const auto& t : db.transactions()) {
        nlohmann::ordered_json j;
        j["doc"] = t.doc_id;
        j["ordinal"] = t.ordinal;
        j["items"] = t.items;
        out << j.dump() << '\n';
    }
}

inline TransactionDb read_transactions(std::istream& in) {
    std::vector<Transaction> ts;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            Transaction t{j.at("doc").get<std::string>(), j.at("ordinal").get<std::size_t>(),
                          j.at("items").get<std::vector<std::string>>()};
            if (t.items.empty()) throw ParseError(lineno, "transaction has no items");
            ts.push_back(std::move(t));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(lineno, std::string("bad transaction record: ") + e.what());
        }
    }
    return TransactionDb(std::move(ts));
}

} // namespace grantmatch
