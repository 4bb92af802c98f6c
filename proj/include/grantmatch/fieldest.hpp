#pragma once

// Research-field estimation. Grants are scored from their mined rules;
// researchers, whose profiles are too short to mine, by direct keyword counts.

#include <algorithm>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "grantmatch/errors.hpp"
#include "grantmatch/mining.hpp"
#include "grantmatch/rational.hpp"
#include "grantmatch/taxonomy.hpp"
#include "grantmatch/tokenizer.hpp"

namespace grantmatch {

struct ScoredField {
    FieldId field;
    Rational score;

    friend bool operator==(const ScoredField&, const ScoredField&) = default;
};

struct FieldEstimate {
    std::string subject_id;
    std::vector<ScoredField> ranked; // score desc, then field id asc; scores > 0
    std::optional<FieldId> top;

    friend bool operator==(const FieldEstimate&, const FieldEstimate&) = default;
};

struct ResearcherRecord {
    std::string id;
    std::string department;
    std::vector<std::string> free_text;

    friend bool operator==(const ResearcherRecord&, const ResearcherRecord&) = default;
};

enum class GrantScoring {
    support_weighted, // each keyword hit adds the rule's support
    hit_count,        // each keyword hit adds 1
};

inline FieldEstimate rank_fields(std::string subject, const std::map<FieldId, Rational>& scores) {
    FieldEstimate e{std::move(subject), {}, std::nullopt};
    for (const auto& [field, score] : scores)
        if (score > 0) e.ranked.push_back({field, score});
    std::stable_sort(e.ranked.begin(), e.ranked.end(),
                     [](const ScoredField& a, const ScoredField& b) { return a.score > b.score; });
    if (!e.ranked.empty()) e.top = e.ranked.front().field;
    return e;
}

// Every item on either side of a rule is looked up in the taxonomy; each
// field it belongs to is credited. No hit at all leaves `top` empty.
inline FieldEstimate estimate_grant_field(std::string subject, const std::vector<AssociationRule>& rules,
                                          const Taxonomy& t, GrantScoring scoring = GrantScoring::support_weighted) {
    std::map<FieldId, Rational> scores;
    for (const auto& rule : rules) {
        const Rational credit = scoring == GrantScoring::support_weighted ? rule.support : Rational(1);
        for (const auto* side : {&rule.antecedent, &rule.consequent})
            for (const auto& item : *side)
                for (const auto& field : t.fields_for_item(item)) scores[field] += credit;
    }
    return rank_fields(std::move(subject), scores);
}

// Each free-text entry is tokenized (phrases included) and every item that is
// a taxonomy keyword scores 1 for each of its fields.
inline FieldEstimate estimate_researcher_field(const ResearcherRecord& r, const Taxonomy& t,
                                               const Tokenizer& tokenizer) {
    std::map<FieldId, Rational> scores;
    for (const auto& entry : r.free_text)
        for (const auto& item : tokenizer.tokenize(entry))
            for (const auto& field : t.fields_for_item(item)) scores[field] += 1;
    return rank_fields(r.id, scores);
}

inline FieldEstimate estimate_researcher_field(const ResearcherRecord& r, const Taxonomy& t,
                                               const TokenizerConfig& cfg) {
    return estimate_researcher_field(r, t, Tokenizer(cfg));
}

// {"subject":"...","top":"field-id"|null,"ranked":[["field-id","p/q"],...]}
inline nlohmann::ordered_json to_json(const FieldEstimate& e) {
    nlohmann::ordered_json j;
    j["subject"] = e.subject_id;
    j["top"] = e.top ? nlohmann::ordered_json(e.top->value) : nlohmann::ordered_json(nullptr);
    auto ranked = nlohmann::ordered_json::array();
    for (const auto& s : e.ranked) ranked.push_back({s.field.value, to_string(s.score)});
    j["ranked"] = std::move(ranked);
    return j;
}

inline FieldEstimate estimate_from_json(const nlohmann::json& j) {
    FieldEstimate e;
    e.subject_id = j.at("subject").get<std::string>();
    if (!j.at("top").is_null()) e.top = FieldId{j.at("top").get<std::string>()};
    for (const auto& entry : j.at("ranked")) {
        if (!entry.is_array() || entry.size() != 2) throw ArgumentError("ranked entry must be [field, score]");
        e.ranked.push_back({FieldId{entry[0].get<std::string>()}, parse_rational(entry[1].get<std::string>())});
    }
    return e;
}

inline void write_estimates(const std::vector<FieldEstimate>& estimates, std::ostream& out) {
    for (const auto& e : estimates) out << to_json(e).dump() << '\n';
}

inline std::vector<FieldEstimate> read_estimates(std::istream& in) {
    std::vector<FieldEstimate> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            out.push_back(estimate_from_json(nlohmann::json::parse(line)));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(lineno, std::string("bad estimate record: ") + e.what());
        } catch (const ArgumentError& e) {
            throw ParseError(lineno, e.what());
        }
    }
    return out;
}

// Researchers file: {"id":"...","department":"...","free_text":["...",...]} per line.
inline std::vector<ResearcherRecord> read_researchers(std::istream& in) {
    std::vector<ResearcherRecord> out;
    std::set<std::string> seen;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            ResearcherRecord r{j.at("id").get<std::string>(), j.value("department", std::string{}),
                               j.value("free_text", std::vector<std::string>{})};
            if (!seen.insert(r.id).second) throw ParseError(lineno, "duplicate researcher id '" + r.id + "'");
            out.push_back(std::move(r));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(lineno, std::string("bad researcher record: ") + e.what());
        }
    }
    return out;
}

} // namespace grantmatch
