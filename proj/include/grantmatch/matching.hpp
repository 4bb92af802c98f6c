#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "grantmatch/errors.hpp"
#include "grantmatch/fieldest.hpp"
#include "grantmatch/taxonomy.hpp"

namespace grantmatch {

// Ordered from most to least specific.
enum class MatchLevel { ResearcherField, Discipline, Area, None };

inline constexpr MatchLevel kMatchedLevels[] = {MatchLevel::ResearcherField, MatchLevel::Discipline, MatchLevel::Area};

inline std::string_view to_string(MatchLevel level) {
    switch (level) {
    case MatchLevel::ResearcherField: return "ResearcherField";
    case MatchLevel::Discipline: return "Discipline";
    case MatchLevel::Area: return "Area";
    case MatchLevel::None: break;
    }
    return "None";
}

inline MatchLevel match_level(const FieldId& a, const FieldId& b, const Taxonomy& t) {
    if (a == b) return MatchLevel::ResearcherField;
    const auto pa = t.ancestors(a);
    const auto pb = t.ancestors(b);
    if (pa.discipline == pb.discipline) return MatchLevel::Discipline;
    if (pa.area == pb.area) return MatchLevel::Area;
    return MatchLevel::None;
}

struct ResearcherProfile {
    ResearcherRecord record;
    FieldEstimate estimate;
};

struct MatchEntry {
    std::string researcher_id;
    std::string department;
    MatchLevel level = MatchLevel::None;

    friend bool operator==(const MatchEntry&, const MatchEntry&) = default;
};

// Each researcher appears once, at the most specific level reached; counts
// are exclusive buckets over `entries`.
struct MatchReport {
    std::string grant_id;
    std::optional<FieldId> grant_field;
    std::vector<MatchEntry> entries; // by researcher id
    std::map<MatchLevel, int> counts{{MatchLevel::ResearcherField, 0}, {MatchLevel::Discipline, 0}, {MatchLevel::Area, 0}};

    friend bool operator==(const MatchReport&, const MatchReport&) = default;
};

struct MatchOptions {
    // Number of leading ranked fields of each estimate that take part. The
    // best level over all pairs is recorded.
    std::size_t top_k = 1;
};

namespace detail {

inline void require_known(const FieldEstimate& e, const Taxonomy& t) {
    const auto check = [&](const FieldId& f) {
        if (!t.contains(f))
            throw TaxonomyMismatchError("estimate '" + e.subject_id + "' refers to unknown research field '" + f.value + "'");
    };
    if (e.top) check(*e.top);
    for (const auto& s : e.ranked) check(s.field);
}

inline std::vector<FieldId> leading_fields(const FieldEstimate& e, std::size_t k) {
    std::vector<FieldId> out;
    if (!e.top) return out;
    out.push_back(*e.top);
    for (const auto& s : e.ranked) {
        if (out.size() >= k) break;
        if (s.field != *e.top) out.push_back(s.field);
    }
    return out;
}

} // namespace detail

inline MatchReport match_grant(const FieldEstimate& grant, std::span<const ResearcherProfile> researchers,
                               const Taxonomy& t, MatchOptions opts = {}) {
    detail::require_known(grant, t);
    for (const auto& r : researchers) detail::require_known(r.estimate, t);

    MatchReport report;
    report.grant_id = grant.subject_id;
    report.grant_field = grant.top;
    if (!grant.top) return report;

    const auto k = std::max<std::size_t>(opts.top_k, 1);
    const auto grant_fields = detail::leading_fields(grant, k);
    for (const auto& r : researchers) {
        auto best = MatchLevel::None;
        for (const auto& rf : detail::leading_fields(r.estimate, k))
            for (const auto& gf : grant_fields) best = std::min(best, match_level(gf, rf, t));
        if (best == MatchLevel::None) continue;
        report.entries.push_back({r.record.id, r.record.department, best});
        ++report.counts[best];
    }
    std::sort(report.entries.begin(), report.entries.end(),
              [](const MatchEntry& a, const MatchEntry& b) { return a.researcher_id < b.researcher_id; });
    return report;
}

inline std::vector<MatchReport> match_all(std::span<const FieldEstimate> grants,
                                          std::span<const ResearcherProfile> researchers, const Taxonomy& t,
                                          MatchOptions opts = {}) {
    std::vector<MatchReport> out;
    out.reserve(grants.size());
    for (const auto& g : grants) out.push_back(match_grant(g, researchers, t, opts));
    return out;
}

inline nlohmann::ordered_json to_json(const MatchReport& r) {
    nlohmann::ordered_json j;
    j["grant"] = r.grant_id;
    j["field"] = r.grant_field ? nlohmann::ordered_json(r.grant_field->value) : nlohmann::ordered_json(nullptr);
    auto entries = nlohmann::ordered_json::array();
    for (const auto& e : r.entries)
        entries.push_back({{"researcher", e.researcher_id}, {"department", e.department}, {"level", to_string(e.level)}});
    j["entries"] = std::move(entries);
    nlohmann::ordered_json counts;
    for (const auto level : kMatchedLevels) counts[std::string(to_string(level))] = r.counts.at(level);
    j["counts"] = std::move(counts);
    return j;
}

inline nlohmann::ordered_json to_json(std::span<const MatchReport> reports) {
    nlohmann::ordered_json j;
    j["counting"] = "exclusive";
    auto arr = nlohmann::ordered_json::array();
    for (const auto& r : reports) arr.push_back(to_json(r));
    j["reports"] = std::move(arr);
    return j;
}

// One row per (grant, department) with exclusive per-level counts. Grants
// without a field or without any match get a single "none" row.
inline std::string render_table(std::span<const MatchReport> reports) {
    std::vector<std::vector<std::string>> rows{{"grant", "field", "department", "researcher_field", "discipline", "area"}};
    for (const auto& r : reports) {
        const std::string field = r.grant_field ? r.grant_field->value : "none";
        std::map<std::string, std::map<MatchLevel, int>> by_department;
        for (const auto& e : r.entries) ++by_department[e.department][e.level];
        if (by_department.empty()) {
            rows.push_back({r.grant_id, field, "none", "0", "0", "0"});
            continue;
        }
        for (const auto& [department, counts] : by_department) {
            std::vector<std::string> row{r.grant_id, field, department.empty() ? "-" : department};
            for (const auto level : kMatchedLevels) {
                const auto it = counts.find(level);
                row.push_back(std::to_string(it == counts.end() ? 0 : it->second));
            }
            rows.push_back(std::move(row));
        }
    }

    std::vector<std::size_t> width(rows.front().size(), 0);
    for (const auto& row : rows)
        for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], text::codepoint_length(row[c]));

    std::ostringstream out;
    out << "# counts are exclusive: each researcher is counted once, at the most specific level matched\n";
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            const auto pad = width[c] - text::codepoint_length(row[c]);
            const bool numeric = c >= 3;
            if (numeric) out << std::string(pad, ' ') << row[c];
            else out << row[c] << (c + 1 < row.size() ? std::string(pad, ' ') : "");
            if (c + 1 < row.size()) out << "  ";
        }
        out << '\n';
    }
    return out.str();
}

} // namespace grantmatch
