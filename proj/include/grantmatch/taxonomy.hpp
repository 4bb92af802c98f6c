#pragma once

// Four-level research-field taxonomy: Area > Discipline > Research Field >
// Keyword. Loaded from a tab-separated table where blank area/discipline
// cells repeat the value above them, the way such tables are usually laid
// out for reading.

#include <compare>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "grantmatch/errors.hpp"
#include "grantmatch/text.hpp"

namespace grantmatch {

template <class Tag>
struct StrongId {
    std::string value;

    friend auto operator<=>(const StrongId&, const StrongId&) = default;
    friend bool operator==(const StrongId&, const StrongId&) = default;
    friend std::ostream& operator<<(std::ostream& os, const StrongId& id) { return os << id.value; }
};

using AreaId = StrongId<struct AreaTag>;
using DisciplineId = StrongId<struct DisciplineTag>;
using FieldId = StrongId<struct FieldTag>;

struct FieldNode {
    FieldId id;
    std::set<std::string> keywords; // normalized

    friend bool operator==(const FieldNode&, const FieldNode&) = default;
};

struct DisciplineNode {
    DisciplineId id;
    std::vector<FieldNode> fields; // sorted by id

    friend bool operator==(const DisciplineNode&, const DisciplineNode&) = default;
};

struct AreaNode {
    AreaId id;
    std::vector<DisciplineNode> disciplines; // sorted by id

    friend bool operator==(const AreaNode&, const AreaNode&) = default;
};

struct Ancestors {
    DisciplineId discipline;
    AreaId area;

    friend bool operator==(const Ancestors&, const Ancestors&) = default;
};

inline constexpr std::string_view kTaxonomyHeader = "area\tdiscipline\tfield\tkeyword";

class Taxonomy {
public:
    using KeywordIndex = std::map<std::string, std::set<FieldId>, std::less<>>;

    const std::vector<AreaNode>& areas() const noexcept { return areas_; }
    const KeywordIndex& keyword_index() const noexcept { return keyword_index_; }

    std::size_t area_count() const noexcept { return areas_.size(); }
    std::size_t discipline_count() const noexcept { return discipline_parent_.size(); }
    std::size_t field_count() const noexcept { return field_parent_.size(); }

    bool contains(const FieldId& f) const { return field_parent_.contains(f); }

    // `item` must already be normalized. Empty when the item is not a keyword.
    const std::set<FieldId>& fields_for_item(std::string_view item) const {
        static const std::set<FieldId> none;
        const auto it = keyword_index_.find(item);
        return it == keyword_index_.end() ? none : it->second;
    }

    Ancestors ancestors(const FieldId& f) const {
        const auto fit = field_parent_.find(f);
        if (fit == field_parent_.end()) throw LookupError("unknown research field: '" + f.value + "'");
        return {fit->second, discipline_parent_.at(fit->second)};
    }

    // Every normalized keyword, sorted.
    std::vector<std::string> keywords() const {
        std::vector<std::string> out;
        out.reserve(keyword_index_.size());
        for (const auto& [k, _] : keyword_index_) out.push_back(k);
        return out;
    }

    friend bool operator==(const Taxonomy& a, const Taxonomy& b) { return a.areas_ == b.areas_; }

    friend Taxonomy load_taxonomy(std::istream& in);

private:
    std::vector<AreaNode> areas_;
    KeywordIndex keyword_index_;
    std::map<FieldId, DisciplineId> field_parent_;
    std::map<DisciplineId, AreaId> discipline_parent_;
};

namespace detail {

inline std::string trim_cell(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n\v\f");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n\v\f");
    return std::string(s.substr(first, last - first + 1));
}

inline std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    for (;;) {
        const auto tab = line.find('\t', start);
        cells.push_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
        if (tab == std::string_view::npos) break;
        start = tab + 1;
    }
    return cells;
}

} // namespace detail

inline Taxonomy load_taxonomy(std::istream& in) {
    std::map<AreaId, std::map<DisciplineId, std::map<FieldId, std::set<std::string>>>> tree;
    std::map<FieldId, DisciplineId> field_parent;
    std::map<DisciplineId, AreaId> discipline_parent;

    std::string line;
    std::size_t lineno = 0;
    bool saw_header = false;
    std::string area;
    std::string discipline;
    std::size_t rows = 0;

    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!saw_header) {
            if (line.empty()) continue;
            if (line != kTaxonomyHeader)
                throw ParseError(lineno, "expected header 'area<TAB>discipline<TAB>field<TAB>keyword'");
            saw_header = true;
            continue;
        }
        if (detail::trim_cell(line).empty()) continue;

        const auto cells = detail::split_tabs(line);
        if (cells.size() != 4)
            throw ParseError(lineno, "expected 4 tab-separated columns, found " + std::to_string(cells.size()));

        if (auto a = detail::trim_cell(cells[0]); !a.empty()) area = std::move(a);
        if (auto d = detail::trim_cell(cells[1]); !d.empty()) discipline = std::move(d);
        const auto field = detail::trim_cell(cells[2]);
        const auto keyword = text::normalize(cells[3]);

        if (keyword.empty()) throw ParseError(lineno, "empty keyword");
        if (area.empty()) throw ValidationError("line " + std::to_string(lineno) + ": keyword '" + keyword + "' has no area");
        if (discipline.empty())
            throw ValidationError("line " + std::to_string(lineno) + ": keyword '" + keyword + "' has no discipline");
        if (field.empty())
            throw ValidationError("line " + std::to_string(lineno) + ": keyword '" + keyword + "' has no research field");

        const AreaId area_id{area};
        const DisciplineId discipline_id{discipline};
        const FieldId field_id{field};

        if (const auto [it, fresh] = discipline_parent.emplace(discipline_id, area_id); !fresh && it->second != area_id)
            throw ValidationError("line " + std::to_string(lineno) + ": discipline '" + discipline +
                                  "' appears under areas '" + it->second.value + "' and '" + area + "'");
        if (const auto [it, fresh] = field_parent.emplace(field_id, discipline_id); !fresh && it->second != discipline_id)
            throw ValidationError("line " + std::to_string(lineno) + ": research field '" + field +
                                  "' appears under disciplines '" + it->second.value + "' and '" + discipline + "'");

        tree[area_id][discipline_id][field_id].insert(keyword);
        ++rows;
    }

    if (!saw_header || rows == 0) throw ValidationError("taxonomy is empty");

    Taxonomy t;
    for (auto& [area_id, disciplines] : tree) {
        AreaNode a{area_id, {}};
        for (auto& [discipline_id, fields] : disciplines) {
            DisciplineNode d{discipline_id, {}};
            for (auto& [field_id, keywords] : fields) {
                for (const auto& k : keywords) t.keyword_index_[k].insert(field_id);
                d.fields.push_back({field_id, std::move(keywords)});
            }
            a.disciplines.push_back(std::move(d));
        }
        t.areas_.push_back(std::move(a));
    }
    t.field_parent_ = std::move(field_parent);
    t.discipline_parent_ = std::move(discipline_parent);
    return t;
}

inline Taxonomy load_taxonomy(std::string_view tsv) {
    std::istringstream in{std::string(tsv)};
    return load_taxonomy(in);
}

// Canonical form: header, then one fully populated row per keyword in
// (area, discipline, field, keyword) order.
inline void serialize_taxonomy(const Taxonomy& t, std::ostream& out) {
    out << kTaxonomyHeader << '\n';
    for (const auto& a : t.areas())
        for (const auto& d : a.disciplines)
            for (const auto& f : d.fields)
                for (const auto& k : f.keywords) out << a.id << '\t' << d.id << '\t' << f.id << '\t' << k << '\n';
}

inline std::string serialize_taxonomy(const Taxonomy& t) {
    std::ostringstream out;
    serialize_taxonomy(t, out);
    return out.str();
}

} // namespace grantmatch
