#pragma once

// Level-wise Apriori over a TransactionDb with exact rational support and
// confidence, plus association-rule generation from the frequent itemsets.

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "grantmatch/errors.hpp"
#include "grantmatch/ingest.hpp"
#include "grantmatch/rational.hpp"

namespace grantmatch {

// Sorted, duplicate-free set of items.
class ItemSet {
public:
    ItemSet() = default;
    ItemSet(std::initializer_list<std::string> items) : ItemSet(std::vector<std::string>(items)) {}
    explicit ItemSet(std::vector<std::string> items) : items_(std::move(items)) {
        std::sort(items_.begin(), items_.end());
        items_.erase(std::unique(items_.begin(), items_.end()), items_.end());
    }

    const std::vector<std::string>& items() const noexcept { return items_; }
    std::size_t size() const noexcept { return items_.size(); }
    bool empty() const noexcept { return items_.empty(); }
    auto begin() const noexcept { return items_.begin(); }
    auto end() const noexcept { return items_.end(); }

    ItemSet united(const ItemSet& other) const {
        std::vector<std::string> out;
        std::set_union(items_.begin(), items_.end(), other.items_.begin(), other.items_.end(), std::back_inserter(out));
        return ItemSet(std::move(out));
    }

    bool contains_all(const ItemSet& other) const {
        return std::includes(items_.begin(), items_.end(), other.items_.begin(), other.items_.end());
    }

    friend auto operator<=>(const ItemSet&, const ItemSet&) = default;
    friend bool operator==(const ItemSet&, const ItemSet&) = default;

private:
    std::vector<std::string> items_;
};

inline std::ostream& operator<<(std::ostream& os, const ItemSet& s) {
    os << '{';
    for (std::size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s.items()[i];
    return os << '}';
}

struct FrequentItemset {
    ItemSet itemset;
    std::int64_t support_count = 0;
    Rational support;

    friend bool operator==(const FrequentItemset&, const FrequentItemset&) = default;
};

struct AssociationRule {
    ItemSet antecedent;
    ItemSet consequent;
    Rational support;
    Rational confidence;

    friend bool operator==(const AssociationRule&, const AssociationRule&) = default;
};

struct MiningParams {
    std::optional<Rational> min_supp; // nullopt: auto_min_support
    Rational min_conf{4, 5};
    std::size_t max_len = 4;

    void validate() const {
        if (min_supp && (*min_supp <= 0 || *min_supp > 1))
            throw ConfigError("min_supp must be in (0,1], got " + to_string(*min_supp));
        if (min_conf <= 0 || min_conf > 1) throw ConfigError("min_conf must be in (0,1], got " + to_string(min_conf));
        if (max_len < 2) throw ConfigError("max_len must be at least 2");
    }
};

namespace detail {

inline std::vector<ItemId> encode(const TransactionDb& db, const ItemSet& s, bool& all_known) {
    std::vector<ItemId> ids;
    ids.reserve(s.size());
    all_known = true;
    for (const auto& item : s) {
        if (const auto id = db.find_item(item)) ids.push_back(*id);
        else all_known = false;
    }
    return ids;
}

inline std::int64_t count_containing(const TransactionDb& db, const ItemSet& s) {
    bool known = false;
    const auto ids = encode(db, s, known);
    if (!known) return 0;
    std::int64_t n = 0;
    for (const auto& t : db.encoded())
        if (std::includes(t.begin(), t.end(), ids.begin(), ids.end())) ++n;
    return n;
}

inline void require_rows(const TransactionDb& db) {
    if (db.empty()) throw ArgumentError("transaction database is empty");
}

// count / M >= min_supp, without division.
inline bool meets(std::int64_t count, std::size_t m, const Rational& min_supp) {
    return static_cast<__int128>(count) * min_supp.denominator() >=
           static_cast<__int128>(min_supp.numerator()) * static_cast<__int128>(m);
}

} // namespace detail

inline Rational support(const TransactionDb& db, const ItemSet& s) {
    if (s.empty()) throw ArgumentError("support of an empty itemset");
    detail::require_rows(db);
    return Rational(detail::count_containing(db, s), static_cast<std::int64_t>(db.size()));
}

inline Rational confidence(const TransactionDb& db, const ItemSet& x, const ItemSet& y) {
    if (x.empty()) throw ArgumentError("confidence with an empty antecedent");
    detail::require_rows(db);
    const auto x_count = detail::count_containing(db, x);
    if (x_count == 0) throw UndefinedConfidenceError("confidence undefined: antecedent " + [&] {
        std::ostringstream os;
        os << x;
        return os.str();
    }() + " has zero support");
    return Rational(detail::count_containing(db, x.united(y)), x_count);
}

// Mean single-item support over the item universe.
inline Rational auto_min_support(const TransactionDb& db) {
    detail::require_rows(db);
    if (db.item_universe().empty()) throw ArgumentError("transaction database has no items");
    std::int64_t occurrences = 0;
    for (const auto& t : db.encoded()) occurrences += static_cast<std::int64_t>(t.size());
    return Rational(occurrences,
                    static_cast<std::int64_t>(db.size()) * static_cast<std::int64_t>(db.item_universe().size()));
}

inline Rational resolve_min_support(const MiningParams& params, const TransactionDb& db) {
    return params.min_supp ? *params.min_supp : auto_min_support(db);
}

// Apriori: L1 from single items, then C(k+1) by joining pairs of Lk that share
// their first k-1 items, pruning any candidate with an infrequent k-subset,
// and keeping candidates whose support reaches min_supp. Each frequent set
// carries its transaction-id list, so a candidate's support is the size of
// the intersection of its two parents' lists.
//
// Output is ordered by (size, items).
inline std::vector<FrequentItemset> frequent_itemsets(const TransactionDb& db, const Rational& min_supp,
                                                      std::size_t max_len) {
    if (min_supp <= 0 || min_supp > 1) throw ArgumentError("min_supp must be in (0,1], got " + to_string(min_supp));
    if (max_len < 1) throw ArgumentError("max_len must be at least 1");
    detail::require_rows(db);

    using Tids = std::vector<std::uint32_t>;
    struct Level {
        std::vector<std::vector<ItemId>> sets; // sorted
        std::vector<Tids> tids;
    };

    const auto m = db.size();
    const auto& rows = db.encoded();

    Level current;
    {
        std::vector<Tids> by_item(db.item_universe().size());
        for (std::uint32_t tid = 0; tid < rows.size(); ++tid)
            for (const auto id : rows[tid]) by_item[id].push_back(tid);
        for (ItemId id = 0; id < by_item.size(); ++id) {
            if (!detail::meets(static_cast<std::int64_t>(by_item[id].size()), m, min_supp)) continue;
            current.sets.push_back({id});
            current.tids.push_back(std::move(by_item[id]));
        }
    }

    std::vector<FrequentItemset> out;
    const auto emit = [&](const Level& level) {
        for (std::size_t i = 0; i < level.sets.size(); ++i) {
            std::vector<std::string> items;
            items.reserve(level.sets[i].size());
            for (const auto id : level.sets[i]) items.push_back(db.item_universe()[id]);
            const auto count = static_cast<std::int64_t>(level.tids[i].size());
            out.push_back({ItemSet(std::move(items)), count, Rational(count, static_cast<std::int64_t>(m))});
        }
    };

    for (std::size_t k = 1; !current.sets.empty(); ++k) {
        emit(current);
        if (k >= max_len) break;

        Level next;
        std::vector<ItemId> subset;
        for (std::size_t i = 0; i < current.sets.size(); ++i) {
            const auto& a = current.sets[i];
            for (std::size_t j = i + 1; j < current.sets.size(); ++j) {
                const auto& b = current.sets[j];
                if (!std::equal(a.begin(), a.end() - 1, b.begin())) break; // sorted: prefix group ended
                auto candidate = a;
                candidate.push_back(b.back());

                bool all_frequent = true;
                // Dropping either of the last two items yields a or b.
                for (std::size_t drop = 0; drop + 2 < candidate.size() && all_frequent; ++drop) {
                    subset.clear();
                    for (std::size_t p = 0; p < candidate.size(); ++p)
                        if (p != drop) subset.push_back(candidate[p]);
                    all_frequent = std::binary_search(current.sets.begin(), current.sets.end(), subset);
                }
                if (!all_frequent) continue;

                Tids tids;
                std::set_intersection(current.tids[i].begin(), current.tids[i].end(), current.tids[j].begin(),
                                      current.tids[j].end(), std::back_inserter(tids));
                if (!detail::meets(static_cast<std::int64_t>(tids.size()), m, min_supp)) continue;
                next.sets.push_back(std::move(candidate));
                next.tids.push_back(std::move(tids));
            }
        }
        current = std::move(next);
    }
    return out;
}

// Rule order: support desc, confidence desc, then antecedent and consequent
// ascending.
inline bool rule_order(const AssociationRule& a, const AssociationRule& b) {
    if (a.support != b.support) return a.support > b.support;
    if (a.confidence != b.confidence) return a.confidence > b.confidence;
    if (a.antecedent != b.antecedent) return a.antecedent < b.antecedent;
    return a.consequent < b.consequent;
}

// For every frequent Z with |Z| >= 2 and every non-empty proper subset X,
// emits X => Z\X when supp(Z)/supp(X) >= min_conf. Subset supports come from
// `freq` when present there and are counted in `db` otherwise.
inline std::vector<AssociationRule> generate_rules(const std::vector<FrequentItemset>& freq, const TransactionDb& db,
                                                   const Rational& min_conf) {
    if (min_conf < 0 || min_conf > 1) throw ArgumentError("min_conf must be in [0,1], got " + to_string(min_conf));
    detail::require_rows(db);
    const auto m = static_cast<std::int64_t>(db.size());

    std::map<ItemSet, std::int64_t> counts;
    for (const auto& f : freq) counts.emplace(f.itemset, f.support_count);
    const auto count_of = [&](const ItemSet& s) {
        if (const auto it = counts.find(s); it != counts.end()) return it->second;
        return counts.emplace(s, detail::count_containing(db, s)).first->second;
    };

    std::vector<AssociationRule> rules;
    for (const auto& f : freq) {
        const auto& z = f.itemset.items();
        const auto k = z.size();
        if (k < 2) continue;
        if (k > 30) throw ArgumentError("itemset too large for rule generation");
        const std::uint32_t full = (1u << k) - 1;
        for (std::uint32_t mask = 1; mask < full; ++mask) {
            std::vector<std::string> lhs;
            std::vector<std::string> rhs;
            for (std::size_t p = 0; p < k; ++p) ((mask >> p) & 1u ? lhs : rhs).push_back(z[p]);
            ItemSet x(std::move(lhs));
            const auto x_count = count_of(x);
            const Rational conf(f.support_count, x_count);
            if (conf < min_conf) continue;
            rules.push_back({std::move(x), ItemSet(std::move(rhs)), Rational(f.support_count, m), conf});
        }
    }
    std::sort(rules.begin(), rules.end(), rule_order);
    return rules;
}

struct MiningResult {
    Rational min_supp;
    std::vector<FrequentItemset> itemsets;
    std::vector<AssociationRule> rules;
};

inline MiningResult mine(const TransactionDb& db, const MiningParams& params) {
    params.validate();
    MiningResult r;
    r.min_supp = resolve_min_support(params, db);
    r.itemsets = frequent_itemsets(db, r.min_supp, params.max_len);
    r.rules = generate_rules(r.itemsets, db, params.min_conf);
    return r;
}

// {"lhs":[...],"rhs":[...],"support":"p/q","confidence":"p/q"} per line.
inline void write_rules(const std::vector<AssociationRule>& rules, std::ostream& out) {
    for (const auto& r : rules) {
        nlohmann::ordered_json j;
        j["lhs"] = r.antecedent.items();
        j["rhs"] = r.consequent.items();
        j["support"] = to_string(r.support);
        j["confidence"] = to_string(r.confidence);
        out << j.dump() << '\n';
    }
}

inline std::vector<AssociationRule> read_rules(std::istream& in) {
    std::vector<AssociationRule> rules;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            AssociationRule r{ItemSet(j.at("lhs").get<std::vector<std::string>>()),
                              ItemSet(j.at("rhs").get<std::vector<std::string>>()),
                              parse_rational(j.at("support").get<std::string>()),
                              parse_rational(j.at("confidence").get<std::string>())};
            if (r.antecedent.empty() || r.consequent.empty()) throw ParseError(lineno, "rule side is empty");
            rules.push_back(std::move(r));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(lineno, std::string("bad rule record: ") + e.what());
        } catch (const ArgumentError& e) {
            throw ParseError(lineno, e.what());
        }
    }
    return rules;
}

// "{artificial} => {intelligence}  supp 0.1033  conf 0.9400"
inline std::string format_rule(const AssociationRule& r) {
    std::ostringstream os;
    os << r.antecedent << " => " << r.consequent << "  supp " << to_decimal(r.support) << "  conf "
       << to_decimal(r.confidence);
    return os.str();
}

} // namespace grantmatch
