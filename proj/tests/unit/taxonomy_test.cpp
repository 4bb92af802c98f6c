#include <algorithm>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "grantmatch/taxonomy.hpp"

using namespace grantmatch;

namespace {

const std::string kHeader = "area\tdiscipline\tfield\tkeyword\n";

const std::string kThreeRows = kHeader +
                               "Informatics\tHuman informatics\tIntelligent informatics\tMachine learning\n"
                               "\t\tIntelligent informatics\tKnowledge acquisition\n"
                               "\t\tIntelligent robotics\tRobot\n";

std::vector<std::string> field_names(const std::set<FieldId>& ids) {
    std::vector<std::string> out;
    for (const auto& id : ids) out.push_back(id.value);
    return out;
}

} // namespace

TEST(Taxonomy, CarriesDownBlankAreaAndDiscipline) {
    const auto t = load_taxonomy(kThreeRows);
    EXPECT_EQ(t.area_count(), 1u);
    EXPECT_EQ(t.discipline_count(), 1u);
    EXPECT_EQ(t.field_count(), 2u);
    EXPECT_EQ(t.keyword_index().size(), 3u);
    EXPECT_EQ(t.ancestors(FieldId{"Intelligent robotics"}),
              (Ancestors{DisciplineId{"Human informatics"}, AreaId{"Informatics"}}));
}

TEST(Taxonomy, DuplicateRowsCollapse) {
    const std::string row = "Informatics\tHuman informatics\tIntelligent informatics\tMachine learning\n";
    EXPECT_EQ(load_taxonomy(kHeader + row + row), load_taxonomy(kHeader + row));
}

TEST(Taxonomy, FixtureCounts) {
    const auto t = fixtures::taxonomy();
    EXPECT_EQ(t.area_count(), 3u);
    EXPECT_EQ(t.discipline_count(), 4u);
    EXPECT_EQ(t.field_count(), 6u);
    EXPECT_EQ(t.keyword_index().size(), 24u);
}

TEST(Taxonomy, FieldsForItem) {
    const auto t = fixtures::taxonomy();
    EXPECT_EQ(field_names(t.fields_for_item("machine learning")), std::vector<std::string>{"Intelligent informatics"});
    EXPECT_TRUE(t.fields_for_item("zzz-not-a-keyword").empty());
    // lookups take normalized items only
    EXPECT_TRUE(t.fields_for_item("Machine learning").empty());
}

TEST(Taxonomy, KeywordSharedByTwoFields) {
    const auto t = load_taxonomy(kHeader +
                                 "Complex systems\tHuman life science\tEating habits\tHealth\n"
                                 "Agricultural sciences\tAgricultural chemistry\tFood science\tHealth\n");
    EXPECT_EQ(field_names(t.fields_for_item("health")), (std::vector<std::string>{"Eating habits", "Food science"}));
}

TEST(Taxonomy, Ancestors) {
    const auto t = fixtures::taxonomy();
    const auto a = t.ancestors(FieldId{"Intelligent informatics"});
    EXPECT_EQ(a.discipline.value, "Human informatics");
    EXPECT_EQ(a.area.value, "Informatics");
    EXPECT_EQ(t.ancestors(FieldId{"Intelligent informatics"}), a);
    EXPECT_EQ(t.ancestors(FieldId{"Food science"}),
              (Ancestors{DisciplineId{"Agricultural chemistry"}, AreaId{"Agricultural sciences"}}));
    EXPECT_THROW(t.ancestors(FieldId{"Astrophysics"}), LookupError);
}

TEST(Taxonomy, RowOrderDoesNotMatter) {
    // Fully populated rows so any permutation is still a valid table.
    std::istringstream canonical(serialize_taxonomy(fixtures::taxonomy()));
    std::string header;
    std::getline(canonical, header);
    std::vector<std::string> rows;
    for (std::string line; std::getline(canonical, line);) rows.push_back(line);

    const auto reference = fixtures::taxonomy();
    std::mt19937 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        std::shuffle(rows.begin(), rows.end(), rng);
        std::string tsv = header + "\n";
        for (const auto& r : rows) tsv += r + "\n";
        ASSERT_EQ(load_taxonomy(tsv), reference);
    }
}

TEST(Taxonomy, SerializeRoundTrip) {
    const auto t = fixtures::taxonomy();
    const auto again = load_taxonomy(serialize_taxonomy(t));
    EXPECT_EQ(again, t);
    EXPECT_EQ(again.keyword_index(), t.keyword_index());
    EXPECT_EQ(serialize_taxonomy(again), serialize_taxonomy(t));
}

TEST(Taxonomy, EveryIndexedFieldResolves) {
    const auto t = fixtures::taxonomy();
    for (const auto& [keyword, fields] : t.keyword_index()) {
        ASSERT_FALSE(fields.empty()) << keyword;
        for (const auto& f : fields) EXPECT_NO_THROW(t.ancestors(f)) << keyword;
        EXPECT_EQ(text::normalize(keyword), keyword);
    }
    for (const auto& a : t.areas())
        for (const auto& d : a.disciplines)
            for (const auto& f : d.fields) EXPECT_FALSE(f.keywords.empty());
}

TEST(Taxonomy, ParseErrorsCarryLineNumbers) {
    try {
        load_taxonomy(kHeader + "Informatics\tHuman informatics\tIntelligent informatics\tMachine learning\n"
                                "Informatics\tHuman informatics\tonly three\n");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
    }
    EXPECT_THROW(load_taxonomy("area,discipline,field,keyword\n"), ParseError);
    EXPECT_THROW(load_taxonomy(kHeader + "A\tD\tF\t   \n"), ParseError);
}

TEST(Taxonomy, ValidationErrors) {
    EXPECT_THROW(load_taxonomy(""), ValidationError);
    EXPECT_THROW(load_taxonomy(kHeader), ValidationError);
    // keyword with no field
    EXPECT_THROW(load_taxonomy(kHeader + "A\tD\t\tkeyword\n"), ValidationError);
    // first row cannot inherit
    EXPECT_THROW(load_taxonomy(kHeader + "\tD\tF\tkeyword\n"), ValidationError);
    // tree shape: one field under two disciplines, one discipline under two areas
    EXPECT_THROW(load_taxonomy(kHeader + "A\tD1\tF\tk1\nA\tD2\tF\tk2\n"), ValidationError);
    EXPECT_THROW(load_taxonomy(kHeader + "A1\tD\tF1\tk1\nA2\tD\tF2\tk2\n"), ValidationError);
}

TEST(Taxonomy, NormalizesKeywords) {
    const auto t = load_taxonomy(kHeader + "A\tD\tF\t  Machine   LEARNING \n");
    EXPECT_EQ(t.keywords(), std::vector<std::string>{"machine learning"});
}
