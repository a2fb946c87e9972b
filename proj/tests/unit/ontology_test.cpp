// Copyright 2026 The leckg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "leckg/ontology.hpp"

#include <map>
#include <set>

#include <gtest/gtest.h>

#include "leckg/error.hpp"
#include "test_support.hpp"

namespace leckg {
namespace {

using nlohmann::json;
using testing::bundled_schema;

// Reference schema table; '+' marks long-tail relations.
const std::map<std::string, std::vector<std::string>>& reference_table() {
  static const std::map<std::string, std::vector<std::string>> t = {
      {"Definition", {"definedAs", "fullNameOf", "abbreviationOf", "aliasOf+"}},
      {"Hierarchy", {"belongsTo", "contains", "composedOf", "partOf"}},
      {"Spatiotemporal",
       {"locatedIn", "distributedIn", "covers", "timePointOf", "timeRangeOf", "startsAt", "endsAt", "publishedOn",
        "implementedAt", "spatialDistributionPattern", "displayScale"}},
      {"Quantitative",
       {"hasValue", "hasUnit", "valueRangeOf", "maxValueOf", "minValueOf", "thresholdOf", "precisionOf",
        "meanValueOf", "medianOf", "stdDevOf", "spatialResolution", "temporalResolution", "gridSizeOf",
        "updateFrequency"}},
      {"Trend", {"trendOf", "changeAmountOf", "changeRateOf", "yoyChangeOf", "momChangeOf", "growthRateOf+"}},
      {"Provenance",
       {"dataSourceOf", "publishedBy", "providedBy", "producedBy", "citedFrom", "hasInput+", "hasOutput+",
        "usesMethod", "usesModel", "usesAlgorithm+", "integratedWith", "basedOnData", "basedOnAssumption+",
        "evaluationMethod", "validationMethod", "monitoringIndicator", "monitoringDataType+"}},
      {"Causality",
       {"causes", "affects", "threatens", "promotes", "reduces", "mitigates", "exacerbates", "dependsOn",
        "constrainedBy", "requires"}},
      {"Application",
       {"usedFor", "appliedTo", "supportsDecision", "constructs", "deploys", "integrates", "implements",
        "hasFunction", "canIdentify", "canDetect+", "statusOf", "progressOf+", "completionOf", "milestoneOf",
        "versionOf", "hasProblem", "hasDefect", "bottleneckOf", "riskOf", "relatedToSDG", "correspondsToSDG+",
        "contributesToSDG", "promotesSDG"}},
  };
  return t;
}

json minimal_schema() {
  return {{"entity_types", {{{"id", "Place"}}, {{"id", "City"}, {"parent", "Place"}}, {{"id", "Thing"}}}},
          {"categories", {{{"id", "Spatial"}, {"label", "Spatial & Co"}}}},
          {"relations", {{{"id", "in"}, {"category", "Spatial"}, {"domain", {"Place"}}, {"range", {"Place"}}},
                         {{"id", "near"}, {"category", "Spatial"}}}},
          {"aliases", {{{"alias", "NYC"}, {"canonical", "New York"}, {"type", "City"}}}}};
}

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::kUsage;
}

TEST(Ontology, BundledSchemaMatchesReferenceTable) {
  const Ontology& o = bundled_schema();
  EXPECT_EQ(o.entity_types().size(), 12u);
  EXPECT_EQ(o.categories().size(), 8u);
  EXPECT_EQ(o.relations().size(), 89u);
  std::size_t total = 0;
  for (const auto& [cat, rels] : reference_table()) {
    const auto got = o.relations_in_category(cat);
    ASSERT_EQ(got.size(), rels.size()) << cat;
    for (std::size_t i = 0; i < rels.size(); ++i) {
      const bool tail = rels[i].back() == '+';
      const std::string id = tail ? rels[i].substr(0, rels[i].size() - 1) : rels[i];
      EXPECT_EQ(got[i]->id, id);
      EXPECT_EQ(got[i]->long_tail, tail) << id;
    }
    total += rels.size();
  }
  EXPECT_EQ(total, 89u);
}

TEST(Ontology, CategoryLookupByIdOrLabel) {
  const Ontology& o = bundled_schema();
  const auto quant = o.relations_in_category("Quantitative");
  EXPECT_EQ(quant.size(), 14u);
  std::set<std::string> ids;
  for (const auto* r : quant) ids.insert(r->id);
  EXPECT_TRUE(ids.contains("hasValue"));
  EXPECT_TRUE(ids.contains("hasUnit"));
  EXPECT_EQ(o.relations_in_category("Definition & Naming").size(), 4u);
  EXPECT_EQ(kind_of([&] { o.relations_in_category("Misc"); }), ErrorKind::kUnknownCategory);
  EXPECT_TRUE(o.in_category("hasValue", "Quantitative"));
  EXPECT_FALSE(o.in_category("hasValue", "Causality"));
  EXPECT_FALSE(o.in_category("situatedAt", "Spatiotemporal"));
}

TEST(Ontology, SchemaCheckUsesTypeHierarchy) {
  const Ontology& o = bundled_schema();
  EXPECT_TRUE(o.check_schema("Province", "locatedIn", "Country"));
  EXPECT_FALSE(o.check_schema("Indicator", "locatedIn", "Indicator"));
  EXPECT_TRUE(o.is_subtype_of("City", "GeographicEntity"));
  EXPECT_TRUE(o.is_subtype_of("Goal", "Goal"));
  EXPECT_FALSE(o.is_subtype_of("Goal", "Indicator"));
  EXPECT_EQ(kind_of([&] { o.check_schema("Country", "situatedAt", "Country"); }), ErrorKind::kUnknownRelation);
}

TEST(Ontology, EmptyConstraintSetsAreWildcardsForEveryTypePair) {
  const Ontology& o = bundled_schema();
  for (const auto& rel : o.relations()) {
    for (const auto& h : o.entity_types()) {
      for (const auto& t : o.entity_types()) {
        bool head_ok = rel.domain_types.empty();
        for (const auto& d : rel.domain_types) head_ok = head_ok || o.is_subtype_of(h.id, d);
        bool tail_ok = rel.range_types.empty();
        for (const auto& r : rel.range_types) tail_ok = tail_ok || o.is_subtype_of(t.id, r);
        EXPECT_EQ(o.check_schema(h.id, rel.id, t.id), head_ok && tail_ok) << h.id << " " << rel.id << " " << t.id;
      }
    }
  }
}

TEST(Ontology, AliasResolution) {
  const Ontology& o = bundled_schema();
  const auto* a = o.resolve_alias("China");
  ASSERT_NE(a, nullptr);
  EXPECT_EQ(a->canonical, "中国");
  EXPECT_EQ(a->type, "Country");
  EXPECT_EQ(o.resolve_alias("Atlantis"), nullptr);
  const auto forms = o.surface_forms("中国");
  EXPECT_NE(std::find(forms.begin(), forms.end(), "中华人民共和国"), forms.end());
  EXPECT_NE(std::find(forms.begin(), forms.end(), "中国"), forms.end());
}

TEST(Ontology, EmptyRelationListIsValid) {
  json doc = minimal_schema();
  doc["relations"] = json::array();
  const Ontology o = Ontology::from_json(doc);
  EXPECT_TRUE(o.relations().empty());
  EXPECT_TRUE(o.relations_in_category("Spatial").empty());
}

TEST(Ontology, IntegrityErrors) {
  json dangling = minimal_schema();
  dangling["relations"].push_back({{"id", "x"}, {"category", "Misc"}});
  EXPECT_EQ(kind_of([&] { Ontology::from_json(dangling); }), ErrorKind::kIntegrity);

  json dup = minimal_schema();
  dup["relations"].push_back({{"id", "near"}, {"category", "Spatial"}});
  EXPECT_EQ(kind_of([&] { Ontology::from_json(dup); }), ErrorKind::kIntegrity);

  json bad_type = minimal_schema();
  bad_type["relations"][0]["domain"] = {"Nowhere"};
  EXPECT_EQ(kind_of([&] { Ontology::from_json(bad_type); }), ErrorKind::kIntegrity);

  json cycle = minimal_schema();
  cycle["entity_types"][0]["parent"] = "City";
  EXPECT_EQ(kind_of([&] { Ontology::from_json(cycle); }), ErrorKind::kIntegrity);

  EXPECT_EQ(kind_of([] { Ontology::from_json(json::array()); }), ErrorKind::kParse);
}

TEST(Ontology, JsonRoundTripIsStable) {
  const Ontology& o = bundled_schema();
  const json once = o.to_json();
  const json twice = Ontology::from_json(once).to_json();
  EXPECT_EQ(once, twice);
  testing::TempDir dir("onto");
  save_schema(o, dir.path() / "schema.json");
  EXPECT_EQ(load_schema(dir.path() / "schema.json").to_json(), once);
}

TEST(Ontology, RootTypesInSchemaOrder) {
  const Ontology o = Ontology::from_json(minimal_schema());
  EXPECT_EQ(o.root_types(), (std::vector<std::string>{"Place", "Thing"}));
}

}  // namespace
}  // namespace leckg
