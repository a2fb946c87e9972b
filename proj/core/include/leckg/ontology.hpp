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

// Hierarchical extraction schema: entity-type forest, coarse relation
// categories, fine relations with domain/range constraints, and an alias
// table used for canonicalization.
//
// Schema file layout (JSON):
//
//   {
//     "entity_types": [{"id", "label", "parent"?, "examples"?}],
//     "categories":   [{"id", "label", "description"?}],
//     "relations":    [{"id", "category", "domain"?, "range"?, "long_tail"?}],
//     "aliases":      [{"alias", "canonical", "type"}]
//   }
//
// An empty or absent "domain"/"range" list is a wildcard. Constraint lists may
// name any type in the forest; descendants are accepted.

#ifndef LECKG_ONTOLOGY_HPP_
#define LECKG_ONTOLOGY_HPP_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

namespace leckg {

struct EntityType {
  std::string id;
  std::string label;
  std::optional<std::string> parent;
  std::vector<std::string> examples;
};

struct RelationCategory {
  std::string id;
  std::string label;
  std::string description;
};

struct RelationType {
  std::string id;
  std::string category;
  std::vector<std::string> domain_types;
  std::vector<std::string> range_types;
  bool long_tail = false;
};

struct AliasEntry {
  std::string alias;
  std::string canonical;
  std::string type;
};

/// Immutable after construction; safe for concurrent reads.
class Ontology {
 public:
  Ontology() = default;

  /// Cross-checks every reference. Throws Error{kParse} on a malformed
  /// document and Error{kIntegrity} on duplicate ids, dangling references,
  /// or a cyclic type hierarchy.
  static Ontology from_json(const nlohmann::json& doc);

  /// Canonical form: object keys sorted, collections in schema order.
  nlohmann::json to_json() const;

  const std::vector<EntityType>& entity_types() const { return entity_types_; }
  const std::vector<RelationCategory>& categories() const { return categories_; }
  const std::vector<RelationType>& relations() const { return relations_; }
  const std::vector<AliasEntry>& aliases() const { return aliases_; }

  const EntityType* find_entity_type(std::string_view id) const;
  /// Accepts the category id or its label ("Quantitative", "Definition & Naming").
  const RelationCategory* find_category(std::string_view id_or_label) const;
  const RelationType* find_relation(std::string_view id) const;

  /// Relations of a category in schema-file order. Throws Error{kUnknownCategory}.
  std::vector<const RelationType*> relations_in_category(std::string_view category) const;

  /// True iff `relation` exists and belongs to `category` (id or label).
  bool in_category(std::string_view relation, std::string_view category) const;

  /// Reflexive: every type is a subtype of itself.
  bool is_subtype_of(std::string_view type, std::string_view ancestor) const;

  /// Domain/range test with hierarchical inheritance and wildcard for empty
  /// constraint sets. Throws Error{kUnknownRelation}.
  bool check_schema(std::string_view head_type, std::string_view relation,
                    std::string_view tail_type) const;

  /// Exact-string alias lookup; canonical forms resolve to themselves.
  const AliasEntry* resolve_alias(std::string_view surface) const;

  /// All surface forms (aliases and the canonical itself) that denote `canonical`.
  std::vector<std::string> surface_forms(std::string_view canonical) const;

  /// Roots of the type forest in schema order.
  std::vector<std::string> root_types() const;

 private:
  void index();

  std::vector<EntityType> entity_types_;
  std::vector<RelationCategory> categories_;
  std::vector<RelationType> relations_;
  std::vector<AliasEntry> aliases_;

  std::unordered_map<std::string, std::size_t> type_index_;
  std::unordered_map<std::string, std::size_t> category_index_;
  std::unordered_map<std::string, std::size_t> relation_index_;
  std::unordered_map<std::string, std::size_t> alias_index_;
};

Ontology load_schema(const std::filesystem::path& path);
void save_schema(const Ontology& ontology, const std::filesystem::path& path);

}  // namespace leckg

#endif  // LECKG_ONTOLOGY_HPP_
