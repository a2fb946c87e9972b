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

#include <algorithm>
#include <unordered_set>

#include "leckg/error.hpp"
#include "leckg/text.hpp"

namespace leckg {
namespace {

using nlohmann::json;

[[noreturn]] void parse_fail(const std::string& what) {
  throw Error(ErrorKind::kParse, "schema: " + what);
}

[[noreturn]] void integrity_fail(const std::string& what) {
  throw Error(ErrorKind::kIntegrity, "schema: " + what);
}

std::string required_string(const json& obj, const char* key, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) parse_fail(where + " requires string field '" + key + "'");
  std::string value = it->get<std::string>();
  if (value.empty()) parse_fail(where + " has empty '" + key + "'");
  return value;
}

std::string optional_string(const json& obj, const char* key, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return {};
  if (!it->is_string()) parse_fail(where + " field '" + key + "' must be a string");
  return it->get<std::string>();
}

std::vector<std::string> string_list(const json& obj, const char* key, const std::string& where) {
  std::vector<std::string> out;
  const auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return out;
  if (!it->is_array()) parse_fail(where + " field '" + key + "' must be an array");
  for (const auto& v : *it) {
    if (!v.is_string()) parse_fail(where + " field '" + key + "' must hold strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

const json& array_field(const json& doc, const char* key) {
  static const json kEmpty = json::array();
  const auto it = doc.find(key);
  if (it == doc.end() || it->is_null()) return kEmpty;
  if (!it->is_array()) parse_fail(std::string("top-level '") + key + "' must be an array");
  return *it;
}

}  // namespace

Ontology Ontology::from_json(const json& doc) {
  if (!doc.is_object()) parse_fail("document must be an object");
  Ontology o;

  for (const auto& e : array_field(doc, "entity_types")) {
    if (!e.is_object()) parse_fail("entity type entries must be objects");
    EntityType t;
    t.id = required_string(e, "id", "entity type");
    const std::string where = "entity type '" + t.id + "'";
    t.label = optional_string(e, "label", where);
    if (t.label.empty()) t.label = t.id;
    if (std::string parent = optional_string(e, "parent", where); !parent.empty()) t.parent = parent;
    t.examples = string_list(e, "examples", where);
    o.entity_types_.push_back(std::move(t));
  }
  for (const auto& c : array_field(doc, "categories")) {
    if (!c.is_object()) parse_fail("category entries must be objects");
    RelationCategory cat;
    cat.id = required_string(c, "id", "category");
    const std::string where = "category '" + cat.id + "'";
    cat.label = optional_string(c, "label", where);
    if (cat.label.empty()) cat.label = cat.id;
    cat.description = optional_string(c, "description", where);
    o.categories_.push_back(std::move(cat));
  }
  for (const auto& r : array_field(doc, "relations")) {
    if (!r.is_object()) parse_fail("relation entries must be objects");
    RelationType rel;
    rel.id = required_string(r, "id", "relation");
    const std::string where = "relation '" + rel.id + "'";
    rel.category = required_string(r, "category", where);
    rel.domain_types = string_list(r, "domain", where);
    rel.range_types = string_list(r, "range", where);
    if (const auto it = r.find("long_tail"); it != r.end() && !it->is_null()) {
      if (!it->is_boolean()) parse_fail(where + " field 'long_tail' must be boolean");
      rel.long_tail = it->get<bool>();
    }
    o.relations_.push_back(std::move(rel));
  }
  for (const auto& a : array_field(doc, "aliases")) {
    if (!a.is_object()) parse_fail("alias entries must be objects");
    AliasEntry entry;
    entry.alias = required_string(a, "alias", "alias");
    const std::string where = "alias '" + entry.alias + "'";
    entry.canonical = required_string(a, "canonical", where);
    entry.type = required_string(a, "type", where);
    o.aliases_.push_back(std::move(entry));
  }

  o.index();
  return o;
}

void Ontology::index() {
  for (std::size_t i = 0; i < entity_types_.size(); ++i) {
    if (!type_index_.emplace(entity_types_[i].id, i).second)
      integrity_fail("duplicate entity type '" + entity_types_[i].id + "'");
  }
  for (const auto& t : entity_types_) {
    if (t.parent && !type_index_.contains(*t.parent))
      integrity_fail("entity type '" + t.id + "' has unknown parent '" + *t.parent + "'");
  }
  // Walking up from any node must reach a root within |types| steps.
  for (const auto& t : entity_types_) {
    const EntityType* cur = &t;
    std::size_t steps = 0;
    while (cur->parent) {
      if (++steps > entity_types_.size()) integrity_fail("cyclic type hierarchy through '" + t.id + "'");
      cur = &entity_types_[type_index_.at(*cur->parent)];
    }
  }

  for (std::size_t i = 0; i < categories_.size(); ++i) {
    if (!category_index_.emplace(categories_[i].id, i).second)
      integrity_fail("duplicate category '" + categories_[i].id + "'");
  }
  for (std::size_t i = 0; i < categories_.size(); ++i) {
    const auto& label = categories_[i].label;
    if (label == categories_[i].id) continue;
    const auto [it, inserted] = category_index_.emplace(label, i);
    if (!inserted && it->second != i) integrity_fail("category label '" + label + "' collides with another category");
  }

  for (std::size_t i = 0; i < relations_.size(); ++i) {
    const auto& r = relations_[i];
    if (!relation_index_.emplace(r.id, i).second) integrity_fail("duplicate relation '" + r.id + "'");
    const auto cat = category_index_.find(r.category);
    if (cat == category_index_.end() || categories_[cat->second].id != r.category)
      integrity_fail("relation '" + r.id + "' cites unknown category '" + r.category + "'");
    for (const auto* list : {&r.domain_types, &r.range_types}) {
      for (const auto& type : *list) {
        if (!type_index_.contains(type))
          integrity_fail("relation '" + r.id + "' constrains on unknown type '" + type + "'");
      }
    }
  }

  for (std::size_t i = 0; i < aliases_.size(); ++i) {
    const auto& a = aliases_[i];
    if (!type_index_.contains(a.type))
      integrity_fail("alias '" + a.alias + "' has unknown type '" + a.type + "'");
    const auto [it, inserted] = alias_index_.emplace(a.alias, i);
    if (!inserted) integrity_fail("duplicate alias '" + a.alias + "'");
  }
  // Canonical forms resolve to themselves; a canonical may not double as an
  // alias of something else.
  for (std::size_t i = 0; i < aliases_.size(); ++i) {
    const auto& a = aliases_[i];
    const auto it = alias_index_.find(a.canonical);
    if (it == alias_index_.end()) {
      alias_index_.emplace(a.canonical, i);
    } else {
      const auto& other = aliases_[it->second];
      if (other.canonical != a.canonical || other.type != a.type)
        integrity_fail("alias table maps '" + a.canonical + "' inconsistently");
    }
  }
}

json Ontology::to_json() const {
  json types = json::array();
  for (const auto& t : entity_types_) {
    json j = {{"id", t.id}, {"label", t.label}, {"examples", t.examples}};
    if (t.parent) j["parent"] = *t.parent;
    types.push_back(std::move(j));
  }
  json cats = json::array();
  for (const auto& c : categories_) {
    cats.push_back({{"id", c.id}, {"label", c.label}, {"description", c.description}});
  }
  json rels = json::array();
  for (const auto& r : relations_) {
    rels.push_back({{"id", r.id},
                    {"category", r.category},
                    {"domain", r.domain_types},
                    {"range", r.range_types},
                    {"long_tail", r.long_tail}});
  }
  json aliases = json::array();
  for (const auto& a : aliases_) {
    aliases.push_back({{"alias", a.alias}, {"canonical", a.canonical}, {"type", a.type}});
  }
  return {{"entity_types", std::move(types)},
          {"categories", std::move(cats)},
          {"relations", std::move(rels)},
          {"aliases", std::move(aliases)}};
}

const EntityType* Ontology::find_entity_type(std::string_view id) const {
  const auto it = type_index_.find(std::string(id));
  return it == type_index_.end() ? nullptr : &entity_types_[it->second];
}

const RelationCategory* Ontology::find_category(std::string_view id_or_label) const {
  const auto it = category_index_.find(std::string(id_or_label));
  return it == category_index_.end() ? nullptr : &categories_[it->second];
}

const RelationType* Ontology::find_relation(std::string_view id) const {
  const auto it = relation_index_.find(std::string(id));
  return it == relation_index_.end() ? nullptr : &relations_[it->second];
}

std::vector<const RelationType*> Ontology::relations_in_category(std::string_view category) const {
  const RelationCategory* cat = find_category(category);
  if (cat == nullptr) throw Error(ErrorKind::kUnknownCategory, "unknown category '" + std::string(category) + "'");
  std::vector<const RelationType*> out;
  for (const auto& r : relations_) {
    if (r.category == cat->id) out.push_back(&r);
  }
  return out;
}

bool Ontology::in_category(std::string_view relation, std::string_view category) const {
  const RelationType* rel = find_relation(relation);
  const RelationCategory* cat = find_category(category);
  return rel != nullptr && cat != nullptr && rel->category == cat->id;
}

bool Ontology::is_subtype_of(std::string_view type, std::string_view ancestor) const {
  const EntityType* cur = find_entity_type(type);
  while (cur != nullptr) {
    if (cur->id == ancestor) return true;
    cur = cur->parent ? find_entity_type(*cur->parent) : nullptr;
  }
  return false;
}

bool Ontology::check_schema(std::string_view head_type, std::string_view relation,
                            std::string_view tail_type) const {
  const RelationType* rel = find_relation(relation);
  if (rel == nullptr) throw Error(ErrorKind::kUnknownRelation, "unknown relation '" + std::string(relation) + "'");
  const auto accepts = [this](const std::vector<std::string>& allowed, std::string_view type) {
    if (allowed.empty()) return true;
    return std::any_of(allowed.begin(), allowed.end(),
                       [&](const std::string& a) { return is_subtype_of(type, a); });
  };
  return accepts(rel->domain_types, head_type) && accepts(rel->range_types, tail_type);
}

const AliasEntry* Ontology::resolve_alias(std::string_view surface) const {
  const auto it = alias_index_.find(std::string(surface));
  return it == alias_index_.end() ? nullptr : &aliases_[it->second];
}

std::vector<std::string> Ontology::surface_forms(std::string_view canonical) const {
  std::vector<std::string> out{std::string(canonical)};
  for (const auto& a : aliases_) {
    if (a.canonical == canonical && a.alias != canonical &&
        std::find(out.begin(), out.end(), a.alias) == out.end()) {
      out.push_back(a.alias);
    }
  }
  return out;
}

std::vector<std::string> Ontology::root_types() const {
  std::vector<std::string> out;
  for (const auto& t : entity_types_) {
    if (!t.parent) out.push_back(t.id);
  }
  return out;
}

Ontology load_schema(const std::filesystem::path& path) {
  return Ontology::from_json(text::read_json(path));
}

void save_schema(const Ontology& ontology, const std::filesystem::path& path) {
  text::write_file(path, ontology.to_json().dump(2) + "\n");
}

}  // namespace leckg
