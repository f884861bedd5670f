#include "gka/ast.hpp"

#include <algorithm>

namespace gka {

bool operator==(const SiteSignature& a, const SiteSignature& b) {
  return a.name == b.name && a.states == b.states &&
         a.default_state == b.default_state;
}

const SiteSignature* AgentSignature::find_site(const std::string& site) const {
  for (const auto& s : sites)
    if (s.name == site) return &s;
  return nullptr;
}

bool operator==(const AgentSignature& a, const AgentSignature& b) {
  return a.name == b.name && a.sites == b.sites;
}

bool operator==(const Transform& a, const Transform& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Transform::Kind::Delete: return a.site == b.site;
    case Transform::Kind::Rename:
    case Transform::Kind::Duplicate:
      return a.site == b.site && a.new_names == b.new_names;
    case Transform::Kind::Add: return a.added == b.added;
    case Transform::Kind::DefaultOverride:
      return a.site == b.site && a.new_default == b.new_default;
  }
  return false;
}

bool operator==(const VariantDecl& a, const VariantDecl& b) {
  return a.child == b.child && a.parent == b.parent &&
         a.transforms == b.transforms;
}

bool operator==(const BondCondition& a, const BondCondition& b) {
  if (a.kind != b.kind) return false;
  return a.kind != BondCondition::Kind::Labeled || a.label == b.label;
}

bool operator==(const SiteCondition& a, const SiteCondition& b) {
  return a.site == b.site && a.state == b.state && a.bond == b.bond;
}

const SiteCondition* AgentPattern::find_site(const std::string& site) const {
  for (const auto& s : sites)
    if (s.site == site) return &s;
  return nullptr;
}

bool operator==(const AgentPattern& a, const AgentPattern& b) {
  return a.agent == b.agent && a.sites == b.sites;
}

bool operator==(const Rule& a, const Rule& b) {
  return a.name == b.name && a.lhs == b.lhs && a.rhs == b.rhs &&
         a.binary_rate == b.binary_rate && a.unary_rate == b.unary_rate;
}

bool operator==(const InitDecl& a, const InitDecl& b) {
  return a.count == b.count && a.pattern == b.pattern;
}

bool operator==(const Observable& a, const Observable& b) {
  return a.name == b.name && a.pattern == b.pattern;
}

bool operator==(const SiteChoice& a, const SiteChoice& b) {
  return a.site == b.site && a.target_site == b.target_site;
}

bool operator==(const AgentAssignment& a, const AgentAssignment& b) {
  return a.agent == b.agent && a.target == b.target &&
         a.site_choices == b.site_choices;
}

bool operator==(const InstantiateDecl& a, const InstantiateDecl& b) {
  return a.rule == b.rule && a.assignments == b.assignments;
}

bool ModelAST::empty() const {
  return signatures.empty() && variants.empty() && rules.empty() &&
         !fringe_decl && instantiate_decls.empty() && init_decls.empty() &&
         observables.empty();
}

bool operator==(const ModelAST& a, const ModelAST& b) {
  return a.signatures == b.signatures && a.variants == b.variants &&
         a.rules == b.rules && a.fringe_decl == b.fringe_decl &&
         a.instantiate_decls == b.instantiate_decls &&
         a.init_decls == b.init_decls && a.observables == b.observables;
}

bool rule_name_matches(const std::string& name, const std::string& base) {
  if (name == base) return true;
  auto suffixed = [&](const char* suffix) {
    return name == base + suffix;
  };
  return suffixed(".fwd") || suffixed(".rev");
}

}  // namespace gka
