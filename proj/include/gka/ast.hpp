#ifndef GKA_AST_HPP
#define GKA_AST_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace gka {

/// One site of an agent signature. `states` lists the declared internal
/// states in declaration order; the first entry is the default. A site
/// with no states is a pure binding site and never carries `~` tags.
struct SiteSignature {
  std::string name;
  std::vector<std::string> states;
  std::optional<std::string> default_state;

  bool carries_state() const { return !states.empty(); }
};

bool operator==(const SiteSignature& a, const SiteSignature& b);

struct AgentSignature {
  std::string name;
  std::vector<SiteSignature> sites;
  int line = 0;

  const SiteSignature* find_site(const std::string& site) const;
};

bool operator==(const AgentSignature& a, const AgentSignature& b);

/// Site transform applied along one hierarchy edge.
struct Transform {
  enum class Kind { Delete, Rename, Duplicate, Add, DefaultOverride };

  Kind kind = Kind::Delete;
  std::string site;                     // source site (unused for Add)
  std::vector<std::string> new_names;   // Rename: 1 entry; Duplicate: >= 2
  SiteSignature added;                  // Add payload
  std::string new_default;              // DefaultOverride payload
};

bool operator==(const Transform& a, const Transform& b);

struct VariantDecl {
  std::string child;
  std::string parent;
  std::vector<Transform> transforms;
  int line = 0;
};

bool operator==(const VariantDecl& a, const VariantDecl& b);

/// Bond requirement on a mentioned site. A bare site is Free; `?` leaves
/// the binding state unconstrained; `!n` names one end of a bond.
struct BondCondition {
  enum class Kind { Unspecified, Free, Labeled };
  Kind kind = Kind::Free;
  int label = -1;

  static BondCondition unspecified() { return {Kind::Unspecified, -1}; }
  static BondCondition free() { return {Kind::Free, -1}; }
  static BondCondition labeled(int n) { return {Kind::Labeled, n}; }
};

bool operator==(const BondCondition& a, const BondCondition& b);

struct SiteCondition {
  std::string site;
  std::optional<std::string> state;
  BondCondition bond;
};

bool operator==(const SiteCondition& a, const SiteCondition& b);

struct AgentPattern {
  std::string agent;
  std::vector<SiteCondition> sites;

  const SiteCondition* find_site(const std::string& site) const;
};

bool operator==(const AgentPattern& a, const AgentPattern& b);

/// A rewrite rule over site-graph patterns. Reversible source rules are
/// desugared at parse time into a `.fwd`/`.rev` pair, so every stored
/// rule is one-directional. Rates are numeric; `%param` names are
/// resolved during parsing. `binary_rate` applies to embeddings spanning
/// two mixture components (and to all embeddings of single-component
/// left-hand sides); `unary_rate`, when present, replaces it for
/// embeddings within one component.
struct Rule {
  std::string name;
  std::vector<AgentPattern> lhs;
  std::vector<AgentPattern> rhs;
  double binary_rate = 1.0;
  std::optional<double> unary_rate;
  int line = 0;
};

bool operator==(const Rule& a, const Rule& b);

struct InitDecl {
  long long count = 0;
  std::vector<AgentPattern> pattern;
  int line = 0;
};

bool operator==(const InitDecl& a, const InitDecl& b);

struct Observable {
  std::string name;
  std::vector<AgentPattern> pattern;
  int line = 0;
};

bool operator==(const Observable& a, const Observable& b);

struct SiteChoice {
  std::string site;
  std::string target_site;
};

bool operator==(const SiteChoice& a, const SiteChoice& b);

/// `%instantiate:` assignment: every occurrence of `agent` in the named
/// rule is substituted by `target`, with optional per-site image choices.
struct AgentAssignment {
  std::string agent;
  std::string target;
  std::vector<SiteChoice> site_choices;
};

bool operator==(const AgentAssignment& a, const AgentAssignment& b);

struct InstantiateDecl {
  std::string rule;
  std::vector<AgentAssignment> assignments;
  int line = 0;
};

bool operator==(const InstantiateDecl& a, const InstantiateDecl& b);

/// Whole parsed model. Structural equality ignores source locations and
/// the param bookkeeping, both of which canonical unparsing discards.
struct ModelAST {
  std::vector<AgentSignature> signatures;
  std::vector<VariantDecl> variants;
  std::vector<Rule> rules;
  std::optional<std::vector<std::string>> fringe_decl;
  std::vector<InstantiateDecl> instantiate_decls;
  std::vector<InitDecl> init_decls;
  std::vector<Observable> observables;

  std::map<std::string, double> params;
  std::vector<std::string> unresolved_params;

  bool empty() const;
};

bool operator==(const ModelAST& a, const ModelAST& b);

/// True when `name` is `base` or `base` plus a `.fwd`/`.rev` suffix,
/// the scheme used when desugaring reversible rules.
bool rule_name_matches(const std::string& name, const std::string& base);

}  // namespace gka

#endif
