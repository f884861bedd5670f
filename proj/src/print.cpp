#include "gka/print.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <sstream>

namespace gka {

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

// Renumbers bond labels 0..n in first-occurrence order over one side.
std::map<int, int> label_order(const std::vector<AgentPattern>& side) {
  std::map<int, int> order;
  int next = 0;
  for (const auto& ap : side)
    for (const auto& sc : ap.sites)
      if (sc.bond.kind == BondCondition::Kind::Labeled &&
          !order.count(sc.bond.label))
        order[sc.bond.label] = next++;
  return order;
}

void print_site_condition(std::ostringstream& out, const SiteCondition& sc,
                          const std::map<int, int>& labels) {
  out << sc.site;
  if (sc.state) out << '~' << *sc.state;
  switch (sc.bond.kind) {
    case BondCondition::Kind::Free:
      break;
    case BondCondition::Kind::Unspecified:
      out << '?';
      break;
    case BondCondition::Kind::Labeled:
      out << '!' << labels.at(sc.bond.label);
      break;
  }
}

void print_side(std::ostringstream& out,
                const std::vector<AgentPattern>& side) {
  auto labels = label_order(side);
  bool first_agent = true;
  for (const auto& ap : side) {
    if (!first_agent) out << ", ";
    first_agent = false;
    out << ap.agent << '(';
    bool first_site = true;
    for (const auto& sc : ap.sites) {
      if (!first_site) out << ',';
      first_site = false;
      print_site_condition(out, sc, labels);
    }
    out << ')';
  }
}

void print_site_signature(std::ostringstream& out, const SiteSignature& s) {
  out << s.name;
  for (const auto& st : s.states) out << '~' << st;
}

std::string quote(const std::string& name) { return "'" + name + "'"; }

}  // namespace

std::string unparse_pattern(const std::vector<AgentPattern>& pattern) {
  std::ostringstream out;
  print_side(out, pattern);
  return out.str();
}

std::string unparse_rule(const Rule& rule) {
  std::ostringstream out;
  out << quote(rule.name) << ' ';
  print_side(out, rule.lhs);
  out << " -> ";
  print_side(out, rule.rhs);
  out << " @ " << format_double(rule.binary_rate);
  if (rule.unary_rate) out << " (" << format_double(*rule.unary_rate) << ')';
  return out.str();
}

std::string unparse_signature(const AgentSignature& sig) {
  std::ostringstream out;
  out << sig.name << '(';
  bool first = true;
  for (const auto& s : sig.sites) {
    if (!first) out << ',';
    first = false;
    print_site_signature(out, s);
  }
  out << ')';
  return out.str();
}

std::string unparse_variant(const VariantDecl& v) {
  std::ostringstream out;
  out << v.child << " = " << v.parent;
  for (const auto& t : v.transforms) {
    out << '[';
    switch (t.kind) {
      case Transform::Kind::Delete:
        out << '-' << t.site;
        break;
      case Transform::Kind::Rename:
      case Transform::Kind::Duplicate: {
        out << t.site << "\\{";
        bool first = true;
        for (const auto& n : t.new_names) {
          if (!first) out << ' ';
          first = false;
          out << n;
        }
        out << '}';
        break;
      }
      case Transform::Kind::Add:
        out << '+';
        print_site_signature(out, t.added);
        break;
      case Transform::Kind::DefaultOverride:
        out << t.site << '~' << t.new_default;
        break;
    }
    out << ']';
  }
  return out.str();
}

std::string unparse(const ModelAST& ast) {
  std::ostringstream out;
  for (const auto& sig : ast.signatures) out << unparse_signature(sig) << '\n';
  for (const auto& v : ast.variants) out << unparse_variant(v) << '\n';
  if (ast.fringe_decl) {
    out << "%concrete:";
    for (const auto& a : *ast.fringe_decl) out << ' ' << a;
    out << '\n';
  }
  for (const auto& r : ast.rules) out << unparse_rule(r) << '\n';
  for (const auto& d : ast.instantiate_decls) {
    out << "%instantiate: " << quote(d.rule);
    for (const auto& a : d.assignments) {
      out << ' ' << a.agent << '=' << a.target;
      if (!a.site_choices.empty()) {
        out << '[';
        bool first = true;
        for (const auto& c : a.site_choices) {
          if (!first) out << ',';
          first = false;
          out << c.site << '=' << c.target_site;
        }
        out << ']';
      }
    }
    out << '\n';
  }
  for (const auto& i : ast.init_decls)
    out << "%init: " << i.count << ' ' << unparse_pattern(i.pattern) << '\n';
  for (const auto& o : ast.observables)
    out << "%obs: " << quote(o.name) << ' ' << unparse_pattern(o.pattern)
        << '\n';
  return out.str();
}

namespace {

// Key form of one side: occurrences in order, mentioned sites sorted by
// name, labels renumbered over the sorted traversal.
void key_side(std::ostringstream& out, const std::vector<AgentPattern>& side) {
  std::map<int, int> labels;
  int next = 0;
  for (const auto& ap : side) {
    auto sorted = ap.sites;
    std::sort(sorted.begin(), sorted.end(),
              [](const SiteCondition& a, const SiteCondition& b) {
                return a.site < b.site;
              });
    for (const auto& sc : sorted)
      if (sc.bond.kind == BondCondition::Kind::Labeled &&
          !labels.count(sc.bond.label))
        labels[sc.bond.label] = next++;
  }
  bool first_agent = true;
  for (const auto& ap : side) {
    if (!first_agent) out << ',';
    first_agent = false;
    auto sorted = ap.sites;
    std::sort(sorted.begin(), sorted.end(),
              [](const SiteCondition& a, const SiteCondition& b) {
                return a.site < b.site;
              });
    out << ap.agent << '(';
    bool first_site = true;
    for (const auto& sc : sorted) {
      if (!first_site) out << ',';
      first_site = false;
      print_site_condition(out, sc, labels);
    }
    out << ')';
  }
}

}  // namespace

std::string canonical_rule_structure(const Rule& rule) {
  std::ostringstream out;
  key_side(out, rule.lhs);
  out << "->";
  key_side(out, rule.rhs);
  return out.str();
}

std::string canonical_rule_key(const Rule& rule) {
  std::ostringstream out;
  out << canonical_rule_structure(rule) << '@'
      << format_double(rule.binary_rate);
  if (rule.unary_rate) out << '(' << format_double(*rule.unary_rate) << ')';
  return out.str();
}

}  // namespace gka
