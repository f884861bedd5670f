#include "gka/parse.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace gka {
namespace {

enum class Tok {
  Ident,
  Number,
  QName,
  Directive,
  LParen,
  RParen,
  LBrack,
  RBrack,
  LBrace,
  RBrace,
  Comma,
  Equals,
  Tilde,
  Bang,
  Question,
  At,
  Backslash,
  Plus,
  Minus,
  Arrow,
  BiArrow,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  double number = 0;
  int col = 1;
};

const char* token_name(Tok t) {
  switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::Number: return "number";
    case Tok::QName: return "quoted name";
    case Tok::Directive: return "directive";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBrack: return "'['";
    case Tok::RBrack: return "']'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::Comma: return "','";
    case Tok::Equals: return "'='";
    case Tok::Tilde: return "'~'";
    case Tok::Bang: return "'!'";
    case Tok::Question: return "'?'";
    case Tok::At: return "'@'";
    case Tok::Backslash: return "'\\'";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Arrow: return "'->'";
    case Tok::BiArrow: return "'<->'";
    case Tok::End: return "end of line";
  }
  return "?";
}

bool is_ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

// Thrown to abandon the current line after reporting a diagnostic.
struct LineError {};

class LineLexer {
 public:
  LineLexer(std::string_view line, int line_no, Diagnostics& diags)
      : line_(line), line_no_(line_no), diags_(diags) {}

  // Tokenizes the whole line; returns false on a lexical error.
  bool run(std::vector<Token>& out) {
    while (pos_ < line_.size()) {
      char c = line_[pos_];
      int col = static_cast<int>(pos_) + 1;
      if (c == ' ' || c == '\t' || c == '\r') {
        ++pos_;
        continue;
      }
      if (c == '#') break;  // comment to end of line
      if (is_ident_start(c)) {
        std::size_t start = pos_;
        while (pos_ < line_.size() && is_ident_char(line_[pos_])) ++pos_;
        out.push_back({Tok::Ident,
                       std::string(line_.substr(start, pos_ - start)), 0,
                       col});
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c))) {
        if (!lex_number(out, col)) return false;
        continue;
      }
      switch (c) {
        case '(': push(out, Tok::LParen, col); break;
        case ')': push(out, Tok::RParen, col); break;
        case '[': push(out, Tok::LBrack, col); break;
        case ']': push(out, Tok::RBrack, col); break;
        case '{': push(out, Tok::LBrace, col); break;
        case '}': push(out, Tok::RBrace, col); break;
        case ',': push(out, Tok::Comma, col); break;
        case '=': push(out, Tok::Equals, col); break;
        case '~': push(out, Tok::Tilde, col); break;
        case '!': push(out, Tok::Bang, col); break;
        case '?': push(out, Tok::Question, col); break;
        case '@': push(out, Tok::At, col); break;
        case '\\': push(out, Tok::Backslash, col); break;
        case '+': push(out, Tok::Plus, col); break;
        case '-':
          if (pos_ + 1 < line_.size() && line_[pos_ + 1] == '>') {
            out.push_back({Tok::Arrow, "->", 0, col});
            pos_ += 2;
          } else {
            push(out, Tok::Minus, col);
          }
          break;
        case '<':
          if (line_.substr(pos_, 3) == "<->") {
            out.push_back({Tok::BiArrow, "<->", 0, col});
            pos_ += 3;
          } else {
            diags_.error(line_no_, col, "unexpected character '<'");
            return false;
          }
          break;
        case '\'': {
          std::size_t end = line_.find('\'', pos_ + 1);
          if (end == std::string_view::npos) {
            diags_.error(line_no_, col, "unterminated quoted name");
            return false;
          }
          out.push_back({Tok::QName,
                         std::string(line_.substr(pos_ + 1, end - pos_ - 1)),
                         0, col});
          pos_ = end + 1;
          break;
        }
        case '%': {
          std::size_t start = ++pos_;
          while (pos_ < line_.size() && is_ident_char(line_[pos_])) ++pos_;
          if (pos_ == start || pos_ >= line_.size() || line_[pos_] != ':') {
            diags_.error(line_no_, col, "malformed directive; expected '%name:'");
            return false;
          }
          out.push_back({Tok::Directive,
                         std::string(line_.substr(start, pos_ - start)), 0,
                         col});
          ++pos_;  // ':'
          break;
        }
        default:
          diags_.error(line_no_, col,
                       std::string("unexpected character '") + c + "'");
          return false;
      }
    }
    out.push_back({Tok::End, "", 0, static_cast<int>(line_.size()) + 1});
    return true;
  }

 private:
  void push(std::vector<Token>& out, Tok kind, int col) {
    out.push_back({kind, std::string(1, line_[pos_]), 0, col});
    ++pos_;
  }

  bool lex_number(std::vector<Token>& out, int col) {
    std::size_t start = pos_;
    while (pos_ < line_.size() &&
           std::isdigit(static_cast<unsigned char>(line_[pos_])))
      ++pos_;
    if (pos_ < line_.size() && line_[pos_] == '.') {
      ++pos_;
      while (pos_ < line_.size() &&
             std::isdigit(static_cast<unsigned char>(line_[pos_])))
        ++pos_;
    }
    if (pos_ < line_.size() && (line_[pos_] == 'e' || line_[pos_] == 'E')) {
      std::size_t mark = pos_++;
      if (pos_ < line_.size() && (line_[pos_] == '+' || line_[pos_] == '-'))
        ++pos_;
      if (pos_ >= line_.size() ||
          !std::isdigit(static_cast<unsigned char>(line_[pos_]))) {
        pos_ = mark;  // 'e' belongs to a following identifier
      } else {
        while (pos_ < line_.size() &&
               std::isdigit(static_cast<unsigned char>(line_[pos_])))
          ++pos_;
      }
    }
    std::string text(line_.substr(start, pos_ - start));
    double value = 0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
      diags_.error(line_no_, col, "malformed number '" + text + "'");
      return false;
    }
    out.push_back({Tok::Number, text, value, col});
    return true;
  }

  std::string_view line_;
  std::size_t pos_ = 0;
  int line_no_;
  Diagnostics& diags_;
};

// Pattern site as written, before classification as signature or rule
// pattern (signatures take several states, patterns take bond marks).
struct RawSite {
  std::string name;
  std::vector<std::string> states;
  BondCondition bond = BondCondition::free();
  int col = 1;
};

struct RawAgent {
  std::string name;
  std::vector<RawSite> sites;
  int col = 1;
};

class Parser {
 public:
  Parser(ModelAST& ast, Diagnostics& diags) : ast_(ast), diags_(diags) {}

  void collect_param(const std::vector<Token>& toks, int line_no) {
    set_line(toks, line_no);
    take();  // %param:
    Token name = expect(Tok::Ident, "parameter name");
    Token value = expect(Tok::Number, "parameter value");
    expect_end();
    if (ast_.params.count(name.text))
      fail(name.col, "duplicate declaration of parameter '" + name.text + "'");
    ast_.params[name.text] = value.number;
  }

  void parse_line(const std::vector<Token>& toks, int line_no) {
    set_line(toks, line_no);
    const Token& first = peek();
    if (first.kind == Tok::End) return;
    if (first.kind == Tok::Directive) {
      parse_directive();
      return;
    }
    if (first.kind == Tok::QName) {
      parse_rule(take().text);
      return;
    }
    if (first.kind == Tok::Ident) {
      if (toks.size() > 2 && toks[1].kind == Tok::Equals) {
        parse_variant();
        return;
      }
      parse_signature_or_rule();
      return;
    }
    fail(first.col, std::string("unexpected ") + token_name(first.kind) +
                        " at start of line");
  }

 private:
  // --- token plumbing -----------------------------------------------------

  void set_line(const std::vector<Token>& toks, int line_no) {
    toks_ = &toks;
    pos_ = 0;
    line_ = line_no;
  }

  const Token& peek(int ahead = 0) const {
    std::size_t i = pos_ + ahead;
    return i < toks_->size() ? (*toks_)[i] : toks_->back();
  }

  const Token& take() {
    const Token& t = peek();
    if (t.kind != Tok::End) ++pos_;
    return t;
  }

  bool accept(Tok kind) {
    if (peek().kind != kind) return false;
    ++pos_;
    return true;
  }

  Token expect(Tok kind, const char* what) {
    const Token& t = peek();
    if (t.kind != kind)
      fail(t.col, std::string("expected ") + what + ", found " +
                      token_name(t.kind));
    return take();
  }

  void expect_end() {
    const Token& t = peek();
    if (t.kind != Tok::End)
      fail(t.col, std::string("unexpected ") + token_name(t.kind) +
                      " after end of declaration");
  }

  [[noreturn]] void fail(int col, std::string msg) {
    diags_.error(line_, col, std::move(msg));
    throw LineError{};
  }

  // --- shared pieces ------------------------------------------------------

  RawSite parse_raw_site() {
    RawSite site;
    Token name = expect(Tok::Ident, "site name");
    site.name = name.text;
    site.col = name.col;
    while (peek().kind == Tok::Tilde) {
      take();
      site.states.push_back(expect(Tok::Ident, "state name").text);
    }
    if (peek().kind == Tok::Bang) {
      take();
      Token label = expect(Tok::Number, "bond label");
      double intpart;
      if (std::modf(label.number, &intpart) != 0 || label.number < 0)
        fail(label.col, "bond label must be a nonnegative integer");
      site.bond = BondCondition::labeled(static_cast<int>(label.number));
    } else if (peek().kind == Tok::Question) {
      take();
      site.bond = BondCondition::unspecified();
    }
    return site;
  }

  RawAgent parse_raw_agent() {
    RawAgent agent;
    Token name = expect(Tok::Ident, "agent name");
    agent.name = name.text;
    agent.col = name.col;
    expect(Tok::LParen, "'('");
    if (!accept(Tok::RParen)) {
      while (true) {
        agent.sites.push_back(parse_raw_site());
        if (accept(Tok::RParen)) break;
        expect(Tok::Comma, "',' or ')'");
      }
    }
    std::set<std::string> seen;
    for (const auto& s : agent.sites)
      if (!seen.insert(s.name).second)
        fail(s.col, "site '" + s.name + "' mentioned twice in '" +
                        agent.name + "'");
    return agent;
  }

  std::vector<RawAgent> parse_term_list() {
    std::vector<RawAgent> terms;
    terms.push_back(parse_raw_agent());
    while (accept(Tok::Comma)) terms.push_back(parse_raw_agent());
    return terms;
  }

  AgentPattern to_pattern(const RawAgent& raw) {
    AgentPattern p;
    p.agent = raw.name;
    for (const auto& s : raw.sites) {
      if (s.states.size() > 1)
        fail(s.col, "site '" + s.name +
                        "' lists several states; patterns take at most one");
      SiteCondition sc;
      sc.site = s.name;
      if (!s.states.empty()) sc.state = s.states.front();
      sc.bond = s.bond;
      p.sites.push_back(std::move(sc));
    }
    return p;
  }

  std::vector<AgentPattern> to_patterns(const std::vector<RawAgent>& raw) {
    std::vector<AgentPattern> out;
    out.reserve(raw.size());
    for (const auto& r : raw) out.push_back(to_pattern(r));
    return out;
  }

  // Checks each label occurs exactly twice, then renumbers labels 0..n in
  // first-occurrence order.
  void canonicalize_bonds(std::vector<AgentPattern>& side, int col) {
    std::map<int, int> uses;
    for (const auto& ap : side)
      for (const auto& sc : ap.sites)
        if (sc.bond.kind == BondCondition::Kind::Labeled)
          uses[sc.bond.label]++;
    for (const auto& [label, n] : uses)
      if (n != 2)
        fail(col, "bond label !" + std::to_string(label) +
                      " must appear exactly twice on a side");
    std::map<int, int> renum;
    int next = 0;
    for (auto& ap : side)
      for (auto& sc : ap.sites)
        if (sc.bond.kind == BondCondition::Kind::Labeled) {
          auto [it, fresh] = renum.try_emplace(sc.bond.label, next);
          if (fresh) ++next;
          sc.bond.label = it->second;
        }
  }

  double parse_rate() {
    const Token& t = peek();
    if (t.kind == Tok::Number) return take().number;
    if (t.kind == Tok::Ident) {
      Token name = take();
      auto it = ast_.params.find(name.text);
      if (it != ast_.params.end()) return it->second;
      if (std::find(ast_.unresolved_params.begin(),
                    ast_.unresolved_params.end(),
                    name.text) == ast_.unresolved_params.end())
        ast_.unresolved_params.push_back(name.text);
      return 1.0;
    }
    if (t.kind == Tok::Minus) fail(t.col, "rates must be nonnegative");
    fail(t.col, std::string("expected rate, found ") + token_name(t.kind));
  }

  // --- declarations -------------------------------------------------------

  void parse_signature_or_rule() {
    std::vector<RawAgent> terms = parse_term_list();
    const Token& t = peek();
    if (t.kind == Tok::Arrow || t.kind == Tok::BiArrow) {
      finish_rule("", terms);
      return;
    }
    if (t.kind != Tok::End)
      fail(t.col, std::string("expected '->', '<->' or end of line, found ") +
                      token_name(t.kind));
    if (terms.size() != 1)
      fail(terms[1].col, "an agent declaration is a single agent");
    const RawAgent& raw = terms.front();
    AgentSignature sig;
    sig.name = raw.name;
    sig.line = line_;
    for (const auto& s : raw.sites) {
      if (s.bond.kind != BondCondition::Kind::Free)
        fail(s.col, "bond syntax is not allowed in an agent declaration");
      SiteSignature ss;
      ss.name = s.name;
      ss.states = s.states;
      if (!s.states.empty()) ss.default_state = s.states.front();
      sig.sites.push_back(std::move(ss));
    }
    ast_.signatures.push_back(std::move(sig));
  }

  void parse_rule(const std::string& name) {
    std::vector<RawAgent> terms = parse_term_list();
    finish_rule(name, terms);
  }

  void finish_rule(const std::string& given_name,
                   const std::vector<RawAgent>& lhs_terms) {
    int arrow_col = peek().col;
    bool reversible = peek().kind == Tok::BiArrow;
    if (!accept(Tok::Arrow) && !accept(Tok::BiArrow))
      fail(arrow_col, "expected '->' or '<->'");
    std::vector<RawAgent> rhs_terms = parse_term_list();

    double fwd_rate = 1.0, rev_rate = 1.0;
    std::optional<double> fwd_unary;
    if (accept(Tok::At)) {
      fwd_rate = parse_rate();
      if (accept(Tok::LParen)) {
        fwd_unary = parse_rate();
        expect(Tok::RParen, "')'");
      }
      if (accept(Tok::Comma)) {
        if (!reversible)
          fail(peek().col, "reverse rate given for a one-way rule");
        rev_rate = parse_rate();
        if (peek().kind == Tok::LParen)
          fail(peek().col,
               "a unary rate may only annotate the forward direction");
      }
    }
    expect_end();

    std::vector<AgentPattern> lhs = to_patterns(lhs_terms);
    std::vector<AgentPattern> rhs = to_patterns(rhs_terms);
    canonicalize_bonds(lhs, arrow_col);
    canonicalize_bonds(rhs, arrow_col);
    check_rule_shape(lhs, rhs, arrow_col);

    std::string base =
        given_name.empty() ? "r" + std::to_string(line_) : given_name;
    if (reversible) {
      Rule fwd{base + ".fwd", lhs, rhs, fwd_rate, fwd_unary, line_};
      Rule rev{base + ".rev", rhs, lhs, rev_rate, std::nullopt, line_};
      ast_.rules.push_back(std::move(fwd));
      ast_.rules.push_back(std::move(rev));
    } else {
      ast_.rules.push_back({base, lhs, rhs, fwd_rate, fwd_unary, line_});
    }
  }

  // Validates that the two sides describe a diff of bond additions, bond
  // removals and state changes over the same agents and sites.
  void check_rule_shape(const std::vector<AgentPattern>& lhs,
                        const std::vector<AgentPattern>& rhs, int col) {
    if (lhs.size() != rhs.size())
      fail(col, "rule sides mention different numbers of agents (" +
                    std::to_string(lhs.size()) + " vs " +
                    std::to_string(rhs.size()) +
                    "); agents cannot be created or deleted");
    for (std::size_t i = 0; i < lhs.size(); ++i) {
      const AgentPattern& l = lhs[i];
      const AgentPattern& r = rhs[i];
      if (l.agent != r.agent)
        fail(col, "agent " + std::to_string(i + 1) + " changes name across "
                  "the rule ('" + l.agent + "' vs '" + r.agent + "')");
      for (const auto& sc : l.sites)
        if (!r.find_site(sc.site))
          fail(col, "site '" + sc.site + "' of '" + l.agent +
                        "' is dropped on the right-hand side");
      for (const auto& sc : r.sites) {
        const SiteCondition* left = l.find_site(sc.site);
        if (!left)
          fail(col, "site '" + sc.site + "' of '" + r.agent +
                        "' appears only on the right-hand side");
        check_site_change(l.agent, *left, sc, col);
      }
    }
  }

  void check_site_change(const std::string& agent, const SiteCondition& l,
                         const SiteCondition& r, int col) {
    if (l.state && !r.state)
      fail(col, "site '" + l.site + "' of '" + agent +
                    "' loses its state on the right-hand side");
    if (!l.state && r.state)
      fail(col, "site '" + l.site + "' of '" + agent +
                    "' is assigned a state without testing one");
    using K = BondCondition::Kind;
    if (l.bond.kind == K::Unspecified && r.bond.kind != K::Unspecified)
      fail(col, "site '" + l.site + "' of '" + agent +
                    "' changes binding without testing it (left side is '?')");
    if (l.bond.kind != K::Unspecified && r.bond.kind == K::Unspecified)
      fail(col, "site '" + l.site + "' of '" + agent +
                    "' has an unspecified right-hand binding");
  }

  void parse_variant() {
    Token child = expect(Tok::Ident, "variant name");
    expect(Tok::Equals, "'='");
    Token parent = expect(Tok::Ident, "parent agent name");
    VariantDecl decl;
    decl.child = child.text;
    decl.parent = parent.text;
    decl.line = line_;
    while (accept(Tok::LBrack)) {
      decl.transforms.push_back(parse_transform());
      expect(Tok::RBrack, "']'");
    }
    expect_end();
    std::set<std::string> touched;
    for (const auto& t : decl.transforms) {
      if (t.kind == Transform::Kind::Add) continue;
      if (!touched.insert(t.site).second)
        fail(child.col, "two transforms touch site '" + t.site + "'");
    }
    ast_.variants.push_back(std::move(decl));
  }

  Transform parse_transform() {
    Transform t;
    if (accept(Tok::Plus)) {
      t.kind = Transform::Kind::Add;
      Token name = expect(Tok::Ident, "site name");
      t.added.name = name.text;
      while (accept(Tok::Tilde))
        t.added.states.push_back(expect(Tok::Ident, "state name").text);
      if (!t.added.states.empty()) t.added.default_state = t.added.states[0];
      return t;
    }
    if (accept(Tok::Minus)) {
      t.kind = Transform::Kind::Delete;
      t.site = expect(Tok::Ident, "site name").text;
      return t;
    }
    Token site = expect(Tok::Ident, "site name");
    t.site = site.text;
    if (accept(Tok::Backslash)) {
      expect(Tok::LBrace, "'{'");
      std::set<std::string> seen;
      while (!accept(Tok::RBrace)) {
        Token n = expect(Tok::Ident, "replacement site name");
        if (!seen.insert(n.text).second)
          fail(n.col, "duplicate replacement name '" + n.text + "'");
        t.new_names.push_back(n.text);
      }
      if (t.new_names.empty())
        fail(site.col, "replacement list for '" + t.site + "' is empty");
      t.kind = t.new_names.size() == 1 ? Transform::Kind::Rename
                                       : Transform::Kind::Duplicate;
      return t;
    }
    if (accept(Tok::Tilde)) {
      t.kind = Transform::Kind::DefaultOverride;
      t.new_default = expect(Tok::Ident, "state name").text;
      return t;
    }
    fail(peek().col, "expected '\\{...}' or '~state' after site name");
  }

  // --- directives ---------------------------------------------------------

  void parse_directive() {
    Token dir = take();
    if (dir.text == "param") {
      // Handled in the collection pass; skip the remaining tokens.
      pos_ = toks_->size() - 1;
      return;
    }
    if (dir.text == "concrete") {
      if (ast_.fringe_decl)
        fail(dir.col, "duplicate %concrete: directive");
      std::vector<std::string> agents;
      while (peek().kind != Tok::End) {
        agents.push_back(expect(Tok::Ident, "agent name").text);
        accept(Tok::Comma);
      }
      if (agents.empty()) fail(dir.col, "%concrete: lists no agents");
      ast_.fringe_decl = std::move(agents);
      return;
    }
    if (dir.text == "init") {
      Token count = expect(Tok::Number, "copy count");
      double intpart;
      if (std::modf(count.number, &intpart) != 0 || count.number < 0)
        fail(count.col, "copy count must be a nonnegative integer");
      InitDecl decl;
      decl.count = static_cast<long long>(count.number);
      decl.pattern = to_patterns(parse_term_list());
      decl.line = line_;
      expect_end();
      canonicalize_bonds(decl.pattern, count.col);
      for (const auto& ap : decl.pattern)
        for (const auto& sc : ap.sites)
          if (sc.bond.kind == BondCondition::Kind::Unspecified)
            fail(count.col, "initial mixtures must be fully specified; "
                            "'?' is not allowed in %init:");
      ast_.init_decls.push_back(std::move(decl));
      return;
    }
    if (dir.text == "obs") {
      Observable obs;
      obs.line = line_;
      if (peek().kind == Tok::QName) obs.name = take().text;
      else obs.name = "obs" + std::to_string(line_);
      obs.pattern = to_patterns(parse_term_list());
      expect_end();
      canonicalize_bonds(obs.pattern, dir.col);
      ast_.observables.push_back(std::move(obs));
      return;
    }
    if (dir.text == "instantiate") {
      InstantiateDecl decl;
      decl.line = line_;
      const Token& name = peek();
      if (name.kind == Tok::QName || name.kind == Tok::Ident)
        decl.rule = take().text;
      else
        fail(name.col, "expected rule name after %instantiate:");
      while (peek().kind != Tok::End) {
        AgentAssignment a;
        a.agent = expect(Tok::Ident, "agent name").text;
        expect(Tok::Equals, "'='");
        a.target = expect(Tok::Ident, "target agent name").text;
        if (accept(Tok::LBrack)) {
          while (true) {
            SiteChoice c;
            c.site = expect(Tok::Ident, "site name").text;
            expect(Tok::Equals, "'='");
            c.target_site = expect(Tok::Ident, "target site name").text;
            a.site_choices.push_back(std::move(c));
            if (accept(Tok::RBrack)) break;
            expect(Tok::Comma, "',' or ']'");
          }
        }
        decl.assignments.push_back(std::move(a));
      }
      if (decl.assignments.empty())
        fail(dir.col, "%instantiate: names no substitutions");
      ast_.instantiate_decls.push_back(std::move(decl));
      return;
    }
    fail(dir.col, "unknown directive '%" + dir.text + ":'");
  }

  ModelAST& ast_;
  Diagnostics& diags_;
  const std::vector<Token>* toks_ = nullptr;
  std::size_t pos_ = 0;
  int line_ = 0;
};

// Post-parse resolution: duplicate declarations and dangling references.
void resolve_names(ModelAST& ast, Diagnostics& diags) {
  std::map<std::string, int> declared;  // name -> line of first declaration
  for (const auto& sig : ast.signatures) {
    auto [it, fresh] = declared.try_emplace(sig.name, sig.line);
    if (!fresh)
      diags.error(sig.line, 1,
                  "duplicate declaration of agent '" + sig.name +
                      "' (first declared on line " +
                      std::to_string(it->second) + ")");
  }
  std::set<std::string> variant_children;
  for (const auto& v : ast.variants) {
    if (declared.count(v.child) && !variant_children.count(v.child))
      diags.error(v.line, 1, "variant '" + v.child +
                                 "' is already declared as an agent");
    variant_children.insert(v.child);
    declared.try_emplace(v.child, v.line);
  }
  for (const auto& v : ast.variants)
    if (!declared.count(v.parent))
      diags.error(v.line, 1, "unknown parent agent '" + v.parent + "'");

  // Agents mentioned in rules, %init: and %obs: are resolved against the
  // hierarchy later (models are often written in fragments); the parser
  // only checks references that are internal to the document.
  std::map<std::string, int> rule_names;
  for (const auto& r : ast.rules) {
    auto [it, fresh] = rule_names.try_emplace(r.name, r.line);
    if (!fresh)
      diags.error(r.line, 1, "duplicate rule name '" + r.name +
                                 "' (first used on line " +
                                 std::to_string(it->second) + ")");
  }
  for (const auto& d : ast.instantiate_decls) {
    bool known = std::any_of(ast.rules.begin(), ast.rules.end(),
                             [&](const Rule& r) {
                               return rule_name_matches(r.name, d.rule);
                             });
    if (!known)
      diags.error(d.line, 1, "%instantiate: names unknown rule '" + d.rule +
                                 "'");
  }
}

}  // namespace

ModelAST parse_model(std::string_view text, Diagnostics& diags) {
  ModelAST ast;
  std::vector<std::pair<int, std::vector<Token>>> lines;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(
        pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    ++line_no;
    std::vector<Token> toks;
    if (LineLexer(line, line_no, diags).run(toks) && toks.size() > 1)
      lines.emplace_back(line_no, std::move(toks));
    if (eol == std::string_view::npos) break;
    pos = eol + 1;
  }

  Parser parser(ast, diags);
  // Params first so rule rates resolve regardless of declaration order.
  for (const auto& [no, toks] : lines) {
    if (toks.front().kind == Tok::Directive && toks.front().text == "param") {
      try {
        parser.collect_param(toks, no);
      } catch (const LineError&) {
      }
    }
  }
  for (const auto& [no, toks] : lines) {
    if (toks.front().kind == Tok::Directive && toks.front().text == "param")
      continue;
    try {
      parser.parse_line(toks, no);
    } catch (const LineError&) {
    }
  }
  resolve_names(ast, diags);
  return ast;
}

}  // namespace gka
