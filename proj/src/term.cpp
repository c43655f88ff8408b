#include "saturachase/term.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <functional>
#include <sstream>

namespace saturachase {

void Signature::add(const std::string& name, int arity) {
  if (arity < 0) throw std::invalid_argument("negative arity for symbol " + name);
  auto it = symbols_.find(name);
  if (it != symbols_.end()) {
    if (it->second != arity)
      throw std::invalid_argument("arity conflict for symbol " + name + ": " +
                                  std::to_string(it->second) + " vs " + std::to_string(arity));
    return;
  }
  symbols_.emplace(name, arity);
}

std::optional<int> Signature::arity(const std::string& name) const {
  auto it = symbols_.find(name);
  if (it == symbols_.end()) return std::nullopt;
  return it->second;
}

void Signature::merge(const Signature& other) {
  for (const auto& [name, ar] : other.symbols_) add(name, ar);
}

bool operator<(const Term& a, const Term& b) {
  if (a.head != b.head) return a.head < b.head;
  return std::lexicographical_compare(a.children.begin(), a.children.end(),
                                      b.children.begin(), b.children.end());
}

bool operator<(const Pattern& a, const Pattern& b) {
  if (a.var != b.var) return a.var < b.var;
  if (a.head != b.head) return a.head < b.head;
  return std::lexicographical_compare(a.children.begin(), a.children.end(),
                                      b.children.begin(), b.children.end());
}

int Term::size() const {
  int n = 1;
  for (const auto& c : children) n += c.size();
  return n;
}

int Term::depth() const {
  int d = 0;
  for (const auto& c : children) d = std::max(d, c.depth());
  return d + 1;
}

std::string Term::str() const {
  if (children.empty()) return head;
  std::string out = "(" + head;
  for (const auto& c : children) out += " " + c.str();
  return out + ")";
}

Pattern Pattern::variable(std::string name) {
  Pattern p;
  p.var = std::move(name);
  return p;
}

Pattern Pattern::app(std::string head, std::vector<Pattern> children) {
  Pattern p;
  p.head = std::move(head);
  p.children = std::move(children);
  return p;
}

Pattern Pattern::from_term(const Term& t) {
  Pattern p;
  p.head = t.head;
  for (const auto& c : t.children) p.children.push_back(from_term(c));
  return p;
}

bool Pattern::is_ground() const {
  if (is_var()) return false;
  return std::all_of(children.begin(), children.end(),
                     [](const Pattern& c) { return c.is_ground(); });
}

Term Pattern::to_term() const {
  if (is_var()) throw std::invalid_argument("pattern contains variable ?" + var);
  Term t(head);
  for (const auto& c : children) t.children.push_back(c.to_term());
  return t;
}

std::set<std::string> Pattern::vars() const {
  std::set<std::string> out;
  if (is_var()) {
    out.insert(var);
    return out;
  }
  for (const auto& c : children) {
    auto cv = c.vars();
    out.insert(cv.begin(), cv.end());
  }
  return out;
}

int Pattern::size() const {
  if (is_var()) return 1;
  int n = 1;
  for (const auto& c : children) n += c.size();
  return n;
}

std::string Pattern::str() const {
  if (is_var()) return "?" + var;
  if (children.empty()) return head;
  std::string out = "(" + head;
  for (const auto& c : children) out += " " + c.str();
  return out + ")";
}

std::string RewriteRule::str() const { return lhs.str() + " -> " + rhs.str(); }

namespace {

// Collects every symbol/arity usage in a pattern.
void collect_arities(const Pattern& p, Signature& sig) {
  if (p.is_var()) return;
  sig.add(p.head, static_cast<int>(p.children.size()));
  for (const auto& c : p.children) collect_arities(c, sig);
}

void check_pattern_arities(const Pattern& p, const Signature& sig) {
  if (p.is_var()) return;
  auto ar = sig.arity(p.head);
  if (!ar) throw std::invalid_argument("unknown symbol " + p.head);
  if (*ar != static_cast<int>(p.children.size()))
    throw std::invalid_argument("arity mismatch for " + p.head + ": expected " +
                                std::to_string(*ar) + ", got " +
                                std::to_string(p.children.size()));
  for (const auto& c : p.children) check_pattern_arities(c, sig);
}

struct Tokenizer {
  explicit Tokenizer(const std::string& s) : text(s) {}

  std::optional<std::string> next() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos >= text.size()) return std::nullopt;
    char c = text[pos];
    if (c == '(' || c == ')') {
      ++pos;
      return std::string(1, c);
    }
    size_t start = pos;
    while (pos < text.size() && !std::isspace(static_cast<unsigned char>(text[pos])) &&
           text[pos] != '(' && text[pos] != ')')
      ++pos;
    return text.substr(start, pos - start);
  }

  const std::string& text;
  size_t pos = 0;
};

Pattern parse_sexp(Tokenizer& tok) {
  auto t = tok.next();
  if (!t) throw ParseError("unexpected end of input");
  if (*t == ")") throw ParseError("unexpected ')'");
  if (*t == "(") {
    auto head = tok.next();
    if (!head || *head == "(" || *head == ")")
      throw ParseError("expected symbol after '('");
    if ((*head)[0] == '?') throw ParseError("variable cannot head an application");
    std::vector<Pattern> children;
    while (true) {
      size_t save = tok.pos;
      auto peek = tok.next();
      if (!peek) throw ParseError("missing ')'");
      if (*peek == ")") break;
      tok.pos = save;
      children.push_back(parse_sexp(tok));
    }
    return Pattern::app(*head, std::move(children));
  }
  if ((*t)[0] == '?') {
    if (t->size() == 1) throw ParseError("empty variable name");
    return Pattern::variable(t->substr(1));
  }
  return Pattern::app(*t);
}

}  // namespace

void validate_rule(const RewriteRule& rule, const Signature& sig) {
  check_pattern_arities(rule.lhs, sig);
  check_pattern_arities(rule.rhs, sig);
  auto lv = rule.lhs.vars();
  for (const auto& v : rule.rhs.vars())
    if (!lv.count(v))
      throw std::invalid_argument("rule " + rule.str() + ": rhs variable ?" + v +
                                  " not bound by lhs");
}

void validate_trs(const Trs& trs) {
  for (const auto& r : trs.rules) validate_rule(r, trs.sig);
}

Pattern parse_pattern(const std::string& text) {
  Tokenizer tok(text);
  Pattern p = parse_sexp(tok);
  if (tok.next()) throw ParseError("trailing input after pattern");
  return p;
}

Term parse_term(const std::string& text, const Signature& sig) {
  Pattern p = parse_pattern(text);
  if (!p.is_ground()) throw ParseError("term contains a variable");
  check_pattern_arities(p, sig);
  return p.to_term();
}

Trs parse_trs(const std::string& text) {
  Trs trs;
  bool explicit_sig = false;
  std::vector<std::pair<RewriteRule, int>> rules;  // rule + line number
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == ';') continue;
    std::string body = line.substr(first);
    if (body.rfind("sig ", 0) == 0 || body == "sig") {
      explicit_sig = true;
      std::istringstream ss(body.substr(3));
      std::string item;
      while (ss >> item) {
        auto slash = item.find('/');
        if (slash == std::string::npos)
          throw ParseError("bad sig entry '" + item + "' (expected name/arity)", lineno);
        try {
          trs.sig.add(item.substr(0, slash), std::stoi(item.substr(slash + 1)));
        } catch (const std::invalid_argument& e) {
          throw ParseError(e.what(), lineno);
        }
      }
      continue;
    }
    auto arrow = body.find("->");
    if (arrow == std::string::npos) throw ParseError("missing '->'", lineno);
    try {
      RewriteRule rule{parse_pattern(body.substr(0, arrow)),
                       parse_pattern(body.substr(arrow + 2))};
      rules.emplace_back(std::move(rule), lineno);
    } catch (const ParseError& e) {
      throw ParseError(e.what(), lineno);
    }
  }
  if (!explicit_sig) {
    for (const auto& [rule, ln] : rules) {
      try {
        collect_arities(rule.lhs, trs.sig);
        collect_arities(rule.rhs, trs.sig);
      } catch (const std::invalid_argument& e) {
        throw ParseError(e.what(), ln);
      }
    }
  }
  for (const auto& [rule, ln] : rules) {
    try {
      validate_rule(rule, trs.sig);
    } catch (const std::invalid_argument& e) {
      throw ParseError(e.what(), ln);
    }
    trs.rules.push_back(rule);
  }
  return trs;
}

std::string print_trs(const Trs& trs) {
  std::string out = "sig";
  for (const auto& [name, ar] : trs.sig.symbols()) out += " " + name + "/" + std::to_string(ar);
  out += "\n";
  for (const auto& r : trs.rules) out += r.str() + "\n";
  return out;
}

bool match_term(const Pattern& p, const Term& t, std::map<std::string, Term>& subst) {
  if (p.is_var()) {
    auto it = subst.find(p.var);
    if (it != subst.end()) return it->second == t;
    subst.emplace(p.var, t);
    return true;
  }
  if (p.head != t.head || p.children.size() != t.children.size()) return false;
  for (size_t i = 0; i < p.children.size(); ++i)
    if (!match_term(p.children[i], t.children[i], subst)) return false;
  return true;
}

Term substitute(const Pattern& p, const std::map<std::string, Term>& subst) {
  if (p.is_var()) {
    auto it = subst.find(p.var);
    if (it == subst.end()) throw std::invalid_argument("unbound variable ?" + p.var);
    return it->second;
  }
  Term t(p.head);
  for (const auto& c : p.children) t.children.push_back(substitute(c, subst));
  return t;
}

namespace {

void rewrites_at_positions(const Trs& trs, const Term& t, std::set<Term>& out) {
  for (const auto& rule : trs.rules) {
    std::map<std::string, Term> subst;
    if (match_term(rule.lhs, t, subst)) out.insert(substitute(rule.rhs, subst));
  }
  for (size_t i = 0; i < t.children.size(); ++i) {
    std::set<Term> child_results;
    rewrites_at_positions(trs, t.children[i], child_results);
    for (const auto& u : child_results) {
      Term copy = t;
      copy.children[i] = u;
      out.insert(std::move(copy));
    }
  }
}

}  // namespace

std::set<Term> one_step_rewrites(const Trs& trs, const Term& t) {
  std::set<Term> out;
  rewrites_at_positions(trs, t, out);
  return out;
}

std::set<Term> rewrite_closure(const Trs& trs, const Term& t, int size_bound) {
  if (t.size() > size_bound)
    throw std::invalid_argument("size_bound smaller than the start term");
  std::set<Term> seen{t};
  std::deque<Term> frontier{t};
  while (!frontier.empty()) {
    Term cur = std::move(frontier.front());
    frontier.pop_front();
    for (auto& next : one_step_rewrites(trs, cur)) {
      if (next.size() > size_bound) continue;
      if (seen.insert(next).second) frontier.push_back(next);
    }
  }
  return seen;
}

Trs symmetric_closure(const Trs& trs) {
  Trs out;
  out.sig = trs.sig;
  std::set<RewriteRule> dedup;
  for (const auto& r : trs.rules) {
    if (!r.variable_preserving())
      throw std::invalid_argument("rule " + r.str() + " is not variable-preserving");
    if (dedup.insert(r).second) out.rules.push_back(r);
    RewriteRule flipped{r.rhs, r.lhs};
    if (dedup.insert(flipped).second) out.rules.push_back(flipped);
  }
  return out;
}

std::set<Term> enumerate_ground_terms(const Signature& sig, int size_bound) {
  // by_size[s] = all terms of size exactly s
  std::vector<std::set<Term>> by_size(size_bound + 1);
  for (int s = 1; s <= size_bound; ++s) {
    for (const auto& [name, ar] : sig.symbols()) {
      if (ar == 0) {
        if (s == 1) by_size[s].insert(Term(name));
        continue;
      }
      if (s < ar + 1) continue;
      // distribute s-1 among `ar` children, each >= 1
      std::vector<std::vector<Term>> partial{{}};
      std::function<void(int, int, std::vector<Term>&)> rec =
          [&](int child, int remaining, std::vector<Term>& acc) {
            if (child == ar) {
              if (remaining == 0) by_size[s].insert(Term(name, acc));
              return;
            }
            int min_rest = ar - child - 1;
            for (int cs = 1; cs <= remaining - min_rest; ++cs) {
              for (const auto& ct : by_size[cs]) {
                acc.push_back(ct);
                rec(child + 1, remaining - cs, acc);
                acc.pop_back();
              }
            }
          };
      std::vector<Term> acc;
      rec(0, s - 1, acc);
    }
  }
  std::set<Term> out;
  for (auto& bucket : by_size) out.insert(bucket.begin(), bucket.end());
  return out;
}

}  // namespace saturachase
