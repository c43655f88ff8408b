#ifndef SATURACHASE_TERM_HPP
#define SATURACHASE_TERM_HPP

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace saturachase {

/// Error with an optional 1-based line number, for file-format diagnostics.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& msg, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// A finite set of function symbols with fixed arities.
class Signature {
 public:
  Signature() = default;

  void add(const std::string& name, int arity);
  std::optional<int> arity(const std::string& name) const;
  bool contains(const std::string& name) const { return symbols_.count(name) > 0; }
  const std::map<std::string, int>& symbols() const { return symbols_; }
  bool empty() const { return symbols_.empty(); }

  /// Set-union of two signatures; throws on an arity conflict.
  void merge(const Signature& other);

  friend bool operator==(const Signature&, const Signature&) = default;

 private:
  std::map<std::string, int> symbols_;
};

/// A ground term: function symbol applied to child terms.
struct Term {
  std::string head;
  std::vector<Term> children;

  Term() = default;
  Term(std::string h, std::vector<Term> cs = {}) : head(std::move(h)), children(std::move(cs)) {}

  int size() const;  // node count
  int depth() const;
  std::string str() const;  // s-expression

  friend bool operator==(const Term& a, const Term& b) {
    return a.head == b.head && a.children == b.children;
  }
  friend bool operator!=(const Term& a, const Term& b) { return !(a == b); }
  friend bool operator<(const Term& a, const Term& b);
};

/// A pattern: a term that may contain variables (written `?x` in the grammar).
struct Pattern {
  std::string var;  // nonempty iff this is a variable
  std::string head;
  std::vector<Pattern> children;

  static Pattern variable(std::string name);
  static Pattern app(std::string head, std::vector<Pattern> children = {});
  static Pattern from_term(const Term& t);

  bool is_var() const { return !var.empty(); }
  bool is_ground() const;
  Term to_term() const;  // throws if a variable is present
  std::set<std::string> vars() const;
  int size() const;
  std::string str() const;

  friend bool operator==(const Pattern& a, const Pattern& b) {
    return a.var == b.var && a.head == b.head && a.children == b.children;
  }
  friend bool operator!=(const Pattern& a, const Pattern& b) { return !(a == b); }
  friend bool operator<(const Pattern& a, const Pattern& b);
};

struct RewriteRule {
  Pattern lhs;
  Pattern rhs;

  bool variable_preserving() const { return lhs.vars() == rhs.vars(); }
  std::string str() const;

  friend bool operator==(const RewriteRule& a, const RewriteRule& b) {
    return a.lhs == b.lhs && a.rhs == b.rhs;
  }
  friend bool operator<(const RewriteRule& a, const RewriteRule& b) {
    if (a.lhs != b.lhs) return a.lhs < b.lhs;
    return a.rhs < b.rhs;
  }
};

/// A term rewriting system: a signature plus an ordered list of rules.
struct Trs {
  Signature sig;
  std::vector<RewriteRule> rules;
};

/// Checks Var(rhs) <= Var(lhs) and arity-correctness of both sides.
void validate_rule(const RewriteRule& rule, const Signature& sig);
void validate_trs(const Trs& trs);

// ---- Parsing ----------------------------------------------------------

/// Parses an s-expression ground term, e.g. "(f (g a))"; bare "a" is the
/// nullary application. Checks every symbol against `sig`.
Term parse_term(const std::string& text, const Signature& sig);

/// Parses an s-expression pattern; variables are written "?x". Arity is
/// not checked here (callers validate against a signature afterwards).
Pattern parse_pattern(const std::string& text);

/// Parses a TRS file: one `lhs -> rhs` rule per line, `;` comments, and an
/// optional `sig f/2 a/0` header. Without a header the signature is
/// inferred from usage; conflicting arities are an error.
Trs parse_trs(const std::string& text);
std::string print_trs(const Trs& trs);

// ---- Rewriting --------------------------------------------------------

/// Matches `p` against `t` extending `subst`; repeated variables require
/// syntactically equal subterms.
bool match_term(const Pattern& p, const Term& t, std::map<std::string, Term>& subst);

/// Applies a substitution to a pattern; throws on an unbound variable.
Term substitute(const Pattern& p, const std::map<std::string, Term>& subst);

/// All u with t ->_R u, rewriting at every subterm position.
std::set<Term> one_step_rewrites(const Trs& trs, const Term& t);

/// All terms reachable from t by ->_R* with size <= size_bound (BFS over
/// one-step rewrites; intermediate terms are bounded too, making this
/// total). Brute-force oracle for the representation-lemma tests.
std::set<Term> rewrite_closure(const Trs& trs, const Term& t, int size_bound);

/// R together with every rule flipped; requires variable-preserving rules.
Trs symmetric_closure(const Trs& trs);

/// All ground terms over the signature with size <= size_bound.
std::set<Term> enumerate_ground_terms(const Signature& sig, int size_bound);

}  // namespace saturachase

#endif  // SATURACHASE_TERM_HPP
