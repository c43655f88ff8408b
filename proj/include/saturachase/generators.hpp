#ifndef SATURACHASE_GENERATORS_HPP
#define SATURACHASE_GENERATORS_HPP

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "saturachase/term.hpp"

namespace saturachase {

/// Strings are vectors of symbol names; rules rewrite substrings.
using Str = std::vector<std::string>;

struct StringRule {
  Str lhs;
  Str rhs;

  friend auto operator<=>(const StringRule&, const StringRule&) = default;
};

struct Srs {
  std::set<std::string> alphabet;
  std::vector<StringRule> rules;
};

/// The unary-symbol term encoding: "abc" becomes a(b(c(eps))).
Term string_to_term(const Str& s);
/// Rule uvw -> vuw becomes u(v(w(x))) -> v(u(w(x))).
Trs srs_to_trs(const Srs& srs);

/// All one-step rewrites of a string under an SRS.
std::set<Str> srs_one_step(const Srs& srs, const Str& s);

struct TmTransition {
  std::string state;
  std::string read;
  std::string write;
  bool move_right = true;
  std::string next;
};

/// Deterministic two-way-infinite Turing machine.
struct TuringMachine {
  std::vector<std::string> states;  // first is initial
  std::set<std::string> input_alphabet;
  std::set<std::string> tape_alphabet;
  std::string blank;
  std::vector<TmTransition> transitions;

  const std::string& initial() const { return states.front(); }
  std::optional<TmTransition> transition(const std::string& state,
                                         const std::string& symbol) const;
};

/// A TM configuration for direct simulation: tape left of the head
/// (nearest-first is the back), current state, tape from the head
/// rightwards.
struct TmConfig {
  Str left;
  std::string state;
  Str right;

  friend auto operator<=>(const TmConfig&, const TmConfig&) = default;
};

/// One simulation step; nullopt when halted.
std::optional<TmConfig> tm_step(const TuringMachine& m, const TmConfig& c);

/// Fixed naming scheme for the string encoding: `q<i>`/`barq<i>` for
/// states, `bar_<a>` for left-of-head tape symbols, `L__<z>`/`R__<z>`
/// dummies, `lmark`/`rmark` endmarkers.
struct TmEncoding {
  Srs srs;
  std::set<std::string> dummies;  // the index set z
};

/// The history-preserving string rewriting system of the construction:
/// two rules per transition (plain-state and barred-state variants, with
/// blank handling at the endmarkers) plus the dummy-shuffling rules
/// q R_z -> L_z L_z q and L_z barq -> barq R_z R_z for every state and
/// generated dummy index.
TmEncoding tm_to_srs(const TuringMachine& m);

/// The encoded initial configuration lmark q0 s rmark.
Str initial_config_string(const TuringMachine& m, const Str& input);

/// Membership in CONFIG: lmark (barred|L-dummy)* (state|barstate)
/// (plain|R-dummy)* rmark.
bool in_config(const TmEncoding& enc, const TuringMachine& m, const Str& w);

/// The projection back to machine configurations: drops dummies, turns
/// `bar_a barq` into `q a` (and `lmark barq` into `lmark q blank`), and
/// unbars the rest.
Str pi(const TmEncoding& enc, const TuringMachine& m, const Str& w);

/// Reads an encoded CONFIG string back into a simulation configuration.
TmConfig config_of_string(const TuringMachine& m, const Str& projected);

/// TM file format: `states q0 q1`, `blank _`, `trans q0 a b R q1`
/// statements separated by newlines or `;`.
TuringMachine parse_tm(const std::string& text);

struct PcpPair {
  Str alpha;
  Str beta;
};

struct PcpInstance {
  std::set<std::string> alphabet;
  std::vector<PcpPair> pairs;
};

/// PCP file format: one `pair a : aa` per line; words are concatenations
/// of single-character symbols.
PcpInstance parse_pcp(const std::string& text);

/// The PCP ruleset: index exploration, verification, goal propagation,
/// and start normalization (k(x,y) -> k(eps,eps), likewise for r).
Trs pcp_to_trs(const PcpInstance& p);

/// The canonical start term k(eps, eps).
Term pcp_start_term();

}  // namespace saturachase

#endif  // SATURACHASE_GENERATORS_HPP
