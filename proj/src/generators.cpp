#include "saturachase/generators.hpp"

#include <algorithm>
#include <sstream>

namespace saturachase {

namespace {

constexpr const char* kEps = "eps";
constexpr const char* kLmark = "lmark";
constexpr const char* kRmark = "rmark";
constexpr const char* kGoal = "goal";

std::string barred(const std::string& tape_symbol) { return "bar_" + tape_symbol; }
std::string bar_state(const std::string& state) { return "bar" + state; }
std::string l_dummy(const std::string& z) { return "L__" + z; }
std::string r_dummy(const std::string& z) { return "R__" + z; }
std::string dummy_index(const std::string& a, const std::string& b) { return a + "__" + b; }

}  // namespace

Term string_to_term(const Str& s) {
  Term t(kEps);
  for (auto it = s.rbegin(); it != s.rend(); ++it) t = Term(*it, {t});
  return t;
}

Trs srs_to_trs(const Srs& srs) {
  Trs trs;
  trs.sig.add(kEps, 0);
  for (const auto& sym : srs.alphabet) trs.sig.add(sym, 1);
  for (const auto& rule : srs.rules) {
    if (rule.lhs.empty()) throw std::invalid_argument("string rule with empty lhs");
    auto wrap = [](const Str& s, Pattern tail) {
      for (auto it = s.rbegin(); it != s.rend(); ++it) tail = Pattern::app(*it, {tail});
      return tail;
    };
    Pattern x = Pattern::variable("s");
    trs.rules.push_back({wrap(rule.lhs, x), wrap(rule.rhs, x)});
  }
  validate_trs(trs);
  return trs;
}

std::set<Str> srs_one_step(const Srs& srs, const Str& s) {
  std::set<Str> out;
  for (const auto& rule : srs.rules) {
    if (rule.lhs.size() > s.size()) continue;
    for (std::size_t i = 0; i + rule.lhs.size() <= s.size(); ++i) {
      if (!std::equal(rule.lhs.begin(), rule.lhs.end(), s.begin() + i)) continue;
      Str next(s.begin(), s.begin() + i);
      next.insert(next.end(), rule.rhs.begin(), rule.rhs.end());
      next.insert(next.end(), s.begin() + i + rule.lhs.size(), s.end());
      out.insert(std::move(next));
    }
  }
  return out;
}

std::optional<TmTransition> TuringMachine::transition(const std::string& state,
                                                      const std::string& symbol) const {
  for (const auto& t : transitions)
    if (t.state == state && t.read == symbol) return t;
  return std::nullopt;
}

std::optional<TmConfig> tm_step(const TuringMachine& m, const TmConfig& c) {
  std::string scanned = c.right.empty() ? m.blank : c.right.front();
  auto t = m.transition(c.state, scanned);
  if (!t) return std::nullopt;
  TmConfig next = c;
  next.state = t->next;
  if (next.right.empty())
    next.right.push_back(t->write);
  else
    next.right.front() = t->write;
  if (t->move_right) {
    next.left.push_back(next.right.front());
    next.right.erase(next.right.begin());
  } else {
    if (next.left.empty()) {
      next.right.insert(next.right.begin(), m.blank);
    } else {
      next.right.insert(next.right.begin(), next.left.back());
      next.left.pop_back();
    }
  }
  return next;
}

TmEncoding tm_to_srs(const TuringMachine& m) {
  // determinism check
  std::set<std::pair<std::string, std::string>> keys;
  for (const auto& t : m.transitions)
    if (!keys.emplace(t.state, t.read).second)
      throw std::invalid_argument("nondeterministic machine: duplicate transition for (" +
                                  t.state + ", " + t.read + ")");

  TmEncoding enc;
  auto& rules = enc.srs.rules;
  auto add_rule = [&](Str lhs, Str rhs) { rules.push_back({std::move(lhs), std::move(rhs)}); };

  for (const auto& t : m.transitions) {
    std::string q = t.state, qn = t.next;
    std::string a = t.read, b = t.write;
    std::string za = dummy_index(q, a);
    std::string zb = dummy_index(barred(a), bar_state(q));
    enc.dummies.insert(za);
    enc.dummies.insert(zb);
    if (t.move_right) {
      add_rule({q, a}, {l_dummy(za), barred(b), qn});
      add_rule({barred(a), bar_state(q)}, {l_dummy(zb), barred(b), qn});
    } else {
      add_rule({q, a}, {bar_state(qn), b, r_dummy(za)});
      add_rule({barred(a), bar_state(q)}, {bar_state(qn), b, r_dummy(zb)});
    }
    if (a == m.blank) {
      // the scanned blank can also sit at either endmarker
      std::string zm = dummy_index(q, kRmark);
      std::string zl = dummy_index(kLmark, bar_state(q));
      enc.dummies.insert(zm);
      enc.dummies.insert(zl);
      if (t.move_right) {
        add_rule({q, kRmark}, {l_dummy(zm), barred(b), qn, kRmark});
        add_rule({kLmark, bar_state(q)}, {kLmark, l_dummy(zl), barred(b), qn});
      } else {
        add_rule({q, kRmark}, {bar_state(qn), b, r_dummy(zm), kRmark});
        add_rule({kLmark, bar_state(q)}, {kLmark, bar_state(qn), b, r_dummy(zl)});
      }
    }
  }
  // dummy shuffling, for every state and every generated index
  for (const auto& q : m.states) {
    for (const auto& z : enc.dummies) {
      add_rule({q, r_dummy(z)}, {l_dummy(z), l_dummy(z), q});
      add_rule({l_dummy(z), bar_state(q)}, {bar_state(q), r_dummy(z), r_dummy(z)});
    }
  }

  auto& ab = enc.srs.alphabet;
  ab.insert(kLmark);
  ab.insert(kRmark);
  for (const auto& s : m.tape_alphabet) {
    ab.insert(s);
    ab.insert(barred(s));
  }
  for (const auto& q : m.states) {
    ab.insert(q);
    ab.insert(bar_state(q));
  }
  for (const auto& z : enc.dummies) {
    ab.insert(l_dummy(z));
    ab.insert(r_dummy(z));
  }
  return enc;
}

Str initial_config_string(const TuringMachine& m, const Str& input) {
  Str w{kLmark, m.initial()};
  for (const auto& s : input) {
    if (!m.tape_alphabet.count(s))
      throw std::invalid_argument("input symbol " + s + " not in the tape alphabet");
    w.push_back(s);
  }
  w.push_back(kRmark);
  return w;
}

namespace {

struct SymbolClasses {
  const TmEncoding& enc;
  const TuringMachine& m;

  bool is_state(const std::string& s) const {
    return std::find(m.states.begin(), m.states.end(), s) != m.states.end();
  }
  bool is_bar_state(const std::string& s) const {
    for (const auto& q : m.states)
      if (s == bar_state(q)) return true;
    return false;
  }
  bool is_plain(const std::string& s) const { return m.tape_alphabet.count(s) > 0; }
  bool is_barred(const std::string& s) const {
    for (const auto& a : m.tape_alphabet)
      if (s == barred(a)) return true;
    return false;
  }
  std::string unbar(const std::string& s) const { return s.substr(4); }
  std::string state_of_bar(const std::string& s) const { return s.substr(3); }
  bool is_l_dummy(const std::string& s) const {
    return s.rfind("L__", 0) == 0 && enc.dummies.count(s.substr(3)) > 0;
  }
  bool is_r_dummy(const std::string& s) const {
    return s.rfind("R__", 0) == 0 && enc.dummies.count(s.substr(3)) > 0;
  }
};

}  // namespace

bool in_config(const TmEncoding& enc, const TuringMachine& m, const Str& w) {
  SymbolClasses cls{enc, m};
  if (w.size() < 3 || w.front() != kLmark || w.back() != kRmark) return false;
  std::size_t i = 1;
  while (i < w.size() - 1 && (cls.is_barred(w[i]) || cls.is_l_dummy(w[i]))) ++i;
  if (i >= w.size() - 1) return false;
  if (!cls.is_state(w[i]) && !cls.is_bar_state(w[i])) return false;
  ++i;
  while (i < w.size() - 1 && (cls.is_plain(w[i]) || cls.is_r_dummy(w[i]))) ++i;
  return i == w.size() - 1;
}

Str pi(const TmEncoding& enc, const TuringMachine& m, const Str& w) {
  if (!in_config(enc, m, w)) throw std::invalid_argument("string is not in CONFIG");
  SymbolClasses cls{enc, m};
  Str out;
  for (const auto& s : w)
    if (!cls.is_l_dummy(s) && !cls.is_r_dummy(s)) out.push_back(s);
  // turn the barred-state pair back into state-first order
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!cls.is_bar_state(out[i])) continue;
    std::string q = cls.state_of_bar(out[i]);
    if (i > 0 && cls.is_barred(out[i - 1])) {
      std::string a = cls.unbar(out[i - 1]);
      out[i - 1] = q;
      out[i] = a;
    } else if (i > 0 && out[i - 1] == kLmark) {
      out[i] = q;
      out.insert(out.begin() + i + 1, m.blank);
    }
    break;
  }
  for (auto& s : out)
    if (cls.is_barred(s)) s = cls.unbar(s);
  return out;
}

TmConfig config_of_string(const TuringMachine& m, const Str& projected) {
  TmConfig c;
  std::size_t i = 1;
  for (; i < projected.size() - 1; ++i) {
    if (std::find(m.states.begin(), m.states.end(), projected[i]) != m.states.end()) break;
    c.left.push_back(projected[i]);
  }
  if (i >= projected.size() - 1)
    throw std::invalid_argument("projected string has no state symbol");
  c.state = projected[i];
  for (++i; i < projected.size() - 1; ++i) c.right.push_back(projected[i]);
  return c;
}

TuringMachine parse_tm(const std::string& text) {
  TuringMachine m;
  std::vector<std::string> statements;
  {
    std::string cur;
    for (char ch : text + "\n") {
      if (ch == ';' || ch == '\n') {
        statements.push_back(cur);
        cur.clear();
      } else {
        cur += ch;
      }
    }
  }
  int lineno = 0;
  for (const auto& stmt : statements) {
    ++lineno;
    std::istringstream ss(stmt);
    std::string kind;
    if (!(ss >> kind)) continue;
    if (kind[0] == '#') continue;
    if (kind == "states") {
      std::string q;
      while (ss >> q) m.states.push_back(q);
    } else if (kind == "blank") {
      if (!(ss >> m.blank)) throw ParseError("blank statement needs a symbol", lineno);
    } else if (kind == "input") {
      std::string s;
      while (ss >> s) m.input_alphabet.insert(s);
    } else if (kind == "trans") {
      TmTransition t;
      std::string dir;
      if (!(ss >> t.state >> t.read >> t.write >> dir >> t.next))
        throw ParseError("trans statement needs: state read write L|R next", lineno);
      if (dir != "L" && dir != "R") throw ParseError("direction must be L or R", lineno);
      t.move_right = dir == "R";
      m.transitions.push_back(std::move(t));
    } else {
      throw ParseError("unknown statement '" + kind + "'", lineno);
    }
  }
  if (m.states.empty()) throw ParseError("machine has no states");
  if (m.blank.empty()) throw ParseError("machine has no blank symbol");
  m.tape_alphabet.insert(m.blank);
  for (const auto& s : m.input_alphabet) m.tape_alphabet.insert(s);
  for (const auto& t : m.transitions) {
    m.tape_alphabet.insert(t.read);
    m.tape_alphabet.insert(t.write);
    auto known = [&](const std::string& q) {
      return std::find(m.states.begin(), m.states.end(), q) != m.states.end();
    };
    if (!known(t.state) || !known(t.next))
      throw ParseError("transition uses an undeclared state");
  }
  return m;
}

PcpInstance parse_pcp(const std::string& text) {
  PcpInstance p;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == ';') continue;
    std::istringstream ss(line);
    std::string kind, alpha, colon, beta;
    if (!(ss >> kind >> alpha >> colon >> beta) || kind != "pair" || colon != ":")
      throw ParseError("expected `pair <word> : <word>`", lineno);
    PcpPair pair;
    for (char ch : alpha) pair.alpha.push_back(std::string(1, ch));
    for (char ch : beta) pair.beta.push_back(std::string(1, ch));
    if (pair.alpha.empty() || pair.beta.empty())
      throw ParseError("PCP words must be nonempty", lineno);
    for (const auto& s : pair.alpha) p.alphabet.insert(s);
    for (const auto& s : pair.beta) p.alphabet.insert(s);
    p.pairs.push_back(std::move(pair));
  }
  if (p.pairs.empty()) throw ParseError("PCP instance has no pairs");
  return p;
}

Trs pcp_to_trs(const PcpInstance& p) {
  Trs trs;
  trs.sig.add(kEps, 0);
  trs.sig.add(kGoal, 0);
  trs.sig.add("k", 2);
  trs.sig.add("r", 2);
  for (const auto& s : p.alphabet) trs.sig.add(s, 1);
  std::size_t n = p.pairs.size();
  for (std::size_t i = 1; i <= n; ++i) trs.sig.add("i" + std::to_string(i), 1);

  auto wrap = [](const Str& word, Pattern tail) {
    for (auto it = word.rbegin(); it != word.rend(); ++it)
      tail = Pattern::app(*it, {tail});
    return tail;
  };
  Pattern x = Pattern::variable("x");
  Pattern y = Pattern::variable("y");
  Pattern z = Pattern::variable("z");
  Pattern eps = Pattern::app(kEps);
  Pattern goal = Pattern::app(kGoal);

  // exploration and verification
  for (std::size_t i = 1; i <= n; ++i) {
    std::string idx = "i" + std::to_string(i);
    trs.rules.push_back({Pattern::app("k", {x, y}),
                         Pattern::app("k", {Pattern::app(idx, {x}), wrap(p.pairs[i - 1].alpha, y)})});
  }
  for (std::size_t i = 1; i <= n; ++i) {
    std::string idx = "i" + std::to_string(i);
    trs.rules.push_back({Pattern::app("k", {Pattern::app(idx, {x}), y}),
                         Pattern::app("r", {Pattern::app(idx, {x}), y})});
  }
  for (std::size_t i = 1; i <= n; ++i) {
    std::string idx = "i" + std::to_string(i);
    trs.rules.push_back({Pattern::app("r", {Pattern::app(idx, {x}), wrap(p.pairs[i - 1].beta, z)}),
                         Pattern::app("r", {x, z})});
  }
  trs.rules.push_back({Pattern::app("r", {eps, eps}), goal});

  // goal propagation
  trs.rules.push_back({goal, eps});
  for (std::size_t i = 1; i <= n; ++i)
    trs.rules.push_back({goal, Pattern::app("i" + std::to_string(i), {goal})});
  for (const auto& s : p.alphabet) trs.rules.push_back({goal, Pattern::app(s, {goal})});
  trs.rules.push_back({goal, Pattern::app("k", {goal, goal})});
  trs.rules.push_back({goal, Pattern::app("r", {goal, goal})});

  // start normalization (the displayed k(eps) is arity-inconsistent; the
  // intended k(eps, eps) is emitted)
  trs.rules.push_back({Pattern::app("k", {x, y}), Pattern::app("k", {eps, eps})});
  trs.rules.push_back({Pattern::app("r", {x, y}), Pattern::app("k", {eps, eps})});

  validate_trs(trs);
  return trs;
}

Term pcp_start_term() {
  return Term("k", {Term(kEps), Term(kEps)});
}

}  // namespace saturachase
