// Reader and writer for the line-oriented scenario format (version 1).
// The grammar is described in README.md.
#pragma once

#include <cstdio>
#include <sstream>
#include <string>
#include <string_view>

#include "chq/lexer.hpp"
#include "chq/scenario_spec.hpp"

namespace chq {

inline constexpr int kScenarioFormatVersion = 1;

namespace text {

inline std::int64_t to_int(const Token& t, const Cursor& c) {
  try {
    return std::stoll(t.text);
  } catch (const std::exception&) {
    c.fail("integer out of range");
  }
}

inline double parse_real(Cursor& c) {
  double sign = 1;
  if (c.accept_sym("-")) sign = -1;
  else c.accept_sym("+");
  const Token& t = c.peek();
  if (t.kind != Token::Kind::Int && t.kind != Token::Kind::Number) c.fail("expected number");
  return sign * std::stod(c.next().text);
}

// coef := '(' real ',' real ')' | NUMBER | INT ['/' INT] ['/' 'sqrt' '(' INT ')'] | 'sqrt'-free 1
inline Amplitude parse_coefficient(Cursor& c) {
  if (c.accept_sym("(")) {
    const double re = parse_real(c);
    c.expect_sym(",");
    const double im = parse_real(c);
    c.expect_sym(")");
    return Amplitude::decimal(re, im);
  }
  if (c.peek().kind == Token::Kind::Number) return Amplitude::decimal(std::stod(c.next().text));
  if (c.peek().kind != Token::Kind::Int) return Amplitude::rational(1);
  std::int64_t num = to_int(c.next(), c), den = 1, root = 1;
  bool have_den = false;
  while (c.is_sym("/")) {
    c.next();
    if (c.accept_word("sqrt")) {
      if (root != 1) c.fail("repeated sqrt factor");
      c.expect_sym("(");
      if (c.peek().kind != Token::Kind::Int) c.fail("expected integer under sqrt");
      root = to_int(c.next(), c);
      c.expect_sym(")");
    } else {
      if (have_den || root != 1) c.fail("denominator must precede sqrt factor");
      if (c.peek().kind != Token::Kind::Int) c.fail("expected integer denominator");
      den = to_int(c.next(), c);
      have_den = true;
    }
  }
  if (den <= 0 || root <= 0) c.fail("denominators must be positive");
  return Amplitude::rational(num, den, root);
}

inline std::vector<std::string> parse_ket(Cursor& c) {
  c.expect_sym("|");
  std::vector<std::string> labels{c.expect_ident("basis label")};
  while (c.accept_sym(",")) labels.push_back(c.expect_ident("basis label"));
  c.expect_sym(">");
  return labels;
}

inline std::vector<Term> parse_terms(Cursor& c) {
  std::vector<Term> terms;
  bool first = true;
  while (true) {
    bool negative = false;
    if (c.accept_sym("-")) negative = true;
    else if (!c.accept_sym("+") && !first) break;
    Amplitude a = parse_coefficient(c);
    c.accept_sym("*");
    terms.push_back(Term{negative ? a.negated() : a, parse_ket(c)});
    first = false;
    if (!c.is_sym("+") && !c.is_sym("-")) break;
  }
  return terms;
}

inline VecRef parse_vec(Cursor& c) {
  if (c.peek().kind == Token::Kind::Ident) return VecRef::named(c.next().text);
  return VecRef::inline_terms(parse_terms(c));
}

inline ProjExpr parse_proj_sum(Cursor& c);

inline ProjExpr parse_proj_primary(Cursor& c) {
  if (c.accept_sym("(")) {
    ProjExpr e = parse_proj_sum(c);
    c.expect_sym(")");
    return e;
  }
  if (c.accept_sym("[")) {
    ProjExpr e = proj::ket(c.expect_ident("state label"));
    c.expect_sym("]");
    return e;
  }
  if (c.is_word("basis") && c.is_sym("(", 1)) {
    c.next();
    c.next();
    std::string factor = c.expect_ident("factor name");
    c.expect_sym(":");
    std::vector<std::string> labels{c.expect_ident("basis label")};
    while (c.peek().kind == Token::Kind::Ident) labels.push_back(c.next().text);
    c.expect_sym(")");
    return proj::basis(std::move(factor), std::move(labels));
  }
  std::string name = c.expect_ident("projector");
  return name == "I" ? proj::identity() : proj::ref(std::move(name));
}

inline ProjExpr parse_proj_prod(Cursor& c) {
  ProjExpr e = parse_proj_primary(c);
  while (c.accept_sym("*")) e = std::move(e) * parse_proj_primary(c);
  return e;
}

inline ProjExpr parse_proj_sum(Cursor& c) {
  ProjExpr e = parse_proj_prod(c);
  while (true) {
    if (c.accept_sym("+")) e = std::move(e) + parse_proj_prod(c);
    else if (c.accept_sym("-")) e = std::move(e) - parse_proj_prod(c);
    else return e;
  }
}

inline std::vector<std::string> parse_ident_list(Cursor& c, std::string_view what) {
  std::vector<std::string> out;
  while (c.peek().kind == Token::Kind::Ident) out.push_back(c.next().text);
  if (out.empty()) c.fail("expected " + std::string(what));
  return out;
}

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace text

/// Parses a scenario document. Errors carry 1-based line and column.
inline ScenarioSpec parse_scenario(std::string_view source) {
  using namespace text;
  ScenarioSpec spec;
  std::vector<std::string> lines;
  {
    std::string cur;
    for (char ch : source) {
      if (ch == '\n') {
        lines.push_back(std::move(cur));
        cur.clear();
      } else {
        cur.push_back(ch);
      }
    }
    lines.push_back(std::move(cur));
  }

  bool header = false;
  FamilyDef* open_family = nullptr;
  std::size_t family_line = 0;
  for (std::size_t li = 0; li < lines.size(); ++li) {
    const std::size_t line_no = li + 1;
    const std::string raw = trim(lines[li]);
    if (raw.empty() || raw.front() == '#') continue;

    const std::string_view line = lines[li];
    const std::size_t indent = line.find_first_not_of(" \t");

    if (!header) {
      constexpr std::string_view kHeader = "chq-scenario";
      if (raw.rfind(kHeader, 0) != 0)
        throw ParseError("expected 'chq-scenario <version>' header", line_no, indent + 1);
      const std::size_t after = indent + kHeader.size();
      Cursor c(tokenize(line.substr(after), line_no, after), line_no);
      if (c.peek().kind != Token::Kind::Int) c.fail("expected format version");
      const std::size_t version_col = c.peek().column;
      spec.version = static_cast<int>(to_int(c.next(), c));
      if (spec.version != kScenarioFormatVersion)
        throw ParseError("unsupported format version " + std::to_string(spec.version), line_no, version_col);
      c.expect_end();
      header = true;
      continue;
    }

    // name and description take the raw rest of the line
    auto raw_keyword = [&](std::string_view kw) {
      return raw.rfind(kw, 0) == 0 && (raw.size() == kw.size() || raw[kw.size()] == ' ' || raw[kw.size()] == '\t');
    };
    if (!open_family && raw_keyword("description")) {
      spec.description = trim(std::string_view(raw).substr(11));
      continue;
    }
    if (!open_family && raw_keyword("name")) {
      spec.name = trim(std::string_view(raw).substr(4));
      if (spec.name.empty()) throw ParseError("expected scenario name", line_no, indent + 5);
      continue;
    }

    Cursor c(tokenize(line, line_no), line_no);
    const std::size_t kw_col = c.peek().column;
    const std::string kw = c.expect_ident("keyword");

    if (open_family) {
      if (kw == "slot") {
        SlotDef s;
        s.time = c.expect_ident("time");
        if (c.accept_word("generate")) s.mode = SlotDef::Mode::Generate;
        else if (c.accept_word("partition")) s.mode = SlotDef::Mode::Partition;
        else c.fail("expected 'generate' or 'partition'");
        s.projectors = parse_ident_list(c, "projector labels");
        c.expect_end();
        open_family->slots.push_back(std::move(s));
      } else if (kw == "history") {
        open_family->histories.push_back(parse_ident_list(c, "one projector per later time"));
        c.expect_end();
      } else if (kw == "end") {
        c.expect_end();
        if (!open_family->slots.empty() && !open_family->histories.empty())
          throw ParseError("family '" + open_family->name + "' mixes slot and history lines", family_line, 1);
        open_family = nullptr;
      } else {
        throw ParseError("expected 'slot', 'history' or 'end' inside family", line_no, kw_col);
      }
      continue;
    }

    if (kw == "factor") {
      Factor f;
      f.name = c.expect_ident("factor name");
      f.labels = parse_ident_list(c, "basis labels");
      c.expect_end();
      spec.factors.push_back(std::move(f));
    } else if (kw == "times") {
      spec.times = parse_ident_list(c, "time labels");
      c.expect_end();
    } else if (kw == "state") {
      StateDef s;
      s.label = c.expect_ident("state label");
      if (c.accept_word("on")) s.on = parse_ident_list(c, "factor names");
      c.expect_sym("=");
      s.terms = parse_terms(c);
      c.expect_end();
      spec.states.push_back(std::move(s));
    } else if (kw == "step") {
      StepDef s;
      s.from = c.expect_ident("time");
      s.to = c.expect_ident("time");
      if (c.accept_word("on")) s.on = parse_ident_list(c, "factor names");
      c.expect_sym(":");
      do {
        VecRef in = parse_vec(c);
        c.expect_sym("->");
        VecRef out = parse_vec(c);
        s.map.emplace_back(std::move(in), std::move(out));
      } while (c.accept_sym(";"));
      c.expect_end();
      spec.steps.push_back(std::move(s));
    } else if (kw == "projector") {
      ProjDef p;
      if (c.is_word("I") || c.is_word("basis")) c.fail("'" + c.peek().text + "' is reserved");
      p.label = c.expect_ident("projector label");
      c.expect_sym("=");
      p.expr = parse_proj_sum(c);
      c.expect_end();
      spec.projectors.push_back(std::move(p));
    } else if (kw == "family") {
      FamilyDef f;
      f.name = c.expect_ident("family name");
      if (!c.accept_word("initial")) c.fail("expected 'initial'");
      f.initial = c.expect_ident("initial projector");
      if (c.accept_word("complete")) f.complete = true;
      c.expect_end();
      spec.families.push_back(std::move(f));
      open_family = &spec.families.back();
      family_line = line_no;
    } else if (kw == "query") {
      QueryDef q;
      q.name = c.expect_ident("query name");
      q.family = c.expect_ident("family name");
      q.target = c.expect_string();
      if (c.accept_word("given")) q.data = c.expect_string();
      c.expect_end();
      spec.queries.push_back(std::move(q));
    } else {
      throw ParseError("unknown keyword '" + kw + "'", line_no, kw_col);
    }
  }
  if (!header) throw ParseError("empty scenario document", lines.size(), 1);
  if (open_family) throw ParseError("family '" + open_family->name + "' is missing 'end'", family_line, 1);
  return spec;
}

namespace text {

inline std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s = buf;
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

// Magnitude part of an exact amplitude (sign handled by the caller).
inline std::string format_exact_magnitude(const Amplitude& a) {
  const std::int64_t n = a.num < 0 ? -a.num : a.num;
  if (n == 1 && a.den == 1 && a.root == 1) return {};
  std::string s = std::to_string(n);
  if (a.den != 1) s += "/" + std::to_string(a.den);
  if (a.root != 1) s += "/sqrt(" + std::to_string(a.root) + ")";
  return s;
}

inline std::string format_terms(const std::vector<Term>& terms) {
  std::string out;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const auto& t = terms[i];
    std::string coef;
    bool negative = false;
    if (t.coef.exact) {
      negative = t.coef.num < 0;
      coef = format_exact_magnitude(t.coef);
    } else {
      coef = "(" + format_real(t.coef.re) + "," + format_real(t.coef.im) + ")";
    }
    if (i == 0) out += negative ? "-" : "";
    else out += negative ? " - " : " + ";
    if (!coef.empty()) out += coef + " ";
    out += "|";
    for (std::size_t k = 0; k < t.ket.size(); ++k) out += (k ? "," : "") + t.ket[k];
    out += ">";
  }
  return out;
}

inline std::string format_vec(const VecRef& v) { return v.state.empty() ? format_terms(v.terms) : v.state; }

inline int precedence(const ProjExpr& e) {
  switch (e.kind) {
    case ProjExpr::Kind::Sum:
    case ProjExpr::Kind::Diff: return 1;
    case ProjExpr::Kind::Prod: return 2;
    default: return 3;
  }
}

inline std::string format_proj(const ProjExpr& e) {
  using K = ProjExpr::Kind;
  switch (e.kind) {
    case K::Identity: return "I";
    case K::Ref: return e.name;
    case K::Ket: return "[" + e.name + "]";
    case K::Basis: {
      std::string s = "basis(" + e.name + ":";
      for (const auto& l : e.labels) s += " " + l;
      return s + ")";
    }
    case K::Sum:
    case K::Diff:
    case K::Prod: {
      const int p = precedence(e);
      std::string lhs = format_proj(e.args[0]);
      std::string rhs = format_proj(e.args[1]);
      if (precedence(e.args[0]) < p) lhs = "(" + lhs + ")";
      if (precedence(e.args[1]) <= p) rhs = "(" + rhs + ")";
      const char* op = e.kind == K::Sum ? " + " : e.kind == K::Diff ? " - " : " * ";
      return lhs + op + rhs;
    }
  }
  return {};
}

inline std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& x : v) s += " " + x;
  return s;
}

}  // namespace text

/// Canonical text rendering; parse_scenario(write_scenario(s)) == s.
inline std::string write_scenario(const ScenarioSpec& spec) {
  using namespace text;
  std::ostringstream os;
  os << "chq-scenario " << spec.version << "\n";
  if (!spec.name.empty()) os << "name " << spec.name << "\n";
  if (!spec.description.empty()) os << "description " << spec.description << "\n";
  os << "\n";
  for (const auto& f : spec.factors) os << "factor " << f.name << join(f.labels) << "\n";
  if (!spec.times.empty()) os << "times" << join(spec.times) << "\n";
  if (!spec.states.empty()) os << "\n";
  for (const auto& s : spec.states) {
    os << "state " << s.label;
    if (!s.on.empty()) os << " on" << join(s.on);
    os << " = " << format_terms(s.terms) << "\n";
  }
  if (!spec.steps.empty()) os << "\n";
  for (const auto& s : spec.steps) {
    os << "step " << s.from << " " << s.to;
    if (!s.on.empty()) os << " on" << join(s.on);
    os << " :";
    for (std::size_t i = 0; i < s.map.size(); ++i)
      os << (i ? " ; " : " ") << format_vec(s.map[i].first) << " -> " << format_vec(s.map[i].second);
    os << "\n";
  }
  if (!spec.projectors.empty()) os << "\n";
  for (const auto& p : spec.projectors) os << "projector " << p.label << " = " << format_proj(p.expr) << "\n";
  for (const auto& f : spec.families) {
    os << "\nfamily " << f.name << " initial " << f.initial << (f.complete ? " complete" : "") << "\n";
    for (const auto& s : f.slots)
      os << "  slot " << s.time << (s.mode == SlotDef::Mode::Generate ? " generate" : " partition")
         << join(s.projectors) << "\n";
    for (const auto& h : f.histories) os << "  history" << join(h) << "\n";
    os << "end\n";
  }
  if (!spec.queries.empty()) os << "\n";
  for (const auto& q : spec.queries) {
    os << "query " << q.name << " " << q.family << " \"" << q.target << "\"";
    if (q.data) os << " given \"" << *q.data << "\"";
    os << "\n";
  }
  return os.str();
}

}  // namespace chq
