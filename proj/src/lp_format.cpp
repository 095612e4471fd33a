#include "stochbench/lp_format.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <unordered_map>

#include "stochbench/errors.hpp"

namespace stochbench {

namespace {

enum class Section { none, objective, constraints, bounds, generals, binaries, end };

enum class Tok { ident, number, plus, minus, colon, le, ge, eq };

struct Token {
  Tok kind;
  std::string text;
  double value = 0.0;
  int line = 0;
  int column = 0;
};

std::string lower_ascii(std::string_view s) {
  std::string out(s);
  for (auto& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return out;
}

std::string collapse_spaces(std::string_view s) {
  std::string out;
  bool space = false;
  for (char ch : s) {
    if (std::isspace(static_cast<unsigned char>(ch))) {
      space = !out.empty();
      continue;
    }
    if (space) out.push_back(' ');
    space = false;
    out.push_back(ch);
  }
  return out;
}

std::optional<std::pair<Section, ObjSense>> header_of(std::string_view line) {
  static const std::unordered_map<std::string, Section> kHeaders = {
      {"minimize", Section::objective},   {"minimise", Section::objective},
      {"minimum", Section::objective},    {"min", Section::objective},
      {"maximize", Section::objective},   {"maximise", Section::objective},
      {"maximum", Section::objective},    {"max", Section::objective},
      {"subject to", Section::constraints}, {"such that", Section::constraints},
      {"st", Section::constraints},       {"s.t.", Section::constraints},
      {"bounds", Section::bounds},        {"bound", Section::bounds},
      {"generals", Section::generals},    {"general", Section::generals},
      {"gen", Section::generals},         {"integers", Section::generals},
      {"binaries", Section::binaries},    {"binary", Section::binaries},
      {"bin", Section::binaries},         {"end", Section::end},
  };
  auto key = lower_ascii(collapse_spaces(line));
  auto it = kHeaders.find(key);
  if (it == kHeaders.end()) return std::nullopt;
  ObjSense sense = key.starts_with("max") ? ObjSense::maximize : ObjSense::minimize;
  return std::make_pair(it->second, sense);
}

bool is_name_start(unsigned char c) {
  return std::isalpha(c) || std::string_view("_!\"#$%&()/,;?@`'{}|~[]").find(static_cast<char>(c)) !=
                                std::string_view::npos;
}

bool is_name_char(unsigned char c) { return std::isdigit(c) || c == '.' || is_name_start(c); }

bool is_infinity_word(std::string_view word) {
  auto w = lower_ascii(word);
  return w == "inf" || w == "infinity";
}

// Tokenizes one source line (comment already removed).
void lex_line(std::string_view line, int line_no, std::vector<Token>& out) {
  std::size_t i = 0;
  auto col = [&](std::size_t at) { return static_cast<int>(at) + 1; };
  while (i < line.size()) {
    auto c = static_cast<unsigned char>(line[i]);
    if (std::isspace(c)) {
      ++i;
      continue;
    }
    std::size_t start = i;
    if (std::isdigit(c) || (c == '.' && i + 1 < line.size() && std::isdigit(static_cast<unsigned char>(line[i + 1])))) {
      while (i < line.size() && (std::isdigit(static_cast<unsigned char>(line[i])) || line[i] == '.')) ++i;
      if (i < line.size() && (line[i] == 'e' || line[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < line.size() && (line[j] == '+' || line[j] == '-')) ++j;
        if (j < line.size() && std::isdigit(static_cast<unsigned char>(line[j]))) {
          i = j;
          while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
        }
      }
      std::string text(line.substr(start, i - start));
      char* end = nullptr;
      double v = std::strtod(text.c_str(), &end);
      if (end != text.c_str() + text.size()) throw ParseError("malformed number '" + text + "'", line_no, col(start));
      out.push_back({Tok::number, text, v, line_no, col(start)});
      continue;
    }
    if (is_name_start(c)) {
      while (i < line.size() && is_name_char(static_cast<unsigned char>(line[i]))) ++i;
      std::string text(line.substr(start, i - start));
      if (is_infinity_word(text)) {
        out.push_back({Tok::number, text, kInfinity, line_no, col(start)});
      } else {
        out.push_back({Tok::ident, text, 0.0, line_no, col(start)});
      }
      continue;
    }
    auto two = line.substr(i, 2);
    if (two == "<=" || two == "=<") {
      out.push_back({Tok::le, std::string(two), 0.0, line_no, col(start)});
      i += 2;
    } else if (two == ">=" || two == "=>") {
      out.push_back({Tok::ge, std::string(two), 0.0, line_no, col(start)});
      i += 2;
    } else if (c == '<') {
      out.push_back({Tok::le, "<", 0.0, line_no, col(start)});
      ++i;
    } else if (c == '>') {
      out.push_back({Tok::ge, ">", 0.0, line_no, col(start)});
      ++i;
    } else if (c == '=') {
      out.push_back({Tok::eq, "=", 0.0, line_no, col(start)});
      ++i;
    } else if (c == '+') {
      out.push_back({Tok::plus, "+", 0.0, line_no, col(start)});
      ++i;
    } else if (c == '-') {
      out.push_back({Tok::minus, "-", 0.0, line_no, col(start)});
      ++i;
    } else if (c == ':') {
      out.push_back({Tok::colon, ":", 0.0, line_no, col(start)});
      ++i;
    } else {
      throw ParseError("unexpected character", line_no, col(start));
    }
  }
}

class Builder {
public:
  // Maps a raw LP name to a unique identifier.
  std::string var(const std::string& raw) {
    auto it = var_names_.find(raw);
    if (it != var_names_.end()) return it->second;
    auto name = unique(sanitize(raw), used_vars_);
    var_names_.emplace(raw, name);
    model.variables.push_back(Variable{name});
    return name;
  }

  Variable& variable(const std::string& raw) {
    auto name = var(raw);
    return model.variables[*model.variable_index(name)];
  }

  std::string constraint_name(const std::string& raw, const Token& at) {
    if (!raw_cons_.insert(raw).second) throw DuplicateName("duplicate constraint label '" + raw + "' at line " + std::to_string(at.line));
    return unique(sanitize(raw), used_cons_);
  }

  std::string auto_constraint_name() {
    std::string name;
    do {
      name = "c" + std::to_string(++auto_index_);
    } while (raw_cons_.contains(name) || used_cons_.contains(name));
    raw_cons_.insert(name);
    used_cons_.insert(name);
    return name;
  }

  Model model;

private:
  static std::string sanitize(const std::string& raw) {
    std::string out = raw;
    for (auto& ch : out)
      if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_')) ch = '_';
    if (std::isdigit(static_cast<unsigned char>(out.front()))) out.insert(out.begin(), '_');
    return out;
  }

  static std::string unique(std::string name, std::set<std::string>& used) {
    std::string candidate = name;
    for (int k = 1; used.contains(candidate); ++k) candidate = name + "_" + std::to_string(k);
    used.insert(candidate);
    return candidate;
  }

  std::unordered_map<std::string, std::string> var_names_;
  std::set<std::string> used_vars_;
  std::set<std::string> raw_cons_;
  std::set<std::string> used_cons_;
  int auto_index_ = 0;
};

class SectionParser {
public:
  SectionParser(const std::vector<Token>& toks, Builder& b, int end_line)
      : toks_(toks), b_(b), end_line_(end_line) {}

  bool done() const { return pos_ >= toks_.size(); }

  // Optional "name:" prefix.
  std::optional<std::string> label() {
    if (pos_ + 1 < toks_.size() && toks_[pos_].kind == Tok::ident && toks_[pos_ + 1].kind == Tok::colon) {
      std::string name = toks_[pos_].text;
      pos_ += 2;
      return name;
    }
    return std::nullopt;
  }

  const Token& peek() const {
    if (done()) throw ParseError("unexpected end of section", end_line_, 1);
    return toks_[pos_];
  }

  const Token& next() {
    const Token& t = peek();
    ++pos_;
    return t;
  }

  bool at(Tok kind) const { return !done() && toks_[pos_].kind == kind; }

  // expr := term (('+'|'-') term)* ; term := sign* [number] [ident]
  LinExpr expression(bool stop_at_relation) {
    LinExpr e;
    bool first = true;
    while (!done()) {
      const Token& t = peek();
      if (stop_at_relation && (t.kind == Tok::le || t.kind == Tok::ge || t.kind == Tok::eq)) break;
      double sign = 1.0;
      bool had_sign = false;
      while (at(Tok::plus) || at(Tok::minus)) {
        if (next().kind == Tok::minus) sign = -sign;
        had_sign = true;
      }
      if (!first && !had_sign) {
        if (stop_at_relation) throw ParseError("expected '+', '-' or a relational operator", t.line, t.column);
        break;  // objective ends where a new statement would begin
      }
      const Token& head = peek();
      if (head.kind == Tok::number) {
        ++pos_;
        double coef = sign * head.value;
        if (at(Tok::ident) && !(pos_ + 1 < toks_.size() && toks_[pos_ + 1].kind == Tok::colon)) {
          e.add(b_.var(next().text), coef);
        } else {
          e.constant += coef;
        }
      } else if (head.kind == Tok::ident) {
        ++pos_;
        e.add(b_.var(head.text), sign);
      } else {
        throw ParseError("expected a term, found '" + head.text + "'", head.line, head.column);
      }
      first = false;
    }
    if (first) {
      int line = done() ? end_line_ : peek().line;
      int column = done() ? 1 : peek().column;
      throw ParseError("empty expression", line, column);
    }
    return e;
  }

  double signed_number() {
    double sign = 1.0;
    while (at(Tok::plus) || at(Tok::minus))
      if (next().kind == Tok::minus) sign = -sign;
    const Token& t = next();
    if (t.kind != Tok::number) throw ParseError("expected a number, found '" + t.text + "'", t.line, t.column);
    return sign * t.value;
  }

  Sense relation() {
    const Token& t = next();
    switch (t.kind) {
      case Tok::le: return Sense::le;
      case Tok::ge: return Sense::ge;
      case Tok::eq: return Sense::eq;
      default: throw ParseError("expected a relational operator, found '" + t.text + "'", t.line, t.column);
    }
  }

  void parse_objective(Objective& obj) {
    if (done()) return;
    if (auto name = label()) obj.name = *name;
    if (done()) return;
    obj.expr = expression(false);
    if (!done()) {
      const Token& t = peek();
      throw ParseError("unexpected token '" + t.text + "' in objective", t.line, t.column);
    }
  }

  void parse_constraints() {
    while (!done()) {
      const Token& start = peek();
      auto raw = label();
      Constraint c;
      c.name = raw ? b_.constraint_name(*raw, start) : b_.auto_constraint_name();
      c.lhs = expression(true);
      c.sense = relation();
      c.rhs = signed_number();
      if (!std::isfinite(c.rhs)) throw ParseError("constraint right-hand side must be finite", start.line, start.column);
      b_.model.constraints.push_back(std::move(c));
    }
  }

  void parse_bounds() {
    while (!done()) {
      const Token& t = peek();
      if (t.kind == Tok::ident) {
        ++pos_;
        if (at(Tok::ident) && lower_ascii(peek().text) == "free") {
          ++pos_;
          auto& v = b_.variable(t.text);
          v.lower = -kInfinity;
          v.upper = kInfinity;
          continue;
        }
        Sense s = relation();
        double value = signed_number();
        apply(b_.variable(t.text), s, value, true);
      } else {
        double value = signed_number();
        Sense s = relation();
        const Token& name = next();
        if (name.kind != Tok::ident) throw ParseError("expected a variable name in bound", name.line, name.column);
        auto& v = b_.variable(name.text);
        apply(v, s, value, false);
        if (at(Tok::le) || at(Tok::ge) || at(Tok::eq)) {
          Sense s2 = relation();
          apply(v, s2, signed_number(), true);
        }
      }
    }
  }

  void parse_names(bool binary) {
    while (!done()) {
      const Token& t = next();
      if (t.kind != Tok::ident) throw ParseError("expected a variable name, found '" + t.text + "'", t.line, t.column);
      auto& v = b_.variable(t.text);
      if (binary) {
        v.kind = VarKind::binary;
        v.lower = 0.0;
        v.upper = 1.0;
      } else {
        v.kind = VarKind::integer;
      }
    }
  }

private:
  // var_on_left: "x <s> value"; otherwise "value <s> x".
  static void apply(Variable& v, Sense s, double value, bool var_on_left) {
    if (s == Sense::eq) {
      v.lower = v.upper = value;
      return;
    }
    bool sets_upper = (s == Sense::le) == var_on_left;
    (sets_upper ? v.upper : v.lower) = value;
  }

  const std::vector<Token>& toks_;
  Builder& b_;
  int end_line_;
  std::size_t pos_ = 0;
};

std::string expr_to_lp(const LinExpr& e, const Model& m, bool with_constant) {
  std::ostringstream out;
  bool first = true;
  auto emit_term = [&](double coef, const std::string* name) {
    if (first) {
      if (coef < 0) out << "- ";
    } else {
      out << (coef < 0 ? " - " : " + ");
    }
    double mag = std::abs(coef);
    if (name == nullptr) {
      out << format_number(mag);
    } else if (mag == 1.0) {
      out << *name;
    } else {
      out << format_number(mag) << ' ' << *name;
    }
    first = false;
  };
  for (const auto& v : m.variables) {
    auto it = e.terms.find(v.name);
    if (it != e.terms.end()) emit_term(it->second, &v.name);
  }
  if (with_constant && e.constant != 0.0) emit_term(e.constant, nullptr);
  if (first) out << "0";
  return out.str();
}

}  // namespace

Model parse_lp(std::string_view text) {
  Builder builder;
  Section section = Section::none;
  ObjSense obj_sense = ObjSense::minimize;
  bool saw_objective = false;
  bool saw_end = false;

  // Tokens are buffered per section and parsed when the section closes.
  std::vector<Token> pending;
  int line_no = 0;
  auto flush = [&](int end_line) {
    SectionParser p(pending, builder, end_line);
    switch (section) {
      case Section::objective:
        builder.model.objective.sense = obj_sense;
        p.parse_objective(builder.model.objective);
        break;
      case Section::constraints: p.parse_constraints(); break;
      case Section::bounds: p.parse_bounds(); break;
      case Section::generals: p.parse_names(false); break;
      case Section::binaries: p.parse_names(true); break;
      case Section::none:
      case Section::end:
        if (!pending.empty())
          throw ParseError("content outside of any section", pending.front().line, pending.front().column);
        break;
    }
    pending.clear();
  };

  std::size_t pos = 0;
  while (pos <= text.size() && !saw_end) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (auto cut = line.find('\\'); cut != std::string_view::npos) line = line.substr(0, cut);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    if (auto header = header_of(line)) {
      flush(line_no);
      if (header->first == Section::objective) {
        if (saw_objective) throw ParseError("second objective section", line_no, 1);
        saw_objective = true;
        obj_sense = header->second;
      } else if (!saw_objective) {
        throw ParseError("objective section must come first", line_no, 1);
      }
      section = header->first;
      if (section == Section::end) saw_end = true;
      continue;
    }
    lex_line(line, line_no, pending);
    if (nl == text.size()) break;
  }
  if (!saw_end) {
    flush(line_no);
    throw ParseError("missing End", line_no, 1);
  }
  validate(builder.model);
  return std::move(builder.model);
}

std::string emit_lp(const Model& m) {
  std::ostringstream out;
  out << (m.objective.sense == ObjSense::minimize ? "Minimize" : "Maximize") << '\n';
  out << ' ' << m.objective.name << ": " << expr_to_lp(m.objective.expr, m, true) << '\n';

  out << "Subject To\n";
  std::set<std::string> used;
  for (const auto& [name, coef] : m.objective.expr.terms) used.insert(name);
  for (const auto& c : m.constraints) {
    for (const auto& [name, coef] : c.lhs.terms) used.insert(name);
    out << ' ' << c.name << ": " << expr_to_lp(c.lhs, m, false) << ' ' << to_string(c.sense) << ' '
        << format_number(c.rhs - c.lhs.constant) << '\n';
  }

  std::ostringstream bounds, generals, binaries;
  for (const auto& v : m.variables) {
    if (v.kind == VarKind::binary) {
      binaries << ' ' << v.name << '\n';
      continue;
    }
    if (v.kind == VarKind::integer) generals << ' ' << v.name << '\n';
    bool lower_default = v.lower == 0.0;
    bool upper_default = std::isinf(v.upper) && v.upper > 0;
    if (lower_default && upper_default) {
      if (v.kind == VarKind::continuous && !used.contains(v.name)) bounds << ' ' << v.name << " >= 0\n";
    } else if (v.lower == v.upper) {
      bounds << ' ' << v.name << " = " << format_number(v.lower) << '\n';
    } else if (std::isinf(v.lower) && upper_default) {
      bounds << ' ' << v.name << " free\n";
    } else if (upper_default) {
      bounds << ' ' << v.name << " >= " << format_number(v.lower) << '\n';
    } else if (lower_default) {
      bounds << ' ' << v.name << " <= " << format_number(v.upper) << '\n';
    } else {
      bounds << ' ' << format_number(v.lower) << " <= " << v.name << " <= " << format_number(v.upper) << '\n';
    }
  }
  out << "Bounds\n" << bounds.str();
  if (!generals.str().empty()) out << "Generals\n" << generals.str();
  if (!binaries.str().empty()) out << "Binaries\n" << binaries.str();
  out << "End\n";
  return out.str();
}

Model read_lp_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open LP file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_lp(buf.str());
}

void write_lp_file(const std::string& path, const Model& model) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write LP file '" + path + "'");
  out << emit_lp(model);
  if (!out) throw Error("failed writing LP file '" + path + "'");
}

}  // namespace stochbench
