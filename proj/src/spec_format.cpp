#include "stochbench/spec_format.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

#include "stochbench/errors.hpp"

namespace stochbench {

namespace {

struct Line {
  int number;
  std::vector<std::string> words;
};

std::vector<Line> split_lines(std::string_view text) {
  std::vector<Line> out;
  std::istringstream in{std::string(text)};
  std::string raw;
  int number = 0;
  while (std::getline(in, raw)) {
    ++number;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
    // "name:" is split so the colon becomes its own word
    std::string spaced;
    for (char ch : raw) {
      if (ch == ':') {
        spaced += " : ";
      } else {
        spaced.push_back(ch);
      }
    }
    std::istringstream words(spaced);
    Line line{number, {}};
    for (std::string w; words >> w;) line.words.push_back(w);
    if (!line.words.empty()) out.push_back(std::move(line));
  }
  return out;
}

[[noreturn]] void fail(const Line& line, const std::string& what) { throw ParseError(what, line.number, 1); }

double number(const Line& line, const std::string& word) {
  char* end = nullptr;
  double v = std::strtod(word.c_str(), &end);
  if (word.empty() || end != word.c_str() + word.size()) fail(line, "expected a number, found '" + word + "'");
  return v;
}

std::vector<double> numbers(const Line& line, std::size_t from, std::size_t to) {
  std::vector<double> out;
  for (std::size_t i = from; i < to; ++i) out.push_back(number(line, line.words[i]));
  return out;
}

std::vector<double> numbers(const Line& line, std::size_t from = 1) { return numbers(line, from, line.words.size()); }

std::vector<std::string> names(const Line& line) { return {line.words.begin() + 1, line.words.end()}; }

bool boolean(const Line& line) {
  if (line.words.size() != 2) fail(line, "expected true or false");
  if (line.words[1] == "true") return true;
  if (line.words[1] == "false") return false;
  fail(line, "expected true or false, found '" + line.words[1] + "'");
}

Sense sense_of(const Line& line, const std::string& word) {
  if (word == "<=") return Sense::le;
  if (word == ">=") return Sense::ge;
  if (word == "=") return Sense::eq;
  fail(line, "expected <=, = or >=, found '" + word + "'");
}

std::size_t find_sense(const Line& line, std::size_t from) {
  for (std::size_t i = from; i < line.words.size(); ++i) {
    const auto& w = line.words[i];
    if (w == "<=" || w == ">=" || w == "=") return i;
  }
  fail(line, "missing relational operator");
}

// row <name> : <coefs...> <sense> <rhs>
Row parse_row(const Line& line) {
  if (line.words.size() < 5 || line.words[2] != ":") fail(line, "expected 'row <name>: <coefs> <sense> <rhs>'");
  std::size_t s = find_sense(line, 3);
  if (s + 2 != line.words.size()) fail(line, "expected a single right-hand side after the operator");
  return Row{line.words[1], numbers(line, 3, s), sense_of(line, line.words[s]), number(line, line.words[s + 1])};
}

// chance <name> : <coefs...> <sense> <family> <params...> alpha <a> [random_coefficients]
ChanceRow parse_chance_row(const Line& line) {
  if (line.words.size() < 7 || line.words[2] != ":") fail(line, "expected 'chance <name>: <coefs> <sense> <dist> ...'");
  ChanceRow r;
  r.name = line.words[1];
  std::size_t s = find_sense(line, 3);
  r.coefs = numbers(line, 3, s);
  r.sense = sense_of(line, line.words[s]);
  if (s + 1 >= line.words.size()) fail(line, "missing distribution");
  r.rhs.family = line.words[s + 1];
  std::size_t i = s + 2;
  for (; i < line.words.size() && line.words[i] != "alpha"; ++i) r.rhs.params.push_back(number(line, line.words[i]));
  if (i + 1 >= line.words.size()) fail(line, "missing 'alpha <level>'");
  r.alpha = number(line, line.words[i + 1]);
  i += 2;
  if (i < line.words.size()) {
    if (line.words[i] != "random_coefficients" || i + 1 != line.words.size()) fail(line, "unexpected trailing words");
    r.random_coefficients = true;
  }
  return r;
}

TwoStageSpec parse_two_stage(const std::vector<Line>& lines) {
  TwoStageSpec spec;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const Line& line = lines[k];
    const auto& key = line.words[0];
    if (key == "deterministic") {
      spec.deterministic = boolean(line);
    } else if (key == "first_stage_vars") {
      spec.first_stage_vars = names(line);
    } else if (key == "cost") {
      spec.c = numbers(line);
    } else if (key == "row") {
      spec.first_stage_rows.push_back(parse_row(line));
    } else if (key == "second_stage_vars") {
      spec.second_stage_vars = names(line);
    } else if (key == "second_stage_rows") {
      spec.second_stage_rows = names(line);
    } else if (key == "second_stage_senses") {
      for (std::size_t i = 1; i < line.words.size(); ++i) spec.second_stage_senses.push_back(sense_of(line, line.words[i]));
    } else if (key == "scenario") {
      if (line.words.size() != 2) fail(line, "expected 'scenario <probability>'");
      Scenario s;
      s.probability = number(line, line.words[1]);
      for (++k;; ++k) {
        if (k >= lines.size()) fail(line, "scenario block is missing 'end'");
        const Line& inner = lines[k];
        const auto& tag = inner.words[0];
        if (tag == "end") break;
        if (tag == "q") {
          s.q = numbers(inner);
        } else if (tag == "d") {
          s.d = numbers(inner);
        } else if (tag == "D") {
          s.D.push_back(numbers(inner));
        } else if (tag == "B") {
          s.B.push_back(numbers(inner));
        } else {
          fail(inner, "unknown scenario entry '" + tag + "'");
        }
      }
      spec.scenarios.push_back(std::move(s));
    } else {
      fail(line, "unknown key '" + key + "' for a two_stage problem");
    }
  }
  return spec;
}

ChanceSpec parse_chance(const std::vector<Line>& lines) {
  ChanceSpec spec;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const Line& line = lines[k];
    const auto& key = line.words[0];
    if (key == "vars") {
      spec.vars = names(line);
    } else if (key == "cost") {
      spec.c = numbers(line);
    } else if (key == "row") {
      spec.rows.push_back(parse_row(line));
    } else if (key == "chance") {
      spec.chance_rows.push_back(parse_chance_row(line));
    } else if (key == "joint") {
      spec.joint = boolean(line);
    } else if (key == "joint_alpha") {
      if (line.words.size() != 2) fail(line, "expected 'joint_alpha <level>'");
      spec.joint_alpha = number(line, line.words[1]);
    } else {
      fail(line, "unknown key '" + key + "' for a chance problem");
    }
  }
  return spec;
}

void write_numbers(std::ostream& out, const std::vector<double>& v) {
  for (double x : v) out << ' ' << format_number(x);
}

void write_names(std::ostream& out, const std::vector<std::string>& v) {
  for (const auto& x : v) out << ' ' << x;
}

void write_row(std::ostream& out, const Row& r) {
  out << "row " << r.name << ':';
  write_numbers(out, r.coefs);
  out << ' ' << to_string(r.sense) << ' ' << format_number(r.rhs) << '\n';
}

}  // namespace

CompactSpec parse_spec(std::string_view text) {
  auto lines = split_lines(text);
  if (lines.empty()) throw ParseError("empty spec", 1, 1);
  const Line& head = lines.front();
  if (head.words.size() != 2 || head.words[0] != "problem") fail(head, "spec must start with 'problem <kind>'");
  if (head.words[1] == "two_stage") return parse_two_stage(lines);
  if (head.words[1] == "chance") return parse_chance(lines);
  fail(head, "unknown problem kind '" + head.words[1] + "'");
}

std::string emit_spec(const CompactSpec& spec) {
  std::ostringstream out;
  if (const auto* ts = std::get_if<TwoStageSpec>(&spec)) {
    out << "problem two_stage\n";
    out << "deterministic " << (ts->deterministic ? "true" : "false") << '\n';
    out << "first_stage_vars";
    write_names(out, ts->first_stage_vars);
    out << "\ncost";
    write_numbers(out, ts->c);
    out << '\n';
    for (const auto& r : ts->first_stage_rows) write_row(out, r);
    out << "second_stage_vars";
    write_names(out, ts->second_stage_vars);
    out << "\nsecond_stage_rows";
    write_names(out, ts->second_stage_rows);
    out << '\n';
    if (!ts->second_stage_senses.empty()) {
      out << "second_stage_senses";
      for (auto s : ts->second_stage_senses) out << ' ' << to_string(s);
      out << '\n';
    }
    for (const auto& s : ts->scenarios) {
      out << "scenario " << format_number(s.probability) << "\n  q";
      write_numbers(out, s.q);
      out << '\n';
      for (const auto& r : s.D) {
        out << "  D";
        write_numbers(out, r);
        out << '\n';
      }
      for (const auto& r : s.B) {
        out << "  B";
        write_numbers(out, r);
        out << '\n';
      }
      out << "  d";
      write_numbers(out, s.d);
      out << "\nend\n";
    }
    return out.str();
  }
  const auto& cs = std::get<ChanceSpec>(spec);
  out << "problem chance\nvars";
  write_names(out, cs.vars);
  out << "\ncost";
  write_numbers(out, cs.c);
  out << '\n';
  for (const auto& r : cs.rows) write_row(out, r);
  for (const auto& r : cs.chance_rows) {
    out << "chance " << r.name << ':';
    write_numbers(out, r.coefs);
    out << ' ' << to_string(r.sense) << ' ' << r.rhs.family;
    write_numbers(out, r.rhs.params);
    out << " alpha " << format_number(r.alpha);
    if (r.random_coefficients) out << " random_coefficients";
    out << '\n';
  }
  out << "joint " << (cs.joint ? "true" : "false") << '\n';
  out << "joint_alpha " << format_number(cs.joint_alpha) << '\n';
  return out.str();
}

CompactSpec read_spec_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open spec file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_spec(buf.str());
}

}  // namespace stochbench
