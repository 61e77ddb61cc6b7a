#include "presym/problem_io.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "presym/errors.hpp"

namespace presym {

namespace {

enum class Section { None, States, Controls, Dynamics, Lagrangian, Holonomic, TimeDependent, P0, Symmetries, Domain };

std::optional<Section> section_from_name(std::string_view key) {
  if (key == "states") return Section::States;
  if (key == "controls") return Section::Controls;
  if (key == "dynamics") return Section::Dynamics;
  if (key == "lagrangian") return Section::Lagrangian;
  if (key == "holonomic") return Section::Holonomic;
  if (key == "time_dependent") return Section::TimeDependent;
  if (key == "p0") return Section::P0;
  if (key == "symmetries") return Section::Symmetries;
  if (key == "domain") return Section::Domain;
  return std::nullopt;
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }

// A piece of a source line, remembering its 1-based starting column.
struct Span {
  std::string_view text;
  std::size_t column = 1;

  Span trimmed() const {
    std::size_t b = 0;
    std::size_t e = text.size();
    while (b < e && is_space(text[b])) ++b;
    while (e > b && is_space(text[e - 1])) --e;
    return {text.substr(b, e - b), column + b};
  }
  Span sub(std::size_t pos, std::size_t len = std::string_view::npos) const {
    return {text.substr(pos, len), column + pos};
  }
  bool empty() const { return text.empty(); }
};

class ProblemParser {
 public:
  explicit ProblemParser(std::string_view text) : text_(text) {}

  ControlProblem run() {
    std::size_t start = 0;
    while (start <= text_.size()) {
      std::size_t end = text_.find('\n', start);
      if (end == std::string_view::npos) end = text_.size();
      ++line_;
      std::string_view raw = text_.substr(start, end - start);
      if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
      handle_line(Span{raw, 1}.trimmed());
      start = end + 1;
    }
    finish();
    return std::move(problem_);
  }

 private:
  [[noreturn]] void fail(std::size_t column, const std::string& msg) const {
    throw InputError("line " + std::to_string(line_) + ", column " + std::to_string(column) + ": " + msg);
  }

  Expr expression(const Span& s) const {
    Span t = s.trimmed();
    if (t.empty()) fail(s.column, "expected an expression");
    try {
      return parse(t.text);
    } catch (const ParseError& e) {
      fail(t.column + e.offset() - 1, e.what());
    }
  }

  double number(const Span& s) const {
    Expr e = expression(s);
    try {
      return eval(e, VariableTable{});
    } catch (const EvalError&) {
      fail(s.trimmed().column, "expected a constant");
    }
  }

  void handle_line(const Span& line) {
    if (line.empty()) return;
    auto colon = line.text.find(':');
    if (colon != std::string_view::npos) {
      Span key = line.sub(0, colon).trimmed();
      if (auto sec = section_from_name(key.text)) {
        section_ = *sec;
        if (!seen_.insert(key.text).second) fail(key.column, "section '" + std::string(key.text) + "' repeated");
        current_symmetry_ = nullptr;
        Span rest = line.sub(colon + 1).trimmed();
        if (!rest.empty()) content(rest);
        return;
      }
      if (section_ == Section::Symmetries &&
          (key.text == "symmetry" || key.text.starts_with("symmetry ") || key.text.starts_with("symmetry\t"))) {
        Span name = key.sub(8).trimmed();
        if (name.empty()) fail(key.column, "symmetry block needs a name");
        if (!line.sub(colon + 1).trimmed().empty()) fail(line.column + colon + 1, "unexpected text after symmetry header");
        problem_.symmetries.push_back({std::string(name.text), {}, {}});
        current_symmetry_ = &problem_.symmetries.back();
        xi_seen_ = zeta_seen_ = false;
        return;
      }
      fail(key.column, "unknown section '" + std::string(key.text) + "'");
    }
    content(line);
  }

  void content(const Span& s) {
    switch (section_) {
      case Section::None: fail(s.column, "content outside of any section");
      case Section::States: names(s, problem_.states); return;
      case Section::Controls: names(s, problem_.controls); return;
      case Section::Dynamics: dynamics_line(s); return;
      case Section::Lagrangian:
        if (lagrangian_) fail(s.column, "lagrangian takes a single expression");
        lagrangian_ = expression(s);
        return;
      case Section::Holonomic: problem_.holonomic.push_back(expression(s)); return;
      case Section::TimeDependent:
        if (s.text == "true") {
          problem_.time_dependent = true;
        } else if (s.text == "false") {
          problem_.time_dependent = false;
        } else {
          fail(s.column, "time_dependent must be true or false");
        }
        return;
      case Section::P0: {
        double p0 = number(s);
        if (p0 == 0.0) fail(s.column, "abnormal extremals (p0 = 0) are out of scope");
        if (p0 != 1.0) fail(s.column, "only the normal case p0 = 1 is supported");
        return;
      }
      case Section::Symmetries: symmetry_line(s); return;
      case Section::Domain: domain_line(s); return;
    }
  }

  void names(const Span& s, std::vector<std::string>& out) {
    std::size_t i = 0;
    while (i < s.text.size()) {
      while (i < s.text.size() && (is_space(s.text[i]) || s.text[i] == ',')) ++i;
      std::size_t b = i;
      while (i < s.text.size() && !is_space(s.text[i]) && s.text[i] != ',') ++i;
      if (b == i) continue;
      std::string_view name = s.text.substr(b, i - b);
      bool ok = std::isalpha(static_cast<unsigned char>(name[0])) || name[0] == '_';
      for (char c : name) ok = ok && (std::isalnum(static_cast<unsigned char>(c)) || c == '_');
      if (!ok) fail(s.column + b, "invalid identifier '" + std::string(name) + "'");
      out.emplace_back(name);
    }
  }

  void dynamics_line(const Span& s) {
    auto eq = s.text.find('=');
    if (eq == std::string_view::npos) fail(s.column, "expected `name' = expression`");
    Span lhs = s.sub(0, eq).trimmed();
    if (lhs.text.size() < 2 || lhs.text.back() != '\'')
      fail(lhs.column, "left-hand side must be a state name followed by '");
    std::string name(lhs.sub(0, lhs.text.size() - 1).trimmed().text);
    if (dynamics_.contains(name)) fail(lhs.column, "dynamics for '" + name + "' given twice");
    dynamics_.emplace(name, std::make_pair(expression(s.sub(eq + 1)), line_));
  }

  std::vector<Expr> tuple(const Span& s) const {
    Span t = s.trimmed();
    if (t.text.size() >= 2 && t.text.front() == '(' && t.text.back() == ')') {
      // Only strip when the outer parentheses enclose the whole tuple.
      int depth = 0;
      bool encloses = true;
      for (std::size_t i = 0; i < t.text.size(); ++i) {
        if (t.text[i] == '(') ++depth;
        if (t.text[i] == ')') --depth;
        if (depth == 0 && i + 1 < t.text.size()) encloses = false;
      }
      if (encloses) t = t.sub(1, t.text.size() - 2);
    }
    std::vector<Expr> out;
    int depth = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= t.text.size(); ++i) {
      if (i < t.text.size() && t.text[i] == '(') ++depth;
      if (i < t.text.size() && t.text[i] == ')') --depth;
      if (i == t.text.size() || (t.text[i] == ',' && depth == 0)) {
        Span piece = t.sub(start, i - start);
        if (piece.trimmed().empty()) {
          if (i == t.text.size() && out.empty()) break;
          fail(piece.column, "empty tuple component");
        }
        out.push_back(expression(piece));
        start = i + 1;
      }
    }
    return out;
  }

  void symmetry_line(const Span& s) {
    if (current_symmetry_ == nullptr) fail(s.column, "expected `symmetry <name>:`");
    auto eq = s.text.find('=');
    if (eq == std::string_view::npos) fail(s.column, "expected `xi = (...)` or `zeta = (...)`");
    Span key = s.sub(0, eq).trimmed();
    if (key.text == "xi") {
      if (xi_seen_) fail(key.column, "xi given twice");
      xi_seen_ = true;
      current_symmetry_->xi = tuple(s.sub(eq + 1));
    } else if (key.text == "zeta") {
      if (zeta_seen_) fail(key.column, "zeta given twice");
      zeta_seen_ = true;
      current_symmetry_->zeta = tuple(s.sub(eq + 1));
    } else {
      fail(key.column, "unknown symmetry field '" + std::string(key.text) + "'");
    }
  }

  void domain_line(const Span& s) {
    auto in = s.text.find(" in ");
    auto open = s.text.find('[');
    auto close = s.text.rfind(']');
    if (in == std::string_view::npos || open == std::string_view::npos || close == std::string_view::npos ||
        open > close || close + 1 != s.text.size())
      fail(s.column, "expected `name in [lo, hi]`");
    std::string name(s.sub(0, in).trimmed().text);
    Span inner = s.sub(open + 1, close - open - 1);
    auto comma = inner.text.find(',');
    if (comma == std::string_view::npos) fail(inner.column, "expected `lo, hi`");
    double lo = number(inner.sub(0, comma));
    double hi = number(inner.sub(comma + 1));
    if (!(lo < hi)) fail(inner.column, "domain box must satisfy lo < hi");
    if (problem_.domain.explicit_boxes().contains(name)) fail(s.column, "domain for '" + name + "' given twice");
    problem_.domain.set(name, {lo, hi});
  }

  void finish() {
    if (!seen_.contains("states")) throw InputError("missing section 'states'");
    if (!seen_.contains("dynamics")) throw InputError("missing section 'dynamics'");
    if (!lagrangian_) throw InputError("missing section 'lagrangian'");
    problem_.lagrangian = *lagrangian_;
    for (const auto& [name, entry] : dynamics_) {
      if (std::find(problem_.states.begin(), problem_.states.end(), name) == problem_.states.end())
        throw InputError("line " + std::to_string(entry.second) + ": dynamics given for unknown state '" +
                         name + "'");
    }
    for (const auto& s : problem_.states) {
      auto it = dynamics_.find(s);
      if (it == dynamics_.end()) throw InputError("missing dynamics for state '" + s + "'");
      problem_.dynamics.push_back(it->second.first);
    }
    for (auto& g : problem_.symmetries)
      if (g.zeta.empty() && !problem_.controls.empty())
        g.zeta.assign(problem_.controls.size(), Expr::constant(0.0));
    auto issues = validate(problem_);
    if (!issues.empty()) {
      std::string msg = "invalid problem:";
      for (const auto& i : issues) msg += "\n  " + i;
      throw InputError(msg);
    }
  }

  std::string_view text_;
  std::size_t line_ = 0;
  Section section_ = Section::None;
  std::set<std::string_view> seen_;
  ControlProblem problem_;
  std::optional<Expr> lagrangian_;
  std::map<std::string, std::pair<Expr, std::size_t>> dynamics_;
  SymmetryGenerator* current_symmetry_ = nullptr;
  bool xi_seen_ = false;
  bool zeta_seen_ = false;
};

}  // namespace

ControlProblem parse_problem(std::string_view text) { return ProblemParser(text).run(); }

ControlProblem load_problem(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open problem file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();
  try {
    return parse_problem(text);
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

}  // namespace presym
