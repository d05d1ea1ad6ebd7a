#include "mtl/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <list>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>

#include "mtl/error.hpp"
#include "mtl/io.hpp"
#include "mtl/linalg.hpp"

namespace mtl {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  int depth = 0;
  std::string cur;
  for (char c : s) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  if (out.size() == 1 && out[0].empty()) out.clear();
  return out;
}

std::optional<Rational> exact_op(const std::optional<Rational>& a, const std::optional<Rational>& b, char op) {
  if (!a || !b) return std::nullopt;
  try {
    switch (op) {
      case '+': return *a + *b;
      case '-': return *a - *b;
      case '*': return *a * *b;
      case '/':
        if (b->is_zero()) return std::nullopt;
        return *a / *b;
    }
  } catch (const std::overflow_error&) {
  }
  return std::nullopt;
}

std::optional<std::int64_t> exact_sqrt(std::int64_t v) {
  if (v < 0) return std::nullopt;
  auto r = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(v))));
  for (std::int64_t c = std::max<std::int64_t>(0, r - 1); c <= r + 1; ++c)
    if (c * c == v) return c;
  return std::nullopt;
}

class Parser {
 public:
  Parser(const std::string& text, const std::map<std::string, Scalar>& vars) : s_(text), vars_(vars) {}

  Scalar parse() {
    Scalar v = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + s_.substr(pos_) + "'");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError("bad expression '" + s_ + "': " + msg);
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Scalar expr() {
    Scalar v = term();
    for (;;) {
      if (eat('+')) {
        Scalar r = term();
        v = {v.value + r.value, exact_op(v.exact, r.exact, '+')};
      } else if (eat('-')) {
        Scalar r = term();
        v = {v.value - r.value, exact_op(v.exact, r.exact, '-')};
      } else {
        return v;
      }
    }
  }

  Scalar term() {
    Scalar v = unary();
    for (;;) {
      if (eat('*')) {
        Scalar r = unary();
        v = {v.value * r.value, exact_op(v.exact, r.exact, '*')};
      } else if (eat('/')) {
        Scalar r = unary();
        if (r.value == 0.0) fail("division by zero");
        v = {v.value / r.value, exact_op(v.exact, r.exact, '/')};
      } else {
        return v;
      }
    }
  }

  Scalar unary() {
    if (eat('-')) {
      Scalar v = unary();
      return {-v.value, v.exact ? std::optional<Rational>(-*v.exact) : std::nullopt};
    }
    if (eat('+')) return unary();
    return power();
  }

  Scalar power() {
    Scalar base = primary();
    if (!eat('^')) return base;
    Scalar e = unary();
    Scalar out{std::pow(base.value, e.value), std::nullopt};
    if (base.exact && e.exact && e.exact->den() == 1 && std::abs(e.exact->num()) <= 64) {
      try {
        Rational acc(1);
        for (std::int64_t i = 0; i < std::abs(e.exact->num()); ++i) acc *= *base.exact;
        if (e.exact->num() < 0) {
          if (acc.is_zero()) fail("zero to a negative power");
          acc = Rational(1) / acc;
        }
        out.exact = acc;
      } catch (const std::overflow_error&) {
      }
    }
    return out;
  }

  Scalar primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end");
    if (eat('(')) {
      Scalar v = expr();
      if (!eat(')')) fail("missing ')'");
      return v;
    }
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) ++pos_;
      if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
        std::size_t save = pos_++;
        if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
        if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
          while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        } else {
          pos_ = save;
        }
      }
      const std::string lit = s_.substr(start, pos_ - start);
      char* end = nullptr;
      const double v = std::strtod(lit.c_str(), &end);
      if (*end != '\0') fail("bad number '" + lit + "'");
      return {v, Rational::parse(lit)};
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      const std::string name = s_.substr(start, pos_ - start);
      if (eat('(')) {
        Scalar arg = expr();
        if (!eat(')')) fail("missing ')' after " + name);
        if (name == "sqrt") {
          if (arg.value < 0.0) fail("sqrt of a negative value");
          Scalar out{std::sqrt(arg.value), std::nullopt};
          if (arg.exact) {
            auto n = exact_sqrt(arg.exact->num());
            auto d = exact_sqrt(arg.exact->den());
            if (n && d) out.exact = Rational(*n, *d);
          }
          return out;
        }
        if (name == "abs") return {std::abs(arg.value), arg.exact ? std::optional<Rational>(abs(*arg.exact)) : std::nullopt};
        fail("unknown function '" + name + "'");
      }
      if (name == "pi") return {std::numbers::pi, std::nullopt};
      auto it = vars_.find(name);
      if (it == vars_.end()) fail("unknown name '" + name + "'");
      return it->second;
    }
    fail(std::string("unexpected '") + c + "'");
  }

  std::string s_;
  const std::map<std::string, Scalar>& vars_;
  std::size_t pos_ = 0;
};

struct Entry {
  std::string value;
  int line = 0;
  bool used = false;
};

struct Section {
  std::string name;
  int line = 0;
  std::map<std::string, Entry> entries;
  std::vector<std::string> order;
};

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"system", {"dimension", "components", "labels", "lambda", "omega"}},
      {"system.term", {"coefficient", "p", "q"}},
      {"grid", {"half_width", "points"}},
      {"solver",
       {"method", "profile", "max_iterations", "factor_tolerance", "gap_tolerance", "certification", "seed",
        "guess_amplitudes", "maximizer"}},
      {"criterion",
       {"tolerance_floor", "tolerance_relative", "sweep_parameter", "sweep_min", "sweep_max", "sweep_steps",
        "sweep_width"}},
      {"simulate",
       {"final_time", "dt", "t0", "epsilon", "sample_every", "integrator", "adaptive", "step_tolerance",
        "stop_at_threshold", "initial"}},
      {"output", {"directory", "formats"}},
  };
  return keys;
}

class Loader {
 public:
  std::vector<std::string> errors;
  std::list<Section> sections;
  std::map<std::string, Scalar> vars;

  void error(int line, const std::string& msg) {
    errors.push_back(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg);
  }

  void read(const std::string& text) {
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    Section* current = nullptr;
    while (std::getline(in, raw)) {
      ++line_no;
      std::string line = raw;
      if (auto h = line.find('#'); h != std::string::npos) line = line.substr(0, h);
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        current = nullptr;
        if (line.back() != ']') {
          error(line_no, "unterminated section header");
          continue;
        }
        const std::string name = trim(line.substr(1, line.size() - 2));
        if (find(name)) {
          error(line_no, "duplicate section [" + name + "]");
          continue;
        }
        sections.push_back({name, line_no, {}, {}});
        current = &sections.back();
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        error(line_no, "expected 'key = value'");
        continue;
      }
      if (!current) {
        error(line_no, "key outside of any section");
        continue;
      }
      const std::string key = trim(line.substr(0, eq));
      if (key.empty()) {
        error(line_no, "empty key");
        continue;
      }
      if (current->entries.count(key)) {
        error(line_no, "duplicate key '" + key + "' in [" + current->name + "]");
        continue;
      }
      current->entries[key] = {trim(line.substr(eq + 1)), line_no, false};
      current->order.push_back(key);
    }
  }

  Section* find(const std::string& name) {
    for (auto& s : sections)
      if (s.name == name) return &s;
    return nullptr;
  }

  Section& ensure(const std::string& name) {
    if (Section* s = find(name)) return *s;
    sections.push_back({name, 0, {}, {}});
    return sections.back();
  }

  void apply_override(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      error(0, "override '" + text + "' is not of the form name=value");
      return;
    }
    const std::string name = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    const auto dot = name.rfind('.');
    if (dot == std::string::npos) {
      Section* p = find("parameters");
      if (!p || !p->entries.count(name)) {
        error(0, "override of unknown parameter '" + name + "'");
        return;
      }
      p->entries[name].value = value;
      return;
    }
    Section& s = ensure(name.substr(0, dot));
    const std::string key = name.substr(dot + 1);
    if (!s.entries.count(key)) s.order.push_back(key);
    s.entries[key] = {value, s.entries.count(key) ? s.entries[key].line : 0, false};
  }

  Entry* take(Section* s, const std::string& key) {
    if (!s) return nullptr;
    auto it = s->entries.find(key);
    if (it == s->entries.end()) return nullptr;
    it->second.used = true;
    return &it->second;
  }

  std::optional<Scalar> scalar(Section* s, const std::string& key) {
    Entry* e = take(s, key);
    if (!e) return std::nullopt;
    try {
      return evaluate_expression(e->value, vars);
    } catch (const ConfigError& err) {
      error(e->line, "[" + s->name + "] " + key + ": " + err.what());
      return std::nullopt;
    }
  }

  double number(Section* s, const std::string& key, double fallback) {
    auto v = scalar(s, key);
    return v ? v->value : fallback;
  }

  std::optional<long long> integer(Section* s, const std::string& key) {
    Entry* e = s ? take(s, key) : nullptr;
    if (!e) return std::nullopt;
    try {
      Scalar v = evaluate_expression(e->value, vars);
      if (!v.exact || v.exact->den() != 1) {
        error(e->line, "[" + s->name + "] " + key + ": expected an integer, got '" + e->value + "'");
        return std::nullopt;
      }
      return v.exact->num();
    } catch (const ConfigError& err) {
      error(e->line, "[" + s->name + "] " + key + ": " + err.what());
      return std::nullopt;
    }
  }

  std::vector<Scalar> scalar_list(Section* s, const std::string& key, bool* present = nullptr) {
    Entry* e = take(s, key);
    if (present) *present = e != nullptr;
    std::vector<Scalar> out;
    if (!e) return out;
    for (const auto& item : split_list(e->value)) {
      try {
        out.push_back(evaluate_expression(item, vars));
      } catch (const ConfigError& err) {
        error(e->line, "[" + s->name + "] " + key + ": " + err.what());
      }
    }
    return out;
  }

  std::vector<int> int_list(Section* s, const std::string& key, bool* present = nullptr) {
    Entry* e = take(s, key);
    if (present) *present = e != nullptr;
    std::vector<int> out;
    if (!e) return out;
    for (const auto& item : split_list(e->value)) {
      try {
        Scalar v = evaluate_expression(item, vars);
        if (!v.exact || v.exact->den() != 1 || v.exact->num() < 0) {
          error(e->line, "[" + s->name + "] " + key + ": expected a nonnegative integer, got '" + item + "'");
          continue;
        }
        out.push_back(static_cast<int>(v.exact->num()));
      } catch (const ConfigError& err) {
        error(e->line, "[" + s->name + "] " + key + ": " + err.what());
      }
    }
    return out;
  }

  std::optional<std::string> word(Section* s, const std::string& key) {
    Entry* e = take(s, key);
    if (!e) return std::nullopt;
    return e->value;
  }

  std::optional<bool> boolean(Section* s, const std::string& key) {
    Entry* e = take(s, key);
    if (!e) return std::nullopt;
    if (e->value == "true" || e->value == "yes" || e->value == "1") return true;
    if (e->value == "false" || e->value == "no" || e->value == "0") return false;
    error(e->line, "[" + s->name + "] " + key + ": expected true or false, got '" + e->value + "'");
    return std::nullopt;
  }

  int line_of(Section* s, const std::string& key) {
    if (!s) return 0;
    auto it = s->entries.find(key);
    return it == s->entries.end() ? s->line : it->second.line;
  }

  void check_unknown() {
    const auto& known = known_keys();
    for (auto& s : sections) {
      if (s.name == "parameters") continue;
      std::string family = s.name.rfind("system.term.", 0) == 0 ? "system.term" : s.name;
      auto it = known.find(family);
      if (it == known.end()) {
        error(s.line, "unknown section [" + s.name + "]");
        continue;
      }
      for (const auto& key : s.order)
        if (!it->second.count(key))
          error(s.entries[key].line, "unknown key '" + key + "' in [" + s.name + "]");
    }
  }
};

void load_parameters(Loader& ld) {
  Section* p = ld.find("parameters");
  if (!p) return;
  for (const auto& key : p->order) {
    Entry& e = p->entries[key];
    e.used = true;
    try {
      ld.vars[key] = evaluate_expression(e.value, ld.vars);
    } catch (const ConfigError& err) {
      ld.error(e.line, "[parameters] " + key + ": " + err.what());
    }
  }
}

void load_system(Loader& ld, RunConfig& cfg) {
  Section* sys = ld.find("system");
  SystemSpec& spec = cfg.spec;
  auto d = ld.integer(sys, "dimension");
  if (!d) {
    ld.error(sys->line, "[system] needs an integer 'dimension'");
  } else {
    spec.dimension = static_cast<int>(*d);
  }
  bool have_lambda = false, have_omega = false, have_labels = false;
  const auto lambdas = ld.scalar_list(sys, "lambda", &have_lambda);
  const auto omegas = ld.scalar_list(sys, "omega", &have_omega);
  if (!have_lambda) ld.error(sys->line, "[system] needs 'lambda'");
  if (!have_omega) ld.error(sys->line, "[system] needs 'omega'");
  int m = static_cast<int>(lambdas.size());
  if (auto c = ld.integer(sys, "components")) m = static_cast<int>(*c);
  if (Entry* e = ld.take(sys, "labels")) {
    have_labels = true;
    spec.labels = split_list(e->value);
  }
  if (static_cast<int>(lambdas.size()) != m)
    ld.error(ld.line_of(sys, "lambda"), "[system] lambda has " + std::to_string(lambdas.size()) +
                                            " entries for " + std::to_string(m) + " components");
  if (static_cast<int>(omegas.size()) != m)
    ld.error(ld.line_of(sys, "omega"),
             "[system] omega has " + std::to_string(omegas.size()) + " entries for " + std::to_string(m) + " components");
  if (have_labels && static_cast<int>(spec.labels.size()) != m)
    ld.error(ld.line_of(sys, "labels"), "[system] labels has " + std::to_string(spec.labels.size()) +
                                            " entries for " + std::to_string(m) + " components");
  spec.components = m;
  for (const auto& l : lambdas) spec.lambdas.push_back(l.value);
  bool exact = !omegas.empty();
  for (const auto& w : omegas) {
    spec.omegas.push_back(w.value);
    exact &= w.exact.has_value();
  }
  if (exact)
    for (const auto& w : omegas) spec.omegas_exact.push_back(*w.exact);

  std::vector<Section*> term_sections;
  for (auto& s : ld.sections)
    if (s.name.rfind("system.term.", 0) == 0) term_sections.push_back(&s);
  for (Section* ts : term_sections) {
    const std::string name = ts->name.substr(std::string("system.term.").size());
    MonomialTerm term;
    auto c = ld.scalar(ts, "coefficient");
    if (!c) {
      if (!ts->entries.count("coefficient")) ld.error(ts->line, "[" + ts->name + "] needs 'coefficient'");
    } else {
      term.coefficient = c->value;
    }
    bool have_p = false, have_q = false;
    auto p = ld.int_list(ts, "p", &have_p);
    auto q = ld.int_list(ts, "q", &have_q);
    if (!have_p) p.assign(m, 0);
    if (!have_q) q.assign(m, 0);
    if (static_cast<int>(p.size()) != m || static_cast<int>(q.size()) != m) {
      ld.error(ts->line, "[" + ts->name + "] p and q need one exponent per component");
      continue;
    }
    for (int j = 0; j < m; ++j) term.exponents.push_back({p[j], q[j]});
    if (term.alpha() == 0) ld.error(ts->line, "[" + ts->name + "] has no exponents");
    // A term that evaluates to zero is switched off.
    if (c && c->value == 0.0) continue;
    spec.terms.push_back(term);
    cfg.term_names.push_back(name);
    cfg.term_lines.push_back(ts->line);
  }
}

}  // namespace

Scalar evaluate_expression(const std::string& text, const std::map<std::string, Scalar>& variables) {
  if (trim(text).empty()) throw ConfigError("empty expression");
  return Parser(text, variables).parse();
}

std::string to_string(SolverMethod m) {
  switch (m) {
    case SolverMethod::Synchronous: return "synchronous";
    case SolverMethod::ClosedForm: return "closed-form";
    case SolverMethod::Petviashvili: return "petviashvili";
    case SolverMethod::File: return "file";
  }
  return "?";
}

bool OutputConfig::wants(const std::string& format) const {
  return std::find(formats.begin(), formats.end(), format) != formats.end();
}

double linear_decay_rate(const SystemSpec& spec) {
  const int m = spec.components;
  SystemSpec quad = spec;
  quad.terms.clear();
  for (const auto& t : spec.terms)
    if (t.alpha() == 2) quad.terms.push_back(t);
  Matrix lin(m);
  for (int i = 0; i < m; ++i) {
    std::vector<Complex> e(m, Complex(0.0)), g(m);
    e[i] = 1.0;
    nonlinear_gradient_point(quad, e.data(), g.data());
    for (int j = 0; j < m; ++j) lin(j, i) = g[j].real();
    lin(i, i) += spec.lambdas[i] * spec.omegas[i];
  }
  return eigen_symmetric(lin).values.front();
}

Grid RunConfig::resolve_grid() const {
  const double rate = linear_decay_rate(spec);
  if (!(rate > 0.0) && (!grid.half_width || !grid.points))
    throw ConfigError("cannot choose an automatic grid: linear part is not positive definite (smallest eigenvalue " +
                      format_double(rate) + ")");
  Grid g = rate > 0.0 ? default_grid(spec.dimension, rate) : Grid{spec.dimension, 1.0, 16};
  if (grid.half_width) g.half_width = *grid.half_width;
  if (grid.points) g.points = *grid.points;
  return g;
}

RunConfig parse_config_text(const std::string& text, const std::vector<std::string>& overrides,
                            const std::filesystem::path& base_directory) {
  RunConfig cfg;
  cfg.text = text;
  cfg.overrides = overrides;
  cfg.base_directory = base_directory;
  Loader ld;
  ld.read(text);
  for (const auto& o : overrides) ld.apply_override(o);
  if (!ld.find("system")) {
    ld.errors.insert(ld.errors.begin(), "missing [system]");
    std::string msg;
    for (const auto& e : ld.errors) msg += (msg.empty() ? "" : "\n") + e;
    throw ConfigError(msg);
  }
  load_parameters(ld);
  cfg.parameters = ld.vars;
  load_system(ld, cfg);

  if (Section* g = ld.find("grid")) {
    if (auto w = ld.word(g, "half_width"); w && *w != "auto") {
      g->entries["half_width"].used = false;
      if (auto v = ld.scalar(g, "half_width")) cfg.grid.half_width = v->value;
    }
    if (auto w = ld.word(g, "points"); w && *w != "auto") {
      g->entries["points"].used = false;
      if (auto v = ld.integer(g, "points")) cfg.grid.points = static_cast<int>(*v);
    }
  }

  if (Section* s = ld.find("solver")) {
    if (auto w = ld.word(s, "method")) {
      if (*w == "synchronous") cfg.solver.method = SolverMethod::Synchronous;
      else if (*w == "closed-form") cfg.solver.method = SolverMethod::ClosedForm;
      else if (*w == "petviashvili") cfg.solver.method = SolverMethod::Petviashvili;
      else if (*w == "file") cfg.solver.method = SolverMethod::File;
      else ld.error(ld.line_of(s, "method"), "[solver] unknown method '" + *w + "'");
    }
    if (auto w = ld.word(s, "profile")) {
      std::filesystem::path p = *w;
      if (p.is_relative() && !base_directory.empty()) p = base_directory / p;
      cfg.solver.profile = p;
    }
    if (auto v = ld.integer(s, "max_iterations")) cfg.solver.petviashvili.max_iterations = static_cast<int>(*v);
    cfg.solver.petviashvili.factor_tolerance =
        ld.number(s, "factor_tolerance", cfg.solver.petviashvili.factor_tolerance);
    cfg.solver.petviashvili.gap_tolerance = ld.number(s, "gap_tolerance", cfg.solver.petviashvili.gap_tolerance);
    cfg.solver.certification = ld.number(s, "certification", cfg.solver.certification);
    if (auto v = ld.integer(s, "seed")) cfg.solver.seed = static_cast<std::uint64_t>(*v);
    for (const auto& a : ld.scalar_list(s, "guess_amplitudes")) cfg.solver.guess_amplitudes.push_back(a.value);
    if (auto v = ld.integer(s, "maximizer")) cfg.solver.maximizer = static_cast<int>(*v);
  }
  if (cfg.solver.method == SolverMethod::File) {
    if (cfg.solver.profile.empty())
      ld.error(ld.line_of(ld.find("solver"), "method"), "[solver] method = file needs 'profile'");
    else if (!std::filesystem::exists(cfg.solver.profile))
      ld.error(ld.line_of(ld.find("solver"), "profile"), "profile file not found: " + cfg.solver.profile.string());
  }
  if (!cfg.solver.guess_amplitudes.empty() &&
      static_cast<int>(cfg.solver.guess_amplitudes.size()) != cfg.spec.components)
    ld.error(ld.line_of(ld.find("solver"), "guess_amplitudes"), "[solver] guess_amplitudes needs one entry per component");

  if (Section* c = ld.find("criterion")) {
    cfg.criterion.tolerances.floor = ld.number(c, "tolerance_floor", cfg.criterion.tolerances.floor);
    cfg.criterion.tolerances.relative = ld.number(c, "tolerance_relative", cfg.criterion.tolerances.relative);
    if (auto name = ld.word(c, "sweep_parameter")) {
      SweepConfig sw;
      sw.parameter = *name;
      if (!cfg.parameters.count(sw.parameter))
        ld.error(ld.line_of(c, "sweep_parameter"), "sweep parameter '" + sw.parameter + "' is not in [parameters]");
      sw.lo = ld.number(c, "sweep_min", sw.lo);
      sw.hi = ld.number(c, "sweep_max", sw.hi);
      if (auto v = ld.integer(c, "sweep_steps")) sw.steps = static_cast<int>(*v);
      sw.width = ld.number(c, "sweep_width", sw.width);
      if (!(sw.hi > sw.lo) || sw.steps < 1)
        ld.error(ld.line_of(c, "sweep_parameter"), "sweep needs sweep_min < sweep_max and sweep_steps >= 1");
      cfg.criterion.sweep = sw;
    }
  }

  if (Section* s = ld.find("simulate")) {
    auto& ev = cfg.simulate.evolve;
    ev.final_time = ld.number(s, "final_time", ev.final_time);
    ev.dt = ld.number(s, "dt", ev.dt);
    cfg.simulate.t0 = ld.number(s, "t0", cfg.simulate.t0);
    if (auto w = ld.word(s, "epsilon"); w && *w != "auto") {
      s->entries["epsilon"].used = false;
      if (auto v = ld.scalar(s, "epsilon")) ev.epsilon = v->value;
    }
    if (auto v = ld.integer(s, "sample_every")) ev.sample_every = static_cast<int>(*v);
    if (auto w = ld.word(s, "integrator")) {
      if (*w == "strang") ev.integrator = Integrator::Strang;
      else if (*w == "yoshida4") ev.integrator = Integrator::Yoshida4;
      else ld.error(ld.line_of(s, "integrator"), "[simulate] unknown integrator '" + *w + "'");
    }
    if (auto b = ld.boolean(s, "adaptive")) ev.adaptive = *b;
    ev.step_tolerance = ld.number(s, "step_tolerance", ev.step_tolerance);
    if (auto b = ld.boolean(s, "stop_at_threshold")) ev.stop_at_threshold = *b;
    if (auto w = ld.word(s, "initial")) {
      if (*w == "perturbed") cfg.simulate.perturb = true;
      else if (*w == "bound-state") cfg.simulate.perturb = false;
      else ld.error(ld.line_of(s, "initial"), "[simulate] initial must be 'perturbed' or 'bound-state'");
    }
    if (!(ev.dt > 0.0) || !(ev.final_time >= 0.0) || ev.sample_every < 1)
      ld.error(s->line, "[simulate] needs dt > 0, final_time >= 0 and sample_every >= 1");
  }

  if (Section* o = ld.find("output")) {
    if (auto w = ld.word(o, "directory")) cfg.output.directory = *w;
    if (Entry* e = ld.take(o, "formats")) {
      cfg.output.formats = split_list(e->value);
      for (const auto& f : cfg.output.formats)
        if (f != "json" && f != "csv" && f != "mtl1") ld.error(e->line, "[output] unknown format '" + f + "'");
    }
  }

  ld.check_unknown();

  if (ld.errors.empty()) {
    try {
      cfg.spec.validate_structure();
    } catch (const PreconditionError& e) {
      ld.error(ld.find("system")->line, std::string("[system] ") + e.what());
    }
  }
  if (ld.errors.empty()) {
    const GaugeResult gauge = validate_gauge(cfg.spec);
    for (const auto& v : gauge.violations) {
      const std::string mismatch = v.exact_mismatch ? v.exact_mismatch->to_string() : format_double(v.mismatch);
      ld.error(cfg.term_lines[v.term], "term '" + cfg.term_names[v.term] +
                                           "' breaks gauge invariance: sum_j omega_j (p_j - q_j) = " + mismatch);
    }
  }
  if (!ld.errors.empty()) {
    std::string msg;
    for (const auto& e : ld.errors) msg += (msg.empty() ? "" : "\n") + e;
    throw ConfigError(msg);
  }
  return cfg;
}

RunConfig parse_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return parse_config_text(text, overrides, path.parent_path());
}

RunConfig reparse(const RunConfig& config, const std::vector<std::string>& extra_overrides) {
  std::vector<std::string> all = config.overrides;
  all.insert(all.end(), extra_overrides.begin(), extra_overrides.end());
  return parse_config_text(config.text, all, config.base_directory);
}

}  // namespace mtl
