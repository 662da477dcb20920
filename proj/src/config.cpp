#include "latincut/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "latincut/error.hpp"
#include "latincut/format.hpp"

namespace latincut {

namespace {

[[noreturn]] void bad_value(std::string_view key, std::string_view expected, std::string_view got) {
  throw Error(ErrorKind::Parse, std::string(key) + ": expected " + std::string(expected) + ", got '" +
                                    std::string(got) + "'");
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  if (trim(text).empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    out.push_back(trim(text.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double to_double(std::string_view key, std::string_view v) {
  const auto d = parse_double(v);
  if (!d) bad_value(key, "a number", v);
  return *d;
}

int to_int(std::string_view key, std::string_view v) {
  const auto i = parse_integer(v);
  if (!i || *i < std::numeric_limits<int>::min() || *i > std::numeric_limits<int>::max()) {
    bad_value(key, "an integer", v);
  }
  return static_cast<int>(*i);
}

bool to_bool(std::string_view key, std::string_view v) {
  if (v == "true") return true;
  if (v == "false") return false;
  bad_value(key, "true or false", v);
}

std::vector<double> to_doubles(std::string_view key, std::string_view v) {
  std::vector<double> out;
  for (auto item : split(v, ',')) out.push_back(to_double(key, item));
  return out;
}

std::vector<int> to_ints(std::string_view key, std::string_view v) {
  std::vector<int> out;
  for (auto item : split(v, ',')) out.push_back(to_int(key, item));
  return out;
}

std::optional<double> to_optional(std::string_view key, std::string_view v) {
  if (v == "free") return std::nullopt;
  return to_double(key, v);
}

template <class T, class F>
std::string join(const std::vector<T>& items, F fmt, std::string_view sep = ", ") {
  std::string out;
  for (std::size_t k = 0; k < items.size(); ++k) {
    if (k) out += sep;
    out += fmt(items[k]);
  }
  return out;
}

std::string fmt_bool(bool b) { return b ? "true" : "false"; }
std::string fmt_optional(const std::optional<double>& v) { return v ? format_double(*v) : "free"; }

InterfaceMode to_mode(std::string_view key, std::string_view v) {
  if (v == "p1p1") return InterfaceMode::P1P1;
  if (v == "p1p0") return InterfaceMode::P1P0;
  bad_value(key, "p1p1 or p1p0", v);
}

ContactLaw to_law(std::string_view key, std::string_view v) {
  if (v == "unilateral") return ContactLaw::Unilateral;
  if (v == "bonded") return ContactLaw::Bonded;
  bad_value(key, "unilateral or bonded", v);
}

DirichletMethod to_method(std::string_view key, std::string_view v) {
  if (v == "strong") return DirichletMethod::Strong;
  if (v == "nitsche") return DirichletMethod::Nitsche;
  bad_value(key, "strong or nitsche", v);
}

struct KeyDef {
  std::string name;
  std::function<void(RunConfig&, std::string_view)> set;
  std::function<std::string(const RunConfig&)> get;
};

void add_side_keys(std::vector<KeyDef>& keys, const std::string& prefix,
                   std::function<SideCondition&(RunConfig&)> side,
                   std::function<const SideCondition&(const RunConfig&)> cside) {
  keys.push_back({prefix + ".ux", [=](RunConfig& c, std::string_view v) { side(c).ux = to_optional(prefix + ".ux", v); },
                  [=](const RunConfig& c) { return fmt_optional(cside(c).ux); }});
  keys.push_back({prefix + ".uy", [=](RunConfig& c, std::string_view v) { side(c).uy = to_optional(prefix + ".uy", v); },
                  [=](const RunConfig& c) { return fmt_optional(cside(c).uy); }});
  keys.push_back({prefix + ".tx", [=](RunConfig& c, std::string_view v) { side(c).tx = to_double(prefix + ".tx", v); },
                  [=](const RunConfig& c) { return format_double(cside(c).tx); }});
  keys.push_back({prefix + ".ty", [=](RunConfig& c, std::string_view v) { side(c).ty = to_double(prefix + ".ty", v); },
                  [=](const RunConfig& c) { return format_double(cside(c).ty); }});
}

#define LC_NUM(KEY, FIELD)                                                                   \
  keys.push_back({KEY, [](RunConfig& c, std::string_view v) { c.FIELD = to_double(KEY, v); }, \
                  [](const RunConfig& c) { return format_double(c.FIELD); }})
#define LC_INT(KEY, FIELD)                                                                \
  keys.push_back({KEY, [](RunConfig& c, std::string_view v) { c.FIELD = to_int(KEY, v); }, \
                  [](const RunConfig& c) { return std::to_string(c.FIELD); }})
#define LC_BOOL(KEY, FIELD)                                                                \
  keys.push_back({KEY, [](RunConfig& c, std::string_view v) { c.FIELD = to_bool(KEY, v); }, \
                  [](const RunConfig& c) { return fmt_bool(c.FIELD); }})

const std::vector<KeyDef>& key_table() {
  static const std::vector<KeyDef> table = [] {
    std::vector<KeyDef> keys;
    // `experiment` is handled before the table is applied.
    keys.push_back({"experiment", [](RunConfig&, std::string_view) {},
                    [](const RunConfig& c) { return c.problem.experiment; }});

    keys.push_back({"mesh.rect",
                    [](RunConfig& c, std::string_view v) {
                      const auto x = to_doubles("mesh.rect", v);
                      if (x.size() != 4) bad_value("mesh.rect", "four numbers x0, y0, x1, y1", v);
                      c.problem.rect = {{x[0], x[1]}, {x[2], x[3]}};
                    },
                    [](const RunConfig& c) {
                      const Rect& r = c.problem.rect;
                      return join(std::vector<double>{r.lo.x, r.lo.y, r.hi.x, r.hi.y}, format_double);
                    }});
    LC_INT("mesh.nx", problem.nx);
    LC_INT("mesh.ny", problem.ny);
    keys.push_back({"mesh.diagonal",
                    [](RunConfig& c, std::string_view v) {
                      const auto d = diagonal_from_string(v);
                      if (!d) bad_value("mesh.diagonal", "a diagonal name", v);
                      c.problem.diagonal = *d;
                    },
                    [](const RunConfig& c) { return std::string(to_string(c.problem.diagonal)); }});
    LC_INT("mesh.levels", problem.levels);
    LC_INT("mesh.reference_level", problem.reference_level);

    keys.push_back({"geometry.levelsets",
                    [](RunConfig& c, std::string_view v) {
                      c.problem.levelsets.clear();
                      for (auto item : split(v, ';')) {
                        try {
                          c.problem.levelsets.push_back(LevelSetFunction::parse(item));
                        } catch (const Error& e) {
                          throw Error(ErrorKind::Parse, std::string("geometry.levelsets: ") + e.what());
                        }
                      }
                    },
                    [](const RunConfig& c) {
                      return join(c.problem.levelsets, [](const auto& f) { return f.to_string(); }, "; ");
                    }});
    keys.push_back({"geometry.grouping",
                    [](RunConfig& c, std::string_view v) { c.problem.grouping = to_ints("geometry.grouping", v); },
                    [](const RunConfig& c) {
                      return join(c.problem.grouping, [](int i) { return std::to_string(i); });
                    }});
    keys.push_back({"geometry.youngs",
                    [](RunConfig& c, std::string_view v) { c.problem.youngs = to_doubles("geometry.youngs", v); },
                    [](const RunConfig& c) { return join(c.problem.youngs, format_double); }});
    LC_NUM("geometry.nu", problem.nu);

    for (BoundaryTag tag : {BoundaryTag::Bottom, BoundaryTag::Right, BoundaryTag::Top, BoundaryTag::Left}) {
      const int k = side_index(tag);
      add_side_keys(
          keys, "bc." + std::string(to_string(tag)),
          [k](RunConfig& c) -> SideCondition& { return c.problem.sides[k]; },
          [k](const RunConfig& c) -> const SideCondition& { return c.problem.sides[k]; });
    }
    add_side_keys(
        keys, "bc.embedded", [](RunConfig& c) -> SideCondition& { return c.problem.embedded; },
        [](const RunConfig& c) -> const SideCondition& { return c.problem.embedded; });
    LC_NUM("bc.body_x", problem.body_force.x);
    LC_NUM("bc.body_y", problem.body_force.y);
    keys.push_back({"bc.method",
                    [](RunConfig& c, std::string_view v) { c.problem.dirichlet_method = to_method("bc.method", v); },
                    [](const RunConfig& c) { return std::string(to_string(c.problem.dirichlet_method)); }});
    LC_BOOL("bc.nitsche_symmetric", problem.nitsche_data_symmetry);

    LC_NUM("latin.k_plus", problem.latin.k_plus);
    LC_NUM("latin.k_minus", problem.latin.k_minus);
    LC_NUM("latin.eta", problem.latin.eta);
    LC_NUM("latin.gamma_g", problem.latin.gamma_g);
    LC_NUM("latin.gamma_pi", problem.latin.gamma_pi);
    LC_NUM("latin.alpha", problem.latin.alpha);
    LC_INT("latin.it_max", problem.latin.it_max);
    LC_INT("latin.quad_points", problem.latin.quad_points);
    LC_NUM("latin.normal_slope", problem.latin.normal_slope);
    keys.push_back({"latin.mode", [](RunConfig& c, std::string_view v) { c.problem.latin.mode = to_mode("latin.mode", v); },
                    [](const RunConfig& c) { return std::string(to_string(c.problem.latin.mode)); }});
    keys.push_back({"latin.law", [](RunConfig& c, std::string_view v) { c.problem.latin.law = to_law("latin.law", v); },
                    [](const RunConfig& c) { return std::string(to_string(c.problem.latin.law)); }});

    keys.push_back({"run.output_dir", [](RunConfig& c, std::string_view v) { c.output_dir = std::string(v); },
                    [](const RunConfig& c) { return c.output_dir; }});
    keys.push_back({"run.checkpoints",
                    [](RunConfig& c, std::string_view v) { c.checkpoints = to_ints("run.checkpoints", v); },
                    [](const RunConfig& c) { return join(c.checkpoints, [](int i) { return std::to_string(i); }); }});
    LC_INT("run.output_level", output_level);
    LC_BOOL("run.export_fields", export_fields);
    LC_BOOL("run.export_profiles", export_profiles);
    LC_BOOL("run.export_convergence", export_convergence);
    LC_BOOL("run.export_condition", export_condition);
    LC_BOOL("run.compare_p1p0", compare_p1p0);
    LC_INT("run.workers", workers);

    keys.push_back({"study.eps", [](RunConfig& c, std::string_view v) { c.sweep_eps = to_doubles("study.eps", v); },
                    [](const RunConfig& c) { return join(c.sweep_eps, format_double); }});
    keys.push_back({"study.gamma_g",
                    [](RunConfig& c, std::string_view v) { c.sweep_gamma_g = to_doubles("study.gamma_g", v); },
                    [](const RunConfig& c) { return join(c.sweep_gamma_g, format_double); }});
    keys.push_back({"study.case", [](RunConfig& c, std::string_view v) { c.sweep_case = std::string(v); },
                    [](const RunConfig& c) { return c.sweep_case; }});
    LC_NUM("study.eps_x", sweep_eps_x);
    LC_NUM("study.scaling_eps", scaling_eps);
    return keys;
  }();
  return table;
}

#undef LC_NUM
#undef LC_INT
#undef LC_BOOL

const KeyDef* find_key(std::string_view name) {
  for (const auto& k : key_table())
    if (k.name == name) return &k;
  return nullptr;
}

struct Line {
  int number = 0;
  std::string key;
  std::string value;
};

std::vector<Line> tokenize(std::string_view text) {
  std::vector<Line> out;
  std::set<std::string> seen;
  std::istringstream in{std::string(text)};
  std::string raw;
  int number = 0;
  while (std::getline(in, raw)) {
    ++number;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(number) + ": ";
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw Error(ErrorKind::Parse, where + "expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    if (key.empty()) throw Error(ErrorKind::Parse, where + "missing key before '='");
    if (!find_key(key)) throw Error(ErrorKind::Parse, where + "unknown key '" + key + "'");
    if (!seen.insert(key).second) throw Error(ErrorKind::Parse, where + "duplicate key '" + key + "'");
    out.push_back({number, key, std::string(trim(line.substr(eq + 1)))});
  }
  return out;
}

}  // namespace

void RunConfig::validate() const {
  auto require = [](bool ok, const std::string& message) {
    if (!ok) throw Error(ErrorKind::Validation, message);
  };
  problem.validate();
  require(!output_dir.empty(), "run.output_dir must not be empty");
  for (int c : checkpoints) require(c >= 1, "run.checkpoints must be positive iteration numbers");
  require(std::is_sorted(checkpoints.begin(), checkpoints.end()) &&
              std::adjacent_find(checkpoints.begin(), checkpoints.end()) == checkpoints.end(),
          "run.checkpoints must be strictly increasing");
  require(output_level >= 0 && output_level < problem.levels, "run.output_level must be a study level");
  require(workers >= 1 && workers <= 256, "run.workers must lie in [1, 256]");
  require(sweep_case == "i" || sweep_case == "ii", "study.case must be i or ii");
  for (double e : sweep_eps) require(e > 0.0 && e < 1.0, "study.eps values must lie in (0, 1)");
  for (double g : sweep_gamma_g) require(g >= 0.0 && std::isfinite(g), "study.gamma_g values must be non-negative");
  require(sweep_eps_x > 0.0 && sweep_eps_x < 1.0, "study.eps_x must lie in (0, 1)");
  require(scaling_eps > 0.0 && scaling_eps < 1.0, "study.scaling_eps must lie in (0, 1)");
  const bool crack = problem.experiment == "crack-condition" || problem.experiment == "crack-scaling";
  if (crack) {
    require(problem.rect == Rect{{0.0, 0.0}, {1.0, 1.0}}, "crack studies use the unit square");
    require(problem.nx == problem.ny && problem.nx % 3 == 0, "crack studies need mesh.nx = mesh.ny divisible by 3");
    require(problem.levelsets.size() == 3 && problem.grouping.empty(), "crack studies use three crack level sets");
  }
}

const std::vector<ExperimentInfo>& experiment_catalog() {
  static const std::vector<ExperimentInfo> catalog = {
      {"ellipse", "elliptical inclusion in unilateral contact: mesh convergence, iteration history, traction profiles"},
      {"two-inclusions", "two overlapping circular inclusions with a stiffness contrast: mesh convergence"},
      {"crack-condition", "condition number of the subdomain operators against cut offset and ghost penalty"},
      {"crack-scaling", "condition number of the subdomain operators against mesh size"},
  };
  return catalog;
}

RunConfig experiment_preset(std::string_view name) {
  RunConfig c;
  if (name == "ellipse") {
    c.problem = ellipse_case();
  } else if (name == "two-inclusions") {
    c.problem = two_inclusions_case(10.0);
  } else if (name == "crack-condition") {
    c.problem = crack_case(0.5, 0.25, 30, 0.1);
  } else if (name == "crack-scaling") {
    c.problem = crack_case(0.25, 0.25, 12, 0.1);
    c.problem.experiment = "crack-scaling";
    c.problem.levels = 4;
    c.problem.reference_level = 4;
  } else {
    throw Error(ErrorKind::Validation, "unknown experiment '" + std::string(name) + "'");
  }
  return c;
}

EnvLookup process_environment() {
  return [](const std::string& name) -> std::optional<std::string> {
    const char* v = std::getenv(name.c_str());
    if (!v) return std::nullopt;
    return std::string(v);
  };
}

std::string env_name(std::string_view key) {
  std::string out = "LATINCUT_";
  for (char ch : key) out += ch == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  return out;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& k : key_table()) out.push_back(k.name);
  return out;
}

RunConfig parse_config(std::string_view text, const EnvLookup& env) {
  const std::vector<Line> lines = tokenize(text);
  std::map<std::string, std::string> overrides;
  if (env) {
    for (const auto& k : key_table())
      if (auto v = env(env_name(k.name))) overrides[k.name] = std::string(trim(*v));
  }

  std::string experiment = "ellipse";
  for (const auto& l : lines)
    if (l.key == "experiment") experiment = l.value;
  if (auto it = overrides.find("experiment"); it != overrides.end()) experiment = it->second;
  RunConfig c = experiment_preset(experiment);

  for (const auto& l : lines) {
    if (l.key == "experiment") continue;
    try {
      find_key(l.key)->set(c, l.value);
    } catch (const Error& e) {
      throw Error(e.kind(), "line " + std::to_string(l.number) + ": " + e.what());
    }
  }
  for (const auto& [key, value] : overrides) {
    if (key == "experiment") continue;
    try {
      find_key(key)->set(c, value);
    } catch (const Error& e) {
      throw Error(e.kind(), "environment " + env_name(key) + ": " + e.what());
    }
  }
  c.validate();
  return c;
}

RunConfig load_config(const std::string& path, const EnvLookup& env) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Parse, "cannot read config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), env);
}

std::string to_config_text(const RunConfig& config) {
  std::string out;
  for (const auto& k : key_table()) out += k.name + " = " + k.get(config) + "\n";
  return out;
}

}  // namespace latincut
