#include "experiment_config.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "fpp/error.hpp"

namespace fpp::cli {

namespace {

enum class Kind {
  Integer,
  NonNegInt,
  PosInt,
  AtLeast2,
  Seed,
  Real,
  NonNegReal,
  PosReal,
  Probability,
  Boolean,
  String,
  Element,
  NonNegIntList,
  PosIntList,
  NonNegRealList,
};

struct KeySpec {
  const char* key;
  Kind kind;
  bool required;
};

const std::vector<KeySpec> kCommonKeys = {
    {"experiment", Kind::String, false}, {"seed", Kind::Seed, false},     {"workers", Kind::NonNegInt, false},
    {"out", Kind::String, false},        {"budget", Kind::PosInt, false},
    {"assert", Kind::Boolean, false},
};

const std::vector<KeySpec> kGroupKeys = {
    {"group", Kind::String, true},
    {"d", Kind::PosInt, false},
    {"degree", Kind::PosInt, false},
    {"left", Kind::String, false},
    {"right", Kind::String, false},
};

const std::vector<KeySpec> kDistributionKeys = {
    {"distribution", Kind::String, true}, {"a", Kind::NonNegReal, false},  {"b", Kind::NonNegReal, false},
    {"p", Kind::Probability, false},      {"shift", Kind::NonNegReal, false}, {"rate", Kind::PosReal, false},
    {"weight", Kind::PosReal, false},
};

struct ExperimentSchema {
  std::string name;
  std::vector<KeySpec> keys;
};

const std::vector<ExperimentSchema>& schemas() {
  static const std::vector<ExperimentSchema> s = {
      {"ball", {{"radius", Kind::NonNegInt, false}, {"horizon", Kind::NonNegReal, false}, {"origin", Kind::Element, false}}},
      {"distance", {{"x", Kind::Element, true}, {"y", Kind::Element, true}}},
      {"mean", {{"x", Kind::Element, true}, {"y", Kind::Element, true}, {"replicas", Kind::AtLeast2, true}}},
      {"tail",
       {{"x", Kind::Element, true},
        {"y", Kind::Element, true},
        {"replicas", Kind::AtLeast2, true},
        {"u_grid", Kind::NonNegRealList, false},
        {"u_max", Kind::PosReal, false},
        {"u_step", Kind::PosReal, false}}},
      {"variance-scan",
       {{"direction", Kind::Element, true}, {"n_grid", Kind::NonNegIntList, true}, {"replicas", Kind::AtLeast2, true}}},
      {"fluctuation-scan",
       {{"r_grid", Kind::PosIntList, true}, {"pairs", Kind::PosInt, true}, {"replicas", Kind::AtLeast2, true}}},
      {"midpoint",
       {{"x", Kind::Element, true},
        {"y", Kind::Element, true},
        {"lambda", Kind::Probability, true},
        {"replicas", Kind::AtLeast2, true}}},
      {"subdivision",
       {{"x", Kind::Element, true},
        {"y", Kind::Element, true},
        {"k", Kind::NonNegInt, true},
        {"replicas", Kind::AtLeast2, true},
        {"alpha0", Kind::PosReal, false}}},
      {"tree-search",
       {{"r", Kind::PosInt, true}, {"K", Kind::PosInt, true}, {"eps", Kind::NonNegReal, true}, {"max_scan", Kind::PosInt, false}}},
      {"shape-scan",
       {{"r", Kind::PosReal, true},
        {"n_grid", Kind::PosIntList, true},
        {"repeat", Kind::PosInt, false},
        {"emit_clouds", Kind::Boolean, false}}},
      {"l1-compare", {{"n", Kind::PosInt, true}}},
      {"gh-check",
       {{"n", Kind::PosInt, true}, {"eps", Kind::PosReal, true}, {"pairs", Kind::PosInt, true}, {"replicas", Kind::AtLeast2, true}}},
      {"direction",
       {{"direction", Kind::Element, true}, {"n_grid", Kind::PosIntList, true}, {"replicas", Kind::AtLeast2, true}}},
      {"mean-ratio", {{"pairs", Kind::PosInt, true}, {"radius", Kind::PosInt, false}}},
  };
  return s;
}

const ExperimentSchema* schema_for(const std::string& name) {
  for (const auto& s : schemas()) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

bool parse_i64(const Value& v, std::int64_t& out) {
  if (v.type != Value::Type::Integer) return false;
  try {
    std::size_t used = 0;
    out = std::stoll(v.text, &used);
    return used == v.text.size();
  } catch (...) {
    return false;
  }
}

bool parse_real(const Value& v, double& out) {
  if (!v.is_number()) return false;
  out = std::strtod(v.text.c_str(), nullptr);
  return std::isfinite(out);
}

std::string check_kind(const Value& v, Kind kind) {
  std::int64_t i = 0;
  double x = 0.0;
  switch (kind) {
    case Kind::Integer:
      return parse_i64(v, i) ? "" : "must be an integer";
    case Kind::NonNegInt:
      return parse_i64(v, i) && i >= 0 ? "" : "must be an integer >= 0";
    case Kind::PosInt:
      return parse_i64(v, i) && i >= 1 ? "" : "must be an integer >= 1";
    case Kind::AtLeast2:
      return parse_i64(v, i) && i >= 2 ? "" : "must be an integer >= 2";
    case Kind::Seed: {
      if (v.type != Value::Type::Integer || v.text.empty() || v.text[0] == '-') return "must be an unsigned 64-bit integer";
      try {
        std::size_t used = 0;
        std::stoull(v.text, &used);
        return used == v.text.size() ? "" : "must be an unsigned 64-bit integer";
      } catch (...) {
        return "must be an unsigned 64-bit integer";
      }
    }
    case Kind::Real:
      return parse_real(v, x) ? "" : "must be a finite number";
    case Kind::NonNegReal:
      return parse_real(v, x) && x >= 0.0 ? "" : "must be a number >= 0";
    case Kind::PosReal:
      return parse_real(v, x) && x > 0.0 ? "" : "must be a number > 0";
    case Kind::Probability:
      return parse_real(v, x) && x >= 0.0 && x <= 1.0 ? "" : "must be a number in [0, 1]";
    case Kind::Boolean:
      return v.type == Value::Type::Boolean ? "" : "must be true or false";
    case Kind::String:
      return v.type == Value::Type::String ? "" : "must be a string";
    case Kind::Element:
      return "";  // checked against the group later
    case Kind::NonNegIntList:
    case Kind::PosIntList: {
      if (v.type != Value::Type::List || v.items.empty()) return "must be a non-empty list of integers";
      for (const auto& item : v.items) {
        if (!parse_i64(item, i)) return "must be a non-empty list of integers";
        if (kind == Kind::PosIntList && i < 1) return "entries must be >= 1";
        if (kind == Kind::NonNegIntList && i < 0) return "entries must be >= 0";
      }
      return "";
    }
    case Kind::NonNegRealList: {
      if (v.type != Value::Type::List || v.items.empty()) return "must be a non-empty list of numbers";
      for (const auto& item : v.items) {
        if (!parse_real(item, x) || x < 0.0) return "entries must be numbers >= 0";
      }
      return "";
    }
  }
  return "";
}

std::uint64_t parse_u64(const Value& v) { return std::stoull(v.text); }

int degree_of_letter(const Value& v) {
  std::int64_t i = 0;
  if (!parse_i64(v, i)) throw InvalidArgument("tree letters must be integers");
  return static_cast<int>(i);
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& s : schemas()) out.push_back(s.name);
    return out;
  }();
  return names;
}

std::string Violation::message() const {
  std::ostringstream os;
  if (line > 0) os << "line " << line << ": ";
  os << key << ": " << rule;
  return os.str();
}

Element element_from_value(const GroupSpec& group, const Value& value) {
  std::int64_t i = 0;
  switch (group.kind()) {
    case GroupKind::IntegerLattice: {
      std::vector<std::int64_t> coords;
      if (parse_i64(value, i)) {
        coords.push_back(i);
      } else if (value.type == Value::Type::List) {
        for (const auto& item : value.items) {
          if (!parse_i64(item, i)) throw InvalidArgument("lattice coordinates must be integers");
          coords.push_back(i);
        }
      } else {
        throw InvalidArgument("lattice element must be an integer or a list of integers");
      }
      if (static_cast<int>(coords.size()) != group.parameter()) {
        throw InvalidArgument("lattice element needs " + std::to_string(group.parameter()) + " coordinates");
      }
      return lattice_point(coords);
    }
    case GroupKind::Heisenberg: {
      if (value.type != Value::Type::List || value.items.size() != 3) {
        throw InvalidArgument("Heisenberg element must be a list [u, v, w]");
      }
      std::int64_t c[3];
      for (int k = 0; k < 3; ++k) {
        if (!parse_i64(value.items[static_cast<std::size_t>(k)], c[k])) {
          throw InvalidArgument("Heisenberg coordinates must be integers");
        }
      }
      return heisenberg_element(c[0], c[1], c[2]);
    }
    case GroupKind::RegularTree: {
      std::vector<int> letters;
      if (value.type == Value::Type::List) {
        for (const auto& item : value.items) letters.push_back(degree_of_letter(item));
      } else if (value.type == Value::Type::String || value.type == Value::Type::Integer ||
                 value.type == Value::Type::Real) {
        if (value.text != "e") {
          std::string part;
          std::istringstream is(value.text);
          while (std::getline(is, part, '.')) {
            if (part.empty() || !std::all_of(part.begin(), part.end(), ::isdigit)) {
              throw InvalidArgument("tree word must look like \"0.2.1\" or \"e\"");
            }
            letters.push_back(std::stoi(part));
          }
        }
      } else {
        throw InvalidArgument("tree element must be a letter list or a dotted word");
      }
      for (int l : letters) {
        if (l < 0 || l >= group.parameter()) {
          throw InvalidArgument("tree letters must lie in [0, " + std::to_string(group.parameter()) + ")");
        }
      }
      return tree_word(letters);
    }
    case GroupKind::Product: {
      if (value.type != Value::Type::List || value.items.size() != 2) {
        throw InvalidArgument("product element must be a list [left, right]");
      }
      return product_element(element_from_value(group.left(), value.items[0]),
                             element_from_value(group.right(), value.items[1]));
    }
  }
  throw InvalidArgument("unsupported group");
}

std::int64_t ExperimentConfig::integer(const std::string& key, std::int64_t fallback) const {
  const Entry* e = raw.find(key);
  if (!e) return fallback;
  return std::stoll(e->value.text);
}

double ExperimentConfig::real(const std::string& key, double fallback) const {
  const Entry* e = raw.find(key);
  if (!e) return fallback;
  return std::strtod(e->value.text.c_str(), nullptr);
}

bool ExperimentConfig::boolean(const std::string& key, bool fallback) const {
  const Entry* e = raw.find(key);
  return e ? e->value.boolean : fallback;
}

Element ExperimentConfig::element(const std::string& key) const {
  return element_from_value(*group, raw.find(key)->value);
}

std::vector<std::int64_t> ExperimentConfig::integers(const std::string& key) const {
  std::vector<std::int64_t> out;
  for (const auto& item : raw.find(key)->value.items) out.push_back(std::stoll(item.text));
  return out;
}

std::vector<double> ExperimentConfig::reals(const std::string& key) const {
  std::vector<double> out;
  for (const auto& item : raw.find(key)->value.items) out.push_back(std::strtod(item.text.c_str(), nullptr));
  return out;
}

namespace {

class Validator {
 public:
  Validator(RawConfig raw, const std::optional<std::string>& experiment) {
    result_.config.raw = std::move(raw);
    cfg_ = &result_.config;
    resolve_experiment(experiment);
  }

  Validation run() {
    if (!schema_) return std::move(result_);
    check_keys();
    const bool keys_ok = result_.ok();
    // A malformed experiment key does not hide environment violations.
    if (!keys_ok && !environment_keys_ok()) return std::move(result_);
    fill_common();
    build_group();
    if (cfg_->group) build_distribution();
    if (keys_ok && cfg_->group && cfg_->distribution) check_experiment();
    return std::move(result_);
  }

 private:
  void violate(const std::string& key, const std::string& rule) {
    const Entry* e = cfg_->raw.find(key);
    result_.violations.push_back({key, rule, e ? e->line : 0});
  }

  void resolve_experiment(const std::optional<std::string>& override_name) {
    const Entry* e = cfg_->raw.find("experiment");
    std::string name;
    if (override_name) {
      name = *override_name;
      if (e && e->value.text != name) {
        violate("experiment", "config names experiment '" + e->value.text + "' but '" + name + "' was requested");
      }
    } else if (e) {
      name = e->value.text;
    } else {
      violate("experiment", "missing required key (one of: ball, distance, mean, ...)");
      return;
    }
    schema_ = schema_for(name);
    if (!schema_) {
      std::string known;
      for (const auto& n : experiment_names()) known += (known.empty() ? "" : ", ") + n;
      violate("experiment", "unknown experiment '" + name + "'; expected one of " + known);
      return;
    }
    cfg_->experiment = name;
  }

  bool environment_keys_ok() const {
    for (const auto& v : result_.violations) {
      if (v.key == "seed" || v.key == "workers" || v.key == "budget" || v.key == "out") return false;
      for (const auto* table : {&kGroupKeys, &kDistributionKeys}) {
        for (const auto& k : *table) {
          if (v.key == k.key) return false;
        }
      }
    }
    return true;
  }

  const KeySpec* spec_of(const std::string& key) const {
    for (const auto* table : {&kCommonKeys, &kGroupKeys, &kDistributionKeys, &schema_->keys}) {
      for (const auto& k : *table) {
        if (key == k.key) return &k;
      }
    }
    return nullptr;
  }

  void check_keys() {
    for (const auto& [key, entry] : cfg_->raw.entries()) {
      const KeySpec* spec = spec_of(key);
      if (!spec) {
        violate(key, "unknown key for experiment '" + cfg_->experiment + "'");
        continue;
      }
      const std::string problem = check_kind(entry.value, spec->kind);
      if (!problem.empty()) violate(key, problem);
    }
    for (const auto* table : {&kCommonKeys, &kGroupKeys, &kDistributionKeys, &schema_->keys}) {
      for (const auto& k : *table) {
        if (k.required && !cfg_->raw.find(k.key)) violate(k.key, "missing required key");
      }
    }
  }

  void fill_common() {
    if (const Entry* e = cfg_->raw.find("seed")) cfg_->seed = parse_u64(e->value);
    cfg_->workers = static_cast<unsigned>(cfg_->integer("workers", 1));
    if (const Entry* e = cfg_->raw.find("out")) {
      cfg_->out = e->value.text;
    } else {
      cfg_->out = "fpp-" + cfg_->experiment;
    }
    if (cfg_->has("budget")) cfg_->limits.settled_budget = static_cast<std::size_t>(cfg_->integer("budget"));
  }

  void forbid(const std::string& key, const std::string& why) {
    if (cfg_->has(key)) violate(key, why);
  }

  void build_group() {
    const std::string g = cfg_->raw.find("group")->value.text;
    try {
      if (g == "z" || g == "lattice") {
        if (!cfg_->has("d")) return violate("d", "missing required key for group " + g);
        cfg_->group = GroupSpec::lattice(static_cast<int>(cfg_->integer("d")));
      } else if (g == "heisenberg") {
        cfg_->group = GroupSpec::heisenberg();
      } else if (g == "tree") {
        if (!cfg_->has("degree")) return violate("degree", "missing required key for group tree");
        if (cfg_->integer("degree") < 3) return violate("degree", "tree degree must be >= 3");
        cfg_->group = GroupSpec::tree(static_cast<int>(cfg_->integer("degree")));
      } else if (g == "product") {
        if (!cfg_->has("left")) violate("left", "missing required key for group product");
        if (!cfg_->has("right")) violate("right", "missing required key for group product");
        if (!cfg_->has("left") || !cfg_->has("right")) return;
        cfg_->group = GroupSpec::product(GroupSpec::parse(cfg_->raw.find("left")->value.text),
                                         GroupSpec::parse(cfg_->raw.find("right")->value.text));
      } else {
        cfg_->group = GroupSpec::parse(g);
      }
    } catch (const Error& e) {
      violate("group", e.what());
      return;
    }
    if (g != "z" && g != "lattice") forbid("d", "applies only to group z");
    if (g != "tree") forbid("degree", "applies only to group tree");
    if (g != "product") {
      forbid("left", "applies only to group product");
      forbid("right", "applies only to group product");
    }
  }

  double need_real(const std::string& key, const std::string& dist) {
    if (!cfg_->has(key)) {
      violate(key, "missing required key for distribution " + dist);
      ok_ = false;
      return 0.0;
    }
    return cfg_->real(key);
  }

  void build_distribution() {
    const std::string d = cfg_->raw.find("distribution")->value.text;
    ok_ = true;
    const std::size_t before = result_.violations.size();
    std::set<std::string> used;
    std::optional<DistributionSpec> spec;
    if (d == "two-point") {
      used = {"a", "b", "p"};
      const double a = need_real("a", d);
      const double b = need_real("b", d);
      const double p = need_real("p", d);
      if (ok_) {
        if (a > b) violate("b", "must satisfy a <= b");
        spec = DistributionSpec::two_point(a, b, p);
      }
    } else if (d == "uniform") {
      used = {"a", "b"};
      const double a = need_real("a", d);
      const double b = need_real("b", d);
      if (ok_) {
        if (a > b) violate("b", "must satisfy a <= b");
        spec = DistributionSpec::uniform(a, b);
      }
    } else if (d == "shifted-exponential") {
      used = {"shift", "rate"};
      const double shift = need_real("shift", d);
      const double rate = need_real("rate", d);
      if (ok_) spec = DistributionSpec::shifted_exponential(shift, rate);
    } else if (d == "deterministic") {
      used = {"weight"};
      const double w = need_real("weight", d);
      if (ok_) spec = DistributionSpec::deterministic(w);
    } else {
      violate("distribution", "unknown distribution '" + d +
                                  "'; expected two-point, uniform, shifted-exponential or deterministic");
      return;
    }
    for (const char* k : {"a", "b", "p", "shift", "rate", "weight"}) {
      if (!used.count(k)) forbid(k, "does not apply to distribution " + d);
    }
    if (!spec || result_.violations.size() != before) return;
    const DistributionCheck check = validate_distribution(*spec, cfg_->group->degree());
    if (!check.ok) {
      violate("distribution", check.message);
      return;
    }
    cfg_->distribution = spec;
  }

  void check_element(const std::string& key) {
    if (!cfg_->has(key)) return;
    try {
      (void)cfg_->element(key);
    } catch (const Error& e) {
      violate(key, e.what());
    }
  }

  void require_kind(std::initializer_list<GroupKind> kinds, const std::string& what) {
    if (std::find(kinds.begin(), kinds.end(), cfg_->group->kind()) == kinds.end()) {
      violate("group", "experiment '" + cfg_->experiment + "' needs " + what + ", got " + cfg_->group->name());
    }
  }

  void check_experiment() {
    for (const auto& k : schema_->keys) {
      if (k.kind == Kind::Element) check_element(k.key);
    }
    const std::string& x = cfg_->experiment;
    const DistributionSpec& dist = *cfg_->distribution;
    if (x == "ball") {
      if (cfg_->has("radius") == cfg_->has("horizon")) violate("radius", "exactly one of radius or horizon is required");
    } else if (x == "tail") {
      if (!cfg_->has("u_grid") && !(cfg_->has("u_max") && cfg_->has("u_step"))) {
        violate("u_grid", "give u_grid, or both u_max and u_step");
      }
      if (cfg_->has("u_grid") && (cfg_->has("u_max") || cfg_->has("u_step"))) {
        violate("u_grid", "u_grid excludes u_max and u_step");
      }
    } else if (x == "variance-scan") {
      if (dist.kind() != DistributionKind::TwoPoint || dist.p_a() != 0.5) {
        violate("distribution", "nu({a}) = nu({b}) = 1/2 required: variance-scan needs two-point with p = 0.5");
      }
    } else if (x == "fluctuation-scan" || x == "gh-check") {
      require_kind({GroupKind::IntegerLattice, GroupKind::Heisenberg}, "a group of polynomial growth (z or heisenberg)");
    } else if (x == "subdivision") {
      if (cfg_->integer("k") > 20) violate("k", "must be <= 20");
    } else if (x == "tree-search") {
      require_kind({GroupKind::RegularTree}, "group tree");
      if (!dist.bounded()) violate("distribution", "tree-search needs bounded support");
      if (cfg_->real("eps") == 0.0 && !(dist.atom(dist.support_min()) > 0.0)) {
        violate("eps", "nu({a}) > 0 required when eps = 0");
      }
      if (cfg_->has("r") && cfg_->has("K") && cfg_->integer("r") / cfg_->integer("K") < 1) {
        violate("K", "segment length floor(r/K) must be >= 1");
      }
    } else if (x == "shape-scan") {
      require_kind({GroupKind::IntegerLattice, GroupKind::Heisenberg}, "group z or heisenberg");
      const auto grid = cfg_->integers("n_grid");
      for (std::size_t i = 1; i < grid.size(); ++i) {
        if (grid[i] <= grid[i - 1]) {
          violate("n_grid", "must be strictly increasing");
          break;
        }
      }
    } else if (x == "l1-compare") {
      require_kind({GroupKind::IntegerLattice}, "group z");
      if (!dist.is_deterministic() || dist.kind() != DistributionKind::TwoPoint) {
        violate("distribution", "l1-compare needs distribution = deterministic");
      }
    } else if (x == "direction") {
      if (cfg_->has("direction")) {
        try {
          if (cfg_->element("direction") == cfg_->group->identity()) violate("direction", "must not be the identity");
        } catch (const Error&) {
        }
      }
    } else if (x == "mean-ratio") {
      require_kind({GroupKind::RegularTree}, "group tree");
      const double a = dist.support_min();
      const double atom = dist.atom(a);
      const double inv = 1.0 / cfg_->group->degree();
      if (!(atom < inv)) {
        std::ostringstream os;
        os << "nu({a}) >= 1/q: nu({" << a << "}) = " << atom << " >= 1/" << cfg_->group->degree() << " = " << inv;
        violate("distribution", os.str());
      }
    }
  }

  Validation result_;
  ExperimentConfig* cfg_;
  const ExperimentSchema* schema_ = nullptr;
  bool ok_ = true;
};

}  // namespace

Validation validate_config(RawConfig raw, const std::optional<std::string>& experiment) {
  return Validator(std::move(raw), experiment).run();
}

}  // namespace fpp::cli
