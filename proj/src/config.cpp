#include "sublab/config.hpp"

#include "sublab/error.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace sublab::config {

namespace pt = boost::property_tree;

namespace {

constexpr const char* kPresentKey = "__section_present__";

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string unquote(std::string s) {
  s = trim(std::move(s));
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string> split(const std::string& s, char sep = ',') {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(unquote(item));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

class Section {
 public:
  Section(std::string name, const pt::ptree& tree) : name_(std::move(name)) {
    for (const auto& [k, v] : tree) {
      if (k == kPresentKey) continue;
      if (!v.empty()) throw ConfigError("nested key '" + k + "' in section [" + name_ + "]");
      values_[k] = trim(v.data());
    }
  }

  [[nodiscard]] bool has(const std::string& key) const { return values_.count(key) != 0; }

  std::string str(const std::string& key, const std::string& fallback) {
    used_.insert(key);
    auto it = values_.find(key);
    return it == values_.end() ? fallback : unquote(it->second);
  }

  /// Comma-separated items, each optionally quoted.
  std::vector<std::string> items(const std::string& key) {
    used_.insert(key);
    auto it = values_.find(key);
    return it == values_.end() ? std::vector<std::string>{} : split(it->second);
  }

  template <class T>
  T num(const std::string& key, T fallback) {
    used_.insert(key);
    auto it = values_.find(key);
    return it == values_.end() ? fallback : convert<T>(key, unquote(it->second));
  }

  template <class T>
  std::vector<T> list(const std::string& key, std::vector<T> fallback) {
    used_.insert(key);
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::vector<T> out;
    for (const auto& item : split(it->second)) out.push_back(convert<T>(key, item));
    return out;
  }

  [[nodiscard]] std::vector<std::string> keys_with_prefix(const std::string& prefix) const {
    std::vector<std::string> out;
    for (const auto& kv : values_) {
      if (kv.first.rfind(prefix, 0) == 0) out.push_back(kv.first);
    }
    return out;
  }

  void finish() const {
    for (const auto& kv : values_) {
      if (!used_.count(kv.first)) throw ConfigError("unknown key '" + kv.first + "' in section [" + name_ + "]");
    }
  }

  [[nodiscard]] const std::string& name() const noexcept { return name_; }

 private:
  template <class T>
  T convert(const std::string& key, const std::string& text) const {
    const std::string t = trim(text);
    std::istringstream in(t);
    T value{};
    if constexpr (std::is_same_v<T, bool>) {
      if (t == "true" || t == "1" || t == "yes") return true;
      if (t == "false" || t == "0" || t == "no") return false;
      throw ConfigError("[" + name_ + "] " + key + ": expected a boolean, got '" + t + "'");
    } else {
      in >> value;
      if (in.fail() || !in.eof()) {
        throw ConfigError("[" + name_ + "] " + key + ": cannot read '" + t + "' as a number");
      }
    }
    return value;
  }

  std::string name_;
  std::map<std::string, std::string> values_;
  std::set<std::string> used_;
};

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

bool power_of_two(int n) { return n >= 4 && (n & (n - 1)) == 0; }

void check_grids(const std::vector<int>& grids, const std::string& where) {
  require(!grids.empty(), where + ": grid list is empty");
  for (std::size_t i = 0; i < grids.size(); ++i) {
    require(power_of_two(grids[i]), where + ": grid sizes must be powers of two >= 4");
    if (i) require(grids[i] > grids[i - 1], where + ": grids must be ascending");
  }
}

void check_gamma(double g, const std::string& where) {
  require(g > 0.0 && g <= 1.0, where + ": gamma values must lie in (0,1]");
}

void check_jobs(int jobs) { require(jobs >= 0, "[run] jobs must be >= 0"); }

}  // namespace

vecfield::FieldSystem RunConfig::field_system() const {
  if (system.fields.empty()) throw ConfigError("config has no [system] fields");
  std::vector<vecfield::VectorField> fields;
  for (const auto& coeffs : system.fields) fields.push_back(vecfield::VectorField::parse(coeffs, system.dimension));
  return vecfield::FieldSystem(system.dimension, std::move(fields), system.domain);
}

RunConfig parse_config(const std::string& text) {
  // accept '#' comments as well as ';'
  std::string cleaned;
  std::istringstream lines(text);
  for (std::string line; std::getline(lines, line);) {
    const std::string t = trim(line);
    if (!t.empty() && t[0] == '#') continue;
    cleaned += line + "\n";
    // read_ini drops sections without keys
    if (!t.empty() && t[0] == '[') cleaned += std::string(kPresentKey) + " = 1\n";
  }
  pt::ptree tree;
  try {
    std::istringstream in(cleaned);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.message() + " (line " + std::to_string(e.line()) + ")");
  }

  RunConfig cfg;
  static const std::set<std::string> known = {"system",  "hormander",  "bch",    "flow",        "holder",     "subell",
                                              "identities", "jacobi", "improvement", "commutators", "run"};
  for (const auto& [name, child] : tree) {
    if (child.empty() && !child.data().empty()) throw ConfigError("key '" + name + "' outside of any section");
    require(known.count(name) != 0, "unknown section [" + name + "]");
  }
  auto section = [&](const char* name) -> std::optional<Section> {
    auto it = tree.find(name);
    if (it == tree.not_found()) return std::nullopt;
    return Section(name, it->second);
  };

  if (auto s = section("system")) {
    cfg.system.id = s->str("id", "system");
    cfg.system.dimension = s->num<int>("dimension", 0);
    require(cfg.system.dimension >= 1 && cfg.system.dimension <= 3, "[system] dimension must be 1, 2 or 3");
    auto keys = s->keys_with_prefix("field");
    std::vector<std::pair<int, std::string>> numbered;
    for (const auto& k : keys) {
      const std::string digits = k.substr(5);
      require(!digits.empty() && std::all_of(digits.begin(), digits.end(), ::isdigit),
              "[system] field keys are field1, field2, ...; got '" + k + "'");
      numbered.emplace_back(std::stoi(digits), k);
    }
    std::sort(numbered.begin(), numbered.end());
    for (std::size_t i = 0; i < numbered.size(); ++i) {
      require(numbered[i].first == static_cast<int>(i) + 1, "[system] fields must be numbered 1..N without gaps");
      auto coeffs = s->items(numbered[i].second);
      require(static_cast<int>(coeffs.size()) == cfg.system.dimension,
              "[system] " + numbered[i].second + " needs " + std::to_string(cfg.system.dimension) + " coefficients");
      cfg.system.fields.push_back(std::move(coeffs));
    }
    require(!cfg.system.fields.empty(), "[system] needs at least one field");
    const std::string domain = s->str("domain", "torus");
    require(domain == "torus" || domain == "box", "[system] domain must be torus or box");
    cfg.system.domain.kind = domain == "box" ? vecfield::DomainKind::box : vecfield::DomainKind::torus;
    cfg.system.domain.bound = s->num<double>("bound", cfg.system.domain.bound);
    require(cfg.system.domain.bound > 0.0, "[system] bound must be positive");
    s->finish();
  }

  if (auto s = section("hormander")) {
    HormanderSection h;
    h.r_max = s->num("r_max", h.r_max);
    h.grid = s->num("grid", h.grid);
    h.box_samples = s->num("box_samples", h.box_samples);
    h.sigma_tol = s->num("sigma_tol", h.sigma_tol);
    require(h.r_max >= 1 && h.r_max <= 6, "[hormander] r_max must lie in [1,6]");
    require(h.grid >= 2, "[hormander] grid must be >= 2");
    require(h.box_samples >= 1, "[hormander] box_samples must be >= 1");
    require(h.sigma_tol > 0.0, "[hormander] sigma_tol must be positive");
    s->finish();
    cfg.hormander = h;
  }

  if (auto s = section("bch")) {
    BchSection b;
    b.order = s->num("order", b.order);
    b.y1 = s->num("y1", b.y1);
    b.y2 = s->num("y2", b.y2);
    b.point = s->list<double>("point", {});
    b.t_min = s->num("t_min", b.t_min);
    b.t_max = s->num("t_max", b.t_max);
    b.t_count = s->num("t_count", b.t_count);
    b.tol = s->num("tol", b.tol);
    require(b.order >= 2, "[bch] order must be >= 2");
    require(b.t_min > 0.0 && b.t_max >= b.t_min && b.t_count >= 2, "[bch] need 0 < t_min <= t_max and t_count >= 2");
    require(b.tol > 0.0, "[bch] tol must be positive");
    s->finish();
    cfg.bch = b;
  }

  if (auto s = section("flow")) {
    FlowSection f;
    f.field = s->num("field", f.field);
    f.point = s->list<double>("point", {});
    f.s = s->num("s", f.s);
    f.t = s->num("t", f.t);
    f.tol = s->num("tol", f.tol);
    f.group_factor = s->num("group_factor", f.group_factor);
    f.taylor_order = s->num("taylor_order", f.taylor_order);
    f.taylor_phi = s->str("taylor_phi", f.taylor_phi);
    require(f.tol > 0.0, "[flow] tol must be positive");
    require(f.taylor_order >= 0 && f.taylor_order <= 8, "[flow] taylor_order must lie in [0,8]");
    s->finish();
    cfg.flow = f;
  }

  if (auto s = section("holder")) {
    HolderSection h;
    h.grids = s->list<int>("grids", h.grids);
    h.gamma = s->num("gamma", h.gamma);
    if (s->has("order")) h.order = s->num<int>("order", 0);
    h.test_functions = s->num("test_functions", h.test_functions);
    h.max_freq = s->num("max_freq", h.max_freq);
    h.t_per_sign = s->num("t_per_sign", h.t_per_sign);
    h.interpolation = s->str("interpolation", h.interpolation);
    h.field = s->num("field", h.field);
    h.psi = s->str("psi", h.psi);
    h.ratio_limit = s->num("ratio_limit", h.ratio_limit);
    check_grids(h.grids, "[holder]");
    check_gamma(h.gamma, "[holder]");
    require(!h.order || *h.order >= 1, "[holder] order must be >= 1");
    require(h.test_functions >= 1, "[holder] test_functions must be >= 1");
    require(h.max_freq >= 0 && 2 * h.max_freq < h.grids.front(), "[holder] max_freq must be below n/2");
    require(h.t_per_sign >= 1, "[holder] t_per_sign must be >= 1");
    require(h.interpolation == "trigonometric" || h.interpolation == "cubic",
            "[holder] interpolation must be trigonometric or cubic");
    s->finish();
    cfg.holder = h;
  }

  if (auto s = section("subell")) {
    SubellSection sb;
    sb.grids = s->list<int>("grids", sb.grids);
    sb.gammas = s->list<double>("gammas", sb.gammas);
    sb.alphas = s->list<double>("alphas", sb.alphas);
    sb.bounded = s->num("bounded_threshold", sb.bounded);
    sb.growing = s->num("growing_threshold", sb.growing);
    sb.dense_cap = s->num("dense_cap", sb.dense_cap);
    sb.lanczos_tol = s->num("lanczos_tol", sb.lanczos_tol);
    sb.rank_tolerance = s->num("rank_tolerance", sb.rank_tolerance);
    sb.r_max = s->num("r_max", sb.r_max);
    check_grids(sb.grids, "[subell]");
    require(!sb.gammas.empty(), "[subell] gammas is empty");
    for (double g : sb.gammas) check_gamma(g, "[subell]");
    require(!sb.alphas.empty(), "[subell] alphas is empty");
    for (double a : sb.alphas) require(a >= 0.0, "[subell] alpha values must be >= 0");
    require(sb.bounded > 0.0 && sb.growing > 0.0, "[subell] thresholds must be positive");
    require(sb.bounded <= sb.growing, "[subell] bounded_threshold exceeds growing_threshold");
    require(sb.lanczos_tol > 0.0, "[subell] lanczos_tol must be positive");
    require(sb.r_max >= 1 && sb.r_max <= 6, "[subell] r_max must lie in [1,6]");
    s->finish();
    cfg.subell = sb;
  }

  if (auto s = section("identities")) {
    IdentitiesSection i;
    i.pairs = s->num("pairs", i.pairs);
    i.size = s->num("size", i.size);
    i.tol = s->num("tol", i.tol);
    require(i.pairs >= 1 && i.size >= 1, "[identities] pairs and size must be >= 1");
    s->finish();
    cfg.identities = i;
  }

  if (auto s = section("jacobi")) {
    JacobiSection j;
    j.fields = s->num("fields", j.fields);
    j.points = s->num("points", j.points);
    j.max_freq = s->num("max_freq", j.max_freq);
    j.tol = s->num("tol", j.tol);
    require(j.fields >= 3 && j.points >= 1, "[jacobi] need fields >= 3 and points >= 1");
    s->finish();
    cfg.jacobi = j;
  }

  if (auto s = section("improvement")) {
    ImprovementSection i;
    i.probes = s->num("probes", i.probes);
    i.size = s->num("size", i.size);
    i.grid = s->num("grid", i.grid);
    i.t = s->num("t", i.t);
    i.r = s->num("r", i.r);
    i.eps = s->num("eps", i.eps);
    require(i.probes >= 1 && i.size >= 2, "[improvement] probes >= 1 and size >= 2");
    require(power_of_two(i.grid), "[improvement] grid must be a power of two >= 4");
    require(i.t > 0.0 && i.r >= 1, "[improvement] need t > 0 and r >= 1");
    require(i.eps >= 0.0 && i.eps < 1.0, "[improvement] eps must lie in [0,1)");
    s->finish();
    cfg.improvement = i;
  }

  if (auto s = section("commutators")) {
    CommutatorsSection c;
    c.grids = s->list<int>("grids", c.grids);
    c.m = s->num("m", c.m);
    c.rho = s->num("rho", c.rho);
    c.delta = s->num("delta", c.delta);
    c.t_list = s->list<double>("t_list", {});
    c.ratio_limit = s->num("ratio_limit", c.ratio_limit);
    c.control_tol = s->num("control_tol", c.control_tol);
    check_grids(c.grids, "[commutators]");
    require(c.m >= 1 && c.m <= 3, "[commutators] m must lie in [1,3]");
    if (c.t_list.empty()) {
      for (int k = -10; k <= 0; ++k) c.t_list.push_back(std::ldexp(1.0, k));
    }
    for (double t : c.t_list) require(t > 0.0 && t <= 10.0, "[commutators] t_list must lie in (0,10]");
    s->finish();
    cfg.commutators = c;
  }

  if (auto s = section("run")) {
    cfg.run.seed = s->num<std::uint64_t>("seed", 0);
    cfg.run.jobs = s->num("jobs", cfg.run.jobs);
    cfg.run.out = s->str("out", cfg.run.out);
    cfg.run.format = s->str("format", cfg.run.format);
    check_jobs(cfg.run.jobs);
    require(cfg.run.format == "json" || cfg.run.format == "csv", "[run] format must be json or csv");
    s->finish();
  }

  // expressions are validated eagerly so malformed input fails at load time
  if (!cfg.system.fields.empty()) {
    (void)cfg.field_system();
    const int n = static_cast<int>(cfg.system.fields.size());
    if (cfg.bch) {
      require(cfg.bch->y1 >= 1 && cfg.bch->y1 <= n && cfg.bch->y2 >= 1 && cfg.bch->y2 <= n,
              "[bch] y1/y2 must name fields of the system");
      require(cfg.bch->point.empty() || static_cast<int>(cfg.bch->point.size()) == cfg.system.dimension,
              "[bch] point dimension mismatch");
    }
    if (cfg.flow) {
      require(cfg.flow->field >= 1 && cfg.flow->field <= n, "[flow] field must name a field of the system");
      require(cfg.flow->point.empty() || static_cast<int>(cfg.flow->point.size()) == cfg.system.dimension,
              "[flow] point dimension mismatch");
      (void)symexpr::parse(cfg.flow->taylor_phi, cfg.system.dimension);
    }
    if (cfg.holder) {
      require(cfg.holder->field >= 1 && cfg.holder->field <= n, "[holder] field must name a field of the system");
      (void)symexpr::parse(cfg.holder->psi, cfg.system.dimension);
    }
  } else {
    for (bool needs : {cfg.hormander.has_value(), cfg.bch.has_value(), cfg.flow.has_value(), cfg.holder.has_value(),
                       cfg.subell.has_value(), cfg.commutators.has_value()}) {
      require(!needs, "this config needs a [system] section");
    }
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace sublab::config
