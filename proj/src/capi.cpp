#include "sublab/sublab.h"

#include "sublab/commands.hpp"
#include "sublab/error.hpp"
#include "sublab/symexpr.hpp"
#include "sublab/vecfield.hpp"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

struct sublab_config {
  sublab::config::RunConfig cfg;
};

struct sublab_result {
  sublab::commands::CommandResult res;
  std::string json;
  std::vector<std::string> csv;
};

namespace {

thread_local std::string last_error;

sublab_status status_for(const sublab::Error& e) {
  using sublab::ErrorKind;
  switch (e.kind()) {
    case ErrorKind::invalid_argument: return SUBLAB_E_INVALID_ARGUMENT;
    case ErrorKind::parse: return SUBLAB_E_PARSE;
    case ErrorKind::range: return SUBLAB_E_RANGE;
    case ErrorKind::dimension: return SUBLAB_E_DIMENSION;
    case ErrorKind::cap_exceeded: return SUBLAB_E_CAP;
    case ErrorKind::numerical: return SUBLAB_E_NUMERICAL;
    case ErrorKind::config: return SUBLAB_E_CONFIG;
    case ErrorKind::io: return SUBLAB_E_IO;
  }
  return SUBLAB_E_INTERNAL;
}

template <class F>
sublab_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return SUBLAB_OK;
  } catch (const sublab::Error& e) {
    last_error = e.what();
    return status_for(e);
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return SUBLAB_E_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return SUBLAB_E_INTERNAL;
  }
}

sublab_status null_argument(const char* what) {
  last_error = std::string("null argument: ") + what;
  return SUBLAB_E_INVALID_ARGUMENT;
}

char* copy_string(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

}  // namespace

extern "C" {

const char* sublab_version(void) { return "1.0.0"; }

const char* sublab_last_error(void) { return last_error.c_str(); }

const char* sublab_status_name(sublab_status status) {
  switch (status) {
    case SUBLAB_OK: return "ok";
    case SUBLAB_E_INVALID_ARGUMENT: return "invalid_argument";
    case SUBLAB_E_PARSE: return "parse_error";
    case SUBLAB_E_RANGE: return "range_error";
    case SUBLAB_E_DIMENSION: return "dimension_error";
    case SUBLAB_E_CAP: return "cap_exceeded";
    case SUBLAB_E_NUMERICAL: return "numerical_error";
    case SUBLAB_E_CONFIG: return "config_error";
    case SUBLAB_E_IO: return "io_error";
    case SUBLAB_E_INTERNAL: return "internal_error";
  }
  return "unknown";
}

int sublab_status_exit_code(sublab_status status) {
  switch (status) {
    case SUBLAB_OK: return 0;
    case SUBLAB_E_NUMERICAL:
    case SUBLAB_E_INTERNAL: return sublab::commands::kNumerical;
    default: return sublab::commands::kConfigError;
  }
}

size_t sublab_command_count(void) { return sublab::commands::command_names().size(); }

const char* sublab_command_name(size_t index) {
  const auto& names = sublab::commands::command_names();
  return index < names.size() ? names[index].c_str() : nullptr;
}

sublab_status sublab_config_load(const char* path, sublab_config** out) {
  if (!path) return null_argument("path");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] { *out = new sublab_config{sublab::config::load_config(path)}; });
}

sublab_status sublab_config_parse(const char* text, sublab_config** out) {
  if (!text) return null_argument("text");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] { *out = new sublab_config{sublab::config::parse_config(text)}; });
}

void sublab_config_free(sublab_config* cfg) { delete cfg; }

sublab_status sublab_config_set_seed(sublab_config* cfg, uint64_t seed) {
  if (!cfg) return null_argument("cfg");
  cfg->cfg.run.seed = seed;
  return SUBLAB_OK;
}

sublab_status sublab_config_set_jobs(sublab_config* cfg, int jobs) {
  if (!cfg) return null_argument("cfg");
  if (jobs < 1) {
    last_error = "jobs must be >= 1";
    return SUBLAB_E_RANGE;
  }
  cfg->cfg.run.jobs = jobs;
  return SUBLAB_OK;
}

uint64_t sublab_config_seed(const sublab_config* cfg) { return cfg ? cfg->cfg.run.seed : 0; }

const char* sublab_config_out_dir(const sublab_config* cfg) { return cfg ? cfg->cfg.run.out.c_str() : nullptr; }

const char* sublab_config_format(const sublab_config* cfg) { return cfg ? cfg->cfg.run.format.c_str() : nullptr; }

sublab_status sublab_run(const sublab_config* cfg, const char* command, sublab_result** out) {
  if (!cfg) return null_argument("cfg");
  if (!command) return null_argument("command");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    auto* r = new sublab_result{sublab::commands::run_command(command, cfg->cfg), {}, {}};
    r->json = sublab::commands::dump(r->res.report);
    for (const auto& t : r->res.tables) r->csv.push_back(t.text());
    *out = r;
  });
}

void sublab_result_free(sublab_result* result) { delete result; }

int sublab_result_exit_code(const sublab_result* result) {
  return result ? result->res.exit_code : sublab::commands::kConfigError;
}

const char* sublab_result_command(const sublab_result* result) {
  return result ? result->res.command.c_str() : nullptr;
}

const char* sublab_result_json(const sublab_result* result) { return result ? result->json.c_str() : nullptr; }

const char* sublab_result_summary(const sublab_result* result) {
  return result ? result->res.summary.c_str() : nullptr;
}

size_t sublab_result_table_count(const sublab_result* result) { return result ? result->csv.size() : 0; }

const char* sublab_result_table_name(const sublab_result* result, size_t index) {
  if (!result || index >= result->csv.size()) return nullptr;
  return result->res.tables[index].name.c_str();
}

const char* sublab_result_table_csv(const sublab_result* result, size_t index) {
  if (!result || index >= result->csv.size()) return nullptr;
  return result->csv[index].c_str();
}

sublab_status sublab_expr_eval(const char* text, int dimension, const double* x, double* out) {
  if (!text) return null_argument("text");
  if (!x) return null_argument("x");
  if (!out) return null_argument("out");
  return guarded([&] {
    const auto e = sublab::symexpr::parse(text, dimension);
    *out = e.eval(std::span<const double>(x, static_cast<std::size_t>(dimension)));
  });
}

sublab_status sublab_expr_simplify(const char* text, int dimension, char** out) {
  if (!text) return null_argument("text");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    *out = copy_string(sublab::symexpr::simplify(sublab::symexpr::parse(text, dimension)).to_string());
  });
}

sublab_status sublab_expr_differentiate(const char* text, int dimension, int k, char** out) {
  if (!text) return null_argument("text");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    if (k < 1 || k > dimension) throw sublab::RangeError("coordinate index out of range");
    const auto e = sublab::symexpr::parse(text, dimension);
    *out = copy_string(sublab::symexpr::differentiate(e, k).to_string());
  });
}

sublab_status sublab_lie_bracket(const char* const* x, const char* const* y, int dimension, char*** out) {
  if (!x) return null_argument("x");
  if (!y) return null_argument("y");
  if (!out) return null_argument("out");
  *out = nullptr;
  if (dimension < 1) {
    last_error = "dimension must be >= 1";
    return SUBLAB_E_DIMENSION;
  }
  return guarded([&] {
    std::vector<std::string> xs, ys;
    for (int k = 0; k < dimension; ++k) {
      if (!x[k] || !y[k]) throw sublab::Error(sublab::ErrorKind::invalid_argument, "null coefficient");
      xs.emplace_back(x[k]);
      ys.emplace_back(y[k]);
    }
    const auto z = sublab::vecfield::lie_bracket(sublab::vecfield::VectorField::parse(xs, dimension),
                                                 sublab::vecfield::VectorField::parse(ys, dimension));
    auto** arr = static_cast<char**>(std::calloc(static_cast<std::size_t>(dimension), sizeof(char*)));
    if (!arr) throw std::bad_alloc();
    try {
      for (int k = 0; k < dimension; ++k) arr[k] = copy_string(z.coefficient(k + 1).to_string());
    } catch (...) {
      sublab_string_array_free(arr, dimension);
      throw;
    }
    *out = arr;
  });
}

void sublab_string_free(char* s) { std::free(s); }

void sublab_string_array_free(char** s, int count) {
  if (!s) return;
  for (int k = 0; k < count; ++k) std::free(s[k]);
  std::free(s);
}

}  // extern "C"
