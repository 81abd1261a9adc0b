#include "config.hpp"

#include <cmath>
#include <cstdio>
#include <set>

#include "landscape/errors.hpp"
#include "landscape/serialize.hpp"
#include "tomlplusplus/toml.hpp"

namespace landscape::cli {

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

// Reads one [section], remembering which keys were used.
class Section {
 public:
  Section(const toml::table& root, std::string name) : name_(std::move(name)) {
    if (const auto* node = root.get(name_)) {
      table_ = node->as_table();
      if (!table_) throw ConfigError("[" + name_ + "] must be a table");
    }
  }

  template <typename T>
  void read(const std::string& key, T& out) {
    const toml::node* node = find(key);
    if (!node) return;
    if constexpr (std::is_same_v<T, bool>) {
      out = expect(node->value<bool>(), key, "a boolean");
    } else if constexpr (std::is_same_v<T, std::string>) {
      out = expect(node->value<std::string>(), key, "a string");
    } else if constexpr (std::is_floating_point_v<T>) {
      out = expect(node->value<double>(), key, "a number");
    } else {
      const auto v = expect(node->value<std::int64_t>(), key, "an integer");
      if (v < 0) throw ConfigError(where(key) + " must be non-negative");
      out = static_cast<T>(v);
    }
  }

  void read_dims(const std::string& key, std::vector<int>& out) {
    const toml::node* node = find(key);
    if (!node) return;
    const toml::array* arr = node->as_array();
    if (!arr) throw ConfigError(where(key) + " must be an array of integers");
    out.clear();
    for (const auto& el : *arr) {
      const auto v = el.value<std::int64_t>();
      if (!v || *v < 1) throw ConfigError(where(key) + " must hold positive integers");
      out.push_back(static_cast<int>(*v));
    }
  }

  void finish() const {
    if (!table_) return;
    for (const auto& [k, v] : *table_) {
      if (!used_.count(std::string(k.str()))) throw ConfigError("unknown key " + where(std::string(k.str())));
    }
  }

 private:
  const toml::node* find(const std::string& key) {
    if (!table_) return nullptr;
    used_.insert(key);
    return table_->get(key);
  }

  template <typename V>
  auto expect(const std::optional<V>& v, const std::string& key, const char* what) const {
    if (!v) throw ConfigError(where(key) + " must be " + what);
    return *v;
  }

  std::string where(const std::string& key) const { return "'" + name_ + "." + key + "'"; }

  std::string name_;
  const toml::table* table_ = nullptr;
  std::set<std::string> used_;
};

void check_dims(const std::vector<int>& dims, const char* name) {
  if (dims.size() < 3 || dims.back() != 1) {
    throw ConfigError(std::string(name) + " needs at least one hidden layer and a scalar output");
  }
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir,
                              const Overrides& overrides) {
  toml::table root;
  try {
    root = toml::parse(text);
  } catch (const toml::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + std::string(e.description()));
  }
  static const std::set<std::string> known{"experiment", "seeds", "train", "probe", "path", "infinity", "input",
                                           "output"};
  for (const auto& [k, v] : root) {
    if (!known.count(std::string(k.str()))) throw ConfigError("unknown section [" + std::string(k.str()) + "]");
  }

  ExperimentConfig cfg;
  RegionConfig& r = cfg.region;

  Section ex(root, "experiment");
  std::string activation = std::string(to_string(r.activation));
  std::string policy = to_string(r.policy);
  std::string order = to_string(r.order);
  ex.read("activation", activation);
  ex.read_dims("teacher_dims", r.teacher_dims);
  ex.read_dims("student_dims", r.student_dims);
  ex.read_dims("target_dims", r.target_dims);
  ex.read("samples", r.samples);
  ex.read("input_low", r.sampler.lower);
  ex.read("input_high", r.sampler.upper);
  ex.read("teacher_scale", r.teacher_scale);
  ex.read("init_scale", r.init_scale);
  ex.read("student_from_teacher", r.student_from_teacher);
  ex.read("lambda", r.lambda);
  ex.read("saddle_lambda", r.saddle_lambda);
  ex.read("walk_steps", r.walk_steps);
  ex.read("source_policy", policy);
  ex.read("embed_order", order);
  ex.read("b_include_bias", r.b_include_bias);
  ex.read("max_attempts", r.max_attempts);
  ex.read("descent_iters", r.descent_iters);
  ex.finish();

  Section seeds(root, "seeds");
  seeds.read("teacher", r.teacher_seed);
  seeds.read("data", r.data_seed);
  seeds.read("init", r.init_seed);
  seeds.read("probe", r.probe_seed);
  seeds.read("perturb", cfg.perturb_seed);
  seeds.read("infinity", cfg.infinity_seed);
  seeds.read("ball", cfg.ball_seed);
  seeds.finish();

  Section tr(root, "train");
  tr.read("max_iters", r.train.max_iters);
  tr.read("initial_step", r.train.initial_step);
  tr.read("tol_g", r.train.tol_g);
  tr.read("newton_polish", r.train.newton_polish);
  tr.finish();

  Section pr(root, "probe");
  double rmin = 1e-4, rmax = 1e-1;
  int rcount = 64;
  pr.read("directions", r.probe_directions);
  pr.read("radius_min", rmin);
  pr.read("radius_max", rmax);
  pr.read("radius_count", rcount);
  pr.finish();

  Section pa(root, "path");
  pa.read("steps", cfg.path_steps);
  pa.read("epsilon", cfg.path_epsilon);
  pa.read_dims("dims", cfg.path_dims);
  pa.read("snapshot_stride", cfg.snapshot_stride);
  pa.finish();

  Section inf(root, "infinity");
  inf.read_dims("base_dims", cfg.infinity_dims);
  inf.read("base_scale", cfg.infinity_scale);
  inf.read("ball_samples", cfg.ball_samples);
  inf.read("flipped", cfg.infinity_flipped);
  inf.finish();

  Section in(root, "input");
  std::string network_file, data_file;
  in.read("network", network_file);
  in.read("data", data_file);
  in.finish();
  if (!network_file.empty()) cfg.network_file = base_dir / network_file;
  if (!data_file.empty()) cfg.data_file = base_dir / data_file;

  Section out(root, "output");
  std::string dir = cfg.out_dir.string();
  out.read("dir", dir);
  out.finish();
  cfg.out_dir = dir;

  std::string salt = text;
  if (overrides.seed_data) {
    r.data_seed = *overrides.seed_data;
    salt += "\n--seed-data=" + std::to_string(*overrides.seed_data);
  }
  if (overrides.lambda) {
    r.lambda = *overrides.lambda;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", *overrides.lambda);
    salt += std::string("\n--lambda=") + buf;
  }
  if (overrides.out) cfg.out_dir = *overrides.out;
  cfg.hash = fnv1a_hex(salt);

  try {
    r.activation = activation_from_string(activation);
    r.policy = source_policy_from_string(policy);
    r.order = embed_order_from_string(order);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  check_dims(r.teacher_dims, "teacher_dims");
  check_dims(r.student_dims, "student_dims");
  check_dims(r.target_dims, "target_dims");
  check_dims(cfg.infinity_dims, "infinity.base_dims");
  if (!cfg.path_dims.empty()) check_dims(cfg.path_dims, "path.dims");
  if (r.samples < 1) throw ConfigError("experiment.samples must be positive");
  if (!(r.sampler.lower < r.sampler.upper)) throw ConfigError("input_low must be below input_high");
  if (r.walk_steps < 1 || cfg.path_steps < 1) throw ConfigError("step counts must be positive");
  if (!(rmin > 0.0) || !(rmax >= rmin) || rcount < 1) throw ConfigError("invalid probe radii");
  r.radii.clear();
  for (int i = 0; i < rcount; ++i) {
    r.radii.push_back(rcount == 1 ? rmin : rmin * std::pow(rmax / rmin, static_cast<double>(i) / (rcount - 1)));
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& file, const Overrides& overrides) {
  std::string text;
  try {
    text = read_text_file(file);
  } catch (const std::exception& e) {
    throw ConfigError("cannot read config '" + file.string() + "'");
  }
  return parse_config(text, file.parent_path(), overrides);
}

}  // namespace landscape::cli
