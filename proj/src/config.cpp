#include "airfed/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace airfed {

using json = nlohmann::json;

ConfigError::ConfigError(std::string key, const std::string& message)
    : std::runtime_error(key.empty() ? message : "config key '" + key + "': " + message),
      key_(std::move(key)) {}

std::string_view to_string(Policy policy) {
  switch (policy) {
    case Policy::fedavg: return "fedavg";
    case Policy::afl: return "afl";
    case Policy::ca_afl: return "ca_afl";
    case Policy::greedy_topk: return "greedy_topk";
  }
  return "unknown";
}

Policy parse_policy(std::string_view name) {
  if (name == "fedavg") return Policy::fedavg;
  if (name == "afl") return Policy::afl;
  if (name == "ca_afl") return Policy::ca_afl;
  if (name == "greedy_topk") return Policy::greedy_topk;
  throw ConfigError("policy", "unknown policy '" + std::string(name) + "'");
}

namespace {

DatasetKind parse_dataset(std::string_view name) {
  if (name == "idx_files") return DatasetKind::idx_files;
  if (name == "synthetic") return DatasetKind::synthetic;
  throw ConfigError("dataset", "unknown dataset kind '" + std::string(name) + "'");
}

ClientEval parse_client_eval(std::string_view name) {
  if (name == "label_matched") return ClientEval::label_matched;
  if (name == "full_test") return ClientEval::full_test;
  throw ConfigError("client_eval", "unknown evaluation mode '" + std::string(name) + "'");
}

class Reader {
 public:
  explicit Reader(const json& doc) : doc_(doc) {}

  void count(const char* key, std::size_t& out) {
    if (auto* v = take(key)) {
      if (!v->is_number_integer() || v->get<long long>() < 0) {
        throw ConfigError(key, "expected a non-negative integer");
      }
      out = v->get<std::size_t>();
    }
  }

  void u64(const char* key, std::uint64_t& out) {
    if (auto* v = take(key)) {
      if (!v->is_number_integer()) throw ConfigError(key, "expected an integer");
      out = v->is_number_unsigned() ? v->get<std::uint64_t>()
                                    : static_cast<std::uint64_t>(v->get<std::int64_t>());
    }
  }

  void real(const char* key, double& out) {
    if (auto* v = take(key)) {
      if (!v->is_number()) throw ConfigError(key, "expected a number");
      out = v->get<double>();
    }
  }

  void text(const char* key, std::string& out) {
    if (auto* v = take(key)) {
      if (!v->is_string()) throw ConfigError(key, "expected a string");
      out = v->get<std::string>();
    }
  }

  template <typename Parse, typename T>
  void choice(const char* key, T& out, Parse parse) {
    std::string name;
    text(key, name);
    if (!name.empty()) out = parse(name);
  }

  void reject_unknown() const {
    for (const auto& [key, value] : doc_.items()) {
      if (!seen_.contains(key)) {
        throw ConfigError(key, "unknown configuration key");
      }
    }
  }

 private:
  const json* take(const char* key) {
    seen_.insert(key);
    auto it = doc_.find(key);
    return it == doc_.end() ? nullptr : &*it;
  }

  const json& doc_;
  std::set<std::string> seen_;
};

bool blank(std::string_view s) {
  return s.find_first_not_of(" \t\r\n") == std::string_view::npos;
}

}  // namespace

SimConfig parse_config(std::string_view source) {
  SimConfig cfg;
  if (blank(source)) {
    validate(cfg);
    return cfg;
  }

  json doc;
  try {
    doc = json::parse(source);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed configuration document: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("", "configuration document must be a JSON object");

  Reader r(doc);
  r.count("n_clients", cfg.n_clients);
  r.count("k_selected", cfg.k_selected);
  r.count("rounds", cfg.rounds);
  r.real("bias_factor", cfg.bias_factor);
  r.choice("policy", cfg.policy, parse_policy);
  r.real("lr_init", cfg.lr_init);
  r.real("lr_decay", cfg.lr_decay);
  r.real("ascent_lr", cfg.ascent_lr);
  r.count("batch_size", cfg.batch_size);
  r.count("ascent_batch_size", cfg.ascent_batch_size);
  r.count("n_subcarriers", cfg.n_subcarriers);
  r.count("model_dim", cfg.model_dim);
  r.real("scaling_factor_watts", cfg.scaling_factor_watts);
  r.real("symbol_period_s", cfg.symbol_period_s);
  r.real("channel_floor", cfg.channel_floor);
  r.real("aircomp_noise_std", cfg.aircomp_noise_std);
  r.u64("seed", cfg.seed);
  r.choice("dataset", cfg.dataset, parse_dataset);
  r.count("shards_per_client", cfg.shards_per_client);
  r.choice("client_eval", cfg.client_eval, parse_client_eval);
  r.count("eval_every", cfg.eval_every);
  r.text("output_path", cfg.output_path);
  r.text("train_images", cfg.train_images);
  r.text("train_labels", cfg.train_labels);
  r.text("test_images", cfg.test_images);
  r.text("test_labels", cfg.test_labels);
  r.count("synthetic_train_samples", cfg.synthetic_train_samples);
  r.count("synthetic_test_samples", cfg.synthetic_test_samples);
  r.count("synthetic_dim", cfg.synthetic_dim);
  r.count("synthetic_classes", cfg.synthetic_classes);
  r.real("synthetic_noise_min", cfg.synthetic_noise_min);
  r.real("synthetic_noise_max", cfg.synthetic_noise_max);
  r.real("synthetic_noise_exponent", cfg.synthetic_noise_exponent);
  r.reject_unknown();

  validate(cfg);
  return cfg;
}

SimConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open configuration file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

void validate(const SimConfig& cfg) {
  auto positive = [](const char* key, auto value) {
    if (!(value > 0)) throw ConfigError(key, "must be positive");
  };
  positive("n_clients", cfg.n_clients);
  positive("k_selected", cfg.k_selected);
  if (cfg.k_selected > cfg.n_clients) {
    throw ConfigError("k_selected", "k_selected (" + std::to_string(cfg.k_selected) +
                                        ") exceeds n_clients (" + std::to_string(cfg.n_clients) + ")");
  }
  if (!(cfg.bias_factor >= 0.0) || !std::isfinite(cfg.bias_factor)) {
    throw ConfigError("bias_factor", "must be a finite non-negative number");
  }
  positive("lr_init", cfg.lr_init);
  if (!(cfg.lr_decay > 0.0 && cfg.lr_decay <= 1.0)) throw ConfigError("lr_decay", "must lie in (0, 1]");
  if (!(cfg.ascent_lr >= 0.0) || !std::isfinite(cfg.ascent_lr)) {
    throw ConfigError("ascent_lr", "must be a finite non-negative number");
  }
  positive("batch_size", cfg.batch_size);
  positive("ascent_batch_size", cfg.ascent_batch_size);
  positive("n_subcarriers", cfg.n_subcarriers);
  positive("model_dim", cfg.model_dim);
  positive("scaling_factor_watts", cfg.scaling_factor_watts);
  positive("symbol_period_s", cfg.symbol_period_s);
  if (!(cfg.channel_floor >= 0.0 && cfg.channel_floor < 1.0)) {
    throw ConfigError("channel_floor", "must lie in [0, 1)");
  }
  if (!(cfg.aircomp_noise_std >= 0.0)) throw ConfigError("aircomp_noise_std", "must be non-negative");
  positive("shards_per_client", cfg.shards_per_client);
  positive("eval_every", cfg.eval_every);
  if (cfg.output_path.empty()) throw ConfigError("output_path", "must not be empty");

  if (cfg.dataset == DatasetKind::idx_files) {
    if (cfg.train_images.empty()) throw ConfigError("train_images", "required for dataset idx_files");
    if (cfg.train_labels.empty()) throw ConfigError("train_labels", "required for dataset idx_files");
    if (cfg.test_images.empty()) throw ConfigError("test_images", "required for dataset idx_files");
    if (cfg.test_labels.empty()) throw ConfigError("test_labels", "required for dataset idx_files");
  } else {
    positive("synthetic_train_samples", cfg.synthetic_train_samples);
    positive("synthetic_test_samples", cfg.synthetic_test_samples);
    positive("synthetic_dim", cfg.synthetic_dim);
    if (cfg.synthetic_classes < 2) throw ConfigError("synthetic_classes", "need at least two classes");
    if (!(cfg.synthetic_noise_min > 0.0 && cfg.synthetic_noise_max >= cfg.synthetic_noise_min)) {
      throw ConfigError("synthetic_noise_max", "need 0 < synthetic_noise_min <= synthetic_noise_max");
    }
    if (!(cfg.synthetic_noise_exponent > 0.0) || !std::isfinite(cfg.synthetic_noise_exponent)) {
      throw ConfigError("synthetic_noise_exponent", "must be a finite positive number");
    }
    const std::size_t expected = (cfg.synthetic_dim + 1) * cfg.synthetic_classes;
    if (cfg.model_dim != expected) {
      throw ConfigError("model_dim", "must equal (synthetic_dim+1)*synthetic_classes = " +
                                         std::to_string(expected));
    }
  }
}

}  // namespace airfed
