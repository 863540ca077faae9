#include "dsdr/config.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "dsdr/common.hpp"

namespace dsdr::cfg {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

int64_t parse_int(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const int64_t r = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return r;
  } catch (...) {
    throw ConfigError("config: key '" + key + "' expects an integer, got '" + v + "'");
  }
}

uint64_t parse_u64(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const uint64_t r = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return r;
  } catch (...) {
    throw ConfigError("config: key '" + key + "' expects an unsigned integer, got '" + v + "'");
  }
}

double parse_real(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const double r = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return r;
  } catch (...) {
    throw ConfigError("config: key '" + key + "' expects a number, got '" + v + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("config: key '" + key + "' expects a boolean, got '" + v + "'");
}

std::vector<int64_t> parse_int_list(const std::string& key, const std::string& v) {
  std::vector<int64_t> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_int(key, trim(item)));
  return out;
}

std::array<int64_t, 3> parse_shape(const std::string& key, const std::string& v) {
  std::array<int64_t, 3> out{};
  std::stringstream ss(v);
  std::string item;
  size_t i = 0;
  while (std::getline(ss, item, 'x')) {
    if (i >= 3) throw ConfigError("config: key '" + key + "' expects CxHxW");
    out[i++] = parse_int(key, trim(item));
  }
  if (i != 3) throw ConfigError("config: key '" + key + "' expects CxHxW");
  return out;
}

std::string fmt_real(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (spec_version != 1)
    throw ConfigError("config: unsupported spec_version " + std::to_string(spec_version));
  if (dataset.source != "synthetic" && dataset.source != "directory")
    throw ConfigError("config: dataset.source must be 'synthetic' or 'directory'");
  if (dataset.source == "directory" && dataset.path.empty())
    throw ConfigError("config: dataset.path is required for directory datasets");
  if (dataset.source == "synthetic") {
    if (dataset.domains < 2) throw ConfigError("config: dataset.domains must be >= 2");
    if (dataset.classes < 2 || dataset.classes > 10)
      throw ConfigError("config: dataset.classes must be in [2, 10]");
    if (dataset.per_domain < dataset.classes)
      throw ConfigError("config: dataset.per_domain must be >= dataset.classes");
  }
  network.validate();
  train.validate();
  if (eval.seeds < 1) throw ConfigError("config: eval.seeds must be >= 1");
  if (eval.jobs < 1) throw ConfigError("config: eval.jobs must be >= 1");
  if (output_dir.empty()) throw ConfigError("config: output.dir must not be empty");
}

std::string ExperimentConfig::canonical_text() const {
  std::string s;
  auto kv = [&](const std::string& k, const std::string& v) { s += k + "=" + v + "\n"; };
  kv("spec_version", std::to_string(spec_version));
  kv("seed", std::to_string(seed));
  kv("dataset.source", dataset.source);
  kv("dataset.path", dataset.path);
  kv("dataset.domains", std::to_string(dataset.domains));
  kv("dataset.classes", std::to_string(dataset.classes));
  kv("dataset.per_domain", std::to_string(dataset.per_domain));
  kv("network.image", std::to_string(network.image_shape[0]) + "x" +
                          std::to_string(network.image_shape[1]) + "x" +
                          std::to_string(network.image_shape[2]));
  std::string widths;
  for (size_t i = 0; i < network.widths.size(); ++i)
    widths += (i ? "," : "") + std::to_string(network.widths[i]);
  kv("network.widths", widths);
  kv("network.style_channels", std::to_string(network.style_channels));
  kv("network.feature_dim", std::to_string(network.feature_dim));
  kv("network.leaky_slope", fmt_real(network.leaky_slope));
  kv("network.epsilon", fmt_real(network.epsilon));
  kv("train.batch", std::to_string(train.batch));
  kv("train.steps", std::to_string(train.steps));
  kv("train.alpha_intra", fmt_real(train.weights.intra));
  kv("train.alpha_inter", fmt_real(train.weights.inter));
  kv("train.alpha_recon", fmt_real(train.weights.recon));
  kv("train.alpha_cycle", fmt_real(train.weights.cycle));
  kv("train.alpha_adv", fmt_real(train.weights.adv));
  kv("train.alpha_kl", fmt_real(train.weights.kl));
  kv("train.alpha_ce", fmt_real(train.weights.ce));
  kv("train.adam_lr", fmt_real(train.adam_lr));
  kv("train.adam_weight_decay", fmt_real(train.adam_weight_decay));
  kv("train.sgd_lr", fmt_real(train.sgd_lr));
  kv("train.sgd_momentum", fmt_real(train.sgd_momentum));
  kv("train.sgd_weight_decay", fmt_real(train.sgd_weight_decay));
  kv("train.checkpoint_interval", std::to_string(train.checkpoint_interval));
  kv("train.log_interval", std::to_string(train.log_interval));
  kv("train.preview_grids", train.dump_previews ? "true" : "false");
  kv("eval.seeds", std::to_string(eval.seeds));
  kv("eval.held_out", eval.held_out);
  kv("eval.jobs", std::to_string(eval.jobs));
  kv("output.dir", output_dir);
  return s;
}

std::string ExperimentConfig::digest() const { return to_hex(fnv1a64(canonical_text())); }

data::Dataset ExperimentConfig::load_dataset() const {
  if (dataset.source == "synthetic") {
    auto spec = data::DomainShiftSpec::canonical(dataset.domains, seed);
    return data::synthesize_domains(spec, dataset.classes, dataset.per_domain);
  }
  return data::load_directory_dataset(dataset.path, network.image_shape);
}

ExperimentConfig ExperimentConfig::parse_text(const std::string& text) {
  ExperimentConfig cfg;
  cfg.train.seed = cfg.seed;
  bool batch_set = false;

  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config line " + std::to_string(lineno) + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "dataset" && section != "network" && section != "train" &&
          section != "eval" && section != "output")
        throw ConfigError("config line " + std::to_string(lineno) + ": unknown section [" +
                          section + "]");
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));

    auto unknown = [&]() -> ConfigError {
      return ConfigError("config line " + std::to_string(lineno) + ": unknown key '" + key +
                         "' in section [" + (section.empty() ? "top-level" : section) + "]");
    };

    if (section.empty()) {
      if (key == "spec_version") cfg.spec_version = parse_int(key, value);
      else if (key == "seed") cfg.seed = parse_u64(key, value);
      else throw unknown();
    } else if (section == "dataset") {
      if (key == "source") cfg.dataset.source = value;
      else if (key == "path") cfg.dataset.path = value;
      else if (key == "domains") cfg.dataset.domains = parse_int(key, value);
      else if (key == "classes") cfg.dataset.classes = parse_int(key, value);
      else if (key == "per_domain") cfg.dataset.per_domain = parse_int(key, value);
      else throw unknown();
    } else if (section == "network") {
      if (key == "image") cfg.network.image_shape = parse_shape(key, value);
      else if (key == "widths") cfg.network.widths = parse_int_list(key, value);
      else if (key == "style_channels") cfg.network.style_channels = parse_int(key, value);
      else if (key == "feature_dim") cfg.network.feature_dim = parse_int(key, value);
      else if (key == "leaky_slope") cfg.network.leaky_slope = parse_real(key, value);
      else if (key == "epsilon") cfg.network.epsilon = parse_real(key, value);
      else throw unknown();
    } else if (section == "train") {
      if (key == "batch") {
        cfg.train.batch = parse_int(key, value);
        batch_set = true;
      } else if (key == "steps") cfg.train.steps = parse_int(key, value);
      else if (key == "alpha_intra") cfg.train.weights.intra = parse_real(key, value);
      else if (key == "alpha_inter") cfg.train.weights.inter = parse_real(key, value);
      else if (key == "alpha_recon") cfg.train.weights.recon = parse_real(key, value);
      else if (key == "alpha_cycle") cfg.train.weights.cycle = parse_real(key, value);
      else if (key == "alpha_adv") cfg.train.weights.adv = parse_real(key, value);
      else if (key == "alpha_kl") cfg.train.weights.kl = parse_real(key, value);
      else if (key == "alpha_ce") cfg.train.weights.ce = parse_real(key, value);
      else if (key == "adam_lr") cfg.train.adam_lr = parse_real(key, value);
      else if (key == "adam_weight_decay") cfg.train.adam_weight_decay = parse_real(key, value);
      else if (key == "sgd_lr") cfg.train.sgd_lr = parse_real(key, value);
      else if (key == "sgd_momentum") cfg.train.sgd_momentum = parse_real(key, value);
      else if (key == "sgd_weight_decay") cfg.train.sgd_weight_decay = parse_real(key, value);
      else if (key == "checkpoint_interval") cfg.train.checkpoint_interval = parse_int(key, value);
      else if (key == "log_interval") cfg.train.log_interval = parse_int(key, value);
      else if (key == "preview_grids") cfg.train.dump_previews = parse_bool(key, value);
      else throw unknown();
    } else if (section == "eval") {
      if (key == "seeds") cfg.eval.seeds = parse_int(key, value);
      else if (key == "held_out") cfg.eval.held_out = value;
      else if (key == "jobs") cfg.eval.jobs = parse_int(key, value);
      else throw unknown();
    } else if (section == "output") {
      if (key == "dir") cfg.output_dir = value;
      else throw unknown();
    }
  }

  // the full-scale default batch is kept for directory datasets; the
  // desk-scale synthetic default is 32
  if (!batch_set) cfg.train.batch = cfg.dataset.source == "directory" ? 64 : 32;
  cfg.network.classes = cfg.dataset.classes;
  cfg.train.seed = cfg.seed;

  if (const char* env = std::getenv("DSDR_OUT_DIR"); env && *env) cfg.output_dir = env;

  cfg.validate();
  return cfg;
}

ExperimentConfig ExperimentConfig::parse_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot read config file: " + path);
  std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return parse_text(text);
}

}  // namespace dsdr::cfg
