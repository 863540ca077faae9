#pragma once

#include <cstdint>
#include <string>

#include "dsdr/data.hpp"
#include "dsdr/networks.hpp"
#include "dsdr/trainer.hpp"

namespace dsdr::cfg {

struct DatasetSection {
  std::string source = "synthetic";  // synthetic | directory
  std::string path;                  // directory source root
  int64_t domains = 4;               // synthetic source
  int64_t classes = 10;
  int64_t per_domain = 500;
};

struct EvalSection {
  int64_t seeds = 3;
  std::string held_out = "all";  // "all" or one domain name
  int64_t jobs = 2;
};

// The experiment file: flat `key = value` lines under [section] headers.
// Unknown keys are rejected; every key has a documented default.
struct ExperimentConfig {
  int64_t spec_version = 1;
  uint64_t seed = 7;
  DatasetSection dataset;
  nets::NetworkConfig network;
  train::TrainConfig train;
  EvalSection eval;
  std::string output_dir = "runs/out";

  void validate() const;

  // canonical normalized rendering; its fnv1a hex is the config digest
  // embedded in every output artifact
  std::string canonical_text() const;
  std::string digest() const;

  data::Dataset load_dataset() const;

  static ExperimentConfig parse_text(const std::string& text);
  static ExperimentConfig parse_file(const std::string& path);
};

}  // namespace dsdr::cfg
