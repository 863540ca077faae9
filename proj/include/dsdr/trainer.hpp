#pragma once

#include <torch/torch.h>

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dsdr/data.hpp"
#include "dsdr/losses.hpp"
#include "dsdr/networks.hpp"
#include "dsdr/pipeline.hpp"
#include "dsdr/rng.hpp"

namespace dsdr::train {

struct TrainConfig {
  int64_t batch = 32;
  int64_t steps = 2000;
  losses::LossWeights weights;
  double adam_lr = 1e-4;
  double adam_weight_decay = 5e-4;
  double sgd_lr = 5e-3;
  double sgd_momentum = 0.9;
  double sgd_weight_decay = 5e-4;
  uint64_t seed = 7;
  int64_t checkpoint_interval = 500;
  int64_t log_interval = 10;
  // when false the discriminator sub-update is skipped entirely (ablation
  // rows that drop the adversarial term)
  bool adversarial_updates = true;
  bool dump_previews = false;

  void validate() const;
  bool operator==(const TrainConfig&) const = default;
};

// Mutable optimization state. Fully serializable; reloading reproduces
// subsequent steps bit-compatibly given the same data order.
struct TrainState {
  nets::Networks model;
  std::unique_ptr<torch::optim::Adam> opt_main;  // E, S, G
  std::unique_ptr<torch::optim::Adam> opt_disc;  // D
  std::unique_ptr<torch::optim::SGD> opt_cls;    // C
  int64_t step = 0;
  Rng sampler_rng{0};
  losses::LossReport running;  // running means over all steps so far
  int64_t running_count = 0;
};

TrainState init_train_state(const nets::NetworkConfig& net_cfg, const TrainConfig& cfg);

// One alternating update: (1) discriminator on detached features,
// (2) the main objective over E, S, G (Adam) and C (SGD).
losses::LossReport train_step(TrainState& state, const data::PairBatch& batch,
                              const TrainConfig& cfg);

struct MetricsRow {
  int64_t step = 0;
  losses::LossReport report;
  uint64_t wall_ms = 0;
};

struct TrainResult {
  TrainState state;
  std::vector<MetricsRow> log;
};

struct TrainOutputs {
  std::string dir;  // empty -> no files written
  std::string config_digest;
};

// Splits off the held-out domain, runs the step loop, logs every
// log_interval steps and checkpoints every checkpoint_interval steps.
// resume, when given, continues from a loaded state.
TrainResult train(const nets::NetworkConfig& net_cfg, const TrainConfig& cfg,
                  const data::Dataset& dataset, int64_t held_out,
                  const TrainOutputs& out = {}, TrainState* resume = nullptr);

// Binary container (tensor blob + json header, fnv1a integrity tail) plus
// a human-readable json sidecar at <path>.json.
void save_checkpoint(const TrainState& state, const nets::NetworkConfig& net_cfg,
                     const TrainConfig& cfg, const std::string& path,
                     const std::string& config_digest = "",
                     const std::string& dataset_manifest_digest = "");

struct LoadedCheckpoint {
  TrainState state;
  nets::NetworkConfig net_config;
  TrainConfig train_config;
};

LoadedCheckpoint load_checkpoint(const std::string& path);

void write_metrics_csv(const std::vector<MetricsRow>& log, const std::string& path,
                       const std::string& config_digest);

}  // namespace dsdr::train
