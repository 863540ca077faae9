#pragma once

#include <torch/torch.h>

#include <functional>
#include <string>
#include <vector>

#include "dsdr/data.hpp"
#include "dsdr/networks.hpp"
#include "dsdr/trainer.hpp"

namespace dsdr::eval {

struct ExperimentResult {
  std::string held_out;
  std::vector<double> per_seed_accuracy;  // top-1 percentages
  double mean = 0;
  double stddev = 0;  // sample std over seeds
  std::string config_digest;
};

// Enabled-loss mask in the ablation table's column order. ce can never be
// disabled.
struct AblationMask {
  bool recon = true;
  bool intra = true;
  bool inter = true;
  bool cycle = true;
  bool adv = true;
  bool ce = true;
  bool kl = true;

  std::string label() const;
  bool operator==(const AblationMask&) const = default;
};

struct AblationRow {
  AblationMask mask;
  double mean_accuracy = 0;
};

struct EvalPlan {
  nets::NetworkConfig network;
  train::TrainConfig train_config;
  int64_t seeds = 3;
  int64_t jobs = 1;             // parallel (domain, seed) workers
  std::string output_dir;      // empty -> nothing written
  std::string config_digest;
};

// Fraction of samples whose argmax prediction matches the label, x100.
double evaluate_accuracy(nets::Networks& model, const data::Dataset& test);

// Same counting with an arbitrary predictor (images -> label indices);
// lets tests plug oracle / chance stubs.
double accuracy_of(const data::Dataset& test,
                   const std::function<torch::Tensor(const torch::Tensor&)>& predict);

// Trains one model per (held-out domain, seed) and reports per-domain
// results plus a final "Avg" row.
std::vector<ExperimentResult> run_leave_one_out(const EvalPlan& plan,
                                                const data::Dataset& dataset);

// ERM: encoder + classifier on pooled source batches, same optimizer split
// and schedule.
ExperimentResult run_erm_baseline(const EvalPlan& plan, const data::Dataset& dataset,
                                  int64_t held_out);
std::vector<ExperimentResult> run_erm_leave_one_out(const EvalPlan& plan,
                                                    const data::Dataset& dataset);

// One full leave-one-out run per mask; rows in input order.
std::vector<AblationRow> run_ablation_grid(const EvalPlan& plan, const data::Dataset& dataset,
                                           const std::vector<AblationMask>& rows);

// The canonical 9-row grid shipped as the default.
std::vector<AblationMask> default_ablation_rows();

// Writes rows (F feature columns, label, domain_id) and 2-D PCA
// coordinates of the encoder features.
void export_embeddings(nets::Networks& model, const data::Dataset& dataset,
                       const std::string& features_csv_path, const std::string& pca_csv_path);

// ERM training loop reused by the CLI and tests (encoder + classifier only).
nets::Networks erm_train(const nets::NetworkConfig& net_cfg, const train::TrainConfig& cfg,
                         const data::Dataset& train_data);

void write_results_csv(const std::vector<ExperimentResult>& results, const std::string& path);
void write_aggregate_csv(const std::vector<ExperimentResult>& results, const std::string& path);
std::string render_results_table(
    const std::vector<std::pair<std::string, std::vector<ExperimentResult>>>& methods);
void write_ablation_csv(const std::vector<AblationRow>& rows, const std::string& path);
std::string render_ablation_table(const std::vector<AblationRow>& rows);

}  // namespace dsdr::eval
