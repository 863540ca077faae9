#include "dsdr/evaluation.hpp"

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <thread>

#include "dsdr/common.hpp"

namespace fs = std::filesystem;

namespace dsdr::eval {

std::string AblationMask::label() const {
  std::string s;
  auto add = [&](bool on, const char* name) {
    if (on) {
      if (!s.empty()) s += "+";
      s += name;
    }
  };
  add(recon, "recon");
  add(intra, "intra");
  add(inter, "inter");
  add(cycle, "cycle");
  add(adv, "adv");
  add(ce, "ce");
  add(kl, "kl");
  return s;
}

double accuracy_of(const data::Dataset& test,
                   const std::function<torch::Tensor(const torch::Tensor&)>& predict) {
  if (test.size() == 0) throw ConfigError("evaluate_accuracy: empty test set");
  int64_t correct = 0;
  const int64_t chunk = 256;
  for (int64_t i = 0; i < test.size(); i += chunk) {
    const int64_t n = std::min(chunk, test.size() - i);
    auto pred = predict(test.images.narrow(0, i, n));
    correct += pred.eq(test.labels.narrow(0, i, n)).sum().item<int64_t>();
  }
  return 100.0 * static_cast<double>(correct) / static_cast<double>(test.size());
}

double evaluate_accuracy(nets::Networks& model, const data::Dataset& test) {
  if (test.meta.classes != model.config.classes)
    throw ConfigError("evaluate_accuracy: dataset has " + std::to_string(test.meta.classes) +
                      " classes but the classifier expects " +
                      std::to_string(model.config.classes));
  model.eval();
  torch::NoGradGuard no_grad;
  return accuracy_of(test, [&](const torch::Tensor& images) {
    auto [sem, feat] = model.encode(images);
    (void)sem;
    return model.classify(feat).logits.argmax(1);
  });
}

// ---------------------------------------------------------------------------
// grid runner
// ---------------------------------------------------------------------------

namespace {

struct RunSpec {
  int64_t domain;
  int64_t seed_index;
  size_t variant;  // index into variant list
};

struct Variant {
  std::string label;
  losses::LossWeights weights;
  bool adversarial_updates = true;
  bool erm = false;
};

double run_one(const EvalPlan& plan, const data::Dataset& dataset, const Variant& variant,
               int64_t domain, int64_t seed_index) {
  train::TrainConfig cfg = plan.train_config;
  cfg.seed = derive_seed(plan.train_config.seed,
                         {static_cast<uint64_t>(domain), static_cast<uint64_t>(seed_index)});
  cfg.weights = variant.weights;
  cfg.adversarial_updates = variant.adversarial_updates;

  train::TrainOutputs out;
  if (!plan.output_dir.empty()) {
    out.dir = (fs::path(plan.output_dir) / variant.label /
               (dataset.meta.domain_names[static_cast<size_t>(domain)] + "_seed" +
                std::to_string(seed_index)))
                  .string();
    out.config_digest = plan.config_digest;
  }

  auto split = data::leave_one_out_split(dataset, domain);
  if (variant.erm) {
    auto model = erm_train(plan.network, cfg, split.train);
    return evaluate_accuracy(model, split.test);
  }
  auto result = train::train(plan.network, cfg, dataset, domain, out);
  return evaluate_accuracy(result.state.model, split.test);
}

std::vector<std::vector<std::vector<double>>> run_grid(const EvalPlan& plan,
                                                       const data::Dataset& dataset,
                                                       const std::vector<Variant>& variants) {
  if (dataset.meta.domains < 2) throw ConfigError("run_grid: need at least 2 domains");
  if (plan.seeds < 1) throw ConfigError("run_grid: need at least 1 seed");

  std::vector<RunSpec> tasks;
  for (size_t v = 0; v < variants.size(); ++v)
    for (int64_t d = 0; d < dataset.meta.domains; ++d)
      for (int64_t s = 0; s < plan.seeds; ++s) tasks.push_back({d, s, v});

  // accuracies[variant][domain][seed]
  std::vector<std::vector<std::vector<double>>> acc(
      variants.size(), std::vector<std::vector<double>>(
                           static_cast<size_t>(dataset.meta.domains),
                           std::vector<double>(static_cast<size_t>(plan.seeds), 0.0)));

  const int64_t jobs = std::max<int64_t>(1, plan.jobs);
  std::atomic<size_t> next{0};
  std::atomic<bool> failed{false};
  std::string first_error;
  std::mutex error_mutex;

  auto worker = [&] {
    while (true) {
      const size_t i = next.fetch_add(1);
      if (i >= tasks.size() || failed.load()) break;
      const auto& t = tasks[i];
      try {
        acc[t.variant][static_cast<size_t>(t.domain)][static_cast<size_t>(t.seed_index)] =
            run_one(plan, dataset, variants[t.variant], t.domain, t.seed_index);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!failed.exchange(true)) {
          first_error = "run (variant=" + variants[t.variant].label + ", held_out=" +
                        dataset.meta.domain_names[static_cast<size_t>(t.domain)] + ", seed=" +
                        std::to_string(t.seed_index) + ") failed: " + e.what();
        }
      }
    }
  };

  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int64_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failed.load()) throw Error(first_error);
  return acc;
}

ExperimentResult summarize(const std::string& name, const std::vector<double>& per_seed,
                           const std::string& digest) {
  ExperimentResult r;
  r.held_out = name;
  r.per_seed_accuracy = per_seed;
  double sum = 0;
  for (double v : per_seed) sum += v;
  r.mean = sum / static_cast<double>(per_seed.size());
  if (per_seed.size() > 1) {
    double ss = 0;
    for (double v : per_seed) ss += (v - r.mean) * (v - r.mean);
    r.stddev = std::sqrt(ss / static_cast<double>(per_seed.size() - 1));
  }
  r.config_digest = digest;
  return r;
}

std::vector<ExperimentResult> results_with_average(const data::Dataset& dataset,
                                                   const std::vector<std::vector<double>>& acc,
                                                   const std::string& digest) {
  std::vector<ExperimentResult> results;
  const size_t seeds = acc.front().size();
  for (int64_t d = 0; d < dataset.meta.domains; ++d) {
    results.push_back(summarize(dataset.meta.domain_names[static_cast<size_t>(d)],
                                acc[static_cast<size_t>(d)], digest));
  }
  std::vector<double> avg_per_seed(seeds, 0.0);
  for (size_t s = 0; s < seeds; ++s) {
    for (int64_t d = 0; d < dataset.meta.domains; ++d)
      avg_per_seed[s] += acc[static_cast<size_t>(d)][s];
    avg_per_seed[s] /= static_cast<double>(dataset.meta.domains);
  }
  results.push_back(summarize("Avg", avg_per_seed, digest));
  return results;
}

}  // namespace

std::vector<ExperimentResult> run_leave_one_out(const EvalPlan& plan,
                                                const data::Dataset& dataset) {
  Variant v{"dsdr", plan.train_config.weights, plan.train_config.adversarial_updates, false};
  auto acc = run_grid(plan, dataset, {v});
  return results_with_average(dataset, acc[0], plan.config_digest);
}

ExperimentResult run_erm_baseline(const EvalPlan& plan, const data::Dataset& dataset,
                                  int64_t held_out) {
  if (held_out < 0 || held_out >= dataset.meta.domains)
    throw ConfigError("run_erm_baseline: held_out out of range");
  Variant v{"erm", plan.train_config.weights, false, true};
  std::vector<double> per_seed;
  for (int64_t s = 0; s < plan.seeds; ++s)
    per_seed.push_back(run_one(plan, dataset, v, held_out, s));
  return summarize(dataset.meta.domain_names[static_cast<size_t>(held_out)], per_seed,
                   plan.config_digest);
}

std::vector<ExperimentResult> run_erm_leave_one_out(const EvalPlan& plan,
                                                    const data::Dataset& dataset) {
  Variant v{"erm", plan.train_config.weights, false, true};
  auto acc = run_grid(plan, dataset, {v});
  return results_with_average(dataset, acc[0], plan.config_digest);
}

std::vector<AblationMask> default_ablation_rows() {
  // the canonical 9 combinations of the ablation table
  std::vector<AblationMask> rows;
  auto mask = [](bool recon, bool intra, bool inter, bool cycle, bool adv, bool kl) {
    return AblationMask{recon, intra, inter, cycle, adv, true, kl};
  };
  rows.push_back(mask(false, false, false, false, false, false));  // ce only
  rows.push_back(mask(true, false, false, false, false, false));   // + recon
  rows.push_back(mask(false, false, false, true, false, false));   // + cycle
  rows.push_back(mask(false, false, false, true, true, false));    // cycle + adv
  rows.push_back(mask(true, false, false, false, true, true));     // recon + adv + kl
  rows.push_back(mask(true, true, false, false, false, true));     // recon + intra + kl
  rows.push_back(mask(true, false, true, false, false, true));     // recon + inter + kl
  rows.push_back(mask(true, true, true, false, false, true));      // recon + intra + inter + kl
  rows.push_back(mask(true, true, true, true, true, true));        // all
  return rows;
}

std::vector<AblationRow> run_ablation_grid(const EvalPlan& plan, const data::Dataset& dataset,
                                           const std::vector<AblationMask>& rows) {
  std::vector<Variant> variants;
  for (const auto& m : rows) {
    if (!m.ce) throw ConfigError("run_ablation_grid: the ce loss cannot be disabled");
    Variant v;
    v.label = "mask_" + m.label();
    v.weights = plan.train_config.weights;
    if (!m.recon) v.weights.recon = 0;
    if (!m.intra) v.weights.intra = 0;
    if (!m.inter) v.weights.inter = 0;
    if (!m.cycle) v.weights.cycle = 0;
    if (!m.adv) v.weights.adv = 0;
    if (!m.kl) v.weights.kl = 0;
    v.adversarial_updates = m.adv;
    variants.push_back(v);
  }

  auto acc = run_grid(plan, dataset, variants);
  std::vector<AblationRow> out;
  for (size_t i = 0; i < rows.size(); ++i) {
    double sum = 0;
    int64_t n = 0;
    for (const auto& dom : acc[i])
      for (double v : dom) {
        sum += v;
        ++n;
      }
    out.push_back({rows[i], sum / static_cast<double>(n)});
  }
  return out;
}

nets::Networks erm_train(const nets::NetworkConfig& net_cfg, const train::TrainConfig& cfg,
                         const data::Dataset& train_data) {
  cfg.validate();
  auto model = nets::init_parameters(net_cfg, cfg.seed);
  torch::optim::Adam opt_enc(model.encoder->parameters(),
                             torch::optim::AdamOptions(cfg.adam_lr).weight_decay(
                                 cfg.adam_weight_decay));
  torch::optim::SGD opt_cls(model.classifier->parameters(),
                            torch::optim::SGDOptions(cfg.sgd_lr)
                                .momentum(cfg.sgd_momentum)
                                .weight_decay(cfg.sgd_weight_decay));
  Rng rng(derive_seed(cfg.seed, {0x5a3f17u}));

  model.train();
  for (int64_t step = 1; step <= cfg.steps; ++step) {
    auto [images, labels] = data::sample_batch(train_data, cfg.batch, rng);
    auto [sem, feat] = model.encode(images);
    (void)sem;
    auto pred = model.classify(feat);
    auto log_probs = torch::log_softmax(pred.logits, 1);
    auto ce = -log_probs.gather(1, labels.unsqueeze(1)).squeeze(1).mean();
    if (!ce.isfinite().item<bool>())
      throw NumericalError("erm_train: non-finite loss at step " + std::to_string(step));
    opt_enc.zero_grad();
    opt_cls.zero_grad();
    ce.backward();
    opt_enc.step();
    opt_cls.step();
  }
  return model;
}

void export_embeddings(nets::Networks& model, const data::Dataset& dataset,
                       const std::string& features_csv_path, const std::string& pca_csv_path) {
  if (dataset.size() == 0) throw ConfigError("export_embeddings: empty dataset");
  model.eval();
  torch::NoGradGuard no_grad;

  std::vector<torch::Tensor> chunks;
  const int64_t chunk = 256;
  for (int64_t i = 0; i < dataset.size(); i += chunk) {
    const int64_t n = std::min(chunk, dataset.size() - i);
    auto [sem, feat] = model.encode(dataset.images.narrow(0, i, n));
    (void)sem;
    chunks.push_back(feat.values);
  }
  auto features = torch::cat(chunks).to(torch::kFloat64);

  {
    std::ofstream f(features_csv_path, std::ios::trunc);
    if (!f) throw IoError("cannot write " + features_csv_path);
    for (int64_t c = 0; c < features.size(1); ++c) f << "f" << c << ",";
    f << "label,domain_id\n";
    auto acc = features.accessor<double, 2>();
    auto lab = dataset.labels.accessor<int64_t, 1>();
    auto dom = dataset.domains.accessor<int64_t, 1>();
    for (int64_t i = 0; i < features.size(0); ++i) {
      for (int64_t c = 0; c < features.size(1); ++c) f << format_double(acc[i][c]) << ",";
      f << lab[i] << "," << dom[i] << "\n";
    }
  }

  // 2-D PCA of the centered features
  auto centered = features - features.mean(0, /*keepdim=*/true);
  auto cov = centered.t().mm(centered) /
             static_cast<double>(std::max<int64_t>(features.size(0) - 1, 1));
  auto [eigvals, eigvecs] = torch::linalg_eigh(cov);
  const int64_t dim = eigvals.size(0);
  auto basis = torch::stack({eigvecs.select(1, dim - 1), eigvecs.select(1, dim - 2)}, 1);
  auto coords = centered.mm(basis);

  {
    std::ofstream f(pca_csv_path, std::ios::trunc);
    if (!f) throw IoError("cannot write " + pca_csv_path);
    f << "pc1,pc2,label,domain_id\n";
    auto acc = coords.accessor<double, 2>();
    auto lab = dataset.labels.accessor<int64_t, 1>();
    auto dom = dataset.domains.accessor<int64_t, 1>();
    for (int64_t i = 0; i < coords.size(0); ++i) {
      f << format_double(acc[i][0]) << "," << format_double(acc[i][1]) << "," << lab[i] << ","
        << dom[i] << "\n";
    }
  }
}

// ---------------------------------------------------------------------------
// tables and CSV output
// ---------------------------------------------------------------------------

void write_results_csv(const std::vector<ExperimentResult>& results, const std::string& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw IoError("cannot write " + path);
  f << "held_out,seed,accuracy,config_digest\n";
  for (const auto& r : results) {
    if (r.held_out == "Avg") continue;
    for (size_t s = 0; s < r.per_seed_accuracy.size(); ++s) {
      f << r.held_out << "," << s << "," << format_double(r.per_seed_accuracy[s]) << ","
        << r.config_digest << "\n";
    }
  }
}

void write_aggregate_csv(const std::vector<ExperimentResult>& results, const std::string& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw IoError("cannot write " + path);
  f << "held_out,mean,std\n";
  for (const auto& r : results)
    f << r.held_out << "," << format_double(r.mean) << "," << format_double(r.stddev) << "\n";
}

std::string render_results_table(
    const std::vector<std::pair<std::string, std::vector<ExperimentResult>>>& methods) {
  if (methods.empty()) return "";
  std::string out;
  const auto& cols = methods.front().second;
  size_t name_w = 10;
  for (const auto& [name, _] : methods) name_w = std::max(name_w, name.size() + 2);

  auto pad = [](std::string s, size_t w) {
    if (s.size() < w) s.append(w - s.size(), ' ');
    return s;
  };
  out += pad("Method", name_w);
  for (const auto& r : cols) out += pad(r.held_out, 12);
  out += "\n";
  out += std::string(name_w + 12 * cols.size(), '-') + "\n";
  for (const auto& [name, results] : methods) {
    out += pad(name, name_w);
    for (const auto& r : results) out += pad(format_double(r.mean, 1), 12);
    out += "\n";
  }
  return out;
}

void write_ablation_csv(const std::vector<AblationRow>& rows, const std::string& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw IoError("cannot write " + path);
  f << "recon,intra,inter,cycle,adv,ce,kl,mean_accuracy\n";
  for (const auto& r : rows) {
    f << r.mask.recon << "," << r.mask.intra << "," << r.mask.inter << "," << r.mask.cycle << ","
      << r.mask.adv << "," << r.mask.ce << "," << r.mask.kl << ","
      << format_double(r.mean_accuracy) << "\n";
  }
}

std::string render_ablation_table(const std::vector<AblationRow>& rows) {
  const char* headers[] = {"recon", "intra", "inter", "cycle", "adv", "ce", "kl"};
  std::string out;
  for (const char* h : headers) {
    out += h;
    out += std::string(8 - std::string(h).size(), ' ');
  }
  out += "Avg\n";
  out += std::string(8 * 7 + 6, '-') + "\n";
  for (const auto& r : rows) {
    const bool flags[] = {r.mask.recon, r.mask.intra, r.mask.inter, r.mask.cycle,
                          r.mask.adv,   r.mask.ce,    r.mask.kl};
    for (bool f : flags) out += f ? "x       " : "        ";
    out += format_double(r.mean_accuracy, 1) + "\n";
  }
  return out;
}

}  // namespace dsdr::eval
