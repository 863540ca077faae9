#include <ATen/Parallel.h>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "dsdr/common.hpp"
#include "dsdr/config.hpp"
#include "dsdr/data.hpp"
#include "dsdr/evaluation.hpp"
#include "dsdr/report.hpp"
#include "dsdr/trainer.hpp"

namespace fs = std::filesystem;
using namespace dsdr;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

int64_t resolve_domain(const data::DatasetMeta& meta, const std::string& name) {
  for (int64_t d = 0; d < meta.domains; ++d) {
    if (meta.domain_names[static_cast<size_t>(d)] == name) return d;
  }
  std::string valid;
  for (const auto& n : meta.domain_names) valid += (valid.empty() ? "" : ", ") + n;
  throw ConfigError("unknown domain '" + name + "'; valid names: " + valid);
}

void refuse_existing(const fs::path& p, bool force, const std::string& what) {
  if (force) return;
  if (fs::exists(p) && (!fs::is_directory(p) || !fs::is_empty(p)))
    throw ConfigError(what + " already exists (use --force): " + p.string());
}

int cmd_synth_data(int64_t domains, int64_t per_domain, int64_t classes, uint64_t seed,
                   const std::string& out, bool force) {
  auto spec = data::DomainShiftSpec::canonical(domains, seed);
  auto dataset = data::synthesize_domains(spec, classes, per_domain);
  data::save_directory_dataset(dataset, out, force, seed);
  const auto digest = data::manifest_file_digest((fs::path(out) / "manifest.json").string());
  std::cout << "wrote " << dataset.size() << " images across " << domains << " domains to " << out
            << "\n";
  std::cout << "manifest_digest: " << to_hex(digest) << "\n";
  return 0;
}

int cmd_train(const std::string& config_path, const std::string& held_out,
              const std::string& out_override, bool force) {
  auto cfg = cfg::ExperimentConfig::parse_file(config_path);
  if (!out_override.empty()) cfg.output_dir = out_override;

  auto dataset = cfg.load_dataset();
  cfg.network.classes = dataset.meta.classes;
  const int64_t domain = resolve_domain(dataset.meta, held_out);

  const fs::path run_dir = fs::path(cfg.output_dir) / ("train_" + held_out);
  refuse_existing(run_dir / "metrics.csv", force, "training output");
  train::TrainOutputs outputs{run_dir.string(), cfg.digest()};
  auto result = train::train(cfg.network, cfg.train, dataset, domain, outputs);

  auto split = data::leave_one_out_split(dataset, domain);
  const double acc = eval::evaluate_accuracy(result.state.model, split.test);
  std::cout << "trained " << result.state.step << " steps; held-out '" << held_out
            << "' accuracy: " << format_double(acc) << "\n";
  std::cout << "outputs: " << run_dir.string() << "\n";
  return 0;
}

int cmd_eval(const std::string& checkpoint, const std::string& dataset_dir,
             const std::string& held_out, const std::string& results_csv) {
  auto loaded = train::load_checkpoint(checkpoint);
  auto dataset = data::load_directory_dataset(dataset_dir, loaded.net_config.image_shape);
  const int64_t domain = resolve_domain(dataset.meta, held_out);
  auto split = data::leave_one_out_split(dataset, domain);
  const double acc = eval::evaluate_accuracy(loaded.state.model, split.test);
  std::cout << "accuracy: " << format_double(acc) << "\n";

  const std::string path =
      results_csv.empty() ? (fs::path(checkpoint).parent_path() / "eval_results.csv").string()
                          : results_csv;
  const bool fresh = !fs::exists(path);
  std::ofstream f(path, std::ios::app);
  if (!f) throw IoError("cannot append results csv: " + path);
  if (fresh) f << "held_out,accuracy,checkpoint\n";
  f << held_out << "," << format_double(acc) << "," << checkpoint << "\n";
  return 0;
}

std::vector<eval::AblationMask> parse_rows_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot read rows file: " + path);
  std::vector<eval::AblationMask> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    // trim
    while (!line.empty() && (line.back() == ' ' || line.back() == '\r' || line.back() == '\t'))
      line.pop_back();
    size_t b = line.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    line = line.substr(b);

    eval::AblationMask mask{false, false, false, false, false, false, false};
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      const auto tb = tok.find_first_not_of(" \t");
      const auto te = tok.find_last_not_of(" \t");
      if (tb == std::string::npos)
        throw ConfigError("rows file line " + std::to_string(lineno) + ": empty loss name");
      tok = tok.substr(tb, te - tb + 1);
      if (tok == "recon") mask.recon = true;
      else if (tok == "intra") mask.intra = true;
      else if (tok == "inter") mask.inter = true;
      else if (tok == "cycle") mask.cycle = true;
      else if (tok == "adv") mask.adv = true;
      else if (tok == "ce") mask.ce = true;
      else if (tok == "kl") mask.kl = true;
      else
        throw ConfigError("rows file line " + std::to_string(lineno) + ": unknown loss '" + tok +
                          "'");
    }
    if (!mask.ce)
      throw ConfigError("rows file line " + std::to_string(lineno) +
                        ": the ce loss cannot be disabled");
    rows.push_back(mask);
  }
  if (rows.empty()) throw ConfigError("rows file contains no rows: " + path);
  return rows;
}

int cmd_ablate(const std::string& config_path, const std::string& rows_arg,
               const std::string& out_override, bool force) {
  auto cfg = cfg::ExperimentConfig::parse_file(config_path);
  if (!out_override.empty()) cfg.output_dir = out_override;

  auto rows = rows_arg == "default" ? eval::default_ablation_rows() : parse_rows_file(rows_arg);

  auto dataset = cfg.load_dataset();
  cfg.network.classes = dataset.meta.classes;

  const fs::path out_dir = fs::path(cfg.output_dir) / "ablation";
  refuse_existing(out_dir / "ablation.csv", force, "ablation output");
  fs::create_directories(out_dir);

  eval::EvalPlan plan{cfg.network, cfg.train, cfg.eval.seeds, cfg.eval.jobs, out_dir.string(),
                      cfg.digest()};
  auto grid = eval::run_ablation_grid(plan, dataset, rows);

  eval::write_ablation_csv(grid, (out_dir / "ablation.csv").string());
  const auto table = eval::render_ablation_table(grid);
  std::ofstream tf(out_dir / "ablation_table.txt", std::ios::trunc);
  tf << table;
  std::cout << table;
  std::cout << "outputs: " << out_dir.string() << "\n";
  return 0;
}

int cmd_report(const std::string& results_dir, bool force) {
  const auto table = report::generate_report(results_dir, force);
  if (!table.empty()) std::cout << table;
  std::cout << "report written under " << results_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  at::set_num_threads(1);

  CLI::App app{"dsdrnet: dual-stream disentangle-and-reconstruct domain generalization"};
  app.require_subcommand(1);

  // synth-data
  auto* synth = app.add_subcommand("synth-data", "synthesize a domain-shifted glyph dataset");
  int64_t domains = 4, per_domain = 500, classes = 10;
  uint64_t seed = 7;
  std::string out;
  bool force = false;
  synth->add_option("--domains", domains, "number of style domains (>= 2)")
      ->check(CLI::Range(int64_t(2), int64_t(64)));
  synth->add_option("--per-domain", per_domain, "samples per domain");
  synth->add_option("--classes", classes, "glyph classes (2-10)");
  synth->add_option("--seed", seed, "generation seed");
  synth->add_option("--out", out, "output dataset directory")->required();
  synth->add_flag("--force", force, "overwrite an existing non-empty directory");

  // train
  auto* tr = app.add_subcommand("train", "train on all domains except one");
  std::string config_path, held_out, out_override;
  bool tr_force = false;
  tr->add_option("--config", config_path, "experiment config file")->required();
  tr->add_option("--held-out", held_out, "domain name to hold out")->required();
  tr->add_option("--out", out_override, "override [output] dir");
  tr->add_flag("--force", tr_force, "overwrite an existing run directory");

  // eval
  auto* ev = app.add_subcommand("eval", "evaluate a checkpoint on a held-out domain");
  std::string ckpt, eval_data, eval_held, results_csv;
  ev->add_option("--checkpoint", ckpt, "checkpoint file")->required();
  ev->add_option("--data", eval_data, "dataset directory")->required();
  ev->add_option("--held-out", eval_held, "domain name to evaluate")->required();
  ev->add_option("--results-csv", results_csv, "results csv to append to");

  // ablate
  auto* ab = app.add_subcommand("ablate", "run the loss-ablation grid");
  std::string ab_config, ab_rows = "default", ab_out;
  bool ab_force = false;
  ab->add_option("--config", ab_config, "experiment config file")->required();
  ab->add_option("--rows", ab_rows, "'default' or a rows file (loss names per line)");
  ab->add_option("--out", ab_out, "override [output] dir");
  ab->add_flag("--force", ab_force, "overwrite existing ablation outputs");

  // report
  auto* rp = app.add_subcommand("report", "render tables and loss curves from a results dir");
  std::string results_dir;
  bool rp_force = false;
  rp->add_option("--results", results_dir, "results directory")->required();
  rp->add_flag("--force", rp_force, "overwrite existing report files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (synth->parsed()) return cmd_synth_data(domains, per_domain, classes, seed, out, force);
    if (tr->parsed()) return cmd_train(config_path, held_out, out_override, tr_force);
    if (ev->parsed()) return cmd_eval(ckpt, eval_data, eval_held, results_csv);
    if (ab->parsed()) return cmd_ablate(ab_config, ab_rows, ab_out, ab_force);
    if (rp->parsed()) return cmd_report(results_dir, rp_force);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const SchemaError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IntegrityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
