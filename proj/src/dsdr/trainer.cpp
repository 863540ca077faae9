#include "dsdr/trainer.hpp"

#include <chrono>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>

#include "dsdr/common.hpp"
#include "dsdr/image_io.hpp"
#include "nlohmann/json.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace dsdr::train {

void TrainConfig::validate() const {
  if (batch < 2) throw ConfigError("train config: batch must be >= 2");
  if (steps < 0) throw ConfigError("train config: steps must be >= 0");
  if (adam_lr <= 0 || sgd_lr <= 0) throw ConfigError("train config: learning rates must be > 0");
  if (checkpoint_interval < 1 || log_interval < 1)
    throw ConfigError("train config: intervals must be >= 1");
  weights.validate();
}

namespace {

std::vector<torch::Tensor> main_params(const nets::Networks& model) {
  std::vector<torch::Tensor> ps;
  for (const auto& p : model.encoder->parameters()) ps.push_back(p);
  for (const auto& p : model.style_net->parameters()) ps.push_back(p);
  for (const auto& p : model.generator->parameters()) ps.push_back(p);
  return ps;
}

}  // namespace

TrainState init_train_state(const nets::NetworkConfig& net_cfg, const TrainConfig& cfg) {
  cfg.validate();
  TrainState state;
  state.model = nets::init_parameters(net_cfg, cfg.seed);
  state.opt_main = std::make_unique<torch::optim::Adam>(
      main_params(state.model),
      torch::optim::AdamOptions(cfg.adam_lr).weight_decay(cfg.adam_weight_decay));
  state.opt_disc = std::make_unique<torch::optim::Adam>(
      state.model.discriminator->parameters(),
      torch::optim::AdamOptions(cfg.adam_lr).weight_decay(cfg.adam_weight_decay));
  state.opt_cls = std::make_unique<torch::optim::SGD>(
      state.model.classifier->parameters(),
      torch::optim::SGDOptions(cfg.sgd_lr).momentum(cfg.sgd_momentum).weight_decay(
          cfg.sgd_weight_decay));
  state.sampler_rng = Rng(derive_seed(cfg.seed, {0x5a3f17u}));
  return state;
}

losses::LossReport train_step(TrainState& state, const data::PairBatch& batch,
                              const TrainConfig& cfg) {
  auto& model = state.model;
  model.train();
  losses::LossReport report;

  // (1) discriminator sub-update on features with gradients blocked
  // toward E / S / G
  if (cfg.adversarial_updates) {
    torch::Tensor real_feat, fake_feat;
    {
      torch::NoGradGuard no_grad;
      auto ab = torch::cat({batch.images_a, batch.images_b});
      auto style = model.extract_style(ab);
      auto [sem, feat] = model.encode(ab);
      const int64_t b = batch.images_a.size(0);
      nets::SemanticMap swap_sem{sem.values};
      nets::StyleCode swap_style{
          torch::cat({style.mean.narrow(0, b, b), style.mean.narrow(0, 0, b)}),
          torch::cat({style.std.narrow(0, b, b), style.std.narrow(0, 0, b)})};
      auto uq = model.generate(swap_sem, swap_style);
      auto [sem_uq, feat_uq] = model.encode(uq);
      real_feat = feat.values;
      fake_feat = feat_uq.values;
    }
    auto d_real = model.discriminate(nets::FeatureVector{real_feat});
    auto d_fake = model.discriminate(nets::FeatureVector{fake_feat});
    auto [d_loss, d_side_g] = losses::adversarial_losses(d_real, d_fake);
    (void)d_side_g;
    state.opt_disc->zero_grad();
    d_loss.backward();
    state.opt_disc->step();
    report.adv_d = d_loss.item<double>();
  }

  // (2) main sub-update over the full two-stage graph
  auto art = forward_two_stage(model, batch);

  losses::LossTerms terms;
  terms.intra = losses::intra_instance_loss(art.a_feat, art.u_feat, art.b_feat, art.q_feat);
  terms.inter = losses::inter_instance_loss(art.a_feat, art.b_feat, art.u_feat, art.q_feat);
  terms.recon = losses::reconstruction_loss(batch.images_a, art.a_bar, batch.images_b, art.b_bar);
  terms.cycle = losses::cycle_loss(batch.images_a, art.a_prime, batch.images_b, art.b_prime);
  if (cfg.adversarial_updates) {
    auto fake_scores = model.discriminate(
        nets::FeatureVector{torch::cat({art.u_feat.values, art.q_feat.values})});
    auto p_fake = torch::sigmoid(fake_scores).clamp(1e-7, 1 - 1e-7);
    terms.adv_g = -p_fake.log().mean();
  } else {
    terms.adv_g = torch::zeros({}, batch.images_a.options());
  }
  terms.kl = losses::kl_loss(art.a_pred, art.u_pred, art.b_pred, art.q_pred);
  terms.ce = losses::classification_loss(art.a_pred, art.b_pred, art.u_pred, art.q_pred,
                                         batch.labels_a, batch.labels_b);

  auto total = losses::total_loss(terms, cfg.weights);
  if (!total.isfinite().item<bool>())
    throw NumericalError("train_step: non-finite total loss at step " +
                         std::to_string(state.step + 1));

  state.opt_main->zero_grad();
  state.opt_cls->zero_grad();
  total.backward();
  state.opt_main->step();
  state.opt_cls->step();

  report.intra = terms.intra.item<double>();
  report.inter = terms.inter.item<double>();
  report.recon = terms.recon.item<double>();
  report.cycle = terms.cycle.item<double>();
  report.adv_g = terms.adv_g.item<double>();
  report.kl = terms.kl.item<double>();
  report.ce = terms.ce.item<double>();
  report.total = total.item<double>();

  state.step += 1;
  state.running_count += 1;
  const double k = 1.0 / static_cast<double>(state.running_count);
  auto blend = [k](double& mean, double v) { mean += (v - mean) * k; };
  blend(state.running.intra, report.intra);
  blend(state.running.inter, report.inter);
  blend(state.running.recon, report.recon);
  blend(state.running.cycle, report.cycle);
  blend(state.running.adv_d, report.adv_d);
  blend(state.running.adv_g, report.adv_g);
  blend(state.running.kl, report.kl);
  blend(state.running.ce, report.ce);
  blend(state.running.total, report.total);
  return report;
}

namespace {

std::string checkpoint_name(int64_t step) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "checkpoint_%06lld.ckpt", static_cast<long long>(step));
  return buf;
}

void dump_preview(const nets::Networks& model_const, const data::PairBatch& batch,
                  const std::string& path) {
  auto& model = const_cast<nets::Networks&>(model_const);
  torch::NoGradGuard no_grad;
  model.eval();
  auto art = forward_two_stage(model, batch);
  const int64_t rows = std::min<int64_t>(batch.size(), 8);
  std::vector<std::vector<torch::Tensor>> grid;
  for (int64_t i = 0; i < rows; ++i) {
    grid.push_back({batch.images_a[i], art.a_bar[i], art.u[i], art.a_prime[i]});
  }
  imgio::write_image_grid(grid, path);
  model.train();
}

}  // namespace

TrainResult train(const nets::NetworkConfig& net_cfg, const TrainConfig& cfg,
                  const data::Dataset& dataset, int64_t held_out, const TrainOutputs& out,
                  TrainState* resume) {
  net_cfg.validate();
  cfg.validate();
  auto split = data::leave_one_out_split(dataset, held_out);

  int64_t train_domains = 0;
  for (int64_t d = 0; d < split.train.meta.domains; ++d)
    if (split.train.meta.counts[static_cast<size_t>(d)] > 0) ++train_domains;
  if (train_domains < 2)
    throw ConfigError("train: need at least 2 training domains after holding out domain " +
                      std::to_string(held_out));

  TrainResult result;
  if (resume) {
    result.state = std::move(*resume);
  } else {
    result.state = init_train_state(net_cfg, cfg);
  }

  const bool writing = !out.dir.empty();
  std::ofstream metrics;
  if (writing) {
    fs::create_directories(out.dir);
    const auto metrics_path = fs::path(out.dir) / "metrics.csv";
    const bool fresh = result.state.step == 0 || !fs::exists(metrics_path);
    metrics.open(metrics_path, fresh ? std::ios::trunc : std::ios::app);
    if (!metrics) throw IoError("cannot open metrics file: " + metrics_path.string());
    if (fresh) {
      if (!out.config_digest.empty()) metrics << "# config_digest=" << out.config_digest << "\n";
      metrics << "step,intra,inter,recon,cycle,adv_d,adv_g,kl,ce,total,wall_ms\n";
    }
  }

  const auto t0 = std::chrono::steady_clock::now();
  const auto train_digest = to_hex(split.train.manifest_digest());

  auto checkpoint = [&](int64_t step) {
    if (!writing) return;
    const auto path = (fs::path(out.dir) / checkpoint_name(step)).string();
    save_checkpoint(result.state, net_cfg, cfg, path, out.config_digest, train_digest);
  };

  for (int64_t step = result.state.step + 1; step <= cfg.steps; ++step) {
    auto batch = data::sample_pair_batch(split.train, cfg.batch, result.state.sampler_rng);
    auto report = train_step(result.state, batch, cfg);

    if (step % cfg.log_interval == 0) {
      const auto wall = std::chrono::duration_cast<std::chrono::milliseconds>(
                            std::chrono::steady_clock::now() - t0)
                            .count();
      MetricsRow row{step, report, static_cast<uint64_t>(wall)};
      result.log.push_back(row);
      if (writing) {
        metrics << step;
        for (double v : {report.intra, report.inter, report.recon, report.cycle, report.adv_d,
                         report.adv_g, report.kl, report.ce, report.total})
          metrics << "," << format_double(v);
        metrics << "," << row.wall_ms << "\n";
        metrics.flush();
      }
    }
    if (step % cfg.checkpoint_interval == 0 && step != cfg.steps) {
      checkpoint(step);
      if (writing && cfg.dump_previews) {
        dump_preview(result.state.model, batch,
                     (fs::path(out.dir) / ("preview_" + std::to_string(step) + ".png")).string());
      }
    }
  }

  if (writing) {
    const auto path = (fs::path(out.dir) / "checkpoint_final.ckpt").string();
    save_checkpoint(result.state, net_cfg, cfg, path, out.config_digest, train_digest);
  }
  return result;
}

// ---------------------------------------------------------------------------
// checkpoint container
// ---------------------------------------------------------------------------

namespace {

constexpr char kMagic[8] = {'D', 'S', 'D', 'R', 'C', 'K', 'P', '1'};

const char* dtype_tag(torch::Dtype d) {
  switch (d) {
    case torch::kFloat32:
      return "f32";
    case torch::kFloat64:
      return "f64";
    case torch::kInt64:
      return "i64";
    default:
      throw ConfigError("checkpoint: unsupported dtype");
  }
}

torch::Dtype dtype_from_tag(const std::string& tag) {
  if (tag == "f32") return torch::kFloat32;
  if (tag == "f64") return torch::kFloat64;
  if (tag == "i64") return torch::kInt64;
  throw IntegrityError("checkpoint: unknown dtype tag '" + tag + "'");
}

json network_config_to_json(const nets::NetworkConfig& c) {
  json j;
  j["image_shape"] = c.image_shape;
  j["widths"] = c.widths;
  j["style_channels"] = c.style_channels;
  j["feature_dim"] = c.feature_dim;
  j["classes"] = c.classes;
  j["leaky_slope"] = c.leaky_slope;
  j["epsilon"] = c.epsilon;
  return j;
}

nets::NetworkConfig network_config_from_json(const json& j) {
  nets::NetworkConfig c;
  auto shape = j.at("image_shape").get<std::vector<int64_t>>();
  if (shape.size() != 3) throw IntegrityError("checkpoint: bad image_shape");
  c.image_shape = {shape[0], shape[1], shape[2]};
  c.widths = j.at("widths").get<std::vector<int64_t>>();
  c.style_channels = j.at("style_channels").get<int64_t>();
  c.feature_dim = j.at("feature_dim").get<int64_t>();
  c.classes = j.at("classes").get<int64_t>();
  c.leaky_slope = j.at("leaky_slope").get<double>();
  c.epsilon = j.at("epsilon").get<double>();
  return c;
}

json train_config_to_json(const TrainConfig& c) {
  json j;
  j["batch"] = c.batch;
  j["steps"] = c.steps;
  j["weights"] = {c.weights.intra, c.weights.inter, c.weights.recon, c.weights.cycle,
                  c.weights.adv,   c.weights.kl,    c.weights.ce};
  j["adam_lr"] = c.adam_lr;
  j["adam_weight_decay"] = c.adam_weight_decay;
  j["sgd_lr"] = c.sgd_lr;
  j["sgd_momentum"] = c.sgd_momentum;
  j["sgd_weight_decay"] = c.sgd_weight_decay;
  j["seed"] = c.seed;
  j["checkpoint_interval"] = c.checkpoint_interval;
  j["log_interval"] = c.log_interval;
  j["adversarial_updates"] = c.adversarial_updates;
  j["dump_previews"] = c.dump_previews;
  return j;
}

TrainConfig train_config_from_json(const json& j) {
  TrainConfig c;
  c.batch = j.at("batch").get<int64_t>();
  c.steps = j.at("steps").get<int64_t>();
  auto w = j.at("weights").get<std::vector<double>>();
  if (w.size() != 7) throw IntegrityError("checkpoint: bad weights");
  c.weights = {w[0], w[1], w[2], w[3], w[4], w[5], w[6]};
  c.adam_lr = j.at("adam_lr").get<double>();
  c.adam_weight_decay = j.at("adam_weight_decay").get<double>();
  c.sgd_lr = j.at("sgd_lr").get<double>();
  c.sgd_momentum = j.at("sgd_momentum").get<double>();
  c.sgd_weight_decay = j.at("sgd_weight_decay").get<double>();
  c.seed = j.at("seed").get<uint64_t>();
  c.checkpoint_interval = j.at("checkpoint_interval").get<int64_t>();
  c.log_interval = j.at("log_interval").get<int64_t>();
  c.adversarial_updates = j.at("adversarial_updates").get<bool>();
  c.dump_previews = j.at("dump_previews").get<bool>();
  return c;
}

json report_to_json(const losses::LossReport& r) {
  json j;
  j["intra"] = r.intra;
  j["inter"] = r.inter;
  j["recon"] = r.recon;
  j["cycle"] = r.cycle;
  j["adv_d"] = r.adv_d;
  j["adv_g"] = r.adv_g;
  j["kl"] = r.kl;
  j["ce"] = r.ce;
  j["total"] = r.total;
  return j;
}

losses::LossReport report_from_json(const json& j) {
  losses::LossReport r;
  r.intra = j.at("intra").get<double>();
  r.inter = j.at("inter").get<double>();
  r.recon = j.at("recon").get<double>();
  r.cycle = j.at("cycle").get<double>();
  r.adv_d = j.at("adv_d").get<double>();
  r.adv_g = j.at("adv_g").get<double>();
  r.kl = j.at("kl").get<double>();
  r.ce = j.at("ce").get<double>();
  r.total = j.at("total").get<double>();
  return r;
}

struct NamedTensor {
  std::string name;
  torch::Tensor tensor;
};

// every tensor the checkpoint must capture, in stable order
std::vector<NamedTensor> collect_tensors(const TrainState& state) {
  std::vector<NamedTensor> out;
  for (const auto& [name, p] : state.model.named_parameters())
    out.push_back({"param/" + name, p});

  auto collect_adam = [&](const char* tag, torch::optim::Adam& opt,
                          const std::vector<std::pair<std::string, torch::Tensor>>& named) {
    auto& st = opt.state();
    for (const auto& [name, p] : named) {
      auto it = st.find(p.unsafeGetTensorImpl());
      if (it == st.end()) continue;
      auto* s = static_cast<torch::optim::AdamParamState*>(it->second.get());
      out.push_back({std::string(tag) + "/" + name + "/exp_avg", s->exp_avg()});
      out.push_back({std::string(tag) + "/" + name + "/exp_avg_sq", s->exp_avg_sq()});
      out.push_back({std::string(tag) + "/" + name + "/step",
                     torch::tensor(s->step(), torch::kInt64)});
    }
  };
  auto named = state.model.named_parameters();
  std::vector<std::pair<std::string, torch::Tensor>> main_named, disc_named, cls_named;
  for (const auto& np : named) {
    if (np.first.rfind("encoder/", 0) == 0 || np.first.rfind("style_net/", 0) == 0 ||
        np.first.rfind("generator/", 0) == 0)
      main_named.push_back(np);
    else if (np.first.rfind("discriminator/", 0) == 0)
      disc_named.push_back(np);
    else
      cls_named.push_back(np);
  }
  collect_adam("adam_main", *state.opt_main, main_named);
  collect_adam("adam_disc", *state.opt_disc, disc_named);

  auto& st = state.opt_cls->state();
  for (const auto& [name, p] : cls_named) {
    auto it = st.find(p.unsafeGetTensorImpl());
    if (it == st.end()) continue;
    auto* s = static_cast<torch::optim::SGDParamState*>(it->second.get());
    if (s->momentum_buffer().defined())
      out.push_back({"sgd_cls/" + name + "/momentum", s->momentum_buffer()});
  }
  return out;
}

}  // namespace

void save_checkpoint(const TrainState& state, const nets::NetworkConfig& net_cfg,
                     const TrainConfig& cfg, const std::string& path,
                     const std::string& config_digest,
                     const std::string& dataset_manifest_digest) {
  auto tensors = collect_tensors(state);

  json header;
  header["step"] = state.step;
  header["sampler_rng"] = state.sampler_rng.serialize();
  header["running_count"] = state.running_count;
  header["running"] = report_to_json(state.running);
  header["network_config"] = network_config_to_json(net_cfg);
  header["train_config"] = train_config_to_json(cfg);
  json dir = json::array();
  for (const auto& nt : tensors) {
    json e;
    e["name"] = nt.name;
    e["dtype"] = dtype_tag(nt.tensor.scalar_type());
    e["shape"] = nt.tensor.sizes().vec();
    dir.push_back(e);
  }
  header["tensors"] = dir;
  const std::string header_bytes = header.dump();

  std::string payload;
  uint32_t hlen = static_cast<uint32_t>(header_bytes.size());
  payload.append(reinterpret_cast<const char*>(&hlen), 4);
  payload.append(header_bytes);
  for (const auto& nt : tensors) {
    auto t = nt.tensor.detach().contiguous();
    payload.append(static_cast<const char*>(t.data_ptr()),
                   static_cast<size_t>(t.numel() * t.element_size()));
  }

  std::string blob;
  blob.append(kMagic, 8);
  uint64_t plen = payload.size();
  blob.append(reinterpret_cast<const char*>(&plen), 8);
  blob.append(payload);
  uint64_t digest = fnv1a64(blob);
  blob.append(reinterpret_cast<const char*>(&digest), 8);

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write checkpoint: " + path);
  f.write(blob.data(), static_cast<std::streamsize>(blob.size()));
  if (!f) throw IoError("short write on checkpoint: " + path);
  f.close();

  json side;
  side["config"] = {{"network", network_config_to_json(net_cfg)},
                    {"train", train_config_to_json(cfg)}};
  side["config_digest"] = config_digest;
  side["step"] = state.step;
  side["last_report"] = report_to_json(state.running);
  side["dataset_manifest_digest"] = dataset_manifest_digest;
  side["checkpoint_digest"] = to_hex(digest);
  std::ofstream sf(path + ".json", std::ios::trunc);
  sf << side.dump(2) << "\n";
  if (!sf) throw IoError("cannot write checkpoint sidecar: " + path + ".json");
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot read checkpoint: " + path);
  std::string blob((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());

  if (blob.size() < 24 || std::memcmp(blob.data(), kMagic, 8) != 0)
    throw IntegrityError("checkpoint: bad magic or truncated file: " + path);
  uint64_t plen;
  std::memcpy(&plen, blob.data() + 8, 8);
  if (blob.size() != 16 + plen + 8)
    throw IntegrityError("checkpoint: truncated file, expected " + std::to_string(16 + plen + 8) +
                         " bytes, found " + std::to_string(blob.size()));
  uint64_t stored;
  std::memcpy(&stored, blob.data() + 16 + plen, 8);
  uint64_t actual = fnv1a64(blob.data(), 16 + plen);
  if (stored != actual)
    throw IntegrityError("checkpoint: digest mismatch, expected " + to_hex(stored) + ", found " +
                         to_hex(actual));

  const char* p = blob.data() + 16;
  uint32_t hlen;
  std::memcpy(&hlen, p, 4);
  if (hlen + 4 > plen) throw IntegrityError("checkpoint: header overruns payload");
  json header = json::parse(std::string(p + 4, hlen));
  const char* data = p + 4 + hlen;
  const char* end = blob.data() + 16 + plen;

  LoadedCheckpoint out;
  out.net_config = network_config_from_json(header.at("network_config"));
  out.train_config = train_config_from_json(header.at("train_config"));
  out.state = init_train_state(out.net_config, out.train_config);
  out.state.step = header.at("step").get<int64_t>();
  out.state.sampler_rng = Rng::deserialize(header.at("sampler_rng").get<std::string>());
  out.state.running_count = header.at("running_count").get<int64_t>();
  out.state.running = report_from_json(header.at("running"));

  // read the tensor blob into a name -> tensor map
  std::map<std::string, torch::Tensor> loaded;
  for (const auto& e : header.at("tensors")) {
    const auto name = e.at("name").get<std::string>();
    const auto dtype = dtype_from_tag(e.at("dtype").get<std::string>());
    const auto shape = e.at("shape").get<std::vector<int64_t>>();
    auto t = torch::empty(shape, dtype);
    const size_t bytes = static_cast<size_t>(t.numel() * t.element_size());
    if (data + bytes > end) throw IntegrityError("checkpoint: tensor data overruns payload");
    std::memcpy(t.data_ptr(), data, bytes);
    data += bytes;
    loaded[name] = t;
  }
  if (data != end) throw IntegrityError("checkpoint: trailing bytes in payload");

  // restore parameters
  {
    torch::NoGradGuard no_grad;
    for (auto& [name, param] : out.state.model.named_parameters()) {
      auto it = loaded.find("param/" + name);
      if (it == loaded.end()) throw IntegrityError("checkpoint: missing parameter " + name);
      param.copy_(it->second);
    }
  }

  // restore optimizer state
  auto restore_adam = [&](const char* tag, torch::optim::Adam& opt, const std::string& prefix) {
    for (auto& [name, param] : out.state.model.named_parameters()) {
      if (name.rfind(prefix, 0) != 0 && prefix != "*") continue;
      auto base = std::string(tag) + "/" + name;
      auto it = loaded.find(base + "/exp_avg");
      if (it == loaded.end()) continue;
      auto s = std::make_unique<torch::optim::AdamParamState>();
      s->step(loaded.at(base + "/step").item<int64_t>());
      s->exp_avg(it->second.clone());
      s->exp_avg_sq(loaded.at(base + "/exp_avg_sq").clone());
      opt.state()[param.unsafeGetTensorImpl()] = std::move(s);
    }
  };
  restore_adam("adam_main", *out.state.opt_main, "encoder/");
  restore_adam("adam_main", *out.state.opt_main, "style_net/");
  restore_adam("adam_main", *out.state.opt_main, "generator/");
  restore_adam("adam_disc", *out.state.opt_disc, "discriminator/");

  for (auto& [name, param] : out.state.model.named_parameters()) {
    auto it = loaded.find("sgd_cls/" + name + "/momentum");
    if (it == loaded.end()) continue;
    auto s = std::make_unique<torch::optim::SGDParamState>();
    s->momentum_buffer(it->second.clone());
    out.state.opt_cls->state()[param.unsafeGetTensorImpl()] = std::move(s);
  }
  return out;
}

void write_metrics_csv(const std::vector<MetricsRow>& log, const std::string& path,
                       const std::string& config_digest) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw IoError("cannot write metrics: " + path);
  if (!config_digest.empty()) f << "# config_digest=" << config_digest << "\n";
  f << "step,intra,inter,recon,cycle,adv_d,adv_g,kl,ce,total,wall_ms\n";
  for (const auto& row : log) {
    f << row.step;
    for (double v : {row.report.intra, row.report.inter, row.report.recon, row.report.cycle,
                     row.report.adv_d, row.report.adv_g, row.report.kl, row.report.ce,
                     row.report.total})
      f << "," << format_double(v);
    f << "," << row.wall_ms << "\n";
  }
}

}  // namespace dsdr::train
