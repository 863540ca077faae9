#include "dsdr/networks.hpp"

#include <ATen/CPUGeneratorImpl.h>

#include <cmath>

#include "dsdr/common.hpp"

namespace F = torch::nn::functional;

namespace dsdr::nets {

void NetworkConfig::validate() const {
  if (image_shape[0] != 3 && image_shape[0] != 1)
    throw ConfigError("network config: image channels must be 1 or 3");
  if (image_shape[1] < 8 || image_shape[2] < 8)
    throw ConfigError("network config: image size too small for two stride-2 blocks");
  if (image_shape[1] % 4 != 0 || image_shape[2] % 4 != 0)
    throw ConfigError("network config: image size must be divisible by 4");
  if (widths.size() != 4) throw ConfigError("network config: expected 4 encoder widths");
  for (auto w : widths)
    if (w < 1) throw ConfigError("network config: widths must be >= 1");
  if (style_channels < 1 || feature_dim < 1)
    throw ConfigError("network config: style_channels and feature_dim must be >= 1");
  if (classes < 2) throw ConfigError("network config: classes must be >= 2");
  if (epsilon <= 0) throw ConfigError("network config: epsilon must be positive");
}

torch::Tensor adain(const torch::Tensor& content, const StyleCode& style, double eps) {
  if (content.dim() != 4) throw ShapeError("adain: content must be (batch, C, H, W)");
  if (style.mean.dim() != 2 || style.std.dim() != 2)
    throw ShapeError("adain: style statistics must be (batch, C)");
  if (content.size(1) != style.mean.size(1) || content.size(1) != style.std.size(1))
    throw ShapeError("adain: channel mismatch, content has " + std::to_string(content.size(1)) +
                     " channels, style has " + std::to_string(style.mean.size(1)));
  if (content.size(0) != style.mean.size(0))
    throw ShapeError("adain: batch mismatch between content and style");

  auto mean = content.mean({2, 3}, /*keepdim=*/true);
  auto var = (content - mean).pow(2).mean({2, 3}, /*keepdim=*/true);  // population
  auto std = var.sqrt().clamp_min(eps);
  auto normalized = (content - mean) / std;
  return normalized * style.std.unsqueeze(-1).unsqueeze(-1) +
         style.mean.unsqueeze(-1).unsqueeze(-1);
}

namespace {

void check_images(const torch::Tensor& images, const NetworkConfig& cfg, const char* who) {
  if (images.dim() != 4 || images.size(1) != cfg.image_shape[0] ||
      images.size(2) != cfg.image_shape[1] || images.size(3) != cfg.image_shape[2])
    throw ShapeError(std::string(who) + ": expected images of shape (batch, " +
                     std::to_string(cfg.image_shape[0]) + ", " +
                     std::to_string(cfg.image_shape[1]) + ", " +
                     std::to_string(cfg.image_shape[2]) + ")");
}

void check_features(const torch::Tensor& f, const NetworkConfig& cfg, const char* who) {
  if (f.dim() != 2 || f.size(1) != cfg.feature_dim)
    throw ShapeError(std::string(who) + ": expected features of shape (batch, " +
                     std::to_string(cfg.feature_dim) + ")");
}

}  // namespace

EncoderImpl::EncoderImpl(const NetworkConfig& c) : cfg(c) {
  namespace nn = torch::nn;
  block1 = register_module(
      "block1", nn::Conv2d(nn::Conv2dOptions(cfg.image_shape[0], cfg.widths[0], 3).stride(2).padding(1)));
  block2 = register_module(
      "block2", nn::Conv2d(nn::Conv2dOptions(cfg.widths[0], cfg.widths[1], 3).stride(2).padding(1)));
  block3 = register_module(
      "block3", nn::Conv2d(nn::Conv2dOptions(cfg.widths[1], cfg.widths[2], 3).stride(1).padding(1)));
  block4 = register_module(
      "block4", nn::Conv2d(nn::Conv2dOptions(cfg.widths[2], cfg.widths[3], 3).stride(1).padding(1)));
  feature_proj = register_module("feature_proj", nn::Linear(cfg.widths[3], cfg.feature_dim));
}

std::pair<SemanticMap, FeatureVector> EncoderImpl::forward(const torch::Tensor& images) {
  check_images(images, cfg, "encode");
  auto h = F::leaky_relu(block1(images), F::LeakyReLUFuncOptions().negative_slope(cfg.leaky_slope));
  h = F::leaky_relu(block2(h), F::LeakyReLUFuncOptions().negative_slope(cfg.leaky_slope));
  h = F::leaky_relu(block3(h), F::LeakyReLUFuncOptions().negative_slope(cfg.leaky_slope));
  auto semantics = block4(h);
  auto pooled = semantics.mean({2, 3});
  auto features = feature_proj(pooled);
  return {SemanticMap{semantics}, FeatureVector{features}};
}

StyleNetImpl::StyleNetImpl(const NetworkConfig& c) : cfg(c) {
  namespace nn = torch::nn;
  conv1 = register_module(
      "conv1", nn::Conv2d(nn::Conv2dOptions(cfg.image_shape[0], cfg.widths[0], 3).stride(2).padding(1)));
  conv2 = register_module(
      "conv2", nn::Conv2d(nn::Conv2dOptions(cfg.widths[0], cfg.widths[1], 3).stride(2).padding(1)));
  conv3 = register_module(
      "conv3", nn::Conv2d(nn::Conv2dOptions(cfg.widths[1], cfg.widths[1], 3).stride(2).padding(1)));
  head = register_module("head", nn::Linear(cfg.widths[1], 2 * cfg.style_channels));
}

StyleCode StyleNetImpl::forward(const torch::Tensor& images) {
  check_images(images, cfg, "extract_style");
  auto h = F::leaky_relu(conv1(images), F::LeakyReLUFuncOptions().negative_slope(cfg.leaky_slope));
  h = F::leaky_relu(conv2(h), F::LeakyReLUFuncOptions().negative_slope(cfg.leaky_slope));
  h = F::leaky_relu(conv3(h), F::LeakyReLUFuncOptions().negative_slope(cfg.leaky_slope));
  auto stats = head(h.mean({2, 3}));
  auto chunks = stats.chunk(2, /*dim=*/1);
  return {chunks[0], torch::softplus(chunks[1]) + cfg.epsilon};
}

GeneratorImpl::GeneratorImpl(const NetworkConfig& c) : cfg(c) {
  namespace nn = torch::nn;
  const auto cg = cfg.style_channels;
  block1 = register_module(
      "block1", nn::Conv2d(nn::Conv2dOptions(cfg.semantic_channels(), cg, 3).padding(1)));
  block2 = register_module("block2", nn::Conv2d(nn::Conv2dOptions(cg, cg, 3).padding(1)));
  block3 = register_module("block3", nn::Conv2d(nn::Conv2dOptions(cg, cg, 3).padding(1)));
  out_conv = register_module("out_conv",
                             nn::Conv2d(nn::Conv2dOptions(cg, cfg.image_shape[0], 3).padding(1)));
}

torch::Tensor GeneratorImpl::forward(const SemanticMap& semantics, const StyleCode& style) {
  const auto& s = semantics.values;
  if (s.dim() != 4 || s.size(1) != cfg.semantic_channels())
    throw ShapeError("generate: semantic map has wrong channel count");
  if (s.size(0) != style.mean.size(0))
    throw ShapeError("generate: semantics batch " + std::to_string(s.size(0)) +
                     " != style batch " + std::to_string(style.mean.size(0)));

  auto slope = F::LeakyReLUFuncOptions().negative_slope(cfg.leaky_slope);
  auto up = F::InterpolateFuncOptions().scale_factor(std::vector<double>{2.0, 2.0}).mode(torch::kNearest);

  auto h = F::leaky_relu(adain(block1(s), style, cfg.epsilon), slope);
  h = F::leaky_relu(adain(block2(h), style, cfg.epsilon), slope);
  h = F::interpolate(h, up);
  h = F::leaky_relu(adain(block3(h), style, cfg.epsilon), slope);
  h = F::interpolate(h, up);
  return torch::sigmoid(out_conv(h));
}

DiscriminatorImpl::DiscriminatorImpl(const NetworkConfig& c) : cfg(c) {
  namespace nn = torch::nn;
  const int64_t hidden = std::max<int64_t>(cfg.feature_dim, 8);
  fc1 = register_module("fc1", nn::Linear(cfg.feature_dim, hidden));
  fc2 = register_module("fc2", nn::Linear(hidden, 1));
}

torch::Tensor DiscriminatorImpl::forward(const FeatureVector& features) {
  check_features(features.values, cfg, "discriminate");
  auto h = F::leaky_relu(fc1(features.values),
                         F::LeakyReLUFuncOptions().negative_slope(cfg.leaky_slope));
  return fc2(h).squeeze(1);
}

ClassifierImpl::ClassifierImpl(const NetworkConfig& c) : cfg(c) {
  fc = register_module("fc", torch::nn::Linear(cfg.feature_dim, cfg.classes));
}

PredictiveDistribution ClassifierImpl::forward(const FeatureVector& features) {
  check_features(features.values, cfg, "classify");
  auto logits = fc(features.values);
  auto probs = torch::softmax(logits, 1).clamp_min(1e-8);
  return {logits, probs};
}

void Networks::train(bool on) {
  encoder->train(on);
  style_net->train(on);
  generator->train(on);
  discriminator->train(on);
  classifier->train(on);
}

void Networks::to(torch::Dtype dtype) {
  encoder->to(dtype);
  style_net->to(dtype);
  generator->to(dtype);
  discriminator->to(dtype);
  classifier->to(dtype);
}

std::vector<std::pair<std::string, torch::Tensor>> Networks::named_parameters() const {
  std::vector<std::pair<std::string, torch::Tensor>> out;
  auto grab = [&](const char* prefix, const auto& module) {
    for (const auto& p : module->named_parameters()) {
      out.emplace_back(std::string(prefix) + "/" + p.key(), p.value());
    }
  };
  grab("encoder", encoder);
  grab("style_net", style_net);
  grab("generator", generator);
  grab("discriminator", discriminator);
  grab("classifier", classifier);
  return out;
}

int64_t Networks::parameter_count() const {
  int64_t n = 0;
  for (const auto& [name, p] : named_parameters()) n += p.numel();
  return n;
}

Networks init_parameters(const NetworkConfig& config, uint64_t seed) {
  config.validate();
  Networks nets;
  nets.config = config;
  nets.encoder = Encoder(config);
  nets.style_net = StyleNet(config);
  nets.generator = Generator(config);
  nets.discriminator = Discriminator(config);
  nets.classifier = Classifier(config);

  auto gen = at::detail::createCPUGenerator(seed);
  torch::NoGradGuard no_grad;
  const double slope = config.leaky_slope;
  for (auto& [name, p] : nets.named_parameters()) {
    if (p.dim() >= 2) {
      // fan-in scaled normal (kaiming, leaky-relu gain)
      int64_t fan_in = p.size(1);
      for (int64_t d = 2; d < p.dim(); ++d) fan_in *= p.size(d);
      double std = std::sqrt(2.0 / ((1.0 + slope * slope) * static_cast<double>(fan_in)));
      if (name == "generator/out_conv.weight") std *= 0.1;  // near mid-gray at init
      p.normal_(0.0, std, gen);
    } else {
      p.zero_();
    }
  }
  return nets;
}

}  // namespace dsdr::nets
