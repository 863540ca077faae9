#pragma once

#include <torch/torch.h>

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace dsdr::nets {

// Spatial content code: (batch, C_s, H_s, W_s).
struct SemanticMap {
  torch::Tensor values;
};

// Per-channel target statistics consumed by adain at the generator's
// modulated layers. std is strictly positive (softplus + floor).
struct StyleCode {
  torch::Tensor mean;  // (batch, C_g)
  torch::Tensor std;   // (batch, C_g)
};

// Pooled representation fed to the classifier and discriminator.
struct FeatureVector {
  torch::Tensor values;  // (batch, F)
};

struct PredictiveDistribution {
  torch::Tensor logits;         // (batch, K)
  torch::Tensor probabilities;  // softmax, clamped to >= 1e-8
};

struct NetworkConfig {
  std::array<int64_t, 3> image_shape{3, 32, 32};
  std::vector<int64_t> widths{16, 32, 64, 64};  // 4 encoder blocks
  int64_t style_channels = 32;                  // C_g
  int64_t feature_dim = 64;                     // F
  int64_t classes = 10;                         // K
  double leaky_slope = 0.2;
  double epsilon = 1e-5;

  int64_t semantic_channels() const { return widths.back(); }
  int64_t semantic_height() const { return image_shape[1] / 4; }
  int64_t semantic_width() const { return image_shape[2] / 4; }
  void validate() const;

  bool operator==(const NetworkConfig&) const = default;
};

// Re-normalizes each channel of `content` to the per-channel target
// statistics in `style`. Population statistics; the spatial std is floored
// at eps so constant channels map to the target mean.
torch::Tensor adain(const torch::Tensor& content, const StyleCode& style, double eps = 1e-5);

// ---------------------------------------------------------------------------
// the five networks
// ---------------------------------------------------------------------------

struct EncoderImpl : torch::nn::Module {
  explicit EncoderImpl(const NetworkConfig& cfg);
  // returns the spatial semantic map and the pooled projected feature
  std::pair<SemanticMap, FeatureVector> forward(const torch::Tensor& images);

  torch::nn::Conv2d block1{nullptr}, block2{nullptr}, block3{nullptr}, block4{nullptr};
  torch::nn::Linear feature_proj{nullptr};
  NetworkConfig cfg;
};
TORCH_MODULE(Encoder);

struct StyleNetImpl : torch::nn::Module {
  explicit StyleNetImpl(const NetworkConfig& cfg);
  StyleCode forward(const torch::Tensor& images);

  torch::nn::Conv2d conv1{nullptr}, conv2{nullptr}, conv3{nullptr};
  torch::nn::Linear head{nullptr};
  NetworkConfig cfg;
};
TORCH_MODULE(StyleNet);

struct GeneratorImpl : torch::nn::Module {
  explicit GeneratorImpl(const NetworkConfig& cfg);
  torch::Tensor forward(const SemanticMap& semantics, const StyleCode& style);

  torch::nn::Conv2d block1{nullptr}, block2{nullptr}, block3{nullptr}, out_conv{nullptr};
  NetworkConfig cfg;
};
TORCH_MODULE(Generator);

struct DiscriminatorImpl : torch::nn::Module {
  explicit DiscriminatorImpl(const NetworkConfig& cfg);
  torch::Tensor forward(const FeatureVector& features);  // (batch,) real logits

  torch::nn::Linear fc1{nullptr}, fc2{nullptr};
  NetworkConfig cfg;
};
TORCH_MODULE(Discriminator);

struct ClassifierImpl : torch::nn::Module {
  explicit ClassifierImpl(const NetworkConfig& cfg);
  PredictiveDistribution forward(const FeatureVector& features);

  torch::nn::Linear fc{nullptr};
  NetworkConfig cfg;
};
TORCH_MODULE(Classifier);

// The full parameter set. Modules share nothing; the trainer owns updates.
struct Networks {
  NetworkConfig config;
  Encoder encoder{nullptr};
  StyleNet style_net{nullptr};
  Generator generator{nullptr};
  Discriminator discriminator{nullptr};
  Classifier classifier{nullptr};

  std::pair<SemanticMap, FeatureVector> encode(const torch::Tensor& images) {
    return encoder->forward(images);
  }
  StyleCode extract_style(const torch::Tensor& images) { return style_net->forward(images); }
  torch::Tensor generate(const SemanticMap& semantics, const StyleCode& style) {
    return generator->forward(semantics, style);
  }
  torch::Tensor discriminate(const FeatureVector& features) {
    return discriminator->forward(features);
  }
  PredictiveDistribution classify(const FeatureVector& features) {
    return classifier->forward(features);
  }

  void train(bool on = true);
  void eval() { train(false); }
  void to(torch::Dtype dtype);

  // stable "<net>/<param>" ordering used by init, checkpointing and tests
  std::vector<std::pair<std::string, torch::Tensor>> named_parameters() const;
  int64_t parameter_count() const;
};

// Deterministic fan-in-scaled initialization; the generator's output layer
// is damped so fresh models emit near mid-gray.
Networks init_parameters(const NetworkConfig& config, uint64_t seed);

}  // namespace dsdr::nets
