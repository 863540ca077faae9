#pragma once

#include <torch/torch.h>

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "dsdr/rng.hpp"

namespace dsdr::data {

struct DatasetMeta {
  int64_t classes = 0;                    // K
  int64_t domains = 0;                    // M
  std::vector<std::string> domain_names;  // size M
  std::array<int64_t, 3> image_shape{3, 32, 32};
  std::vector<int64_t> counts;  // per-domain sample counts

  void validate() const;
};

// One domain-tagged labeled sample. Pixels are float32 CHW in [0, 1].
struct LabeledImage {
  torch::Tensor pixels;
  int64_t label = 0;
  int64_t domain_id = 0;
};

// Column-stacked dataset: images (N,C,H,W) float32, labels/domains (N) int64.
// Immutable after construction; all views are cheap tensor slices.
struct Dataset {
  DatasetMeta meta;
  torch::Tensor images;
  torch::Tensor labels;
  torch::Tensor domains;

  int64_t size() const { return images.defined() ? images.size(0) : 0; }
  LabeledImage get(int64_t i) const;
  std::vector<int64_t> indices_of_domain(int64_t domain_id) const;

  // Digest over (domain, label, pixel bytes) in row order; identifies the
  // exact sample set, used for the no-leakage assertions.
  uint64_t manifest_digest() const;
};

// A named, parameterized style operation. Ops earlier in a domain's list
// configure the glyph mask and palette; compositing happens before the
// first post op (blur / contrast / invert), which then apply in order.
enum class StyleOpKind {
  PaletteRecolor,     // pick fg/bg per sample from the given palettes
  BackgroundFill,     // solid background color
  BackgroundTexture,  // additive low-frequency noise on the background
  StrokeDilate,       // max-filter the glyph mask
  Blur,               // gaussian blur of the composited image
  Contrast,           // 0.5 + (x - 0.5) * factor
  Invert,             // 1 - x
};

struct StyleOp {
  StyleOpKind kind;
  std::vector<double> params;                    // kind-specific scalars
  std::vector<std::array<double, 3>> fg_colors;  // PaletteRecolor / BackgroundFill
  std::vector<std::array<double, 3>> bg_colors;
};

struct DomainStyle {
  std::string name;
  std::vector<StyleOp> ops;
};

struct DomainShiftSpec {
  uint64_t seed = 0;
  std::vector<DomainStyle> domains;

  void validate() const;

  // The four canonical style families (plain / palette / texture /
  // inverted), cycled with parameter variations when more are requested.
  static DomainShiftSpec canonical(int64_t num_domains, uint64_t seed);
};

// Procedurally draws K glyph classes under per-domain style transforms.
// Deterministic: (spec, K, per_domain) fully determine every pixel.
Dataset synthesize_domains(const DomainShiftSpec& spec, int64_t classes, int64_t per_domain);

// Renders one glyph class with affine jitter drawn from rng; exposed for
// the label-preservation and determinism tests.
torch::Tensor render_glyph(int64_t glyph, Rng& rng, int64_t height, int64_t width);

// Reads root/<domain>/<class>/*.png|jpg, resizing to image_shape.
Dataset load_directory_dataset(const std::string& root,
                               std::array<int64_t, 3> image_shape = {3, 32, 32});

// Writes the same layout plus a manifest.json sidecar.
void save_directory_dataset(const Dataset& dataset, const std::string& root, bool force,
                            uint64_t seed, const std::string& config_digest = "");

uint64_t manifest_file_digest(const std::string& manifest_path);

struct Split {
  Dataset train;
  Dataset test;
};

Split leave_one_out_split(const Dataset& dataset, int64_t held_out);

struct PairBatch {
  torch::Tensor images_a, images_b;    // (B,C,H,W)
  torch::Tensor labels_a, labels_b;    // (B,)
  torch::Tensor domains_a, domains_b;  // (B,)

  int64_t size() const { return images_a.defined() ? images_a.size(0) : 0; }
};

// Draws rows with domain(A) uniform over source domains and domain(B)
// uniform over the remaining ones; samples uniform within domain. Labels
// are unconstrained.
PairBatch sample_pair_batch(const Dataset& train, int64_t batch, Rng& rng);

// Plain single-stream batch for the ERM baseline.
std::pair<torch::Tensor, torch::Tensor> sample_batch(const Dataset& train, int64_t batch,
                                                     Rng& rng);

}  // namespace dsdr::data
