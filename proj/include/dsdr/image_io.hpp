#pragma once

#include <torch/torch.h>

#include <array>
#include <string>
#include <vector>

namespace dsdr::imgio {

// float32 CHW [0,1] -> 8-bit RGB png on disk
void write_png(const torch::Tensor& chw, const std::string& path);

// decode + resize to (C,H,W), scaled to [0,1]; throws IoError on failure
torch::Tensor read_image(const std::string& path, std::array<int64_t, 3> shape);

// rows of images (each a vector of CHW tensors) tiled into one png
void write_image_grid(const std::vector<std::vector<torch::Tensor>>& rows,
                      const std::string& path);

}  // namespace dsdr::imgio
