#include "dsdr/image_io.hpp"

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "dsdr/common.hpp"

namespace dsdr::imgio {

namespace {

cv::Mat to_mat8(const torch::Tensor& chw) {
  auto t = chw.detach().to(torch::kFloat32).clamp(0, 1).contiguous();
  if (t.dim() != 3) throw ShapeError("to_mat8: expected CHW tensor");
  const int c = static_cast<int>(t.size(0));
  const int h = static_cast<int>(t.size(1));
  const int w = static_cast<int>(t.size(2));
  if (c != 3 && c != 1) throw ShapeError("to_mat8: expected 1 or 3 channels");
  cv::Mat mat(h, w, CV_8UC3);
  auto acc = t.accessor<float, 3>();
  for (int y = 0; y < h; ++y) {
    auto* row = mat.ptr<uchar>(y);
    for (int x = 0; x < w; ++x) {
      const float r = acc[0][y][x];
      const float g = acc[c == 3 ? 1 : 0][y][x];
      const float b = acc[c == 3 ? 2 : 0][y][x];
      // OpenCV stores BGR
      row[3 * x + 0] = static_cast<uchar>(std::lround(b * 255.0f));
      row[3 * x + 1] = static_cast<uchar>(std::lround(g * 255.0f));
      row[3 * x + 2] = static_cast<uchar>(std::lround(r * 255.0f));
    }
  }
  return mat;
}

}  // namespace

void write_png(const torch::Tensor& chw, const std::string& path) {
  if (!cv::imwrite(path, to_mat8(chw))) {
    throw IoError("failed to write image: " + path);
  }
}

torch::Tensor read_image(const std::string& path, std::array<int64_t, 3> shape) {
  cv::Mat mat = cv::imread(path, cv::IMREAD_COLOR);
  if (mat.empty()) throw IoError("unreadable image: " + path);
  const int h = static_cast<int>(shape[1]);
  const int w = static_cast<int>(shape[2]);
  if (mat.rows != h || mat.cols != w) {
    cv::Mat resized;
    cv::resize(mat, resized, cv::Size(w, h), 0, 0, cv::INTER_AREA);
    mat = resized;
  }
  auto out = torch::empty({3, h, w}, torch::kFloat32);
  auto acc = out.accessor<float, 3>();
  for (int y = 0; y < h; ++y) {
    const auto* row = mat.ptr<uchar>(y);
    for (int x = 0; x < w; ++x) {
      acc[2][y][x] = static_cast<float>(row[3 * x + 0]) / 255.0f;
      acc[1][y][x] = static_cast<float>(row[3 * x + 1]) / 255.0f;
      acc[0][y][x] = static_cast<float>(row[3 * x + 2]) / 255.0f;
    }
  }
  return out;
}

void write_image_grid(const std::vector<std::vector<torch::Tensor>>& rows,
                      const std::string& path) {
  if (rows.empty() || rows.front().empty()) throw ConfigError("write_image_grid: empty grid");
  const int64_t h = rows.front().front().size(1);
  const int64_t w = rows.front().front().size(2);
  const int64_t pad = 2;
  const int64_t ncols = static_cast<int64_t>(rows.front().size());
  const int64_t nrows = static_cast<int64_t>(rows.size());
  auto canvas = torch::full({3, nrows * (h + pad) + pad, ncols * (w + pad) + pad}, 0.15,
                           torch::kFloat32);
  for (int64_t r = 0; r < nrows; ++r) {
    for (int64_t c = 0; c < static_cast<int64_t>(rows[r].size()); ++c) {
      auto img = rows[r][c].detach().to(torch::kFloat32);
      if (img.size(0) == 1) img = img.repeat({3, 1, 1});
      canvas.slice(1, pad + r * (h + pad), pad + r * (h + pad) + h)
          .slice(2, pad + c * (w + pad), pad + c * (w + pad) + w)
          .copy_(img);
    }
  }
  write_png(canvas, path);
}

}  // namespace dsdr::imgio
