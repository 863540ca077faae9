#include "dsdr/data.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include "dsdr/common.hpp"
#include "dsdr/image_io.hpp"
#include "nlohmann/json.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace dsdr::data {

void DatasetMeta::validate() const {
  if (classes < 2) throw ConfigError("dataset meta: need at least 2 classes");
  if (domains < 2) throw ConfigError("dataset meta: need at least 2 domains");
  if (static_cast<int64_t>(domain_names.size()) != domains)
    throw ConfigError("dataset meta: domain_names size mismatch");
  if (static_cast<int64_t>(counts.size()) != domains)
    throw ConfigError("dataset meta: counts size mismatch");
}

LabeledImage Dataset::get(int64_t i) const {
  if (i < 0 || i >= size()) throw ConfigError("Dataset::get: index out of range");
  return {images[i], labels[i].item<int64_t>(), domains[i].item<int64_t>()};
}

std::vector<int64_t> Dataset::indices_of_domain(int64_t domain_id) const {
  std::vector<int64_t> out;
  auto acc = domains.accessor<int64_t, 1>();
  for (int64_t i = 0; i < size(); ++i) {
    if (acc[i] == domain_id) out.push_back(i);
  }
  return out;
}

uint64_t Dataset::manifest_digest() const {
  uint64_t h = 0xcbf29ce484222325ull;
  auto img = images.contiguous();
  auto lab = labels.accessor<int64_t, 1>();
  auto dom = domains.accessor<int64_t, 1>();
  const int64_t row_bytes = img.numel() / std::max<int64_t>(size(), 1) * 4;
  const auto* base = static_cast<const unsigned char*>(img.data_ptr());
  for (int64_t i = 0; i < size(); ++i) {
    int64_t meta[2] = {dom[i], lab[i]};
    h = fnv1a64(meta, sizeof(meta), h);
    h = fnv1a64(base + i * row_bytes, static_cast<size_t>(row_bytes), h);
  }
  return h;
}

void DomainShiftSpec::validate() const {
  if (domains.size() < 2) throw ConfigError("domain shift spec: need at least 2 domains");
  for (const auto& d : domains) {
    if (d.ops.empty())
      throw ConfigError("domain shift spec: domain '" + d.name + "' has an empty transform list");
  }
}

// ---------------------------------------------------------------------------
// glyph rendering
// ---------------------------------------------------------------------------

namespace {

struct Seg {
  double x0, y0, x1, y1;
};

void add_poly(std::vector<Seg>& segs, std::initializer_list<std::pair<double, double>> pts) {
  auto it = pts.begin();
  auto prev = *it++;
  for (; it != pts.end(); ++it) {
    segs.push_back({prev.first, prev.second, it->first, it->second});
    prev = *it;
  }
}

// appends an elliptical arc sampled as a polyline; angles in degrees,
// y axis points down
void add_arc(std::vector<Seg>& segs, double cx, double cy, double rx, double ry, double a0,
             double a1, int n = 10) {
  double prev_x = 0, prev_y = 0;
  for (int i = 0; i <= n; ++i) {
    const double a = (a0 + (a1 - a0) * i / n) * M_PI / 180.0;
    const double x = cx + rx * std::cos(a);
    const double y = cy + ry * std::sin(a);
    if (i > 0) segs.push_back({prev_x, prev_y, x, y});
    prev_x = x;
    prev_y = y;
  }
}

// Stroke skeletons for the ten glyph classes, in [0,1]^2 with y down.
std::vector<Seg> glyph_segments(int64_t glyph) {
  std::vector<Seg> s;
  switch (glyph) {
    case 0:
      add_arc(s, 0.50, 0.50, 0.24, 0.36, 0, 360, 16);
      break;
    case 1:
      add_poly(s, {{0.36, 0.26}, {0.54, 0.10}, {0.54, 0.90}});
      add_poly(s, {{0.38, 0.90}, {0.70, 0.90}});
      break;
    case 2:
      add_arc(s, 0.50, 0.32, 0.24, 0.22, 150, 370, 10);
      add_poly(s, {{0.72, 0.40}, {0.28, 0.90}, {0.76, 0.90}});
      break;
    case 3:
      add_arc(s, 0.48, 0.30, 0.22, 0.20, 140, 395, 10);
      add_arc(s, 0.48, 0.70, 0.24, 0.22, -35, 220, 10);
      break;
    case 4:
      add_poly(s, {{0.60, 0.10}, {0.26, 0.62}, {0.80, 0.62}});
      add_poly(s, {{0.62, 0.34}, {0.62, 0.92}});
      break;
    case 5:
      add_poly(s, {{0.72, 0.10}, {0.32, 0.10}, {0.30, 0.46}});
      add_arc(s, 0.50, 0.66, 0.24, 0.24, -80, 165, 10);
      break;
    case 6:
      add_arc(s, 0.50, 0.66, 0.23, 0.24, 0, 360, 14);
      add_poly(s, {{0.64, 0.10}, {0.40, 0.50}});
      break;
    case 7:
      add_poly(s, {{0.26, 0.12}, {0.76, 0.12}, {0.42, 0.92}});
      break;
    case 8:
      add_arc(s, 0.50, 0.30, 0.19, 0.19, 0, 360, 12);
      add_arc(s, 0.50, 0.70, 0.23, 0.22, 0, 360, 12);
      break;
    case 9:
      add_arc(s, 0.50, 0.34, 0.23, 0.24, 0, 360, 14);
      add_poly(s, {{0.72, 0.42}, {0.54, 0.92}});
      break;
    default:
      throw ConfigError("glyph_segments: glyph index out of range");
  }
  return s;
}

double dist_to_seg(double px, double py, const Seg& s) {
  const double dx = s.x1 - s.x0, dy = s.y1 - s.y0;
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0 ? ((px - s.x0) * dx + (py - s.y0) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const double cx = s.x0 + t * dx, cy = s.y0 + t * dy;
  return std::hypot(px - cx, py - cy);
}

}  // namespace

torch::Tensor render_glyph(int64_t glyph, Rng& rng, int64_t height, int64_t width) {
  auto segs = glyph_segments(glyph);

  // affine jitter: rotation, isotropic scale, translation (in pixels)
  const double angle = rng.uniform(-0.18, 0.18);  // ~10 degrees
  const double scale = rng.uniform(0.88, 1.10);
  const double tx = rng.uniform(-2.0, 2.0);
  const double ty = rng.uniform(-2.0, 2.0);
  const double ca = std::cos(angle), sa = std::sin(angle);

  const double w = static_cast<double>(width), h = static_cast<double>(height);
  auto map_pt = [&](double& x, double& y) {
    const double gx = (x - 0.5) * scale, gy = (y - 0.5) * scale;
    x = (0.5 + gx * ca - gy * sa) * w + tx;
    y = (0.5 + gx * sa + gy * ca) * h + ty;
  };
  for (auto& s : segs) {
    map_pt(s.x0, s.y0);
    map_pt(s.x1, s.y1);
  }

  const double half_stroke = 1.35 * scale * (w / 32.0);
  auto mask = torch::zeros({height, width}, torch::kFloat32);
  auto acc = mask.accessor<float, 2>();
  for (int64_t y = 0; y < height; ++y) {
    for (int64_t x = 0; x < width; ++x) {
      const double px = x + 0.5, py = y + 0.5;
      double d = 1e9;
      for (const auto& s : segs) d = std::min(d, dist_to_seg(px, py, s));
      acc[y][x] = static_cast<float>(std::clamp(0.5 + (half_stroke - d), 0.0, 1.0));
    }
  }
  return mask;
}

// ---------------------------------------------------------------------------
// style transforms
// ---------------------------------------------------------------------------

namespace {

torch::Tensor max_filter(const torch::Tensor& mask, int64_t radius) {
  if (radius <= 0) return mask;
  auto out = mask.clone();
  auto src = mask.accessor<float, 2>();
  auto dst = out.accessor<float, 2>();
  const int64_t h = mask.size(0), w = mask.size(1);
  for (int64_t y = 0; y < h; ++y) {
    for (int64_t x = 0; x < w; ++x) {
      float m = 0;
      for (int64_t dy = -radius; dy <= radius; ++dy) {
        for (int64_t dx = -radius; dx <= radius; ++dx) {
          const int64_t yy = y + dy, xx = x + dx;
          if (yy < 0 || yy >= h || xx < 0 || xx >= w) continue;
          m = std::max(m, src[yy][xx]);
        }
      }
      dst[y][x] = m;
    }
  }
  return out;
}

torch::Tensor gaussian_blur(const torch::Tensor& img, double sigma) {
  if (sigma <= 0) return img;
  const int64_t radius = std::max<int64_t>(1, static_cast<int64_t>(std::ceil(3 * sigma)));
  std::vector<float> k(2 * radius + 1);
  float sum = 0;
  for (int64_t i = -radius; i <= radius; ++i) {
    k[i + radius] = static_cast<float>(std::exp(-0.5 * (i * i) / (sigma * sigma)));
    sum += k[i + radius];
  }
  for (auto& v : k) v /= sum;
  auto kernel = torch::from_blob(k.data(), {2 * radius + 1}, torch::kFloat32).clone();
  // separable passes via conv1d over rows then columns
  auto x = img.unsqueeze(0);  // (1,C,H,W)
  namespace F = torch::nn::functional;
  auto kx = kernel.view({1, 1, 1, 2 * radius + 1}).repeat({img.size(0), 1, 1, 1});
  auto ky = kernel.view({1, 1, 2 * radius + 1, 1}).repeat({img.size(0), 1, 1, 1});
  x = F::conv2d(F::pad(x, F::PadFuncOptions({radius, radius, 0, 0}).mode(torch::kReplicate)), kx,
                F::Conv2dFuncOptions().groups(img.size(0)));
  x = F::conv2d(F::pad(x, F::PadFuncOptions({0, 0, radius, radius}).mode(torch::kReplicate)), ky,
                F::Conv2dFuncOptions().groups(img.size(0)));
  return x.squeeze(0);
}

// coarse value-noise field upsampled bilinearly
torch::Tensor smooth_noise(int64_t height, int64_t width, int64_t cells, Rng& rng) {
  auto grid = torch::empty({1, 1, cells + 1, cells + 1}, torch::kFloat32);
  auto gacc = grid.accessor<float, 4>();
  for (int64_t y = 0; y <= cells; ++y)
    for (int64_t x = 0; x <= cells; ++x) gacc[0][0][y][x] = static_cast<float>(rng.u01());
  namespace F = torch::nn::functional;
  auto up = F::interpolate(grid, F::InterpolateFuncOptions()
                                     .size(std::vector<int64_t>{height, width})
                                     .mode(torch::kBilinear)
                                     .align_corners(true));
  return up.squeeze(0).squeeze(0);
}

torch::Tensor apply_style(const torch::Tensor& mask_in, const DomainStyle& style, Rng& rng,
                          int64_t height, int64_t width) {
  std::array<double, 3> fg{1, 1, 1};
  std::array<double, 3> bg{0, 0, 0};
  double noise_level = 0;
  int64_t noise_cells = 8;
  int64_t dilate_radius = 0;

  // configuration ops run before compositing; post ops after
  std::vector<const StyleOp*> post;
  for (const auto& op : style.ops) {
    switch (op.kind) {
      case StyleOpKind::PaletteRecolor: {
        if (op.fg_colors.empty() || op.bg_colors.empty())
          throw ConfigError("palette recolor op needs fg and bg palettes");
        fg = op.fg_colors[rng.uniform_int(static_cast<int64_t>(op.fg_colors.size()))];
        bg = op.bg_colors[rng.uniform_int(static_cast<int64_t>(op.bg_colors.size()))];
        break;
      }
      case StyleOpKind::BackgroundFill:
        if (op.bg_colors.empty()) throw ConfigError("background fill op needs a color");
        bg = op.bg_colors[0];
        break;
      case StyleOpKind::BackgroundTexture:
        noise_level = op.params.at(0);
        if (op.params.size() > 1) noise_cells = static_cast<int64_t>(op.params[1]);
        break;
      case StyleOpKind::StrokeDilate:
        dilate_radius = static_cast<int64_t>(op.params.at(0));
        break;
      default:
        post.push_back(&op);
    }
  }

  auto mask = max_filter(mask_in, dilate_radius);

  auto img = torch::empty({3, height, width}, torch::kFloat32);
  torch::Tensor noise;
  if (noise_level > 0) noise = smooth_noise(height, width, noise_cells, rng).contiguous();
  const float* nacc = noise.defined() ? noise.data_ptr<float>() : nullptr;
  auto macc = mask.accessor<float, 2>();
  auto iacc = img.accessor<float, 3>();
  for (int64_t y = 0; y < height; ++y) {
    for (int64_t x = 0; x < width; ++x) {
      const float m = macc[y][x];
      float n = 0;
      if (nacc) n = static_cast<float>(noise_level) * (nacc[y * width + x] - 0.5f);
      for (int64_t c = 0; c < 3; ++c) {
        const float bgv = std::clamp(static_cast<float>(bg[c]) + n, 0.0f, 1.0f);
        iacc[c][y][x] = bgv * (1 - m) + static_cast<float>(fg[c]) * m;
      }
    }
  }

  for (const auto* op : post) {
    switch (op->kind) {
      case StyleOpKind::Blur:
        img = gaussian_blur(img, op->params.at(0));
        break;
      case StyleOpKind::Contrast: {
        const double f = op->params.at(0);
        img = (img - 0.5) * f + 0.5;
        break;
      }
      case StyleOpKind::Invert:
        img = 1.0 - img;
        break;
      default:
        break;
    }
  }
  return img.clamp(0, 1);
}

}  // namespace

DomainShiftSpec DomainShiftSpec::canonical(int64_t num_domains, uint64_t seed) {
  if (num_domains < 2) throw ConfigError("canonical spec: need at least 2 domains");
  DomainShiftSpec spec;
  spec.seed = seed;

  auto plain = [](const std::string& name) {
    DomainStyle d{name, {}};
    StyleOp op{StyleOpKind::PaletteRecolor, {}, {{1.0, 1.0, 1.0}}, {{0.0, 0.0, 0.0}}};
    d.ops.push_back(op);
    return d;
  };
  auto palette = [](const std::string& name, int variant) {
    DomainStyle d{name, {}};
    StyleOp op{StyleOpKind::PaletteRecolor, {}, {}, {}};
    if (variant == 0) {
      op.fg_colors = {{0.95, 0.35, 0.25}, {0.98, 0.75, 0.20}, {0.95, 0.92, 0.75}, {0.90, 0.40, 0.85}};
      op.bg_colors = {{0.08, 0.10, 0.35}, {0.05, 0.28, 0.12}, {0.22, 0.06, 0.30}, {0.04, 0.25, 0.30}};
    } else {
      op.fg_colors = {{0.30, 0.90, 0.95}, {0.45, 0.95, 0.45}, {0.85, 0.95, 0.30}};
      op.bg_colors = {{0.35, 0.08, 0.10}, {0.28, 0.18, 0.04}, {0.12, 0.12, 0.12}};
    }
    d.ops.push_back(op);
    return d;
  };
  auto texture = [](const std::string& name, double level) {
    DomainStyle d{name, {}};
    d.ops.push_back({StyleOpKind::PaletteRecolor, {}, {{0.92, 0.92, 0.88}}, {{0.38, 0.36, 0.34}}});
    d.ops.push_back({StyleOpKind::BackgroundTexture, {level, 8}, {}, {}});
    d.ops.push_back({StyleOpKind::StrokeDilate, {1}, {}, {}});
    return d;
  };
  auto inverted = [](const std::string& name, double sigma) {
    DomainStyle d{name, {}};
    d.ops.push_back({StyleOpKind::PaletteRecolor, {}, {{1.0, 1.0, 1.0}}, {{0.0, 0.0, 0.0}}});
    d.ops.push_back({StyleOpKind::Blur, {sigma}, {}, {}});
    d.ops.push_back({StyleOpKind::Invert, {}, {}, {}});
    return d;
  };

  for (int64_t i = 0; i < num_domains; ++i) {
    const int family = static_cast<int>(i % 4);
    const int round = static_cast<int>(i / 4);
    const std::string suffix = round == 0 ? "" : std::to_string(round + 1);
    switch (family) {
      case 0:
        spec.domains.push_back(plain("plain" + suffix));
        break;
      case 1:
        spec.domains.push_back(palette("palette" + suffix, round % 2));
        break;
      case 2:
        spec.domains.push_back(texture("texture" + suffix, 0.55 + 0.15 * round));
        break;
      case 3:
        spec.domains.push_back(inverted("inverted" + suffix, 0.85 + 0.25 * round));
        break;
    }
  }
  return spec;
}

Dataset synthesize_domains(const DomainShiftSpec& spec, int64_t classes, int64_t per_domain) {
  spec.validate();
  if (classes < 2 || classes > 10)
    throw ConfigError("synthesize_domains: classes must be in [2, 10]");
  if (per_domain < classes)
    throw ConfigError("synthesize_domains: per_domain must be >= classes");

  const int64_t domain_count = static_cast<int64_t>(spec.domains.size());
  const int64_t height = 32, width = 32;
  const int64_t total = domain_count * per_domain;

  auto images = torch::empty({total, 3, height, width}, torch::kFloat32);
  auto labels = torch::empty({total}, torch::kInt64);
  auto domains = torch::empty({total}, torch::kInt64);

  int64_t row = 0;
  for (int64_t d = 0; d < domain_count; ++d) {
    for (int64_t i = 0; i < per_domain; ++i, ++row) {
      const int64_t label = i % classes;  // exact class balance up to remainder
      Rng rng(derive_seed(spec.seed, {static_cast<uint64_t>(d), static_cast<uint64_t>(i)}));
      auto mask = render_glyph(label, rng, height, width);
      images[row] = apply_style(mask, spec.domains[d], rng, height, width);
      labels[row] = label;
      domains[row] = d;
    }
  }

  Dataset ds;
  ds.meta.classes = classes;
  ds.meta.domains = domain_count;
  for (const auto& d : spec.domains) ds.meta.domain_names.push_back(d.name);
  ds.meta.image_shape = {3, height, width};
  ds.meta.counts.assign(domain_count, per_domain);
  ds.images = images;
  ds.labels = labels;
  ds.domains = domains;
  ds.meta.validate();
  return ds;
}

// ---------------------------------------------------------------------------
// on-disk layout
// ---------------------------------------------------------------------------

namespace {

bool has_image_ext(const fs::path& p) {
  auto ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), ::tolower);
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

std::vector<std::string> sorted_subdirs(const fs::path& root) {
  std::vector<std::string> names;
  for (const auto& e : fs::directory_iterator(root)) {
    if (e.is_directory()) names.push_back(e.path().filename().string());
  }
  std::sort(names.begin(), names.end());
  return names;
}

}  // namespace

Dataset load_directory_dataset(const std::string& root, std::array<int64_t, 3> image_shape) {
  if (!fs::exists(root) || !fs::is_directory(root))
    throw IoError("dataset root does not exist: " + root);

  const auto domain_names = sorted_subdirs(root);
  if (domain_names.size() < 2)
    throw SchemaError("dataset root must contain at least 2 domain directories, found " +
                      std::to_string(domain_names.size()));

  // class sets must agree across domains
  std::vector<std::vector<std::string>> class_lists;
  for (const auto& dn : domain_names) {
    class_lists.push_back(sorted_subdirs(fs::path(root) / dn));
  }
  for (size_t d = 1; d < domain_names.size(); ++d) {
    for (const auto& c : class_lists[0]) {
      if (std::find(class_lists[d].begin(), class_lists[d].end(), c) == class_lists[d].end())
        throw SchemaError("domain '" + domain_names[d] + "' lacks class '" + c +
                          "' present in '" + domain_names[0] + "'");
    }
    for (const auto& c : class_lists[d]) {
      if (std::find(class_lists[0].begin(), class_lists[0].end(), c) == class_lists[0].end())
        throw SchemaError("domain '" + domain_names[0] + "' lacks class '" + c +
                          "' present in '" + domain_names[d] + "'");
    }
  }
  const auto& class_names = class_lists[0];
  if (class_names.size() < 2) throw SchemaError("dataset needs at least 2 class directories");

  std::vector<torch::Tensor> imgs;
  std::vector<int64_t> labs, doms;
  std::vector<int64_t> counts(domain_names.size(), 0);
  for (size_t d = 0; d < domain_names.size(); ++d) {
    for (size_t c = 0; c < class_names.size(); ++c) {
      std::vector<std::string> files;
      for (const auto& e :
           fs::directory_iterator(fs::path(root) / domain_names[d] / class_names[c])) {
        if (e.is_regular_file() && has_image_ext(e.path())) files.push_back(e.path().string());
      }
      std::sort(files.begin(), files.end());
      for (const auto& f : files) {
        imgs.push_back(imgio::read_image(f, image_shape));
        labs.push_back(static_cast<int64_t>(c));
        doms.push_back(static_cast<int64_t>(d));
        ++counts[d];
      }
    }
  }
  if (imgs.empty()) throw SchemaError("dataset contains no images");

  Dataset ds;
  ds.meta.classes = static_cast<int64_t>(class_names.size());
  ds.meta.domains = static_cast<int64_t>(domain_names.size());
  ds.meta.domain_names = domain_names;
  ds.meta.image_shape = image_shape;
  ds.meta.counts = counts;
  ds.images = torch::stack(imgs);
  ds.labels = torch::tensor(labs, torch::kInt64);
  ds.domains = torch::tensor(doms, torch::kInt64);
  ds.meta.validate();
  return ds;
}

void save_directory_dataset(const Dataset& dataset, const std::string& root, bool force,
                            uint64_t seed, const std::string& config_digest) {
  fs::path rp(root);
  if (fs::exists(rp) && !fs::is_empty(rp) && !force)
    throw ConfigError("output directory exists and is not empty (use --force): " + root);
  fs::create_directories(rp);

  std::vector<int64_t> class_counter(
      static_cast<size_t>(dataset.meta.domains * dataset.meta.classes), 0);
  auto lab = dataset.labels.accessor<int64_t, 1>();
  auto dom = dataset.domains.accessor<int64_t, 1>();
  for (int64_t i = 0; i < dataset.size(); ++i) {
    const auto& dname = dataset.meta.domain_names[static_cast<size_t>(dom[i])];
    const auto cname = std::to_string(lab[i]);
    const auto dir = rp / dname / cname;
    fs::create_directories(dir);
    auto& k = class_counter[static_cast<size_t>(dom[i] * dataset.meta.classes + lab[i])];
    char name[32];
    std::snprintf(name, sizeof(name), "img_%05lld.png", static_cast<long long>(k++));
    imgio::write_png(dataset.images[i], (dir / name).string());
  }

  json manifest;
  manifest["domain_names"] = dataset.meta.domain_names;
  manifest["classes"] = dataset.meta.classes;
  manifest["counts"] = dataset.meta.counts;
  manifest["image_shape"] = dataset.meta.image_shape;
  manifest["seed"] = seed;
  if (!config_digest.empty()) manifest["config_digest"] = config_digest;
  std::ofstream out(rp / "manifest.json");
  out << manifest.dump(2) << "\n";
  if (!out) throw IoError("failed to write manifest: " + (rp / "manifest.json").string());
}

uint64_t manifest_file_digest(const std::string& manifest_path) {
  std::ifstream in(manifest_path, std::ios::binary);
  if (!in) throw IoError("cannot read manifest: " + manifest_path);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return fnv1a64(bytes);
}

Split leave_one_out_split(const Dataset& dataset, int64_t held_out) {
  if (held_out < 0 || held_out >= dataset.meta.domains)
    throw ConfigError("leave_one_out_split: held_out " + std::to_string(held_out) +
                      " out of range [0, " + std::to_string(dataset.meta.domains) + ")");

  auto test_mask = dataset.domains.eq(held_out);
  auto test_idx = test_mask.nonzero().squeeze(1);
  auto train_idx = test_mask.logical_not().nonzero().squeeze(1);

  auto take = [&](const torch::Tensor& idx) {
    Dataset part;
    part.meta = dataset.meta;
    part.images = dataset.images.index_select(0, idx).contiguous();
    part.labels = dataset.labels.index_select(0, idx).contiguous();
    part.domains = dataset.domains.index_select(0, idx).contiguous();
    for (int64_t d = 0; d < part.meta.domains; ++d)
      part.meta.counts[static_cast<size_t>(d)] = part.domains.eq(d).sum().item<int64_t>();
    return part;
  };
  return {take(train_idx), take(test_idx)};
}

PairBatch sample_pair_batch(const Dataset& train, int64_t batch, Rng& rng) {
  if (batch < 1) throw ConfigError("sample_pair_batch: batch must be >= 1");

  std::vector<int64_t> present;
  std::vector<std::vector<int64_t>> by_domain(static_cast<size_t>(train.meta.domains));
  for (int64_t d = 0; d < train.meta.domains; ++d) {
    by_domain[static_cast<size_t>(d)] = train.indices_of_domain(d);
    if (!by_domain[static_cast<size_t>(d)].empty()) present.push_back(d);
  }
  if (present.size() < 2)
    throw ConfigError("sample_pair_batch: need at least 2 source domains with samples, found " +
                      std::to_string(present.size()));

  auto idx_a = torch::empty({batch}, torch::kInt64);
  auto idx_b = torch::empty({batch}, torch::kInt64);
  for (int64_t i = 0; i < batch; ++i) {
    const int64_t pa = rng.uniform_int(static_cast<int64_t>(present.size()));
    int64_t pb = rng.uniform_int(static_cast<int64_t>(present.size()) - 1);
    if (pb >= pa) ++pb;
    const auto& ia = by_domain[static_cast<size_t>(present[static_cast<size_t>(pa)])];
    const auto& ib = by_domain[static_cast<size_t>(present[static_cast<size_t>(pb)])];
    idx_a[i] = ia[static_cast<size_t>(rng.uniform_int(static_cast<int64_t>(ia.size())))];
    idx_b[i] = ib[static_cast<size_t>(rng.uniform_int(static_cast<int64_t>(ib.size())))];
  }

  PairBatch pb;
  pb.images_a = train.images.index_select(0, idx_a);
  pb.images_b = train.images.index_select(0, idx_b);
  pb.labels_a = train.labels.index_select(0, idx_a);
  pb.labels_b = train.labels.index_select(0, idx_b);
  pb.domains_a = train.domains.index_select(0, idx_a);
  pb.domains_b = train.domains.index_select(0, idx_b);
  return pb;
}

std::pair<torch::Tensor, torch::Tensor> sample_batch(const Dataset& train, int64_t batch,
                                                     Rng& rng) {
  if (batch < 1) throw ConfigError("sample_batch: batch must be >= 1");
  if (train.size() == 0) throw ConfigError("sample_batch: empty dataset");
  auto idx = torch::empty({batch}, torch::kInt64);
  for (int64_t i = 0; i < batch; ++i) idx[i] = rng.uniform_int(train.size());
  return {train.images.index_select(0, idx), train.labels.index_select(0, idx)};
}

}  // namespace dsdr::data
