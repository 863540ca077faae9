#include "dsdr/report.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dsdr/common.hpp"

namespace fs = std::filesystem;

namespace dsdr::report {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

}  // namespace

MetricsData read_metrics_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot read metrics csv: " + path);

  std::string line;
  std::vector<std::string> header;
  while (std::getline(f, line)) {
    if (line.empty() || line.front() == '#') continue;
    header = split_csv_line(line);
    break;
  }
  if (header.empty()) throw ConfigError("metrics csv has no header row: " + path);

  const char* required[] = {"step", "intra", "inter", "recon", "cycle",
                            "adv_d", "adv_g", "kl",    "ce",    "total"};
  for (const char* col : required) {
    if (std::find(header.begin(), header.end(), col) == header.end())
      throw ConfigError("metrics csv is missing column '" + std::string(col) + "': " + path);
  }

  MetricsData data;
  for (const auto& col : header)
    if (col != "step") data.columns[col] = {};

  while (std::getline(f, line)) {
    if (line.empty() || line.front() == '#') continue;
    auto cells = split_csv_line(line);
    if (cells.size() != header.size())
      throw ConfigError("metrics csv row has " + std::to_string(cells.size()) +
                        " cells, expected " + std::to_string(header.size()) + ": " + path);
    for (size_t i = 0; i < header.size(); ++i) {
      if (header[i] == "step")
        data.steps.push_back(std::stoll(cells[i]));
      else
        data.columns[header[i]].push_back(std::stod(cells[i]));
    }
  }
  return data;
}

namespace {

void write_svg_curve(const std::string& path, const std::string& title,
                     const std::vector<int64_t>& xs,
                     const std::vector<std::pair<std::string, const std::vector<double>*>>& series) {
  const double width = 720, height = 360;
  const double ml = 60, mr = 20, mt = 36, mb = 40;

  double ymin = 1e300, ymax = -1e300;
  for (const auto& [name, ys] : series) {
    for (double v : *ys) {
      ymin = std::min(ymin, v);
      ymax = std::max(ymax, v);
    }
  }
  if (!(ymax > ymin)) {
    ymax = ymin + 1;
    ymin -= 1;
  }
  const double x0 = xs.empty() ? 0 : static_cast<double>(xs.front());
  const double x1 = xs.empty() ? 1 : static_cast<double>(xs.back());
  const double xspan = x1 > x0 ? x1 - x0 : 1;

  auto px = [&](double x) { return ml + (x - x0) / xspan * (width - ml - mr); };
  auto py = [&](double y) { return height - mb - (y - ymin) / (ymax - ymin) * (height - mt - mb); };

  std::ofstream f(path, std::ios::trunc);
  if (!f) throw IoError("cannot write svg: " + path);
  f << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
    << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  f << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  f << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
    << title << "</text>\n";
  f << "<line x1=\"" << ml << "\" y1=\"" << height - mb << "\" x2=\"" << width - mr << "\" y2=\""
    << height - mb << "\" stroke=\"black\"/>\n";
  f << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << height - mb
    << "\" stroke=\"black\"/>\n";
  f << "<text x=\"8\" y=\"" << py(ymax) + 4 << "\" font-size=\"11\">" << format_double(ymax, 2)
    << "</text>\n";
  f << "<text x=\"8\" y=\"" << py(ymin) + 4 << "\" font-size=\"11\">" << format_double(ymin, 2)
    << "</text>\n";
  f << "<text x=\"" << ml << "\" y=\"" << height - 12 << "\" font-size=\"11\">step "
    << static_cast<int64_t>(x0) << "</text>\n";
  f << "<text x=\"" << width - mr << "\" y=\"" << height - 12
    << "\" text-anchor=\"end\" font-size=\"11\">step " << static_cast<int64_t>(x1) << "</text>\n";

  const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
  size_t ci = 0;
  for (const auto& [name, ys] : series) {
    f << "<polyline fill=\"none\" stroke=\"" << colors[ci % 4] << "\" stroke-width=\"1.5\" points=\"";
    for (size_t i = 0; i < xs.size(); ++i) {
      f << format_double(px(static_cast<double>(xs[i])), 1) << ","
        << format_double(py((*ys)[i]), 1) << " ";
    }
    f << "\"/>\n";
    f << "<text x=\"" << width - mr - 4 << "\" y=\"" << mt + 14 * (ci + 1)
      << "\" text-anchor=\"end\" font-size=\"11\" fill=\"" << colors[ci % 4] << "\">" << name
      << "</text>\n";
    ++ci;
  }
  f << "</svg>\n";
}

}  // namespace

void write_loss_curves(const MetricsData& metrics, const std::string& out_dir) {
  fs::create_directories(out_dir);
  auto col = [&](const char* name) -> const std::vector<double>* {
    auto it = metrics.columns.find(name);
    if (it == metrics.columns.end())
      throw ConfigError("metrics data is missing column '" + std::string(name) + "'");
    return &it->second;
  };
  write_svg_curve((fs::path(out_dir) / "loss_adv.svg").string(), "adversarial loss",
                  metrics.steps, {{"adv_d", col("adv_d")}, {"adv_g", col("adv_g")}});
  write_svg_curve((fs::path(out_dir) / "loss_recon.svg").string(), "reconstruction loss",
                  metrics.steps, {{"recon", col("recon")}});
  write_svg_curve((fs::path(out_dir) / "loss_cycle.svg").string(), "cycle consistency loss",
                  metrics.steps, {{"cycle", col("cycle")}});
  write_svg_curve((fs::path(out_dir) / "loss_intra.svg").string(), "intra-instance loss",
                  metrics.steps, {{"intra", col("intra")}});
  write_svg_curve((fs::path(out_dir) / "loss_ce.svg").string(), "classification loss",
                  metrics.steps, {{"ce", col("ce")}});
}

std::vector<eval::ExperimentResult> read_results_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot read results csv: " + path);

  std::string line;
  std::vector<std::string> header;
  while (std::getline(f, line)) {
    if (line.empty() || line.front() == '#') continue;
    header = split_csv_line(line);
    break;
  }
  for (const char* col : {"held_out", "seed", "accuracy"}) {
    if (std::find(header.begin(), header.end(), col) == header.end())
      throw ConfigError("results csv is missing column '" + std::string(col) + "': " + path);
  }
  const auto idx = [&](const char* col) {
    return static_cast<size_t>(
        std::find(header.begin(), header.end(), col) - header.begin());
  };
  const size_t hi = idx("held_out"), si = idx("seed"), ai = idx("accuracy");
  const auto di_it = std::find(header.begin(), header.end(), "config_digest");
  const size_t di = static_cast<size_t>(di_it - header.begin());

  std::vector<std::string> order;
  std::map<std::string, std::vector<std::pair<int64_t, double>>> rows;
  std::map<std::string, std::string> digests;
  while (std::getline(f, line)) {
    if (line.empty() || line.front() == '#') continue;
    auto cells = split_csv_line(line);
    if (cells.size() < header.size())
      throw ConfigError("results csv row is malformed: " + line);
    const auto& name = cells[hi];
    if (!rows.count(name)) order.push_back(name);
    rows[name].emplace_back(std::stoll(cells[si]), std::stod(cells[ai]));
    if (di_it != header.end()) digests[name] = cells[di];
  }
  if (order.empty()) throw ConfigError("results csv has no data rows: " + path);

  std::vector<eval::ExperimentResult> results;
  for (const auto& name : order) {
    auto& seed_rows = rows[name];
    std::sort(seed_rows.begin(), seed_rows.end());
    eval::ExperimentResult r;
    r.held_out = name;
    for (const auto& [s, a] : seed_rows) r.per_seed_accuracy.push_back(a);
    double sum = 0;
    for (double v : r.per_seed_accuracy) sum += v;
    r.mean = sum / static_cast<double>(r.per_seed_accuracy.size());
    if (r.per_seed_accuracy.size() > 1) {
      double ss = 0;
      for (double v : r.per_seed_accuracy) ss += (v - r.mean) * (v - r.mean);
      r.stddev = std::sqrt(ss / static_cast<double>(r.per_seed_accuracy.size() - 1));
    }
    r.config_digest = digests.count(name) ? digests[name] : "";
    results.push_back(r);
  }
  return results;
}

std::string generate_report(const std::string& results_dir, bool force) {
  if (!fs::exists(results_dir) || !fs::is_directory(results_dir))
    throw ConfigError("report: results directory does not exist: " + results_dir);

  // locate inputs: any results.csv plus the first metrics.csv, recursively
  std::vector<std::string> results_files, metrics_files;
  for (const auto& e : fs::recursive_directory_iterator(results_dir)) {
    if (!e.is_regular_file()) continue;
    const auto name = e.path().filename().string();
    if (name == "results.csv") results_files.push_back(e.path().string());
    if (name == "metrics.csv") metrics_files.push_back(e.path().string());
  }
  std::sort(results_files.begin(), results_files.end());
  std::sort(metrics_files.begin(), metrics_files.end());
  if (results_files.empty() && metrics_files.empty())
    throw ConfigError("report: no results.csv or metrics.csv found under " + results_dir);

  const auto table_path = fs::path(results_dir) / "table.txt";
  if (fs::exists(table_path) && !force)
    throw ConfigError("report: " + table_path.string() + " exists (use --force)");

  std::string table;
  if (!results_files.empty()) {
    std::vector<std::pair<std::string, std::vector<eval::ExperimentResult>>> methods;
    for (const auto& path : results_files) {
      auto results = read_results_csv(path);
      // append an Avg row computed from the per-domain means
      std::vector<double> avg_seed;
      if (!results.empty()) {
        const size_t seeds = results.front().per_seed_accuracy.size();
        avg_seed.assign(seeds, 0.0);
        for (const auto& r : results)
          for (size_t s = 0; s < seeds && s < r.per_seed_accuracy.size(); ++s)
            avg_seed[s] += r.per_seed_accuracy[s];
        for (auto& v : avg_seed) v /= static_cast<double>(results.size());
        eval::ExperimentResult avg;
        avg.held_out = "Avg";
        avg.per_seed_accuracy = avg_seed;
        double sum = 0;
        for (double v : avg_seed) sum += v;
        avg.mean = sum / static_cast<double>(avg_seed.size());
        results.push_back(avg);
      }
      const auto label = fs::path(path).parent_path().filename().string();
      methods.emplace_back(label.empty() ? "results" : label, results);
    }
    table = eval::render_results_table(methods);
    std::ofstream tf(table_path, std::ios::trunc);
    tf << table;
    if (!tf) throw IoError("report: cannot write " + table_path.string());
  }

  if (!metrics_files.empty()) {
    auto metrics = read_metrics_csv(metrics_files.front());
    write_loss_curves(metrics, results_dir);
  }
  return table;
}

}  // namespace dsdr::report
