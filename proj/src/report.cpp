// Copyright (c) 2026 voiceprint contributors
// SPDX-License-Identifier: Apache-2.0

#include "voiceprint/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>

#include "voiceprint/csv.hpp"

namespace voiceprint {

using ordered_json = nlohmann::ordered_json;

namespace {

std::string fmt(double v, const char* spec = "%.4f") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

ordered_json summary_json(const MetricSummary& s) {
  ordered_json j;
  j["classifier"] = s.classifier;
  j["metric"] = s.metric;
  j["mean"] = s.mean;
  j["sd"] = s.sd;
  j["sem"] = s.sem;
  j["n_replicates"] = s.n_replicates;
  j["sem_degenerate"] = s.sem_degenerate;
  return j;
}

ordered_json confusion_json(const CallTypeConfusion& c) {
  ordered_json j;
  j["individual"] = c.individual;
  j["call_types"] = c.call_types;
  j["predicted"] = c.predicted;
  j["counts"] = c.counts;
  j["proportions"] = c.proportions;
  return j;
}

}  // namespace

std::string eval_report_json(const EvalReport& report, const CrossCallTypeReport* cross) {
  ordered_json j;
  j["kind"] = "classifier_comparison";
  j["master_seed"] = report.master_seed;
  j["seed_paths"] = {{"split", "eval/rep/<replicate>"},
                     {"fit", "eval/rep/<replicate>/<classifier>"}};
  j["n_replicates"] = report.n_replicates_requested;
  j["train_fraction"] = report.train_fraction;
  j["stratified"] = report.stratified;
  j["classes"] = report.classes;
  j["call_types"] = report.call_types;

  j["summaries"] = ordered_json::array();
  for (const auto& s : report.summaries) j["summaries"].push_back(summary_json(s));

  j["effective_n"] = ordered_json::object();
  for (const auto& [name, n] : report.effective_n) j["effective_n"][name] = n;

  j["failures"] = ordered_json::array();
  for (const auto& f : report.failures) {
    j["failures"].push_back(
        {{"replicate", f.replicate}, {"classifier", f.classifier}, {"diagnostic", f.diagnostic}});
  }
  j["max_kkt_residual"] = report.max_kkt_residual;

  j["confusions"] = ordered_json::object();
  for (std::size_t k = 0; k < report.confusions.size(); ++k) {
    // Summaries come in pairs per classifier; confusions follow that order.
    const std::string name = report.summaries[2 * k].classifier;
    ordered_json arr = ordered_json::array();
    for (const auto& c : report.confusions[k]) arr.push_back(confusion_json(c));
    j["confusions"][name] = arr;
  }
  j["warnings"] = report.warnings;

  if (cross != nullptr) {
    ordered_json x;
    x["results"] = ordered_json::array();
    for (const auto& r : cross->results) {
      x["results"].push_back({{"classifier", r.classifier},
                              {"held_out_call_type", r.held_out_call_type},
                              {"accuracy", r.accuracy},
                              {"n_test", r.n_test}});
    }
    x["mean_accuracy"] = ordered_json::object();
    for (const auto& [name, acc] : cross->mean_accuracy) x["mean_accuracy"][name] = acc;
    j["cross_call_type"] = x;
  }
  return j.dump(2) + "\n";
}

void write_eval_raw_scores_csv(const std::filesystem::path& path, const EvalReport& report,
                               const std::string& feature_space_label, int n_train,
                               double svm_c) {
  CsvTable csv;
  csv.header = {"replicate", "classifier", "feature_space", "n_train", "C", "metric", "value"};
  for (const auto& score : report.raw_scores) {
    const std::string c_field = score.classifier == "svm" ? format_double(svm_c) : "";
    csv.rows.push_back({std::to_string(score.replicate), score.classifier, feature_space_label,
                        std::to_string(n_train), c_field, "accuracy",
                        format_double(score.accuracy)});
    csv.rows.push_back({std::to_string(score.replicate), score.classifier, feature_space_label,
                        std::to_string(n_train), c_field, "f1_weighted",
                        format_double(score.f1)});
  }
  write_csv(path, csv);
}

void write_confusion_csv(const std::filesystem::path& path,
                         const std::vector<CallTypeConfusion>& confusions) {
  CsvTable csv;
  csv.header = {"individual", "call_type", "predicted", "count", "proportion"};
  for (const auto& c : confusions) {
    for (std::size_t r = 0; r < c.call_types.size(); ++r) {
      for (std::size_t p = 0; p < c.predicted.size(); ++p) {
        csv.rows.push_back({c.individual, c.call_types[r], c.predicted[p],
                            std::to_string(c.counts[r][p]), format_double(c.proportions[r][p])});
      }
    }
  }
  write_csv(path, csv);
}

std::string confusion_svg(const std::string& classifier,
                          const std::vector<CallTypeConfusion>& confusions) {
  const int cell_w = 110, cell_h = 34, label_w = 150, title_h = 26, gap = 28;
  int n_cols = 0;
  for (const auto& c : confusions) n_cols = std::max(n_cols, static_cast<int>(c.predicted.size()));
  const int width = label_w + n_cols * cell_w + 20;

  std::string svg;
  int y = 10;
  std::string body;
  for (const auto& c : confusions) {
    body += "<text x=\"10\" y=\"" + std::to_string(y + 16) +
            "\" font-size=\"15\" font-family=\"sans-serif\" font-weight=\"bold\">" +
            c.individual + " (" + classifier + ")</text>\n";
    y += title_h;
    for (std::size_t p = 0; p < c.predicted.size(); ++p) {
      body += "<text x=\"" + std::to_string(label_w + static_cast<int>(p) * cell_w + cell_w / 2) +
              "\" y=\"" + std::to_string(y + 12) +
              "\" font-size=\"12\" font-family=\"sans-serif\" text-anchor=\"middle\">" +
              c.predicted[p] + "</text>\n";
    }
    y += 18;
    for (std::size_t r = 0; r < c.call_types.size(); ++r) {
      body += "<text x=\"" + std::to_string(label_w - 8) + "\" y=\"" +
              std::to_string(y + cell_h / 2 + 4) +
              "\" font-size=\"12\" font-family=\"sans-serif\" text-anchor=\"end\">" +
              c.call_types[r] + "</text>\n";
      for (std::size_t p = 0; p < c.predicted.size(); ++p) {
        const double v = c.proportions[r][p];
        const int shade = static_cast<int>(std::lround(255.0 * (1.0 - 0.85 * v)));
        const int x = label_w + static_cast<int>(p) * cell_w;
        char color[16];
        std::snprintf(color, sizeof(color), "#%02x%02xff", shade, shade);
        body += "<rect x=\"" + std::to_string(x) + "\" y=\"" + std::to_string(y) + "\" width=\"" +
                std::to_string(cell_w - 2) + "\" height=\"" + std::to_string(cell_h - 2) +
                "\" fill=\"" + color + "\" stroke=\"#777\"/>\n";
        body += "<text x=\"" + std::to_string(x + cell_w / 2 - 1) + "\" y=\"" +
                std::to_string(y + cell_h / 2 + 4) +
                "\" font-size=\"12\" font-family=\"sans-serif\" text-anchor=\"middle\">" +
                fmt(100.0 * v, "%.1f") + "%</text>\n";
      }
      y += cell_h;
    }
    y += gap;
  }
  svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
        "\" height=\"" + std::to_string(y) + "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n" +
        body + "</svg>\n";
  return svg;
}

std::string compare_report_json(const CompareReport& report) {
  ordered_json j;
  j["kind"] = "feature_space_comparison";
  j["master_seed"] = report.master_seed;
  j["seed_paths"] = {{"replicate", "compare/<n_train>/<bin>/<i>"},
                     {"subset", "compare/<n_train>/<bin>/<i>/subset"}};
  j["points"] = ordered_json::array();
  for (const auto& p : report.points) {
    j["points"].push_back({{"feature_space", p.feature_space},
                           {"n_train", p.n_train},
                           {"mean_accuracy", p.mean_accuracy},
                           {"ci95_low", p.ci_low},
                           {"ci95_high", p.ci_high},
                           {"n_replicates", p.n_replicates}});
  }
  j["failures"] = ordered_json::array();
  for (const auto& f : report.failures) {
    j["failures"].push_back(
        {{"replicate", f.replicate}, {"classifier", f.classifier}, {"diagnostic", f.diagnostic}});
  }
  j["max_kkt_residual"] = report.max_kkt_residual;
  return j.dump(2) + "\n";
}

void write_compare_points_csv(const std::filesystem::path& path, const CompareReport& report) {
  CsvTable csv;
  csv.header = {"feature_space", "n_train", "mean_accuracy", "ci95_low", "ci95_high",
                "n_replicates"};
  for (const auto& p : report.points) {
    csv.rows.push_back({p.feature_space, std::to_string(p.n_train),
                        format_double(p.mean_accuracy), format_double(p.ci_low),
                        format_double(p.ci_high), std::to_string(p.n_replicates)});
  }
  write_csv(path, csv);
}

void write_compare_raw_csv(const std::filesystem::path& path, const CompareReport& report) {
  CsvTable csv;
  csv.header = {"replicate", "classifier", "feature_space", "n_train", "C", "metric", "value"};
  for (const auto& r : report.raw) {
    csv.rows.push_back({std::to_string(r.replicate), "svm", r.feature_space,
                        std::to_string(r.n_train), format_double(r.c_value), "accuracy",
                        format_double(r.accuracy)});
  }
  write_csv(path, csv);
}

std::string comparison_svg(const CompareReport& report) {
  const int width = 820, height = 520;
  const int ml = 70, mr = 30, mt = 40, mb = 60;
  const double plot_w = width - ml - mr;
  const double plot_h = height - mt - mb;

  int x_min = 1 << 30, x_max = 0;
  double y_min = 1.0, y_max = 0.0;
  for (const auto& p : report.points) {
    x_min = std::min(x_min, p.n_train);
    x_max = std::max(x_max, p.n_train);
    y_min = std::min(y_min, p.ci_low);
    y_max = std::max(y_max, p.ci_high);
  }
  if (report.points.empty()) {
    x_min = 0;
    x_max = 1;
  }
  y_min = std::max(0.0, std::floor((y_min - 0.02) * 20.0) / 20.0);
  y_max = std::min(1.0, std::ceil((y_max + 0.02) * 20.0) / 20.0);
  if (y_max <= y_min) y_max = y_min + 0.05;

  auto sx = [&](double v) {
    return ml + plot_w * (v - x_min) / std::max(1.0, static_cast<double>(x_max - x_min));
  };
  auto sy = [&](double v) { return mt + plot_h * (1.0 - (v - y_min) / (y_max - y_min)); };

  std::string body;
  // Axes + ticks.
  body += "<line x1=\"" + fmt(static_cast<double>(ml), "%.0f") + "\" y1=\"" + fmt(mt + plot_h, "%.0f") +
          "\" x2=\"" + fmt(ml + plot_w, "%.0f") + "\" y2=\"" + fmt(mt + plot_h, "%.0f") +
          "\" stroke=\"black\"/>\n";
  body += "<line x1=\"" + fmt(static_cast<double>(ml), "%.0f") + "\" y1=\"" + fmt(static_cast<double>(mt), "%.0f") +
          "\" x2=\"" + fmt(static_cast<double>(ml), "%.0f") + "\" y2=\"" + fmt(mt + plot_h, "%.0f") +
          "\" stroke=\"black\"/>\n";
  for (int tick = 0; tick <= 5; ++tick) {
    const double v = y_min + (y_max - y_min) * tick / 5.0;
    body += "<line x1=\"" + fmt(ml - 4.0, "%.0f") + "\" y1=\"" + fmt(sy(v), "%.1f") + "\" x2=\"" +
            fmt(static_cast<double>(ml), "%.0f") + "\" y2=\"" + fmt(sy(v), "%.1f") +
            "\" stroke=\"black\"/>\n";
    body += "<text x=\"" + fmt(ml - 8.0, "%.0f") + "\" y=\"" + fmt(sy(v) + 4.0, "%.1f") +
            "\" font-size=\"12\" font-family=\"sans-serif\" text-anchor=\"end\">" + fmt(v, "%.2f") +
            "</text>\n";
  }

  std::vector<std::string> spaces;
  for (const auto& p : report.points) {
    if (std::find(spaces.begin(), spaces.end(), p.feature_space) == spaces.end()) {
      spaces.push_back(p.feature_space);
    }
  }
  const std::vector<std::string> colors = {"#d62728", "#1f77b4", "#2ca02c", "#9467bd"};
  for (std::size_t s = 0; s < spaces.size(); ++s) {
    std::vector<const ComparisonPoint*> pts;
    for (const auto& p : report.points) {
      if (p.feature_space == spaces[s]) pts.push_back(&p);
    }
    std::sort(pts.begin(), pts.end(),
              [](const auto* a, const auto* b) { return a->n_train < b->n_train; });
    if (pts.empty()) continue;
    const std::string& color = colors[s % colors.size()];

    std::string band = "<polygon fill=\"" + color + "\" fill-opacity=\"0.18\" stroke=\"none\" points=\"";
    for (const auto* p : pts) band += fmt(sx(p->n_train), "%.1f") + "," + fmt(sy(p->ci_high), "%.1f") + " ";
    for (auto it = pts.rbegin(); it != pts.rend(); ++it) {
      band += fmt(sx((*it)->n_train), "%.1f") + "," + fmt(sy((*it)->ci_low), "%.1f") + " ";
    }
    band += "\"/>\n";
    body += band;

    std::string line = "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"2\"";
    if (spaces[s] == "mfcc") line += " stroke-dasharray=\"7,5\"";
    line += " points=\"";
    for (const auto* p : pts) line += fmt(sx(p->n_train), "%.1f") + "," + fmt(sy(p->mean_accuracy), "%.1f") + " ";
    line += "\"/>\n";
    body += line;
    for (const auto* p : pts) {
      body += "<circle cx=\"" + fmt(sx(p->n_train), "%.1f") + "\" cy=\"" +
              fmt(sy(p->mean_accuracy), "%.1f") + "\" r=\"2.5\" fill=\"" + color + "\"/>\n";
    }
    // x ticks from the first series.
    if (s == 0) {
      for (const auto* p : pts) {
        body += "<line x1=\"" + fmt(sx(p->n_train), "%.1f") + "\" y1=\"" + fmt(mt + plot_h, "%.0f") +
                "\" x2=\"" + fmt(sx(p->n_train), "%.1f") + "\" y2=\"" + fmt(mt + plot_h + 4.0, "%.0f") +
                "\" stroke=\"black\"/>\n";
        body += "<text x=\"" + fmt(sx(p->n_train), "%.1f") + "\" y=\"" + fmt(mt + plot_h + 18.0, "%.0f") +
                "\" font-size=\"11\" font-family=\"sans-serif\" text-anchor=\"middle\">" +
                std::to_string(p->n_train) + "</text>\n";
      }
    }
    // Legend.
    const double ly = mt + 14.0 + 18.0 * static_cast<double>(s);
    body += "<line x1=\"" + fmt(ml + plot_w - 150.0, "%.1f") + "\" y1=\"" + fmt(ly, "%.1f") +
            "\" x2=\"" + fmt(ml + plot_w - 110.0, "%.1f") + "\" y2=\"" + fmt(ly, "%.1f") +
            "\" stroke=\"" + color + "\" stroke-width=\"2\"" +
            (spaces[s] == "mfcc" ? " stroke-dasharray=\"7,5\"" : "") + "/>\n";
    body += "<text x=\"" + fmt(ml + plot_w - 102.0, "%.1f") + "\" y=\"" + fmt(ly + 4.0, "%.1f") +
            "\" font-size=\"13\" font-family=\"sans-serif\">" + spaces[s] + "</text>\n";
  }

  body += "<text x=\"" + fmt(ml + plot_w / 2.0, "%.1f") + "\" y=\"" + fmt(height - 16.0, "%.0f") +
          "\" font-size=\"14\" font-family=\"sans-serif\" text-anchor=\"middle\">training points</text>\n";
  body += "<text x=\"18\" y=\"" + fmt(mt + plot_h / 2.0, "%.1f") +
          "\" font-size=\"14\" font-family=\"sans-serif\" text-anchor=\"middle\" transform=\"rotate(-90 18 " +
          fmt(mt + plot_h / 2.0, "%.1f") + ")\">mean accuracy</text>\n";

  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
         "\" height=\"" + std::to_string(height) +
         "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n" + body + "</svg>\n";
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw std::runtime_error("short write: " + path.string());
}

}  // namespace voiceprint
