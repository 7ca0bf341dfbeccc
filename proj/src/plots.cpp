#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "revguard/errors.hpp"
#include "revguard/pipeline.hpp"

namespace fs = std::filesystem;

namespace revguard {

namespace {

constexpr const char* kCleanColor = "#2f6fa7";
constexpr const char* kAttackedColor = "#b23b3b";
constexpr const char* kGridColor = "#cccccc";

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", v);
  return buf;
}

/// Tiny deterministic SVG canvas; everything is rects, lines, and text.
class Svg {
 public:
  Svg(int width, int height) : w_(width), h_(height) {
    body_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w_ << "\" height=\"" << h_
          << "\" viewBox=\"0 0 " << w_ << " " << h_ << "\">\n";
    body_ << "<rect x=\"0\" y=\"0\" width=\"" << w_ << "\" height=\"" << h_
          << "\" fill=\"#ffffff\"/>\n";
  }

  void rect(double x, double y, double w, double h, const std::string& fill) {
    body_ << "<rect x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" width=\"" << fmt(w)
          << "\" height=\"" << fmt(h) << "\" fill=\"" << fill << "\"/>\n";
  }

  void line(double x1, double y1, double x2, double y2, const std::string& stroke) {
    body_ << "<line x1=\"" << fmt(x1) << "\" y1=\"" << fmt(y1) << "\" x2=\"" << fmt(x2)
          << "\" y2=\"" << fmt(y2) << "\" stroke=\"" << stroke << "\" stroke-width=\"1\"/>\n";
  }

  void text(double x, double y, const std::string& s, int size = 11,
            const std::string& anchor = "start", const std::string& fill = "#222222") {
    body_ << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" font-family=\"sans-serif\""
          << " font-size=\"" << size << "\" text-anchor=\"" << anchor << "\" fill=\"" << fill
          << "\">" << escape(s) << "</text>\n";
  }

  std::string finish() {
    body_ << "</svg>\n";
    return body_.str();
  }

 private:
  static std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
      switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        default: out.push_back(c);
      }
    }
    return out;
  }

  int w_, h_;
  std::ostringstream body_;
};

void write_svg(const std::string& path, Svg& svg, std::vector<std::string>& written) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoFailure("cannot write " + path);
  out << svg.finish();
  written.push_back(path);
}

void legend(Svg& svg, double x, double y) {
  svg.rect(x, y, 12, 12, kCleanColor);
  svg.text(x + 16, y + 10, "clean");
  svg.rect(x + 70, y, 12, 12, kAttackedColor);
  svg.text(x + 86, y + 10, "attacked");
}

void ratings_per_paper(const std::vector<ReviewRow>& rows, const std::string& path,
                       std::vector<std::string>& written) {
  const int w = 640, h = 360;
  const double left = 50, bottom = h - 60, top = 40;
  Svg svg(w, h);
  svg.text(w / 2.0, 20, "Overall rating per paper", 14, "middle");
  double plot_h = bottom - top;
  for (int g = 0; g <= 10; g += 2) {
    double y = bottom - plot_h * g / 10.0;
    svg.line(left, y, w - 20, y, kGridColor);
    svg.text(left - 6, y + 4, std::to_string(g), 10, "end");
  }
  double bar_w = (w - left - 30) / std::max<std::size_t>(1, rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    double bh = plot_h * rows[i].review.overall / 10.0;
    svg.rect(left + i * bar_w + 1, bottom - bh, bar_w - 2, bh,
             rows[i].label == "attacked" ? kAttackedColor : kCleanColor);
  }
  legend(svg, left, h - 30);
  write_svg(path, svg, written);
}

void dimension_means(const std::vector<ReviewRow>& rows, const std::string& path,
                     std::vector<std::string>& written) {
  const char* names[5] = {"novelty", "technical", "clarity", "evaluation", "overall"};
  std::array<double, 5> clean_sum{}, attacked_sum{};
  double n_clean = 0, n_attacked = 0;
  for (const auto& r : rows) {
    std::array<int, 5> v{r.review.novelty, r.review.technical_quality, r.review.clarity,
                         r.review.evaluation_quality, r.review.overall};
    if (r.label == "attacked") {
      ++n_attacked;
      for (int i = 0; i < 5; ++i) attacked_sum[i] += v[i];
    } else {
      ++n_clean;
      for (int i = 0; i < 5; ++i) clean_sum[i] += v[i];
    }
  }
  const int w = 640, h = 360;
  const double left = 50, bottom = h - 60, top = 40;
  double plot_h = bottom - top;
  Svg svg(w, h);
  svg.text(w / 2.0, 20, "Mean score per dimension", 14, "middle");
  for (int g = 0; g <= 10; g += 2) {
    double y = bottom - plot_h * g / 10.0;
    svg.line(left, y, w - 20, y, kGridColor);
    svg.text(left - 6, y + 4, std::to_string(g), 10, "end");
  }
  double group_w = (w - left - 30) / 5.0;
  for (int i = 0; i < 5; ++i) {
    double cx = left + i * group_w;
    if (n_clean > 0) {
      double v = clean_sum[i] / n_clean;
      svg.rect(cx + 6, bottom - plot_h * v / 10.0, group_w / 2 - 8, plot_h * v / 10.0, kCleanColor);
    }
    if (n_attacked > 0) {
      double v = attacked_sum[i] / n_attacked;
      svg.rect(cx + group_w / 2 + 2, bottom - plot_h * v / 10.0, group_w / 2 - 8,
               plot_h * v / 10.0, kAttackedColor);
    }
    svg.text(cx + group_w / 2, bottom + 16, names[i], 11, "middle");
  }
  legend(svg, left, h - 30);
  write_svg(path, svg, written);
}

void rating_histogram(const std::vector<ReviewRow>& rows, const std::string& path,
                      std::vector<std::string>& written) {
  std::array<int, 11> clean_count{}, attacked_count{};
  int peak = 1;
  for (const auto& r : rows) {
    int v = std::clamp(r.review.overall, 1, 10);
    auto& c = r.label == "attacked" ? attacked_count : clean_count;
    peak = std::max(peak, ++c[v]);
  }
  const int w = 640, h = 360;
  const double left = 50, bottom = h - 60, top = 40;
  double plot_h = bottom - top;
  Svg svg(w, h);
  svg.text(w / 2.0, 20, "Distribution of overall ratings", 14, "middle");
  double group_w = (w - left - 30) / 10.0;
  for (int v = 1; v <= 10; ++v) {
    double cx = left + (v - 1) * group_w;
    double ch = plot_h * clean_count[v] / peak;
    double ah = plot_h * attacked_count[v] / peak;
    if (clean_count[v] > 0) svg.rect(cx + 4, bottom - ch, group_w / 2 - 6, ch, kCleanColor);
    if (attacked_count[v] > 0)
      svg.rect(cx + group_w / 2 + 2, bottom - ah, group_w / 2 - 6, ah, kAttackedColor);
    svg.text(cx + group_w / 2, bottom + 16, std::to_string(v), 11, "middle");
  }
  legend(svg, left, h - 30);
  write_svg(path, svg, written);
}

void recommendation_distribution(const std::vector<ReviewRow>& rows, const std::string& path,
                                 std::vector<std::string>& written) {
  static const Recommendation cats[5] = {Recommendation::Reject, Recommendation::WeakReject,
                                         Recommendation::Borderline, Recommendation::WeakAccept,
                                         Recommendation::Accept};
  std::array<int, 5> clean_count{}, attacked_count{};
  int peak = 1;
  for (const auto& r : rows) {
    int idx = rank(r.review.recommendation);
    auto& c = r.label == "attacked" ? attacked_count : clean_count;
    peak = std::max(peak, ++c[idx]);
  }
  const int w = 640, h = 360;
  const double left = 50, bottom = h - 60, top = 40;
  double plot_h = bottom - top;
  Svg svg(w, h);
  svg.text(w / 2.0, 20, "Recommendation distribution", 14, "middle");
  double group_w = (w - left - 30) / 5.0;
  for (int i = 0; i < 5; ++i) {
    double cx = left + i * group_w;
    double ch = plot_h * clean_count[i] / peak;
    double ah = plot_h * attacked_count[i] / peak;
    if (clean_count[i] > 0) svg.rect(cx + 6, bottom - ch, group_w / 2 - 8, ch, kCleanColor);
    if (attacked_count[i] > 0)
      svg.rect(cx + group_w / 2 + 2, bottom - ah, group_w / 2 - 8, ah, kAttackedColor);
    svg.text(cx + group_w / 2, bottom + 16, to_string(cats[i]), 10, "middle");
  }
  legend(svg, left, h - 30);
  write_svg(path, svg, written);
}

void confusion_matrix(const EvalSummary& s, const std::string& path,
                      std::vector<std::string>& written) {
  const int w = 420, h = 360;
  Svg svg(w, h);
  svg.text(w / 2.0, 24, "Defense confusion matrix", 14, "middle");
  const double x0 = 120, y0 = 70, cell = 110;
  long values[2][2] = {{s.tp, s.fn}, {s.fp, s.tn}};
  const char* fills[2][2] = {{"#9fd09f", "#e0a8a8"}, {"#e0a8a8", "#9fd09f"}};
  svg.text(x0 + cell, y0 - 26, "predicted", 12, "middle");
  svg.text(x0 + cell / 2, y0 - 8, "attacked", 11, "middle");
  svg.text(x0 + cell * 1.5, y0 - 8, "clean", 11, "middle");
  svg.text(x0 - 70, y0 + cell / 2, "attacked", 11);
  svg.text(x0 - 70, y0 + cell * 1.5, "clean", 11);
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) {
      svg.rect(x0 + c * cell, y0 + r * cell, cell - 4, cell - 4, fills[r][c]);
      svg.text(x0 + c * cell + cell / 2 - 2, y0 + r * cell + cell / 2 + 6,
               std::to_string(values[r][c]), 22, "middle");
    }
  }
  svg.text(x0, y0 + 2 * cell + 30,
           "accuracy " + fmt(s.accuracy * 100) + "%  precision " + fmt(s.precision * 100) +
               "%  recall " + fmt(s.recall * 100) + "%",
           11);
  write_svg(path, svg, written);
}

}  // namespace

std::vector<std::string> emit_plots(const std::string& reports_dir, const std::string& out_dir) {
  fs::path reviews_path = fs::path(reports_dir) / "reviews.csv";
  fs::path summary_path = fs::path(reports_dir) / "summary.json";
  bool have_reviews = fs::exists(reviews_path);
  bool have_summary = fs::exists(summary_path);
  if (!have_reviews && !have_summary) {
    throw NoData("no reviews.csv or summary.json under " + reports_dir);
  }
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoFailure("cannot create " + out_dir + ": " + ec.message());

  std::vector<std::string> written;
  if (have_reviews) {
    auto rows = load_reviews_csv(reviews_path.string());
    ratings_per_paper(rows, (fs::path(out_dir) / "ratings_per_paper.svg").string(), written);
    dimension_means(rows, (fs::path(out_dir) / "dimension_means.svg").string(), written);
    rating_histogram(rows, (fs::path(out_dir) / "rating_histogram.svg").string(), written);
    recommendation_distribution(
        rows, (fs::path(out_dir) / "recommendation_distribution.svg").string(), written);
  }
  if (have_summary) {
    std::ifstream in(summary_path);
    std::ostringstream ss;
    ss << in.rdbuf();
    confusion_matrix(summary_from_json(ss.str()),
                     (fs::path(out_dir) / "confusion_matrix.svg").string(), written);
  }
  std::sort(written.begin(), written.end());
  return written;
}

}  // namespace revguard
