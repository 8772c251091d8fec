#include "mcvad/eval/artifacts.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace mcvad::eval {

namespace {

std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace

void write_scores_csv(const std::string& path, const std::vector<ScoreRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), "write_scores_csv: cannot open " + path);
  out << "video_id,frame_index,track_id,l_masked,l_whole,l_partial,l_pred,l_recon,score,label\n";
  for (const auto& r : records)
    out << r.video_id << ',' << r.frame_index << ',' << r.track_id << ',' << fmt_g(r.l_masked)
        << ',' << fmt_g(r.l_whole) << ',' << fmt_g(r.l_partial) << ',' << fmt_g(r.l_pred) << ','
        << fmt_g(r.l_recon) << ',' << fmt_g(r.score) << ',' << r.label << '\n';
}

std::vector<ScoreRecord> read_scores_csv(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "read_scores_csv: cannot open " + path);
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), "read_scores_csv: empty file " + path);
  std::vector<ScoreRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    require(fields.size() == 10, "read_scores_csv: malformed row in " + path);
    ScoreRecord r;
    r.video_id = fields[0];
    r.frame_index = std::stoll(fields[1]);
    r.track_id = fields[2];
    r.l_masked = std::stod(fields[3]);
    r.l_whole = std::stod(fields[4]);
    r.l_partial = std::stod(fields[5]);
    r.l_pred = std::stod(fields[6]);
    r.l_recon = std::stod(fields[7]);
    r.score = std::stod(fields[8]);
    r.label = std::stoi(fields[9]);
    records.push_back(std::move(r));
  }
  return records;
}

void write_frame_series_json(const std::string& path, const FrameSeries& series) {
  nlohmann::json videos = nlohmann::json::object();
  for (const auto& [video, points] : series) {
    nlohmann::json frames = nlohmann::json::array(), scores = nlohmann::json::array(),
                   labels = nlohmann::json::array();
    for (const auto& p : points) {
      frames.push_back(p.frame_index);
      scores.push_back(p.score);
      labels.push_back(p.label);
    }
    videos[video] = {{"frames", frames}, {"scores", scores}, {"labels", labels}};
  }
  std::ofstream out(path);
  require(out.good(), "write_frame_series_json: cannot open " + path);
  out << nlohmann::json{{"videos", videos}}.dump(2) << "\n";
}

Image render_error_map(const VecF& map, int upscale) {
  require(map.size() == kFrameSize * kFrameSize, "render_error_map: expected a 32x32 map");
  require(upscale >= 1, "render_error_map: bad upscale");
  float mx = map.maxCoeff();
  Image img(kFrameSize * upscale, kFrameSize * upscale, 0, 0, 0);
  for (int y = 0; y < kFrameSize; ++y)
    for (int x = 0; x < kFrameSize; ++x) {
      double v = mx > 0.0f ? map[y * kFrameSize + x] / mx : 0.0;
      uint8_t r, g, b;
      heat_color(v, &r, &g, &b);
      img.fill_rect(x * upscale, y * upscale, (x + 1) * upscale - 1, (y + 1) * upscale - 1, r, g,
                    b);
    }
  return img;
}

Image render_score_curve(const std::vector<FramePoint>& points) {
  const int margin = 24;
  const int plot_h = 120;
  int n = static_cast<int>(points.size());
  int plot_w = std::max(200, 3 * n);
  Image img(plot_w + 2 * margin, plot_h + 2 * margin);

  double lo = 0.0, hi = 1e-12;
  for (const auto& p : points) hi = std::max(hi, p.score);

  auto px = [&](int i) {
    return margin + (n > 1 ? i * (plot_w - 1) / (n - 1) : 0);
  };
  auto py = [&](double s) {
    return margin + plot_h - 1 - static_cast<int>((s - lo) / (hi - lo) * (plot_h - 1));
  };

  // shade labeled anomalous stretches
  for (int i = 0; i < n; ++i)
    if (points[static_cast<size_t>(i)].label == 1)
      img.fill_rect(px(i) - 1, margin, px(i) + 1, margin + plot_h - 1, 255, 219, 172);

  // axes
  img.line(margin, margin, margin, margin + plot_h - 1, 60, 60, 60);
  img.line(margin, margin + plot_h - 1, margin + plot_w - 1, margin + plot_h - 1, 60, 60, 60);

  for (int i = 1; i < n; ++i)
    img.line(px(i - 1), py(points[static_cast<size_t>(i - 1)].score), px(i),
             py(points[static_cast<size_t>(i)].score), 30, 80, 200);
  return img;
}

}  // namespace mcvad::eval
