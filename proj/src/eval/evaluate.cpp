#include "mcvad/eval/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mcvad::eval {

const char* to_string(FrameAgg a) { return a == FrameAgg::max ? "max" : "mean"; }

FrameAgg frame_agg_from_string(const std::string& s) {
  if (s == "max") return FrameAgg::max;
  if (s == "mean") return FrameAgg::mean;
  throw Error("unknown frame aggregation: " + s);
}

ScoreRecord score_object(const ContextVit<float>& vit, const MotionCae<float>* cae,
                         const datagen::ObjectCube& cube, const VecF& flow, const ScoreWeights& w,
                         const MaskPolicy& policy) {
  require(policy.draws >= 1, "score_object: draws must be at least 1");
  require(cube.frames.rows() == kCubeFrames && cube.frames.cols() == kFrameDim,
          "score_object: bad cube shape");

  ScoreRecord rec;
  rec.video_id = cube.video_id;
  rec.frame_index = cube.frame_index;
  rec.track_id = cube.track_id;
  rec.label = cube.label;

  if (cae) {
    typename MotionCae<float>::State cae_state;
    Mat<float> in(1, kFlowDim);
    in.row(0) = flow.transpose();
    Mat<float> recon = cae->forward(in, cae_state);
    VecF recon_vec = recon.row(0).transpose();
    rec.l_recon = flow_loss(recon_vec, flow);
  }

  Mat<float> inputs(1, static_cast<Eigen::Index>(kCubeInputs) * kFrameDim);
  for (int i = 0; i < kCubeInputs; ++i)
    inputs.row(0).segment(i * kFrameDim, kFrameDim) = cube.frames.row(i);

  typename ContextVit<float>::State state;
  const int draws = vit.cfg.masking_enabled() ? policy.draws : 1;
  double sum_masked = 0.0, sum_whole = 0.0, sum_partial = 0.0, sum_score = 0.0;
  for (int d = 0; d < draws; ++d) {
    MaskPattern mask;
    if (vit.cfg.masking_enabled()) {
      uint64_t seed = stable_mask_seed(cube.video_id, cube.frame_index, cube.track_id,
                                       policy.base_seed, d);
      mask = sample_mask(vit.cfg.mask_ratio, seed);
    }
    PredictionBundle bundle = vit.forward_cube(inputs, mask, state);
    LossBreakdown lb = pred_loss(bundle, cube.frames);
    sum_masked += lb.l_masked;
    sum_whole += lb.l_whole;
    sum_partial += lb.l_partial;
    sum_score += anomaly_score(lb.l_pred, rec.l_recon, w);
  }
  rec.l_masked = sum_masked / draws;
  rec.l_whole = sum_whole / draws;
  rec.l_partial = sum_partial / draws;
  rec.l_pred = rec.l_masked + rec.l_whole + rec.l_partial;
  rec.score = sum_score / draws;
  return rec;
}

std::vector<ScoreRecord> score_dataset(const ContextVit<float>& vit, const MotionCae<float>* cae,
                                       const datagen::LoadedDataset& data, const ScoreWeights& w,
                                       const MaskPolicy& policy) {
  std::vector<ScoreRecord> records;
  records.reserve(data.entries.size());
  for (size_t i = 0; i < data.entries.size(); ++i) {
    datagen::ObjectCube cube;
    cube.frames.resize(kCubeFrames, kFrameDim);
    for (int k = 0; k < kCubeFrames; ++k)
      cube.frames.row(k) = data.cubes.row(static_cast<Eigen::Index>(i))
                               .segment(k * kFrameDim, kFrameDim);
    const auto& e = data.entries[i];
    cube.video_id = e.video_id;
    cube.frame_index = e.frame_index;
    cube.track_id = e.track_id;
    cube.label = e.label;
    VecF flow = data.flows.row(static_cast<Eigen::Index>(i)).transpose();
    records.push_back(score_object(vit, cae, cube, flow, w, policy));
  }
  std::sort(records.begin(), records.end(), [](const ScoreRecord& a, const ScoreRecord& b) {
    return std::tie(a.video_id, a.frame_index, a.track_id) <
           std::tie(b.video_id, b.frame_index, b.track_id);
  });
  return records;
}

double aggregate_frame_scores(const std::vector<double>& object_scores, FrameAgg agg) {
  if (object_scores.empty()) return 0.0;
  if (agg == FrameAgg::max) return *std::max_element(object_scores.begin(), object_scores.end());
  return std::accumulate(object_scores.begin(), object_scores.end(), 0.0) /
         static_cast<double>(object_scores.size());
}

FrameSeries build_frame_series(const std::vector<ScoreRecord>& records, FrameAgg agg) {
  std::map<std::string, std::map<int64_t, std::pair<std::vector<double>, int>>> grouped;
  for (const auto& r : records) {
    auto& cell = grouped[r.video_id][r.frame_index];
    cell.first.push_back(r.score);
    cell.second = std::max(cell.second, r.label);
  }
  FrameSeries series;
  for (auto& [video, frames] : grouped) {
    int64_t lo = frames.begin()->first;
    int64_t hi = frames.rbegin()->first;
    auto& out = series[video];
    for (int64_t f = lo; f <= hi; ++f) {
      auto it = frames.find(f);
      if (it == frames.end())
        out.push_back({f, 0.0, 0});
      else
        out.push_back({f, aggregate_frame_scores(it->second.first, agg), it->second.second});
    }
  }
  return series;
}

void normalize_per_video(FrameSeries& series) {
  for (auto& [video, points] : series) {
    if (points.empty()) continue;
    double lo = points.front().score, hi = points.front().score;
    for (const auto& p : points) {
      lo = std::min(lo, p.score);
      hi = std::max(hi, p.score);
    }
    double range = hi - lo;
    for (auto& p : points) p.score = range > 0.0 ? (p.score - lo) / range : 0.0;
  }
}

double auroc(const std::vector<double>& scores, const std::vector<int>& labels) {
  require(scores.size() == labels.size(), "auroc: score/label size mismatch");
  require(!scores.empty(), "auroc: empty input");
  size_t n_pos = 0;
  for (int l : labels) {
    require(l == 0 || l == 1, "auroc: labels must be 0 or 1");
    n_pos += static_cast<size_t>(l);
  }
  size_t n_neg = scores.size() - n_pos;
  require(n_pos > 0 && n_neg > 0,
          "auroc: needs both classes, got " + std::to_string(n_pos) + " positive and " +
              std::to_string(n_neg) + " negative frames");

  std::vector<size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return scores[a] < scores[b]; });

  // average ranks over tie groups, then the Mann-Whitney statistic
  double pos_rank_sum = 0.0;
  size_t i = 0;
  while (i < idx.size()) {
    size_t j = i;
    while (j + 1 < idx.size() && scores[idx[j + 1]] == scores[idx[i]]) ++j;
    double avg_rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
    for (size_t k = i; k <= j; ++k)
      if (labels[idx[k]] == 1) pos_rank_sum += avg_rank;
    i = j + 1;
  }
  double u = pos_rank_sum - static_cast<double>(n_pos) * (static_cast<double>(n_pos) + 1.0) / 2.0;
  return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

double frame_auroc(const std::vector<ScoreRecord>& records, const ScoreWeights& w, FrameAgg agg,
                   bool normalize) {
  std::vector<ScoreRecord> refused = records;
  for (auto& r : refused) r.score = anomaly_score(r.l_pred, r.l_recon, w);
  FrameSeries series = build_frame_series(refused, agg);
  if (normalize) normalize_per_video(series);
  std::vector<double> scores;
  std::vector<int> labels;
  for (const auto& [video, points] : series)
    for (const auto& p : points) {
      scores.push_back(p.score);
      labels.push_back(p.label);
    }
  return auroc(scores, labels);
}

VecF error_map(const VecF& prediction, const VecF& ground_truth) {
  require(prediction.size() == kFrameDim && ground_truth.size() == kFrameDim,
          "error_map: inputs must be 3x32x32 frames");
  const int plane = kFrameSize * kFrameSize;
  VecF map = VecF::Zero(plane);
  for (int c = 0; c < kFrameChannels; ++c)
    for (int p = 0; p < plane; ++p) {
      float d = prediction[c * plane + p] - ground_truth[c * plane + p];
      map[p] += d * d;
    }
  return map;
}

}  // namespace mcvad::eval
