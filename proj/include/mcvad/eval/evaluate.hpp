#pragma once

#include <map>

#include "mcvad/datagen/dataset.hpp"
#include "mcvad/model/context_vit.hpp"
#include "mcvad/model/motion_cae.hpp"
#include "mcvad/objectives/losses.hpp"

namespace mcvad::eval {

/// Inference masking: the mask stream for an object is seeded by a stable
/// hash of (video_id, frame_index, track_id); scores average over draws.
struct MaskPolicy {
  int draws = 1;
  uint64_t base_seed = 0;
};

enum class FrameAgg { max, mean };
const char* to_string(FrameAgg a);
FrameAgg frame_agg_from_string(const std::string& s);

struct ScoreRecord {
  std::string video_id;
  int64_t frame_index = 0;
  std::string track_id;
  double l_masked = 0.0, l_whole = 0.0, l_partial = 0.0, l_pred = 0.0, l_recon = 0.0;
  double score = 0.0;
  int label = 0;
};

ScoreRecord score_object(const ContextVit<float>& vit, const MotionCae<float>* cae,
                         const datagen::ObjectCube& cube, const VecF& flow, const ScoreWeights& w,
                         const MaskPolicy& policy);

/// Scores every entry; output is sorted by (video, frame, track).
std::vector<ScoreRecord> score_dataset(const ContextVit<float>& vit, const MotionCae<float>* cae,
                                       const datagen::LoadedDataset& data, const ScoreWeights& w,
                                       const MaskPolicy& policy);

/// Object -> frame reduction; empty frames score 0.
double aggregate_frame_scores(const std::vector<double>& object_scores, FrameAgg agg);

struct FramePoint {
  int64_t frame_index = 0;
  double score = 0.0;
  int label = 0;
};
using FrameSeries = std::map<std::string, std::vector<FramePoint>>;

/// Per-video ordered frame scores. Frames between the first and last scored
/// frame of a video with no objects get score 0 and label 0.
FrameSeries build_frame_series(const std::vector<ScoreRecord>& records, FrameAgg agg);

/// Min-max rescale of each video's scores to [0,1]; constant series all-zero.
void normalize_per_video(FrameSeries& series);

/// Tie-aware rank-statistic AUROC over pooled scores.
double auroc(const std::vector<double>& scores, const std::vector<int>& labels);

/// Pooled frame-level AUROC with scores re-fused from the stored loss
/// components under the given weights.
double frame_auroc(const std::vector<ScoreRecord>& records, const ScoreWeights& w, FrameAgg agg,
                   bool normalize);

/// Per-pixel squared error summed over channels: (3072, 3072) -> 1024.
VecF error_map(const VecF& prediction, const VecF& ground_truth);

}  // namespace mcvad::eval
