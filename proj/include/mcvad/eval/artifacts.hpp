#pragma once

#include "mcvad/core/image.hpp"
#include "mcvad/eval/evaluate.hpp"

namespace mcvad::eval {

/// Columns: video_id,frame_index,track_id,l_masked,l_whole,l_partial,l_pred,
/// l_recon,score,label. Formatting is fixed so reruns are byte-identical.
void write_scores_csv(const std::string& path, const std::vector<ScoreRecord>& records);
std::vector<ScoreRecord> read_scores_csv(const std::string& path);

void write_frame_series_json(const std::string& path, const FrameSeries& series);

/// Heat rendering of an error map, upscaled for visibility; values are
/// scaled by the map's own maximum.
Image render_error_map(const VecF& map, int upscale = 4);

/// Score curve of one video: shaded regions mark labeled anomalous frames.
Image render_score_curve(const std::vector<FramePoint>& points);

}  // namespace mcvad::eval
