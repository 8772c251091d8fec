#include "mcvad/cli/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "mcvad/cli/pipeline.hpp"
#include "mcvad/eval/artifacts.hpp"

namespace fs = std::filesystem;

namespace mcvad::cli {

namespace {

uint64_t scene_seed(uint64_t run_seed, const std::string& split, int index) {
  return fnv1a_u64(static_cast<uint64_t>(index), fnv1a(split, fnv1a_u64(run_seed)));
}

std::string zero_pad(int v, int width = 3) {
  std::string s = std::to_string(v);
  while (static_cast<int>(s.size()) < width) s.insert(s.begin(), '0');
  return s;
}

datagen::SceneConfig scene_config_for(const DataConfig& d, bool train_split) {
  datagen::SceneConfig sc;
  sc.n_frames = d.frames_per_scene;
  sc.n_sprites = d.sprites_per_scene;
  sc.anomaly_rate = train_split ? 0.0 : d.anomaly_rate;
  sc.canvas = d.canvas;
  sc.train_split = train_split;
  sc.speed_min = d.speed_min;
  sc.speed_max = d.speed_max;
  sc.size_min = d.size_min;
  sc.size_max = d.size_max;
  sc.fast_multiplier = d.fast_multiplier;
  sc.anomaly_mix = d.anomaly_mix;
  sc.ensure_test_anomaly = d.ensure_test_anomaly;
  return sc;
}

void generate_split(const RunConfig& cfg, bool train_split) {
  const std::string split = train_split ? "train" : "test";
  const int n_scenes = train_split ? cfg.data.train_scenes : cfg.data.test_scenes;
  const datagen::FlowMode mode = datagen::flow_mode_from_string(cfg.data.flow_mode);

  std::vector<datagen::ObjectCube> cubes;
  std::vector<datagen::FlowMap> flows;
  datagen::ExtractStats total;
  int labeled = 0;

  for (int i = 0; i < n_scenes; ++i) {
    datagen::SceneConfig sc = scene_config_for(cfg.data, train_split);
    datagen::Scene scene =
        datagen::generate_scene(sc, scene_seed(cfg.seed, split, i), split + "_" + zero_pad(i));
    datagen::ExtractStats stats;
    auto scene_cubes = datagen::extract_cubes(scene, &stats);
    total.cubes += stats.cubes;
    total.skipped_short += stats.skipped_short;
    total.skipped_bounds += stats.skipped_bounds;
    for (auto& cube : scene_cubes) {
      const datagen::SpriteTrack* track = nullptr;
      for (const auto& t : scene.tracks)
        if (t.track_id == cube.track_id) track = &t;
      require(track != nullptr, "generate: unknown track " + cube.track_id);
      flows.push_back(datagen::compute_flow(scene, *track, static_cast<int>(cube.frame_index),
                                            mode));
      labeled += cube.label;
      cubes.push_back(std::move(cube));
    }
  }

  std::string root = (fs::path(cfg.data.root) / split).string();
  datagen::write_dataset(cubes, flows, split, mode, root, cfg.data.force);
  std::cout << "wrote " << split << " split: " << cubes.size() << " cubes (" << labeled
            << " anomalous), skipped " << total.skipped_short << " short runs, "
            << total.skipped_bounds << " out-of-bounds crops -> " << root << "\n";
}

train::TrainConfig appearance_train_config(const RunConfig& cfg) {
  train::TrainConfig t = cfg.train;
  t.seed = cfg.seed;
  t.masking_ratio = cfg.model.mask_ratio;
  return t;
}

train::TrainConfig motion_train_config(const RunConfig& cfg) {
  train::TrainConfig t = cfg.train;
  t.seed = cfg.seed;
  t.masking_ratio = cfg.model.mask_ratio;
  t.epochs = cfg.motion_epochs;
  return t;
}

eval::MaskPolicy mask_policy_for(const RunConfig& cfg) {
  return eval::MaskPolicy{cfg.eval.mask_draws, cfg.eval.mask_seed};
}

}  // namespace

int cmd_generate(const RunConfig& cfg) {
  generate_split(cfg, /*train_split=*/true);
  generate_split(cfg, /*train_split=*/false);
  fs::create_directories(cfg.data.root);
  RunConfig snapshot = cfg;
  snapshot.write_snapshot(cfg.data.root);
  return 0;
}

int cmd_train(const RunConfig& cfg) {
  fs::create_directories(cfg.out);
  cfg.write_snapshot(cfg.out);

  auto train_data = datagen::load_all(datagen::read_dataset(
      (fs::path(cfg.data.root) / "train").string()));
  std::cout << "loaded " << train_data.cubes.rows() << " training cubes\n";

  auto appearance = train::train_appearance(cfg.model, appearance_train_config(cfg), train_data);
  std::string app_path = (fs::path(cfg.out) / "appearance.ckpt").string();
  save_vit_checkpoint(app_path, appearance.model);
  train::write_loss_log((fs::path(cfg.out) / "appearance_log.jsonl").string(), appearance.log);
  std::cout << "appearance: " << appearance.model.parameter_count() << " parameters, final loss "
            << appearance.log.back().loss << " -> " << app_path << "\n";

  if (cfg.motion) {
    auto motion = train::train_motion(CaeConfig{}, motion_train_config(cfg), train_data);
    std::string mot_path = (fs::path(cfg.out) / "motion.ckpt").string();
    save_cae_checkpoint(mot_path, motion.model);
    train::write_loss_log((fs::path(cfg.out) / "motion_log.jsonl").string(), motion.log);
    std::cout << "motion: " << motion.model.parameter_count() << " parameters, final loss "
              << motion.log.back().loss << " -> " << mot_path << "\n";
  }
  return 0;
}

int cmd_eval(const RunConfig& cfg) {
  fs::create_directories(cfg.out);
  cfg.write_snapshot(cfg.out);

  auto test_data =
      datagen::load_all(datagen::read_dataset((fs::path(cfg.data.root) / "test").string()));
  ContextVit<float> vit = load_vit_checkpoint((fs::path(cfg.out) / "appearance.ckpt").string());

  std::optional<MotionCae<float>> cae;
  if (cfg.motion) cae = load_cae_checkpoint((fs::path(cfg.out) / "motion.ckpt").string());

  auto records = eval::score_dataset(vit, cae ? &*cae : nullptr, test_data, cfg.eval.weights,
                                     mask_policy_for(cfg));
  eval::write_scores_csv((fs::path(cfg.out) / "scores.csv").string(), records);

  eval::FrameAgg agg = eval::frame_agg_from_string(cfg.eval.aggregation);
  eval::FrameSeries series = eval::build_frame_series(records, agg);
  if (cfg.eval.normalize_per_video) eval::normalize_per_video(series);
  eval::write_frame_series_json((fs::path(cfg.out) / "frame_series.json").string(), series);

  double fused = eval::frame_auroc(records, cfg.eval.weights, agg, cfg.eval.normalize_per_video);
  double appearance_only =
      eval::frame_auroc(records, {1.0, 0.0}, agg, cfg.eval.normalize_per_video);
  nlohmann::json summary = {{"auroc", fused},
                            {"auroc_appearance_only", appearance_only},
                            {"n_records", records.size()},
                            {"n_videos", series.size()},
                            {"weights", {cfg.eval.weights.lambda_a, cfg.eval.weights.lambda_o}},
                            {"aggregation", cfg.eval.aggregation},
                            {"normalize_per_video", cfg.eval.normalize_per_video},
                            {"mask_draws", cfg.eval.mask_draws}};
  if (cfg.motion) {
    summary["auroc_flow_only"] =
        eval::frame_auroc(records, {0.0, 1.0}, agg, cfg.eval.normalize_per_video);
  }
  {
    std::ofstream out(fs::path(cfg.out) / "summary.json");
    require(out.good(), "cmd_eval: cannot write summary.json");
    out << summary.dump(2) << "\n";
  }
  std::cout << summary.dump(2) << "\n";
  return 0;
}

int cmd_ablate(const RunConfig& cfg) {
  fs::create_directories(cfg.out);
  cfg.write_snapshot(cfg.out);

  auto train_data = datagen::load_all(datagen::read_dataset(
      (fs::path(cfg.data.root) / "train").string()));
  auto test_data =
      datagen::load_all(datagen::read_dataset((fs::path(cfg.data.root) / "test").string()));

  eval::FrameAgg agg = eval::frame_agg_from_string(cfg.eval.aggregation);
  nlohmann::json rows_json = nlohmann::json::array();
  std::ofstream csv(fs::path(cfg.out) / "ablation.csv");
  require(csv.good(), "cmd_ablate: cannot write ablation.csv");
  csv << "row,streams,seed,auroc\n";

  std::printf("%-14s", "row");
  for (uint64_t seed : cfg.ablate.seeds) std::printf("  seed %-6llu", static_cast<unsigned long long>(seed));
  std::printf("  mean\n");

  for (const auto& row : pipeline::ablation_rows()) {
    VitConfig vit_cfg = cfg.model;
    vit_cfg.streams = row.streams;
    std::vector<double> aurocs;
    for (uint64_t seed : cfg.ablate.seeds) {
      train::TrainConfig tcfg = appearance_train_config(cfg);
      tcfg.epochs = cfg.ablate.epochs;
      tcfg.seed = seed;
      auto outcome = pipeline::train_and_score(vit_cfg, tcfg, /*with_motion=*/false, CaeConfig{},
                                               tcfg, train_data, test_data, {1.0, 0.0},
                                               mask_policy_for(cfg));
      double a = eval::frame_auroc(outcome.records, {1.0, 0.0}, agg, cfg.eval.normalize_per_video);
      aurocs.push_back(a);
      csv << row.name << ',' << streams_to_string(row.streams) << ',' << seed << ',' << a << "\n";
    }
    double mean = 0.0;
    for (double a : aurocs) mean += a;
    mean /= static_cast<double>(aurocs.size());

    std::printf("%-14s", row.name.c_str());
    for (double a : aurocs) std::printf("  %.4f     ", a);
    std::printf("  %.4f\n", mean);

    rows_json.push_back({{"row", row.name},
                         {"streams", streams_to_string(row.streams)},
                         {"seeds", cfg.ablate.seeds},
                         {"aurocs", aurocs},
                         {"mean_auroc", mean}});
  }

  std::ofstream out(fs::path(cfg.out) / "ablation.json");
  require(out.good(), "cmd_ablate: cannot write ablation.json");
  out << nlohmann::json{{"rows", rows_json}, {"epochs", cfg.ablate.epochs}}.dump(2) << "\n";
  return 0;
}

int cmd_plot(const RunConfig& cfg) {
  fs::path plots = fs::path(cfg.out) / "plots";
  fs::create_directories(plots);

  auto records = eval::read_scores_csv((fs::path(cfg.out) / "scores.csv").string());
  eval::FrameAgg agg = eval::frame_agg_from_string(cfg.eval.aggregation);
  eval::FrameSeries series = eval::build_frame_series(records, agg);
  if (cfg.eval.normalize_per_video) eval::normalize_per_video(series);
  for (const auto& [video, points] : series)
    write_png((plots / (video + "_curve.png")).string(), eval::render_score_curve(points));

  // error maps of the highest-scoring objects
  datagen::Dataset test = datagen::read_dataset((fs::path(cfg.data.root) / "test").string());
  ContextVit<float> vit = load_vit_checkpoint((fs::path(cfg.out) / "appearance.ckpt").string());

  std::vector<size_t> order(records.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return records[a].score > records[b].score; });

  std::map<std::string, size_t> index;
  for (size_t i = 0; i < test.manifest.entries.size(); ++i) {
    const auto& e = test.manifest.entries[i];
    index[e.video_id + "/" + std::to_string(e.frame_index) + "/" + e.track_id] = i;
  }

  const size_t n_maps = std::min<size_t>(records.size(), 8);
  typename ContextVit<float>::State state;
  for (size_t k = 0; k < n_maps; ++k) {
    const auto& r = records[order[k]];
    auto it = index.find(r.video_id + "/" + std::to_string(r.frame_index) + "/" + r.track_id);
    require(it != index.end(), "cmd_plot: scores.csv row not present in the dataset");
    datagen::ObjectCube cube = test.load_cube(it->second);

    Mat<float> inputs(1, static_cast<Eigen::Index>(kCubeInputs) * kFrameDim);
    for (int i = 0; i < kCubeInputs; ++i)
      inputs.row(0).segment(i * kFrameDim, kFrameDim) = cube.frames.row(i);
    MaskPattern mask;
    if (vit.cfg.masking_enabled())
      mask = sample_mask(vit.cfg.mask_ratio,
                         stable_mask_seed(r.video_id, r.frame_index, r.track_id,
                                          cfg.eval.mask_seed, 0));
    PredictionBundle bundle = vit.forward_cube(inputs, mask, state);

    VecF prediction, target;
    if (bundle.whole.size() > 0) {
      prediction = bundle.whole;
      target = cube.frames.row(kCubeFrames - 1).transpose();
    } else if (bundle.partial.size() > 0) {
      prediction = bundle.partial;
      target = cube.frames.row(kCubeFrames - 1).transpose();
    } else {
      require(!bundle.masked_recons.empty(), "cmd_plot: bundle has no predictions");
      prediction = bundle.masked_recons.front().second;
      target = cube.frames.row(bundle.masked_recons.front().first).transpose();
    }
    VecF map = eval::error_map(prediction, target);
    write_png((plots / (r.video_id + "_" + std::to_string(r.frame_index) + ".png")).string(),
              eval::render_error_map(map));
  }
  std::cout << "wrote " << series.size() << " score curves and " << n_maps << " error maps -> "
            << plots.string() << "\n";
  return 0;
}

}  // namespace mcvad::cli
