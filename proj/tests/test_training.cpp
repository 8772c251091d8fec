#include <doctest.h>

#include "mcvad/datagen/dataset.hpp"
#include "mcvad/train/train.hpp"

using namespace mcvad;

namespace {

VitConfig tiny_vit(StreamSet streams = {true, true, true}) {
  VitConfig cfg;
  cfg.token_dim = 32;
  cfg.enc_depth = 2;
  cfg.dec_depth = 1;
  cfg.heads = 2;
  cfg.ffn_mult = 2;
  cfg.mask_ratio = 0.5;
  cfg.streams = streams;
  return cfg;
}

datagen::LoadedDataset synthetic_data(int n, uint64_t seed) {
  datagen::SceneConfig sc;
  sc.n_frames = 24;
  sc.n_sprites = 2;
  sc.train_split = true;
  datagen::LoadedDataset data;
  std::vector<datagen::ObjectCube> cubes;
  std::vector<VecF> flows;
  int scene_idx = 0;
  while (static_cast<int>(cubes.size()) < n) {
    datagen::Scene scene = datagen::generate_scene(sc, seed + scene_idx, "v" + std::to_string(scene_idx));
    auto scene_cubes = datagen::extract_cubes(scene);
    for (auto& cube : scene_cubes) {
      if (static_cast<int>(cubes.size()) >= n) break;
      for (const auto& track : scene.tracks)
        if (track.track_id == cube.track_id)
          flows.push_back(datagen::compute_flow(scene, track, static_cast<int>(cube.frame_index),
                                                datagen::FlowMode::ground_truth)
                              .values);
      cubes.push_back(std::move(cube));
    }
    ++scene_idx;
  }
  data.cubes.resize(n, kCubeFrames * kFrameDim);
  data.flows.resize(n, kFlowDim);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < kCubeFrames; ++k)
      data.cubes.row(i).segment(k * kFrameDim, kFrameDim) = cubes[static_cast<size_t>(i)].frames.row(k);
    data.flows.row(i) = flows[static_cast<size_t>(i)].transpose();
    datagen::ManifestEntry e;
    e.video_id = cubes[static_cast<size_t>(i)].video_id;
    e.frame_index = cubes[static_cast<size_t>(i)].frame_index;
    e.track_id = cubes[static_cast<size_t>(i)].track_id;
    data.entries.push_back(e);
  }
  return data;
}

}  // namespace

TEST_CASE("the learning-rate schedule meets the paper settings") {
  train::TrainConfig cfg;
  cfg.batch_size = 10;
  cfg.t0_epochs = 5;
  auto sched = train::make_schedule(cfg, 100);  // 10 steps/epoch -> period 50
  CHECK(std::fabs(sched.lr_at(0) - 1.5e-4) < 1e-12);
  CHECK(std::fabs(sched.lr_at(50) - 1e-5) < 1e-12);
  CHECK(std::fabs(sched.lr_at(25) - 8.0e-5) < 1e-12);
  for (int64_t s = 0; s < 400; ++s) {
    CHECK(sched.lr_at(s) <= cfg.lr + 1e-15);
    CHECK(sched.lr_at(s) >= cfg.min_lr - 1e-15);
  }
}

TEST_CASE("config validation rejects broken settings") {
  train::TrainConfig cfg;
  cfg.min_lr = 2e-4;  // above lr
  CHECK_THROWS_AS(cfg.validate(), Error);
  train::TrainConfig cfg2;
  cfg2.batch_size = 0;
  CHECK_THROWS_AS(cfg2.validate(), Error);
}

TEST_CASE("training rejects labeled data") {
  datagen::LoadedDataset data = synthetic_data(8, 10);
  data.entries[3].label = 1;
  train::TrainConfig cfg;
  cfg.epochs = 1;
  cfg.batch_size = 8;
  CHECK_THROWS_WITH_AS(train::train_appearance(tiny_vit(), cfg, data),
                       doctest::Contains("anomaly-free"), Error);
}

TEST_CASE("same seed reproduces the appearance run exactly") {
  datagen::LoadedDataset data = synthetic_data(16, 11);
  train::TrainConfig cfg;
  cfg.epochs = 2;
  cfg.batch_size = 8;
  cfg.seed = 21;
  auto a = train::train_appearance(tiny_vit(), cfg, data);
  auto b = train::train_appearance(tiny_vit(), cfg, data);
  CHECK(a.log.back().loss == b.log.back().loss);
  auto pa = a.model.params(), pb = b.model.params();
  for (size_t i = 0; i < pa.size(); ++i)
    CHECK((pa[i]->value - pb[i]->value).cwiseAbs().maxCoeff() == 0.0f);

  cfg.seed = 22;
  auto c = train::train_appearance(tiny_vit(), cfg, data);
  CHECK(a.log.back().loss != c.log.back().loss);
}

TEST_CASE("one-cube memorization drops the prediction loss by 10x within 300 steps") {
  datagen::LoadedDataset data = synthetic_data(1, 12);
  train::TrainConfig cfg;
  cfg.epochs = 300;  // one step per epoch
  cfg.batch_size = 1;
  cfg.t0_epochs = 300;
  cfg.seed = 23;
  auto result = train::train_appearance(tiny_vit(), cfg, data);
  CHECK(result.log.size() == 300);
  CHECK(result.log.back().loss < 0.1 * result.log.front().loss);
}

TEST_CASE("loss log has one record per epoch with decreasing trend on real data") {
  datagen::LoadedDataset data = synthetic_data(32, 13);
  train::TrainConfig cfg;
  cfg.epochs = 4;
  cfg.batch_size = 16;
  cfg.seed = 24;
  auto result = train::train_appearance(tiny_vit(), cfg, data);
  REQUIRE(result.log.size() == 4);
  CHECK(result.log.back().loss < result.log.front().loss);
  for (const auto& e : result.log) {
    CHECK(e.lr <= cfg.lr);
    CHECK(e.lr >= cfg.min_lr);
  }
}

TEST_CASE("non-finite inputs abort with the offending batch identifier") {
  datagen::LoadedDataset data = synthetic_data(8, 14);
  data.cubes(2, 5) = std::numeric_limits<float>::quiet_NaN();
  train::TrainConfig cfg;
  cfg.epochs = 1;
  cfg.batch_size = 8;
  CHECK_THROWS_WITH_AS(train::train_appearance(tiny_vit(), cfg, data),
                       doctest::Contains("non-finite"), Error);
}

TEST_CASE("motion training is reproducible and logs per epoch") {
  datagen::LoadedDataset data = synthetic_data(16, 15);
  train::TrainConfig cfg;
  cfg.epochs = 3;
  cfg.batch_size = 8;
  cfg.seed = 25;
  auto a = train::train_motion(CaeConfig{}, cfg, data);
  auto b = train::train_motion(CaeConfig{}, cfg, data);
  CHECK(a.log.size() == 3);
  CHECK(a.log.back().loss == b.log.back().loss);
}

TEST_CASE("branches are independent: training one leaves the other untouched") {
  datagen::LoadedDataset data = synthetic_data(8, 16);
  ContextVit<float> vit(tiny_vit());
  vit.init_params(30);
  std::vector<Mat<float>> before;
  for (auto* p : vit.params()) before.push_back(Mat<float>(p->value));

  train::TrainConfig cfg;
  cfg.epochs = 2;
  cfg.batch_size = 8;
  train::train_motion(CaeConfig{}, cfg, data);

  auto params = vit.params();
  for (size_t i = 0; i < params.size(); ++i)
    CHECK((params[i]->value - before[i]).cwiseAbs().maxCoeff() == 0.0f);
}

TEST_CASE("trainer validates the masking ratio against the model") {
  datagen::LoadedDataset data = synthetic_data(8, 17);
  train::TrainConfig cfg;
  cfg.epochs = 1;
  cfg.batch_size = 8;
  cfg.masking_ratio = 0.75;  // model is configured for 0.5
  CHECK_THROWS_AS(train::train_appearance(tiny_vit(), cfg, data), Error);
}
