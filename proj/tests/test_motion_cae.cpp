#include <doctest.h>

#include <filesystem>

#include "mcvad/model/motion_cae.hpp"
#include "mcvad/objectives/losses.hpp"
#include "mcvad/train/train.hpp"

using namespace mcvad;

namespace {

Mat<float> random_flows(Eigen::Index n, Rng& rng, double scale = 1.0) {
  Mat<float> flows(n, kFlowDim);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < kFlowDim; ++c)
      flows(r, c) = static_cast<float>(scale * rng.normal());
  return flows;
}

}  // namespace

TEST_CASE("reconstruction preserves the 2x32x32 shape and stays finite") {
  MotionCae<float> model;
  model.init_params(1);
  Rng rng(2);
  Mat<float> flows = random_flows(3, rng);
  typename MotionCae<float>::State st;
  Mat<float> recon = model.forward(flows, st);
  CHECK(recon.rows() == 3);
  CHECK(recon.cols() == kFlowDim);
  CHECK(recon.allFinite());

  Mat<float> bad(1, 100);
  CHECK_THROWS_AS(model.forward(bad, st), Error);
}

TEST_CASE("the bottleneck is strictly compressive") {
  MotionCae<float> model;
  CHECK(model.latent_dim() == 256);
  CHECK(model.latent_dim() < kFlowDim);
  CHECK(model.latent_dim() < 128 * 4 * 4);
  CaeConfig wide;
  wide.latent = 4096;
  CHECK_THROWS_AS(MotionCae<float>{wide}, Error);
}

TEST_CASE("gradients match central finite differences in double") {
  CaeConfig cfg;
  MotionCae<double> model(cfg);
  model.init_params(3);
  Rng rng(4);
  Mat<double> flows(2, kFlowDim);
  for (Eigen::Index i = 0; i < flows.rows(); ++i)
    for (Eigen::Index j = 0; j < flows.cols(); ++j) flows(i, j) = rng.normal();

  auto loss_fn = [&](bool backward) {
    typename MotionCae<double>::State st;
    Mat<double> recon = model.forward(flows, st);
    Mat<double> grad;
    double loss = flow_loss_batch<double>(recon, flows, backward ? &grad : nullptr);
    if (backward) model.backward(grad, st);
    return loss;
  };

  nn::ParamList<double> params = model.params();
  nn::zero_grads(params);
  loss_fn(true);

  Rng pick(5);
  const double h = 1e-3;
  int checked = 0;
  for (int probe = 0; probe < 10; ++probe) {
    auto* p = params[pick.below(static_cast<uint32_t>(params.size()))];
    Eigen::Index i = pick.below(static_cast<uint32_t>(p->value.rows()));
    Eigen::Index j = pick.below(static_cast<uint32_t>(p->value.cols()));
    double orig = p->value(i, j);
    p->value(i, j) = orig + h;
    double lp = loss_fn(false);
    p->value(i, j) = orig - h;
    double lm = loss_fn(false);
    p->value(i, j) = orig;
    double fd = (lp - lm) / (2.0 * h);
    double an = p->grad(i, j);
    if (std::fabs(fd) < 1e-12 && std::fabs(an) < 1e-12) continue;  // dead ReLU path
    INFO(p->name, "[", i, ",", j, "] fd=", fd, " an=", an);
    CHECK(std::fabs(fd - an) / std::max({std::fabs(fd), std::fabs(an)}) < 1e-3);
    ++checked;
  }
  CHECK(checked >= 5);
}

TEST_CASE("two hundred steps on zero flows reach loss below 1e-3") {
  datagen::LoadedDataset data;
  data.flows = Mat<float>::Zero(8, kFlowDim);
  data.cubes = Mat<float>::Zero(8, kCubeFrames * kFrameDim);
  for (int i = 0; i < 8; ++i) {
    datagen::ManifestEntry e;
    e.video_id = "v";
    e.frame_index = i;
    e.track_id = "obj0";
    data.entries.push_back(e);
  }
  train::TrainConfig cfg;
  cfg.epochs = 200;  // one batch per epoch
  cfg.batch_size = 8;
  cfg.t0_epochs = 200;
  cfg.seed = 6;
  auto result = train::train_motion(CaeConfig{}, cfg, data);
  CHECK(result.log.size() == 200);
  CHECK(result.log.back().loss < 1e-3);
}

TEST_CASE("reconstruction error orders held-out normal flows below fast flows") {
  Rng rng(7);
  // normal flows: sprite-like masks with |v| around 1; fast: same masks, 3x
  auto make_flow = [&](double speed_scale) {
    VecF v = VecF::Zero(kFlowDim);
    int cx = rng.range(8, 24), cy = rng.range(8, 24), s = rng.range(4, 8);
    double angle = rng.uniform(0.0, 2.0 * M_PI);
    double vx = speed_scale * std::cos(angle), vy = speed_scale * std::sin(angle);
    for (int y = cy - s / 2; y < cy + s / 2; ++y)
      for (int x = cx - s / 2; x < cx + s / 2; ++x) {
        v[y * 32 + x] = static_cast<float>(vx);
        v[1024 + y * 32 + x] = static_cast<float>(vy);
      }
    return v;
  };

  datagen::LoadedDataset data;
  const int n = 96;
  data.flows.resize(n, kFlowDim);
  data.cubes = Mat<float>::Zero(n, kCubeFrames * kFrameDim);
  for (int i = 0; i < n; ++i) {
    data.flows.row(i) = make_flow(rng.uniform(0.8, 1.3)).transpose();
    datagen::ManifestEntry e;
    e.video_id = "v";
    e.frame_index = i;
    e.track_id = "obj0";
    data.entries.push_back(e);
  }

  train::TrainConfig cfg;
  cfg.epochs = 60;
  cfg.batch_size = 32;
  cfg.t0_epochs = 60;
  cfg.seed = 8;
  auto result = train::train_motion(CaeConfig{}, cfg, data);

  typename MotionCae<float>::State st;
  double normal_err = 0.0, fast_err = 0.0;
  const int trials = 24;
  for (int i = 0; i < trials; ++i) {
    VecF nf = make_flow(rng.uniform(0.8, 1.3));
    VecF ff = make_flow(3.0 * rng.uniform(0.8, 1.3));
    Mat<float> in(1, kFlowDim);
    in.row(0) = nf.transpose();
    VecF nr = result.model.forward(in, st).row(0).transpose();
    in.row(0) = ff.transpose();
    VecF fr = result.model.forward(in, st).row(0).transpose();
    normal_err += flow_loss(nr, nf);
    fast_err += flow_loss(fr, ff);
  }
  CHECK(fast_err / trials > normal_err / trials);
}

TEST_CASE("cae checkpoints round-trip") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "mcvad_test_cae";
  fs::create_directories(dir);
  std::string path = (dir / "cae.ckpt").string();

  MotionCae<float> model;
  model.init_params(9);
  save_cae_checkpoint(path, model);
  MotionCae<float> loaded = load_cae_checkpoint(path);

  Rng rng(10);
  Mat<float> flows = random_flows(2, rng);
  typename MotionCae<float>::State s1, s2;
  CHECK((model.forward(flows, s1) - loaded.forward(flows, s2)).cwiseAbs().maxCoeff() == 0.0f);

  CHECK_THROWS_AS(load_vit_checkpoint(path), Error);
}
