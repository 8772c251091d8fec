#include "mcvad/datagen/scene.hpp"

#include <cmath>

namespace mcvad::datagen {

const char* to_string(ShapeKind k) {
  switch (k) {
    case ShapeKind::square: return "square";
    case ShapeKind::circle: return "circle";
    case ShapeKind::triangle: return "triangle";
  }
  return "?";
}

const char* to_string(AnomalyTag t) {
  switch (t) {
    case AnomalyTag::none: return "none";
    case AnomalyTag::fast: return "fast";
    case AnomalyTag::reverse: return "reverse";
    case AnomalyTag::novel_shape: return "novel_shape";
  }
  return "?";
}

namespace {

/// Point-in-shape test in sprite-local coordinates.
bool shape_contains(const SpriteSpec& spec, double x, double y) {
  const double h = spec.size_px / 2.0;
  switch (spec.shape) {
    case ShapeKind::square:
      return std::fabs(x) <= h && std::fabs(y) <= h;
    case ShapeKind::circle:
      return x * x + y * y <= h * h;
    case ShapeKind::triangle: {
      // upward triangle: apex (0, -h), base corners (-h, h) and (h, h)
      auto side = [](double ax, double ay, double bx, double by, double qx, double qy) {
        return (bx - ax) * (qy - ay) - (by - ay) * (qx - ax);
      };
      double d0 = side(0.0, -h, -h, h, x, y);
      double d1 = side(-h, h, h, h, x, y);
      double d2 = side(h, h, 0.0, -h, x, y);
      bool neg = d0 < 0 || d1 < 0 || d2 < 0;
      bool pos = d0 > 0 || d1 > 0 || d2 > 0;
      return !(neg && pos);
    }
  }
  return false;
}

}  // namespace

bool sprite_covers(const SpriteSpec& spec, double cx, double cy, int px, int py) {
  return shape_contains(spec, px + 0.5 - cx, py + 0.5 - cy);
}

double sprite_coverage(const SpriteSpec& spec, double cx, double cy, int px, int py) {
  int hits = 0;
  for (int sy = 0; sy < 4; ++sy)
    for (int sx = 0; sx < 4; ++sx)
      hits += shape_contains(spec, px + (sx + 0.5) / 4.0 - cx, py + (sy + 0.5) / 4.0 - cy) ? 1 : 0;
  return hits / 16.0;
}

bool track_window_anomalous(const SpriteTrack& track, int t1, int t5) {
  switch (track.spec.anomaly) {
    case AnomalyTag::none: return false;
    case AnomalyTag::fast:
    case AnomalyTag::novel_shape: return true;
    case AnomalyTag::reverse:
      // both a pre- and a post-reversal displacement must fall in the window
      return track.reverse_at >= t1 + 1 && track.reverse_at <= t5 - 1;
  }
  return false;
}

namespace {

void render_sprite(VecF& frame, int canvas, const SpriteSpec& spec, double cx, double cy) {
  const double h = spec.size_px / 2.0 + 1.0;
  const int x0 = std::max(0, static_cast<int>(std::floor(cx - h)));
  const int x1 = std::min(canvas - 1, static_cast<int>(std::ceil(cx + h)));
  const int y0 = std::max(0, static_cast<int>(std::floor(cy - h)));
  const int y1 = std::min(canvas - 1, static_cast<int>(std::ceil(cy + h)));
  const int plane = canvas * canvas;
  for (int py = y0; py <= y1; ++py)
    for (int px = x0; px <= x1; ++px) {
      double cov = sprite_coverage(spec, cx, cy, px, py);
      if (cov <= 0.0) continue;
      for (int c = 0; c < 3; ++c) {
        float& v = frame[c * plane + py * canvas + px];
        v = static_cast<float>((1.0 - cov) * v + cov * spec.color[static_cast<size_t>(c)]);
      }
    }
}

}  // namespace

namespace {

void validate_config(const SceneConfig& config) {
  require(config.n_frames >= 6, "generate_scene: n_frames must be at least 6");
  require(config.n_sprites >= 1, "generate_scene: n_sprites must be at least 1");
  require(config.canvas >= 2 * kFrameSize, "generate_scene: canvas must be at least 64");
  require(config.anomaly_rate >= 0.0 && config.anomaly_rate <= 1.0,
          "generate_scene: anomaly_rate must be in [0, 1]");
  require(!(config.train_split && config.anomaly_rate > 0.0),
          "generate_scene: the train split must not contain anomalies");
  require(config.speed_min > 0.0 && config.speed_max >= config.speed_min,
          "generate_scene: bad speed range");
  require(config.size_min >= 6 && config.size_max <= 20 && config.size_min <= config.size_max,
          "generate_scene: sprite size must stay within [6, 20]");
}

}  // namespace

Scene assemble_scene(const SceneConfig& config, const std::vector<SpriteDef>& sprites,
                     const std::string& video_id) {
  Scene scene;
  scene.config = config;
  scene.video_id = video_id;
  const int mid = config.n_frames / 2;

  for (size_t s = 0; s < sprites.size(); ++s) {
    const SpriteDef& def = sprites[s];
    SpriteTrack track;
    track.spec = def.spec;
    track.track_id = "obj" + std::to_string(s);
    track.reverse_at = def.reverse_at;
    track.centers.resize(static_cast<size_t>(config.n_frames));
    for (int t = 0; t < config.n_frames; ++t) {
      double x, y;
      if (def.reverse_at < 0 || t <= def.reverse_at) {
        x = def.anchor_x + def.spec.vx * (t - mid);
        y = def.anchor_y + def.spec.vy * (t - mid);
      } else {
        // position is continuous at the reversal frame
        double rx = def.anchor_x + def.spec.vx * (def.reverse_at - mid);
        double ry = def.anchor_y + def.spec.vy * (def.reverse_at - mid);
        x = rx - def.spec.vx * (t - def.reverse_at);
        y = ry - def.spec.vy * (t - def.reverse_at);
      }
      track.centers[static_cast<size_t>(t)] = {x, y};
    }
    scene.tracks.push_back(std::move(track));
  }

  const int plane = config.canvas * config.canvas;
  scene.frames.resize(static_cast<size_t>(config.n_frames));
  for (int t = 0; t < config.n_frames; ++t) {
    VecF& frame = scene.frames[static_cast<size_t>(t)];
    frame = VecF::Constant(3 * plane, config.background);
    for (const auto& track : scene.tracks) {
      const auto& c = track.centers[static_cast<size_t>(t)];
      render_sprite(frame, config.canvas, track.spec, c[0], c[1]);
    }
  }
  return scene;
}

Scene generate_scene(const SceneConfig& config, uint64_t seed, const std::string& video_id) {
  validate_config(config);
  Rng rng(seed, /*stream=*/0x5e1f);
  const int mid = config.n_frames / 2;

  std::vector<SpriteDef> sprites;
  auto apply_anomaly = [&](SpriteDef& def) {
    SpriteSpec& spec = def.spec;
    double u = rng.uniform() *
               (config.anomaly_mix[0] + config.anomaly_mix[1] + config.anomaly_mix[2]);
    if (u < config.anomaly_mix[0]) {
      spec.anomaly = AnomalyTag::fast;
      spec.vx *= config.fast_multiplier;
      spec.vy *= config.fast_multiplier;
    } else if (u < config.anomaly_mix[0] + config.anomaly_mix[1]) {
      spec.anomaly = AnomalyTag::reverse;
      def.reverse_at = mid + rng.range(-2, 2);
    } else {
      spec.anomaly = AnomalyTag::novel_shape;
      spec.shape = ShapeKind::triangle;
    }
  };

  for (int s = 0; s < config.n_sprites; ++s) {
    SpriteDef def;
    SpriteSpec& spec = def.spec;
    spec.shape = rng.below(2) == 0 ? ShapeKind::square : ShapeKind::circle;
    spec.size_px = rng.range(config.size_min, config.size_max);
    for (auto& c : spec.color) c = static_cast<float>(rng.uniform(0.3, 1.0));
    double speed = rng.uniform(config.speed_min, config.speed_max);
    double angle = rng.uniform(0.0, 2.0 * M_PI);
    spec.vx = speed * std::cos(angle);
    spec.vy = speed * std::sin(angle);

    if (!config.train_split && rng.uniform() < config.anomaly_rate) apply_anomaly(def);

    // Anchor the path at mid-scene inside the crop-safe box so most frames
    // yield valid cubes.
    def.anchor_x = rng.uniform(18.0, config.canvas - 18.0);
    def.anchor_y = rng.uniform(18.0, config.canvas - 18.0);
    sprites.push_back(def);
  }

  if (!config.train_split && config.anomaly_rate > 0.0 && config.ensure_test_anomaly) {
    bool any = false;
    for (const auto& d : sprites) any |= d.spec.anomaly != AnomalyTag::none;
    if (!any) apply_anomaly(sprites.front());
  }

  std::string id = video_id.empty() ? "video_" + std::to_string(seed) : video_id;
  return assemble_scene(config, sprites, id);
}

}  // namespace mcvad::datagen
