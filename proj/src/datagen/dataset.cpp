#include "mcvad/datagen/dataset.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "mcvad/core/array_io.hpp"

namespace fs = std::filesystem;

namespace mcvad::datagen {

namespace {

std::string entry_file_name(const std::string& video_id, int64_t frame_index,
                            const std::string& track_id) {
  return video_id + "_" + std::to_string(frame_index) + "_" + track_id + ".bin";
}

void validate_labels(const DatasetManifest& m) {
  if (m.split == "train")
    for (const auto& e : m.entries)
      require(e.label == 0, "train split must be anomaly-free, found label=1 for " + e.cube_path);
}

nlohmann::json manifest_to_json(const DatasetManifest& m) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : m.entries)
    entries.push_back({{"cube", e.cube_path},
                       {"flow", e.flow_path},
                       {"video_id", e.video_id},
                       {"frame_index", e.frame_index},
                       {"track_id", e.track_id},
                       {"label", e.label}});
  return {{"format_version", m.format_version},
          {"split", m.split},
          {"flow_mode", m.flow_mode},
          {"pixel_stats",
           {{"mean", {m.pixel_mean[0], m.pixel_mean[1], m.pixel_mean[2]}},
            {"std", {m.pixel_std[0], m.pixel_std[1], m.pixel_std[2]}}}},
          {"entries", entries}};
}

DatasetManifest manifest_from_json(const nlohmann::json& j) {
  DatasetManifest m;
  m.format_version = j.at("format_version").get<int>();
  require(m.format_version == 1,
          "unsupported manifest format_version " + std::to_string(m.format_version));
  m.split = j.at("split").get<std::string>();
  require(m.split == "train" || m.split == "test", "manifest split must be train or test");
  m.flow_mode = j.at("flow_mode").get<std::string>();
  flow_mode_from_string(m.flow_mode);
  for (int c = 0; c < 3; ++c) {
    m.pixel_mean[static_cast<size_t>(c)] = j.at("pixel_stats").at("mean").at(c).get<double>();
    m.pixel_std[static_cast<size_t>(c)] = j.at("pixel_stats").at("std").at(c).get<double>();
  }
  for (const auto& je : j.at("entries")) {
    ManifestEntry e;
    e.cube_path = je.at("cube").get<std::string>();
    e.flow_path = je.at("flow").get<std::string>();
    e.video_id = je.at("video_id").get<std::string>();
    e.frame_index = je.at("frame_index").get<int64_t>();
    e.track_id = je.at("track_id").get<std::string>();
    e.label = je.at("label").get<int>();
    require(e.label == 0 || e.label == 1, "label must be 0 or 1 in " + e.cube_path);
    m.entries.push_back(std::move(e));
  }
  return m;
}

}  // namespace

void write_dataset(const std::vector<ObjectCube>& cubes, const std::vector<FlowMap>& flows,
                   const std::string& split, FlowMode flow_mode, const std::string& root,
                   bool force) {
  require(split == "train" || split == "test", "write_dataset: split must be train or test");
  require(cubes.size() == flows.size(), "write_dataset: cube/flow count mismatch");

  fs::path rootp(root);
  fs::path manifest_path = rootp / "manifest.json";
  require(force || !fs::exists(manifest_path),
          "write_dataset: " + manifest_path.string() + " already exists (use force to replace)");
  fs::create_directories(rootp / "cubes");
  fs::create_directories(rootp / "flows");

  DatasetManifest m;
  m.split = split;
  m.flow_mode = to_string(flow_mode);

  std::array<double, 3> sum{}, sumsq{};
  int64_t count = 0;
  const int plane = kFrameSize * kFrameSize;

  for (size_t i = 0; i < cubes.size(); ++i) {
    const ObjectCube& cube = cubes[i];
    const FlowMap& flow = flows[i];
    require(cube.video_id == flow.video_id && cube.frame_index == flow.frame_index &&
                cube.track_id == flow.track_id,
            "write_dataset: cube/flow metadata mismatch at index " + std::to_string(i));
    require(cube.frames.rows() == kCubeFrames && cube.frames.cols() == kFrameDim,
            "write_dataset: bad cube shape at index " + std::to_string(i));
    require(flow.values.size() == kFlowDim,
            "write_dataset: bad flow shape at index " + std::to_string(i));

    std::string file = entry_file_name(cube.video_id, cube.frame_index, cube.track_id);
    ManifestEntry e;
    e.cube_path = "cubes/" + file;
    e.flow_path = "flows/" + file;
    e.video_id = cube.video_id;
    e.frame_index = cube.frame_index;
    e.track_id = cube.track_id;
    e.label = cube.label;
    m.entries.push_back(e);

    ArrayFile ca;
    ca.rank = 4;
    ca.dims = {kCubeFrames, kFrameChannels, kFrameSize, kFrameSize};
    ca.data.assign(cube.frames.data(), cube.frames.data() + cube.frames.size());
    write_array((rootp / e.cube_path).string(), ca);

    ArrayFile fa;
    fa.rank = 3;
    fa.dims = {kFlowChannels, kFrameSize, kFrameSize, 0};
    fa.data.assign(flow.values.data(), flow.values.data() + flow.values.size());
    write_array((rootp / e.flow_path).string(), fa);

    for (int k = 0; k < kCubeFrames; ++k) {
      const float* f = cube.frames.row(k).data();
      for (int c = 0; c < 3; ++c)
        for (int p = 0; p < plane; ++p) {
          double v = f[c * plane + p];
          sum[static_cast<size_t>(c)] += v;
          sumsq[static_cast<size_t>(c)] += v * v;
        }
    }
    count += kCubeFrames * plane;
  }

  if (count > 0) {
    for (int c = 0; c < 3; ++c) {
      double mean = sum[static_cast<size_t>(c)] / static_cast<double>(count);
      double var = sumsq[static_cast<size_t>(c)] / static_cast<double>(count) - mean * mean;
      m.pixel_mean[static_cast<size_t>(c)] = mean;
      m.pixel_std[static_cast<size_t>(c)] = std::sqrt(std::max(0.0, var));
    }
  }

  std::sort(m.entries.begin(), m.entries.end(), [](const ManifestEntry& a, const ManifestEntry& b) {
    return std::tie(a.video_id, a.frame_index, a.track_id) <
           std::tie(b.video_id, b.frame_index, b.track_id);
  });
  validate_labels(m);

  std::ofstream out(manifest_path);
  require(out.good(), "write_dataset: cannot open " + manifest_path.string());
  out << manifest_to_json(m).dump(2) << "\n";
}

Dataset read_dataset(const std::string& root) {
  fs::path rootp(root);
  fs::path manifest_path = rootp / "manifest.json";
  std::ifstream in(manifest_path);
  require(in.good(), "read_dataset: cannot open " + manifest_path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw Error("read_dataset: invalid JSON in " + manifest_path.string() + ": " + e.what());
  }

  Dataset d;
  d.root = root;
  d.manifest = manifest_from_json(j);
  validate_labels(d.manifest);
  for (const auto& e : d.manifest.entries) {
    require(fs::exists(rootp / e.cube_path), "read_dataset: missing file " + e.cube_path);
    require(fs::exists(rootp / e.flow_path), "read_dataset: missing file " + e.flow_path);
  }
  return d;
}

ObjectCube Dataset::load_cube(size_t index) const {
  const ManifestEntry& e = manifest.entries.at(index);
  ArrayFile a = read_array_checked((fs::path(root) / e.cube_path).string(),
                                   {kCubeFrames, kFrameChannels, kFrameSize, kFrameSize});
  ObjectCube cube;
  cube.frames.resize(kCubeFrames, kFrameDim);
  std::copy(a.data.begin(), a.data.end(), cube.frames.data());
  require(cube.frames.allFinite() && cube.frames.minCoeff() >= 0.0f &&
              cube.frames.maxCoeff() <= 1.0f,
          "load_cube: pixel values outside [0,1] in " + e.cube_path);
  cube.video_id = e.video_id;
  cube.frame_index = e.frame_index;
  cube.track_id = e.track_id;
  cube.label = e.label;
  return cube;
}

VecF Dataset::load_flow(size_t index) const {
  const ManifestEntry& e = manifest.entries.at(index);
  ArrayFile a = read_array_checked((fs::path(root) / e.flow_path).string(),
                                   {kFlowChannels, kFrameSize, kFrameSize});
  VecF v(kFlowDim);
  std::copy(a.data.begin(), a.data.end(), v.data());
  require(v.allFinite(), "load_flow: non-finite values in " + e.flow_path);
  return v;
}

LoadedDataset load_all(const Dataset& dataset) {
  LoadedDataset out;
  out.entries = dataset.manifest.entries;
  out.flow_mode = dataset.manifest.flow_mode;
  const Eigen::Index n = static_cast<Eigen::Index>(dataset.size());
  out.cubes.resize(n, static_cast<Eigen::Index>(kCubeFrames) * kFrameDim);
  out.flows.resize(n, kFlowDim);
  for (Eigen::Index i = 0; i < n; ++i) {
    ObjectCube cube = dataset.load_cube(static_cast<size_t>(i));
    for (int k = 0; k < kCubeFrames; ++k)
      out.cubes.row(i).segment(k * kFrameDim, kFrameDim) = cube.frames.row(k);
    out.flows.row(i) = dataset.load_flow(static_cast<size_t>(i)).transpose();
  }
  return out;
}

}  // namespace mcvad::datagen
