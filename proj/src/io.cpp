#include "tempowarp/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <vector>

#include <png.h>

namespace tempowarp::io {

namespace fs = std::filesystem;

Image read_png(const fs::path& path) {
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&img, path.string().c_str())) {
    throw Error(ErrorKind::Io, "cannot read " + path.string() + ": " + img.message);
  }
  const bool color = (img.format & PNG_FORMAT_FLAG_COLOR) != 0;
  img.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  const int channels = color ? 3 : 1;
  std::vector<std::uint8_t> pixels(PNG_IMAGE_SIZE(img));
  if (!png_image_finish_read(&img, nullptr, pixels.data(), 0, nullptr)) {
    const std::string msg = img.message;
    png_image_free(&img);
    throw Error(ErrorKind::Io, "cannot decode " + path.string() + ": " + msg);
  }
  return Image(static_cast<int>(img.width), static_cast<int>(img.height), channels, std::move(pixels));
}

void write_png(const fs::path& path, const Image& image) {
  require(!image.empty(), ErrorKind::InvalidInput, "cannot write an empty image");
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  img.width = static_cast<png_uint_32>(image.width());
  img.height = static_cast<png_uint_32>(image.height());
  img.format = image.channels() == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&img, path.string().c_str(), 0, image.pixels().data(), 0, nullptr)) {
    throw Error(ErrorKind::Io, "cannot write " + path.string() + ": " + img.message);
  }
}

void write_mask_png(const fs::path& path, const MaskImage& mask) {
  Image out(mask.width, mask.height, 1);
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) out.at(x, y) = mask.at(x, y) ? 255 : 0;
  }
  write_png(path, out);
}

std::string frame_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%06zu.png", index);
  return buf;
}

ImageSequence read_frames(const fs::path& dir) {
  require(fs::is_directory(dir), ErrorKind::Io, dir.string() + " is not a directory");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".png") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  ImageSequence frames;
  frames.reserve(files.size());
  for (const auto& f : files) frames.push_back(read_png(f));
  return frames;
}

void write_frames(const fs::path& dir, const ImageSequence& frames) {
  fs::create_directories(dir);
  for (std::size_t i = 0; i < frames.size(); ++i) write_png(dir / frame_name(i), frames[i]);
}

LandmarkSequence landmarks_from_json(const json& doc) {
  try {
    const double fps = doc.value("fps", 30.0);
    const auto& frames = doc.at("frames");
    require(frames.is_array() && !frames.empty(), ErrorKind::InvalidInput, "landmark file has no frames");
    const std::size_t expected =
        doc.contains("points_per_frame") ? doc.at("points_per_frame").get<std::size_t>() : frames.front().size();
    std::vector<LandmarkFrame> out;
    out.reserve(frames.size());
    for (std::size_t t = 0; t < frames.size(); ++t) {
      const auto& pts = frames[t];
      require(pts.size() == expected, ErrorKind::InvalidInput,
              "frame " + std::to_string(t) + " has " + std::to_string(pts.size()) + " points, expected " +
                  std::to_string(expected));
      std::vector<Point2> points;
      points.reserve(pts.size());
      for (const auto& p : pts) {
        require(p.is_array() && p.size() == 2, ErrorKind::InvalidInput, "landmarks are [x, y] pairs");
        points.push_back({p[0].get<double>(), p[1].get<double>()});
      }
      out.emplace_back(std::move(points));
    }
    return LandmarkSequence(std::move(out), fps);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidInput, std::string("malformed landmark document: ") + e.what());
  }
}

json landmarks_to_json(const LandmarkSequence& seq) {
  json frames = json::array();
  for (const auto& f : seq.frames()) {
    json pts = json::array();
    for (const auto& p : f.points()) pts.push_back({p.x, p.y});
    frames.push_back(std::move(pts));
  }
  return {{"fps", seq.fps()}, {"points_per_frame", seq.point_count()}, {"frames", std::move(frames)}};
}

LandmarkSequence read_landmarks(const fs::path& path) { return landmarks_from_json(read_json(path)); }

void write_landmarks(const fs::path& path, const LandmarkSequence& seq) {
  write_json(path, landmarks_to_json(seq));
}

json to_json(const EnergyReport& r) {
  return {{"e_f", r.e_f}, {"e_b", r.e_b}, {"e_t", r.e_t}, {"l_tw", r.l_tw}};
}

EnergyReport energy_report_from_json(const json& doc) {
  EnergyReport r;
  r.e_f = doc.at("e_f").get<double>();
  r.e_b = doc.at("e_b").get<double>();
  r.e_t = doc.at("e_t").get<double>();
  r.l_tw = doc.at("l_tw").get<double>();
  return r;
}

json to_json(const TpsSequenceParams& params) {
  json frames = json::array();
  for (const auto& f : params.frames) {
    json w = json::array();
    json centers = json::array();
    for (Eigen::Index i = 0; i < f.w.rows(); ++i) w.push_back({f.w(i, 0), f.w(i, 1)});
    for (const auto& c : f.centers) centers.push_back({c.x, c.y});
    frames.push_back({{"a1", {f.a1(0), f.a1(1)}},
                      {"ax", {f.ax(0), f.ax(1)}},
                      {"ay", {f.ay(0), f.ay(1)}},
                      {"w", std::move(w)},
                      {"centers", std::move(centers)}});
  }
  const bool l1 = !params.frames.empty() && params.frames.front().distance == DistanceMode::L1;
  return {{"frames", std::move(frames)}, {"distance", l1 ? "l1" : "euclidean"}};
}

TpsSequenceParams tps_params_from_json(const json& doc) {
  try {
    TpsSequenceParams out;
    const auto mode = doc.value("distance", std::string("euclidean")) == "l1" ? DistanceMode::L1
                                                                              : DistanceMode::Euclidean;
    for (const auto& f : doc.at("frames")) {
      TpsFrameParams p;
      p.distance = mode;
      p.a1 = {f.at("a1")[0].get<double>(), f.at("a1")[1].get<double>()};
      p.ax = {f.at("ax")[0].get<double>(), f.at("ax")[1].get<double>()};
      p.ay = {f.at("ay")[0].get<double>(), f.at("ay")[1].get<double>()};
      const auto& w = f.at("w");
      p.w.resize(static_cast<Eigen::Index>(w.size()), 2);
      for (std::size_t i = 0; i < w.size(); ++i) {
        p.w(static_cast<Eigen::Index>(i), 0) = w[i][0].get<double>();
        p.w(static_cast<Eigen::Index>(i), 1) = w[i][1].get<double>();
      }
      for (const auto& c : f.at("centers")) p.centers.push_back({c[0].get<double>(), c[1].get<double>()});
      out.frames.push_back(std::move(p));
    }
    out.validate();
    return out;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidInput, std::string("malformed parameter document: ") + e.what());
  }
}

json to_json(const WarpSolution& sol) {
  return {{"init_report", to_json(sol.init_report)},
          {"final_report", to_json(sol.final_report)},
          {"iterations", sol.iterations},
          {"converged", sol.converged},
          {"params", to_json(sol.params)}};
}

void save_bank(const fs::path& dir, const TextureBank& bank) {
  fs::create_directories(dir);
  json entries = json::array();
  for (std::size_t k = 0; k < bank.entries.size(); ++k) {
    const auto& e = bank.entries[k];
    const fs::path entry_dir = dir / frame_name(k).substr(0, 6);
    fs::create_directories(entry_dir);
    for (std::size_t t = 0; t < e.images.size(); ++t) write_png(entry_dir / frame_name(t), e.images[t]);
    entries.push_back({{"start", e.start},
                       {"end", e.start + bank.window_len},
                       {"landmarks", landmarks_to_json(e.landmarks)}});
  }
  write_json(dir / "manifest.json", {{"window_len", bank.window_len},
                                     {"crop", {{"side", bank.crop.side}}},
                                     {"entries", std::move(entries)}});
}

TextureBank load_bank(const fs::path& dir) {
  const json manifest = read_json(dir / "manifest.json");
  try {
    TextureBank bank;
    bank.window_len = manifest.at("window_len").get<std::size_t>();
    bank.crop.side = manifest.at("crop").at("side").get<int>();
    bank.crop.validate();
    const auto& entries = manifest.at("entries");
    for (std::size_t k = 0; k < entries.size(); ++k) {
      BankEntry e;
      e.start = entries[k].at("start").get<std::size_t>();
      e.landmarks = landmarks_from_json(entries[k].at("landmarks"));
      require(e.landmarks.frame_count() == bank.window_len, ErrorKind::InvalidInput,
              "bank entry " + std::to_string(k) + " has the wrong window length");
      const fs::path entry_dir = dir / frame_name(k).substr(0, 6);
      for (std::size_t t = 0; t < bank.window_len; ++t) e.images.push_back(read_png(entry_dir / frame_name(t)));
      bank.entries.push_back(std::move(e));
    }
    return bank;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidInput, std::string("malformed bank manifest: ") + e.what());
  }
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  require(in.good(), ErrorKind::Io, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidInput, path.string() + ": " + e.what());
  }
}

void write_json(const fs::path& path, const json& doc) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  require(out.good(), ErrorKind::Io, "cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

}  // namespace tempowarp::io
