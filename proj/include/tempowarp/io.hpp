#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "tempowarp/compositing.hpp"
#include "tempowarp/core_types.hpp"
#include "tempowarp/retrieval.hpp"
#include "tempowarp/temporal_warp.hpp"
#include "tempowarp/tps.hpp"
#include "tempowarp/warp_energy.hpp"

namespace tempowarp::io {

using nlohmann::json;

Image read_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const Image& image);
void write_mask_png(const std::filesystem::path& path, const MaskImage& mask);

/// Frame file name for index i: zero-padded to six digits.
std::string frame_name(std::size_t index);

/// All *.png files of a directory in lexicographic order.
ImageSequence read_frames(const std::filesystem::path& dir);
void write_frames(const std::filesystem::path& dir, const ImageSequence& frames);

/// {"fps": number, "points_per_frame": integer, "frames": [[[x, y], ...], ...]}
LandmarkSequence landmarks_from_json(const json& doc);
json landmarks_to_json(const LandmarkSequence& seq);
LandmarkSequence read_landmarks(const std::filesystem::path& path);
void write_landmarks(const std::filesystem::path& path, const LandmarkSequence& seq);

json to_json(const EnergyReport& r);
EnergyReport energy_report_from_json(const json& doc);
json to_json(const TpsSequenceParams& params);
TpsSequenceParams tps_params_from_json(const json& doc);
json to_json(const WarpSolution& sol);

/// Directory layout: manifest.json plus {entry}/{frame}.png crops.
void save_bank(const std::filesystem::path& dir, const TextureBank& bank);
TextureBank load_bank(const std::filesystem::path& dir);

json read_json(const std::filesystem::path& path);
/// Pretty-printed with a trailing newline; doubles use the shortest round-trip form.
void write_json(const std::filesystem::path& path, const json& doc);

}  // namespace tempowarp::io
