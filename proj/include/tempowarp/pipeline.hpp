#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tempowarp/compositing.hpp"
#include "tempowarp/image_warp.hpp"
#include "tempowarp/retrieval.hpp"
#include "tempowarp/synth.hpp"
#include "tempowarp/temporal_warp.hpp"

namespace tempowarp {

enum class WarpMode { Naive, Temporal };

WarpMode parse_warp_mode(const std::string& s);
const char* to_string(WarpMode mode);

struct PipelineConfig {
  std::size_t window_len = 6;
  CropSpec crop;
  OptimizerConfig optimizer;  // energy weights, iteration limits, ridge and distance mode
  SamplingConfig sampling;
  PyramidConfig pyramid;

  void validate() const;
};

nlohmann::json to_json(const PipelineConfig& config);
/// Keys missing from `doc` keep the values already in `base`.
PipelineConfig config_from_json(const nlohmann::json& doc, PipelineConfig base = {});

struct WindowOutcome {
  std::size_t window = 0;
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t first_written = 0;  // frames before this index belong to the previous window
  std::optional<std::string> error;
  std::size_t retrieval_index = 0;
  double retrieval_distance = 0.0;
  EnergyReport init_report;
  EnergyReport final_report;
  int iterations = 0;
  bool converged = false;
  TpsSequenceParams params;
};

struct WarpRun {
  ImageSequence frames;
  std::vector<WindowOutcome> windows;

  bool ok() const;
  nlohmann::json report(WarpMode mode) const;
};

/// Consecutive windows of `window_len` frames; a short tail is covered by one more
/// window aligned to the clip end, which only writes the frames not yet covered.
std::vector<std::array<std::size_t, 2>> partition_windows(std::size_t frames, std::size_t window_len);

/// Retrieve, warp and composite every query window onto the face frames. Failing
/// windows leave their face frames untouched and are recorded in the outcome.
WarpRun run_warp(const TextureBank& bank, const LandmarkSequence& query, const ImageSequence& faces,
                 const PipelineConfig& config, WarpMode mode);

/// Inverse warp for one window: crop-local query landmarks to retrieved bank landmarks.
WindowOutcome warp_window(const BankEntry& entry, const LandmarkWindow& query_local,
                          const PipelineConfig& config, WarpMode mode);

// Command implementations behind the CLI. Each returns the process exit code and
// writes diagnostics to stderr.
int cmd_bank(const std::filesystem::path& frames_dir, const std::filesystem::path& landmarks_file,
             const std::filesystem::path& out_dir, const PipelineConfig& config);
int cmd_warp(const std::filesystem::path& bank_dir, const std::filesystem::path& query_file,
             const std::filesystem::path& faces_dir, const std::filesystem::path& out_dir, WarpMode mode,
             const PipelineConfig& config);

struct MetricsRequest {
  std::filesystem::path gen_dir;
  std::filesystem::path gt_dir;
  std::optional<std::filesystem::path> crop_landmarks;  // crop both sides to the mouth area
  std::optional<std::filesystem::path> gen_landmarks;   // for ssiou
  std::optional<std::filesystem::path> gt_landmarks;    // for ssiou
  bool ssiou = false;
  bool photometric = false;
  std::filesystem::path out_dir;
  CropSpec crop;
};
int cmd_metrics(const MetricsRequest& request);

int cmd_synth(const SynthConfig& config, const std::filesystem::path& out_dir);

/// Reads {"content": [[...], ...], "gamma": [...], "beta": [...], "eps": e} and checks the
/// normalisation moments. Writes the result document to `out`.
int cmd_adain_check(const std::filesystem::path& input, const std::filesystem::path& out);

}  // namespace tempowarp
