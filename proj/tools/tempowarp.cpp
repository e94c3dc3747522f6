// Command-line driver: bank, warp, metrics, synth, adain-check.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "tempowarp/io.hpp"
#include "tempowarp/pipeline.hpp"

namespace {

using tempowarp::PipelineConfig;

struct ConfigFlags {
  std::string config_path;
  std::optional<std::size_t> window_len;
  std::optional<int> crop;
  std::optional<double> alpha1, alpha2, alpha3;
  std::optional<int> max_iters;
  std::optional<int> levels;
  std::optional<std::string> tps_distance;
  std::optional<double> ridge;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config file; flags override it");
    cmd->add_option("--window-len", window_len, "frames per window (default 6)");
    cmd->add_option("--crop", crop, "mouth crop side in px (default 148)");
    cmd->add_option("--alpha1", alpha1, "fitting-error weight");
    cmd->add_option("--alpha2", alpha2, "bending-energy weight");
    cmd->add_option("--alpha3", alpha3, "temporal-energy weight");
    cmd->add_option("--max-iters", max_iters, "optimizer iteration limit");
    cmd->add_option("--levels", levels, "Laplacian pyramid levels");
    cmd->add_option("--tps-distance", tps_distance, "euclidean or l1")->check(CLI::IsMember({"euclidean", "l1"}));
    cmd->add_option("--ridge", ridge, "TPS kernel ridge");
  }

  PipelineConfig resolve() const {
    nlohmann::json doc = config_path.empty() ? nlohmann::json::object() : tempowarp::io::read_json(config_path);
    if (window_len) doc["window_len"] = *window_len;
    if (crop) doc["crop"] = *crop;
    if (alpha1) doc["alpha1"] = *alpha1;
    if (alpha2) doc["alpha2"] = *alpha2;
    if (alpha3) doc["alpha3"] = *alpha3;
    if (max_iters) doc["max_iters"] = *max_iters;
    if (levels) doc["levels"] = *levels;
    if (tps_distance) doc["tps_distance"] = *tps_distance;
    if (ridge) doc["ridge"] = *ridge;
    return tempowarp::config_from_json(doc);
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tempowarp: landmark-driven mouth retrieval, temporal TPS warping and compositing"};
  app.require_subcommand(1);

  std::string frames_dir, landmarks_file, out_dir = "out";
  ConfigFlags bank_flags;
  auto* bank = app.add_subcommand("bank", "build a sliding-window texture bank from a clip");
  bank->add_option("--frames", frames_dir, "directory of clip frames (PNG)")->required();
  bank->add_option("--landmarks", landmarks_file, "landmark JSON of the clip")->required();
  bank->add_option("--out", out_dir, "bank directory");
  bank_flags.attach(bank);

  std::string bank_dir, query_file, faces_dir, mode = "temporal";
  ConfigFlags warp_flags;
  auto* warp = app.add_subcommand("warp", "retrieve, warp and composite query windows");
  warp->add_option("--bank", bank_dir, "bank directory")->required();
  warp->add_option("--query", query_file, "query landmark JSON (full-frame coordinates)")->required();
  warp->add_option("--faces", faces_dir, "directory of target face frames")->required();
  warp->add_option("--mode", mode, "naive or temporal")->check(CLI::IsMember({"naive", "temporal"}));
  warp->add_option("--out", out_dir, "output directory");
  warp_flags.attach(warp);

  tempowarp::MetricsRequest metrics_req;
  std::string crop_lm, gen_lm, gt_lm, metrics_out = "out";
  int metrics_crop = 148;
  auto* metrics = app.add_subcommand("metrics", "photometric error and SSIOU");
  metrics->add_option("--gen", metrics_req.gen_dir, "generated frames directory");
  metrics->add_option("--gt", metrics_req.gt_dir, "ground-truth frames directory");
  metrics->add_option("--landmarks", crop_lm, "landmarks locating the mouth crop for photometric error");
  metrics->add_option("--gen-landmarks", gen_lm, "landmarks of the generated clip (ssiou)");
  metrics->add_option("--gt-landmarks", gt_lm, "landmarks of the ground-truth clip (ssiou)");
  metrics->add_option("--crop", metrics_crop, "mouth crop side in px");
  metrics->add_flag("--ssiou", metrics_req.ssiou, "compute SSIOU");
  metrics->add_flag("--photometric", metrics_req.photometric, "compute mean photometric error");
  metrics->add_option("--out", metrics_out, "output directory");

  tempowarp::SynthConfig synth_cfg;
  std::string synth_out = "synth";
  auto* synth = app.add_subcommand("synth", "render a deterministic synthetic mouth clip");
  synth->add_option("--seed", synth_cfg.seed, "random seed");
  synth->add_option("--frames", synth_cfg.frames, "frame count");
  synth->add_option("--jitter", synth_cfg.jitter, "landmark jitter std-dev in px");
  synth->add_option("--width", synth_cfg.width, "frame width");
  synth->add_option("--height", synth_cfg.height, "frame height");
  synth->add_option("--out", synth_out, "output directory");

  std::string adain_in, adain_out = "adain_check.json";
  auto* adain = app.add_subcommand("adain-check", "verify instance-norm and AdaIN moments on given tensors");
  adain->add_option("--input", adain_in, "JSON with content, gamma, beta, eps")->required();
  adain->add_option("--out", adain_out, "result JSON");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*bank) return tempowarp::cmd_bank(frames_dir, landmarks_file, out_dir, bank_flags.resolve());
    if (*warp) {
      return tempowarp::cmd_warp(bank_dir, query_file, faces_dir, out_dir, tempowarp::parse_warp_mode(mode),
                                 warp_flags.resolve());
    }
    if (*metrics) {
      if (!crop_lm.empty()) metrics_req.crop_landmarks = crop_lm;
      if (!gen_lm.empty()) metrics_req.gen_landmarks = gen_lm;
      if (!gt_lm.empty()) metrics_req.gt_landmarks = gt_lm;
      metrics_req.crop.side = metrics_crop;
      metrics_req.out_dir = metrics_out;
      return tempowarp::cmd_metrics(metrics_req);
    }
    if (*synth) return tempowarp::cmd_synth(synth_cfg, synth_out);
    if (*adain) return tempowarp::cmd_adain_check(adain_in, adain_out);
  } catch (const tempowarp::Error& e) {
    std::cerr << e.what() << '\n';
    return 2;
  }
  return 0;
}
