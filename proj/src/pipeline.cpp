#include "tempowarp/pipeline.hpp"

#include <cmath>
#include <iostream>

#include "tempowarp/feature_norm.hpp"
#include "tempowarp/io.hpp"
#include "tempowarp/metrics.hpp"

namespace tempowarp {

namespace fs = std::filesystem;
using nlohmann::json;

WarpMode parse_warp_mode(const std::string& s) {
  if (s == "naive") return WarpMode::Naive;
  if (s == "temporal") return WarpMode::Temporal;
  throw Error(ErrorKind::InvalidInput, "unknown warp mode '" + s + "' (expected naive or temporal)");
}

const char* to_string(WarpMode mode) { return mode == WarpMode::Naive ? "naive" : "temporal"; }

void PipelineConfig::validate() const {
  require(window_len >= 3, ErrorKind::InvalidInput, "window length must be at least 3");
  crop.validate();
  optimizer.validate();
  sampling.validate();
  pyramid.validate(crop.side, crop.side);
}

json to_json(const PipelineConfig& c) {
  const auto& o = c.optimizer;
  return {
      {"window_len", c.window_len},
      {"crop", c.crop.side},
      {"alpha1", o.weights.alpha1},
      {"alpha2", o.weights.alpha2},
      {"alpha3", o.weights.alpha3},
      {"max_iters", o.max_iters},
      {"huber_eps", o.huber_eps},
      {"grad_tol", o.grad_tol},
      {"initial_step", o.initial_step},
      {"backtrack_factor", o.backtrack_factor},
      {"min_step", o.min_step},
      {"damping", o.damping},
      {"ridge", o.solve.ridge},
      {"tps_distance", o.solve.distance == DistanceMode::L1 ? "l1" : "euclidean"},
      {"interpolation", c.sampling.interpolation == Interpolation::Nearest ? "nearest" : "bilinear"},
      {"border", c.sampling.border == BorderMode::Constant ? "constant" : "clamp"},
      {"border_value", c.sampling.constant_value},
      {"levels", c.pyramid.levels},
  };
}

PipelineConfig config_from_json(const json& doc, PipelineConfig c) {
  try {
    auto& o = c.optimizer;
    c.window_len = doc.value("window_len", c.window_len);
    c.crop.side = doc.value("crop", c.crop.side);
    o.weights.alpha1 = doc.value("alpha1", o.weights.alpha1);
    o.weights.alpha2 = doc.value("alpha2", o.weights.alpha2);
    o.weights.alpha3 = doc.value("alpha3", o.weights.alpha3);
    o.max_iters = doc.value("max_iters", o.max_iters);
    o.huber_eps = doc.value("huber_eps", o.huber_eps);
    o.grad_tol = doc.value("grad_tol", o.grad_tol);
    o.initial_step = doc.value("initial_step", o.initial_step);
    o.backtrack_factor = doc.value("backtrack_factor", o.backtrack_factor);
    o.min_step = doc.value("min_step", o.min_step);
    o.damping = doc.value("damping", o.damping);
    o.solve.ridge = doc.value("ridge", o.solve.ridge);
    if (doc.contains("tps_distance")) {
      const auto d = doc.at("tps_distance").get<std::string>();
      require(d == "euclidean" || d == "l1", ErrorKind::InvalidInput, "tps_distance is euclidean or l1");
      o.solve.distance = d == "l1" ? DistanceMode::L1 : DistanceMode::Euclidean;
    }
    if (doc.contains("interpolation")) {
      const auto s = doc.at("interpolation").get<std::string>();
      require(s == "bilinear" || s == "nearest", ErrorKind::InvalidInput, "interpolation is bilinear or nearest");
      c.sampling.interpolation = s == "nearest" ? Interpolation::Nearest : Interpolation::Bilinear;
    }
    if (doc.contains("border")) {
      const auto s = doc.at("border").get<std::string>();
      require(s == "clamp" || s == "constant", ErrorKind::InvalidInput, "border is clamp or constant");
      c.sampling.border = s == "constant" ? BorderMode::Constant : BorderMode::Clamp;
    }
    c.sampling.constant_value = doc.value("border_value", c.sampling.constant_value);
    c.pyramid.levels = doc.value("levels", c.pyramid.levels);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidInput, std::string("malformed config: ") + e.what());
  }
  c.validate();
  return c;
}

bool WarpRun::ok() const {
  for (const auto& w : windows) {
    if (w.error) return false;
  }
  return true;
}

json WarpRun::report(WarpMode mode) const {
  json wins = json::array();
  std::size_t failed = 0;
  for (const auto& w : windows) {
    json j = {{"window", w.window}, {"begin", w.begin}, {"end", w.end}};
    if (w.error) {
      ++failed;
      j["error"] = *w.error;
    } else {
      j["retrieval_index"] = w.retrieval_index;
      j["retrieval_distance"] = w.retrieval_distance;
      j["init_report"] = io::to_json(w.init_report);
      j["final_report"] = io::to_json(w.final_report);
      j["iterations"] = w.iterations;
      j["converged"] = w.converged;
    }
    wins.push_back(std::move(j));
  }
  return {{"mode", to_string(mode)}, {"windows", std::move(wins)}, {"failed", failed}};
}

std::vector<std::array<std::size_t, 2>> partition_windows(std::size_t frames, std::size_t window_len) {
  require(window_len >= 1, ErrorKind::InvalidInput, "window length must be positive");
  require(frames >= window_len, ErrorKind::InsufficientData,
          "query of " + std::to_string(frames) + " frames is shorter than the window length " +
              std::to_string(window_len));
  std::vector<std::array<std::size_t, 2>> out;
  std::size_t begin = 0;
  for (; begin + window_len <= frames; begin += window_len) out.push_back({begin, begin + window_len});
  if (begin < frames) out.push_back({frames - window_len, frames});
  return out;
}

WindowOutcome warp_window(const BankEntry& entry, const LandmarkWindow& query_local,
                          const PipelineConfig& config, WarpMode mode) {
  WindowOutcome out;
  const int side = config.crop.side;
  const auto& weights = config.optimizer.weights;
  if (mode == WarpMode::Naive) {
    out.params = init_naive(query_local, entry.landmarks, config.optimizer.solve);
    out.init_report = total_objective(out.params, query_local, entry.landmarks, side, side, weights);
    out.final_report = out.init_report;
    out.converged = true;
  } else {
    WarpSolution sol = optimize(query_local, entry.landmarks, side, side, config.optimizer);
    out.params = std::move(sol.params);
    out.init_report = sol.init_report;
    out.final_report = sol.final_report;
    out.iterations = sol.iterations;
    out.converged = sol.converged;
  }
  return out;
}

WarpRun run_warp(const TextureBank& bank, const LandmarkSequence& query, const ImageSequence& faces,
                 const PipelineConfig& config, WarpMode mode) {
  config.validate();
  require(!bank.empty(), ErrorKind::EmptyBank, "texture bank is empty");
  require(bank.window_len == config.window_len, ErrorKind::InvalidInput,
          "bank window length " + std::to_string(bank.window_len) + " differs from the configured " +
              std::to_string(config.window_len));
  require(bank.crop.side == config.crop.side, ErrorKind::InvalidInput, "bank crop differs from the configured crop");
  require(faces.size() == query.frame_count(), ErrorKind::InvalidInput,
          "query has " + std::to_string(query.frame_count()) + " landmark frames but " +
              std::to_string(faces.size()) + " face frames");

  WarpRun run;
  run.frames = faces;
  const auto spans = partition_windows(query.frame_count(), config.window_len);
  std::size_t written = 0;
  for (std::size_t k = 0; k < spans.size(); ++k) {
    const auto [begin, end] = spans[k];
    WindowOutcome outcome;
    try {
      std::vector<LandmarkFrame> local;
      std::vector<Point2> centers;
      for (std::size_t f = begin; f < end; ++f) {
        centers.push_back(mouth_center(query[f]));
        local.push_back(to_crop_local(query[f], config.crop));
      }
      const LandmarkWindow query_local(std::move(local), query.fps());
      const RetrievalResult hit = retrieve(bank, query_local);
      outcome = warp_window(*hit.entry, query_local, config, mode);
      outcome.retrieval_index = hit.index;
      outcome.retrieval_distance = hit.distance;

      const ImageWindow warped = remap_window(hit.entry->images, outcome.params, config.sampling);
      for (std::size_t f = std::max(begin, written); f < end; ++f) {
        const Image& face = faces[f];
        const Image fg = retarget(face, warped[f - begin], centers[f - begin]);
        const MaskImage mask = mouth_mask(query[f], face.width(), face.height());
        run.frames[f] = laplacian_blend(fg, face, mask, config.pyramid);
      }
    } catch (const Error& e) {
      outcome = WindowOutcome{};
      outcome.error = e.what();
    }
    outcome.window = k;
    outcome.begin = begin;
    outcome.end = end;
    outcome.first_written = std::max(begin, written);
    written = end;
    run.windows.push_back(std::move(outcome));
  }
  return run;
}

int cmd_bank(const fs::path& frames_dir, const fs::path& landmarks_file, const fs::path& out_dir,
             const PipelineConfig& config) {
  try {
    config.validate();
    const ImageSequence frames = io::read_frames(frames_dir);
    const LandmarkSequence landmarks = io::read_landmarks(landmarks_file);
    const TextureBank bank = build_bank(frames, landmarks, config.window_len, config.crop);
    io::save_bank(out_dir, bank);
    std::cout << "bank entries: " << bank.size() << '\n';
    return 0;
  } catch (const Error& e) {
    std::cerr << "bank: " << e.what() << '\n';
    return 2;
  }
}

int cmd_warp(const fs::path& bank_dir, const fs::path& query_file, const fs::path& faces_dir,
             const fs::path& out_dir, WarpMode mode, const PipelineConfig& config) {
  WarpRun run;
  try {
    const TextureBank bank = io::load_bank(bank_dir);
    const LandmarkSequence query = io::read_landmarks(query_file);
    const ImageSequence faces = io::read_frames(faces_dir);
    run = run_warp(bank, query, faces, config, mode);
    io::write_frames(out_dir / "frames", run.frames);
    json report = run.report(mode);
    report["config"] = to_json(config);
    io::write_json(out_dir / "report.json", report);
  } catch (const Error& e) {
    std::cerr << "warp: " << e.what() << '\n';
    return 2;
  }
  for (const auto& w : run.windows) {
    if (w.error) {
      std::cerr << "window " << w.window << " [" << w.begin << ", " << w.end << "): " << *w.error << '\n';
      continue;
    }
    std::cout << "window " << w.window << " [" << w.begin << ", " << w.end << ") bank " << w.retrieval_index
              << "  l_tw " << w.init_report.l_tw << " -> " << w.final_report.l_tw << "  e_t "
              << w.init_report.e_t << " -> " << w.final_report.e_t << '\n';
  }
  return run.ok() ? 0 : 1;
}

int cmd_metrics(const MetricsRequest& req) {
  try {
    json out = json::object();
    if (req.photometric) {
      ImageSequence gen = io::read_frames(req.gen_dir);
      ImageSequence gt = io::read_frames(req.gt_dir);
      require(gen.size() == gt.size(), ErrorKind::InvalidInput,
              "generated and ground-truth directories differ in frame count");
      if (req.crop_landmarks) {
        const LandmarkSequence lm = io::read_landmarks(*req.crop_landmarks);
        require(lm.frame_count() == gen.size(), ErrorKind::InvalidInput,
                "crop landmarks do not match the frame count");
        for (std::size_t f = 0; f < gen.size(); ++f) {
          gen[f] = crop_mouth(gen[f], lm[f], req.crop);
          gt[f] = crop_mouth(gt[f], lm[f], req.crop);
        }
      }
      const PhotometricResult pe = photometric_error(gen, gt);
      const double peak = pe.map.maxCoeff();
      Image map(static_cast<int>(pe.map.cols()), static_cast<int>(pe.map.rows()), 1);
      for (int y = 0; y < map.height(); ++y) {
        for (int x = 0; x < map.width(); ++x) {
          map.at(x, y) = peak > 0.0 ? static_cast<std::uint8_t>(std::lround(255.0 * pe.map(y, x) / peak)) : 0;
        }
      }
      fs::create_directories(req.out_dir);
      io::write_png(req.out_dir / "distance_map.png", map);
      io::write_json(req.out_dir / "distance_map.json", {{"scale", peak}, {"max_value", peak}});
      out["photometric"] = pe.mean;
    }
    if (req.ssiou) {
      require(req.gen_landmarks && req.gt_landmarks, ErrorKind::InvalidInput,
              "ssiou needs generated and ground-truth landmark files");
      const auto a = lip_aperture(io::read_landmarks(*req.gen_landmarks));
      const auto b = lip_aperture(io::read_landmarks(*req.gt_landmarks));
      out["ssiou"] = ssiou(a, b);
    }
    io::write_json(req.out_dir / "metrics.json", out);
    std::cout << out.dump() << '\n';
    return 0;
  } catch (const Error& e) {
    std::cerr << "metrics: " << e.what() << '\n';
    return 2;
  }
}

int cmd_synth(const SynthConfig& config, const fs::path& out_dir) {
  try {
    const SynthClip clip = synthesize(config);
    io::write_frames(out_dir / "frames", clip.frames);
    io::write_landmarks(out_dir / "landmarks.json", clip.landmarks);
    io::write_landmarks(out_dir / "landmarks_clean.json", clip.clean);
    std::cout << "synthesized " << clip.frames.size() << " frames\n";
    return 0;
  } catch (const Error& e) {
    std::cerr << "synth: " << e.what() << '\n';
    return 2;
  }
}

int cmd_adain_check(const fs::path& input, const fs::path& out) {
  try {
    const json doc = io::read_json(input);
    const auto rows = doc.at("content").get<std::vector<std::vector<double>>>();
    require(!rows.empty() && !rows.front().empty(), ErrorKind::InvalidInput, "content map is empty");
    FeatureMap content{Eigen::MatrixXd(static_cast<Eigen::Index>(rows.size()),
                                       static_cast<Eigen::Index>(rows.front().size()))};
    for (std::size_t c = 0; c < rows.size(); ++c) {
      require(rows[c].size() == rows.front().size(), ErrorKind::InvalidInput, "content rows differ in length");
      for (std::size_t l = 0; l < rows[c].size(); ++l) {
        content.values(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(l)) = rows[c][l];
      }
    }
    const double eps = doc.value("eps", 1e-5);
    const auto channels = content.channels();
    StyleParams style{Eigen::VectorXd::Ones(channels), Eigen::VectorXd::Zero(channels)};
    const auto load_vector = [&](const char* key, Eigen::VectorXd& dst) {
      if (!doc.contains(key)) return;
      const auto v = doc.at(key).get<std::vector<double>>();
      dst = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
    };
    load_vector("gamma", style.gamma);
    load_vector("beta", style.beta);

    const ChannelStats in_stats = channel_stats(content);
    const ChannelStats norm_stats = channel_stats(instance_norm(content, eps));
    const ChannelStats ada_stats = channel_stats(adain(content, style, eps));

    bool ok = true;
    json per_channel = json::array();
    for (Eigen::Index c = 0; c < channels; ++c) {
      const double sigma = in_stats.stddev(c);
      const double expected_std = sigma / (sigma + eps);
      const bool mean_ok = std::abs(norm_stats.mean(c)) <= 1e-9;
      const bool std_ok = std::abs(norm_stats.stddev(c) - expected_std) <= 1e-9;
      const bool ada_mean_ok = std::abs(ada_stats.mean(c) - style.beta(c)) <= 1e-9 * (1.0 + std::abs(style.beta(c)));
      const bool ada_std_ok =
          std::abs(ada_stats.stddev(c) - std::abs(style.gamma(c)) * expected_std) <= 1e-9 * (1.0 + std::abs(style.gamma(c)));
      ok = ok && mean_ok && std_ok && ada_mean_ok && ada_std_ok;
      per_channel.push_back({{"instance_norm_mean", norm_stats.mean(c)},
                             {"instance_norm_std", norm_stats.stddev(c)},
                             {"adain_mean", ada_stats.mean(c)},
                             {"adain_std", ada_stats.stddev(c)},
                             {"pass", mean_ok && std_ok && ada_mean_ok && ada_std_ok}});
    }
    const json result = {{"channels", per_channel}, {"eps", eps}, {"pass", ok}};
    io::write_json(out, result);
    std::cout << (ok ? "adain-check: pass" : "adain-check: FAIL") << '\n';
    return ok ? 0 : 1;
  } catch (const Error& e) {
    std::cerr << "adain-check: " << e.what() << '\n';
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "adain-check: malformed input: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace tempowarp
