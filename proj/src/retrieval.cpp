#include "tempowarp/retrieval.hpp"

#include <cmath>
#include <string>

namespace tempowarp {

LandmarkFrame to_crop_local(const LandmarkFrame& frame, const CropSpec& crop) {
  const auto [x0, y0] = crop_origin(mouth_center(frame), crop);
  return frame.translated({-static_cast<double>(x0), -static_cast<double>(y0)});
}

TextureBank build_bank(const ImageSequence& frames, const LandmarkSequence& landmarks,
                       std::size_t window_len, const CropSpec& crop) {
  crop.validate();
  require(window_len >= 1, ErrorKind::InvalidInput, "window length must be positive");
  require(frames.size() == landmarks.frame_count(), ErrorKind::InvalidInput,
          "clip has " + std::to_string(frames.size()) + " frames but " +
              std::to_string(landmarks.frame_count()) + " landmark frames");
  require(frames.size() >= window_len, ErrorKind::InsufficientData,
          "clip of " + std::to_string(frames.size()) + " frames is shorter than the window length " +
              std::to_string(window_len));

  std::vector<Image> crops;
  std::vector<LandmarkFrame> local;
  crops.reserve(frames.size());
  local.reserve(frames.size());
  for (std::size_t f = 0; f < frames.size(); ++f) {
    crops.push_back(crop_mouth(frames[f], landmarks[f], crop));
    local.push_back(to_crop_local(landmarks[f], crop));
  }

  TextureBank bank;
  bank.window_len = window_len;
  bank.crop = crop;
  for (std::size_t k = 0; k + window_len <= frames.size(); ++k) {
    BankEntry e;
    e.start = k;
    e.landmarks = LandmarkWindow({local.begin() + k, local.begin() + k + window_len}, landmarks.fps());
    e.images.assign(crops.begin() + k, crops.begin() + k + window_len);
    bank.entries.push_back(std::move(e));
  }
  return bank;
}

double landmark_l1(const LandmarkWindow& a, const LandmarkWindow& b) {
  require(a.frame_count() == b.frame_count() && a.point_count() == b.point_count(),
          ErrorKind::InvalidInput, "landmark windows differ in shape");
  double total = 0.0;
  for (std::size_t t = 0; t < a.frame_count(); ++t) {
    for (std::size_t i = 0; i < a.point_count(); ++i) {
      total += std::abs(a[t][i].x - b[t][i].x) + std::abs(a[t][i].y - b[t][i].y);
    }
  }
  return total;
}

RetrievalResult retrieve(const TextureBank& bank, const LandmarkWindow& query) {
  require(!bank.empty(), ErrorKind::EmptyBank, "cannot retrieve from an empty bank");
  RetrievalResult best;
  for (std::size_t k = 0; k < bank.entries.size(); ++k) {
    const double d = landmark_l1(bank.entries[k].landmarks, query);
    if (best.entry == nullptr || d < best.distance) {
      best.index = k;
      best.distance = d;
      best.entry = &bank.entries[k];
    }
  }
  return best;
}

}  // namespace tempowarp
