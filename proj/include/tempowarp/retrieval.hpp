#pragma once

#include <cstddef>
#include <vector>

#include "tempowarp/core_types.hpp"

namespace tempowarp {

struct BankEntry {
  std::size_t start = 0;  // first source frame of the window
  LandmarkWindow landmarks;  // crop-local coordinates
  ImageWindow images;
};

struct TextureBank {
  std::vector<BankEntry> entries;
  std::size_t window_len = 6;
  CropSpec crop;

  bool empty() const { return entries.empty(); }
  std::size_t size() const { return entries.size(); }
};

/// Landmarks of `frame` expressed relative to the top-left of its mouth crop.
LandmarkFrame to_crop_local(const LandmarkFrame& frame, const CropSpec& crop);

/// Stride-1 windows [k, k + window_len) over the clip, cropped around each frame's mouth.
TextureBank build_bank(const ImageSequence& frames, const LandmarkSequence& landmarks,
                       std::size_t window_len = 6, const CropSpec& crop = {});

/// Sum over frames and points of |dx| + |dy|.
double landmark_l1(const LandmarkWindow& a, const LandmarkWindow& b);

struct RetrievalResult {
  std::size_t index = 0;
  double distance = 0.0;
  const BankEntry* entry = nullptr;
};

/// Entry with minimal landmark_l1 to the query; ties go to the lowest index.
RetrievalResult retrieve(const TextureBank& bank, const LandmarkWindow& query);

}  // namespace tempowarp
