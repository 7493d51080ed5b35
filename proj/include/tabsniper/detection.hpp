#pragma once

#include <algorithm>
#include <map>
#include <span>
#include <tuple>
#include <vector>

#include "tabsniper/box.hpp"
#include "tabsniper/taxonomy.hpp"

namespace tabsniper {

/// A scored, labelled box on one page.
struct DetectedObject {
  Box box;
  Label label;
  double score = 1.0;
  int page = 0;

  friend bool operator==(const DetectedObject&, const DetectedObject&) = default;
};

template <typename T>
bool has_label(const DetectedObject& o, T value) {
  const T* v = std::get_if<T>(&o.label);
  return v && *v == value;
}

template <typename T>
std::vector<DetectedObject> filter_label(std::span<const DetectedObject> objects, T value) {
  std::vector<DetectedObject> out;
  for (const auto& o : objects)
    if (has_label(o, value)) out.push_back(o);
  return out;
}

namespace detail {

// Score descending; equal scores ordered by (y1, x1, x2, y2).
inline bool score_order(const DetectedObject& a, const DetectedObject& b) {
  if (a.score != b.score) return a.score > b.score;
  return std::tie(a.box.y1, a.box.x1, a.box.x2, a.box.y2) <
         std::tie(b.box.y1, b.box.x1, b.box.x2, b.box.y2);
}

}  // namespace detail

/// Class-wise greedy non-maximum suppression. An object is dropped when its
/// IoU with an already kept object of the same label and page exceeds
/// `iou_threshold`. Output is sorted by score descending.
inline std::vector<DetectedObject> nms(std::span<const DetectedObject> objects,
                                       double iou_threshold) {
  std::vector<DetectedObject> sorted(objects.begin(), objects.end());
  std::stable_sort(sorted.begin(), sorted.end(), detail::score_order);

  std::vector<DetectedObject> kept;
  kept.reserve(sorted.size());
  for (const auto& cand : sorted) {
    const bool suppressed = std::any_of(kept.begin(), kept.end(), [&](const DetectedObject& k) {
      return k.page == cand.page && k.label == cand.label && iou(k.box, cand.box) > iou_threshold;
    });
    if (!suppressed) kept.push_back(cand);
  }
  return kept;
}

}  // namespace tabsniper
