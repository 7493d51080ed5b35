#pragma once

#include <algorithm>
#include <cctype>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tabsniper/box.hpp"
#include "tabsniper/docmodel.hpp"

namespace tabsniper {

/// Lowercase, split on anything that is not an ASCII letter or digit. Digits
/// are kept; punctuation-only fragments vanish.
inline std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c)) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

inline std::string join(std::span<const std::string> parts, std::string_view sep = " ") {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

/// Sort words top-to-bottom then left-to-right. Words whose vertical centers
/// are within half a median word height of a line's first word share that line.
inline std::vector<OcrWord> reading_order(std::vector<OcrWord> words) {
  if (words.size() < 2) return words;
  std::vector<double> heights;
  for (const auto& w : words) heights.push_back(w.box.height());
  std::nth_element(heights.begin(), heights.begin() + heights.size() / 2, heights.end());
  const double tol = 0.5 * heights[heights.size() / 2];

  std::stable_sort(words.begin(), words.end(), [](const OcrWord& a, const OcrWord& b) {
    if (a.box.cy() != b.box.cy()) return a.box.cy() < b.box.cy();
    return a.box.x1 < b.box.x1;
  });
  std::vector<OcrWord> out;
  out.reserve(words.size());
  std::size_t start = 0;
  while (start < words.size()) {
    const double anchor = words[start].box.cy();
    std::size_t end = start + 1;
    while (end < words.size() && words[end].box.cy() - anchor <= tol) ++end;
    std::stable_sort(words.begin() + static_cast<std::ptrdiff_t>(start),
                     words.begin() + static_cast<std::ptrdiff_t>(end),
                     [](const OcrWord& a, const OcrWord& b) { return a.box.x1 < b.box.x1; });
    for (std::size_t i = start; i < end; ++i) out.push_back(std::move(words[i]));
    start = end;
  }
  return out;
}

inline std::string joined_text(std::span<const OcrWord> words) {
  std::string out;
  for (const auto& w : words) {
    if (!out.empty()) out += ' ';
    out += w.text;
  }
  return out;
}

/// Text captured from a caption or header region.
struct RegionText {
  Box region;
  std::vector<std::string> tokens;
  std::string raw;

  bool empty() const { return tokens.empty(); }

  static RegionText from_raw(const Box& region, std::string raw) {
    RegionText r{region, tokenize(raw), std::move(raw)};
    return r;
  }
};

/// Concatenate two region texts (caption first, then header).
inline RegionText concat(const RegionText& first, const RegionText& second) {
  RegionText r;
  r.region = first.empty() ? second.region : (second.empty() ? first.region
                                                             : enclosing(first.region, second.region));
  r.tokens = first.tokens;
  r.tokens.insert(r.tokens.end(), second.tokens.begin(), second.tokens.end());
  r.raw = first.raw.empty() ? second.raw
                            : (second.raw.empty() ? first.raw : first.raw + " " + second.raw);
  return r;
}

struct RegionTextOptions {
  double min_iou = 0.5;          ///< word IoU with the region must exceed this
  double min_containment = 0.9;  ///< or this fraction of the word lies inside
};

/// Words of `page` that belong to `region`, in reading order.
inline std::vector<OcrWord> words_in_region(const Box& region, std::span<const OcrWord> ocr, int page,
                                            const RegionTextOptions& opt = {}) {
  std::vector<OcrWord> picked;
  if (region.degenerate()) return picked;
  for (const auto& w : ocr) {
    if (w.page != page) continue;
    if (iou(w.box, region) > opt.min_iou || containment(w.box, region) >= opt.min_containment)
      picked.push_back(w);
  }
  return reading_order(std::move(picked));
}

inline RegionText extract_region_text(const Box& region, std::span<const OcrWord> ocr, int page,
                                      const RegionTextOptions& opt = {}) {
  const auto words = words_in_region(region, ocr, page, opt);
  return RegionText::from_raw(region, joined_text(words));
}

}  // namespace tabsniper
