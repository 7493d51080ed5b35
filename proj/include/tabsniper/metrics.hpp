#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "tabsniper/detection.hpp"

namespace tabsniper {

/// Ground truth and scored predictions for one page or table.
struct EvalPair {
  std::vector<DetectedObject> ground_truth;
  std::vector<DetectedObject> predictions;
};

struct ClassMetrics {
  std::size_t gt_count = 0;
  std::array<double, 10> ap_at{};      ///< IoU 0.50, 0.55, ..., 0.95
  std::array<double, 10> recall_at{};
  double ap50 = 0, ap75 = 0, ap = 0, ar = 0;
};

struct DetectionMetrics {
  double ap50 = 0, ap75 = 0, ap = 0, ar = 0;
  std::map<std::string, ClassMetrics> per_class;
};

/// IoU thresholds 0.50:0.05:0.95.
inline double iou_threshold_at(std::size_t i) { return static_cast<double>(50 + 5 * i) / 100.0; }

/// 101-point interpolated average precision from a ranked TP/FP sequence.
inline double interpolated_ap(std::span<const char> is_tp, std::size_t gt_count) {
  if (gt_count == 0) return 0.0;
  const std::size_t n = is_tp.size();
  std::vector<double> precision(n), recall(n);
  std::size_t tp = 0;
  for (std::size_t k = 0; k < n; ++k) {
    tp += is_tp[k] ? 1 : 0;
    precision[k] = static_cast<double>(tp) / static_cast<double>(k + 1);
    recall[k] = static_cast<double>(tp) / static_cast<double>(gt_count);
  }
  for (std::size_t k = n; k-- > 1;) precision[k - 1] = std::max(precision[k - 1], precision[k]);
  double sum = 0.0;
  std::size_t k = 0;
  for (int i = 0; i <= 100; ++i) {
    const double r = static_cast<double>(i) / 100.0;
    while (k < n && recall[k] < r) ++k;
    if (k < n) sum += precision[k];
  }
  return sum / 101.0;
}

/// Greedy matching of score-ranked predictions (ties keep input order) to the
/// best-overlapping unmatched ground truth of the same image at IoU >= threshold.
/// Returns TP flags in rank order.
inline std::vector<char> match_ranked(std::span<const EvalPair> pairs, const Label& label, double threshold,
                                      std::size_t* gt_count = nullptr) {
  struct Ranked {
    double score;
    std::size_t pair, index;
  };
  std::vector<Ranked> ranked;
  std::size_t n_gt = 0;
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    for (std::size_t i = 0; i < pairs[p].predictions.size(); ++i)
      if (pairs[p].predictions[i].label == label) ranked.push_back({pairs[p].predictions[i].score, p, i});
    for (const auto& g : pairs[p].ground_truth)
      if (g.label == label) ++n_gt;
  }
  std::stable_sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) { return a.score > b.score; });

  std::vector<std::vector<char>> used(pairs.size());
  for (std::size_t p = 0; p < pairs.size(); ++p) used[p].assign(pairs[p].ground_truth.size(), 0);
  std::vector<char> tp;
  tp.reserve(ranked.size());
  for (const auto& r : ranked) {
    const auto& pred = pairs[r.pair].predictions[r.index];
    const auto& gts = pairs[r.pair].ground_truth;
    double best = threshold;
    std::optional<std::size_t> hit;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (used[r.pair][g] || gts[g].label != label || gts[g].page != pred.page) continue;
      const double v = iou(pred.box, gts[g].box);
      if (v >= best && (!hit || v > best)) {
        best = v;
        hit = g;
      }
    }
    if (hit) used[r.pair][*hit] = 1;
    tp.push_back(hit ? 1 : 0);
  }
  if (gt_count) *gt_count = n_gt;
  return tp;
}

/// AP50, AP75, AP (mean over 0.50:0.95) and AR (mean max recall over the same
/// thresholds), macro-averaged over the classes present in the ground truth.
/// Classes only predicted are reported with zero scores but not averaged.
inline DetectionMetrics detection_metrics(std::span<const EvalPair> pairs) {
  std::set<Label> labels;
  for (const auto& p : pairs) {
    for (const auto& g : p.ground_truth) labels.insert(g.label);
    for (const auto& d : p.predictions) labels.insert(d.label);
  }
  DetectionMetrics out;
  std::size_t averaged = 0;
  for (const auto& label : labels) {
    ClassMetrics cm;
    for (std::size_t t = 0; t < 10; ++t) {
      std::size_t n_gt = 0;
      const auto tp = match_ranked(pairs, label, iou_threshold_at(t), &n_gt);
      cm.gt_count = n_gt;
      cm.ap_at[t] = interpolated_ap(tp, n_gt);
      const auto hits = static_cast<double>(std::count(tp.begin(), tp.end(), 1));
      cm.recall_at[t] = n_gt ? hits / static_cast<double>(n_gt) : 0.0;
    }
    cm.ap50 = cm.ap_at[0];
    cm.ap75 = cm.ap_at[5];
    for (std::size_t t = 0; t < 10; ++t) {
      cm.ap += cm.ap_at[t] / 10.0;
      cm.ar += cm.recall_at[t] / 10.0;
    }
    if (cm.gt_count > 0) {
      out.ap50 += cm.ap50;
      out.ap75 += cm.ap75;
      out.ap += cm.ap;
      out.ar += cm.ar;
      ++averaged;
    }
    out.per_class[label_name(label)] = cm;
  }
  if (averaged) {
    const auto n = static_cast<double>(averaged);
    out.ap50 /= n;
    out.ap75 /= n;
    out.ap /= n;
    out.ar /= n;
  }
  return out;
}

/// Krippendorff's alpha (nominal) between two box annotations. Boxes on the
/// same page are paired greedily by descending IoU among pairs above
/// `iou_threshold`; a pair is a unit carrying both labels, an unpaired box a
/// unit carrying its label against "absent". Result clamped to [0, 1]; two
/// empty annotations agree fully.
inline double krippendorff_alpha(std::span<const DetectedObject> a, std::span<const DetectedObject> b,
                                 double iou_threshold) {
  if (a.empty() && b.empty()) return 1.0;
  struct Candidate {
    double iou;
    std::size_t i, j;
  };
  std::vector<Candidate> cands;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (a[i].page != b[j].page) continue;
      const double v = iou(a[i].box, b[j].box);
      if (v > iou_threshold) cands.push_back({v, i, j});
    }
  std::stable_sort(cands.begin(), cands.end(), [](const Candidate& x, const Candidate& y) { return x.iou > y.iou; });

  // Value 0 is "absent"; labels are numbered from 1.
  std::map<Label, int> code;
  auto code_of = [&](const Label& l) {
    auto [it, inserted] = code.emplace(l, static_cast<int>(code.size()) + 1);
    return it->second;
  };
  std::vector<std::pair<int, int>> units;
  std::vector<char> used_a(a.size(), 0), used_b(b.size(), 0);
  for (const auto& c : cands) {
    if (used_a[c.i] || used_b[c.j]) continue;
    used_a[c.i] = used_b[c.j] = 1;
    units.emplace_back(code_of(a[c.i].label), code_of(b[c.j].label));
  }
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!used_a[i]) units.emplace_back(code_of(a[i].label), 0);
  for (std::size_t j = 0; j < b.size(); ++j)
    if (!used_b[j]) units.emplace_back(0, code_of(b[j].label));

  const std::size_t k = code.size() + 1;
  std::vector<std::vector<double>> o(k, std::vector<double>(k, 0.0));
  for (auto [x, y] : units) {
    o[static_cast<std::size_t>(x)][static_cast<std::size_t>(y)] += 1.0;
    o[static_cast<std::size_t>(y)][static_cast<std::size_t>(x)] += 1.0;
  }
  std::vector<double> n_c(k, 0.0);
  double n = 0.0, disagree = 0.0;
  for (std::size_t c = 0; c < k; ++c)
    for (std::size_t d = 0; d < k; ++d) {
      n_c[c] += o[c][d];
      n += o[c][d];
      if (c != d) disagree += o[c][d];
    }
  double expected = 0.0;
  for (std::size_t c = 0; c < k; ++c)
    for (std::size_t d = 0; d < k; ++d)
      if (c != d) expected += n_c[c] * n_c[d];
  const double d_o = disagree / n;
  const double d_e = expected / (n * (n - 1.0));
  if (d_e <= 0.0) return d_o == 0.0 ? 1.0 : 0.0;
  return std::clamp(1.0 - d_o / d_e, 0.0, 1.0);
}

struct F1Report {
  std::map<std::string, double> per_class;
  double macro = 0.0;
};

/// Per-class F1 = 2TP / (2TP + FP + FN) and its macro average over classes
/// seen in either list.
template <typename T>
F1Report classifier_f1(std::span<const T> truth, std::span<const T> predicted) {
  if (truth.size() != predicted.size()) throw std::invalid_argument("classifier_f1: length mismatch");
  if (truth.empty()) throw std::invalid_argument("classifier_f1: no samples");
  std::map<T, std::array<std::size_t, 3>> counts;  // tp, fp, fn
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] == predicted[i]) {
      ++counts[truth[i]][0];
    } else {
      ++counts[predicted[i]][1];
      ++counts[truth[i]][2];
    }
  }
  F1Report r;
  for (const auto& [cls, c] : counts) {
    const double denom = static_cast<double>(2 * c[0] + c[1] + c[2]);
    const double f1 = denom > 0 ? 2.0 * static_cast<double>(c[0]) / denom : 0.0;
    std::string name;
    if constexpr (std::is_same_v<T, std::string>) {
      name = cls;
    } else {
      name = std::string(to_string(cls));
    }
    r.per_class[name] = f1;
    r.macro += f1;
  }
  r.macro /= static_cast<double>(counts.size());
  return r;
}

}  // namespace tabsniper
