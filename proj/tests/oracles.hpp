#pragma once

// Independent reference implementations used only by the tests.

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <vector>

#include "tabsniper/box.hpp"
#include "tabsniper/detection.hpp"
#include "tabsniper/random.hpp"

namespace oracle {

using tabsniper::Box;

// IoU by counting covered cells of a fine grid; exact for boxes on that grid.
inline double raster_iou(const Box& a, const Box& b, double step) {
  const double x0 = std::min(a.x1, b.x1), y0 = std::min(a.y1, b.y1);
  const double x1 = std::max(a.x2, b.x2), y1 = std::max(a.y2, b.y2);
  long inter = 0, uni = 0;
  for (double y = y0 + step / 2; y < y1; y += step)
    for (double x = x0 + step / 2; x < x1; x += step) {
      const bool in_a = x > a.x1 && x < a.x2 && y > a.y1 && y < a.y2;
      const bool in_b = x > b.x1 && x < b.x2 && y > b.y1 && y < b.y2;
      inter += in_a && in_b;
      uni += in_a || in_b;
    }
  return uni ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

inline Box random_box(tabsniper::Rng& rng, double extent = 100, double min_side = 1) {
  const double x = rng.uniform(0, extent), y = rng.uniform(0, extent);
  return {x, y, x + rng.uniform(min_side, extent), y + rng.uniform(min_side, extent)};
}

inline Box random_grid_box(tabsniper::Rng& rng, int extent = 12) {
  const auto x = static_cast<double>(rng.uniform_int(0, extent - 1));
  const auto y = static_cast<double>(rng.uniform_int(0, extent - 1));
  return {x, y, x + static_cast<double>(rng.uniform_int(1, extent)), y + static_cast<double>(rng.uniform_int(1, extent))};
}

// Brute-force minimum-cost assignment over all injective row → column maps.
inline double brute_force_assignment(const std::vector<std::vector<double>>& cost) {
  const std::size_t n = cost.size(), m = n ? cost[0].size() : 0;
  std::vector<std::size_t> cols(m);
  std::iota(cols.begin(), cols.end(), 0);
  double best = INFINITY;
  do {
    double c = 0;
    for (std::size_t i = 0; i < n; ++i) c += cost[i][cols[i]];
    best = std::min(best, c);
  } while (std::next_permutation(cols.begin(), cols.end()));
  return best;
}

// NMS by definition: walk score order and keep a box unless an already kept
// box of the same label and page overlaps it above the threshold.
inline std::vector<tabsniper::DetectedObject> reference_nms(std::vector<tabsniper::DetectedObject> objs, double thr) {
  std::vector<std::size_t> order(objs.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto &A = objs[a], &B = objs[b];
    if (A.score != B.score) return A.score > B.score;
    if (A.box.y1 != B.box.y1) return A.box.y1 < B.box.y1;
    if (A.box.x1 != B.box.x1) return A.box.x1 < B.box.x1;
    if (A.box.x2 != B.box.x2) return A.box.x2 < B.box.x2;
    if (A.box.y2 != B.box.y2) return A.box.y2 < B.box.y2;
    return a < b;
  });
  std::vector<tabsniper::DetectedObject> kept;
  for (auto i : order) {
    bool drop = false;
    for (const auto& k : kept)
      if (k.page == objs[i].page && k.label == objs[i].label && oracle::raster_iou(k.box, objs[i].box, 0.25) > thr)
        drop = true;
    if (!drop) kept.push_back(objs[i]);
  }
  return kept;
}

// Average precision by its textbook definition: for each of 101 recall
// levels r, the best precision at any cut-off whose recall reaches r.
inline double reference_ap(const std::vector<bool>& tp_in_rank_order, std::size_t gt) {
  if (gt == 0) return 0;
  double sum = 0;
  for (int i = 0; i <= 100; ++i) {
    const double r = i / 100.0;
    double best = 0;
    std::size_t hits = 0;
    for (std::size_t k = 0; k < tp_in_rank_order.size(); ++k) {
      hits += tp_in_rank_order[k];
      const double recall = static_cast<double>(hits) / static_cast<double>(gt);
      const double precision = static_cast<double>(hits) / static_cast<double>(k + 1);
      if (recall >= r) best = std::max(best, precision);
    }
    sum += best;
  }
  return sum / 101;
}

// AP of one label at one IoU threshold, from first principles: predictions in
// descending score order each claim the unclaimed same-page ground truth of
// highest IoU (lowest index on ties) reaching the threshold.
struct EvalImage {
  std::vector<tabsniper::DetectedObject> gt, pred;
};

inline double reference_label_ap(const std::vector<EvalImage>& images, const tabsniper::Label& label, double thr) {
  struct Item {
    double score;
    std::size_t img, idx;
  };
  std::vector<Item> items;
  std::size_t gt = 0;
  for (std::size_t i = 0; i < images.size(); ++i) {
    for (std::size_t k = 0; k < images[i].pred.size(); ++k)
      if (images[i].pred[k].label == label) items.push_back({images[i].pred[k].score, i, k});
    for (const auto& g : images[i].gt) gt += g.label == label;
  }
  std::stable_sort(items.begin(), items.end(), [](const Item& a, const Item& b) { return a.score > b.score; });
  std::vector<std::vector<bool>> claimed;
  for (const auto& im : images) claimed.emplace_back(im.gt.size(), false);
  std::vector<bool> tp;
  for (const auto& it : items) {
    const auto& p = images[it.img].pred[it.idx];
    long best = -1;
    double best_iou = -1;
    for (std::size_t g = 0; g < images[it.img].gt.size(); ++g) {
      const auto& q = images[it.img].gt[g];
      if (claimed[it.img][g] || q.label != label || q.page != p.page) continue;
      const double v = raster_iou(p.box, q.box, 0.5);
      if (v >= thr && v > best_iou) {
        best = static_cast<long>(g);
        best_iou = v;
      }
    }
    if (best >= 0) claimed[it.img][static_cast<std::size_t>(best)] = true;
    tp.push_back(best >= 0);
  }
  return reference_ap(tp, gt);
}

// Nominal Krippendorff alpha for two coders from the coincidence matrix.
inline double reference_alpha(const std::vector<std::pair<int, int>>& units) {
  std::map<int, double> n_c;
  double n = 0, disagree = 0;
  for (auto [a, b] : units) {
    n_c[a] += 1;
    n_c[b] += 1;
    n += 2;
    if (a != b) disagree += 2;
  }
  double expected = 0;
  for (auto [a, na] : n_c)
    for (auto [b, nb] : n_c)
      if (a != b) expected += na * nb;
  return 1 - (disagree / n) / (expected / (n * (n - 1)));
}

}  // namespace oracle
