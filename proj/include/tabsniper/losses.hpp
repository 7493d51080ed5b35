#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "tabsniper/box.hpp"
#include "tabsniper/errors.hpp"
#include "tabsniper/hungarian.hpp"

namespace tabsniper {

namespace detail {

template <std::floating_point Real>
void require_positive_area(const BasicBox<Real>& b, const char* what) {
  if (!b.valid() || b.degenerate())
    throw GeometryError(std::string(what) + ": box must have positive width and height");
}

}  // namespace detail

/// 1 - IoU + |C \ (B ∪ Bgt)| / |C| with C the smallest enclosing box. Range [0, 2).
template <std::floating_point Real>
Real giou_loss(const BasicBox<Real>& b, const BasicBox<Real>& gt) {
  detail::require_positive_area(b, "giou_loss");
  detail::require_positive_area(gt, "giou_loss");
  const Real inter = intersection_area(b, gt);
  const Real uni = b.area() + gt.area() - inter;
  const Real c = enclosing(b, gt).area();
  return Real(1) - inter / uni + (c - uni) / c;
}

/// 1 - IoU + ρ²/c², ρ the distance between box centers and c the diagonal of
/// the enclosing box.
template <std::floating_point Real>
Real diou_loss(const BasicBox<Real>& b, const BasicBox<Real>& gt) {
  detail::require_positive_area(b, "diou_loss");
  detail::require_positive_area(gt, "diou_loss");
  const auto c = enclosing(b, gt);
  const Real dx = b.cx() - gt.cx();
  const Real dy = b.cy() - gt.cy();
  const Real diag2 = c.width() * c.width() + c.height() * c.height();
  return Real(1) - iou(b, gt) + (dx * dx + dy * dy) / diag2;
}

/// Aspect-ratio consistency term υ of CIoU.
template <std::floating_point Real>
Real aspect_penalty(const BasicBox<Real>& b, const BasicBox<Real>& gt) {
  const Real d = std::atan(gt.width() / gt.height()) - std::atan(b.width() / b.height());
  return Real(4) / (std::numbers::pi_v<Real> * std::numbers::pi_v<Real>) * d * d;
}

/// DIoU loss plus α·υ, α = υ / ((1 - IoU) + υ).
template <std::floating_point Real>
Real ciou_loss(const BasicBox<Real>& b, const BasicBox<Real>& gt) {
  const Real base = diou_loss(b, gt);
  const Real v = aspect_penalty(b, gt);
  if (v == Real(0)) return base;
  const Real alpha = v / ((Real(1) - iou(b, gt)) + v);
  return base + alpha * v;
}

enum class BoxLoss { GIoU, DIoU, CIoU };

template <std::floating_point Real>
Real box_loss(BoxLoss variant, const BasicBox<Real>& b, const BasicBox<Real>& gt) {
  switch (variant) {
    case BoxLoss::GIoU: return giou_loss(b, gt);
    case BoxLoss::DIoU: return diou_loss(b, gt);
    case BoxLoss::CIoU: return ciou_loss(b, gt);
  }
  return Real(0);
}

/// Weights of the set-prediction objective. Defaults are the TDC settings
/// (λce = 1, λl1 = 5, λgiou = 2).
struct LossWeights {
  double lambda_ce = 1.0;
  double lambda_l1 = 5.0;
  double lambda_box = 2.0;
  BoxLoss variant = BoxLoss::GIoU;
};

/// One query output: a box normalized to [0,1] and class probabilities.
/// The last entry of `class_scores` is the no-object class.
struct Prediction {
  Box box;
  std::vector<double> class_scores;
};

struct Target {
  std::size_t label;
  Box box;
};

struct SetLossResult {
  double loss = 0.0;
  /// matched_prediction[t] is the prediction index matched to target t.
  std::vector<std::size_t> matched_prediction;
};

namespace detail {

inline constexpr double kMinProbability = 1e-12;

inline double neg_log(double p) { return -std::log(std::max(p, kMinProbability)); }

inline void validate_scores(const Prediction& p, std::size_t index) {
  double sum = 0.0;
  for (double s : p.class_scores) {
    if (!(s >= 0.0) || !std::isfinite(s))
      throw GeometryError("prediction " + std::to_string(index) + ": negative or non-finite score");
    sum += s;
  }
  if (p.class_scores.size() < 2 || std::abs(sum - 1.0) > 1e-9)
    throw GeometryError("prediction " + std::to_string(index) +
                        ": class scores must sum to 1 over at least one class plus no-object");
}

inline double l1_distance(const Box& a, const Box& b) {
  return std::abs(a.x1 - b.x1) + std::abs(a.y1 - b.y1) + std::abs(a.x2 - b.x2) +
         std::abs(a.y2 - b.y2);
}

}  // namespace detail

/// Weighted cost of explaining `target` with `pred`.
inline double pair_cost(const Prediction& pred, const Target& target, const LossWeights& w) {
  return w.lambda_ce * detail::neg_log(pred.class_scores.at(target.label)) +
         w.lambda_l1 * detail::l1_distance(pred.box, target.box) +
         w.lambda_box * box_loss(w.variant, pred.box, target.box);
}

/// Bipartite set loss: targets are matched one-to-one to predictions by the
/// minimum total pair cost; unmatched predictions pay λce·CE against the
/// no-object class. Probabilities are floored at 1e-12 before the log.
inline SetLossResult set_prediction_loss(std::span<const Prediction> preds,
                                         std::span<const Target> targets,
                                         const LossWeights& w) {
  if (targets.size() > preds.size())
    throw GeometryError("set_prediction_loss: more targets than predictions");
  if (w.lambda_ce < 0 || w.lambda_l1 < 0 || w.lambda_box < 0)
    throw GeometryError("set_prediction_loss: loss weights must be non-negative");
  for (std::size_t i = 0; i < preds.size(); ++i) detail::validate_scores(preds[i], i);
  const std::size_t num_classes = preds.empty() ? 0 : preds.front().class_scores.size();
  for (std::size_t i = 0; i < preds.size(); ++i)
    if (preds[i].class_scores.size() != num_classes)
      throw GeometryError("set_prediction_loss: inconsistent class count in prediction " +
                          std::to_string(i));
  for (const auto& t : targets)
    if (t.label + 1 >= num_classes)
      throw GeometryError("set_prediction_loss: target label out of range");

  CostMatrix<double> cost(targets.size(), preds.size());
  for (std::size_t t = 0; t < targets.size(); ++t)
    for (std::size_t p = 0; p < preds.size(); ++p) cost(t, p) = pair_cost(preds[p], targets[t], w);

  SetLossResult result;
  result.matched_prediction = solve_assignment(cost);
  std::vector<char> matched(preds.size(), 0);
  for (std::size_t t = 0; t < targets.size(); ++t) {
    const std::size_t p = result.matched_prediction[t];
    matched[p] = 1;
    result.loss += cost(t, p);
  }
  const std::size_t no_object = num_classes - 1;
  for (std::size_t p = 0; p < preds.size(); ++p)
    if (!matched[p]) result.loss += w.lambda_ce * detail::neg_log(preds[p].class_scores[no_object]);
  return result;
}

}  // namespace tabsniper
