#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "oracles.hpp"
#include "tabsniper/box.hpp"
#include "tabsniper/detection.hpp"
#include "tabsniper/errors.hpp"
#include "tabsniper/hungarian.hpp"
#include "tabsniper/losses.hpp"

using namespace tabsniper;

TEST(Box, BasicMeasures) {
  const Box b{1, 2, 4, 8};
  EXPECT_DOUBLE_EQ(b.width(), 3);
  EXPECT_DOUBLE_EQ(b.height(), 6);
  EXPECT_DOUBLE_EQ(b.area(), 18);
  EXPECT_DOUBLE_EQ(b.cx(), 2.5);
  EXPECT_DOUBLE_EQ(b.cy(), 5);
  EXPECT_TRUE(b.valid());
  EXPECT_FALSE(b.degenerate());
  EXPECT_TRUE((Box{1, 1, 1, 5}.degenerate()));
  EXPECT_FALSE((Box{2, 1, 1, 5}.valid()));
}

TEST(Box, IouMatchesRasterOracleOnGrid) {
  Rng rng(11);
  for (int i = 0; i < 300; ++i) {
    const Box a = oracle::random_grid_box(rng), b = oracle::random_grid_box(rng);
    EXPECT_NEAR(iou(a, b), oracle::raster_iou(a, b, 0.5), 1e-12) << a << " " << b;
  }
}

TEST(Box, IouKnownValues) {
  EXPECT_NEAR(iou(Box{0, 0, 2, 1}, Box{0, 0, 1, 2}), 1.0 / 3.0, 1e-15);
  EXPECT_DOUBLE_EQ(iou(Box{0, 0, 1, 1}, Box{2, 2, 3, 3}), 0.0);
  EXPECT_DOUBLE_EQ(iou(Box{0, 0, 1, 1}, Box{0, 0, 1, 1}), 1.0);
  EXPECT_DOUBLE_EQ(iou(Box{0, 0, 0, 0}, Box{0, 0, 0, 0}), 0.0);
}

TEST(Box, ContainmentAndIntervals) {
  EXPECT_DOUBLE_EQ(containment(Box{0, 0, 2, 2}, Box{1, 0, 10, 10}), 0.5);
  EXPECT_DOUBLE_EQ(containment(Box{0, 0, 0, 0}, Box{0, 0, 1, 1}), 0.0);
  EXPECT_DOUBLE_EQ(interval_iou(0.0, 10.0, 5.0, 15.0), 5.0 / 15.0);
  EXPECT_DOUBLE_EQ(interval_iou(0.0, 1.0, 2.0, 3.0), 0.0);
}

TEST(Box, ClampTranslatePad) {
  EXPECT_EQ(clamp_to(Box{-5, -1, 120, 50}, 100.0, 40.0), (Box{0, 0, 100, 40}));
  EXPECT_EQ(translate(Box{1, 2, 3, 4}, 10.0, -2.0), (Box{11, 0, 13, 2}));
  EXPECT_EQ(pad(Box{10, 10, 20, 20}, 2.0), (Box{8, 8, 22, 22}));
  EXPECT_EQ(enclosing(Box{0, 0, 1, 1}, Box{3, -1, 4, 0}), (Box{0, -1, 4, 1}));
  std::ostringstream os;
  os << Box{0, 0, 1, 2};
  EXPECT_FALSE(os.str().empty());
}

TEST(Losses, GiouKnownValues) {
  // Disjoint unit squares one apart: IoU 0, enclosing area 3, union 2.
  EXPECT_NEAR(giou_loss(Box{0, 0, 1, 1}, Box{2, 0, 3, 1}), 1.0 + 1.0 / 3.0, 1e-12);
  // Contained: IoU 1/4, enclosing equals the union.
  EXPECT_NEAR(giou_loss(Box{0, 0, 1, 1}, Box{0, 0, 2, 2}), 0.75, 1e-12);
  EXPECT_DOUBLE_EQ(giou_loss(Box{1, 1, 3, 4}, Box{1, 1, 3, 4}), 0.0);
}

TEST(Losses, DiouKnownValue) {
  // IoU 0, centers 2 apart, enclosing diagonal² 10: 1 + 4/10.
  EXPECT_NEAR(diou_loss(Box{0, 0, 1, 1}, Box{2, 0, 3, 1}), 1.4, 1e-12);
  // Same centers: the distance term vanishes.
  EXPECT_NEAR(diou_loss(Box{0, 0, 4, 4}, Box{1, 1, 3, 3}), 1.0 - 0.25, 1e-12);
}

TEST(Losses, CiouWorkedFixture) {
  // Intermediates computed by hand: IoU 1/3, ρ²/c² = 0.0625,
  // υ = (4/π²)(atan(1/2) − atan 2)², α = υ / (2/3 + υ).
  const double v = 4.0 / (std::numbers::pi * std::numbers::pi) * std::pow(std::atan(0.5) - std::atan(2.0), 2);
  const double alpha = v / (2.0 / 3.0 + v);
  const double expected = 1.0 - 1.0 / 3.0 + 0.0625 + alpha * v;
  EXPECT_NEAR(v, 0.167826, 1e-6);
  EXPECT_NEAR(alpha, 0.201111, 1e-6);
  EXPECT_NEAR(ciou_loss(Box{0, 0, 2, 1}, Box{0, 0, 1, 2}), expected, 1e-12);
  EXPECT_NEAR(ciou_loss(Box{0, 0, 2, 1}, Box{0, 0, 1, 2}), 0.762918, 1e-6);
}

TEST(Losses, CiouEqualsDiouForMatchingAspect) {
  EXPECT_DOUBLE_EQ(ciou_loss(Box{0, 0, 2, 1}, Box{3, 3, 7, 5}), diou_loss(Box{0, 0, 2, 1}, Box{3, 3, 7, 5}));
}

TEST(Losses, DegenerateBoxesRejected) {
  EXPECT_THROW(giou_loss(Box{0, 0, 0, 1}, Box{0, 0, 1, 1}), GeometryError);
  EXPECT_THROW(diou_loss(Box{0, 0, 1, 1}, Box{2, 2, 1, 1}), GeometryError);
  EXPECT_THROW(ciou_loss(Box{0, 0, 1, 0}, Box{0, 0, 1, 1}), GeometryError);
}

TEST(Losses, RangesOnRandomPairs) {
  Rng rng(3);
  for (int i = 0; i < 500; ++i) {
    const Box a = oracle::random_box(rng), b = oracle::random_box(rng);
    const double g = giou_loss(a, b), d = diou_loss(a, b), c = ciou_loss(a, b);
    EXPECT_GE(g, 0);
    EXPECT_LT(g, 2);
    EXPECT_GE(d, 0);
    EXPECT_LT(d, 2);
    EXPECT_GE(c, d);
  }
}

TEST(Losses, FloatInstantiation) {
  using BoxF = BasicBox<float>;
  EXPECT_NEAR(giou_loss(BoxF{0, 0, 1, 1}, BoxF{0, 0, 2, 2}), 0.75f, 1e-6f);
}

TEST(Hungarian, MatchesBruteForce) {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const auto n = static_cast<std::size_t>(rng.uniform_int(1, 5));
    const auto m = static_cast<std::size_t>(rng.uniform_int(static_cast<std::int64_t>(n), 6));
    CostMatrix<double> cost(n, m);
    std::vector<std::vector<double>> plain(n, std::vector<double>(m));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < m; ++j) plain[i][j] = cost(i, j) = std::round(rng.uniform(0, 20));
    const auto assign = solve_assignment(cost);
    ASSERT_EQ(assign.size(), n);
    double total = 0;
    std::vector<char> used(m, 0);
    for (std::size_t i = 0; i < n; ++i) {
      ASSERT_LT(assign[i], m);
      EXPECT_FALSE(used[assign[i]]);
      used[assign[i]] = 1;
      total += cost(i, assign[i]);
    }
    EXPECT_DOUBLE_EQ(total, oracle::brute_force_assignment(plain));
  }
}

TEST(Hungarian, RejectsWideProblems) {
  EXPECT_THROW(solve_assignment(CostMatrix<double>(3, 2)), std::invalid_argument);
  EXPECT_TRUE(solve_assignment(CostMatrix<double>(0, 4)).empty());
}

TEST(SetLoss, PerfectPredictionCostsOnlyCrossEntropy) {
  // One target, two queries: exact box with p=0.5 and a no-object query with p=0.5.
  const std::vector<Prediction> preds{{Box{0.1, 0.1, 0.5, 0.5}, {0.5, 0.0, 0.5}},
                                      {Box{0.6, 0.6, 0.9, 0.9}, {0.0, 0.5, 0.5}}};
  const std::vector<Target> targets{{0, Box{0.1, 0.1, 0.5, 0.5}}};
  const auto r = set_prediction_loss(preds, targets, {});
  ASSERT_EQ(r.matched_prediction.size(), 1u);
  EXPECT_EQ(r.matched_prediction[0], 0u);
  // −ln 0.5 for the match plus −ln 0.5 for the unmatched query's no-object.
  EXPECT_NEAR(r.loss, 2 * 0.693147, 1e-6);
}

TEST(SetLoss, MatchesBruteForceTotal) {
  Rng rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t nq = 4, nt = static_cast<std::size_t>(rng.uniform_int(0, 4));
    std::vector<Prediction> preds;
    for (std::size_t q = 0; q < nq; ++q) {
      std::vector<double> s{rng.uniform(0.01, 1), rng.uniform(0.01, 1), rng.uniform(0.01, 1)};
      const double sum = s[0] + s[1] + s[2];
      for (auto& v : s) v /= sum;
      const double x = rng.uniform(0, 0.5), y = rng.uniform(0, 0.5);
      preds.push_back({Box{x, y, x + rng.uniform(0.05, 0.5), y + rng.uniform(0.05, 0.5)}, s});
    }
    std::vector<Target> targets;
    for (std::size_t t = 0; t < nt; ++t) {
      const double x = rng.uniform(0, 0.5), y = rng.uniform(0, 0.5);
      targets.push_back({static_cast<std::size_t>(rng.uniform_int(0, 1)),
                         Box{x, y, x + rng.uniform(0.05, 0.5), y + rng.uniform(0.05, 0.5)}});
    }
    const LossWeights w{1, 5, 2, BoxLoss::CIoU};
    // Enumerate every injective target → query map.
    std::vector<std::size_t> perm(nq);
    std::iota(perm.begin(), perm.end(), 0);
    // The matching minimizes pair cost only; unmatched no-object terms are added afterwards.
    double best_pairs = INFINITY, best = 0;
    do {
      double total = 0;
      for (std::size_t t = 0; t < nt; ++t) {
        const auto& p = preds[perm[t]];
        const auto& b = targets[t].box;
        total += -std::log(p.class_scores[targets[t].label]) +
                 5 * (std::abs(p.box.x1 - b.x1) + std::abs(p.box.y1 - b.y1) + std::abs(p.box.x2 - b.x2) +
                      std::abs(p.box.y2 - b.y2)) +
                 2 * ciou_loss(p.box, b);
      }
      const double pairs = total;
      for (std::size_t q = nt; q < nq; ++q) total += -std::log(preds[perm[q]].class_scores[2]);
      if (pairs < best_pairs) {
        best_pairs = pairs;
        best = total;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    EXPECT_NEAR(set_prediction_loss(preds, targets, w).loss, best, 1e-9);
  }
}

TEST(SetLoss, ValidatesInput) {
  const std::vector<Prediction> preds{{Box{0, 0, 1, 1}, {0.7, 0.2}}};
  EXPECT_THROW(set_prediction_loss(preds, std::vector<Target>{}, {}), GeometryError);
  const std::vector<Prediction> ok{{Box{0, 0, 1, 1}, {0.5, 0.5}}};
  const std::vector<Target> two{{0, Box{0, 0, 1, 1}}, {0, Box{0, 0, 1, 1}}};
  EXPECT_THROW(set_prediction_loss(ok, two, {}), GeometryError);
  const std::vector<Target> bad_label{{1, Box{0, 0, 1, 1}}};
  EXPECT_THROW(set_prediction_loss(ok, bad_label, {}), GeometryError);
}

TEST(SetLoss, ZeroProbabilityIsFloored) {
  const std::vector<Prediction> preds{{Box{0, 0, 1, 1}, {0.0, 1.0}}};
  const std::vector<Target> targets{{0, Box{0, 0, 1, 1}}};
  EXPECT_NEAR(set_prediction_loss(preds, targets, {}).loss, -std::log(1e-12), 1e-9);
}

TEST(Nms, MatchesReferenceOnRandomSets) {
  Rng rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<DetectedObject> objs;
    const auto n = rng.uniform_int(0, 8);
    for (std::int64_t i = 0; i < n; ++i)
      objs.push_back({oracle::random_grid_box(rng, 8),
                      rng.chance(0.5) ? Label{TsrClass::TableRow} : Label{TsrClass::TableColumn},
                      std::round(rng.uniform(0, 4)) / 4, static_cast<int>(rng.uniform_int(0, 1))});
    for (double thr : {0.3, 0.5, 0.7}) EXPECT_EQ(nms(objs, thr), oracle::reference_nms(objs, thr));
  }
}

TEST(Nms, EqualScoresBreakTiesByPosition) {
  const std::vector<DetectedObject> objs{{Box{0, 10, 10, 20}, TsrClass::TableRow, 0.9, 0},
                                         {Box{0, 9, 10, 19}, TsrClass::TableRow, 0.9, 0}};
  const auto kept = nms(objs, 0.5);
  ASSERT_EQ(kept.size(), 1u);
  EXPECT_DOUBLE_EQ(kept[0].box.y1, 9);
}

TEST(Nms, ClassWiseAndPageWise) {
  const Box b{0, 0, 10, 10};
  const std::vector<DetectedObject> objs{{b, TsrClass::TableRow, 0.9, 0},
                                         {b, TsrClass::TableColumn, 0.8, 0},
                                         {b, TsrClass::TableRow, 0.7, 1},
                                         {b, TsrClass::TableRow, 0.6, 0}};
  EXPECT_EQ(nms(objs, 0.5).size(), 3u);
}
