#include <gtest/gtest.h>

#include "oracles.hpp"
#include "tabsniper/metrics.hpp"

using namespace tabsniper;

namespace {

DetectedObject obj(Box b, TsrClass c, double score = 1.0, int page = 0) { return {b, c, score, page}; }

}  // namespace

TEST(InterpolatedAp, KnownSequences) {
  const std::vector<char> perfect{1, 1};
  EXPECT_DOUBLE_EQ(interpolated_ap(perfect, 2), 1.0);
  const std::vector<char> none{0, 0};
  EXPECT_DOUBLE_EQ(interpolated_ap(none, 2), 0.0);
  // TP, FP, TP over 2 GT: precision 1 up to recall 0.5, then 2/3.
  const std::vector<char> mixed{1, 0, 1};
  EXPECT_NEAR(interpolated_ap(mixed, 2), (51 * 1.0 + 50 * (2.0 / 3.0)) / 101, 1e-12);
  EXPECT_DOUBLE_EQ(interpolated_ap(perfect, 0), 0.0);
}

TEST(DetectionMetrics, StraddleFixture) {
  // IoU exactly 0.6: a hit at 0.50, a miss at 0.75.
  const std::vector<EvalPair> pairs{{{obj({0, 0, 10, 10}, TsrClass::TableRow)}, {obj({0, 0, 10, 6}, TsrClass::TableRow)}}};
  const auto m = detection_metrics(pairs);
  EXPECT_DOUBLE_EQ(m.ap50, 1.0);
  EXPECT_DOUBLE_EQ(m.ap75, 0.0);
  // Thresholds 0.50, 0.55, 0.60 hit: AP and AR are 3/10.
  EXPECT_NEAR(m.ap, 0.3, 1e-12);
  EXPECT_NEAR(m.ar, 0.3, 1e-12);
}

TEST(DetectionMetrics, MacroOverGroundTruthClasses) {
  const std::vector<EvalPair> pairs{
      {{obj({0, 0, 10, 10}, TsrClass::TableRow), obj({0, 0, 10, 10}, TsrClass::TableColumn)},
       {obj({0, 0, 10, 10}, TsrClass::TableRow), obj({50, 50, 60, 60}, TsrClass::TableSpanningRow)}}};
  const auto m = detection_metrics(pairs);
  EXPECT_DOUBLE_EQ(m.ap50, 0.5);
  EXPECT_EQ(m.per_class.size(), 3u);
  EXPECT_EQ(m.per_class.at("table_spanning_row").gt_count, 0u);
}

TEST(DetectionMetrics, AgreesWithReferenceOracle) {
  Rng rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<EvalPair> pairs;
    std::vector<oracle::EvalImage> images;
    const auto n_images = rng.uniform_int(1, 3);
    for (std::int64_t i = 0; i < n_images; ++i) {
      EvalPair p;
      for (auto n = rng.uniform_int(0, 5); n > 0; --n)
        p.ground_truth.push_back(obj(oracle::random_grid_box(rng, 6), rng.chance(0.5) ? TsrClass::TableRow : TsrClass::TableColumn));
      for (auto n = rng.uniform_int(0, 5); n > 0; --n)
        p.predictions.push_back(obj(oracle::random_grid_box(rng, 6), rng.chance(0.5) ? TsrClass::TableRow : TsrClass::TableColumn,
                                    rng.uniform()));
      images.push_back({p.ground_truth, p.predictions});
      pairs.push_back(std::move(p));
    }
    const auto m = detection_metrics(pairs);
    for (const auto& [name, cm] : m.per_class) {
      const Label label = *label_from_string(name, Taxonomy::TSR);
      for (std::size_t t = 0; t < 10; ++t)
        EXPECT_DOUBLE_EQ(cm.ap_at[t], oracle::reference_label_ap(images, label, iou_threshold_at(t))) << name << " " << t;
    }
  }
}

TEST(KrippendorffAlpha, Endpoints) {
  const std::vector<DetectedObject> a{obj({0, 0, 10, 10}, TsrClass::TableRow), obj({20, 0, 30, 10}, TsrClass::TableColumn)};
  const std::vector<DetectedObject> far{obj({100, 100, 110, 110}, TsrClass::TableRow)};
  EXPECT_DOUBLE_EQ(krippendorff_alpha(a, a, 0.5), 1.0);
  EXPECT_DOUBLE_EQ(krippendorff_alpha(a, far, 0.5), 0.0);
  EXPECT_DOUBLE_EQ(krippendorff_alpha({}, {}, 0.5), 1.0);
}

TEST(KrippendorffAlpha, PartialAgreementFixture) {
  // Units (row,row) (row,col) (col,col) (absent,row): alpha = 5/19.
  const std::vector<DetectedObject> a{obj({0, 0, 10, 10}, TsrClass::TableRow), obj({20, 0, 30, 10}, TsrClass::TableRow),
                                      obj({40, 0, 50, 10}, TsrClass::TableColumn)};
  const std::vector<DetectedObject> b{obj({0, 0, 10, 10}, TsrClass::TableRow), obj({20, 0, 30, 10}, TsrClass::TableColumn),
                                      obj({40, 0, 50, 10}, TsrClass::TableColumn), obj({60, 0, 70, 10}, TsrClass::TableRow)};
  EXPECT_NEAR(krippendorff_alpha(a, b, 0.5), 5.0 / 19.0, 1e-12);
  EXPECT_NEAR(oracle::reference_alpha({{1, 1}, {1, 2}, {2, 2}, {0, 1}}), 5.0 / 19.0, 1e-12);
}

TEST(KrippendorffAlpha, SymmetricInAnnotators) {
  Rng rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<DetectedObject> a, b;
    for (int i = 0; i < 4; ++i) {
      a.push_back(obj(oracle::random_grid_box(rng, 6), rng.chance(0.5) ? TsrClass::TableRow : TsrClass::TableColumn));
      b.push_back(obj(oracle::random_grid_box(rng, 6), rng.chance(0.5) ? TsrClass::TableRow : TsrClass::TableColumn));
    }
    const double x = krippendorff_alpha(a, b, 0.3);
    EXPECT_GE(x, 0.0);
    EXPECT_LE(x, 1.0);
    EXPECT_NEAR(x, krippendorff_alpha(b, a, 0.3), 1e-12);
  }
}

TEST(ClassifierF1, PerClassAndMacro) {
  const std::vector<TableCategory> truth{TableCategory::Credit, TableCategory::Credit, TableCategory::Debit,
                                         TableCategory::Debit};
  const std::vector<TableCategory> pred{TableCategory::Credit, TableCategory::Debit, TableCategory::Debit,
                                        TableCategory::Debit};
  const auto r = classifier_f1<TableCategory>(truth, pred);
  EXPECT_NEAR(r.per_class.at("Credit"), 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(r.per_class.at("Debit"), 0.8, 1e-12);
  EXPECT_NEAR(r.macro, (2.0 / 3.0 + 0.8) / 2, 1e-12);
  EXPECT_THROW(classifier_f1<TableCategory>(truth, std::vector<TableCategory>{}), std::invalid_argument);
}
