#include <gtest/gtest.h>

#include <cmath>

#include "tabsniper/random.hpp"
#include "tabsniper/tdc_refine.hpp"

using namespace tabsniper;

namespace {

DetectedObject tdc(Box b, TableCategory c, int page = 0) { return {b, c, 0.9, page}; }

}  // namespace

TEST(CaptionMapping, NearestTopEdgeWithTieOnLeftEdge) {
  const std::vector<DetectedObject> tables{tdc({100, 200, 500, 400}, TableCategory::Check),
                                           tdc({600, 200, 900, 400}, TableCategory::Check),
                                           tdc({100, 600, 500, 800}, TableCategory::Other)};
  const std::vector<DetectedObject> captions{tdc({600, 170, 700, 190}, TableCategory::TableCaption),
                                             tdc({100, 170, 200, 190}, TableCategory::TableCaption),
                                             tdc({100, 570, 200, 590}, TableCategory::TableCaption),
                                             tdc({100, 570, 200, 590}, TableCategory::TableCaption, 1)};
  const auto m = map_captions_to_tables(captions, tables);
  EXPECT_EQ(m[0], 1u);
  EXPECT_EQ(m[1], 0u);
  EXPECT_EQ(m[2], 2u);
  EXPECT_FALSE(m[3].has_value());
}

TEST(CaptionMapping, AgreesWithExhaustiveSearch) {
  Rng rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<DetectedObject> tables, captions;
    for (int i = 0; i < 4; ++i) {
      const double x = static_cast<double>(rng.uniform_int(0, 5)) * 100, y = static_cast<double>(rng.uniform_int(0, 5)) * 100;
      tables.push_back(tdc({x, y, x + 80, y + 80}, TableCategory::Other));
    }
    for (int i = 0; i < 3; ++i) {
      const double x = static_cast<double>(rng.uniform_int(0, 5)) * 100, y = static_cast<double>(rng.uniform_int(0, 5)) * 100;
      captions.push_back(tdc({x, y, x + 50, y + 10}, TableCategory::TableCaption));
    }
    const auto m = map_captions_to_tables(captions, tables);
    for (std::size_t c = 0; c < captions.size(); ++c) {
      // Smallest (|dy|, |dx|, index) over all tables.
      std::size_t best = 0;
      for (std::size_t t = 1; t < tables.size(); ++t) {
        auto key = [&](std::size_t k) {
          return std::make_tuple(std::abs(captions[c].box.y1 - tables[k].box.y1),
                                 std::abs(captions[c].box.x1 - tables[k].box.x1), k);
        };
        if (key(t) < key(best)) best = t;
      }
      EXPECT_EQ(m[c], best);
    }
  }
}

TEST(HeaderMapping, RequiresContainment) {
  const std::vector<DetectedObject> tables{tdc({0, 0, 100, 100}, TableCategory::Check)};
  const std::vector<DetectedObject> headers{tdc({0, 0, 100, 20}, TableCategory::TableHeader),
                                            tdc({50, 90, 150, 110}, TableCategory::TableHeader)};
  const auto m = map_headers_to_tables(headers, tables);
  EXPECT_EQ(m[0], 0u);
  EXPECT_FALSE(m[1].has_value());
}

TEST(RefineCategory, CreditDebitFollowsText) {
  const auto& models = default_nb_models();
  const auto header = RegionText::from_raw({}, "Date Description Amount");
  EXPECT_EQ(refine_category(TableCategory::CreditDebit, RegionText::from_raw({}, "Deposits and Additions"), header, models)
                .category,
            TableCategory::Credit);
  const auto debit = refine_category(TableCategory::CreditDebit, RegionText::from_raw({}, "Withdrawals Purchases"),
                                     header, models);
  EXPECT_EQ(debit.category, TableCategory::Debit);
  EXPECT_EQ(debit.model_used, NbVariant::HeaderCaption);
}

TEST(RefineCategory, CreditDebitWithoutTextDefaultsToDebit) {
  const auto r = refine_category(TableCategory::CreditDebit, std::nullopt, std::nullopt, default_nb_models());
  EXPECT_EQ(r.category, TableCategory::Debit);
  EXPECT_FALSE(r.text_prediction.has_value());
}

TEST(RefineCategory, ModelChoiceFollowsAvailableText) {
  const auto& models = default_nb_models();
  const auto cap = RegionText::from_raw({}, "Checks Paid");
  EXPECT_EQ(refine_category(TableCategory::Check, cap, std::nullopt, models).model_used, NbVariant::Caption);
  EXPECT_EQ(refine_category(TableCategory::Check, std::nullopt, RegionText::from_raw({}, "Check No Date Amount"), models)
                .model_used,
            NbVariant::Header);
}

TEST(RefineCategory, VisionKeepsNonMergedCategories) {
  // Text that reads like credits does not override a Check table.
  const auto r = refine_category(TableCategory::Check, RegionText::from_raw({}, "Deposits Credits Payroll"),
                                 std::nullopt, default_nb_models());
  EXPECT_EQ(r.category, TableCategory::Check);
  EXPECT_EQ(r.text_prediction, TableCategory::Credit);
}

TEST(RefineCategory, ServiceFeeOtherBecomesDebit) {
  const auto& models = default_nb_models();
  EXPECT_EQ(refine_category(TableCategory::Other, RegionText::from_raw({}, "Monthly Service Fees"), std::nullopt, models)
                .category,
            TableCategory::Debit);
  EXPECT_EQ(refine_category(TableCategory::Other, RegionText::from_raw({}, "Account Summary"), std::nullopt, models)
                .category,
            TableCategory::Other);
}
