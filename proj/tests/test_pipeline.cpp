#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "tabsniper/errors.hpp"
#include "tabsniper/pipeline.hpp"
#include "tabsniper/synthgen.hpp"

using namespace tabsniper;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// Compare everything the pipeline is expected to recover; the printed date
// text is not stored in expected.csv.
void expect_same(const std::vector<Transaction>& got, const std::vector<Transaction>& want) {
  ASSERT_EQ(got.size(), want.size());
  for (std::size_t i = 0; i < got.size(); ++i) {
    auto g = got[i];
    g.date_text = want[i].date_text;
    EXPECT_EQ(g, want[i]) << "transaction " << i << ": " << got[i].description << " vs " << want[i].description;
  }
}

}  // namespace

TEST(SynthGen, DeterministicBytes) {
  GenConfig cfg;
  cfg.seed = 5;
  cfg.pages = 3;
  const auto a = generate_statement(cfg), b = generate_statement(cfg);
  EXPECT_EQ(serialize_document(a.document), serialize_document(b.document));
  EXPECT_EQ(a.expected, b.expected);
}

TEST(SynthGen, BalancesCloseTheChecksum) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    GenConfig cfg;
    cfg.seed = seed;
    cfg.pages = 2;
    const auto s = generate_statement(cfg);
    EXPECT_EQ(compute_checksum(s.expected, *s.document.summary.opening_cents, *s.document.summary.closing_cents), 0);
  }
}

TEST(SynthGen, AmountOnlyTablesCarrySigns) {
  GenConfig cfg;
  cfg.seed = 3;
  cfg.pages = 2;
  cfg.categories = {TableCategory::TxnAmtBal};
  cfg.long_table_prob = 0;
  const auto s = generate_statement(cfg);
  const auto r = run_pipeline(s.ground_truth);
  ASSERT_EQ(r.transactions.size(), s.expected.size());
  for (const auto& t : r.transactions) {
    const auto& cell = r.tables.at(t.provenance.table).grid.text(t.provenance.row, 2);
    ASSERT_FALSE(cell.empty());
    const bool sign = cell.front() == '+' || cell.front() == '-' || cell.front() == '(' || cell.back() == '-';
    EXPECT_TRUE(sign) << cell;
  }
}

TEST(SynthGen, JitterLeavesGroundTruthClean) {
  GenConfig cfg;
  cfg.seed = 1;
  cfg.jitter_px = 2;
  const auto s = generate_statement(cfg);
  ASSERT_EQ(s.document.tsr_objects.size(), s.ground_truth.tsr_objects.size());
  double max_shift = 0;
  bool moved = false;
  for (std::size_t i = 0; i < s.document.tsr_objects.size(); ++i) {
    const auto &a = s.document.tsr_objects[i].box, &b = s.ground_truth.tsr_objects[i].box;
    for (double d : {a.x1 - b.x1, a.y1 - b.y1, a.x2 - b.x2, a.y2 - b.y2}) {
      max_shift = std::max(max_shift, std::abs(d));
      moved = moved || d != 0;
    }
  }
  EXPECT_TRUE(moved);
  EXPECT_LE(max_shift, 2.0 + 1e-9);
  EXPECT_EQ(s.document.ocr, s.ground_truth.ocr);
}

TEST(SynthGen, RejectsImpossibleConfigs) {
  GenConfig none;
  none.categories.clear();
  EXPECT_THROW(generate_statement(none), std::invalid_argument);
  GenConfig pages;
  pages.pages = 0;
  EXPECT_THROW(generate_statement(pages), std::invalid_argument);
  GenConfig caption;
  caption.categories = {TableCategory::TableCaption};
  EXPECT_THROW(generate_statement(caption), std::invalid_argument);
}

TEST(SynthGen, WritesFiles) {
  const auto dir = fs::temp_directory_path() / "tabsniper_gen_test";
  GenConfig cfg;
  const auto s = generate_statement(cfg);
  write_statement(s, dir);
  EXPECT_EQ(parse_document(dir / "document.json").document, s.document);
  std::ifstream in(dir / "expected.csv");
  const auto back = read_transactions_csv(in);
  ASSERT_EQ(back.size(), s.expected.size());
  fs::remove_all(dir);
}

TEST(Pipeline, RecoversGeneratedStatements) {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    GenConfig cfg;
    cfg.seed = seed;
    cfg.pages = 2;
    const auto s = generate_statement(cfg);
    PipelineConfig pc;
    pc.statement_year = cfg.year;
    const auto r = run_pipeline(s.document, pc);
    EXPECT_TRUE(r.balanced()) << "seed " << seed;
    expect_same(r.transactions, s.expected);
  }
}

TEST(Pipeline, MissingSummaryNamesField) {
  GenConfig cfg;
  auto doc = generate_statement(cfg).document;
  doc.summary.closing_cents.reset();
  try {
    run_pipeline(doc);
    FAIL();
  } catch (const PipelineError& e) {
    EXPECT_NE(std::string(e.what()).find("summary.closing_cents"), std::string::npos);
  }
}

TEST(Pipeline, UnbalancedWhenRowsAreLost) {
  GenConfig cfg;
  cfg.seed = 2;
  auto doc = generate_statement(cfg).document;
  *doc.summary.closing_cents += 1;
  EXPECT_EQ(run_pipeline(doc, {}).checksum_cents, -1);
}

TEST(Pipeline, TableWithoutColumnsIsReportedNotFatal) {
  GenConfig cfg;
  cfg.seed = 4;
  auto doc = generate_statement(cfg).document;
  std::erase_if(doc.tsr_objects, [](const DetectedObject& o) { return has_label(o, TsrClass::TableColumn); });
  const auto r = run_pipeline(doc, {});
  EXPECT_TRUE(r.tables.empty());
  EXPECT_FALSE(r.warnings.empty());
  EXPECT_TRUE(std::all_of(r.traces.begin(), r.traces.end(), [](const TableTrace& t) { return t.error.has_value(); }));
}

TEST(Pipeline, OutputsAreDeterministic) {
  GenConfig cfg;
  cfg.seed = 7;
  cfg.pages = 2;
  const auto doc = generate_statement(cfg).document;
  const auto a = fs::temp_directory_path() / "tabsniper_det_a";
  const auto b = fs::temp_directory_path() / "tabsniper_det_b";
  write_pipeline_outputs(run_pipeline(doc), a, true);
  write_pipeline_outputs(run_pipeline(doc), b, true);
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    EXPECT_EQ(slurp(e.path()), slurp(b / e.path().filename())) << e.path();
    ++files;
  }
  EXPECT_GE(files, 3u);
  EXPECT_NE(slurp(a / "table_0.svg").find("<svg"), std::string::npos);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Pipeline, ThresholdOverrides) {
  const auto path = fs::temp_directory_path() / "tabsniper_thresholds.json";
  std::ofstream(path) << R"({"nms_iou": 0.4, "max_queries": 50})";
  const auto th = load_thresholds(path);
  EXPECT_DOUBLE_EQ(th.nms_iou, 0.4);
  EXPECT_EQ(th.max_queries, 50u);
  std::ofstream(path) << R"({"nmsiou": 0.4})";
  EXPECT_THROW(load_thresholds(path), ParseError);
  fs::remove(path);
}
