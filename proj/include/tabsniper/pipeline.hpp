#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tabsniper/docmodel.hpp"
#include "tabsniper/errors.hpp"
#include "tabsniper/report.hpp"
#include "tabsniper/spreading.hpp"
#include "tabsniper/tdc_refine.hpp"
#include "tabsniper/text_corpus.hpp"
#include "tabsniper/tsr_post.hpp"

namespace tabsniper {

struct PipelineConfig {
  NbModels models = default_nb_models();
  SynonymTable synonyms = default_synonyms();
  TsrThresholds thresholds;
  std::optional<int> statement_year;
  double table_nms_iou = 0.5;
  double table_match_iou = 0.5;     ///< TSR table box replaces the TDC box at this IoU
  double member_containment = 0.5;  ///< TSR object belongs to a table at this containment
};

/// Per-table record of what the pipeline decided.
struct TableTrace {
  int page = 0;
  Box box;
  TableCategory vision = TableCategory::Other;
  RefinedCategory refined{TableCategory::Other, std::nullopt, std::nullopt};
  std::string caption;
  std::string header;
  std::size_t tsr_objects = 0;
  std::optional<std::string> error;
};

struct PipelineResult {
  std::vector<SpreadTable> tables;  ///< spreadable tables in document order
  std::vector<TableTrace> traces;   ///< every detected table in document order
  std::vector<Transaction> transactions;
  std::vector<DiscardEntry> discards;
  std::int64_t checksum_cents = 0;
  std::vector<std::string> warnings;

  bool balanced() const { return checksum_cents == 0; }
};

/// Overrides from a JSON object whose keys are TsrThresholds field names.
inline TsrThresholds load_thresholds(const std::filesystem::path& path, TsrThresholds th = {}) {
  const auto j = detail::load_json_file(path);
  if (!j.is_object()) throw ParseError(path.string() + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const auto& k = it.key();
    if (!it.value().is_number()) throw ParseError(path.string() + ": '" + k + "' must be a number");
    const double v = it.value().get<double>();
    if (k == "nms_iou") th.nms_iou = v;
    else if (k == "missing_row_iou") th.missing_row_iou = v;
    else if (k == "gap_factor") th.gap_factor = v;
    else if (k == "cluster_gap_factor") th.cluster_gap_factor = v;
    else if (k == "split_margin_px") th.split_margin_px = v;
    else if (k == "max_rows_per_part") th.max_rows_per_part = static_cast<std::size_t>(v);
    else if (k == "merge_column_iou") th.merge_column_iou = v;
    else if (k == "role_overlap_iou") th.role_overlap_iou = v;
    else if (k == "max_queries") th.max_queries = static_cast<std::size_t>(v);
    else throw ParseError(path.string() + ": unknown threshold '" + k + "'");
  }
  return th;
}

namespace detail {

inline bool is_table_detection(const DetectedObject& o) {
  const auto* c = std::get_if<TableCategory>(&o.label);
  return c && is_table_category(*c) && *c != TableCategory::CheckImage;
}

inline bool document_order(const DetectedObject& a, const DetectedObject& b) {
  return std::tie(a.page, a.box.y1, a.box.x1) < std::tie(b.page, b.box.y1, b.box.x1);
}

}  // namespace detail

/// Detected tables → categorized transactions and the balance checksum.
/// Throws PipelineError when the summary balances are missing.
inline PipelineResult run_pipeline(const StatementDocument& doc, const PipelineConfig& cfg = {}) {
  if (!doc.summary.opening_cents) throw PipelineError("missing field summary.opening_cents");
  if (!doc.summary.closing_cents) throw PipelineError("missing field summary.closing_cents");

  PipelineResult res;
  std::vector<DetectedObject> tables, captions, headers;
  for (const auto& o : doc.tdc_objects) {
    if (detail::is_table_detection(o)) tables.push_back(o);
    else if (has_label(o, TableCategory::TableCaption)) captions.push_back(o);
    else if (has_label(o, TableCategory::TableHeader)) headers.push_back(o);
  }
  tables = nms(tables, cfg.table_nms_iou);
  std::stable_sort(tables.begin(), tables.end(), detail::document_order);

  const auto caption_map = map_captions_to_tables(captions, tables);
  const auto header_map = map_headers_to_tables(headers, tables);

  // Table box per detection: the best matching TSR table box, else the TDC box.
  std::vector<Box> boxes;
  for (const auto& t : tables) {
    Box box = t.box;
    double best = cfg.table_match_iou;
    for (const auto& o : doc.tsr_objects) {
      if (o.page != t.page || !has_label(o, TsrClass::Table)) continue;
      const double v = iou(o.box, t.box);
      if (v >= best) {
        best = v;
        box = o.box;
      }
    }
    boxes.push_back(box);
  }

  // Each structure object joins the table that contains most of it.
  std::vector<std::vector<DetectedObject>> members(tables.size());
  for (const auto& o : doc.tsr_objects) {
    if (has_label(o, TsrClass::Table)) continue;
    std::optional<std::size_t> owner;
    double best = cfg.member_containment;
    for (std::size_t t = 0; t < tables.size(); ++t) {
      if (tables[t].page != o.page) continue;
      const double c = containment(o.box, boxes[t]);
      if (c >= best && (!owner || c > best)) {
        best = c;
        owner = t;
      }
    }
    if (owner) members[*owner].push_back(o);
  }

  for (std::size_t t = 0; t < tables.size(); ++t) {
    const auto& det = tables[t];
    TableTrace trace;
    trace.page = det.page;
    trace.box = boxes[t];
    trace.vision = std::get<TableCategory>(det.label);
    trace.tsr_objects = members[t].size();

    // Closest caption, all headers.
    std::optional<RegionText> caption, header;
    std::optional<double> caption_dy;
    for (std::size_t i = 0; i < captions.size(); ++i) {
      if (caption_map[i] != t) continue;
      const double dy = std::abs(captions[i].box.y1 - det.box.y1);
      if (caption_dy && dy >= *caption_dy) continue;
      caption_dy = dy;
      caption = extract_region_text(captions[i].box, doc.ocr, det.page);
    }
    for (std::size_t i = 0; i < headers.size(); ++i) {
      if (header_map[i] != t) continue;
      auto text = extract_region_text(headers[i].box, doc.ocr, det.page);
      header = header ? concat(*header, text) : text;
    }
    trace.caption = caption ? caption->raw : "";
    trace.header = header ? header->raw : "";
    trace.refined = refine_category(trace.vision, caption, header, cfg.models);

    if (members[t].size() > cfg.thresholds.max_queries)
      res.warnings.push_back("table on page " + std::to_string(det.page) + " has " +
                             std::to_string(members[t].size()) + " structure objects, above the query budget of " +
                             std::to_string(cfg.thresholds.max_queries));

    try {
      std::vector<Box> separators;
      const auto cols = filter_label(std::span<const DetectedObject>(members[t]), TsrClass::TableColumn);
      if (!cols.empty()) {
        const auto key = std::min_element(cols.begin(), cols.end(), [](const auto& a, const auto& b) {
          return a.box.x1 < b.box.x1;
        });
        separators = infer_row_separators(boxes[t], doc.ocr, det.page, key->box, cfg.thresholds);
      }
      const auto structure = refine_structure(members[t], separators, boxes[t], cfg.thresholds);
      auto grid = assign_text(build_grid(structure), doc.ocr, det.page);
      res.tables.push_back({det.page, boxes[t], std::move(grid), trace.refined.category});
    } catch (const PipelineError& e) {
      trace.error = e.what();
      res.warnings.push_back("table on page " + std::to_string(det.page) + " skipped: " + e.what());
    }
    res.traces.push_back(std::move(trace));
  }

  res.tables = order_tables(std::move(res.tables));
  auto extracted = extract_transactions(res.tables, {cfg.statement_year, cfg.synonyms});
  res.transactions = std::move(extracted.transactions);
  res.discards = std::move(extracted.discards);
  res.checksum_cents = compute_checksum(res.transactions, *doc.summary.opening_cents, *doc.summary.closing_cents);
  return res;
}

// ---------------------------------------------------------------------------
// Output

inline nlohmann::json grid_json(const TableGrid& g) {
  auto box = [](const Box& b) { return nlohmann::json::array({b.x1, b.y1, b.x2, b.y2}); };
  nlohmann::json j;
  j["table"] = box(g.table);
  j["rows"] = nlohmann::json::array();
  for (std::size_t r = 0; r < g.row_count(); ++r)
    j["rows"].push_back({{"box", box(g.rows[r])}, {"header", static_cast<bool>(g.header[r])},
                         {"spanning", static_cast<bool>(g.spanning[r])}});
  j["columns"] = nlohmann::json::array();
  for (const auto& c : g.columns) j["columns"].push_back(box(c));
  j["cells"] = nlohmann::json::array();
  for (const auto& row : g.cells) {
    auto texts = nlohmann::json::array();
    for (const auto& c : row) texts.push_back(c.text);
    j["cells"].push_back(texts);
  }
  j["unassigned"] = nlohmann::json::array();
  for (const auto& w : g.unassigned) j["unassigned"].push_back(w.text);
  return j;
}

inline std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

/// Table structure as an SVG in page coordinates, cropped to the table.
inline std::string render_grid_svg(const TableGrid& g) {
  const auto& t = g.table;
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << t.x1 << ' ' << t.y1 << ' ' << t.width() << ' '
     << t.height() << "\" width=\"" << t.width() << "\" height=\"" << t.height() << "\">\n";
  os << "<rect x=\"" << t.x1 << "\" y=\"" << t.y1 << "\" width=\"" << t.width() << "\" height=\"" << t.height()
     << "\" fill=\"white\" stroke=\"black\"/>\n";
  for (std::size_t r = 0; r < g.row_count(); ++r) {
    const auto& b = g.rows[r];
    const char* fill = g.header[r] ? "#dde8ff" : (g.spanning[r] ? "#fff2cc" : "none");
    os << "<rect x=\"" << b.x1 << "\" y=\"" << b.y1 << "\" width=\"" << b.width() << "\" height=\"" << b.height()
       << "\" fill=\"" << fill << "\" stroke=\"#3366cc\" stroke-width=\"0.5\"/>\n";
  }
  for (const auto& c : g.columns)
    os << "<line x1=\"" << c.x1 << "\" y1=\"" << t.y1 << "\" x2=\"" << c.x1 << "\" y2=\"" << t.y2
       << "\" stroke=\"#cc3333\" stroke-width=\"0.5\"/>\n";
  for (const auto& row : g.cells)
    for (const auto& cell : row)
      for (const auto& w : cell.words)
        os << "<text x=\"" << w.box.x1 << "\" y=\"" << w.box.y2 << "\" font-family=\"monospace\" font-size=\""
           << w.box.height() << "\">" << xml_escape(w.text) << "</text>\n";
  os << "</svg>\n";
  return os.str();
}

inline nlohmann::json trace_json(const TableTrace& t) {
  nlohmann::json j{{"page", t.page},
                   {"box", nlohmann::json::array({t.box.x1, t.box.y1, t.box.x2, t.box.y2})},
                   {"vision_category", std::string(to_string(t.vision))},
                   {"category", std::string(to_string(t.refined.category))},
                   {"caption", t.caption},
                   {"header", t.header},
                   {"tsr_objects", t.tsr_objects}};
  j["text_prediction"] =
      t.refined.text_prediction ? nlohmann::json(std::string(to_string(*t.refined.text_prediction))) : nullptr;
  j["error"] = t.error ? nlohmann::json(*t.error) : nullptr;
  return j;
}

/// transactions.csv, report.json and, when `render`, one SVG + grid JSON per table.
inline void write_pipeline_outputs(const PipelineResult& r, const std::filesystem::path& dir, bool render = false) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "transactions.csv", std::ios::binary);
    write_transactions_csv(out, r.transactions);
  }
  auto report = spread_report_json(r.transactions, r.discards, r.checksum_cents);
  report["tables"] = nlohmann::json::array();
  for (const auto& t : r.traces) report["tables"].push_back(trace_json(t));
  report["warnings"] = r.warnings;
  {
    std::ofstream out(dir / "report.json", std::ios::binary);
    out << report.dump(1) << "\n";
  }
  if (!render) return;
  for (std::size_t i = 0; i < r.tables.size(); ++i) {
    const auto stem = "table_" + std::to_string(i);
    std::ofstream svg(dir / (stem + ".svg"), std::ios::binary);
    svg << render_grid_svg(r.tables[i].grid);
    std::ofstream js(dir / (stem + ".json"), std::ios::binary);
    js << grid_json(r.tables[i].grid).dump(1) << "\n";
  }
}

}  // namespace tabsniper
