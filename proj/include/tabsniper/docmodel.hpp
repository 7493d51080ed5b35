#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tabsniper/box.hpp"
#include "tabsniper/detection.hpp"
#include "tabsniper/errors.hpp"
#include "tabsniper/taxonomy.hpp"

namespace tabsniper {

struct PageImage {
  int page_index = 0;
  int width = 0;
  int height = 0;
  std::optional<int> dpi;

  friend bool operator==(const PageImage&, const PageImage&) = default;
};

struct OcrWord {
  std::string text;
  Box box;
  int page = 0;
  std::optional<double> confidence;

  friend bool operator==(const OcrWord&, const OcrWord&) = default;
};

/// Statement balances in integer cents.
struct StatementSummary {
  std::optional<std::int64_t> opening_cents;
  std::optional<std::int64_t> closing_cents;
  std::string currency;

  friend bool operator==(const StatementSummary&, const StatementSummary&) = default;
};

struct StatementDocument {
  std::vector<PageImage> pages;
  std::vector<DetectedObject> tdc_objects;
  std::vector<DetectedObject> tsr_objects;
  std::vector<OcrWord> ocr;
  StatementSummary summary;

  const PageImage* page(int index) const {
    for (const auto& p : pages)
      if (p.page_index == index) return &p;
    return nullptr;
  }

  friend bool operator==(const StatementDocument&, const StatementDocument&) = default;
};

struct ParsedDocument {
  StatementDocument document;
  /// Non-fatal findings, e.g. unknown fields.
  std::vector<std::string> warnings;
};

namespace detail {

using nlohmann::json;

inline const std::set<std::string> kTopLevelKeys{"pages", "tdc", "tsr", "ocr", "summary"};
inline const std::set<std::string> kPageKeys{"index", "width", "height", "dpi"};
inline const std::set<std::string> kDetectionKeys{"page", "label", "score", "box"};
inline const std::set<std::string> kOcrKeys{"page", "text", "box", "confidence"};
inline const std::set<std::string> kSummaryKeys{"opening_cents", "closing_cents", "currency"};

inline void note_unknown(const json& obj, const std::set<std::string>& known,
                         const std::string& where, std::vector<std::string>& warnings) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!known.contains(it.key()))
      warnings.push_back("unknown field '" + it.key() + "' in " + where + " ignored");
}

inline const json& require(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key))
    throw ParseError(where + ": missing field '" + key + "'");
  return obj.at(key);
}

inline double number(const json& v, const std::string& where) {
  if (!v.is_number()) throw ParseError(where + ": expected a number");
  return v.get<double>();
}

inline int integer(const json& v, const std::string& where) {
  if (!v.is_number_integer()) throw ParseError(where + ": expected an integer");
  return v.get<int>();
}

inline std::string record_name(const char* array, std::size_t k) {
  return std::string(array) + " record " + std::to_string(k);
}

inline Box parse_box(const json& v, const std::string& where, std::size_t k) {
  if (!v.is_array() || v.size() != 4)
    throw ParseError(where + ": 'box' must be [x1,y1,x2,y2]");
  Box b{number(v[0], where), number(v[1], where), number(v[2], where), number(v[3], where)};
  if (b.x2 < b.x1) throw ParseError(where + ": x2 < x1 at record " + std::to_string(k));
  if (b.y2 < b.y1) throw ParseError(where + ": y2 < y1 at record " + std::to_string(k));
  return b;
}

inline std::vector<PageImage> parse_pages(const json& root, std::vector<std::string>& warnings) {
  const json& arr = require(root, "pages", "document");
  if (!arr.is_array()) throw ParseError("document: 'pages' must be an array");
  std::vector<PageImage> pages;
  for (std::size_t k = 0; k < arr.size(); ++k) {
    const auto where = record_name("pages", k);
    const json& rec = arr[k];
    if (!rec.is_object()) throw ParseError(where + ": expected an object");
    note_unknown(rec, kPageKeys, where, warnings);
    PageImage p;
    p.page_index = integer(require(rec, "index", where), where);
    p.width = integer(require(rec, "width", where), where);
    p.height = integer(require(rec, "height", where), where);
    if (p.width <= 0 || p.height <= 0)
      throw ParseError(where + ": page width and height must be positive");
    if (rec.contains("dpi") && !rec["dpi"].is_null()) {
      p.dpi = integer(rec["dpi"], where);
      if (*p.dpi <= 0) throw ParseError(where + ": dpi must be positive");
    }
    pages.push_back(p);
  }
  std::vector<int> idx;
  for (const auto& p : pages) idx.push_back(p.page_index);
  std::sort(idx.begin(), idx.end());
  for (std::size_t i = 0; i < idx.size(); ++i)
    if (idx[i] != static_cast<int>(i))
      throw ParseError("document: page indices must be unique and contiguous from 0");
  return pages;
}

inline const PageImage& require_page(const std::vector<PageImage>& pages, int index,
                                     const std::string& where) {
  for (const auto& p : pages)
    if (p.page_index == index) return p;
  throw ParseError(where + ": references missing page " + std::to_string(index));
}

inline std::vector<DetectedObject> parse_detection_array(const json& root, Taxonomy tax,
                                                         const std::vector<PageImage>& pages,
                                                         std::vector<std::string>& warnings) {
  const char* key = tax == Taxonomy::TDC ? "tdc" : "tsr";
  std::vector<DetectedObject> out;
  if (!root.contains(key)) return out;
  const json& arr = root.at(key);
  if (!arr.is_array()) throw ParseError(std::string("document: '") + key + "' must be an array");
  for (std::size_t k = 0; k < arr.size(); ++k) {
    const auto where = record_name(key, k);
    const json& rec = arr[k];
    if (!rec.is_object()) throw ParseError(where + ": expected an object");
    note_unknown(rec, kDetectionKeys, where, warnings);
    DetectedObject o;
    o.page = integer(require(rec, "page", where), where);
    const json& lab = require(rec, "label", where);
    if (!lab.is_string()) throw ParseError(where + ": 'label' must be a string");
    auto label = label_from_string(lab.get<std::string>(), tax);
    if (!label)
      throw ParseError(where + ": unknown label '" + lab.get<std::string>() + "' at record " +
                       std::to_string(k));
    o.label = *label;
    o.score = rec.contains("score") ? number(rec["score"], where) : 1.0;
    if (!(o.score >= 0.0 && o.score <= 1.0))
      throw ParseError(where + ": score outside [0,1] at record " + std::to_string(k));
    Box b = parse_box(require(rec, "box", where), where, k);
    const PageImage& page = require_page(pages, o.page, where);
    o.box = clamp_to(b, static_cast<double>(page.width), static_cast<double>(page.height));
    out.push_back(o);
  }
  return out;
}

inline std::vector<OcrWord> parse_ocr_array(const json& root, const std::vector<PageImage>& pages,
                                            std::vector<std::string>& warnings) {
  std::vector<OcrWord> out;
  if (!root.contains("ocr")) return out;
  const json& arr = root.at("ocr");
  if (!arr.is_array()) throw ParseError("document: 'ocr' must be an array");
  for (std::size_t k = 0; k < arr.size(); ++k) {
    const auto where = record_name("ocr", k);
    const json& rec = arr[k];
    if (!rec.is_object()) throw ParseError(where + ": expected an object");
    note_unknown(rec, kOcrKeys, where, warnings);
    OcrWord w;
    w.page = integer(require(rec, "page", where), where);
    const json& text = require(rec, "text", where);
    if (!text.is_string()) throw ParseError(where + ": 'text' must be a string");
    w.text = text.get<std::string>();
    if (w.text.find_first_not_of(" \t\r\n") == std::string::npos)
      throw ParseError(where + ": empty text at record " + std::to_string(k));
    Box b = parse_box(require(rec, "box", where), where, k);
    const PageImage& page = require_page(pages, w.page, where);
    w.box = clamp_to(b, static_cast<double>(page.width), static_cast<double>(page.height));
    if (rec.contains("confidence") && !rec["confidence"].is_null()) {
      const double c = number(rec["confidence"], where);
      if (!(c >= 0.0 && c <= 1.0))
        throw ParseError(where + ": confidence outside [0,1] at record " + std::to_string(k));
      w.confidence = c;
    }
    out.push_back(std::move(w));
  }
  return out;
}

inline StatementSummary parse_summary(const json& root, std::vector<std::string>& warnings) {
  StatementSummary s;
  if (!root.contains("summary") || root["summary"].is_null()) return s;
  const json& rec = root["summary"];
  if (!rec.is_object()) throw ParseError("summary: expected an object");
  note_unknown(rec, kSummaryKeys, "summary", warnings);
  auto cents = [&](const char* key) -> std::optional<std::int64_t> {
    if (!rec.contains(key) || rec[key].is_null()) return std::nullopt;
    if (!rec[key].is_number_integer())
      throw ParseError(std::string("summary: '") + key + "' must be an integer number of cents");
    return rec[key].get<std::int64_t>();
  };
  s.opening_cents = cents("opening_cents");
  s.closing_cents = cents("closing_cents");
  if (rec.contains("currency") && rec["currency"].is_string())
    s.currency = rec["currency"].get<std::string>();
  return s;
}

inline json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": malformed JSON: " + e.what());
  }
}

inline json box_json(const Box& b) { return json::array({b.x1, b.y1, b.x2, b.y2}); }

}  // namespace detail

/// Parse an ingestion document already loaded as JSON.
inline ParsedDocument parse_document_json(const nlohmann::json& root) {
  if (!root.is_object()) throw ParseError("document: top level must be an object");
  ParsedDocument out;
  auto& w = out.warnings;
  detail::note_unknown(root, detail::kTopLevelKeys, "document", w);
  auto& doc = out.document;
  doc.pages = detail::parse_pages(root, w);
  doc.tdc_objects = detail::parse_detection_array(root, Taxonomy::TDC, doc.pages, w);
  doc.tsr_objects = detail::parse_detection_array(root, Taxonomy::TSR, doc.pages, w);
  doc.ocr = detail::parse_ocr_array(root, doc.pages, w);
  doc.summary = detail::parse_summary(root, w);
  return out;
}

inline ParsedDocument parse_document_string(const std::string& text) {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
  return parse_document_json(root);
}

inline ParsedDocument parse_document(const std::filesystem::path& path) {
  return parse_document_json(detail::load_json_file(path));
}

/// Detections of one taxonomy from an ingestion file, in file order, clamped
/// to their page bounds.
inline std::vector<DetectedObject> parse_detections(const std::filesystem::path& path,
                                                    Taxonomy taxonomy) {
  const auto root = detail::load_json_file(path);
  std::vector<std::string> warnings;
  const auto pages = detail::parse_pages(root, warnings);
  return detail::parse_detection_array(root, taxonomy, pages, warnings);
}

inline std::vector<OcrWord> parse_ocr(const std::filesystem::path& path) {
  const auto root = detail::load_json_file(path);
  std::vector<std::string> warnings;
  const auto pages = detail::parse_pages(root, warnings);
  return detail::parse_ocr_array(root, pages, warnings);
}

inline nlohmann::json to_json(const StatementDocument& doc) {
  using nlohmann::json;
  json root = json::object();
  json pages = json::array();
  for (const auto& p : doc.pages) {
    json j = {{"index", p.page_index}, {"width", p.width}, {"height", p.height}};
    if (p.dpi) j["dpi"] = *p.dpi;
    pages.push_back(std::move(j));
  }
  root["pages"] = std::move(pages);
  auto detections = [](const std::vector<DetectedObject>& objs) {
    json arr = json::array();
    for (const auto& o : objs)
      arr.push_back({{"page", o.page},
                     {"label", label_name(o.label)},
                     {"score", o.score},
                     {"box", detail::box_json(o.box)}});
    return arr;
  };
  root["tdc"] = detections(doc.tdc_objects);
  root["tsr"] = detections(doc.tsr_objects);
  json ocr = json::array();
  for (const auto& w : doc.ocr) {
    json j = {{"page", w.page}, {"text", w.text}, {"box", detail::box_json(w.box)}};
    if (w.confidence) j["confidence"] = *w.confidence;
    ocr.push_back(std::move(j));
  }
  root["ocr"] = std::move(ocr);
  json summary = json::object();
  if (doc.summary.opening_cents) summary["opening_cents"] = *doc.summary.opening_cents;
  if (doc.summary.closing_cents) summary["closing_cents"] = *doc.summary.closing_cents;
  summary["currency"] = doc.summary.currency;
  root["summary"] = std::move(summary);
  return root;
}

inline std::string serialize_document(const StatementDocument& doc) {
  return to_json(doc).dump(1) + "\n";
}

/// Non-fatal consistency findings. Never mutates the document.
inline std::vector<std::string> validate_document(const StatementDocument& doc) {
  std::vector<std::string> warnings;

  if (!doc.summary.opening_cents || !doc.summary.closing_cents)
    warnings.push_back("summary balances missing; spreading will refuse this document");

  std::map<int, std::size_t> words_per_page;
  for (const auto& w : doc.ocr) ++words_per_page[w.page];

  std::set<int> pages_with_tables;
  for (std::size_t k = 0; k < doc.tdc_objects.size(); ++k) {
    const auto& t = doc.tdc_objects[k];
    const auto* cat = std::get_if<TableCategory>(&t.label);
    if (!cat || !is_table_category(*cat)) continue;
    pages_with_tables.insert(t.page);
    const bool has_row = std::any_of(doc.tsr_objects.begin(), doc.tsr_objects.end(),
                                     [&](const DetectedObject& r) {
                                       return r.page == t.page &&
                                              has_label(r, TsrClass::TableRow) &&
                                              intersection_area(r.box, t.box) > 0;
                                     });
    if (!has_row)
      warnings.push_back("tdc record " + std::to_string(k) + ": table (" +
                         std::string(to_string(*cat)) + ", page " + std::to_string(t.page) +
                         ") has no overlapping table rows");
  }
  for (int p : pages_with_tables)
    if (words_per_page[p] == 0)
      warnings.push_back("page " + std::to_string(p) + " has tables but no OCR words");

  auto duplicates = [&](const std::vector<DetectedObject>& objs, const char* name) {
    for (std::size_t i = 0; i < objs.size(); ++i)
      for (std::size_t j = 0; j < i; ++j)
        if (objs[i] == objs[j]) {
          warnings.push_back(std::string(name) + " record " + std::to_string(i) +
                             " duplicates record " + std::to_string(j));
          break;
        }
  };
  duplicates(doc.tdc_objects, "tdc");
  duplicates(doc.tsr_objects, "tsr");
  return warnings;
}

}  // namespace tabsniper
