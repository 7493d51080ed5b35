#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tabsniper/box.hpp"
#include "tabsniper/detection.hpp"
#include "tabsniper/docmodel.hpp"
#include "tabsniper/errors.hpp"
#include "tabsniper/text.hpp"

namespace tabsniper {

/// Tunables of the structure post-processing heuristics.
struct TsrThresholds {
  double nms_iou = 0.5;
  double missing_row_iou = 0.25;     ///< separator counts as covered at this IoU
  double gap_factor = 1.5;           ///< uncovered span > factor·median becomes a row/column
  double cluster_gap_factor = 0.6;   ///< date-word clustering gap, × median word height
  double split_margin_px = 10.0;
  std::size_t max_rows_per_part = 20;
  double merge_column_iou = 0.7;     ///< 1-D x IoU for joining column pieces across parts
  double role_overlap_iou = 0.5;     ///< header / spanning row assignment
  std::size_t max_queries = 125;
};

// ---------------------------------------------------------------------------
// Long-table split and re-merge

/// Horizontal partition of a long table into overlapping sub-images.
struct SplitPlan {
  Box table;
  std::vector<Box> parts;
  /// Crop origin of each part; part-local = page - origin.
  std::vector<std::pair<double, double>> origins;
  /// Indices into the row candidates that fall in each part.
  std::vector<std::vector<std::size_t>> part_rows;

  bool identity() const { return parts.size() == 1; }
};

namespace detail {

inline void split_rows(const std::vector<std::pair<Box, std::size_t>>& rows, std::size_t lo, std::size_t hi,
                       double top, double bottom, std::size_t max_rows,
                       std::vector<std::tuple<double, double, std::vector<std::size_t>>>& out) {
  if (hi - lo <= max_rows) {
    std::vector<std::size_t> idx;
    for (std::size_t i = lo; i < hi; ++i) idx.push_back(rows[i].second);
    out.emplace_back(top, bottom, std::move(idx));
    return;
  }
  const double mid = (rows[lo].first.y1 + rows[hi - 1].first.y2) / 2;
  std::size_t best = lo;
  double best_d = 0, best_line = 0;
  for (std::size_t k = lo; k + 1 < hi; ++k) {
    const double line = (rows[k].first.y2 + rows[k + 1].first.y1) / 2;
    const double d = std::abs(line - mid);
    if (k == lo || d < best_d) {
      best = k;
      best_d = d;
      best_line = line;
    }
  }
  split_rows(rows, lo, best + 1, top, best_line, max_rows, out);
  split_rows(rows, best + 1, hi, best_line, bottom, max_rows, out);
}

}  // namespace detail

/// Tables with more than `max_rows_per_part` row candidates are cut
/// recursively at the row gap closest to the vertical middle of the rows, each
/// part extended by the overlap margin. Part crops sit on whole pixels.
inline SplitPlan split_long_table(const Box& table, std::span<const Box> row_candidates,
                                  const TsrThresholds& th = {}) {
  SplitPlan plan;
  plan.table = table;
  std::vector<std::pair<Box, std::size_t>> rows;
  for (std::size_t i = 0; i < row_candidates.size(); ++i) rows.emplace_back(row_candidates[i], i);
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return a.first.y1 < b.first.y1;
  });

  std::vector<std::tuple<double, double, std::vector<std::size_t>>> spans;
  if (rows.size() <= th.max_rows_per_part) {
    std::vector<std::size_t> all;
    for (const auto& r : rows) all.push_back(r.second);
    spans.emplace_back(table.y1, table.y2, std::move(all));
  } else {
    detail::split_rows(rows, 0, rows.size(), table.y1, table.y2, th.max_rows_per_part, spans);
  }

  const bool single = spans.size() == 1;
  for (auto& [top, bottom, idx] : spans) {
    Box part = table;
    if (!single) {
      part.y1 = std::max(table.y1, std::floor(top == table.y1 ? top : top - th.split_margin_px));
      part.y2 = std::min(table.y2, std::ceil(bottom == table.y2 ? bottom : bottom + th.split_margin_px));
    }
    plan.parts.push_back(part);
    plan.origins.emplace_back(std::floor(part.x1), std::floor(part.y1));
    plan.part_rows.push_back(std::move(idx));
  }
  return plan;
}

namespace detail {

inline bool row_like(const DetectedObject& o) {
  return has_label(o, TsrClass::TableRow) || has_label(o, TsrClass::TableColumnHeader) ||
         has_label(o, TsrClass::TableSpanningRow);
}

}  // namespace detail

/// Emulates detection on the sub-images of `plan`: rows, headers and spanning
/// rows appear in every part that wholly contains them vertically (or, failing
/// that, the part holding their center); tables and columns are clipped to
/// each part. Output boxes are in part-local coordinates.
inline std::vector<std::vector<DetectedObject>> slice_detections(const SplitPlan& plan,
                                                                 std::span<const DetectedObject> detections) {
  std::vector<std::vector<DetectedObject>> out(plan.parts.size());
  auto to_local = [&](DetectedObject o, std::size_t p) {
    o.box = translate(o.box, -plan.origins[p].first, -plan.origins[p].second);
    return o;
  };
  if (plan.identity()) {
    for (const auto& o : detections) out[0].push_back(to_local(o, 0));
    return out;
  }
  for (const auto& o : detections) {
    if (detail::row_like(o)) {
      bool placed = false;
      for (std::size_t p = 0; p < plan.parts.size(); ++p) {
        const auto& part = plan.parts[p];
        if (o.box.y1 >= part.y1 && o.box.y2 <= part.y2) {
          out[p].push_back(to_local(o, p));
          placed = true;
        }
      }
      if (!placed) {
        for (std::size_t p = 0; p < plan.parts.size(); ++p) {
          if (plan.parts[p].contains_point(plan.parts[p].cx(), o.box.cy())) {
            DetectedObject c = o;
            c.box = intersect(o.box, Box{o.box.x1, plan.parts[p].y1, o.box.x2, plan.parts[p].y2});
            out[p].push_back(to_local(c, p));
            break;
          }
        }
      }
    } else {
      for (std::size_t p = 0; p < plan.parts.size(); ++p) {
        const auto& part = plan.parts[p];
        Box clipped{o.box.x1, std::max(o.box.y1, part.y1), o.box.x2, std::min(o.box.y2, part.y2)};
        if (clipped.y2 > clipped.y1) {
          DetectedObject c = o;
          c.box = clipped;
          out[p].push_back(to_local(c, p));
        }
      }
    }
  }
  return out;
}

/// Re-assemble per-part detections in page coordinates. Row-like duplicates
/// from the overlap margins are removed by NMS; table and column pieces whose
/// x-extents agree are joined into one box.
inline std::vector<DetectedObject> merge_split_outputs(const SplitPlan& plan,
                                                       const std::vector<std::vector<DetectedObject>>& per_part,
                                                       const TsrThresholds& th = {}) {
  if (per_part.size() != plan.parts.size())
    throw PipelineError("merge_split_outputs: expected " + std::to_string(plan.parts.size()) +
                        " part outputs, got " + std::to_string(per_part.size()));
  std::vector<DetectedObject> rows;
  std::vector<DetectedObject> spans;
  std::vector<std::size_t> last_part;
  for (std::size_t p = 0; p < per_part.size(); ++p) {
    for (auto o : per_part[p]) {
      o.box = translate(o.box, plan.origins[p].first, plan.origins[p].second);
      if (plan.identity() || detail::row_like(o)) {
        rows.push_back(o);
        continue;
      }
      std::optional<std::size_t> best;
      double best_iou = th.merge_column_iou;
      for (std::size_t k = 0; k < spans.size(); ++k) {
        if (last_part[k] == p || spans[k].label != o.label || spans[k].page != o.page) continue;
        const double v = interval_iou(spans[k].box.x1, spans[k].box.x2, o.box.x1, o.box.x2);
        if (v >= best_iou) {
          best = k;
          best_iou = v;
        }
      }
      if (best) {
        spans[*best].box = enclosing(spans[*best].box, o.box);
        spans[*best].score = std::max(spans[*best].score, o.score);
        last_part[*best] = p;
      } else {
        spans.push_back(o);
        last_part.push_back(p);
      }
    }
  }
  if (plan.identity()) return rows;
  auto merged = nms(rows, th.nms_iou);
  merged.insert(merged.end(), spans.begin(), spans.end());
  return merged;
}

// ---------------------------------------------------------------------------
// Row separators from OCR

/// Row bands inferred from words in the key (leftmost/date) column: words are
/// clustered by vertical center, each cluster's top edge opens a band that
/// runs to the next cluster's top edge (the last one to the table bottom).
inline std::vector<Box> infer_row_separators(const Box& table, std::span<const OcrWord> ocr, int page,
                                             const Box& key_column, const TsrThresholds& th = {}) {
  std::vector<const OcrWord*> words;
  for (const auto& w : ocr)
    if (w.page == page && table.contains_point(w.box.cx(), w.box.cy()) &&
        containment(w.box, key_column) >= 0.5)
      words.push_back(&w);
  if (words.empty()) return {};

  std::vector<double> heights;
  for (const auto* w : words) heights.push_back(w->box.height());
  std::nth_element(heights.begin(), heights.begin() + heights.size() / 2, heights.end());
  const double gap = th.cluster_gap_factor * heights[heights.size() / 2];

  std::stable_sort(words.begin(), words.end(),
                   [](const OcrWord* a, const OcrWord* b) { return a->box.cy() < b->box.cy(); });
  std::vector<double> tops;
  double prev_cy = words.front()->box.cy();
  tops.push_back(words.front()->box.y1);
  for (std::size_t i = 1; i < words.size(); ++i) {
    const double cy = words[i]->box.cy();
    if (cy - prev_cy > gap) {
      tops.push_back(words[i]->box.y1);
    } else {
      tops.back() = std::min(tops.back(), words[i]->box.y1);
    }
    prev_cy = cy;
  }
  std::vector<Box> bands;
  for (std::size_t i = 0; i < tops.size(); ++i) {
    const double bottom = i + 1 < tops.size() ? tops[i + 1] : table.y2;
    if (bottom > tops[i]) bands.push_back({table.x1, tops[i], table.x2, bottom});
  }
  return bands;
}

// ---------------------------------------------------------------------------
// Structure refinement

struct RefinedStructure {
  Box table;
  std::vector<Box> rows;     ///< sorted by y1, full table width, pairwise disjoint
  std::vector<Box> columns;  ///< sorted by x1, full table height, pairwise disjoint
  std::vector<std::size_t> header_rows;
  std::vector<std::size_t> spanning_rows;
};

namespace detail {

struct Interval {
  double lo, hi;
};

// Resolve overlaps between neighbouring intervals by moving both edges to the
// middle of the overlap; intervals squeezed to nothing are dropped.
inline std::vector<Interval> snap_intervals(std::vector<Interval> v) {
  constexpr double kMinExtent = 1e-6;
  for (std::size_t pass = 0; pass <= v.size() + 1; ++pass) {
    std::stable_sort(v.begin(), v.end(), [](const Interval& a, const Interval& b) {
      return a.lo != b.lo ? a.lo < b.lo : a.hi < b.hi;
    });
    bool changed = false;
    for (std::size_t k = 0; k + 1 < v.size(); ++k) {
      if (v[k].hi > v[k + 1].lo) {
        const double m = (v[k].hi + v[k + 1].lo) / 2;
        v[k].hi = m;
        v[k + 1].lo = m;
        changed = true;
      }
    }
    const auto before = v.size();
    std::erase_if(v, [](const Interval& i) { return i.hi - i.lo <= kMinExtent; });
    if (!changed && before == v.size()) break;
  }
  return v;
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2;
}

// Add an interval for every uncovered stretch of [lo, hi] longer than
// factor × median extent.
inline std::vector<Interval> fill_gaps(std::vector<Interval> v, double lo, double hi, double factor) {
  if (v.empty()) return {{lo, hi}};
  std::vector<double> ext;
  for (const auto& i : v) ext.push_back(i.hi - i.lo);
  const double limit = factor * median(ext);
  std::vector<Interval> added;
  double cursor = lo;
  for (const auto& i : v) {
    if (i.lo - cursor > limit) added.push_back({cursor, i.lo});
    cursor = std::max(cursor, i.hi);
  }
  if (hi - cursor > limit) added.push_back({cursor, hi});
  v.insert(v.end(), added.begin(), added.end());
  std::sort(v.begin(), v.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  return v;
}

inline bool overlaps_role(const Box& row, std::span<const DetectedObject> role_boxes, double min_iou) {
  return std::any_of(role_boxes.begin(), role_boxes.end(), [&](const DetectedObject& o) {
    return iou(row, o.box) >= min_iou || containment(row, o.box) >= min_iou;
  });
}

}  // namespace detail

/// Clean the raw row/column detections of one table:
///  1. class-wise NMS;
///  2. overlapping neighbours share the midline of their overlap;
///  3. separators not covered by any row (IoU below threshold) become rows;
///  4. rows span the table width, columns the table height;
///  5. uncovered spans longer than gap_factor × median size become rows/columns;
///  6. rows matching a column-header / spanning-row detection are flagged.
inline RefinedStructure refine_structure(std::span<const DetectedObject> raw, std::span<const Box> separators,
                                         const Box& table, const TsrThresholds& th = {}) {
  const auto kept = nms(raw, th.nms_iou);
  std::vector<detail::Interval> rows, cols;
  std::vector<DetectedObject> headers, spanning;
  for (const auto& o : kept) {
    if (has_label(o, TsrClass::TableRow)) {
      const double lo = std::max(o.box.y1, table.y1), hi = std::min(o.box.y2, table.y2);
      if (hi > lo) rows.push_back({lo, hi});
    } else if (has_label(o, TsrClass::TableColumn)) {
      const double lo = std::max(o.box.x1, table.x1), hi = std::min(o.box.x2, table.x2);
      if (hi > lo) cols.push_back({lo, hi});
    } else if (has_label(o, TsrClass::TableColumnHeader)) {
      headers.push_back(o);
    } else if (has_label(o, TsrClass::TableSpanningRow)) {
      spanning.push_back(o);
    }
  }

  rows = detail::snap_intervals(std::move(rows));
  cols = detail::snap_intervals(std::move(cols));

  auto row_box = [&](const detail::Interval& i) { return Box{table.x1, i.lo, table.x2, i.hi}; };
  bool inserted = false;
  const auto current = rows;
  for (const auto& sep : separators) {
    const Box s{table.x1, std::max(sep.y1, table.y1), table.x2, std::min(sep.y2, table.y2)};
    if (!(s.y2 > s.y1)) continue;
    const bool covered = std::any_of(current.begin(), current.end(), [&](const detail::Interval& r) {
      return iou(row_box(r), s) >= th.missing_row_iou;
    });
    if (!covered) {
      rows.push_back({s.y1, s.y2});
      inserted = true;
    }
  }
  if (inserted) rows = detail::snap_intervals(std::move(rows));

  rows = detail::fill_gaps(std::move(rows), table.y1, table.y2, th.gap_factor);
  if (cols.empty()) throw PipelineError("unstructurable table: no columns after refinement");
  cols = detail::fill_gaps(std::move(cols), table.x1, table.x2, th.gap_factor);

  RefinedStructure out;
  out.table = table;
  for (const auto& r : rows) out.rows.push_back(row_box(r));
  for (const auto& c : cols) out.columns.push_back({c.lo, table.y1, c.hi, table.y2});
  for (std::size_t i = 0; i < out.rows.size(); ++i) {
    if (detail::overlaps_role(out.rows[i], headers, th.role_overlap_iou)) out.header_rows.push_back(i);
    if (detail::overlaps_role(out.rows[i], spanning, th.role_overlap_iou)) out.spanning_rows.push_back(i);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Grid

struct GridCell {
  Box box;
  std::string text;
  std::vector<OcrWord> words;
};

/// Rows × columns of cells. A spanning row owns a single full-width cell.
struct TableGrid {
  Box table;
  std::vector<Box> rows;
  std::vector<Box> columns;
  std::vector<bool> header;
  std::vector<bool> spanning;
  std::vector<std::vector<GridCell>> cells;
  std::vector<OcrWord> unassigned;

  std::size_t row_count() const { return rows.size(); }
  std::size_t column_count() const { return columns.size(); }

  const GridCell& cell(std::size_t r, std::size_t c) const {
    return spanning[r] ? cells[r].front() : cells[r][c];
  }

  const std::string& text(std::size_t r, std::size_t c) const { return cell(r, c).text; }

  std::size_t cell_count() const {
    std::size_t n = 0;
    for (const auto& row : cells) n += row.size();
    return n;
  }
};

inline TableGrid build_grid(const RefinedStructure& s) {
  if (s.rows.empty() || s.columns.empty())
    throw PipelineError("build_grid: need at least one row and one column");
  TableGrid g;
  g.table = s.table;
  g.rows = s.rows;
  g.columns = s.columns;
  g.header.assign(s.rows.size(), false);
  g.spanning.assign(s.rows.size(), false);
  for (auto i : s.header_rows) g.header.at(i) = true;
  for (auto i : s.spanning_rows) g.spanning.at(i) = true;
  for (std::size_t r = 0; r < g.rows.size(); ++r) {
    std::vector<GridCell> row;
    if (g.spanning[r]) {
      row.push_back({g.rows[r], {}, {}});
    } else {
      for (const auto& col : g.columns) {
        const Box cell = intersect(g.rows[r], col);
        if (cell.degenerate())
          throw PipelineError("build_grid: row " + std::to_string(r) + " and a column do not intersect");
        row.push_back({cell, {}, {}});
      }
    }
    g.cells.push_back(std::move(row));
  }
  return g;
}

/// Put every OCR word whose center lies in the table into the cell sharing
/// the most area with it (ties: leftmost, then topmost cell). Words touching
/// no cell go to `unassigned`.
inline TableGrid assign_text(TableGrid grid, std::span<const OcrWord> ocr, int page) {
  for (auto& row : grid.cells)
    for (auto& c : row) {
      c.words.clear();
      c.text.clear();
    }
  grid.unassigned.clear();

  for (const auto& w : ocr) {
    if (w.page != page || !grid.table.contains_point(w.box.cx(), w.box.cy())) continue;
    GridCell* best = nullptr;
    double best_area = 0;
    for (auto& row : grid.cells)
      for (auto& c : row) {
        const double a = intersection_area(w.box, c.box);
        if (a <= 0) continue;
        if (!best || a > best_area ||
            (a == best_area && (c.box.x1 < best->box.x1 || (c.box.x1 == best->box.x1 && c.box.y1 < best->box.y1)))) {
          best = &c;
          best_area = a;
        }
      }
    if (best) {
      best->words.push_back(w);
    } else {
      grid.unassigned.push_back(w);
    }
  }
  for (auto& row : grid.cells)
    for (auto& c : row) {
      c.words = reading_order(std::move(c.words));
      c.text = joined_text(c.words);
    }
  return grid;
}

}  // namespace tabsniper
