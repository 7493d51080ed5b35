#pragma once

#include <vector>

#include "tabsniper/detection.hpp"
#include "tabsniper/random.hpp"

namespace fixtures {

using namespace tabsniper;

struct IntegerTable {
  Box table;
  std::vector<DetectedObject> detections;  ///< table, rows, columns, header, spanning rows
};

// A table on whole-pixel coordinates with `rows` rows (the first a header),
// 3–6 columns and an occasional spanning row.
inline IntegerTable integer_table(Rng& rng, std::size_t rows) {
  IntegerTable t;
  const double x0 = static_cast<double>(rng.uniform_int(20, 200));
  const double y0 = static_cast<double>(rng.uniform_int(20, 200));
  std::vector<double> col_edges{x0 + 4};
  const auto ncols = rng.uniform_int(3, 6);
  for (std::int64_t c = 0; c < ncols; ++c) col_edges.push_back(col_edges.back() + static_cast<double>(rng.uniform_int(60, 200)));
  double y = y0 + 4;
  std::vector<Box> row_boxes;
  for (std::size_t r = 0; r < rows; ++r) {
    const double h = static_cast<double>(rng.uniform_int(20, 44));
    row_boxes.push_back({col_edges.front(), y, col_edges.back(), y + h});
    y += h;
  }
  t.table = {x0, y0, col_edges.back() + 4, y + 4};
  auto score = [&] { return static_cast<double>(rng.uniform_int(80, 99)) / 100; };
  t.detections.push_back({t.table, TsrClass::Table, score(), 0});
  for (std::size_t r = 0; r < rows; ++r) {
    t.detections.push_back({row_boxes[r], TsrClass::TableRow, score(), 0});
    if (r == 0) t.detections.push_back({row_boxes[r], TsrClass::TableColumnHeader, score(), 0});
    else if (rng.chance(0.1)) t.detections.push_back({row_boxes[r], TsrClass::TableSpanningRow, score(), 0});
  }
  for (std::size_t c = 0; c + 1 < col_edges.size(); ++c)
    t.detections.push_back(
        {Box{col_edges[c], row_boxes.front().y1, col_edges[c + 1], row_boxes.back().y2}, TsrClass::TableColumn, score(), 0});
  return t;
}

inline std::vector<Box> row_boxes(const std::vector<DetectedObject>& objs) {
  std::vector<Box> out;
  for (const auto& o : objs)
    if (has_label(o, TsrClass::TableRow)) out.push_back(o.box);
  return out;
}

}  // namespace fixtures
