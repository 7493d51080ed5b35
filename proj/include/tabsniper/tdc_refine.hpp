#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "tabsniper/detection.hpp"
#include "tabsniper/naive_bayes.hpp"
#include "tabsniper/text.hpp"
#include "tabsniper/text_corpus.hpp"

namespace tabsniper {

/// mapping[i] is the table index assigned to caption/header i, if any.
using RegionMapping = std::vector<std::optional<std::size_t>>;

/// Each caption goes to the table on the same page whose top edge is
/// vertically closest to the caption's top edge; ties prefer the closer left
/// edge, then the lower table index.
inline RegionMapping map_captions_to_tables(std::span<const DetectedObject> captions,
                                            std::span<const DetectedObject> tables) {
  RegionMapping mapping(captions.size());
  for (std::size_t i = 0; i < captions.size(); ++i) {
    const auto& cap = captions[i].box;
    std::optional<std::size_t> best;
    double best_dy = 0, best_dx = 0;
    for (std::size_t t = 0; t < tables.size(); ++t) {
      if (tables[t].page != captions[i].page) continue;
      const double dy = std::abs(cap.y1 - tables[t].box.y1);
      const double dx = std::abs(cap.x1 - tables[t].box.x1);
      if (!best || dy < best_dy || (dy == best_dy && dx < best_dx)) {
        best = t;
        best_dy = dy;
        best_dx = dx;
      }
    }
    mapping[i] = best;
  }
  return mapping;
}

/// Each header goes to the same-page table covering the largest fraction of
/// the header's area, provided that fraction reaches `min_ratio`.
inline RegionMapping map_headers_to_tables(std::span<const DetectedObject> headers,
                                           std::span<const DetectedObject> tables,
                                           double min_ratio = 0.9) {
  RegionMapping mapping(headers.size());
  for (std::size_t i = 0; i < headers.size(); ++i) {
    double best_ratio = -1.0;
    for (std::size_t t = 0; t < tables.size(); ++t) {
      if (tables[t].page != headers[i].page) continue;
      const double r = containment(headers[i].box, tables[t].box);
      if (r > best_ratio) {
        best_ratio = r;
        mapping[i] = t;
      }
    }
    if (best_ratio < min_ratio) mapping[i].reset();
  }
  return mapping;
}

struct RefinedCategory {
  TableCategory category;
  /// Text classifier output, when one ran.
  std::optional<TableCategory> text_prediction;
  std::optional<NbVariant> model_used;
};

inline bool mentions_service_fee(const RegionText& caption) {
  return to_lower(join(caption.tokens)).find("service fee") != std::string::npos;
}

/// Settle a table's category from the vision label and its caption/header
/// text. Only merged CreditDebit tables take the text prediction (restricted
/// to Credit vs Debit); for other categories the prediction is advisory.
/// Other tables whose caption mentions "service fee" become Debit.
inline RefinedCategory refine_category(TableCategory vision, const std::optional<RegionText>& caption,
                                       const std::optional<RegionText>& header, const NbModels& models) {
  const bool has_caption = caption && !caption->empty();
  const bool has_header = header && !header->empty();

  RefinedCategory out{vision, std::nullopt, std::nullopt};
  std::optional<NbPrediction> pred;
  const NbModel* model = nullptr;
  if (has_caption && has_header) {
    model = &models.header_caption;
    pred = nb_predict(*model, concat(*caption, *header));
  } else if (has_caption) {
    model = &models.caption;
    pred = nb_predict(*model, *caption);
  } else if (has_header) {
    model = &models.header;
    pred = nb_predict(*model, *header);
  }
  if (pred) {
    out.text_prediction = pred->category;
    out.model_used = model->variant;
  }

  if (vision == TableCategory::CreditDebit) {
    out.category = TableCategory::Debit;
    if (pred) {
      std::optional<double> credit, debit;
      for (std::size_t c = 0; c < model->classes.size(); ++c) {
        if (model->classes[c] == TableCategory::Credit) credit = pred->log_posterior[c];
        if (model->classes[c] == TableCategory::Debit) debit = pred->log_posterior[c];
      }
      if (credit && (!debit || *credit >= *debit)) out.category = TableCategory::Credit;
    }
  } else if (vision == TableCategory::Other && has_caption && mentions_service_fee(*caption)) {
    out.category = TableCategory::Debit;
  }
  return out;
}

}  // namespace tabsniper
