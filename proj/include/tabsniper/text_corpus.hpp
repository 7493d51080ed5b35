#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "tabsniper/csv.hpp"
#include "tabsniper/naive_bayes.hpp"
#include "tabsniper/random.hpp"
#include "tabsniper/taxonomy.hpp"

namespace tabsniper {

/// One labelled caption/header pair.
struct TextSample {
  std::string caption;
  std::string header;
  TableCategory category;
};

/// Caption keywords per text class. Pools are pairwise disjoint.
inline const std::map<TableCategory, std::vector<std::string>>& caption_keyword_pools() {
  static const std::map<TableCategory, std::vector<std::string>> pools{
      {TableCategory::Credit,
       {"Deposits", "Additions", "Credits", "Incoming", "Received", "Payroll", "Refunds", "Receipts"}},
      {TableCategory::Debit,
       {"Withdrawals", "Subtractions", "Debits", "Outgoing", "Deductions", "Purchases", "Payments",
        "Charges"}},
      {TableCategory::Check,
       {"Checks", "Paid", "Cleared", "Drafts", "Cheques", "Processed", "Numbered", "Serial"}},
      {TableCategory::TxnBal,
       {"Daily", "Activity", "Ledger", "Posted", "Register", "Details", "Movement", "History"}},
      {TableCategory::TxnAmtBal,
       {"Statement", "Entries", "Journal", "Itemized", "Chronological", "Running", "Record",
        "Transactions"}},
      {TableCategory::TxnCheckBal,
       {"Checking", "Combined", "Share", "Transfers", "Consolidated", "Overview", "Joint", "Draft"}},
      {TableCategory::Other,
       {"Summary", "Service", "Fees", "Fee", "Interest", "Beginning", "Ending", "Balances"}},
  };
  return pools;
}

/// Column header alternatives per text class, one inner list per column.
inline const std::map<TableCategory, std::vector<std::vector<std::string>>>& header_templates() {
  static const std::map<TableCategory, std::vector<std::vector<std::string>>> templates{
      {TableCategory::Credit,
       {{"Date", "Posted", "Posting Date"}, {"Description", "Details", "Transaction Details"}, {"Amount", "Amt"}}},
      {TableCategory::Debit,
       {{"Date", "Posted", "Posting Date"}, {"Description", "Details", "Transaction Details"}, {"Amount", "Amt"}}},
      {TableCategory::Check, {{"Check Number", "Check No", "Cheque Number"}, {"Date", "Date Paid"}, {"Amount"}}},
      {TableCategory::TxnBal,
       {{"Date", "Posted"},
        {"Description", "Details", "Activity"},
        {"Withdrawals", "Debits", "Subtractions"},
        {"Deposits", "Credits", "Additions"},
        {"Balance"}}},
      {TableCategory::TxnAmtBal,
       {{"Date", "Posting Date"}, {"Description", "Transaction"}, {"Amount"}, {"Balance", "Bal"}}},
      {TableCategory::TxnCheckBal,
       {{"Date"},
        {"Check No", "Chk No"},
        {"Description", "Details"},
        {"Debits", "Withdrawals", "Payments"},
        {"Credits", "Deposits"},
        {"Balance"}}},
      {TableCategory::Other, {{"Description", "Item"}, {"Amount", "Total"}}},
  };
  return templates;
}

inline std::string caption_for(TableCategory c, Rng& rng) {
  static const std::vector<std::string> fillers{"and", "your", "other"};
  const auto words = rng.sample(caption_keyword_pools().at(c), static_cast<std::size_t>(rng.uniform_int(2, 4)));
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) out += ' ';
    if (i && rng.chance(0.3)) out += rng.pick(fillers) + " ";
    out += words[i];
  }
  return out;
}

inline std::vector<std::string> header_columns_for(TableCategory c, Rng& rng) {
  std::vector<std::string> cols;
  for (const auto& alternatives : header_templates().at(c)) cols.push_back(rng.pick(alternatives));
  return cols;
}

/// Seeded synthetic caption/header corpus, `per_class` samples for each of
/// the seven text classes, class-interleaved.
inline std::vector<TextSample> synthetic_text_corpus(std::uint64_t seed = 7, std::size_t per_class = 40) {
  Rng rng(seed);
  std::vector<TextSample> out;
  for (std::size_t i = 0; i < per_class; ++i)
    for (auto c : kTextClasses) {
      const auto cols = header_columns_for(c, rng);
      out.push_back({caption_for(c, rng), join(cols), c});
    }
  return out;
}

inline void write_text_corpus(std::ostream& os, const std::vector<TextSample>& samples) {
  csv::write_row(os, {"caption_text", "header_text", "category"});
  for (const auto& s : samples) csv::write_row(os, {s.caption, s.header, std::string(to_string(s.category))});
}

/// Reads (caption_text, header_text, category) rows. A first row whose third
/// field is not a category name is treated as a header line.
inline std::vector<TextSample> read_text_corpus(std::istream& in) {
  const auto rows = csv::read(in);
  std::vector<TextSample> out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.size() != 3) throw ParseError("corpus line " + std::to_string(i + 1) + ": expected 3 fields");
    auto cat = category_from_string(r[2]);
    if (!cat) {
      if (i == 0) continue;
      throw ParseError("corpus line " + std::to_string(i + 1) + ": unknown category '" + r[2] + "'");
    }
    out.push_back({r[0], r[1], *cat});
  }
  return out;
}

/// The three caption/header classifiers.
struct NbModels {
  NbModel header;
  NbModel caption;
  NbModel header_caption;
};

inline std::vector<NbSample> variant_samples(const std::vector<TextSample>& corpus, NbVariant v) {
  std::vector<NbSample> out;
  for (const auto& s : corpus) {
    const auto cap = tokenize(s.caption);
    const auto hdr = tokenize(s.header);
    switch (v) {
      case NbVariant::Header:
        if (!hdr.empty()) out.push_back({hdr, s.category});
        break;
      case NbVariant::Caption:
        if (!cap.empty()) out.push_back({cap, s.category});
        break;
      case NbVariant::HeaderCaption:
        if (!cap.empty() && !hdr.empty()) {
          auto both = cap;
          both.insert(both.end(), hdr.begin(), hdr.end());
          out.push_back({std::move(both), s.category});
        }
        break;
    }
  }
  return out;
}

inline NbModels train_nb_models(const std::vector<TextSample>& corpus) {
  return {nb_train(variant_samples(corpus, NbVariant::Header), NbVariant::Header),
          nb_train(variant_samples(corpus, NbVariant::Caption), NbVariant::Caption),
          nb_train(variant_samples(corpus, NbVariant::HeaderCaption), NbVariant::HeaderCaption)};
}

inline const NbModels& default_nb_models() {
  static const NbModels models = train_nb_models(synthetic_text_corpus());
  return models;
}

inline constexpr const char* kHeaderModelFile = "header.json";
inline constexpr const char* kCaptionModelFile = "caption.json";
inline constexpr const char* kHeaderCaptionModelFile = "header_caption.json";

inline void save_nb_models(const NbModels& m, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  save_nb_model(m.header, dir / kHeaderModelFile);
  save_nb_model(m.caption, dir / kCaptionModelFile);
  save_nb_model(m.header_caption, dir / kHeaderCaptionModelFile);
}

inline NbModels load_nb_models(const std::filesystem::path& dir) {
  return {load_nb_model(dir / kHeaderModelFile), load_nb_model(dir / kCaptionModelFile),
          load_nb_model(dir / kHeaderCaptionModelFile)};
}

}  // namespace tabsniper
