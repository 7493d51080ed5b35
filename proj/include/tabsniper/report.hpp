#pragma once

#include <cstdint>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tabsniper/csv.hpp"
#include "tabsniper/spreading.hpp"

namespace tabsniper {

inline const std::vector<std::string>& transaction_csv_header() {
  static const std::vector<std::string> header{"date",          "description", "category", "amount_cents", "check_number",
                                               "balance_cents", "page",        "table",    "row"};
  return header;
}

inline std::vector<std::string> transaction_csv_fields(const Transaction& t) {
  return {t.date,
          t.description,
          std::string(to_string(t.category)),
          std::to_string(t.amount_cents),
          t.check_number.value_or(""),
          t.balance_cents ? std::to_string(*t.balance_cents) : "",
          std::to_string(t.provenance.page),
          std::to_string(t.provenance.table),
          std::to_string(t.provenance.row)};
}

inline void write_transactions_csv(std::ostream& os, const std::vector<Transaction>& txs) {
  csv::write_row(os, transaction_csv_header());
  for (const auto& t : txs) csv::write_row(os, transaction_csv_fields(t));
}

/// Inverse of write_transactions_csv. `date_text` is not stored and comes back empty.
inline std::vector<Transaction> read_transactions_csv(std::istream& in) {
  const auto rows = csv::read(in);
  if (rows.empty() || rows.front() != transaction_csv_header())
    throw ParseError("transactions csv: missing or unexpected header line");
  std::vector<Transaction> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    const auto where = "transactions csv line " + std::to_string(i + 1);
    if (r.size() != 9) throw ParseError(where + ": expected 9 fields");
    try {
      Transaction t;
      t.date = r[0];
      t.description = r[1];
      auto cat = category_from_string(r[2]);
      if (!cat) throw ParseError(where + ": unknown category '" + r[2] + "'");
      t.category = *cat;
      t.amount_cents = std::stoll(r[3]);
      if (!r[4].empty()) t.check_number = r[4];
      if (!r[5].empty()) t.balance_cents = std::stoll(r[5]);
      t.provenance = {std::stoi(r[6]), static_cast<std::size_t>(std::stoul(r[7])),
                      static_cast<std::size_t>(std::stoul(r[8]))};
      out.push_back(std::move(t));
    } catch (const std::logic_error&) {
      throw ParseError(where + ": malformed number");
    }
  }
  return out;
}

inline nlohmann::json to_json(const Transaction& t) {
  nlohmann::json j{{"date", t.date},
                   {"date_text", t.date_text},
                   {"description", t.description},
                   {"category", std::string(to_string(t.category))},
                   {"amount_cents", t.amount_cents},
                   {"page", t.provenance.page},
                   {"table", t.provenance.table},
                   {"row", t.provenance.row}};
  j["check_number"] = t.check_number ? nlohmann::json(*t.check_number) : nlohmann::json(nullptr);
  j["balance_cents"] = t.balance_cents ? nlohmann::json(*t.balance_cents) : nlohmann::json(nullptr);
  return j;
}

/// {transactions, discards, checksum_cents, balanced}
inline nlohmann::json spread_report_json(const std::vector<Transaction>& txs, const std::vector<DiscardEntry>& discards,
                                         std::int64_t checksum_cents) {
  nlohmann::json j;
  j["transactions"] = nlohmann::json::array();
  for (const auto& t : txs) j["transactions"].push_back(to_json(t));
  j["discards"] = nlohmann::json::array();
  for (const auto& d : discards)
    j["discards"].push_back({{"page", d.provenance.page},
                             {"table", d.provenance.table},
                             {"row", d.provenance.row},
                             {"reason", d.reason},
                             {"text", d.text}});
  j["checksum_cents"] = checksum_cents;
  j["balanced"] = checksum_cents == 0;
  return j;
}

}  // namespace tabsniper
