#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <regex>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "tabsniper/errors.hpp"
#include "tabsniper/taxonomy.hpp"
#include "tabsniper/text.hpp"
#include "tabsniper/tsr_post.hpp"

namespace tabsniper {

/// Semantic column roles used to read transactions out of a grid.
enum class Role { Date, Description, Amount, CheckNumber, Credit, Debit, Balance };

inline constexpr std::array<std::pair<Role, std::string_view>, 7> kRoleNames{{
    {Role::Date, "Date"},
    {Role::Description, "Description"},
    {Role::Amount, "Amount"},
    {Role::CheckNumber, "CheckNumber"},
    {Role::Credit, "Credit"},
    {Role::Debit, "Debit"},
    {Role::Balance, "Balance"},
}};

constexpr std::string_view to_string(Role r) {
  for (const auto& [k, n] : kRoleNames)
    if (k == r) return n;
  return "?";
}

// Order in which a header cell claims a role when its words match several
// ("Transaction Date" is a date, "Withdrawal Amount" a debit).
inline constexpr std::array<Role, 7> kRolePriority{Role::Date,    Role::CheckNumber, Role::Credit, Role::Debit,
                                                   Role::Balance, Role::Amount,      Role::Description};

/// Header synonyms per role; each synonym is a token sequence.
using SynonymTable = std::map<Role, std::vector<std::vector<std::string>>>;

inline SynonymTable default_synonyms() {
  auto words = [](std::initializer_list<const char*> ws) {
    std::vector<std::vector<std::string>> out;
    for (const char* w : ws) out.push_back(tokenize(w));
    return out;
  };
  return {
      {Role::Date, words({"date", "posted", "posting"})},
      {Role::Description, words({"description", "details", "transaction", "activity"})},
      {Role::Amount, words({"amount", "amt"})},
      {Role::CheckNumber, words({"check", "cheque", "chk", "number", "no"})},
      {Role::Credit, words({"credit", "credits", "deposit", "deposits", "additions"})},
      {Role::Debit, words({"debit", "debits", "withdrawal", "withdrawals", "deductions", "subtractions", "payments"})},
      {Role::Balance, words({"balance", "bal"})},
  };
}

/// Extend `base` with a JSON object {"Date": ["value date", ...], ...}.
inline SynonymTable load_synonyms(const std::filesystem::path& path, SynonymTable base = default_synonyms()) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open synonyms file '" + path.string() + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  if (!j.is_object()) throw ParseError(path.string() + ": expected an object of role -> synonym list");
  for (auto it = j.begin(); it != j.end(); ++it) {
    std::optional<Role> role;
    for (const auto& [k, n] : kRoleNames)
      if (n == it.key()) role = k;
    if (!role) throw ParseError(path.string() + ": unknown role '" + it.key() + "'");
    if (!it.value().is_array()) throw ParseError(path.string() + ": synonyms for '" + it.key() + "' must be a list");
    for (const auto& s : it.value()) {
      if (!s.is_string()) throw ParseError(path.string() + ": synonym must be a string");
      auto toks = tokenize(s.get<std::string>());
      if (!toks.empty()) base[*role].push_back(std::move(toks));
    }
  }
  return base;
}

/// Column index per role.
struct HeaderIndexMap {
  std::array<std::optional<std::size_t>, 7> index{};

  std::optional<std::size_t>& operator[](Role r) { return index[static_cast<std::size_t>(r)]; }
  const std::optional<std::size_t>& operator[](Role r) const { return index[static_cast<std::size_t>(r)]; }

  bool has(Role r) const { return (*this)[r].has_value(); }
  bool has_amount() const { return has(Role::Amount) || has(Role::Credit) || has(Role::Debit); }

  friend bool operator==(const HeaderIndexMap&, const HeaderIndexMap&) = default;
};

/// Column layout assumed for headerless tables of a category.
inline std::optional<HeaderIndexMap> default_schema(TableCategory c) {
  HeaderIndexMap m;
  auto set = [&](std::initializer_list<Role> roles) {
    std::size_t i = 0;
    for (Role r : roles) m[r] = i++;
    return m;
  };
  using enum Role;
  switch (c) {
    case TableCategory::Credit:
    case TableCategory::Debit:
    case TableCategory::CreditDebit:
      return set({Date, Description, Amount});
    case TableCategory::Check:
      return set({CheckNumber, Date, Amount});
    case TableCategory::TxnBal:
      return set({Date, Description, Debit, Credit, Balance});
    case TableCategory::TxnAmtBal:
      return set({Date, Description, Amount, Balance});
    case TableCategory::TxnCheckBal:
      return set({Date, CheckNumber, Description, Debit, Credit, Balance});
    default:
      return std::nullopt;
  }
}

namespace detail {

inline bool contains_sequence(const std::vector<std::string>& tokens, const std::vector<std::string>& seq) {
  if (seq.empty() || seq.size() > tokens.size()) return false;
  return std::search(tokens.begin(), tokens.end(), seq.begin(), seq.end()) != tokens.end();
}

}  // namespace detail

/// Match header words against the synonym table. Each header cell takes the
/// highest-priority unclaimed role it matches; the first cell wins a role.
inline HeaderIndexMap match_header_cells(std::span<const std::string> header_cells, const SynonymTable& synonyms) {
  HeaderIndexMap m;
  for (std::size_t col = 0; col < header_cells.size(); ++col) {
    const auto tokens = tokenize(header_cells[col]);
    for (Role r : kRolePriority) {
      if (m.has(r)) continue;
      const auto it = synonyms.find(r);
      if (it == synonyms.end()) continue;
      const bool hit = std::any_of(it->second.begin(), it->second.end(),
                                   [&](const auto& seq) { return detail::contains_sequence(tokens, seq); });
      if (hit) {
        m[r] = col;
        break;
      }
    }
  }
  return m;
}

/// Header index map of a grid. Uses the header rows when present and
/// sufficient (a date plus an amount-like column); otherwise the category's
/// default schema.
inline HeaderIndexMap resolve_header_indices(const TableGrid& grid, TableCategory category,
                                             const SynonymTable& synonyms = default_synonyms()) {
  std::vector<std::string> header_text(grid.column_count());
  bool any_header = false;
  for (std::size_t r = 0; r < grid.row_count(); ++r) {
    if (!grid.header[r] || grid.spanning[r]) continue;
    any_header = true;
    for (std::size_t c = 0; c < grid.column_count(); ++c) {
      const auto& t = grid.text(r, c);
      if (t.empty()) continue;
      if (!header_text[c].empty()) header_text[c] += ' ';
      header_text[c] += t;
    }
  }
  if (any_header) {
    const auto m = match_header_cells(header_text, synonyms);
    if (m.has(Role::Date) && m.has_amount()) return m;
  }
  auto fallback = default_schema(category);
  if (!fallback) throw PipelineError("unmappable header");
  for (const auto& idx : fallback->index)
    if (idx && *idx >= grid.column_count())
      throw PipelineError("unmappable header: default " + std::string(to_string(category)) + " schema needs " +
                          std::to_string(*idx + 1) + " columns, table has " +
                          std::to_string(grid.column_count()));
  return *fallback;
}

// ---------------------------------------------------------------------------
// Amounts and dates

/// Signed integer cents. Currency symbols, thousands separators and blanks
/// are ignored; enclosing brackets or a leading/trailing minus mean negative.
/// Without a decimal point the value is in whole currency units.
inline std::int64_t parse_amount(std::string_view text) {
  std::string s;
  // Drop whitespace and currency symbols (ASCII and the UTF-8 €/£/¥ lead bytes' sequences).
  for (std::size_t i = 0; i < text.size(); ++i) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (std::isspace(c) || c == '$') continue;
    if (text.substr(i, 3) == "\xE2\x82\xAC") { i += 2; continue; }  // €
    if (text.substr(i, 2) == "\xC2\xA3" || text.substr(i, 2) == "\xC2\xA5") { i += 1; continue; }  // £ ¥
    s.push_back(static_cast<char>(c));
  }
  const std::string original(text);
  if (s.find_first_of("0123456789") == std::string::npos)
    throw ParseError("amount '" + original + "': no digits");

  bool negative = false;
  if (s.size() >= 2 && s.front() == '(' && s.back() == ')') {
    negative = true;
    s = s.substr(1, s.size() - 2);
  }
  // Alphabetic currency codes such as USD.
  while (!s.empty() && std::isalpha(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
  while (!s.empty() && std::isalpha(static_cast<unsigned char>(s.back()))) s.pop_back();
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = negative || s.front() == '-';
    s.erase(s.begin());
  } else if (!s.empty() && (s.back() == '-' || s.back() == '+')) {
    negative = negative || s.back() == '-';
    s.pop_back();
  }
  static const std::regex grouped(R"(^(\d{1,3}(?:,\d{3})+|\d+)(?:\.(\d{1,2}))?$)");
  std::smatch m;
  if (!std::regex_match(s, m, grouped)) throw ParseError("amount '" + original + "': not a number");
  std::string whole = m[1].str();
  whole.erase(std::remove(whole.begin(), whole.end(), ','), whole.end());
  if (whole.size() > 15) throw ParseError("amount '" + original + "': too large");
  std::int64_t cents = std::stoll(whole) * 100;
  if (m[2].matched) {
    std::string frac = m[2].str();
    if (frac.size() == 1) frac += '0';
    cents += std::stoll(frac);
  }
  return negative ? -cents : cents;
}

namespace detail {

inline std::optional<int> month_from_name(std::string name) {
  static const std::array<const char*, 12> names{"jan", "feb", "mar", "apr", "may", "jun",
                                                 "jul", "aug", "sep", "oct", "nov", "dec"};
  name = to_lower(name);
  if (name.size() < 3) return std::nullopt;
  for (std::size_t i = 0; i < names.size(); ++i)
    if (name.compare(0, 3, names[i]) == 0) return static_cast<int>(i) + 1;
  return std::nullopt;
}

inline bool valid_day(int year, int month, int day) {
  static constexpr std::array<int, 12> days{31, 29, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (month < 1 || month > 12 || day < 1 || day > days[static_cast<std::size_t>(month - 1)]) return false;
  if (month == 2 && day == 29 && year > 0) return (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
  return true;
}

inline std::string two(int v) { return (v < 10 ? "0" : "") + std::to_string(v); }

}  // namespace detail

/// Recognized forms: MM/DD, MM/DD/YY, MM/DD/YYYY, "Mon DD", "DD Mon YYYY".
/// Returns an ISO date; year-less dates take `statement_year` or, without
/// one, the ISO year-less form --MM-DD.
inline std::optional<std::string> parse_date(std::string_view text, std::optional<int> statement_year = std::nullopt) {
  static const std::regex numeric(R"(^(\d{1,2})/(\d{1,2})(?:/(\d{2}|\d{4}))?$)");
  static const std::regex month_day(R"(^([A-Za-z]{3,9})\.?\s+(\d{1,2})$)");
  static const std::regex day_month_year(R"(^(\d{1,2})\s+([A-Za-z]{3,9})\.?\s+(\d{4})$)");
  std::string s(text);
  s.erase(0, s.find_first_not_of(" \t"));
  s.erase(s.find_last_not_of(" \t") + 1);

  int year = 0, month = 0, day = 0;
  std::smatch m;
  if (std::regex_match(s, m, numeric)) {
    month = std::stoi(m[1].str());
    day = std::stoi(m[2].str());
    if (m[3].matched) {
      year = std::stoi(m[3].str());
      if (m[3].length() == 2) year += year < 70 ? 2000 : 1900;
    }
  } else if (std::regex_match(s, m, month_day)) {
    auto mo = detail::month_from_name(m[1].str());
    if (!mo) return std::nullopt;
    month = *mo;
    day = std::stoi(m[2].str());
  } else if (std::regex_match(s, m, day_month_year)) {
    auto mo = detail::month_from_name(m[2].str());
    if (!mo) return std::nullopt;
    day = std::stoi(m[1].str());
    month = *mo;
    year = std::stoi(m[3].str());
  } else {
    return std::nullopt;
  }
  if (year == 0 && statement_year) year = *statement_year;
  if (!detail::valid_day(year, month, day)) return std::nullopt;
  if (year == 0) return "--" + detail::two(month) + "-" + detail::two(day);
  return std::to_string(year) + "-" + detail::two(month) + "-" + detail::two(day);
}

// ---------------------------------------------------------------------------
// Transactions

struct Provenance {
  int page = 0;
  std::size_t table = 0;
  std::size_t row = 0;

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct Transaction {
  std::string date_text;
  std::string date;  ///< ISO form
  std::string description;
  std::int64_t amount_cents = 0;  ///< always positive; the category carries the sign
  TableCategory category = TableCategory::Debit;
  std::optional<std::string> check_number;
  std::optional<std::int64_t> balance_cents;
  Provenance provenance;

  friend bool operator==(const Transaction&, const Transaction&) = default;
};

struct DiscardEntry {
  Provenance provenance;
  std::string reason;
  std::string text;  ///< row text, cells joined by " | "
};

/// One table ready for spreading.
struct SpreadTable {
  int page = 0;
  Box box;
  TableGrid grid;
  TableCategory category = TableCategory::Other;
};

/// Document order: page, then top edge, then left edge. Stable.
inline std::vector<SpreadTable> order_tables(std::vector<SpreadTable> tables) {
  std::stable_sort(tables.begin(), tables.end(), [](const SpreadTable& a, const SpreadTable& b) {
    if (a.page != b.page) return a.page < b.page;
    if (a.box.y1 != b.box.y1) return a.box.y1 < b.box.y1;
    return a.box.x1 < b.box.x1;
  });
  return tables;
}

struct SpreadOptions {
  std::optional<int> statement_year;
  SynonymTable synonyms = default_synonyms();
};

struct ExtractionResult {
  std::vector<Transaction> transactions;
  std::vector<DiscardEntry> discards;
};

namespace detail {

inline std::string row_text(const TableGrid& g, std::size_t r) {
  if (g.spanning[r]) return g.text(r, 0);
  std::string out;
  for (std::size_t c = 0; c < g.column_count(); ++c) {
    if (c) out += " | ";
    out += g.text(r, c);
  }
  return out;
}

inline std::string role_text(const TableGrid& g, std::size_t r, const HeaderIndexMap& h, Role role) {
  const auto& idx = h[role];
  if (!idx || *idx >= g.column_count()) return {};
  return g.text(r, *idx);
}

inline bool is_transaction_category(TableCategory c) {
  switch (c) {
    case TableCategory::Credit:
    case TableCategory::Debit:
    case TableCategory::CreditDebit:
    case TableCategory::Check:
    case TableCategory::TxnBal:
    case TableCategory::TxnAmtBal:
    case TableCategory::TxnCheckBal:
      return true;
    default:
      return false;
  }
}

}  // namespace detail

/// Read categorized transactions out of tables given in document order
/// (table ids are positions in `tables`). Every non-header row either yields
/// a transaction, extends the previous transaction's description (spanning
/// rows) or is logged as a discard.
inline ExtractionResult extract_transactions(std::span<const SpreadTable> tables, const SpreadOptions& opt = {}) {
  ExtractionResult res;
  for (std::size_t t = 0; t < tables.size(); ++t) {
    const auto& table = tables[t];
    const auto& g = table.grid;
    auto discard = [&](std::size_t r, std::string reason) {
      res.discards.push_back({{table.page, t, r}, std::move(reason), detail::row_text(g, r)});
    };

    if (!detail::is_transaction_category(table.category)) {
      for (std::size_t r = 0; r < g.row_count(); ++r)
        if (!g.header[r]) discard(r, "non-transaction table (" + std::string(to_string(table.category)) + ")");
      continue;
    }
    HeaderIndexMap h;
    try {
      h = resolve_header_indices(g, table.category, opt.synonyms);
    } catch (const PipelineError& e) {
      for (std::size_t r = 0; r < g.row_count(); ++r)
        if (!g.header[r]) discard(r, e.what());
      continue;
    }

    std::optional<std::size_t> continuation;
    for (std::size_t r = 0; r < g.row_count(); ++r) {
      if (g.header[r]) continue;
      if (g.spanning[r]) {
        const auto& text = g.text(r, 0);
        if (continuation) {
          auto& desc = res.transactions[*continuation].description;
          if (!text.empty()) desc += desc.empty() ? text : " " + text;
        } else {
          discard(r, "spanning row without preceding transaction");
        }
        continue;
      }
      continuation.reset();

      const std::string date_text = detail::role_text(g, r, h, Role::Date);
      if (date_text.empty()) {
        discard(r, "missing date");
        continue;
      }
      const auto date = parse_date(date_text, opt.statement_year);
      if (!date) {
        discard(r, "unparseable date '" + date_text + "'");
        continue;
      }

      Transaction tx;
      tx.date_text = date_text;
      tx.date = *date;
      tx.description = detail::role_text(g, r, h, Role::Description);
      tx.provenance = {table.page, t, r};
      const auto check = detail::role_text(g, r, h, Role::CheckNumber);
      if (!check.empty()) tx.check_number = check;
      const auto balance = detail::role_text(g, r, h, Role::Balance);
      if (!balance.empty()) {
        try {
          tx.balance_cents = parse_amount(balance);
        } catch (const ParseError&) {
        }
      }

      std::int64_t signed_amount = 0;
      try {
        const bool split_columns = h.has(Role::Credit) || h.has(Role::Debit);
        const bool by_columns = (table.category == TableCategory::TxnBal ||
                                 table.category == TableCategory::TxnCheckBal) && split_columns;
        if (by_columns) {
          const auto credit = detail::role_text(g, r, h, Role::Credit);
          const auto debit = detail::role_text(g, r, h, Role::Debit);
          if (!credit.empty() && !debit.empty()) {
            discard(r, "both credit and debit amounts present");
            continue;
          }
          if (credit.empty() && debit.empty()) {
            discard(r, "missing amount");
            continue;
          }
          const auto value = std::abs(parse_amount(credit.empty() ? debit : credit));
          tx.category = credit.empty() ? TableCategory::Debit : TableCategory::Credit;
          signed_amount = value;
        } else {
          const auto amount = detail::role_text(g, r, h, Role::Amount);
          if (amount.empty()) {
            discard(r, "missing amount");
            continue;
          }
          signed_amount = parse_amount(amount);
          switch (table.category) {
            case TableCategory::Credit: tx.category = TableCategory::Credit; break;
            case TableCategory::TxnBal:
            case TableCategory::TxnCheckBal:
            case TableCategory::TxnAmtBal:
              tx.category = signed_amount < 0 ? TableCategory::Debit : TableCategory::Credit;
              break;
            default: tx.category = TableCategory::Debit; break;
          }
        }
      } catch (const ParseError& e) {
        discard(r, e.what());
        continue;
      }
      tx.amount_cents = signed_amount < 0 ? -signed_amount : signed_amount;
      if (tx.amount_cents == 0) {
        discard(r, "zero amount");
        continue;
      }
      res.transactions.push_back(std::move(tx));
      continuation = res.transactions.size() - 1;
    }
  }
  return res;
}

/// Open − Σ debits + Σ credits − End. Zero means every transaction was found.
inline std::int64_t compute_checksum(std::span<const Transaction> transactions, std::int64_t opening_cents,
                                     std::int64_t closing_cents) {
  std::int64_t sum = opening_cents;
  for (const auto& t : transactions) {
    if (t.category == TableCategory::Credit) {
      sum += t.amount_cents;
    } else {
      sum -= t.amount_cents;
    }
  }
  return sum - closing_cents;
}

}  // namespace tabsniper
