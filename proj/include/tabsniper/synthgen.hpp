#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "tabsniper/docmodel.hpp"
#include "tabsniper/errors.hpp"
#include "tabsniper/random.hpp"
#include "tabsniper/report.hpp"
#include "tabsniper/spreading.hpp"
#include "tabsniper/text_corpus.hpp"

namespace tabsniper {

/// Table categories the generator can lay out.
inline const std::vector<TableCategory>& runtime_categories() {
  static const std::vector<TableCategory> cats{TableCategory::Credit, TableCategory::Debit,     TableCategory::Check,
                                               TableCategory::TxnBal, TableCategory::TxnAmtBal, TableCategory::TxnCheckBal,
                                               TableCategory::Other};
  return cats;
}

struct GenConfig {
  std::uint64_t seed = 0;
  int pages = 1;
  std::vector<TableCategory> categories = runtime_categories();
  int min_rows = 3;
  int max_rows = 12;
  double multiline_prob = 0.2;  ///< wrapped two-line descriptions
  double spanning_prob = 0.1;   ///< continuation line as a spanning row
  double jitter_px = 0.0;       ///< uniform ± jitter on detection boxes
  double long_table_prob = 0.15;
  double check_image_prob = 0.3;
  int year = 2024;
  int page_width = 1700;
  int page_height = 2200;
};

struct GeneratedStatement {
  StatementDocument document;      ///< detections jittered when jitter_px > 0
  StatementDocument ground_truth;  ///< clean detections
  std::vector<Transaction> expected;
};

namespace synth {

// Monospace text metric.
inline constexpr double kCharW = 8;
inline constexpr double kCharH = 14;
inline constexpr double kLineGap = 4;
inline constexpr double kRowPadY = 5;
inline constexpr double kCellPadX = 12;
inline constexpr double kTablePad = 6;
inline constexpr double kCaptionPad = 4;
inline constexpr double kMargin = 100;

inline double text_width(const std::string& s) { return kCharW * static_cast<double>(s.size()); }

inline std::string money(std::int64_t cents, bool dollar) {
  const bool neg = cents < 0;
  std::uint64_t v = static_cast<std::uint64_t>(neg ? -cents : cents);
  std::string whole = std::to_string(v / 100);
  for (int i = static_cast<int>(whole.size()) - 3; i > 0; i -= 3) whole.insert(static_cast<std::size_t>(i), ",");
  const auto c = v % 100;
  std::string s = (dollar ? "$" : "") + whole + "." + (c < 10 ? "0" : "") + std::to_string(c);
  return neg ? "-" + s : s;
}

inline const std::vector<std::string>& month_names() {
  static const std::vector<std::string> m{"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                          "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
  return m;
}

struct DateStyle {
  int style = 0;  // 0 MM/DD, 1 MM/DD/YY, 2 MM/DD/YYYY, 3 Mon DD, 4 DD Mon YYYY

  std::string print(int year, int month, int day) const {
    auto two = [](int v) { return (v < 10 ? "0" : "") + std::to_string(v); };
    switch (style) {
      case 0: return two(month) + "/" + two(day);
      case 1: return two(month) + "/" + two(day) + "/" + two(year % 100);
      case 2: return two(month) + "/" + two(day) + "/" + std::to_string(year);
      case 3: return month_names()[static_cast<std::size_t>(month - 1)] + " " + two(day);
      default: return two(day) + " " + month_names()[static_cast<std::size_t>(month - 1)] + " " + std::to_string(year);
    }
  }
};

inline std::string iso(int year, int month, int day) {
  auto two = [](int v) { return (v < 10 ? "0" : "") + std::to_string(v); };
  return std::to_string(year) + "-" + two(month) + "-" + two(day);
}

inline std::string description(Rng& rng, bool long_form) {
  static const std::vector<std::string> kinds{"ACH", "POS", "ONLINE", "ATM", "WIRE", "MOBILE", "CARD"};
  static const std::vector<std::string> actions{"PAYROLL", "PURCHASE", "TRANSFER", "DEPOSIT", "PAYMENT", "WITHDRAWAL", "REFUND"};
  static const std::vector<std::string> merchants{"ACME CORP",   "WALMART",   "SHELL OIL", "CITY UTILITIES", "AMAZON MKTPLACE",
                                                  "STARBUCKS",   "HOME DEPOT", "VERIZON",  "GEICO",          "NETFLIX",
                                                  "TRADER JOES", "COSTCO WHSE"};
  std::string s = rng.pick(kinds) + " " + rng.pick(actions) + " " + rng.pick(merchants);
  if (long_form) s += " #" + std::to_string(rng.uniform_int(1000, 9999)) + " STORE " + std::to_string(rng.uniform_int(10, 99));
  return s;
}

// Whitespace split preserving case and punctuation.
inline std::vector<std::string> tokenize_keep(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ' ') {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

inline std::pair<std::string, std::string> wrap_two(const std::string& s) {
  const auto words = tokenize_keep(s);
  const std::size_t half = (words.size() + 1) / 2;
  std::string a, b;
  for (std::size_t i = 0; i < words.size(); ++i) {
    auto& dst = i < half ? a : b;
    if (!dst.empty()) dst += ' ';
    dst += words[i];
  }
  return {a, b};
}

/// A generated row: per-column text lines, or a single spanning line.
struct Row {
  std::vector<std::vector<std::string>> cells;
  std::optional<std::string> spanning;
  bool header = false;
  std::optional<std::size_t> expected;  ///< index into the statement's expected transactions
};

enum class Align { Left, Right };

struct TableSpec {
  TableCategory vision;
  TableCategory truth;
  std::string caption;
  std::vector<Align> align;
  std::vector<Row> rows;
  bool long_table = false;
};

}  // namespace synth

namespace synth {

class StatementBuilder {
 public:
  explicit StatementBuilder(const GenConfig& cfg)
      : cfg_(cfg), rng_(cfg.seed * 0x9E3779B97F4A7C15ULL + 0x1234567ULL), jitter_rng_(cfg.seed ^ 0xA5A5A5A5DEADBEEFULL) {
    date_style_.style = static_cast<int>(rng_.uniform_int(0, 4));
    dollar_ = rng_.chance(0.3);
    month_ = static_cast<int>(rng_.uniform_int(1, 12));
    opening_ = rng_.uniform_int(100000, 2000000);
    balance_ = opening_;
  }

  GeneratedStatement build() {
    for (int p = 0; p < cfg_.pages; ++p) build_page(p);
    GeneratedStatement out;
    out.ground_truth = doc_;
    out.ground_truth.summary = {opening_, balance_, "USD"};
    out.document = out.ground_truth;
    if (cfg_.jitter_px > 0) {
      for (auto* objs : {&out.document.tdc_objects, &out.document.tsr_objects})
        for (auto& o : *objs) o.box = jitter(o.box, o.page);
    }
    out.expected = std::move(expected_);
    return out;
  }

 private:
  // ------------------------------------------------------------- content

  std::pair<int, int> next_day() {
    day_ = std::min(28, day_ + static_cast<int>(rng_.uniform_int(0, 2)));
    return {month_, day_};
  }

  std::string print_date(int month, int day) const { return date_style_.print(cfg_.year, month, day); }

  std::int64_t amount(std::int64_t lo, std::int64_t hi) { return rng_.uniform_int(lo, hi); }

  std::string signed_money(std::int64_t cents, bool credit) {
    const std::string m = money(cents, dollar_);
    if (credit) return "+" + m;
    switch (rng_.uniform_int(0, 2)) {
      case 0: return "-" + m;
      case 1: return "(" + m + ")";
      default: return m + "-";
    }
  }

  Transaction& add_expected(TableCategory cat, std::int64_t cents, int month, int day, std::string desc) {
    Transaction t;
    t.date = iso(cfg_.year, month, day);
    t.date_text = print_date(month, day);
    t.description = std::move(desc);
    t.amount_cents = cents;
    t.category = cat;
    balance_ += cat == TableCategory::Credit ? cents : -cents;
    expected_.push_back(std::move(t));
    return expected_.back();
  }

  // Description cell lines plus an optional spanning continuation.
  std::pair<std::vector<std::string>, std::optional<std::string>> description_lines(std::string& full) {
    std::vector<std::string> lines;
    if (rng_.chance(cfg_.multiline_prob)) {
      full = description(rng_, true);
      auto [a, b] = wrap_two(full);
      lines = {a, b};
    } else {
      full = description(rng_, false);
      lines = {full};
    }
    std::optional<std::string> span;
    if (rng_.chance(cfg_.spanning_prob)) {
      static const std::vector<std::string> tails{"ONLINE BANKING", "CONF", "TRACE ID", "MEMO RENT", "INV PAYMENT"};
      span = "REF " + std::to_string(rng_.uniform_int(100000, 999999)) + " " + rng_.pick(tails);
    }
    return {lines, span};
  }

  void push_spanning(TableSpec& t, const std::optional<std::string>& span, std::size_t expected_index) {
    if (!span) return;
    Row r;
    r.spanning = *span;
    t.rows.push_back(std::move(r));
    auto& desc = expected_[expected_index].description;
    desc += " " + *span;
  }

  static Row header_row(const std::vector<std::string>& cols) {
    Row r;
    r.header = true;
    for (const auto& c : cols) r.cells.push_back({c});
    return r;
  }

  TableSpec make_table(TableCategory cat, int rows, bool long_table) {
    TableSpec t;
    t.truth = cat;
    t.vision = cat;
    t.long_table = long_table;
    switch (cat) {
      case TableCategory::Credit:
      case TableCategory::Debit: make_credit_debit(t, cat, rows); break;
      case TableCategory::Check: make_check(t, rows); break;
      case TableCategory::TxnBal: make_txn(t, rows, false); break;
      case TableCategory::TxnCheckBal: make_txn(t, rows, true); break;
      case TableCategory::TxnAmtBal: make_amt(t, rows); break;
      default: make_other(t, rows); break;
    }
    return t;
  }

  void make_credit_debit(TableSpec& t, TableCategory cat, int rows) {
    t.vision = TableCategory::CreditDebit;
    t.caption = caption_for(cat, rng_);
    t.align = {Align::Left, Align::Left, Align::Right};
    t.rows.push_back(header_row(header_columns_for(cat, rng_)));
    std::int64_t total = 0;
    for (int i = 0; i < rows; ++i) {
      const auto [m, d] = next_day();
      std::string full;
      auto [lines, span] = description_lines(full);
      const auto cents = cat == TableCategory::Credit ? amount(5000, 500000) : amount(500, 150000);
      total += cents;
      Row r;
      r.cells = {{print_date(m, d)}, lines, {money(cents, dollar_)}};
      r.expected = expected_.size();
      add_expected(cat, cents, m, d, full);
      const auto idx = *r.expected;
      t.rows.push_back(std::move(r));
      push_spanning(t, span, idx);
    }
    if (rng_.chance(0.4)) {
      Row r;
      r.cells = {{}, {cat == TableCategory::Credit ? "Total Deposits" : "Total Withdrawals"}, {money(total, dollar_)}};
      t.rows.push_back(std::move(r));
    }
  }

  void make_check(TableSpec& t, int rows) {
    static const std::vector<std::string> captions{"Checks Paid", "Checks Cleared", "Cheques Processed", "Serial Checks Paid"};
    t.caption = rng_.pick(captions);
    t.align = {Align::Left, Align::Left, Align::Right};
    if (!rng_.chance(0.2)) t.rows.push_back(header_row(header_columns_for(TableCategory::Check, rng_)));
    for (int i = 0; i < rows; ++i) {
      const auto [m, d] = next_day();
      const auto cents = amount(2000, 200000);
      const std::string number = std::to_string(check_number_++);
      Row r;
      r.cells = {{number}, {print_date(m, d)}, {money(cents, dollar_)}};
      r.expected = expected_.size();
      add_expected(TableCategory::Debit, cents, m, d, "").check_number = number;
      t.rows.push_back(std::move(r));
    }
  }

  void make_txn(TableSpec& t, int rows, bool with_checks) {
    const auto cls = with_checks ? TableCategory::TxnCheckBal : TableCategory::TxnBal;
    t.caption = caption_for(cls, rng_);
    t.align = with_checks ? std::vector<Align>{Align::Left, Align::Left, Align::Left, Align::Right, Align::Right, Align::Right}
                          : std::vector<Align>{Align::Left, Align::Left, Align::Right, Align::Right, Align::Right};
    t.rows.push_back(header_row(header_columns_for(cls, rng_)));
    for (int i = 0; i < rows; ++i) {
      const auto [m, d] = next_day();
      const bool credit = rng_.chance(0.4);
      const auto cents = credit ? amount(5000, 400000) : amount(500, 150000);
      std::string full;
      auto [lines, span] = description_lines(full);
      std::optional<std::string> check;
      if (with_checks && !credit && rng_.chance(0.4)) check = std::to_string(check_number_++);
      Row r;
      r.expected = expected_.size();
      auto& tx = add_expected(credit ? TableCategory::Credit : TableCategory::Debit, cents, m, d, full);
      tx.check_number = check;
      tx.balance_cents = balance_;
      const std::string amt = money(cents, dollar_);
      const std::string bal = money(balance_, dollar_);
      if (with_checks) {
        r.cells = {{print_date(m, d)}, check ? std::vector<std::string>{*check} : std::vector<std::string>{}, lines,
                   credit ? std::vector<std::string>{} : std::vector<std::string>{amt},
                   credit ? std::vector<std::string>{amt} : std::vector<std::string>{}, {bal}};
      } else {
        r.cells = {{print_date(m, d)}, lines, credit ? std::vector<std::string>{} : std::vector<std::string>{amt},
                   credit ? std::vector<std::string>{amt} : std::vector<std::string>{}, {bal}};
      }
      const auto idx = *r.expected;
      t.rows.push_back(std::move(r));
      push_spanning(t, span, idx);
    }
  }

  void make_amt(TableSpec& t, int rows) {
    t.caption = caption_for(TableCategory::TxnAmtBal, rng_);
    t.align = {Align::Left, Align::Left, Align::Right, Align::Right};
    t.rows.push_back(header_row(header_columns_for(TableCategory::TxnAmtBal, rng_)));
    for (int i = 0; i < rows; ++i) {
      const auto [m, d] = next_day();
      const bool credit = rng_.chance(0.4);
      const auto cents = credit ? amount(5000, 400000) : amount(500, 150000);
      std::string full;
      auto [lines, span] = description_lines(full);
      Row r;
      r.expected = expected_.size();
      auto& tx = add_expected(credit ? TableCategory::Credit : TableCategory::Debit, cents, m, d, full);
      tx.balance_cents = balance_;
      r.cells = {{print_date(m, d)}, lines, {signed_money(cents, credit)}, {money(balance_, dollar_)}};
      const auto idx = *r.expected;
      t.rows.push_back(std::move(r));
      push_spanning(t, span, idx);
    }
  }

  void make_other(TableSpec& t, int rows) {
    t.vision = TableCategory::Other;
    t.truth = TableCategory::Other;
    if (rng_.chance(0.5)) {
      // Service fee schedule: refined to Debit by its caption.
      static const std::vector<std::string> captions{"Service Fee Summary", "Monthly Service Fees", "Service Fees Charged"};
      static const std::vector<std::string> fees{"Monthly Maintenance Fee", "Overdraft Item Fee", "Wire Transfer Fee",
                                                 "Paper Statement Fee", "ATM Network Fee"};
      t.truth = TableCategory::Debit;
      t.caption = rng_.pick(captions);
      t.align = {Align::Left, Align::Left, Align::Right};
      t.rows.push_back(header_row(header_columns_for(TableCategory::Credit, rng_)));
      const int n = std::min(rows, 5);
      for (int i = 0; i < n; ++i) {
        const auto [m, d] = next_day();
        const auto cents = amount(500, 3500);
        const std::string desc = rng_.pick(fees);
        Row r;
        r.cells = {{print_date(m, d)}, {desc}, {money(cents, dollar_)}};
        r.expected = expected_.size();
        add_expected(TableCategory::Debit, cents, m, d, desc);
        t.rows.push_back(std::move(r));
      }
      return;
    }
    static const std::vector<std::string> captions{"Account Summary", "Balance Summary", "Summary of Accounts", "Interest Summary"};
    static const std::vector<std::string> items{"Beginning Balance", "Deposits and Additions", "Withdrawals and Subtractions",
                                                "Interest Earned", "Ending Balance"};
    t.caption = rng_.pick(captions);
    t.align = {Align::Left, Align::Right};
    if (rng_.chance(0.5)) t.rows.push_back(header_row(header_columns_for(TableCategory::Other, rng_)));
    for (const auto& item : items) {
      Row r;
      r.cells = {{item}, {money(amount(1000, 900000), dollar_)}};
      t.rows.push_back(std::move(r));
    }
  }

  // ------------------------------------------------------------- layout

  struct Layout {
    std::vector<double> col_x;  // column edges, size = columns + 1
    std::vector<std::pair<double, double>> row_y;
    Box table;
  };

  static double row_height(const synth::Row& r) {
    std::size_t lines = 1;
    for (const auto& c : r.cells) lines = std::max(lines, c.size());
    const auto n = static_cast<double>(lines);
    return n * kCharH + (n - 1) * kLineGap + 2 * kRowPadY;
  }

  static Layout measure(const TableSpec& t, double x0, double y0) {
    Layout l;
    const std::size_t ncol = t.align.size();
    std::vector<double> width(ncol, 0);
    for (const auto& r : t.rows)
      for (std::size_t c = 0; c < r.cells.size() && c < ncol; ++c)
        for (const auto& line : r.cells[c]) width[c] = std::max(width[c], text_width(line));
    double x = x0 + kTablePad;
    l.col_x.push_back(x);
    for (auto w : width) {
      x += w + 2 * kCellPadX;
      l.col_x.push_back(x);
    }
    double y = y0 + kTablePad;
    for (const auto& r : t.rows) {
      const double h = row_height(r);
      l.row_y.emplace_back(y, y + h);
      y += h;
    }
    l.table = {x0, y0, l.col_x.back() + kTablePad, y + kTablePad};
    return l;
  }

  static double caption_block() { return kCharH + 2 * kCaptionPad + 10; }

  void place_line(const std::string& line, double x, double y, int page) {
    for (const auto& w : tokenize_keep(line)) {
      OcrWord word;
      word.text = w;
      word.page = page;
      word.box = {x, y, x + text_width(w), y + kCharH};
      word.confidence = std::round(rng_.uniform(0.9, 1.0) * 100) / 100;
      doc_.ocr.push_back(std::move(word));
      x += text_width(w) + kCharW;
    }
  }

  double score() { return std::round(rng_.uniform(0.85, 0.99) * 1000) / 1000; }

  void emit(const TableSpec& t, const Layout& l, int page) {
    const std::size_t table_id = table_count_++;
    const double x0 = l.col_x.front();
    const double x_end = l.col_x.back();

    const double cap_y = l.table.y1 - caption_block() + kCaptionPad;
    place_line(t.caption, x0, cap_y, page);
    doc_.tdc_objects.push_back({{x0 - kCaptionPad, cap_y - kCaptionPad, x0 + text_width(t.caption) + kCaptionPad,
                                 cap_y + kCharH + kCaptionPad},
                                TableCategory::TableCaption, score(), page});
    doc_.tdc_objects.push_back({l.table, t.vision, score(), page});
    doc_.tsr_objects.push_back({l.table, TsrClass::Table, score(), page});

    const double rows_top = l.row_y.front().first;
    const double rows_bottom = l.row_y.back().second;
    for (std::size_t c = 0; c + 1 < l.col_x.size(); ++c)
      doc_.tsr_objects.push_back({{l.col_x[c], rows_top, l.col_x[c + 1], rows_bottom}, TsrClass::TableColumn, score(), page});

    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      const auto& row = t.rows[r];
      const auto [y1, y2] = l.row_y[r];
      const Box box{x0, y1, x_end, y2};
      doc_.tsr_objects.push_back({box, TsrClass::TableRow, score(), page});
      if (row.header) {
        doc_.tsr_objects.push_back({box, TsrClass::TableColumnHeader, score(), page});
        doc_.tdc_objects.push_back({box, TableCategory::TableHeader, score(), page});
      }
      if (row.spanning) {
        doc_.tsr_objects.push_back({box, TsrClass::TableSpanningRow, score(), page});
        place_line(*row.spanning, x0 + kCellPadX, y1 + kRowPadY, page);
        continue;
      }
      for (std::size_t c = 0; c < row.cells.size(); ++c) {
        for (std::size_t li = 0; li < row.cells[c].size(); ++li) {
          const auto& line = row.cells[c][li];
          if (line.empty()) continue;
          const double y = y1 + kRowPadY + static_cast<double>(li) * (kCharH + kLineGap);
          const double x = t.align[c] == Align::Right ? l.col_x[c + 1] - kCellPadX - text_width(line)
                                                      : l.col_x[c] + kCellPadX;
          place_line(line, x, y, page);
        }
      }
      if (row.expected) expected_[*row.expected].provenance = {page, table_id, r};
    }
  }

  int pick_rows(bool long_table) {
    return long_table ? static_cast<int>(rng_.uniform_int(21, 45))
                      : static_cast<int>(rng_.uniform_int(cfg_.min_rows, cfg_.max_rows));
  }

  // Drop trailing data rows until the table fits; keeps expected transactions in sync.
  bool fit(TableSpec& t, double x0, double y0, double bottom, int min_rows) {
    auto data_rows = [&] {
      return static_cast<int>(std::count_if(t.rows.begin(), t.rows.end(), [](const Row& r) { return !r.header && !r.spanning; }));
    };
    while (measure(t, x0, y0).table.y2 > bottom) {
      if (data_rows() <= min_rows) return false;
      const Row last = t.rows.back();
      t.rows.pop_back();
      if (last.expected) drop_expected(*last.expected);
      if (last.spanning) {
        auto& desc = expected_.back().description;
        desc.resize(desc.size() - last.spanning->size() - 1);
      }
    }
    return true;
  }

  void drop_expected(std::size_t index) {
    // Only ever the most recent transaction of the table being fitted.
    const auto& tx = expected_.at(index);
    balance_ -= tx.category == TableCategory::Credit ? tx.amount_cents : -tx.amount_cents;
    expected_.erase(expected_.begin() + static_cast<std::ptrdiff_t>(index));
  }

  void build_page(int page) {
    doc_.pages.push_back({page, cfg_.page_width, cfg_.page_height, 200});
    const double bottom = cfg_.page_height - kMargin;
    double y = kMargin;
    const int tables = static_cast<int>(rng_.uniform_int(1, 3));
    std::vector<TableCategory> txn_cats;
    for (auto c : cfg_.categories)
      if (c != TableCategory::Other) txn_cats.push_back(c);

    for (int k = 0; k < tables; ++k) {
      const bool long_table = k == 0 && !txn_cats.empty() && rng_.chance(cfg_.long_table_prob);
      const auto cat = long_table ? rng_.pick(txn_cats) : rng_.pick(cfg_.categories);
      const double table_y = y + caption_block();
      const bool side_by_side = cat == TableCategory::Check && !long_table && rng_.chance(0.3);

      const auto first_mark = marks();
      auto first = make_table(cat, pick_rows(long_table), long_table);
      if (!fit(first, kMargin, table_y, bottom, long_table ? 21 : 1)) {
        restore(first_mark);
        break;
      }
      const auto l1 = measure(first, kMargin, table_y);
      emit(first, l1, page);
      double next_y = l1.table.y2;
      if (side_by_side) {
        const auto second_mark = marks();
        auto second = make_table(TableCategory::Check, pick_rows(false), false);
        const double x0 = l1.table.x2 + 40;
        if (fit(second, x0, table_y, bottom, 1) && measure(second, x0, table_y).table.x2 <= cfg_.page_width - kMargin) {
          const auto l2 = measure(second, x0, table_y);
          emit(second, l2, page);
          next_y = std::max(next_y, l2.table.y2);
        } else {
          restore(second_mark);
        }
      }
      y = next_y + 40;
      if (long_table) break;
    }
    if (rng_.chance(cfg_.check_image_prob) && bottom - y > 260) {
      doc_.tdc_objects.push_back({{kMargin, y, kMargin + 600, y + 250}, TableCategory::CheckImage, score(), page});
    }
  }

  struct Marks {
    std::size_t expected;
    std::int64_t balance;
    int check_number, day;
  };

  Marks marks() const { return {expected_.size(), balance_, check_number_, day_}; }

  void restore(const Marks& m) {
    expected_.resize(m.expected);
    balance_ = m.balance;
    check_number_ = m.check_number;
    day_ = m.day;
  }

  Box jitter(const Box& b, int page) {
    auto j = [&](double v) { return std::round((v + jitter_rng_.uniform(-cfg_.jitter_px, cfg_.jitter_px)) * 100) / 100; };
    Box out{j(b.x1), j(b.y1), j(b.x2), j(b.y2)};
    if (out.x2 < out.x1) std::swap(out.x1, out.x2);
    if (out.y2 < out.y1) std::swap(out.y1, out.y2);
    const auto* p = doc_.page(page);
    return clamp_to(out, static_cast<double>(p->width), static_cast<double>(p->height));
  }

  GenConfig cfg_;
  Rng rng_;
  Rng jitter_rng_;
  DateStyle date_style_;
  bool dollar_ = false;
  int month_ = 1;
  int day_ = 1;
  int check_number_ = 1001;
  std::int64_t opening_ = 0;
  std::int64_t balance_ = 0;
  std::size_t table_count_ = 0;
  StatementDocument doc_;
  std::vector<Transaction> expected_;
};

}  // namespace synth

/// Lay out a synthetic statement. Balances make the true checksum zero.
inline GeneratedStatement generate_statement(const GenConfig& cfg) {
  if (cfg.categories.empty()) throw std::invalid_argument("generate_statement: no table categories");
  for (auto c : cfg.categories)
    if (std::find(runtime_categories().begin(), runtime_categories().end(), c) == runtime_categories().end())
      throw std::invalid_argument("generate_statement: category " + std::string(to_string(c)) + " cannot be generated");
  if (cfg.pages < 1) throw std::invalid_argument("generate_statement: pages must be >= 1");
  if (cfg.min_rows < 1 || cfg.max_rows < cfg.min_rows) throw std::invalid_argument("generate_statement: bad row range");
  if (cfg.jitter_px < 0) throw std::invalid_argument("generate_statement: jitter must be >= 0");
  return synth::StatementBuilder(cfg).build();
}

/// Writes document.json, ground_truth.json and expected.csv into `dir`.
inline void write_statement(const GeneratedStatement& s, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "document.json", std::ios::binary);
    out << serialize_document(s.document);
  }
  {
    std::ofstream out(dir / "ground_truth.json", std::ios::binary);
    out << serialize_document(s.ground_truth);
  }
  std::ofstream out(dir / "expected.csv", std::ios::binary);
  write_transactions_csv(out, s.expected);
}

}  // namespace tabsniper
