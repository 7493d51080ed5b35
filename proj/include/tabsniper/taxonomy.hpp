#pragma once

#include <array>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <variant>

namespace tabsniper {

/// Table-level classes of the detection & categorization stage. Credit and
/// Debit share the merged CreditDebit class until text refinement splits them.
enum class TableCategory {
  Credit,
  Debit,
  CreditDebit,
  Check,
  TxnBal,
  TxnAmtBal,
  TxnCheckBal,
  Other,
  CheckImage,
  TableCaption,
  TableHeader,
};

/// Explicit structure-recognition classes. Grid cells are derived, never detected.
enum class TsrClass {
  Table,
  TableRow,
  TableColumn,
  TableColumnHeader,
  TableSpanningRow,
};

enum class Taxonomy { TDC, TSR };

inline constexpr std::array<std::pair<TableCategory, std::string_view>, 11> kCategoryNames{{
    {TableCategory::Credit, "Credit"},
    {TableCategory::Debit, "Debit"},
    {TableCategory::CreditDebit, "CreditDebit"},
    {TableCategory::Check, "Check"},
    {TableCategory::TxnBal, "Txn_bal"},
    {TableCategory::TxnAmtBal, "Txn_amt_bal"},
    {TableCategory::TxnCheckBal, "Txn_check_bal"},
    {TableCategory::Other, "Other"},
    {TableCategory::CheckImage, "Check_image"},
    {TableCategory::TableCaption, "Table_caption"},
    {TableCategory::TableHeader, "Table_header"},
}};

inline constexpr std::array<std::pair<TsrClass, std::string_view>, 5> kTsrNames{{
    {TsrClass::Table, "table"},
    {TsrClass::TableRow, "table_row"},
    {TsrClass::TableColumn, "table_column"},
    {TsrClass::TableColumnHeader, "table_column_header"},
    {TsrClass::TableSpanningRow, "table_spanning_row"},
}};

constexpr std::string_view to_string(TableCategory c) {
  for (const auto& [k, name] : kCategoryNames)
    if (k == c) return name;
  return "?";
}

constexpr std::string_view to_string(TsrClass c) {
  for (const auto& [k, name] : kTsrNames)
    if (k == c) return name;
  return "?";
}

inline std::optional<TableCategory> category_from_string(std::string_view s) {
  for (const auto& [k, name] : kCategoryNames)
    if (name == s) return k;
  // Spellings used by the annotation tables.
  if (s == "Credit/Debit") return TableCategory::CreditDebit;
  if (s == "Txn_chk_bal") return TableCategory::TxnCheckBal;
  return std::nullopt;
}

inline std::optional<TsrClass> tsr_class_from_string(std::string_view s) {
  for (const auto& [k, name] : kTsrNames)
    if (name == s) return k;
  return std::nullopt;
}

/// Categories that hold tabular data routed through structure recognition.
constexpr bool is_table_category(TableCategory c) {
  switch (c) {
    case TableCategory::Credit:
    case TableCategory::Debit:
    case TableCategory::CreditDebit:
    case TableCategory::Check:
    case TableCategory::TxnBal:
    case TableCategory::TxnAmtBal:
    case TableCategory::TxnCheckBal:
    case TableCategory::Other:
      return true;
    default:
      return false;
  }
}

/// The seven classes predicted by the caption/header text classifiers, in
/// their fixed tie-break order.
inline constexpr std::array<TableCategory, 7> kTextClasses{
    TableCategory::Credit,  TableCategory::Debit,       TableCategory::Check,
    TableCategory::TxnBal,  TableCategory::TxnAmtBal,   TableCategory::TxnCheckBal,
    TableCategory::Other,
};

/// Detection label from either taxonomy.
using Label = std::variant<TableCategory, TsrClass>;

inline std::string label_name(const Label& l) {
  return std::visit([](auto v) { return std::string(to_string(v)); }, l);
}

inline std::optional<Label> label_from_string(std::string_view s, Taxonomy tax) {
  if (tax == Taxonomy::TDC) {
    if (auto c = category_from_string(s)) return Label{*c};
  } else {
    if (auto c = tsr_class_from_string(s)) return Label{*c};
  }
  return std::nullopt;
}

inline std::ostream& operator<<(std::ostream& os, TableCategory c) { return os << to_string(c); }
inline std::ostream& operator<<(std::ostream& os, TsrClass c) { return os << to_string(c); }

}  // namespace tabsniper
