// Minimal library use: generate a statement in memory, spread it, print the rows.

#include <iostream>

#include "tabsniper/tabsniper.hpp"

int main() {
  tabsniper::GenConfig gen;
  gen.seed = 7;
  gen.pages = 2;
  const auto statement = tabsniper::generate_statement(gen);

  tabsniper::PipelineConfig cfg;
  cfg.statement_year = gen.year;
  const auto result = tabsniper::run_pipeline(statement.document, cfg);

  tabsniper::write_transactions_csv(std::cout, result.transactions);
  std::cerr << result.transactions.size() << " transactions, checksum " << result.checksum_cents << " cents\n";
  return result.balanced() ? 0 : 2;
}
