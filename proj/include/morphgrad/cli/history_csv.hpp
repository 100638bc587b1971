#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "morphgrad/trainer.hpp"

namespace morphgrad {

inline constexpr const char* kHistoryHeader =
    "generation,mean_fitness,best_fitness,sigma_mean,best_avg_score";

class CsvError : public std::runtime_error {
 public:
  CsvError(std::size_t line, const std::string& message);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

std::string format_history_row(const HistoryRow& row);
std::string format_history_csv(const std::vector<HistoryRow>& rows);
// Requires the exact header and at least one data row.
std::vector<HistoryRow> parse_history_csv(const std::string& text);

void write_history_csv(const std::string& path, const std::vector<HistoryRow>& rows);
std::vector<HistoryRow> read_history_csv(const std::string& path);

}  // namespace morphgrad
