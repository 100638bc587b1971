#include "morphgrad/cli/history_csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "morphgrad/cli/run_config.hpp"

namespace morphgrad {

CsvError::CsvError(std::size_t line, const std::string& message)
    : std::runtime_error("csv line " + std::to_string(line) + ": " + message), line_(line) {}

std::string format_history_row(const HistoryRow& row) {
  return std::to_string(row.generation) + ',' + format_double(row.mean_fitness) + ',' +
         format_double(row.best_fitness) + ',' + format_double(row.sigma_mean) + ',' +
         format_double(row.best_avg_score);
}

std::string format_history_csv(const std::vector<HistoryRow>& rows) {
  std::string out = std::string(kHistoryHeader) + '\n';
  for (const HistoryRow& row : rows) out += format_history_row(row) + '\n';
  return out;
}

namespace {

HistoryRow parse_row(const std::string& line, std::size_t line_no) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  if (cells.size() != 5)
    throw CsvError(line_no, "expected 5 fields, found " + std::to_string(cells.size()));

  HistoryRow row;
  const std::string& g = cells[0];
  const auto [ptr, ec] = std::from_chars(g.data(), g.data() + g.size(), row.generation);
  if (g.empty() || ec != std::errc() || ptr != g.data() + g.size())
    throw CsvError(line_no, "generation is not an integer: '" + g + "'");
  double* targets[] = {&row.mean_fitness, &row.best_fitness, &row.sigma_mean,
                       &row.best_avg_score};
  for (std::size_t i = 0; i < 4; ++i) {
    try {
      *targets[i] = parse_double(cells[i + 1]);
    } catch (const std::invalid_argument& e) {
      throw CsvError(line_no, e.what());
    }
  }
  return row;
}

}  // namespace

std::vector<HistoryRow> parse_history_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw CsvError(1, "missing header");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kHistoryHeader) throw CsvError(1, "unexpected header '" + line + "'");

  std::vector<HistoryRow> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    rows.push_back(parse_row(line, line_no));
  }
  if (rows.empty()) throw CsvError(line_no + 1, "no data rows");
  return rows;
}

void write_history_csv(const std::string& path, const std::vector<HistoryRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  out << format_history_csv(rows);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
}

std::vector<HistoryRow> read_history_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CsvError(0, "cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_history_csv(ss.str());
}

}  // namespace morphgrad
