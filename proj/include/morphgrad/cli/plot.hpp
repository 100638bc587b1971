#pragma once

#include <string>
#include <vector>

#include "morphgrad/trainer.hpp"

namespace morphgrad {

struct PlotSeries {
  std::string label;
  std::vector<HistoryRow> rows;
};

// Two stacked panels, best_avg_score and mean_fitness against generation,
// one polyline with point markers per series. Unset (-inf) scores are
// skipped.
std::string render_history_svg(const std::vector<PlotSeries>& series);

}  // namespace morphgrad
