#pragma once

#include <string>

#include "credkit/panel.hpp"

namespace credkit::panel {

// Panel CSV schema:
//   consumer_id,quarter,d_state,credit_score,age,income_est,zip,race,true_pd,f001,...,f079
// Optional columns (credit_score, race, true_pd) are empty strings when
// absent. UTF-8, LF line endings.

Panel load_panel(const std::string& path);

void save_panel(const Panel& panel, const std::string& path);

// Validation report as JSON lines, one object per violation.
void save_validation_report(const ValidationReport& report, const std::string& path);

}  // namespace credkit::panel
