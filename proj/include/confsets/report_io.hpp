#ifndef CONFSETS_REPORT_IO_HPP
#define CONFSETS_REPORT_IO_HPP

#include <string>

#include <json.hpp>

#include "confsets/harness.hpp"

namespace confsets {

/// One summary row per epsilon behind a "#schema=1" header comment. Table
/// columns carry 6 significant digits; an all-undefined risk prints as nan.
std::string report_to_csv(const ExperimentReport& report);

/// Full-precision mirror of the report, including per-repetition records.
nlohmann::json report_to_json(const ExperimentReport& report);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace confsets

#endif
