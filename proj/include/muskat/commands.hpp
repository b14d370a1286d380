#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "muskat/run_config.hpp"

namespace muskat {

/// Version tag written into every JSON report and CSV header.
inline constexpr const char* kOutputFormat = "muskat-mix/1";

/// Exit codes of the command-line tool.
enum ExitCode : int { exit_ok = 0, exit_failure = 1, exit_config = 2, exit_numerical = 3, exit_uncertified = 4 };

/// Rows of decimal numbers with 17 significant digits; `header` names the columns.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);
void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

/// Each command writes its files into `out` and returns the JSON report it wrote.
nlohmann::json run_identities(const RunConfig& rc, const std::filesystem::path& out);
nlohmann::json run_expand(const RunConfig& rc, const std::filesystem::path& out);
nlohmann::json run_fields(const RunConfig& rc, double t, const std::filesystem::path& out);
nlohmann::json run_validate(const RunConfig& rc, const std::filesystem::path& out);
nlohmann::json run_evolve(const RunConfig& rc, const std::filesystem::path& out);

nlohmann::json to_json(const AdmissibilityReport& rep);
nlohmann::json to_json(const LadderRow& row);

}  // namespace muskat
