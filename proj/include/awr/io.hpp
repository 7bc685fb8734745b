#pragma once

#include "awr/estimator.hpp"
#include "awr/pipeline.hpp"
#include "awr/simulation.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>

namespace awr {

/// Reads a header-first CSV with a `y` column; every other column is a
/// covariate, in file order. Parsing ignores the locale.
Dataset read_csv(const std::filesystem::path& path);

/// Inverse of read_csv with columns y, x1, ..., xq at 17 significant digits.
void write_csv(const std::filesystem::path& path, const Dataset& data);

/// Serializes JSON with every floating value at 17 significant digits and
/// non-finite values as null.
std::string dump_json(const nlohmann::json& value, int indent = 2);

/// Plain-JSON fit report; key set and nesting are fixed.
nlohmann::json fit_report_json(const AdaptiveFit& result,
                               const std::string& weights_kind,
                               const LossFunction& loss);

nlohmann::json sim_config_json(const SimConfig& config);
nlohmann::json sim_summary_json(const SimSummary& summary);

/// Per-replication CSV: replication, method, sq_error, status.
void write_errors_csv(std::ostream& out, const SimSummary& summary);

} // namespace awr
