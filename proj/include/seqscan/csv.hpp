#pragma once

#include <filesystem>
#include <ostream>
#include <span>
#include <string>

#include "seqscan/experiment.hpp"

namespace seqscan {

class CsvError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numbers use 10 significant digits; NaN is an empty field.
std::string format_number(double x);

/// Summary table, one row per (sweep point, policy) in run order. A failed
/// batch keeps its row with the message in the trailing `error` column.
void write_summary_csv(std::ostream& out, std::span<const BatchSummary> rows);

/// Bayes-risk table for c_e sweeps: log10 c_e against log10 R.
void write_risk_csv(std::ostream& out, std::span<const BatchSummary> rows);

/// One row per (episode, process).
void write_episode_csv(std::ostream& out, std::span<const EpisodeRecord> records);

/// File wrappers; failures throw CsvError naming the path.
void emit_csv(std::span<const BatchSummary> rows, const std::filesystem::path& path);
void emit_risk_csv(std::span<const BatchSummary> rows, const std::filesystem::path& path);
void emit_episode_csv(std::span<const EpisodeRecord> records, const std::filesystem::path& path);

}  // namespace seqscan
