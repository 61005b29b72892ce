#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace simconf {

inline constexpr std::size_t kDefaultBinCount = 5;

// Equal-count calibration bin: mean confidence, empirical accuracy, size.
struct BinDiagnostic {
  double mean_confidence = 0.0;
  double accuracy = 0.0;
  std::size_t count = 0;
};

struct EvaluationReport {
  std::string method;
  double ats = 0.0;
  double ace = 0.0;
  std::optional<double> auroc;  // undefined (single-class) stays null
  std::vector<BinDiagnostic> bins;
  std::size_t n_eval = 0;
};

// Confidences and rewards of one group's evaluated samples, in canonical
// sample order.
struct GroupScores {
  std::vector<double> confidences;
  std::vector<int> rewards;
};

// Accuracy from top selection: fraction of groups whose highest-confidence
// sample is correct. Ties pick the lowest canonical position.
double ats(const std::vector<GroupScores>& groups);

// Adaptive calibration error over `bin_count` equal-count bins: samples are
// sorted by confidence (ties by original index), split into contiguous bins
// with the first n mod B bins one larger, and ACE is the mean of
// |accuracy - mean confidence| over bins.
double ace(std::span<const double> confidences, std::span<const int> labels,
           std::size_t bin_count = kDefaultBinCount);

// The bins behind ace(), exposed for report diagnostics.
std::vector<BinDiagnostic> calibration_bins(std::span<const double> confidences,
                                            std::span<const int> labels,
                                            std::size_t bin_count);

// Mann-Whitney AUROC with midrank tie handling. DataError when labels are
// single-class (the metric is undefined).
double auroc(std::span<const double> confidences, std::span<const int> labels);

// One scored evaluated sample of a test group.
struct ScoredSample {
  std::size_t position = 0;  // canonical index within the group
  double temperature = 0.0;
  int sample_index = 0;
  double confidence = 0.0;
  int reward = 0;
};

struct ScoredGroup {
  std::string query_id;
  std::vector<ScoredSample> samples;
};

// Assembles ATS (group level) and pooled ACE/AUROC with bin diagnostics.
// AUROC errors are recorded as null; ACE errors propagate.
EvaluationReport make_report(const std::string& method,
                             const std::vector<ScoredGroup>& scored,
                             std::size_t bin_count = kDefaultBinCount);

std::string report_to_json(const EvaluationReport& report);
std::string report_table(const EvaluationReport& report);
std::string bins_csv(const EvaluationReport& report);

// Reports restricted to each temperature present in the scored data,
// serialized as one JSON object keyed by temperature. Metrics that are
// uncomputable on a slice (too few samples, single class) appear as null.
std::string per_temperature_json(const std::vector<ScoredGroup>& scored,
                                 std::size_t bin_count = kDefaultBinCount);

}  // namespace simconf
