#include "simconf/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "simconf/error.hpp"

namespace simconf {

using Json = nlohmann::ordered_json;

double ats(const std::vector<GroupScores>& groups) {
  if (groups.empty()) throw DataError("ats: no groups to evaluate");
  std::size_t hits = 0;
  for (const GroupScores& g : groups) {
    if (g.confidences.empty())
      throw DataError("ats: group without evaluated samples");
    if (g.confidences.size() != g.rewards.size())
      throw DataError("ats: group has samples without rewards");
    std::size_t best = 0;
    for (std::size_t i = 1; i < g.confidences.size(); ++i)
      if (g.confidences[i] > g.confidences[best]) best = i;
    hits += g.rewards[best] == 1 ? 1u : 0u;
  }
  return static_cast<double>(hits) / static_cast<double>(groups.size());
}

std::vector<BinDiagnostic> calibration_bins(std::span<const double> confidences,
                                            std::span<const int> labels,
                                            std::size_t bin_count) {
  const std::size_t n = confidences.size();
  if (n != labels.size())
    throw UsageError("calibration_bins: confidences/labels length mismatch");
  if (bin_count == 0) throw UsageError("calibration_bins: bin_count must be > 0");
  if (n < bin_count)
    throw UsageError("calibration_bins: need at least one sample per bin");

  // Sort by confidence, ties by original index (stable).
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return confidences[a] < confidences[b];
  });

  const std::size_t base = n / bin_count;
  const std::size_t extra = n % bin_count;  // first `extra` bins get one more

  std::vector<BinDiagnostic> bins;
  bins.reserve(bin_count);
  std::size_t cursor = 0;
  for (std::size_t b = 0; b < bin_count; ++b) {
    const std::size_t size = base + (b < extra ? 1 : 0);
    BinDiagnostic bin;
    bin.count = size;
    double conf_sum = 0.0, label_sum = 0.0;
    for (std::size_t k = 0; k < size; ++k) {
      const std::size_t idx = order[cursor++];
      conf_sum += confidences[idx];
      label_sum += labels[idx];
    }
    bin.mean_confidence = conf_sum / static_cast<double>(size);
    bin.accuracy = label_sum / static_cast<double>(size);
    bins.push_back(bin);
  }
  return bins;
}

double ace(std::span<const double> confidences, std::span<const int> labels,
           std::size_t bin_count) {
  const auto bins = calibration_bins(confidences, labels, bin_count);
  double sum = 0.0;
  for (const BinDiagnostic& bin : bins)
    sum += std::abs(bin.accuracy - bin.mean_confidence);
  return sum / static_cast<double>(bins.size());
}

double auroc(std::span<const double> confidences, std::span<const int> labels) {
  const std::size_t n = confidences.size();
  if (n != labels.size())
    throw UsageError("auroc: confidences/labels length mismatch");

  std::size_t n_pos = 0;
  for (const int label : labels) n_pos += label == 1 ? 1u : 0u;
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0)
    throw DataError("auroc: undefined for single-class labels");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return confidences[a] < confidences[b];
  });

  // Midranks over tied runs.
  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n &&
           confidences[order[j + 1]] == confidences[order[i]])
      ++j;
    const double midrank = 0.5 * static_cast<double>(i + 1 + j + 1);
    for (std::size_t k = i; k <= j; ++k)
      if (labels[order[k]] == 1) rank_sum_pos += midrank;
    i = j + 1;
  }

  const double np = static_cast<double>(n_pos);
  const double nn = static_cast<double>(n_neg);
  return (rank_sum_pos - np * (np + 1.0) / 2.0) / (np * nn);
}

EvaluationReport make_report(const std::string& method,
                             const std::vector<ScoredGroup>& scored,
                             std::size_t bin_count) {
  EvaluationReport report;
  report.method = method;

  std::vector<GroupScores> groups;
  std::vector<double> confidences;
  std::vector<int> labels;
  for (const ScoredGroup& g : scored) {
    GroupScores gs;
    for (const ScoredSample& s : g.samples) {
      gs.confidences.push_back(s.confidence);
      gs.rewards.push_back(s.reward);
      confidences.push_back(s.confidence);
      labels.push_back(s.reward);
    }
    groups.push_back(std::move(gs));
  }

  report.n_eval = confidences.size();
  report.ats = ats(groups);
  report.bins = calibration_bins(confidences, labels, bin_count);
  double sum = 0.0;
  for (const BinDiagnostic& bin : report.bins)
    sum += std::abs(bin.accuracy - bin.mean_confidence);
  report.ace = sum / static_cast<double>(report.bins.size());
  try {
    report.auroc = auroc(confidences, labels);
  } catch (const DataError&) {
    report.auroc.reset();  // undefined, recorded as null
  }
  return report;
}

namespace {

Json report_to_json_value(const EvaluationReport& report) {
  Json j;
  j["method"] = report.method;
  j["n_eval"] = report.n_eval;
  j["ats"] = report.ats;
  j["ace"] = report.ace;
  if (report.auroc)
    j["auroc"] = *report.auroc;
  else
    j["auroc"] = nullptr;
  Json bins = Json::array();
  for (const BinDiagnostic& bin : report.bins) {
    Json b;
    b["mean_confidence"] = bin.mean_confidence;
    b["accuracy"] = bin.accuracy;
    b["count"] = bin.count;
    bins.push_back(std::move(b));
  }
  j["bins"] = std::move(bins);
  return j;
}

}  // namespace

std::string report_to_json(const EvaluationReport& report) {
  return report_to_json_value(report).dump(2);
}

std::string report_table(const EvaluationReport& report) {
  std::ostringstream out;
  out << std::left << std::setw(16) << "method" << std::right << std::setw(8)
      << "n_eval" << std::setw(10) << "ATS" << std::setw(10) << "ACE"
      << std::setw(10) << "AUROC" << '\n';
  out << std::left << std::setw(16) << report.method << std::right
      << std::setw(8) << report.n_eval << std::fixed << std::setprecision(4)
      << std::setw(10) << report.ats << std::setw(10) << report.ace;
  if (report.auroc)
    out << std::setw(10) << *report.auroc;
  else
    out << std::setw(10) << "n/a";
  out << '\n';
  out << '\n'
      << std::left << std::setw(6) << "bin" << std::right << std::setw(12)
      << "mean_conf" << std::setw(12) << "accuracy" << std::setw(8) << "count"
      << '\n';
  for (std::size_t b = 0; b < report.bins.size(); ++b) {
    out << std::left << std::setw(6) << b << std::right << std::fixed
        << std::setprecision(4) << std::setw(12)
        << report.bins[b].mean_confidence << std::setw(12)
        << report.bins[b].accuracy << std::setw(8) << report.bins[b].count
        << '\n';
  }
  return out.str();
}

std::string bins_csv(const EvaluationReport& report) {
  std::ostringstream out;
  out << "bin,mean_confidence,accuracy,count\n";
  for (std::size_t b = 0; b < report.bins.size(); ++b) {
    out << b << ',' << std::setprecision(17) << report.bins[b].mean_confidence
        << ',' << report.bins[b].accuracy << ',' << report.bins[b].count
        << '\n';
  }
  return out.str();
}

std::string per_temperature_json(const std::vector<ScoredGroup>& scored,
                                 std::size_t bin_count) {
  std::map<double, std::vector<ScoredGroup>> by_temperature;
  for (const ScoredGroup& g : scored) {
    std::map<double, ScoredGroup> slices;
    for (const ScoredSample& s : g.samples) {
      ScoredGroup& slice = slices[s.temperature];
      slice.query_id = g.query_id;
      slice.samples.push_back(s);
    }
    for (auto& [temperature, slice] : slices)
      by_temperature[temperature].push_back(std::move(slice));
  }

  Json out = Json::object();
  for (const auto& [temperature, groups] : by_temperature) {
    std::ostringstream key;
    key << temperature;
    Json entry;
    std::vector<double> confidences;
    std::vector<int> labels;
    for (const ScoredGroup& g : groups)
      for (const ScoredSample& s : g.samples) {
        confidences.push_back(s.confidence);
        labels.push_back(s.reward);
      }
    entry["n_eval"] = confidences.size();
    try {
      std::vector<GroupScores> gs;
      for (const ScoredGroup& g : groups) {
        GroupScores one;
        for (const ScoredSample& s : g.samples) {
          one.confidences.push_back(s.confidence);
          one.rewards.push_back(s.reward);
        }
        gs.push_back(std::move(one));
      }
      entry["ats"] = ats(gs);
    } catch (const Error&) {
      entry["ats"] = nullptr;
    }
    try {
      entry["ace"] = ace(confidences, labels, bin_count);
    } catch (const Error&) {
      entry["ace"] = nullptr;
    }
    try {
      entry["auroc"] = auroc(confidences, labels);
    } catch (const Error&) {
      entry["auroc"] = nullptr;
    }
    out[key.str()] = std::move(entry);
  }
  return out.dump(2);
}

}  // namespace simconf
