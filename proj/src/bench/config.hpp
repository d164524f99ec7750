#pragma once

// Typed reader over one JSON object of a run configuration. Every key that
// is read is recorded; finish() rejects whatever is left over.

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "dpc/bench.hpp"
#include "dpc/fisher.hpp"
#include "dpc/photonics.hpp"

namespace dpc::bench {

using nlohmann::json;

class Section {
 public:
  Section(const json& doc, std::string path);

  bool has(const std::string& key) const;
  double real(const std::string& key, double fallback);
  long integer(const std::string& key, long fallback);
  std::uint64_t unsigned64(const std::string& key, std::uint64_t fallback);
  bool boolean(const std::string& key, bool fallback);
  std::string text(const std::string& key, const std::string& fallback);
  std::vector<double> reals(const std::string& key, const std::vector<double>& fallback);
  std::vector<long> integers(const std::string& key, const std::vector<long>& fallback);
  std::vector<std::string> texts(const std::string& key, const std::vector<std::string>& fallback);
  /// Nested object, or an empty object when absent.
  Section child(const std::string& key);
  /// Raw array of objects, empty when absent.
  std::vector<json> objects(const std::string& key);

  std::string key_path(const std::string& key) const;
  [[noreturn]] void fail(const std::string& key, const std::string& message) const;
  void finish() const;

 private:
  const json* find(const std::string& key);

  json doc_;
  std::string path_;
  std::set<std::string> seen_;
};

struct ProbeSection {
  ProbeConfig probe{0.0, 0.0};
  double alpha2 = 0.0;
  double beta2 = 0.0;
};

ProbeSection read_probe(Section& parent, double alpha2_default, double beta2_default, json& resolved);

DetectorModel read_detector(Section& parent, const DetectorModel& fallback, const ProbeConfig& probe,
                            json& resolved);
DetectorModel read_detector_object(Section& sec, const DetectorModel& fallback, const ProbeConfig& probe,
                                   json& resolved);

LikelihoodModel read_model(Section& parent, LikelihoodModel fallback, json& resolved);
std::string model_name(LikelihoodModel m);

Scheme read_scheme(Section& parent, const std::string& key, Scheme fallback, json& resolved);
Scheme parse_scheme(const Section& sec, const std::string& key, const std::string& name);

/// "phi" section: either {"values": [...]} or {"start", "stop", "count"}.
std::vector<double> read_phase_grid(Section& parent, const std::vector<double>& fallback, bool open_interval,
                                    json& resolved);

FiOptions read_fi_options(Section& parent, LikelihoodModel model, json& resolved);

/// Experiment parameters used by the simulate/saturate defaults.
DetectorModel experiment_detector();

}  // namespace dpc::bench
