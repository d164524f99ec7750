#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace dpc::bench {

namespace {

constexpr double kPhaseSlack = 1e-12;

std::string kind_name(DetectorKind k) { return k == DetectorKind::OnOff ? "on_off" : "pnrd"; }

}  // namespace

Section::Section(const json& doc, std::string path) : doc_(doc), path_(std::move(path)) {
  if (doc_.is_null()) doc_ = json::object();
  if (!doc_.is_object()) {
    throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }
}

std::string Section::key_path(const std::string& key) const {
  return path_.empty() ? key : path_ + "." + key;
}

void Section::fail(const std::string& key, const std::string& message) const {
  throw ConfigError(key_path(key), message);
}

bool Section::has(const std::string& key) const { return doc_.contains(key); }

const json* Section::find(const std::string& key) {
  seen_.insert(key);
  const auto it = doc_.find(key);
  return it == doc_.end() ? nullptr : &*it;
}

double Section::real(const std::string& key, double fallback) {
  const json* v = find(key);
  if (!v) return fallback;
  if (!v->is_number()) fail(key, "expected a number");
  const double x = v->get<double>();
  if (!std::isfinite(x)) fail(key, "must be finite");
  return x;
}

long Section::integer(const std::string& key, long fallback) {
  const json* v = find(key);
  if (!v) return fallback;
  if (v->is_number_integer()) return v->get<long>();
  if (v->is_number_float()) {
    const double x = v->get<double>();
    if (std::isfinite(x) && x == std::floor(x) && std::abs(x) < 9e15) return static_cast<long>(x);
  }
  fail(key, "expected an integer");
}

std::uint64_t Section::unsigned64(const std::string& key, std::uint64_t fallback) {
  const json* v = find(key);
  if (!v) return fallback;
  if (v->is_number_unsigned()) return v->get<std::uint64_t>();
  if (v->is_number_integer() && v->get<long long>() >= 0) return static_cast<std::uint64_t>(v->get<long long>());
  fail(key, "expected a nonnegative 64-bit integer");
}

bool Section::boolean(const std::string& key, bool fallback) {
  const json* v = find(key);
  if (!v) return fallback;
  if (!v->is_boolean()) fail(key, "expected true or false");
  return v->get<bool>();
}

std::string Section::text(const std::string& key, const std::string& fallback) {
  const json* v = find(key);
  if (!v) return fallback;
  if (!v->is_string()) fail(key, "expected a string");
  return v->get<std::string>();
}

std::vector<double> Section::reals(const std::string& key, const std::vector<double>& fallback) {
  const json* v = find(key);
  if (!v) return fallback;
  if (!v->is_array() || v->empty()) fail(key, "expected a nonempty array of numbers");
  std::vector<double> out;
  for (const auto& e : *v) {
    if (!e.is_number() || !std::isfinite(e.get<double>())) fail(key, "expected finite numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

std::vector<long> Section::integers(const std::string& key, const std::vector<long>& fallback) {
  const json* v = find(key);
  if (!v) return fallback;
  if (!v->is_array() || v->empty()) fail(key, "expected a nonempty array of integers");
  std::vector<long> out;
  for (const auto& e : *v) {
    if (e.is_number_integer()) {
      out.push_back(e.get<long>());
    } else if (e.is_number_float() && e.get<double>() == std::floor(e.get<double>()) &&
               std::abs(e.get<double>()) < 9e15) {
      out.push_back(static_cast<long>(e.get<double>()));
    } else {
      fail(key, "expected integers");
    }
  }
  return out;
}

std::vector<std::string> Section::texts(const std::string& key, const std::vector<std::string>& fallback) {
  const json* v = find(key);
  if (!v) return fallback;
  if (!v->is_array() || v->empty()) fail(key, "expected a nonempty array of strings");
  std::vector<std::string> out;
  for (const auto& e : *v) {
    if (!e.is_string()) fail(key, "expected strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

Section Section::child(const std::string& key) {
  const json* v = find(key);
  return Section(v ? *v : json::object(), key_path(key));
}

std::vector<json> Section::objects(const std::string& key) {
  const json* v = find(key);
  if (!v) return {};
  if (!v->is_array()) fail(key, "expected an array of objects");
  return {v->begin(), v->end()};
}

void Section::finish() const {
  for (const auto& [key, value] : doc_.items()) {
    if (!seen_.contains(key)) throw ConfigError(key_path(key), "unknown key");
  }
}

ProbeSection read_probe(Section& parent, double alpha2_default, double beta2_default, json& resolved) {
  Section sec = parent.child("probe");
  ProbeSection out;
  out.alpha2 = sec.real("alpha2", alpha2_default);
  out.beta2 = sec.real("beta2", sec.has("alpha2") && !sec.has("beta2") ? out.alpha2 : beta2_default);
  sec.finish();
  if (out.alpha2 < 0.0) sec.fail("alpha2", "mean photon number must be >= 0");
  if (out.beta2 < 0.0) sec.fail("beta2", "mean photon number must be >= 0");
  out.probe = ProbeConfig::from_mean_photons(out.alpha2, out.beta2);
  resolved["probe"] = {{"alpha2", out.alpha2}, {"beta2", out.beta2}};
  return out;
}

DetectorModel read_detector_object(Section& sec, const DetectorModel& fallback, const ProbeConfig& probe,
                                   json& resolved) {
  DetectorModel det = fallback;
  det.eta = sec.real("eta", fallback.eta);
  det.nu = sec.real("nu", fallback.nu);
  det.xi = sec.real("xi", fallback.xi);
  const std::string kind = sec.text("kind", kind_name(fallback.kind));
  if (kind == "pnrd") {
    det.kind = DetectorKind::NumberResolving;
  } else if (kind == "on_off") {
    det.kind = DetectorKind::OnOff;
  } else {
    sec.fail("kind", "expected \"pnrd\" or \"on_off\", got \"" + kind + "\"");
  }
  det.fock_cutoff = static_cast<int>(sec.integer("fock_cutoff", default_fock_cutoff(probe)));
  if (!(det.eta >= 0.0 && det.eta <= 1.0)) sec.fail("eta", "must lie in [0, 1]");
  if (!(det.nu >= 0.0)) sec.fail("nu", "must be >= 0");
  if (!(det.xi >= 0.0 && det.xi <= 1.0)) sec.fail("xi", "must lie in [0, 1]");
  if (det.fock_cutoff < 1) sec.fail("fock_cutoff", "must be >= 1");
  resolved = {{"eta", det.eta},   {"nu", det.nu}, {"xi", det.xi}, {"kind", kind_name(det.kind)},
              {"fock_cutoff", det.fock_cutoff}};
  return det;
}

DetectorModel read_detector(Section& parent, const DetectorModel& fallback, const ProbeConfig& probe,
                            json& resolved) {
  Section sec = parent.child("detector");
  json out;
  DetectorModel det = read_detector_object(sec, fallback, probe, out);
  sec.finish();
  resolved["detector"] = out;
  return det;
}

std::string model_name(LikelihoodModel m) {
  return m == LikelihoodModel::PaperVerbatim ? "paper_verbatim" : "generalized";
}

LikelihoodModel read_model(Section& parent, LikelihoodModel fallback, json& resolved) {
  const std::string name = parent.text("model", model_name(fallback));
  LikelihoodModel m{};
  if (name == "generalized") {
    m = LikelihoodModel::GeneralizedInterference;
  } else if (name == "paper_verbatim") {
    m = LikelihoodModel::PaperVerbatim;
  } else {
    parent.fail("model", "expected \"generalized\" or \"paper_verbatim\", got \"" + name + "\"");
  }
  resolved["model"] = model_name(m);
  return m;
}

Scheme parse_scheme(const Section& sec, const std::string& key, const std::string& name) {
  if (name == "displaced") return Scheme::DisplacedCounting;
  if (name == "homodyne") return Scheme::Homodyne;
  if (name == "heterodyne") return Scheme::Heterodyne;
  sec.fail(key, "expected \"displaced\", \"homodyne\" or \"heterodyne\", got \"" + name + "\"");
}

Scheme read_scheme(Section& parent, const std::string& key, Scheme fallback, json& resolved) {
  const Scheme s = parse_scheme(parent, key, parent.text(key, std::string(scheme_name(fallback))));
  resolved[key] = std::string(scheme_name(s));
  return s;
}

std::vector<double> read_phase_grid(Section& parent, const std::vector<double>& fallback, bool open_interval,
                                    json& resolved) {
  Section sec = parent.child("phi");
  std::vector<double> phis;
  if (sec.has("values")) {
    phis = sec.reals("values", {});
    if (sec.has("start") || sec.has("stop") || sec.has("count")) {
      sec.fail("values", "give either values or start/stop/count, not both");
    }
  } else if (sec.has("count") || sec.has("start") || sec.has("stop")) {
    const double start = sec.real("start", 0.0);
    const double stop = sec.real("stop", std::numbers::pi);
    const long count = sec.integer("count", 181);
    if (count < 1) sec.fail("count", "must be >= 1");
    if (count == 1) {
      phis = {start};
    } else {
      for (long i = 0; i < count; ++i) phis.push_back(start + (stop - start) * i / (count - 1));
      phis.back() = stop;
    }
  } else {
    phis = fallback;
  }
  sec.finish();
  for (double& phi : phis) {
    if (open_interval ? !(phi > 0.0 && phi < std::numbers::pi)
                      : !(phi >= -kPhaseSlack && phi <= std::numbers::pi + kPhaseSlack)) {
      sec.fail("values", std::string("phases must lie in ") + (open_interval ? "(0, pi)" : "[0, pi]") +
                             ", got " + std::to_string(phi));
    }
    phi = std::clamp(phi, 0.0, std::numbers::pi);
  }
  resolved["phi"] = {{"values", phis}};
  return phis;
}

FiOptions read_fi_options(Section& parent, LikelihoodModel model, json& resolved) {
  Section sec = parent.child("fi");
  FiOptions opts;
  opts.model = model;
  const std::string rule = sec.text("derivative", "analytic");
  const double step = sec.real("step", CentralDifference{}.step);
  if (rule == "analytic") {
    opts.derivative = AnalyticDerivative{};
  } else if (rule == "central") {
    if (!(step > 0.0)) sec.fail("step", "must be > 0");
    opts.derivative = CentralDifference{step};
  } else {
    sec.fail("derivative", "expected \"analytic\" or \"central\", got \"" + rule + "\"");
  }
  opts.count_tail_mass = sec.real("count_tail_mass", opts.count_tail_mass);
  opts.quad_points = static_cast<int>(sec.integer("quad_points", opts.quad_points));
  sec.finish();
  if (!(opts.count_tail_mass > 0.0 && opts.count_tail_mass <= 1e-6)) {
    sec.fail("count_tail_mass", "must lie in (0, 1e-6]");
  }
  if (opts.quad_points < 64) sec.fail("quad_points", "must be >= 64");
  resolved["fi"] = {{"derivative", rule},
                    {"step", step},
                    {"count_tail_mass", opts.count_tail_mass},
                    {"quad_points", opts.quad_points}};
  return opts;
}

DetectorModel experiment_detector() {
  return DetectorModel{0.602, 1.13e-4, 0.993, DetectorKind::OnOff, 30};
}

}  // namespace dpc::bench
