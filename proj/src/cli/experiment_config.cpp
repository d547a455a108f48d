#include "qsrc/cli/experiment_config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace qsrc::cli {

using json = nlohmann::json;
using linalg::Complex;
using linalg::ComplexMatrix;
using linalg::ComplexVector;

std::string to_string(CommandKind kind) {
  switch (kind) {
    case CommandKind::holevo: return "holevo";
    case CommandKind::binary_smin: return "binary-smin";
    case CommandKind::rd_sweep: return "rd-sweep";
    case CommandKind::props: return "props";
    case CommandKind::protocol: return "protocol";
  }
  return "unknown";
}

namespace {

class Parser {
public:
  explicit Parser(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const std::string& where, const std::string& what) const {
    throw ConfigError(source_ + ": at " + (where.empty() ? "/" : where) + ": " + what);
  }

  double number(const json& j, const std::string& where) const {
    if (!j.is_number()) fail(where, "expected a number");
    const double x = j.get<double>();
    if (!std::isfinite(x)) fail(where, "number is not finite");
    return x;
  }

  std::size_t count(const json& j, const std::string& where) const {
    if (!j.is_number_integer() || j.get<long long>() < 0) fail(where, "expected a nonnegative integer");
    return j.get<std::size_t>();
  }

  Complex complex(const json& j, const std::string& where) const {
    if (j.is_number()) return {number(j, where), 0.0};
    if (!j.is_array() || j.size() != 2) fail(where, "expected a complex number [re, im]");
    return {number(j[0], where + "/0"), number(j[1], where + "/1")};
  }

  ComplexVector vector(const json& j, const std::string& where) const {
    if (!j.is_array() || j.empty()) fail(where, "expected a nonempty array of amplitudes");
    ComplexVector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = complex(j[i], where + "/" + std::to_string(i));
    return v;
  }

  ComplexMatrix matrix(const json& j, const std::string& where) const {
    if (!j.is_array() || j.empty()) fail(where, "expected a nonempty array of rows");
    const std::size_t n = j.size();
    ComplexMatrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t r = 0; r < n; ++r) {
      const std::string rw = where + "/" + std::to_string(r);
      if (!j[r].is_array() || j[r].size() != n) fail(rw, "matrix must be square with " + std::to_string(n) + " columns");
      for (std::size_t c = 0; c < n; ++c)
        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = complex(j[r][c], rw + "/" + std::to_string(c));
    }
    return m;
  }

  DensityMatrix state(const json& j, const std::string& where) const {
    int forms = 0;
    for (const char* key : {"bloch", "pure", "matrix"}) forms += j.contains(key) ? 1 : 0;
    if (forms != 1) fail(where, "member needs exactly one of \"bloch\", \"pure\", \"matrix\"");
    try {
      if (j.contains("bloch")) {
        const auto& b = j["bloch"];
        if (!b.is_array() || b.size() != 3) fail(where + "/bloch", "expected [x, y, z]");
        return DensityMatrix::from_bloch(number(b[0], where + "/bloch/0"), number(b[1], where + "/bloch/1"),
                                         number(b[2], where + "/bloch/2"));
      }
      if (j.contains("pure")) return DensityMatrix::from_pure(PureState::from_amplitudes(vector(j["pure"], where + "/pure")));
      return DensityMatrix::from_matrix(matrix(j["matrix"], where + "/matrix"));
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      fail(where, e.what());
    }
  }

  Ensemble ensemble(const json& j, const std::string& where) const {
    if (!j.is_array() || j.empty()) fail(where, "expected a nonempty array of members");
    std::vector<double> probs;
    std::vector<DensityMatrix> states;
    for (std::size_t i = 0; i < j.size(); ++i) {
      const std::string w = where + "/" + std::to_string(i);
      const auto& m = j[i];
      if (!m.is_object()) fail(w, "member must be an object");
      for (auto it = m.begin(); it != m.end(); ++it)
        if (it.key() != "p" && it.key() != "bloch" && it.key() != "pure" && it.key() != "matrix")
          fail(w + "/" + it.key(), "unknown member field");
      if (!m.contains("p")) fail(w, "member needs a probability \"p\"");
      probs.push_back(number(m["p"], w + "/p"));
      states.push_back(state(m, w));
      if (states.back().dim() != states.front().dim()) fail(w, "member dimension differs from member 0");
    }
    try {
      return Ensemble(std::move(probs), std::move(states));
    } catch (const Error& e) {
      fail(where, e.what());
    }
  }

private:
  std::string source_;
};

std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < text.size() && i + 1 < byte; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::string& source_name) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte);
    throw ConfigError(source_name + ":" + std::to_string(line) + ":" + std::to_string(col) + ": invalid JSON");
  }
  const Parser p(source_name);
  if (!doc.is_object()) p.fail("", "configuration must be a JSON object");
  static const std::set<std::string> known = {"kind", "ensemble", "N", "rates", "protocols", "mode", "delta",
                                              "seed", "samples", "exact_budget", "dense_cap", "props", "comment"};
  for (auto it = doc.begin(); it != doc.end(); ++it)
    if (!known.count(it.key())) p.fail("/" + it.key(), "unknown field");

  ExperimentConfig cfg;
  if (!doc.contains("kind") || !doc["kind"].is_string()) p.fail("/kind", "missing or not a string");
  const std::string kind = doc["kind"].get<std::string>();
  if (kind == "holevo") cfg.kind = CommandKind::holevo;
  else if (kind == "binary-smin") cfg.kind = CommandKind::binary_smin;
  else if (kind == "rd-sweep") cfg.kind = CommandKind::rd_sweep;
  else if (kind == "props") cfg.kind = CommandKind::props;
  else if (kind == "protocol") cfg.kind = CommandKind::protocol;
  else p.fail("/kind", "unknown kind \"" + kind + "\"");

  if (doc.contains("ensemble")) cfg.ensemble = p.ensemble(doc["ensemble"], "/ensemble");
  if (cfg.kind != CommandKind::props && !cfg.ensemble) p.fail("/ensemble", "required for kind " + kind);
  if (cfg.kind == CommandKind::binary_smin && cfg.ensemble->size() != 2)
    p.fail("/ensemble", "binary-smin needs exactly 2 members, got " + std::to_string(cfg.ensemble->size()));

  if (doc.contains("N")) {
    const auto& n = doc["N"];
    if (!n.is_array()) p.fail("/N", "expected an array of block lengths");
    for (std::size_t i = 0; i < n.size(); ++i) {
      const std::size_t v = p.count(n[i], "/N/" + std::to_string(i));
      if (v == 0) p.fail("/N/" + std::to_string(i), "block length must be positive");
      cfg.block_lengths.push_back(v);
    }
  }
  if (doc.contains("rates")) {
    const auto& r = doc["rates"];
    if (!r.is_array()) p.fail("/rates", "expected an array of rates");
    for (std::size_t i = 0; i < r.size(); ++i) {
      const double v = p.number(r[i], "/rates/" + std::to_string(i));
      if (v < 0.0) p.fail("/rates/" + std::to_string(i), "rate must be nonnegative");
      cfg.rates.push_back(v);
    }
  }
  if (cfg.kind == CommandKind::rd_sweep || cfg.kind == CommandKind::protocol) {
    if (cfg.block_lengths.empty()) p.fail("/N", "required nonempty for kind " + kind);
    if (cfg.rates.empty()) p.fail("/rates", "required nonempty for kind " + kind);
  }
  if (doc.contains("protocols")) {
    const auto& ps = doc["protocols"];
    if (!ps.is_array() || ps.empty()) p.fail("/protocols", "expected a nonempty array");
    cfg.protocols.clear();
    for (std::size_t i = 0; i < ps.size(); ++i) {
      const std::string w = "/protocols/" + std::to_string(i);
      if (!ps[i].is_string()) p.fail(w, "expected a protocol name");
      const std::string name = ps[i].get<std::string>();
      if (name == "blind_sj") cfg.protocols.push_back(ProtocolKind::blind_sj);
      else if (name == "composed_purified") cfg.protocols.push_back(ProtocolKind::composed_purified);
      else p.fail(w, "unknown protocol \"" + name + "\"");
    }
  }
  if (doc.contains("mode")) {
    if (!doc["mode"].is_string()) p.fail("/mode", "expected \"topk\" or \"delta\"");
    const std::string m = doc["mode"].get<std::string>();
    if (m == "topk") cfg.mode.mode = SubspaceMode::top_k;
    else if (m == "delta") cfg.mode.mode = SubspaceMode::delta;
    else p.fail("/mode", "expected \"topk\" or \"delta\"");
  }
  if (doc.contains("delta")) {
    cfg.mode.delta = p.number(doc["delta"], "/delta");
    if (!(cfg.mode.delta > 0.0)) p.fail("/delta", "delta must be positive");
  }
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) p.fail("/seed", "expected an unsigned 64-bit integer");
    cfg.seed = doc["seed"].get<std::uint64_t>();
    cfg.estimation.seed = *cfg.seed;
  }
  if (doc.contains("samples")) {
    cfg.estimation.samples = p.count(doc["samples"], "/samples");
    if (cfg.estimation.samples == 0) p.fail("/samples", "must be positive");
  }
  if (doc.contains("exact_budget")) cfg.estimation.exact_budget = p.count(doc["exact_budget"], "/exact_budget");
  if (doc.contains("dense_cap")) {
    cfg.run.limits.dense_cap = p.count(doc["dense_cap"], "/dense_cap");
    if (cfg.run.limits.dense_cap == 0) p.fail("/dense_cap", "must be positive");
  }
  if (doc.contains("props")) {
    const auto& pr = doc["props"];
    if (!pr.is_object()) p.fail("/props", "expected an object");
    for (auto it = pr.begin(); it != pr.end(); ++it) {
      const std::string w = "/props/" + it.key();
      if (it.key() == "contractivity") cfg.props.contractivity = p.count(it.value(), w);
      else if (it.key() == "monotonicity") cfg.props.monotonicity = p.count(it.value(), w);
      else if (it.key() == "fannes") cfg.props.fannes = p.count(it.value(), w);
      else if (it.key() == "lemma") cfg.props.lemma = p.count(it.value(), w);
      else if (it.key() == "inject_tampered_channel") {
        if (!it.value().is_boolean()) p.fail(w, "expected true or false");
        cfg.props.inject_tampered_channel = it.value().get<bool>();
      } else {
        p.fail(w, "unknown field");
      }
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ": cannot open configuration file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

void apply_overrides(ExperimentConfig& cfg, std::optional<std::uint64_t> seed, std::optional<std::size_t> threads,
                     const char* dense_cap_env) {
  if (seed) {
    cfg.seed = seed;
    cfg.estimation.seed = *seed;
  }
  if (threads) cfg.run.threads = std::max<std::size_t>(1, *threads);
  if (dense_cap_env != nullptr && *dense_cap_env != '\0') {
    const std::string s(dense_cap_env);
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || v == 0) throw ConfigError("QSRC_DENSE_CAP: expected a positive integer, got \"" + s + "\"");
    cfg.run.limits.dense_cap = static_cast<std::size_t>(v);
  }
}

}  // namespace qsrc::cli
