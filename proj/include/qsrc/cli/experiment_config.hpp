// Experiment configuration: one JSON document per run.
//
//   {
//     "kind": "rd-sweep",                 // holevo | binary-smin | rd-sweep | props | protocol
//     "ensemble": [
//       {"p": 0.5, "bloch": [0, 0, 1]},
//       {"p": 0.5, "pure": [[0.7071, 0], [0.7071, 0]]},
//       {"p": 0.0, "matrix": [[[1, 0], [0, 0]], [[0, 0], [0, 0]]]}
//     ],
//     "N": [4, 6, 8],                     // block lengths (k for the composed protocol)
//     "rates": [0.5, 0.75],
//     "protocols": ["blind_sj", "composed_purified"],
//     "mode": "topk",                     // or "delta" with "delta": 0.1
//     "seed": 7, "samples": 10000, "exact_budget": 4096, "dense_cap": 4096,
//     "props": {"contractivity": 500, "monotonicity": 500, "fannes": 1000, "lemma": 200,
//               "inject_tampered_channel": false}
//   }
//
// Complex numbers are [re, im] pairs (a bare number is a real entry);
// matrices are row-major nested arrays.
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qsrc/compression.hpp"

namespace qsrc::cli {

/// Bad configuration. The message starts with the source name and either a
/// line:column (syntax errors) or the JSON pointer of the offending value.
class ConfigError : public Error {
public:
  using Error::Error;
};

enum class CommandKind { holevo, binary_smin, rd_sweep, props, protocol };

std::string to_string(CommandKind kind);

struct PropsConfig {
  std::size_t contractivity = 500;
  std::size_t monotonicity = 500;
  std::size_t fannes = 1000;
  std::size_t lemma = 200;
  bool inject_tampered_channel = false;
};

struct ExperimentConfig {
  CommandKind kind = CommandKind::holevo;
  std::optional<Ensemble> ensemble;
  std::vector<std::size_t> block_lengths;
  std::vector<double> rates;
  std::vector<ProtocolKind> protocols{ProtocolKind::blind_sj};
  SubspaceSpec mode;
  std::optional<std::uint64_t> seed;
  EstimationConfig estimation;
  RunOptions run;
  PropsConfig props;
};

/// Parses and validates; states are checked here, so a bad matrix is a
/// configuration error that names its location.
ExperimentConfig parse_config(const std::string& text, const std::string& source_name = "config");
ExperimentConfig load_config(const std::string& path);

/// Applies --seed, --threads and the QSRC_DENSE_CAP environment variable.
void apply_overrides(ExperimentConfig& cfg, std::optional<std::uint64_t> seed, std::optional<std::size_t> threads,
                     const char* dense_cap_env);

}  // namespace qsrc::cli
