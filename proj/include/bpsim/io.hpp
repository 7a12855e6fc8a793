#pragma once
// Configuration resolution, CSV/JSON emission and serialization of results.

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "bpsim/attack.hpp"
#include "bpsim/game.hpp"
#include "bpsim/graph.hpp"
#include "bpsim/market.hpp"
#include "bpsim/ode.hpp"
#include "bpsim/population.hpp"
#include "bpsim/warning.hpp"

namespace bpsim::io {

using Json = nlohmann::ordered_json;

// Twelve significant digits, the format of every floating-point artifact.
std::string fmt(double v);

class CsvWriter {
 public:
  CsvWriter(std::ostream& os, const std::vector<std::string>& header);
  // Appends one row; numbers are formatted with fmt, integers verbatim.
  void row(const std::vector<double>& values);
  void raw_row(const std::vector<std::string>& cells);

 private:
  std::ostream& os_;
  std::size_t columns_;
};

void write_trajectory_csv(std::ostream& os, const Trajectory& t);
void write_beta_trace_csv(std::ostream& os, const std::vector<double>& betas);
void write_learn_trace_csv(std::ostream& os, const std::vector<LearnTracePoint>& trace);
void write_epochs_csv(std::ostream& os, const std::vector<EpochRow>& rows);
void write_study_csv(std::ostream& os, const StudySummary& s);

Json to_json(const EquilibriumReport& r);
Json to_json(const AttackAnalysis& a);
Json to_json(const MechanismDesign& d);
Json to_json(const MarketMetrics& m);
Json to_json(const TefFit& f);
Json to_json(const AiDesign& d);
Json to_json(const NeReport& r);

// Typed, range-checked parameter declarations for a command.
enum class ParamType { real, integer, boolean, text };

struct ParamSpec {
  std::string key;
  ParamType type = ParamType::real;
  Json default_value;  // null means required
  std::string help;
  std::optional<double> min, max;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct MissingParameter : ConfigError {
  std::string key;
  explicit MissingParameter(const std::string& k) : ConfigError("missing required parameter: " + k), key(k) {}
};

// Merges a JSON object (from a file) with string overrides (from flags);
// overrides win. Unknown keys, type errors and range violations throw.
Json resolve_config(const std::vector<ParamSpec>& specs, const Json& file_values,
                    const std::map<std::string, std::string>& overrides);
Json load_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);
// Sidecar path for an artifact: "<path>.config.json".
std::string sidecar_path(const std::string& artifact);

}  // namespace bpsim::io
