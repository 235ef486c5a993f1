#pragma once

#include <json.hpp>

#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

#include "gmvalloc/allocators.hpp"
#include "gmvalloc/gmv_objectives.hpp"
#include "gmvalloc/kelly.hpp"
#include "gmvalloc/market_model.hpp"
#include "gmvalloc/mc_oracle.hpp"

// JSON and CSV wire formats.  Ordered JSON keeps output key order stable so
// identical runs produce identical bytes.  Readers are fail-closed: an
// unknown key is an error, not a warning, because a silently ignored typo in
// a risk config is how money gets lost.
namespace gmv::io {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

// Parse errors are reported as std::invalid_argument so the CLI can map
// every bad-input failure to the same exit code.
Json parse_json_text(const std::string& text, const char* context);
Json read_json_file(const std::string& path);

// Write via a temp file in the same directory plus rename, so readers never
// observe a half-written file.
void write_file_atomic(const std::string& path, const std::string& contents);

// Reject keys outside the allowlist.
void check_keys(const Json& j, std::initializer_list<std::string_view> allowed,
                const char* context);
void check_schema_version(const Json& j, const char* context);

double get_number(const Json& j, const char* key, const char* context);
double get_number_or(const Json& j, const char* key, double fallback,
                     const char* context);
long long get_integer(const Json& j, const char* key, const char* context);
long long get_integer_or(const Json& j, const char* key, long long fallback,
                         const char* context);
bool get_bool_or(const Json& j, const char* key, bool fallback, const char* context);
std::string get_string(const Json& j, const char* key, const char* context);

Json to_json(const Eigen::VectorXd& v);
Json to_json(const Eigen::MatrixXd& m);  // row-major array of arrays
Eigen::VectorXd vector_from_json(const Json& j, const char* context);
Eigen::MatrixXd matrix_from_json(const Json& j, const char* context);

Json to_json(const ReturnModel& model);
ReturnModel return_model_from_json(const Json& j);

Json to_json(const PosteriorBelief& belief);
PosteriorBelief belief_from_json(const Json& j);

Json to_json(const HorizonSpec& horizon);
HorizonSpec horizon_from_json(const Json& j);

LeverageInputs leverage_inputs_from_json(const Json& j);
BinaryBet binary_bet_from_json(const Json& j);
BayesBinaryBet bayes_bet_from_json(const Json& j);
Gamble gamble_from_json(const Json& j);
CalibrationFamily calibration_family_from_json(const Json& j);
mc::SimConfig sim_config_from_json(const Json& j);

Json to_json(const AllocationResult& result);
Json to_json(const LeverageResult& result);   // NaN diagnostics are omitted
Json to_json(const mc::PathStats& stats);
Json to_json(const CalibrationResult& result);

// 17 significant digits: enough to round-trip a double exactly.
std::string format_full(double x);

// RFC 4180: CRLF line endings, quoting only where needed.
std::string to_csv(const std::vector<std::string>& header,
                   const std::vector<std::vector<double>>& rows);

}  // namespace gmv::io
