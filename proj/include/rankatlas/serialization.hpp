#pragma once

// JSON and plain-text formats for tensors, maps, bounds, certificates and
// experiment reports.

#include <iosfwd>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "rankatlas/bilinear.hpp"
#include "rankatlas/certifier.hpp"
#include "rankatlas/experiments.hpp"
#include "rankatlas/hopf.hpp"
#include "rankatlas/trank.hpp"

namespace rankatlas {

using Json = nlohmann::json;

/// Malformed input; field() names the offending field.
class FormatError : public std::runtime_error {
 public:
  FormatError(std::string field, const std::string& message);
  [[nodiscard]] const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

Json to_json(const Tensor3& t);
Tensor3 tensor_from_json(const Json& j);
/// "d1 d2 d3" then d3 blocks of d1 rows with d2 entries each.
Tensor3 tensor_from_text(std::istream& in);
void write_tensor_text(std::ostream& out, const Tensor3& t);
/// JSON if the first non-space character is '{', plain text otherwise.
Tensor3 read_tensor_file(const std::string& path);

Json to_json(const BilinearMap& f);
BilinearMap bilinear_from_json(const Json& j);

Json to_json(const HashBoundsTable& table);
HashBoundsTable bounds_from_json(const Json& j);

Json to_json(const Matrix& m);  // row-major nested arrays
Json to_json(const RankCertificate& cert);
Json to_json(const CertifyResult& result);
Json to_json(const TrankResult& r);

ExperimentConfig experiment_config_from_json(const Json& j);
Json summary_json(const ExperimentReport& report);
void write_csv(std::ostream& out, const ExperimentReport& report);
/// Writes the CSV and summary paths named in the config (empty paths are skipped).
void write_experiment_outputs(const ExperimentReport& report);

/// Reads and parses a JSON file; failures name the path.
Json read_json_file(const std::string& path);

}  // namespace rankatlas
