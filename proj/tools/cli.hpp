#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "syzlab/gvbps.hpp"

namespace syzlab::cli {

/// One invocation; `args` excludes the program name. Artifacts are written
/// under --out, a one-line summary goes to `out`, error JSON to `err`.
/// Exit codes: 0 ok, 1 acceptance failure, 2 validation, 3 convergence, 4 integrality.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// [{"d", "g", "n"}] and [{"d", "r", "N": "p/q"}].
nlohmann::ordered_json bps_json(const BpsTable& b);
nlohmann::ordered_json gw_json(const QTSeries& N);
BpsTable bps_from_json(const nlohmann::json& rows, int D, int G);
QTSeries gw_from_json(const nlohmann::json& rows, int D, int R);

}  // namespace syzlab::cli
