#pragma once

// JSON forms of the machine-readable results.

#include <string>

#include <json.hpp>

#include "loadflow/certificate.hpp"
#include "loadflow/continuation.hpp"
#include "loadflow/fixed_point.hpp"
#include "loadflow/network.hpp"

namespace loadflow {

inline constexpr int kReportSchemaVersion = 1;

nlohmann::json to_json(const TheoremCheck& check);
nlohmann::json to_json(const CorollaryCheck& check);
nlohmann::json to_json(const PriorCheck& check);
nlohmann::json to_json(const CertificateReport& report);
nlohmann::json to_json(const SolveResult& result);
nlohmann::json to_json(const SweepBoundaries& boundaries);

/// Pretty-printed document with two-space indentation and every
/// floating-point number written with 17 significant digits.
std::string dump_report(const nlohmann::json& doc);

/// Per-bus table: bus, v_re, v_im, v_abs, angle_deg, w_abs, u_abs.
nlohmann::json voltage_table(const NetworkDescription& net, const ComplexVector& v,
                             const ZeroLoadProfile& w);

}  // namespace loadflow
