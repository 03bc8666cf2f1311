#pragma once

#include <json.hpp>

#include <optional>

#include "lipext/representer.hpp"

namespace lipext::io {

using Json = nlohmann::json;

inline constexpr int kFormatVersion = 1;

struct Instance {
  FiniteMetricSpace space;
  NormSpec norm;
  LipschitzPoint point;
  double lipschitz_bound = 1.0;
};

// Documents are parsed strictly: "format_version" must be 1, required keys
// must be present and unknown keys are rejected. Failures throw Error with
// MalformedDocument, or the metric/point error that validation raised.

Json instance_to_json(const Instance& instance);
Instance instance_from_json(const Json& doc);

Json membership_to_json(const Instance& instance, const ToleranceConfig& tol);

Json certificate_to_json(const ExtremalityCertificate& cert);

Json report_to_json(const VerificationReport& report);

/// reconstruction_error is max |sum w_i y^i - y| over all coordinates.
Json decomposition_to_json(const Decomposition& dec, double reconstruction_error,
                           bool verified,
                           const std::optional<VerificationReport>& report);

/// Reads atoms back against the instance they decompose; shape mismatches
/// throw DimensionMismatch.
Decomposition decomposition_from_json(const Json& doc, const Instance& instance);

Json error_to_json(const Error& error);

double reconstruction_error(const LipschitzPoint& y, const Decomposition& dec);

}  // namespace lipext::io
