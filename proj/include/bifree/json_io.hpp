#pragma once

#include <json.hpp>

#include "bifree/scalar.hpp"

namespace bifree {

using Json = nlohmann::ordered_json;

/// [re_num, re_den, im_num, im_den]; integers outside int64 become strings.
Json scalar_to_json(const Scalar& value);
/// Accepts the four-entry array above with integer or decimal-string entries.
Scalar scalar_from_json(const Json& value);

}  // namespace bifree
