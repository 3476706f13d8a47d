#pragma once

#include <cstddef>
#include <string>

namespace ca {

/// Current UTC time as ISO-8601 with milliseconds, e.g. "2024-05-01T12:00:00.123Z".
std::string utc_timestamp();

/// Random lowercase hex string of `digits` characters.
std::string random_hex(std::size_t digits);

}  // namespace ca
