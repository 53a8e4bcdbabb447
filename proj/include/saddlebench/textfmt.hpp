#pragma once

#include <string>

namespace saddlebench {

// Text form of a double with 17 significant digits; round-trips bit-exactly
// through strtod. Used by every serializer so outputs are byte-stable.
std::string fmt_g17(double v);

// Compact %g form for file-name fragments (0.25 -> "0.25", 0 -> "0").
std::string fmt_g(double v);

}  // namespace saddlebench
