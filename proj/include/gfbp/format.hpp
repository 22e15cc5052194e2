#pragma once

#include <string>

namespace gfbp {

// 17 significant digits, '.' separator, %g-style exponent; independent of the
// C locale.  Non-finite values print as nan, inf and -inf.
std::string format_number(double v);

// Same, but non-finite values become JSON null.
std::string format_json_number(double v);

// JSON string literal with escapes.
std::string quote_json(const std::string& s);

}  // namespace gfbp
