#pragma once

#include <string>
#include <string_view>

#include "gfbp/rates.hpp"

namespace gfbp {

// JSON rate-model documents:
//
//   {"kind": "preset", "name": "tfpp",  "lambda": 2}
//   {"kind": "preset", "name": "fpbp",  "rates": [1, 2, 3]}       or "rate": "n^2"
//   {"kind": "preset", "name": "gfcp",  "lambdas": [1, 3]}
//   {"kind": "preset", "name": "cfpp",  "beta": "2^(-i)"}
//   {"kind": "preset", "name": "stfpp", "lambda": 1, "beta": 0.5}
//   {"kind": "table",   "n0": 0, "k": 2, "rates": [[1, 3], [2, 3]], "extension": "error" | "repeat-last-row"}
//   {"kind": "formula", "n0": 1, "k": 2, "rate": "n*(2-i) + (i-1)"}
//   {"kind": "formula", "n0": 1, "k": 2, "rates": ["n", "1"]}
//   {"kind": "formula", "n0": 0, "k": "unbounded", "rate": "2^(-i)", "total": "1"}
//
// Every document may carry "n0" and "k" (an integer or "unbounded"); presets
// reject values that contradict their definition.  An optional "options"
// object sets tail_tolerance and max_terms.
//
// Parse failures throw InputError; syntax errors carry line and column.
RateModel parse_model(std::string_view json_text);

// Canonical document (sorted keys, shortest round-trip numbers).  Throws
// std::logic_error for models that were not built from a document.
std::string serialize_model(const RateModel& model);

// {"alpha": 0.5}  or  {"per_state": {"0": 0.5, "1": 0.9}, "fallback": 0.7}
OrderSpec parse_order(std::string_view json_text);
std::string serialize_order(const OrderSpec& order);

}  // namespace gfbp
