#pragma once

// JSON interchange. A cocycle is written as
//
//   {"base": [[a, b], [c, d]], "winding": w, "twist": [{"freq": f, "amp": a, "phase": p}, ...], "theta": t}
//
// with A(x) = base * R(2*pi*g(x)), g(x) = w*x + sum amp*cos(2*pi*freq*x + phase).
// "winding" defaults to 0 and "theta" to 1.

#include <nlohmann/json.hpp>

#include "sl2lab/cocycle.hpp"
#include "sl2lab/holonomy.hpp"
#include "sl2lab/natext.hpp"
#include "sl2lab/obstruction.hpp"

namespace sl2lab {

using Json = nlohmann::json;

Json to_json(const Mat2& m);
Json to_json(const Matrix2& m);
Json to_json(const CocycleSpec& spec);
Json to_json(const LyapunovEstimate& est, bool with_samples = false);
Json to_json(const BunchingResult& r);
Json to_json(const Rational& r);
Json to_json(const ObstructionReport& r);
Json to_json(const HolonomyResult& r);
Json to_json(const NatExtRealization& r);

/// Throws a config error naming the offending field.
CocycleSpec cocycle_from_json(const Json& j);
/// Parses a JSON document, reporting syntax errors with their byte position.
Json parse_json_text(const std::string& text, const std::string& source);
Json load_json_file(const std::string& path);

}  // namespace sl2lab
