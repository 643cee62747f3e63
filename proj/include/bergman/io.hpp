#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "bergman/sampling.hpp"
#include "bergman/tseries.hpp"

namespace bergman {

using Json = nlohmann::json;

// Non-finite doubles become null so that every emitted number is finite.
Json number(double v);
// [re, im]
Json complex_to_json(Complex z);
Complex complex_from_json(const Json& j);
Json point_to_json(const Point& p);
Point point_from_json(const Json& j, int n);

// {"nvars", "maxdeg", "terms": [[exps], re, im], ...} in graded order.
Json series_to_json(const TruncatedSeries& s);
// Accepts the object above or a bare list of [exps, re, im] triples, in which
// case `nvars` and `maxdeg` must be supplied.
TruncatedSeries series_from_json(const Json& j, int nvars = -1, int maxdeg = -1);

// Writes the whole file or throws IoError.
void ensure_directory(const std::filesystem::path& dir);
void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace bergman
