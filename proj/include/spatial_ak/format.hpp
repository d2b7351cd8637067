#pragma once

#include <json.hpp>

#include <iosfwd>
#include <string>

namespace spatial_ak {

// "%.17g"; non-finite values become "nan", "inf", "-inf".
std::string fmt17(double x);

// Serializes JSON with every floating-point number written with 17
// significant digits. Non-finite numbers are written as null. Object keys
// come out sorted, so equal documents serialize to equal bytes.
std::string dump_json(const nlohmann::json& doc, int indent = 2);

void write_json_file(const std::string& path, const nlohmann::json& doc);

}  // namespace spatial_ak
