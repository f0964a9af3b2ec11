#pragma once

#include <string>

#include "json.hpp"

namespace twistorlab::cli {

using Json = nlohmann::ordered_json;

/// Two-space indented JSON with every double printed as %.17g; NaN and ±∞ become null.
std::string to_json_text(const Json& doc);

/// Writes to `path` through a temporary file and a rename, or to stdout when path is empty.
void emit(const std::string& text, const std::string& path);

/// min(hardware threads, TWISTORLAB_THREADS) and at least 1.
int thread_budget();

}  // namespace twistorlab::cli
