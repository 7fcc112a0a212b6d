#pragma once

#include <string>

#include "experiments/engine.hpp"
#include "json.hpp"

namespace pcrlab::experiments {

extern const char* const kCsvHeader;

// %.6g numbers, LF line endings, "NA" for absent values.
std::string format_number(double v);
std::string to_csv(const ExperimentResult& r);

// Git blob hash: sha1("blob <size>\0" + content), lowercase hex.
std::string git_blob_sha1(const std::string& content);

nlohmann::json manifest(const ExperimentResult& r);

void write_file(const std::string& path, const std::string& content);  // IoError on failure

}  // namespace pcrlab::experiments
