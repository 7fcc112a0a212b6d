#include "experiments/output.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include <openssl/evp.h>

#include "core/errors.hpp"

namespace pcrlab::experiments {

const char* const kCsvHeader =
    "variant,model,exposure,n,p,k,alpha,tau0,beta_mode,theta_mode,h,reps,degenerate,rejections,rate,mc_se,"
    "theory_rate,seed";

std::string format_number(double v) {
  if (std::isnan(v)) return "NA";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string to_csv(const ExperimentResult& r) {
  const ExperimentConfig& c = r.config;
  std::string out = kCsvHeader;
  out += '\n';
  for (const ResultRow& row : r.rows) {
    out += pcr::to_string(c.variant);
    out += ',';
    out += to_string(c.model);
    out += ',';
    out += to_string(c.exposure);
    out += ',' + std::to_string(c.n) + ',' + std::to_string(c.p) + ',' + std::to_string(c.k);
    out += ',' + format_number(c.alpha) + ',' + format_number(row.tau0);
    out += ',';
    out += to_string(row.modes.beta);
    out += ',';
    out += row.modes.theta ? to_string(*row.modes.theta) : "none";
    out += ',' + format_number(c.h) + ',' + std::to_string(row.reps) + ',' + std::to_string(row.degenerate);
    out += ',' + std::to_string(row.rejections) + ',' + format_number(row.rate) + ',' + format_number(row.mc_se);
    out += ',' + (row.theory_rate ? format_number(*row.theory_rate) : std::string("NA"));
    out += ',' + std::to_string(c.master_seed);
    out += '\n';
  }
  return out;
}

std::string git_blob_sha1(const std::string& content) {
  const std::string blob = "blob " + std::to_string(content.size()) + std::string(1, '\0') + content;
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(blob.data(), blob.size(), digest, &len, EVP_sha1(), nullptr) != 1)
    throw Error(ErrorCode::IoError, "SHA-1 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

nlohmann::json manifest(const ExperimentResult& r) {
  nlohmann::json m;
  const nlohmann::json cfg = config_to_json(r.config);
  m["config"] = cfg;
  m["config_sha1"] = git_blob_sha1(cfg.dump());
  m["master_seed"] = r.config.master_seed;
  m["rows"] = r.rows.size();
  m["columns"] = kCsvHeader;
  m["tool"] = "pcrlab";
  return m;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorCode::IoError, "cannot open '" + path + "' for writing");
  f.write(content.data(), static_cast<std::streamsize>(content.size()));
  f.close();
  if (!f) throw Error(ErrorCode::IoError, "failed writing '" + path + "'");
}

}  // namespace pcrlab::experiments
