#include "manifest.hpp"

#include <openssl/evp.h>

#include <array>
#include <cstdio>
#include <memory>

#include "json.hpp"
#include "vru/csv.hpp"
#include "vru/error.hpp"

namespace vru::tools {

std::string sha256_file(const std::filesystem::path& path) {
  const std::string data = read_file(path);
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                              &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), md.data(), &len) != 1) {
    throw IoError("cannot hash " + path.string());
  }
  std::string hex;
  hex.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    char buf[3];
    std::snprintf(buf, sizeof(buf), "%02x", md[i]);
    hex += buf;
  }
  return hex;
}

std::filesystem::path write_manifest(const RunConfig& config, const CommandResult& result) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["command"] = result.command;
  j["version"] = std::string(version());
  ordered_json cfg = ordered_json::object();
  for (const auto& [key, value] : config_entries(config)) cfg[key] = value;
  j["config"] = cfg;
  auto files = [](const std::vector<std::filesystem::path>& paths) {
    ordered_json arr = ordered_json::array();
    for (const auto& p : paths) {
      arr.push_back({{"path", p.generic_string()}, {"sha256", sha256_file(p)}});
    }
    return arr;
  };
  j["inputs"] = files(result.inputs);
  j["outputs"] = files(result.outputs);
  ordered_json stages = ordered_json::array();
  for (const auto& s : result.stages) {
    stages.push_back({{"name", s.name}, {"rows", s.rows}, {"seconds", s.seconds}});
  }
  j["stages"] = stages;

  const auto path = config.output("manifest_" + result.command + ".json");
  write_file(path, j.dump(2) + "\n");
  return path;
}

}  // namespace vru::tools
