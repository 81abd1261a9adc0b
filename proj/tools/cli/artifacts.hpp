#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "nlohmann/json.hpp"

namespace landscape::cli {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolkitVersion = "0.1.0";

/// Shortest-safe rendering with 17 significant digits.
std::string format_real(double x);

/// Writes artifacts into one directory. CSVs start with a comment line
/// "# landscape <version> config=<hash>"; JSON documents carry the same
/// data in a leading "header" member. IoError on any failure.
class ArtifactWriter {
 public:
  ArtifactWriter(std::filesystem::path dir, std::string config_hash);

  void csv(const std::string& name, const std::vector<std::string>& columns,
           const std::vector<std::vector<double>>& rows);
  void json(const std::string& name, const Json& body);
  /// Raw JSON text (network/dataset documents) wrapped with the header.
  void json_document(const std::string& name, const std::string& key, const std::string& document);

  Json header() const;
  const std::vector<std::string>& written() const { return written_; }

 private:
  void write(const std::string& name, const std::string& text);

  std::filesystem::path dir_;
  std::string hash_;
  std::vector<std::string> written_;
};

}  // namespace landscape::cli
