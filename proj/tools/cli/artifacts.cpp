#include "artifacts.hpp"

#include <cstdio>
#include <system_error>

#include "config.hpp"
#include "landscape/serialize.hpp"

namespace landscape::cli {

std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

ArtifactWriter::ArtifactWriter(std::filesystem::path dir, std::string config_hash)
    : dir_(std::move(dir)), hash_(std::move(config_hash)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw IoError("cannot create output directory '" + dir_.string() + "': " + ec.message());
}

Json ArtifactWriter::header() const {
  return Json{{"toolkit", "landscape"}, {"version", kToolkitVersion}, {"config", hash_}};
}

void ArtifactWriter::write(const std::string& name, const std::string& text) {
  try {
    write_text_file(dir_ / name, text);
  } catch (const std::exception& e) {
    throw IoError(e.what());
  }
  written_.push_back(name);
}

void ArtifactWriter::csv(const std::string& name, const std::vector<std::string>& columns,
                         const std::vector<std::vector<double>>& rows) {
  std::string text = "# landscape " + std::string(kToolkitVersion) + " config=" + hash_ + "\n";
  for (std::size_t i = 0; i < columns.size(); ++i) text += (i ? "," : "") + columns[i];
  text += "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) text += ",";
      text += format_real(row[i]);
    }
    text += "\n";
  }
  write(name, text);
}

void ArtifactWriter::json(const std::string& name, const Json& body) {
  Json doc;
  doc["header"] = header();
  for (const auto& [k, v] : body.items()) doc[k] = v;
  write(name, doc.dump(2) + "\n");
}

void ArtifactWriter::json_document(const std::string& name, const std::string& key, const std::string& document) {
  Json body;
  body[key] = Json::parse(document);
  json(name, body);
}

}  // namespace landscape::cli
