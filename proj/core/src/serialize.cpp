#include "landscape/serialize.hpp"

#include <fstream>
#include <sstream>

#include "nlohmann/json.hpp"
#include "landscape/errors.hpp"

namespace landscape {

using nlohmann::json;

namespace {

json matrix_rows(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_list(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Matrix parse_matrix(const json& rows, Eigen::Index n_rows, Eigen::Index n_cols) {
  if (!rows.is_array() || static_cast<Eigen::Index>(rows.size()) != n_rows) {
    throw ShapeError("matrix has wrong number of rows");
  }
  Matrix m(n_rows, n_cols);
  for (Eigen::Index i = 0; i < n_rows; ++i) {
    const json& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n_cols) {
      throw ShapeError("matrix row has wrong length");
    }
    for (Eigen::Index j = 0; j < n_cols; ++j) m(i, j) = row[static_cast<std::size_t>(j)].get<double>();
  }
  return m;
}

Vector parse_vector(const json& values) {
  if (!values.is_array()) throw FormatError("expected a JSON array of numbers");
  Vector v(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) v[static_cast<Eigen::Index>(i)] = values[i].get<double>();
  return v;
}

json parse_document(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace

std::string network_to_json(const Network& net) {
  json doc;
  doc["dims"] = net.dims();
  doc["activation"] = std::string(to_string(net.activation()));
  json weights = json::array();
  json biases = json::array();
  for (int l = 1; l <= net.num_layers(); ++l) {
    weights.push_back(matrix_rows(net.weight(l)));
    biases.push_back(vector_list(net.bias(l)));
  }
  doc["weights"] = std::move(weights);
  doc["biases"] = std::move(biases);
  return doc.dump();
}

Network network_from_json(const std::string& text) {
  const json doc = parse_document(text);
  try {
    auto dims = doc.at("dims").get<std::vector<int>>();
    const ActivationKind kind = activation_from_string(doc.at("activation").get<std::string>());
    const json& weights = doc.at("weights");
    const json& biases = doc.at("biases");
    if (dims.size() < 2 || weights.size() != dims.size() - 1 || biases.size() != dims.size() - 1) {
      throw ShapeError("weights/biases do not match dims");
    }
    std::vector<Matrix> ws;
    std::vector<Vector> bs;
    for (std::size_t l = 1; l < dims.size(); ++l) {
      ws.push_back(parse_matrix(weights[l - 1], dims[l], dims[l - 1]));
      bs.push_back(parse_vector(biases[l - 1]));
    }
    return Network(std::move(dims), kind, std::move(ws), std::move(bs));
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed network document: ") + e.what());
  }
}

std::string dataset_to_json(const Dataset& data) {
  json doc;
  doc["inputs"] = matrix_rows(data.inputs().transpose());
  doc["targets"] = vector_list(data.targets());
  return doc.dump();
}

Dataset dataset_from_json(const std::string& text) {
  const json doc = parse_document(text);
  try {
    const json& inputs = doc.at("inputs");
    Vector targets = parse_vector(doc.at("targets"));
    if (!inputs.is_array() || inputs.empty()) throw ShapeError("dataset has no inputs");
    const auto n0 = static_cast<Eigen::Index>(inputs[0].size());
    Matrix by_row = parse_matrix(inputs, static_cast<Eigen::Index>(inputs.size()), n0);
    return Dataset(by_row.transpose(), std::move(targets));
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed dataset document: ") + e.what());
  }
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::ios_base::failure("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::ios_base::failure("cannot write " + path.string());
  out << text;
  if (!out) throw std::ios_base::failure("write failed for " + path.string());
}

}  // namespace landscape
