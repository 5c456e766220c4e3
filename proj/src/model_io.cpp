#include "quda/model_io.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <fstream>
#include <sstream>

#include "quda/error.hpp"

namespace quda {

using nlohmann::json;

namespace {

constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

int decode_char(char c) {
  if (c >= 'A' && c <= 'Z') return c - 'A';
  if (c >= 'a' && c <= 'z') return c - 'a' + 26;
  if (c >= '0' && c <= '9') return c - '0' + 52;
  if (c == '+') return 62;
  if (c == '/') return 63;
  return -1;
}

[[noreturn]] void corrupt(const std::string& what) { throw Error(Errc::CorruptPayload, what); }

const json& member(const json& node, const char* key) {
  if (!node.is_object() || !node.contains(key)) corrupt(std::string("missing field '") + key + "'");
  return node.at(key);
}

double number(const json& node, const char* key) {
  const json& v = member(node, key);
  if (!v.is_number()) corrupt(std::string("field '") + key + "' is not a number");
  return v.get<double>();
}

void write_json(const json& doc, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::IoError, "cannot open " + path.string() + " for writing");
  out << doc.dump(2) << '\n';
  if (!out) throw Error(Errc::IoError, "failed writing " + path.string());
}

json read_json(const std::filesystem::path& path, const char* format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  json doc;
  try {
    doc = json::parse(buf.str());
  } catch (const json::exception& e) {
    corrupt(path.string() + ": " + e.what());
  }
  if (member(doc, "format") != format) corrupt(path.string() + ": not a " + format + " file");
  const json& version = member(doc, "schema_version");
  if (!version.is_number_integer() || version.get<int>() != kModelSchemaVersion) {
    throw Error(Errc::SchemaVersionMismatch, path.string() + ": schema_version " + version.dump() +
                                                 ", expected " + std::to_string(kModelSchemaVersion));
  }
  return doc;
}

std::size_t dimension(const json& doc) {
  const json& d = member(doc, "dim");
  if (!d.is_number_unsigned() || d.get<std::size_t>() == 0) corrupt("field 'dim' must be positive");
  return d.get<std::size_t>();
}

}  // namespace

std::string base64_encode(std::span<const unsigned char> bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 3 <= bytes.size(); i += 3) {
    const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += kAlphabet[(v >> 6) & 63];
    out += kAlphabet[v & 63];
  }
  const std::size_t rest = bytes.size() - i;
  if (rest > 0) {
    std::uint32_t v = bytes[i] << 16;
    if (rest == 2) v |= bytes[i + 1] << 8;
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += rest == 2 ? kAlphabet[(v >> 6) & 63] : '=';
    out += '=';
  }
  return out;
}

std::vector<unsigned char> base64_decode(std::string_view text) {
  if (text.size() % 4 != 0) corrupt("base64 length is not a multiple of 4");
  std::vector<unsigned char> out;
  out.reserve(text.size() / 4 * 3);
  for (std::size_t i = 0; i < text.size(); i += 4) {
    const bool last = i + 4 == text.size();
    std::array<int, 4> q{};
    int pad = 0;
    for (int k = 0; k < 4; ++k) {
      const char c = text[i + k];
      if (c == '=' && last && k >= 2) {
        q[k] = 0;
        ++pad;
        continue;
      }
      if (pad > 0 || (q[k] = decode_char(c)) < 0) corrupt("invalid base64 character");
    }
    const std::uint32_t v = (q[0] << 18) | (q[1] << 12) | (q[2] << 6) | q[3];
    out.push_back(static_cast<unsigned char>(v >> 16));
    if (pad < 2) out.push_back(static_cast<unsigned char>(v >> 8));
    if (pad < 1) out.push_back(static_cast<unsigned char>(v));
  }
  return out;
}

json encode_array(std::span<const double> values, std::initializer_list<std::size_t> shape) {
  std::vector<unsigned char> bytes;
  bytes.reserve(values.size() * 8);
  for (double v : values) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int b = 0; b < 8; ++b) bytes.push_back(static_cast<unsigned char>(bits >> (8 * b)));
  }
  return json{{"dtype", "float64-le"}, {"shape", std::vector<std::size_t>(shape)},
              {"data", base64_encode(bytes)}};
}

namespace {

Vector decode_values(const json& node, std::size_t expected) {
  if (member(node, "dtype") != "float64-le") corrupt("unsupported dtype " + node.at("dtype").dump());
  const json& data = member(node, "data");
  if (!data.is_string()) corrupt("array data is not a string");
  const auto bytes = base64_decode(data.get<std::string>());
  if (bytes.size() != expected * 8) {
    corrupt("array holds " + std::to_string(bytes.size() / 8) + " values, expected " +
            std::to_string(expected));
  }
  Vector out(expected);
  for (std::size_t i = 0; i < expected; ++i) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(bytes[i * 8 + b]) << (8 * b);
    out[i] = std::bit_cast<double>(bits);
  }
  return out;
}

}  // namespace

Vector decode_vector(const json& node, std::size_t expected_len) {
  return decode_values(node, expected_len);
}

Matrix decode_matrix(const json& node, std::size_t rows, std::size_t cols) {
  const Vector v = decode_values(node, rows * cols);
  Matrix m(rows, cols);
  std::copy(v.begin(), v.end(), m.data().begin());
  return m;
}

json model_to_json(const QudaModel& model) {
  model.validate();
  const std::size_t p = model.dim();
  const auto& d = model.diagnostics;
  json doc;
  doc["format"] = kModelFormat;
  doc["schema_version"] = kModelSchemaVersion;
  doc["dim"] = p;
  doc["rule"] = "class 1 if (z-mu)' omega (z-mu) + delta' (z-mu) + eta > 0, else class 2";
  doc["eta"] = model.eta;
  doc["lambda"] = model.lambda;
  doc["lambda_delta"] = model.lambda_delta;
  doc["arrays"] = {{"mu", encode_array(model.mu, {p})},
                   {"omega", encode_array(model.omega.matrix().data(), {p, p})},
                   {"delta", encode_array(model.delta, {p})}};
  std::size_t omega_nnz = 0;
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i; j < p; ++j) omega_nnz += model.omega(i, j) != 0.0 ? 1 : 0;
  std::size_t delta_nnz = 0;
  for (double v : model.delta) delta_nnz += v != 0.0 ? 1 : 0;
  doc["summary"] = {{"omega_support_upper", omega_nnz}, {"delta_support", delta_nnz}};
  doc["diagnostics"] = {{"rho", d.rho},
                        {"admm_iterations", d.admm_iterations},
                        {"admm_primal_residual", d.admm_primal_residual},
                        {"admm_dual_residual", d.admm_dual_residual},
                        {"admm_converged", d.admm_converged},
                        {"cd_sweeps", d.cd_sweeps},
                        {"cd_kkt_residual", d.cd_kkt_residual},
                        {"cd_converged", d.cd_converged},
                        {"insample_error", d.insample_error},
                        {"n1", d.n1},
                        {"n2", d.n2}};
  return doc;
}

QudaModel model_from_json(const json& doc) {
  const std::size_t p = dimension(doc);
  const json& arrays = member(doc, "arrays");
  QudaModel m;
  m.mu = decode_vector(member(arrays, "mu"), p);
  m.omega = SymMatrix::checked(decode_matrix(member(arrays, "omega"), p, p), 0.0);
  m.delta = decode_vector(member(arrays, "delta"), p);
  m.eta = number(doc, "eta");
  m.lambda = number(doc, "lambda");
  m.lambda_delta = number(doc, "lambda_delta");
  const json& d = member(doc, "diagnostics");
  try {
    auto& g = m.diagnostics;
    g.rho = d.at("rho").get<double>();
    g.admm_iterations = d.at("admm_iterations").get<int>();
    g.admm_primal_residual = d.at("admm_primal_residual").get<double>();
    g.admm_dual_residual = d.at("admm_dual_residual").get<double>();
    g.admm_converged = d.at("admm_converged").get<bool>();
    g.cd_sweeps = d.at("cd_sweeps").get<int>();
    g.cd_kkt_residual = d.at("cd_kkt_residual").get<double>();
    g.cd_converged = d.at("cd_converged").get<bool>();
    g.insample_error = d.at("insample_error").get<double>();
    g.n1 = d.at("n1").get<std::size_t>();
    g.n2 = d.at("n2").get<std::size_t>();
  } catch (const json::exception& e) {
    corrupt(std::string("diagnostics: ") + e.what());
  }
  m.validate();
  return m;
}

void save_model(const QudaModel& model, const std::filesystem::path& path) {
  write_json(model_to_json(model), path);
}

QudaModel load_model(const std::filesystem::path& path) {
  const json doc = read_json(path, kModelFormat);
  try {
    return model_from_json(doc);
  } catch (const Error& e) {
    if (e.code() == Errc::NotSymmetric) corrupt(path.string() + ": omega is not symmetric");
    throw;
  }
}

json truth_to_json(const SyntheticTruth& t) {
  const std::size_t p = t.dim();
  json doc;
  doc["format"] = kTruthFormat;
  doc["schema_version"] = kModelSchemaVersion;
  doc["dim"] = p;
  doc["pi1"] = t.pi1;
  doc["pi2"] = t.pi2;
  doc["arrays"] = {{"mu1", encode_array(t.mu1, {p})},
                   {"mu2", encode_array(t.mu2, {p})},
                   {"sigma1", encode_array(t.sigma1.matrix().data(), {p, p})},
                   {"sigma2", encode_array(t.sigma2.matrix().data(), {p, p})},
                   {"omega_true", encode_array(t.omega_true.matrix().data(), {p, p})},
                   {"delta_true", encode_array(t.delta_true, {p})}};
  return doc;
}

SyntheticTruth truth_from_json(const json& doc) {
  const std::size_t p = dimension(doc);
  const json& arrays = member(doc, "arrays");
  SyntheticTruth t;
  t.mu1 = decode_vector(member(arrays, "mu1"), p);
  t.mu2 = decode_vector(member(arrays, "mu2"), p);
  t.sigma1 = SymMatrix::checked(decode_matrix(member(arrays, "sigma1"), p, p), 0.0);
  t.sigma2 = SymMatrix::checked(decode_matrix(member(arrays, "sigma2"), p, p), 0.0);
  t.omega_true = SymMatrix::checked(decode_matrix(member(arrays, "omega_true"), p, p), 0.0);
  t.delta_true = decode_vector(member(arrays, "delta_true"), p);
  t.pi1 = number(doc, "pi1");
  t.pi2 = number(doc, "pi2");
  return t;
}

void save_truth(const SyntheticTruth& truth, const std::filesystem::path& path, const json& extra) {
  json doc = truth_to_json(truth);
  for (const auto& [k, v] : extra.items()) doc["meta"][k] = v;
  write_json(doc, path);
}

SyntheticTruth load_truth(const std::filesystem::path& path) {
  return truth_from_json(read_json(path, kTruthFormat));
}

}  // namespace quda
