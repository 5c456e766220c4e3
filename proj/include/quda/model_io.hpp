#pragma once

// Model and truth files: versioned JSON documents. Arrays are stored as
// base64 of little-endian IEEE-754 float64 values, so they round-trip
// bit-exactly; scalars are plain JSON numbers (shortest round-trip form).
// docs/model_format.md describes the layout.

#include <filesystem>
#include <span>
#include <string>

#include "json.hpp"
#include "quda/model.hpp"

namespace quda {

inline constexpr int kModelSchemaVersion = 1;
inline constexpr const char* kModelFormat = "quda-model";
inline constexpr const char* kTruthFormat = "quda-truth";

std::string base64_encode(std::span<const unsigned char> bytes);
/// Throws CorruptPayload on malformed input.
std::vector<unsigned char> base64_decode(std::string_view text);

nlohmann::json encode_array(std::span<const double> values, std::initializer_list<std::size_t> shape);
Vector decode_vector(const nlohmann::json& node, std::size_t expected_len);
Matrix decode_matrix(const nlohmann::json& node, std::size_t rows, std::size_t cols);

nlohmann::json model_to_json(const QudaModel& model);
QudaModel model_from_json(const nlohmann::json& doc);
void save_model(const QudaModel& model, const std::filesystem::path& path);
QudaModel load_model(const std::filesystem::path& path);

nlohmann::json truth_to_json(const SyntheticTruth& truth);
SyntheticTruth truth_from_json(const nlohmann::json& doc);
void save_truth(const SyntheticTruth& truth, const std::filesystem::path& path,
                const nlohmann::json& extra = nlohmann::json::object());
SyntheticTruth load_truth(const std::filesystem::path& path);

}  // namespace quda
