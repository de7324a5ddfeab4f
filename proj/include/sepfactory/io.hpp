#pragma once

// JSON file formats. Every document carries
//   "schema_version": "sepfactory/1"
//   "type": "state" | "matrix" | "witness" | "certificate" | "ensemble" | "generator_spec"
// Complex entries are [re, im] pairs; matrices are row-major nested arrays in
// the A-major basis. Certificate indices i < j are 1-based in files.

#include <filesystem>
#include <string>

#include <json.hpp>

#include "sepfactory/bipartite.hpp"
#include "sepfactory/cholesky.hpp"
#include "sepfactory/generators.hpp"
#include "sepfactory/separability.hpp"

namespace sepfactory::io {

using json = nlohmann::json;

inline constexpr const char* kSchemaVersion = "sepfactory/1";

json to_json(const cmat& m);
json to_json(const cvec& v);
cmat matrix_from_json(const json& j, Index rows, Index cols);
cvec vector_from_json(const json& j, Index size);

/// A matrix document: dims is [dimA, dimB] for bipartite operators, [n] otherwise.
struct MatrixFile {
  std::string type = "state";
  std::vector<Index> dims;
  cmat entries;
  json metadata = json::object();

  BipartiteOperator as_bipartite() const;
};

json to_json(const MatrixFile& f);
MatrixFile matrix_file_from_json(const json& j);
MatrixFile state_file(const BipartiteOperator& rho, std::string type = "state", json metadata = json::object());

json to_json(const CholeskyCertificate& cert);
CholeskyCertificate certificate_from_json(const json& j);

json to_json(const ProductEnsemble& e);
ProductEnsemble ensemble_from_json(const json& j);

json to_json(const GeneratorSpec& spec);
GeneratorSpec generator_spec_from_json(const json& j);

/// Parse a document and check its schema version. Throws Error(Format).
json read_document(const std::filesystem::path& path);
std::string document_type(const json& doc);

/// Write to a sibling temporary and rename over the target.
void write_atomic(const std::filesystem::path& path, const std::string& contents);
void write_document(const std::filesystem::path& path, const json& doc);

/// 64-bit FNV-1a of the file bytes, as 16 hex digits.
std::string file_digest(const std::filesystem::path& path);

}  // namespace sepfactory::io
