#include "sepfactory/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "sepfactory/error.hpp"

namespace sepfactory::io {

namespace {

[[noreturn]] void format_error(const std::string& what) { throw Error(ErrorCode::Format, what); }

cplx complex_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    format_error("complex entry must be a [re, im] pair of numbers");
  const double re = j[0].get<double>();
  const double im = j[1].get<double>();
  if (!std::isfinite(re) || !std::isfinite(im)) format_error("non-finite complex entry");
  return {re, im};
}

json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

Index index_from_json(const json& j, const char* what) {
  if (!j.is_number_integer() || j.get<long long>() < 1) format_error(std::string(what) + " must be a positive integer");
  return static_cast<Index>(j.get<long long>());
}

const json& field(const json& doc, const char* name) {
  if (!doc.is_object() || !doc.contains(name)) format_error(std::string("missing field '") + name + "'");
  return doc.at(name);
}

std::pair<Index, Index> dims_pair(const json& doc) {
  const json& d = field(doc, "dims");
  if (!d.is_array() || d.size() != 2) format_error("'dims' must be [dimA, dimB]");
  return {index_from_json(d[0], "dimA"), index_from_json(d[1], "dimB")};
}

void expect_type(const json& doc, const char* type) {
  const std::string actual = document_type(doc);
  if (actual != type) format_error("expected a '" + std::string(type) + "' document, got '" + actual + "'");
}

json header(const char* type) {
  json doc = json::object();
  doc["schema_version"] = kSchemaVersion;
  doc["type"] = type;
  return doc;
}

}  // namespace

json to_json(const cmat& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(complex_to_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

json to_json(const cvec& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v(i)));
  return out;
}

cmat matrix_from_json(const json& j, Index rows, Index cols) {
  if (!j.is_array() || static_cast<Index>(j.size()) != rows)
    format_error("matrix must have " + std::to_string(rows) + " rows");
  cmat m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols)
      format_error("matrix row " + std::to_string(i) + " must have " + std::to_string(cols) + " entries");
    for (Index k = 0; k < cols; ++k) m(i, k) = complex_from_json(row[static_cast<std::size_t>(k)]);
  }
  return m;
}

cvec vector_from_json(const json& j, Index size) {
  if (!j.is_array() || static_cast<Index>(j.size()) != size)
    format_error("vector must have " + std::to_string(size) + " entries");
  cvec v(size);
  for (Index i = 0; i < size; ++i) v(i) = complex_from_json(j[static_cast<std::size_t>(i)]);
  return v;
}

BipartiteOperator MatrixFile::as_bipartite() const {
  if (dims.size() != 2) format_error("document is not a bipartite operator (dims must be [dimA, dimB])");
  return {dims[0], dims[1], entries};
}

json to_json(const MatrixFile& f) {
  json doc = header(f.type.c_str());
  doc["dims"] = f.dims;
  doc["entries"] = to_json(f.entries);
  if (!f.metadata.empty()) doc["metadata"] = f.metadata;
  return doc;
}

MatrixFile matrix_file_from_json(const json& doc) {
  MatrixFile f;
  f.type = document_type(doc);
  if (f.type != "state" && f.type != "matrix" && f.type != "witness")
    format_error("'" + f.type + "' is not a matrix document");
  const json& d = field(doc, "dims");
  if (!d.is_array() || d.empty() || d.size() > 2) format_error("'dims' must be [n] or [dimA, dimB]");
  Index n = 1;
  for (const auto& e : d) {
    f.dims.push_back(index_from_json(e, "dimension"));
    n *= f.dims.back();
  }
  f.entries = matrix_from_json(field(doc, "entries"), n, n);
  if (doc.contains("metadata")) f.metadata = doc["metadata"];
  return f;
}

MatrixFile state_file(const BipartiteOperator& rho, std::string type, json metadata) {
  MatrixFile f;
  f.type = std::move(type);
  f.dims = {rho.dim_a(), rho.dim_b()};
  f.entries = rho.matrix();
  f.metadata = std::move(metadata);
  return f;
}

json to_json(const CholeskyCertificate& cert) {
  json doc = header("certificate");
  doc["dims"] = {cert.dim_a, cert.dim_b};
  doc["basis"] = {{"swap_subsystems", cert.basis.swap_subsystems}, {"reverse_rows", cert.basis.reverse_rows}};
  json xs = json::array();
  for (const auto& x : cert.x) xs.push_back(to_json(x));
  doc["X"] = std::move(xs);
  json ss = json::array();
  for (const auto& [key, op] : cert.s)
    ss.push_back({{"i", key.first + 1}, {"j", key.second + 1}, {"entries", to_json(op)}});
  doc["S"] = std::move(ss);
  doc["row_norms"] = cert.row_norms;
  return doc;
}

CholeskyCertificate certificate_from_json(const json& doc) {
  expect_type(doc, "certificate");
  CholeskyCertificate cert;
  std::tie(cert.dim_a, cert.dim_b) = dims_pair(doc);
  if (doc.contains("basis")) {
    const json& b = doc["basis"];
    cert.basis.swap_subsystems = b.value("swap_subsystems", false);
    cert.basis.reverse_rows = b.value("reverse_rows", false);
  }
  const json& xs = field(doc, "X");
  if (!xs.is_array() || static_cast<Index>(xs.size()) != cert.dim_a) format_error("'X' must list dimA matrices");
  for (const auto& x : xs) cert.x.push_back(matrix_from_json(x, cert.dim_b, cert.dim_b));
  const json& ss = field(doc, "S");
  if (!ss.is_array()) format_error("'S' must be an array");
  for (const auto& s : ss) {
    const Index i = index_from_json(field(s, "i"), "S index i") - 1;
    const Index j = index_from_json(field(s, "j"), "S index j") - 1;
    if (!(i < j && j < cert.dim_a)) format_error("S indices must satisfy 1 <= i < j <= dimA");
    if (!cert.s.emplace(std::make_pair(i, j), matrix_from_json(field(s, "entries"), cert.dim_b, cert.dim_b)).second)
      format_error("duplicate S entry");
  }
  cert.refresh_row_norms();
  return cert;
}

json to_json(const ProductEnsemble& e) {
  json doc = header("ensemble");
  doc["dims"] = {e.dim_a, e.dim_b};
  json terms = json::array();
  for (const auto& t : e.terms) terms.push_back({{"weight", t.weight}, {"a", to_json(t.a)}, {"b", to_json(t.b)}});
  doc["terms"] = std::move(terms);
  return doc;
}

ProductEnsemble ensemble_from_json(const json& doc) {
  expect_type(doc, "ensemble");
  ProductEnsemble e;
  std::tie(e.dim_a, e.dim_b) = dims_pair(doc);
  const json& terms = field(doc, "terms");
  if (!terms.is_array()) format_error("'terms' must be an array");
  for (const auto& t : terms) {
    const json& w = field(t, "weight");
    if (!w.is_number() || !(w.get<double>() >= 0)) format_error("term weight must be a non-negative number");
    e.terms.push_back({w.get<double>(), vector_from_json(field(t, "a"), e.dim_a), vector_from_json(field(t, "b"), e.dim_b)});
  }
  return e;
}

json to_json(const GeneratorSpec& spec) {
  json doc = header("generator_spec");
  doc["kind"] = to_string(spec.kind);
  doc["dims"] = {spec.dim_a, spec.dim_b};
  doc["seed"] = spec.seed;
  doc["rank"] = spec.rank;
  doc["aligned"] = spec.aligned;
  return doc;
}

GeneratorSpec generator_spec_from_json(const json& doc) {
  expect_type(doc, "generator_spec");
  GeneratorSpec spec;
  const json& kind = field(doc, "kind");
  if (!kind.is_string()) format_error("'kind' must be a string");
  spec.kind = generator_kind_from_string(kind.get<std::string>());
  std::tie(spec.dim_a, spec.dim_b) = dims_pair(doc);
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) format_error("'seed' must be a non-negative integer");
    spec.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("rank")) {
    if (!doc["rank"].is_number_integer()) format_error("'rank' must be an integer");
    spec.rank = doc["rank"].get<Index>();
  }
  spec.aligned = doc.value("aligned", false);
  return spec;
}

json read_document(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) format_error("cannot open '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    format_error("'" + path.string() + "' is not valid JSON: " + e.what());
  }
  if (!doc.is_object()) format_error("top-level JSON value must be an object");
  const json& version = field(doc, "schema_version");
  if (!version.is_string() || version.get<std::string>() != kSchemaVersion)
    format_error("unsupported schema_version (expected " + std::string(kSchemaVersion) + ")");
  return doc;
}

std::string document_type(const json& doc) {
  const json& t = field(doc, "type");
  if (!t.is_string()) format_error("'type' must be a string");
  return t.get<std::string>();
}

void write_atomic(const std::filesystem::path& path, const std::string& contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) format_error("cannot write '" + tmp.string() + "'");
    out << contents;
    out.flush();
    if (!out) format_error("write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    format_error("cannot move output into place at '" + path.string() + "'");
  }
}

void write_document(const std::filesystem::path& path, const json& doc) { write_atomic(path, doc.dump(1) + "\n"); }

std::string file_digest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) format_error("cannot open '" + path.string() + "'");
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char c;
  while (in.get(c)) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

}  // namespace sepfactory::io
