#include "hports/mesh_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "hports/metric.hpp"

namespace hports {

namespace {

using nlohmann::json;

const json& require_field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw Error(ErrorCode::InvalidInput, std::string("missing field '") + key + "'");
  return j.at(key);
}

double finite_number(const json& v) {
  if (!v.is_number()) throw Error(ErrorCode::InvalidInput, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw Error(ErrorCode::InvalidInput, "non-finite value");
  return x;
}

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::InvalidInput, std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace

MeshData parse_mesh_json(const std::string& text) {
  const json j = parse(text);
  MeshData out;
  const json& dim = require_field(j, "dimension");
  if (!dim.is_number_integer() || dim.get<int>() < 1 || dim.get<int>() > 3)
    throw Error(ErrorCode::InvalidInput, "dimension must be 1, 2 or 3");
  out.dimension = dim.get<int>();

  const json& verts = require_field(j, "vertices");
  if (!verts.is_array() || verts.empty()) throw Error(ErrorCode::InvalidInput, "vertices must be a non-empty array");
  const std::size_t ambient = verts.front().is_array() ? verts.front().size() : 0;
  if (ambient < static_cast<std::size_t>(out.dimension) || ambient > 3)
    throw Error(ErrorCode::InvalidInput, "vertex coordinates must have between n and 3 entries");
  out.vertices.resize(static_cast<Eigen::Index>(ambient), static_cast<Eigen::Index>(verts.size()));
  for (std::size_t v = 0; v < verts.size(); ++v) {
    if (!verts[v].is_array() || verts[v].size() != ambient)
      throw Error(ErrorCode::InvalidInput, "inconsistent vertex coordinate count");
    for (std::size_t d = 0; d < ambient; ++d) out.vertices(d, v) = finite_number(verts[v][d]);
  }

  const json& simp = require_field(j, "simplices");
  if (!simp.is_array()) throw Error(ErrorCode::InvalidInput, "simplices must be an array");
  for (const json& s : simp) {
    if (!s.is_array() || s.size() != static_cast<std::size_t>(out.dimension + 1))
      throw Error(ErrorCode::InvalidInput, "each simplex needs dimension+1 vertex indices");
    Simplex tuple;
    for (const json& v : s) {
      if (!v.is_number_integer()) throw Error(ErrorCode::InvalidInput, "vertex index must be an integer");
      tuple.push_back(v.get<int>());
    }
    out.simplices.push_back(std::move(tuple));
  }
  return out;
}

MeshData read_mesh_file(const std::string& path) { return parse_mesh_json(read_text_file(path)); }

nlohmann::ordered_json mesh_to_json(const SimplicialComplex& c, bool with_counts) {
  nlohmann::ordered_json j;
  j["dimension"] = c.dimension();
  auto verts = nlohmann::ordered_json::array();
  for (Eigen::Index v = 0; v < c.coordinates().cols(); ++v) {
    auto row = nlohmann::ordered_json::array();
    for (Eigen::Index d = 0; d < c.coordinates().rows(); ++d) row.push_back(c.coordinates()(d, v));
    verts.push_back(row);
  }
  j["vertices"] = verts;
  j["simplices"] = c.oriented_top_simplices();
  if (with_counts) j["counts"] = c.counts();
  return j;
}

std::string write_mesh_json(const SimplicialComplex& c, bool with_counts) {
  return mesh_to_json(c, with_counts).dump(2) + "\n";
}

nlohmann::ordered_json cochain_to_json(const Cochain& c) {
  nlohmann::ordered_json j;
  j["degree"] = c.degree;
  j["values"] = std::vector<double>(c.values.data(), c.values.data() + c.values.size());
  j["ordering"] = "canonical";
  return j;
}

Cochain cochain_from_json(const nlohmann::json& j, const SimplicialComplex& complex) {
  const json& deg = require_field(j, "degree");
  if (!deg.is_number_integer()) throw Error(ErrorCode::InvalidInput, "degree must be an integer");
  if (j.contains("ordering") && j.at("ordering") != "canonical")
    throw Error(ErrorCode::InvalidInput, "only canonical ordering is supported");
  const int k = deg.get<int>();
  if (k < 0 || k > complex.dimension()) throw Error(ErrorCode::DegreeOutOfRange, "degree " + std::to_string(k));
  const json& vals = require_field(j, "values");
  if (!vals.is_array() || vals.size() != static_cast<std::size_t>(complex.count(k)))
    throw Error(ErrorCode::InvalidInput, "expected " + std::to_string(complex.count(k)) + " values for degree " +
                                             std::to_string(k));
  Eigen::VectorXd v(static_cast<Eigen::Index>(vals.size()));
  for (std::size_t i = 0; i < vals.size(); ++i) v(i) = finite_number(vals[i]);
  return Cochain::from_values(complex, k, std::move(v));
}

Cochain read_cochain_file(const std::string& path, const SimplicialComplex& complex) {
  return cochain_from_json(parse(read_text_file(path)), complex);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path + "'");
  out << text;
  if (!out) throw Error(ErrorCode::Io, "write failed for '" + path + "'");
}

}  // namespace hports
