#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hports/mesh.hpp"

namespace hports {

struct Cochain;

/// Raw contents of a mesh file before canonicalisation.
struct MeshData {
  int dimension = 0;
  Eigen::MatrixXd vertices;  // one column per vertex
  std::vector<Simplex> simplices;
};

/// Parses `{"dimension": n, "vertices": [...], "simplices": [...]}`.
/// Throws Error(InvalidInput) on schema violations or non-finite values.
MeshData parse_mesh_json(const std::string& text);
MeshData read_mesh_file(const std::string& path);

/// Serialises oriented top simplices so that orientation survives a round trip.
nlohmann::ordered_json mesh_to_json(const SimplicialComplex& c, bool with_counts = true);
std::string write_mesh_json(const SimplicialComplex& c, bool with_counts = true);

nlohmann::ordered_json cochain_to_json(const Cochain& c);
/// Parses `{"degree": k, "values": [...], "ordering": "canonical"}` and binds
/// it to `complex`; lengths are validated.
Cochain cochain_from_json(const nlohmann::json& j, const SimplicialComplex& complex);
Cochain read_cochain_file(const std::string& path, const SimplicialComplex& complex);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace hports
