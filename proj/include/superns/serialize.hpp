#pragma once

#include <string>

#include <json.hpp>

#include "superns/correspond.hpp"
#include "superns/sewing.hpp"
#include "superns/superseries.hpp"
#include "superns/vosa.hpp"

namespace superns {

// Key order is insertion order, so equal inputs give byte-identical files.
using Json = nlohmann::ordered_json;

// All rationals are written as exact strings "p/q". Readers throw ParseError
// on malformed documents.

// [{indices: [i1 < i2 < …] (1-based), re, im}]; [] is zero.
Json to_json(const Grassmann& g);
Grassmann grassmann_from_json(const Json& j, int generators);

Json to_json(const Laurent& a);
Laurent laurent_from_json(const Json& j, int generators, Window w);
// {generators, window: [lo, hi], even: {f, xi}, odd: {psi, g}}
Json to_json(const SuperSeries& H);
SuperSeries superseries_from_json(const Json& j);

Json to_json(const CoordData& c);
CoordData coord_from_json(const Json& j, int generators);
Json to_json(const InfCoordData& c);
InfCoordData inf_coord_from_json(const Json& j, int generators);

// {generators, n, branch, punctures: [{z, theta}], infinity, local: [...]}
Json to_json(const ModuliElement& q);
ModuliElement moduli_from_json(const Json& j);

// Terms [{symbols: [[name, exponent]], alpha2, re, im}] over a named table.
Json to_json(const GradedPoly& p);
GradedPoly poly_from_json(const Json& j, const SymbolTablePtr& table, int cap = GradedPoly::kNoCap);
Json to_json(const SymbolTable& t);
SymbolTablePtr symbol_table_from_json(const Json& j);
// {symbols, degree_cap, Psi: [[slot, poly]], Gamma}
Json to_json(const SewingSeries& s, const SymbolTable& table);

// {labels, weights, parities, dims, weight_cap, phi_label_cap, vacuum, tau, c,
//  modes: [{label, n, matrix: [[column, row, value]]}]}
Json to_json(const VertexData& V);
VertexData vertex_data_from_json(const Json& j);

Json to_json(const AxiomResult& r);
Json to_json(const Report& r);

Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);

}  // namespace superns
