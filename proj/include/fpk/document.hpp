#ifndef FPK_DOCUMENT_HPP
#define FPK_DOCUMENT_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fpk/fstructure.hpp"

namespace fpk {

/// Serialized form of an FpkStructure: every tensor entry is an expression
/// string in the chart coordinates. phi[i][j] is the coefficient of d/dx_i in
/// phi(d/dx_j); xi[i][a] is component a of xi_i; eta[i][a] is the coefficient
/// of dx_a. g must be symmetric entry-for-entry as strings.
struct ManifoldDocument {
    int n = 0;
    int k = 0;
    std::vector<std::string> coordinates;
    std::vector<Interval> box;
    std::uint64_t seed = 0;
    std::vector<double> alpha;
    std::vector<std::vector<std::string>> phi;
    std::vector<std::vector<std::string>> xi;
    std::vector<std::vector<std::string>> eta;
    std::vector<std::vector<std::string>> g;
    /// Optional per-suite tolerance overrides; allowed keys are "identity",
    /// "hamiltonian" and "top_power".
    std::map<std::string, double> tolerances;
};

/// Parses and schema-checks JSON text. Throws SchemaError naming the field;
/// expression strings are checked later, by to_structure.
ManifoldDocument parse_document(const std::string& text);

/// Canonical JSON emission: fixed key order, two-space indent, trailing
/// newline. emit(parse(emit(d))) == emit(d) byte for byte.
std::string emit_document(const ManifoldDocument& doc);

/// Parses every expression string and assembles the structure. Syntax errors
/// and unknown coordinates resurface as SyntaxError with the field path
/// prepended to the message.
FpkStructure to_structure(const ManifoldDocument& doc);

ManifoldDocument from_structure(const FpkStructure& s);

ManifoldDocument read_document(const std::string& path);
void write_document(const ManifoldDocument& doc, const std::string& path);

/// read_document followed by to_structure.
FpkStructure load_document(const std::string& path);

} // namespace fpk

#endif
