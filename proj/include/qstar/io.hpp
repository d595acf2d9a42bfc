#pragma once

// JSON input schemas and report serialization.
//
// Instance:  {"n": 2, "basis": [M, ...], "a0_indices": [...], "unit_index": 0, "label": "..."}
// Form:      {"kind": "vector_state", "S": M} or {"kind": "gram", "G": M}, optional "label"
// Family:    {"generators": [form, ...], "balanced": true, "twist_depth": 1, "label": "..."}
// L^p input: {"points": [...], "masses": [...], "p": 4, "f": [...], "weights": [[...], ...]}
//
// A matrix M is a list of rows or a flat row-major list; an entry is a real
// number or a pair [re, im].

#include <string>
#include <vector>

#include "json.hpp"
#include "qstar/lp_model.hpp"
#include "qstar/topology.hpp"

namespace qstar::io {

using nlohmann::json;

/// Throws ParseError with the source name and line/column on malformed JSON.
json parse_json_text(const std::string& text, const std::string& source);
json read_json_file(const std::string& path);

Matrix parse_matrix(const json& j, int rows, int cols, const std::string& field);
Vector parse_complex_vector(const json& j, const std::string& field);
RealVector parse_real_vector(const json& j, const std::string& field);

QuasiAlgebraInstance parse_instance(const json& j);
IpsForm parse_form(const json& j, int n, int d, const std::string& field);
FormFamily parse_family(const json& j, int n, int d);

struct LpInput {
  std::vector<double> points;
  RealVector masses;
  double p = 2.0;
  Vector f;
  std::vector<RealVector> weights; // default: one weight per point mass
};

LpInput parse_lp(const json& j);

/// "unit", "basis:i", "a0:k", inline JSON, or a path to a JSON file. JSON
/// elements are {"matrix": M}, {"coeffs": [...]} or a bare matrix.
Element parse_element(const QuasiAlgebra& alg, const std::string& text);

/// Serializes with 17 significant digits per number; non-finite numbers are
/// written as the strings "inf", "-inf", "nan".
std::string dump(const json& j, int indent = 2);

json to_json(cplx z);
json to_json(const Matrix& m);
json to_json(const Vector& v);
json real_to_json(const RealVector& v);
json to_json(const Element& e);

json to_json(const ValidationReport& r);
json to_json(const FormReport& r);
json to_json(const GnsRep& rep, const GnsCheck& c);
json to_json(const SufficiencyReport& r);
json to_json(const ConeReport& r);
json to_json(const BoundednessReport& r);
json to_json(const WeakProductResult& r);
json to_json(const ConditionCReport& r);
json to_json(const RadicalReport& r);
json to_json(const BoundedAlgebraReport& r);
json to_json(const GAStarReport& r);
json to_json(const ComparisonReport& r);
json to_json(const SeminormLawReport& r);
json to_json(const HolderResult& r);
json to_json(const LpNormResult& r);

} // namespace qstar::io
