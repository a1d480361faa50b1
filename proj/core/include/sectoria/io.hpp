#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "sectoria/model.hpp"
#include "sectoria/operator.hpp"

namespace sectoria {

/// Matrix file format: {"dim": n, "entries": [[re, im], ...]} row-major.
ComplexMatrix matrix_from_json(const nlohmann::json& j);
nlohmann::json matrix_to_json(const ComplexMatrix& m);

/// Family spec: {"family": name, "params": {...}, "seed": int}.
SectorialOperator operator_from_json(const nlohmann::json& j);

/// Loads either format from a file path.
SectorialOperator load_operator(const std::string& path);

/// Rational test functions: {"poles": [[re,im],...],
/// "coeff_vectors": [[[re,im],...],...], "orders": [m,...] (optional)}.
RationalVectorFn rational_fn_from_json(const nlohmann::json& j);

nlohmann::json boundary_fn_to_json(const BoundaryFunction& f);

std::string read_text_file(const std::string& path);

/// Writes via a temp file + rename so readers never observe partial output.
void write_text_file_atomic(const std::string& path, const std::string& content);

} // namespace sectoria
