#ifndef MODULI_IO_HPP
#define MODULI_IO_HPP

#include <string>

#include <json.hpp>

#include "moduli/algebroid.hpp"
#include "moduli/lform.hpp"
#include "moduli/rep.hpp"

namespace moduli {

/// Input document errors (bad schema, bad polynomial, degree cap exceeded).
class io_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Algebroid document:
///   { "num_vars": n, "rank": r,
///     "anchor": [[poly x n] x r],            // optional, default zero
///     "bracket": [{"i":i,"j":j,"coeffs":[poly x r]}, ...] }  // i<j only
AlgebroidSpec algebroid_from_json(const nlohmann::json& doc, std::size_t degree_cap = 12);

nlohmann::ordered_json algebroid_to_json(const AlgebroidSpec& spec);

/// Representation document:
///   { "lie_algebra": <algebroid with num_vars 0>, "dim_V": m,
///     "scalar_field": "real"|"complex",
///     "rho": [[entry x m] x m] x r }
/// Entries are rationals, optionally with an imaginary part: "a", "a/b",
/// "3i", "1/2 - 2/3i".
RepSpec rep_from_json(const nlohmann::json& doc, std::size_t degree_cap = 12);

/// Connection document: {"dim_E": m, "alpha": [{"basis_index": i,
/// "matrix": [[poly x m] x m]}, ...]}.
ConnectionForm connection_from_json(const nlohmann::json& doc, const AlgebroidSpec& spec,
                                    std::size_t degree_cap = 12);

/// Gauge document: {"phi": [[poly]], "phi_inv": [[poly]]}.
GaugeMap gauge_from_json(const nlohmann::json& doc, const AlgebroidSpec& spec,
                         std::size_t degree_cap = 12);

/// Parses "a", "a/b", "ci", "a+ci", "a-c/di" into a Gaussian rational.
GaussianRational parse_scalar_entry(const std::string& text);

/// True when the document looks like a representation (has "lie_algebra").
bool is_rep_document(const nlohmann::json& doc);

nlohmann::json load_json_file(const std::string& path);

}  // namespace moduli

#endif
