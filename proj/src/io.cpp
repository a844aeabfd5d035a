#include "moduli/io.hpp"

#include <cctype>
#include <fstream>

namespace moduli {

namespace {

Polynomial parse_poly(const nlohmann::json& node, std::size_t num_vars, std::size_t degree_cap,
                      const std::string& where) {
  if (!node.is_string())
    throw io_error(where + ": expected a polynomial string");
  Polynomial p;
  try {
    p = Polynomial::parse(node.get<std::string>(), num_vars);
  } catch (const std::exception& e) {
    throw io_error(where + ": " + e.what());
  }
  if (p.total_degree() > degree_cap)
    throw io_error(where + ": total degree " + std::to_string(p.total_degree()) +
                   " exceeds the cap " + std::to_string(degree_cap));
  return p;
}

std::size_t get_count(const nlohmann::json& doc, const char* key, const std::string& where) {
  if (!doc.contains(key) || !doc[key].is_number_unsigned())
    throw io_error(where + ": missing or invalid '" + std::string(key) + "'");
  return doc[key].get<std::size_t>();
}

}  // namespace

nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw io_error("'" + path + "': " + e.what());
  }
}

AlgebroidSpec algebroid_from_json(const nlohmann::json& doc, std::size_t degree_cap) {
  if (!doc.is_object()) throw io_error("algebroid: expected a JSON object");
  std::size_t n = get_count(doc, "num_vars", "algebroid");
  std::size_t r = get_count(doc, "rank", "algebroid");
  if (r == 0) throw io_error("algebroid: rank must be >= 1");

  AlgebroidSpec spec(n, r);
  if (doc.contains("anchor")) {
    const auto& anchor = doc["anchor"];
    if (!anchor.is_array() || anchor.size() != r)
      throw io_error("algebroid: 'anchor' must be an array of rank rows");
    for (std::size_t i = 0; i < r; ++i) {
      if (!anchor[i].is_array() || anchor[i].size() != n)
        throw io_error("algebroid: anchor row " + std::to_string(i) + " must have num_vars entries");
      for (std::size_t j = 0; j < n; ++j)
        spec.set_anchor(i, j, parse_poly(anchor[i][j], n, degree_cap,
                                         "anchor[" + std::to_string(i) + "][" +
                                             std::to_string(j) + "]"));
    }
  }
  if (doc.contains("bracket")) {
    if (!doc["bracket"].is_array()) throw io_error("algebroid: 'bracket' must be an array");
    for (const auto& entry : doc["bracket"]) {
      std::size_t i = get_count(entry, "i", "bracket entry");
      std::size_t j = get_count(entry, "j", "bracket entry");
      if (!(i < j) || j >= r)
        throw io_error("algebroid: bracket entry needs i < j < rank, got (" + std::to_string(i) +
                       "," + std::to_string(j) + ")");
      if (!entry.contains("coeffs") || !entry["coeffs"].is_array() || entry["coeffs"].size() != r)
        throw io_error("algebroid: bracket entry (" + std::to_string(i) + "," +
                       std::to_string(j) + ") needs 'coeffs' of length rank");
      std::vector<Polynomial> coeffs;
      coeffs.reserve(r);
      for (std::size_t k = 0; k < r; ++k)
        coeffs.push_back(parse_poly(entry["coeffs"][k], n, degree_cap,
                                    "bracket(" + std::to_string(i) + "," + std::to_string(j) +
                                        ") coeff " + std::to_string(k)));
      spec.set_bracket(i, j, std::move(coeffs));
    }
  }
  return spec;
}

nlohmann::ordered_json algebroid_to_json(const AlgebroidSpec& spec) {
  nlohmann::ordered_json doc;
  doc["num_vars"] = spec.num_vars();
  doc["rank"] = spec.rank();
  nlohmann::ordered_json anchor = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < spec.rank(); ++i) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (std::size_t j = 0; j < spec.num_vars(); ++j) row.push_back(spec.anchor(i, j).str());
    anchor.push_back(row);
  }
  doc["anchor"] = anchor;
  nlohmann::ordered_json bracket = nlohmann::ordered_json::array();
  for (const auto& [ij, coeffs] : spec.brackets()) {
    nlohmann::ordered_json entry;
    entry["i"] = ij.first;
    entry["j"] = ij.second;
    nlohmann::ordered_json cs = nlohmann::ordered_json::array();
    for (const auto& c : coeffs) cs.push_back(c.str());
    entry["coeffs"] = cs;
    bracket.push_back(entry);
  }
  doc["bracket"] = bracket;
  return doc;
}

GaussianRational parse_scalar_entry(const std::string& text) {
  std::string s;
  s.reserve(text.size());
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  if (s.empty()) throw io_error("empty scalar entry");

  auto ipos = s.find('i');
  if (ipos == std::string::npos) return GaussianRational(Rational::parse(s));
  if (ipos != s.size() - 1)
    throw io_error("scalar entry '" + text + "': 'i' must terminate the entry");
  s.pop_back();  // drop the i

  // Split the remaining "a+c" / "a-c" / "c" at the sign separating the parts
  // (skip position 0 and signs following '/' or at the very start).
  std::size_t split = std::string::npos;
  for (std::size_t k = 1; k < s.size(); ++k)
    if ((s[k] == '+' || s[k] == '-') && s[k - 1] != '/') split = k;
  if (split == std::string::npos) {
    if (s.empty() || s == "+") return GaussianRational(Rational(0), Rational(1));
    if (s == "-") return GaussianRational(Rational(0), Rational(-1));
    return GaussianRational(Rational(0), Rational::parse(s));
  }
  Rational re = Rational::parse(s.substr(0, split));
  std::string imag = s.substr(split);
  if (imag == "+") return GaussianRational(re, Rational(1));
  if (imag == "-") return GaussianRational(re, Rational(-1));
  return GaussianRational(re, Rational::parse(imag));
}

bool is_rep_document(const nlohmann::json& doc) {
  return doc.is_object() && doc.contains("lie_algebra") && doc.contains("rho");
}

RepSpec rep_from_json(const nlohmann::json& doc, std::size_t degree_cap) {
  if (!doc.is_object() || !doc.contains("lie_algebra"))
    throw io_error("rep: expected an object with 'lie_algebra'");
  AlgebroidSpec algebra = algebroid_from_json(doc["lie_algebra"], degree_cap);
  if (algebra.num_vars() != 0) throw io_error("rep: 'lie_algebra' must have num_vars 0");
  std::size_t m = get_count(doc, "dim_V", "rep");
  if (m == 0) throw io_error("rep: dim_V must be >= 1");

  ScalarField field = ScalarField::Real;
  if (doc.contains("scalar_field")) {
    std::string f = doc["scalar_field"].get<std::string>();
    if (f == "complex")
      field = ScalarField::Complex;
    else if (f != "real")
      throw io_error("rep: scalar_field must be 'real' or 'complex'");
  }

  RepSpec rep(std::move(algebra), m, field);
  if (!doc.contains("rho") || !doc["rho"].is_array() || doc["rho"].size() != rep.rank())
    throw io_error("rep: 'rho' must list one matrix per generator");
  for (std::size_t i = 0; i < rep.rank(); ++i) {
    const auto& mat = doc["rho"][i];
    if (!mat.is_array() || mat.size() != m)
      throw io_error("rep: rho[" + std::to_string(i) + "] must be dim_V x dim_V");
    for (std::size_t a = 0; a < m; ++a) {
      if (!mat[a].is_array() || mat[a].size() != m)
        throw io_error("rep: rho[" + std::to_string(i) + "] must be dim_V x dim_V");
      for (std::size_t b = 0; b < m; ++b) {
        GaussianRational v;
        try {
          v = parse_scalar_entry(mat[a][b].get<std::string>());
        } catch (const std::exception& e) {
          throw io_error("rep: rho[" + std::to_string(i) + "][" + std::to_string(a) + "][" +
                         std::to_string(b) + "]: " + e.what());
        }
        if (field == ScalarField::Real && !v.im.is_zero())
          throw io_error("rep: complex entry in a real representation at rho[" +
                         std::to_string(i) + "]");
        rep.rho[i](a, b) = v;
      }
    }
  }
  return rep;
}

ConnectionForm connection_from_json(const nlohmann::json& doc, const AlgebroidSpec& spec,
                                    std::size_t degree_cap) {
  if (!doc.is_object()) throw io_error("connection: expected a JSON object");
  std::size_t m = get_count(doc, "dim_E", "connection");
  if (m == 0) throw io_error("connection: dim_E must be >= 1");
  LForm alpha(1, spec.rank(), spec.num_vars(), m, m);
  if (doc.contains("alpha")) {
    if (!doc["alpha"].is_array()) throw io_error("connection: 'alpha' must be an array");
    for (const auto& entry : doc["alpha"]) {
      std::size_t i = get_count(entry, "basis_index", "connection entry");
      if (i >= spec.rank()) throw io_error("connection: basis_index out of range");
      if (!entry.contains("matrix") || !entry["matrix"].is_array() ||
          entry["matrix"].size() != m)
        throw io_error("connection: entry needs a dim_E x dim_E 'matrix'");
      PolyMatrix value(m, m, spec.num_vars());
      for (std::size_t a = 0; a < m; ++a) {
        if (!entry["matrix"][a].is_array() || entry["matrix"][a].size() != m)
          throw io_error("connection: entry needs a dim_E x dim_E 'matrix'");
        for (std::size_t b = 0; b < m; ++b)
          value(a, b) = parse_poly(entry["matrix"][a][b], spec.num_vars(), degree_cap,
                                   "alpha[" + std::to_string(i) + "]");
      }
      alpha.set_component({i}, alpha.component({i}) + value);
    }
  }
  return ConnectionForm(std::move(alpha));
}

GaugeMap gauge_from_json(const nlohmann::json& doc, const AlgebroidSpec& spec,
                         std::size_t degree_cap) {
  if (!doc.is_object() || !doc.contains("phi") || !doc.contains("phi_inv"))
    throw io_error("gauge: expected an object with 'phi' and 'phi_inv'");
  auto parse_matrix = [&](const nlohmann::json& node, const std::string& name) {
    if (!node.is_array() || node.empty()) throw io_error("gauge: '" + name + "' must be a matrix");
    std::size_t m = node.size();
    PolyMatrix out(m, m, spec.num_vars());
    for (std::size_t a = 0; a < m; ++a) {
      if (!node[a].is_array() || node[a].size() != m)
        throw io_error("gauge: '" + name + "' must be square");
      for (std::size_t b = 0; b < m; ++b)
        out(a, b) = parse_poly(node[a][b], spec.num_vars(), degree_cap, name);
    }
    return out;
  };
  PolyMatrix phi = parse_matrix(doc["phi"], "phi");
  PolyMatrix phi_inv = parse_matrix(doc["phi_inv"], "phi_inv");
  try {
    return GaugeMap(std::move(phi), std::move(phi_inv));
  } catch (const std::exception& e) {
    throw io_error(std::string("gauge: ") + e.what());
  }
}

}  // namespace moduli
