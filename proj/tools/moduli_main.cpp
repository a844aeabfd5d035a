// Command-line front end: validates algebroid/representation documents,
// runs the exact identity suites, curvature and gauge computations, and the
// numerical local-model machinery.

#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>
#include <sstream>
#include <string>

#include "moduli/cartan.hpp"
#include "moduli/deformation.hpp"
#include "moduli/io.hpp"
#include "moduli/kuranishi.hpp"
#include "moduli/random_gen.hpp"

using nlohmann::ordered_json;
using namespace moduli;

namespace {

constexpr int kOk = 0;
constexpr int kValidationFailure = 1;
constexpr int kParseError = 2;
constexpr int kNoConvergence = 3;

struct CommonOpts {
  std::string format = "text";
  std::size_t degree_cap = 12;
  bool json() const { return format == "json"; }
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--format", opts.format, "Output format: text or json")
      ->check(CLI::IsMember({"text", "json"}));
  cmd->add_option("--degree-cap", opts.degree_cap,
                  "Reject input polynomials above this total degree");
}

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

void emit(const ordered_json& doc, bool as_json, const std::string& text) {
  if (as_json)
    std::cout << doc.dump(2) << "\n";
  else
    std::cout << text;
}

ordered_json lform_to_json(const LForm& form) {
  ordered_json arr = ordered_json::array();
  for (const auto& [tuple, matrix] : form.components()) {
    ordered_json entry;
    entry["basis_tuple"] = tuple;
    ordered_json rows = ordered_json::array();
    for (std::size_t a = 0; a < matrix.rows(); ++a) {
      ordered_json row = ordered_json::array();
      for (std::size_t b = 0; b < matrix.cols(); ++b) row.push_back(matrix(a, b).str());
      rows.push_back(row);
    }
    entry["matrix"] = rows;
    arr.push_back(entry);
  }
  return arr;
}

std::string lform_to_text(const LForm& form) {
  if (form.is_zero()) return "  0\n";
  std::string out;
  for (const auto& [tuple, matrix] : form.components()) {
    out += "  e*(";
    for (std::size_t i = 0; i < tuple.size(); ++i)
      out += (i ? "," : "") + std::to_string(tuple[i]);
    out += "): ";
    if (matrix.rows() == 1 && matrix.cols() == 1) {
      out += matrix(0, 0).str() + "\n";
    } else {
      out += "\n";
      for (std::size_t a = 0; a < matrix.rows(); ++a) {
        out += "    [";
        for (std::size_t b = 0; b < matrix.cols(); ++b)
          out += (b ? ", " : "") + matrix(a, b).str();
        out += "]\n";
      }
    }
  }
  return out;
}

ordered_json suite_to_json(const SuiteReport& report) {
  ordered_json arr = ordered_json::array();
  for (const auto& check : report.checks) {
    ordered_json entry;
    entry["name"] = check.name;
    entry["trials"] = check.trials;
    entry["pass"] = check.pass;
    if (!check.pass) entry["failure"] = check.first_failure;
    arr.push_back(entry);
  }
  return arr;
}

ordered_json report_to_json(const ModuliReport& report) {
  ordered_json doc;
  doc["h_dims"] = report.h_dims;
  doc["index"] = report.index;
  doc["irreducible"] = report.irreducible;
  doc["commutant_dim"] = report.commutant_dim;
  doc["smooth"] = report.smooth;
  if (report.expected_local_dim) doc["expected_local_dim"] = *report.expected_local_dim;
  doc["obstruction_identically_zero"] = report.obstruction_vanishes;
  doc["scalar_field"] = report.complex_scalars ? "complex" : "real";
  ordered_json quad = ordered_json::array();
  for (const auto& slab : report.quadratic_form) {
    ordered_json rows = ordered_json::array();
    for (const auto& row : slab) {
      ordered_json cells = ordered_json::array();
      for (const auto& v : row) {
        if (report.complex_scalars)
          cells.push_back(ordered_json::array({v.real(), v.imag()}));
        else
          cells.push_back(v.real());
      }
      rows.push_back(cells);
    }
    quad.push_back(rows);
  }
  doc["quadratic_form"] = quad;
  if (report.zero_fraction) {
    doc["zero_fraction"] = *report.zero_fraction;
  }
  doc["n_samples"] = report.n_samples;
  doc["n_converged"] = report.n_converged;
  doc["max_phi_norm"] = report.max_phi_norm;
  doc["sample_tol"] = report.sample_tol;
  doc["radius"] = report.radius;
  doc["max_iter"] = report.max_iter;
  doc["tol_fix"] = report.tol_fix;
  doc["seed"] = report.seed;
  return doc;
}

std::string report_to_text(const ModuliReport& report) {
  std::string out;
  out += "h_dims: [";
  for (std::size_t i = 0; i < report.h_dims.size(); ++i)
    out += (i ? ", " : "") + std::to_string(report.h_dims[i]);
  out += "]\n";
  out += "index: " + std::to_string(report.index) + "\n";
  out += std::string("irreducible: ") + (report.irreducible ? "true" : "false") +
         " (commutant dim " + std::to_string(report.commutant_dim) + ")\n";
  out += std::string("smooth: ") + (report.smooth ? "true" : "false") + " (dim H^2 = " +
         std::to_string(report.h_dims.size() > 2 ? report.h_dims[2] : 0) + ")\n";
  if (report.expected_local_dim)
    out += "expected local dim: " + std::to_string(*report.expected_local_dim) + "\n";
  if (report.obstruction_vanishes) out += "obstruction map: identically zero\n";
  if (!report.irreducible)
    out += "warning: reducible connection, the gauge action is not free near this point\n";
  if (report.zero_fraction) {
    out += "zero fraction: " + fmt(*report.zero_fraction) + " (" +
           std::to_string(report.n_converged) + "/" + std::to_string(report.n_samples) +
           " samples converged, tol " + fmt(report.sample_tol) + ")\n";
    out += "max |Phi| over samples: " + fmt(report.max_phi_norm) + "\n";
  }
  out += "radius: " + fmt(report.radius) + "\n";
  out += "solver: max_iter " + std::to_string(report.max_iter) + ", tol_fix " +
         fmt(report.tol_fix) + "\n";
  return out;
}

int run_validate(const std::string& path, const CommonOpts& opts) {
  auto doc = load_json_file(path);
  if (is_rep_document(doc)) {
    RepSpec rep = rep_from_json(doc, opts.degree_cap);
    auto report = validate_rep(rep);
    ordered_json out;
    out["kind"] = "representation";
    out["valid"] = report.valid();
    out["detail"] = report.summary();
    emit(out, opts.json(),
         std::string("representation: ") + (report.valid() ? "valid\n" : report.summary()));
    return report.valid() ? kOk : kValidationFailure;
  }
  AlgebroidSpec spec = algebroid_from_json(doc, opts.degree_cap);
  auto report = validate_algebroid(spec);
  ordered_json out;
  out["kind"] = "algebroid";
  out["valid"] = report.valid();
  out["detail"] = report.summary();
  emit(out, opts.json(),
       std::string("algebroid: ") + (report.valid() ? "valid\n" : report.summary()));
  return report.valid() ? kOk : kValidationFailure;
}

AlgebroidSpec load_algebroid_or_algebra(const std::string& path, std::size_t degree_cap) {
  auto doc = load_json_file(path);
  if (is_rep_document(doc)) return rep_from_json(doc, degree_cap).algebra;
  return algebroid_from_json(doc, degree_cap);
}

int run_identities(const std::string& path, std::size_t trials, std::uint64_t seed,
                   std::size_t max_degree, std::size_t dim, bool with_connections,
                   const CommonOpts& opts) {
  AlgebroidSpec spec = load_algebroid_or_algebra(path, opts.degree_cap);
  auto validation = validate_algebroid(spec);
  if (!validation.valid()) {
    std::cerr << "input is not a Lie algebroid:\n" << validation.summary();
    return kValidationFailure;
  }
  SuiteReport report = cartan_identity_suite(spec, trials, seed, max_degree);
  if (with_connections) {
    SuiteReport conn = connection_identity_suite(spec, dim, trials, seed, max_degree);
    for (auto& check : conn.checks) report.checks.push_back(std::move(check));
  }

  std::string text;
  for (const auto& check : report.checks) {
    text += std::string(check.pass ? "pass" : "FAIL") + "  " + check.name;
    if (!check.pass) text += "  [" + check.first_failure + "]";
    text += "\n";
  }
  text += std::to_string(report.passed()) + "/" + std::to_string(report.checks.size()) +
          " identities pass\n";

  ordered_json out;
  out["identities"] = suite_to_json(report);
  out["passed"] = report.passed();
  out["total"] = report.checks.size();
  emit(out, opts.json(), text);
  return report.all_pass() ? kOk : kValidationFailure;
}

int run_curvature(const std::string& path, const std::string& connection_path,
                  const CommonOpts& opts) {
  AlgebroidSpec spec = load_algebroid_or_algebra(path, opts.degree_cap);
  ConnectionForm A = connection_from_json(load_json_file(connection_path), spec, opts.degree_cap);
  LForm R = curvature(spec, A);
  LForm bianchi = bianchi_check(spec, A);

  ordered_json out;
  out["curvature"] = lform_to_json(R);
  out["flat"] = R.is_zero();
  out["bianchi_residual_zero"] = bianchi.is_zero();
  std::string text = "curvature:\n" + lform_to_text(R);
  text += std::string("flat: ") + (R.is_zero() ? "true" : "false") + "\n";
  text += std::string("bianchi residual: ") + (bianchi.is_zero() ? "0" : "NONZERO") + "\n";
  emit(out, opts.json(), text);
  return kOk;
}

int run_gauge(const std::string& path, const std::string& connection_path,
              const std::string& phi_path, const CommonOpts& opts) {
  AlgebroidSpec spec = load_algebroid_or_algebra(path, opts.degree_cap);
  ConnectionForm A = connection_from_json(load_json_file(connection_path), spec, opts.degree_cap);
  GaugeMap phi = gauge_from_json(load_json_file(phi_path), spec, opts.degree_cap);
  ConnectionForm transformed = gauge_transform(spec, A, phi);
  bool covariant =
      curvature(spec, transformed) == curvature(spec, A).conjugate(phi.phi_inv, phi.phi);

  ordered_json out;
  out["alpha_phi"] = lform_to_json(transformed.alpha);
  out["curvature_covariance_exact"] = covariant;
  std::string text = "alpha^phi:\n" + lform_to_text(transformed.alpha);
  text += std::string("curvature covariance: ") + (covariant ? "exact" : "VIOLATED") + "\n";
  emit(out, opts.json(), text);
  return covariant ? kOk : kValidationFailure;
}

int run_cohomology(const std::string& path, double rank_tolerance, const CommonOpts& opts) {
  RepSpec rep = rep_from_json(load_json_file(path), opts.degree_cap);
  auto validation = validate_rep(rep);
  if (!validation.valid()) {
    std::cerr << "representation is not flat:\n" << validation.summary();
    return kValidationFailure;
  }
  auto dims = cohomology_dims(rep, rank_tolerance);
  long index = rep_index(rep, rank_tolerance);
  auto irr = irreducibility_test(rep, rank_tolerance);

  ordered_json out;
  out["h_dims"] = dims;
  out["index"] = index;
  out["irreducible"] = irr.irreducible;
  out["commutant_dim"] = irr.commutant_dim;
  std::string text = "h_dims: [";
  for (std::size_t i = 0; i < dims.size(); ++i) text += (i ? ", " : "") + std::to_string(dims[i]);
  text += "]\nindex: " + std::to_string(index) + "\n";
  text += std::string("irreducible: ") + (irr.irreducible ? "true" : "false") +
          " (commutant dim " + std::to_string(irr.commutant_dim) + ")\n";
  emit(out, opts.json(), text);
  return kOk;
}

int run_kuranishi(const std::string& path, ReportParams params, const CommonOpts& opts) {
  RepSpec rep = rep_from_json(load_json_file(path), opts.degree_cap);
  auto validation = validate_rep(rep);
  if (!validation.valid()) {
    std::cerr << "representation is not flat:\n" << validation.summary();
    return kValidationFailure;
  }
  ModuliReport report;
  try {
    report = local_model_report(rep, params);
  } catch (const std::invalid_argument& e) {
    std::cerr << "unsupported input: " << e.what() << "\n";
    return kValidationFailure;
  }
  emit(report_to_json(report), opts.json(), report_to_text(report));
  if (report.n_samples > 0 && report.n_converged == 0) {
    std::cerr << "solver error: no sample converged at radius " << report.radius << "\n";
    return kNoConvergence;
  }
  return kOk;
}

template <typename Scalar>
int oracle_impl(const RepSpec& rep, std::size_t seeds, double tol, std::uint64_t seed,
                const CommonOpts& opts) {
  KuranishiModel<Scalar> model = build_model<Scalar>(rep);
  auto solutions =
      mc_slice_solve_bruteforce<Scalar>(model.complex, seeds, tol, seed, 0.8 * model.radius);

  double worst_phi = 0;
  std::size_t in_ball = 0;
  for (const auto& beta : solutions) {
    if (beta.norm() >= model.radius) continue;
    ++in_ball;
    typename KuranishiModel<Scalar>::Vec gamma =
        model.hodge.harmonic_projector[1] * kuranishi_map(model, beta);
    worst_phi = std::max(worst_phi, obstruction(model, gamma).norm());
  }

  auto zeros = sample_obstruction_zeros(model, std::min<std::size_t>(seeds, 20), 1e-8, seed + 1);
  double worst_mc = 0;
  for (const auto& gamma : zeros) {
    auto beta = kuranishi_invert(model, gamma);
    worst_mc = std::max(worst_mc, mc_residual<Scalar>(model.complex, beta).norm());
  }

  bool pass = worst_phi <= 10 * std::max(tol, 1e-9) && worst_mc <= 1e-6;
  ordered_json out;
  out["solutions_found"] = solutions.size();
  out["solutions_in_ball"] = in_ball;
  out["max_obstruction_norm"] = worst_phi;
  out["phi_zeros_sampled"] = zeros.size();
  out["max_mc_residual_at_zeros"] = worst_mc;
  out["equivalence_pass"] = pass;
  std::string text = "slice MC solutions: " + std::to_string(solutions.size()) + " (" +
                     std::to_string(in_ball) + " inside the ball)\n";
  text += "max |Phi(K(beta))| over solutions: " + fmt(worst_phi) + "\n";
  text += "obstruction zeros sampled: " + std::to_string(zeros.size()) + "\n";
  text += "max MC residual at F(zero): " + fmt(worst_mc) + "\n";
  text += std::string("oracle equivalence: ") + (pass ? "pass" : "FAIL") + "\n";
  emit(out, opts.json(), text);
  return pass ? kOk : kValidationFailure;
}

int run_oracle(const std::string& path, std::size_t seeds, double tol, std::uint64_t seed,
               const CommonOpts& opts) {
  RepSpec rep = rep_from_json(load_json_file(path), opts.degree_cap);
  auto validation = validate_rep(rep);
  if (!validation.valid()) {
    std::cerr << "representation is not flat:\n" << validation.summary();
    return kValidationFailure;
  }
  try {
    if (rep.scalar_field == ScalarField::Real)
      return oracle_impl<double>(rep, seeds, tol, seed, opts);
    return oracle_impl<std::complex<double>>(rep, seeds, tol, seed, opts);
  } catch (const std::invalid_argument& e) {
    std::cerr << "unsupported input: " << e.what() << "\n";
    return kValidationFailure;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact Lie algebroid calculus and flat-connection local models"};
  app.require_subcommand(1);

  CommonOpts opts;

  std::string input, connection_path, phi_path;
  std::size_t trials = 20, dim = 2, samples = 200, seeds = 20, max_iter = 200;
  std::size_t max_degree = 4;
  std::uint64_t seed = 1;
  double radius = 0, sample_tol = 1e-2, tol = 1e-9, rank_tolerance = 1e-9, tol_fix = 1e-12;
  bool with_connections = false;

  auto* validate = app.add_subcommand("validate", "Check the axioms of a document");
  validate->add_option("input", input)->required();
  add_common(validate, opts);

  auto* identities = app.add_subcommand("identities", "Run the exact Cartan identity suite");
  identities->add_option("input", input)->required();
  identities->add_option("--trials", trials)->check(CLI::PositiveNumber);
  identities->add_option("--seed", seed);
  identities->add_option("--max-degree", max_degree, "Coefficient degree of random inputs");
  identities->add_option("--dim", dim, "Bundle rank for connection identities");
  identities->add_flag("--connections", with_connections, "Also run connection identities");
  add_common(identities, opts);

  auto* curvature_cmd = app.add_subcommand("curvature", "Curvature of a connection form");
  curvature_cmd->add_option("input", input)->required();
  curvature_cmd->add_option("--connection", connection_path)->required();
  add_common(curvature_cmd, opts);

  auto* gauge_cmd = app.add_subcommand("gauge", "Gauge-transform a connection form");
  gauge_cmd->add_option("input", input)->required();
  gauge_cmd->add_option("--connection", connection_path)->required();
  gauge_cmd->add_option("--phi", phi_path)->required();
  add_common(gauge_cmd, opts);

  auto* cohomology_cmd = app.add_subcommand("cohomology", "Cohomology of the deformation complex");
  cohomology_cmd->add_option("input", input)->required();
  cohomology_cmd->add_option("--rank-tolerance", rank_tolerance)->check(CLI::PositiveNumber);
  add_common(cohomology_cmd, opts);

  auto* kuranishi_cmd = app.add_subcommand("kuranishi", "Local model of the moduli space");
  kuranishi_cmd->add_option("input", input)->required();
  kuranishi_cmd->add_option("--radius", radius, "Contraction radius (0 = automatic)")->check(CLI::NonNegativeNumber);
  kuranishi_cmd->add_option("--samples", samples);
  kuranishi_cmd->add_option("--sample-tol", sample_tol)->check(CLI::PositiveNumber);
  kuranishi_cmd->add_option("--seed", seed);
  kuranishi_cmd->add_option("--max-iter", max_iter);
  kuranishi_cmd->add_option("--tol-fix", tol_fix)->check(CLI::PositiveNumber);
  kuranishi_cmd->add_option("--rank-tolerance", rank_tolerance)->check(CLI::PositiveNumber);
  add_common(kuranishi_cmd, opts);

  auto* oracle_cmd = app.add_subcommand("oracle", "Brute-force Maurer-Cartan cross-check");
  oracle_cmd->add_option("input", input)->required();
  oracle_cmd->add_option("--seeds", seeds);
  oracle_cmd->add_option("--tol", tol)->check(CLI::PositiveNumber);
  oracle_cmd->add_option("--seed", seed);
  add_common(oracle_cmd, opts);

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) return run_validate(input, opts);
    if (identities->parsed())
      return run_identities(input, trials, seed, max_degree, dim, with_connections, opts);
    if (curvature_cmd->parsed()) return run_curvature(input, connection_path, opts);
    if (gauge_cmd->parsed()) return run_gauge(input, connection_path, phi_path, opts);
    if (cohomology_cmd->parsed()) return run_cohomology(input, rank_tolerance, opts);
    if (kuranishi_cmd->parsed()) {
      ReportParams params;
      params.n_samples = samples;
      params.sample_tol = sample_tol;
      params.seed = seed;
      params.solver.radius = radius;
      params.solver.max_iter = max_iter;
      params.solver.tol_fix = tol_fix;
      params.solver.rank_tolerance = rank_tolerance;
      return run_kuranishi(input, params, opts);
    }
    if (oracle_cmd->parsed()) return run_oracle(input, seeds, tol, seed, opts);
  } catch (const io_error& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kParseError;
  } catch (const no_convergence& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kNoConvergence;
  } catch (const construct_error& e) {
    std::cerr << "construction rejected: " << e.what() << "\n";
    return kValidationFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kParseError;
  }
  return kOk;
}
