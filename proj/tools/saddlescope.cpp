#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "saddlescope/csv.hpp"
#include "saddlescope/dynamics.hpp"
#include "saddlescope/normal_form.hpp"
#include "saddlescope/phase_space.hpp"
#include "saddlescope/result_io.hpp"
#include "saddlescope/scattering.hpp"
#include "saddlescope/spec_io.hpp"
#include "saddlescope/systems.hpp"
#include "saddlescope/threading.hpp"

namespace {

using namespace saddlescope;

struct GridConfig {
  double e_min = 0;
  double e_max = 1;
  int steps = 100;

  void validate() const {
    if (steps < 2) throw StructuralError("config: steps must be >= 2");
    if (!(e_min < e_max)) throw StructuralError("config: emin must be below emax");
  }
  double at(int i) const { return e_min + (e_max - e_min) * double(i) / double(steps - 1); }
};

void write_rows(const std::string& path, const std::string& format,
                const std::vector<std::string>& columns,
                const std::vector<std::vector<double>>& rows) {
  if (format == "csv") {
    CsvWriter csv(path);
    csv.header(columns);
    for (const auto& r : rows) csv.row(r);
    return;
  }
  if (format == "json") {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows) {
      nlohmann::json obj;
      for (std::size_t i = 0; i < columns.size(); ++i) obj[columns[i]] = r[i];
      arr.push_back(obj);
    }
    std::ofstream out(path);
    if (!out) throw StructuralError("cannot open output file '" + path + "'");
    out << arr.dump(2) << "\n";
    return;
  }
  throw StructuralError("config: unknown format '" + format + "'");
}

int run_normalform(const std::string& spec_path, int order, const std::string& out_path) {
  SystemSpec spec = load_spec(spec_path);
  NormalFormResult result = qnf(spec, order);
  std::ofstream out(out_path);
  if (!out) throw StructuralError("cannot open output file '" + out_path + "'");
  out << serialize_normal_form(result) << "\n";
  return 0;
}

int run_crp(const std::string& spec_path, int order, const GridConfig& grid,
            const std::string& out_path, const std::string& format,
            std::optional<double> min_action) {
  grid.validate();
  SystemSpec spec = load_spec(spec_path);
  NormalFormResult result = qnf(spec, order);
  CrpOptions opts;
  opts.min_action = min_action;
  const bool exact = has_uncoupled_crp_oracle(spec);
  const bool weyl = spec.dof >= 2;

  std::vector<std::vector<double>> rows(grid.steps);
  parallel_for_index(grid.steps, [&](int i) {
    double E = grid.at(i);
    double n_qnf = crp(result.K_qnf_op, E, spec.hbar_eff, opts).value;
    double n_weyl = std::numeric_limits<double>::quiet_NaN();
    if (weyl && E > result.spectrum.E0)
      n_weyl = flux_and_weyl(result.K_cnf, E, spec.hbar_eff).weyl_count;
    else if (weyl)
      n_weyl = 0.0;
    double n_exact = exact ? exact_crp_uncoupled(spec, E)
                           : std::numeric_limits<double>::quiet_NaN();
    rows[i] = {E, n_qnf, n_weyl, n_exact};
  });
  write_rows(out_path, format, {"E", "N_qnf", "N_weyl", "N_exact"}, rows);
  return 0;
}

int run_flux(const std::string& spec_path, int order, const GridConfig& grid,
             const std::string& out_path, const std::string& format) {
  grid.validate();
  SystemSpec spec = load_spec(spec_path);
  NormalFormResult result = cnf(spec, order);
  std::vector<std::vector<double>> rows(grid.steps);
  parallel_for_index(grid.steps, [&](int i) {
    double E = grid.at(i);
    if (E > result.spectrum.E0) {
      FluxResult f = flux_and_weyl(result.K_cnf, E, spec.hbar_eff);
      rows[i] = {E, f.volume, f.flux, f.weyl_count};
    } else {
      rows[i] = {E, 0.0, 0.0, 0.0};
    }
  });
  write_rows(out_path, format, {"E", "V", "f", "N_weyl"}, rows);
  return 0;
}

int run_resonances(const std::string& spec_path, int order, int n_max,
                   const std::string& out_path, const std::string& format) {
  SystemSpec spec = load_spec(spec_path);
  NormalFormResult result = qnf(spec, order);
  std::vector<int> bounds(spec.dof, n_max);
  auto table = resonances(result.K_qnf_op, spec.hbar_eff, bounds);

  std::vector<std::string> columns;
  for (int k = 1; k <= spec.dof; ++k) columns.push_back("n_" + std::to_string(k));
  columns.insert(columns.end(), {"Re_E", "Im_E", "lifetime"});
  std::vector<std::vector<double>> rows;
  for (const auto& entry : table) {
    std::vector<double> row;
    for (int v : entry.n) row.push_back(double(v));
    row.push_back(entry.energy.real());
    row.push_back(entry.energy.imag());
    row.push_back(entry.lifetime);
    rows.push_back(std::move(row));
  }
  write_rows(out_path, format, columns, rows);
  return 0;
}

int run_validate(const std::string& spec_path, int order, int seeds, double radius, double t_max,
                 const std::string& out_path, const std::string& format) {
  SystemSpec spec = load_spec(spec_path);
  NormalFormResult result = cnf(spec, order);
  DriftReport report = validate_invariants(spec, result, seeds, radius, t_max);
  std::vector<std::string> columns = {"sample", "drift_I"};
  for (int k = 2; k <= spec.dof; ++k) columns.push_back("drift_J" + std::to_string(k));
  std::vector<std::vector<double>> rows;
  for (const auto& r : report.rows) {
    std::vector<double> row = {double(r.sample), r.drift_reactive};
    for (int k = 0; k < r.drift_bath.size(); ++k) row.push_back(r.drift_bath[k]);
    rows.push_back(std::move(row));
  }
  write_rows(out_path, format, columns, rows);
  std::cout << "median drift_I " << CsvWriter::format(report.median_reactive_drift) << "\n";
  return 0;
}

int run_globalize(const std::string& spec_path, int order, double energy,
                  const std::string& branch_name, double epsilon, int seeds, double t_max,
                  const std::string& out_path) {
  SystemSpec spec = load_spec(spec_path);
  NormalFormResult result = cnf(spec, order);
  ManifoldBranch branch;
  if (branch_name == "W_u_f")
    branch = ManifoldBranch::UnstableForward;
  else if (branch_name == "W_u_b")
    branch = ManifoldBranch::UnstableBackward;
  else if (branch_name == "W_s_f")
    branch = ManifoldBranch::StableForward;
  else if (branch_name == "W_s_b")
    branch = ManifoldBranch::StableBackward;
  else
    throw StructuralError("config: branch must be one of W_u_f, W_u_b, W_s_f, W_s_b");

  GlobalizedManifold manifold =
      globalize_manifold(spec, result, energy, branch, epsilon, seeds, t_max);

  // Seeds as a JSON array next to the trajectory CSV.
  nlohmann::json seeds_json = nlohmann::json::array();
  for (const auto& s : manifold.seeds) {
    nlohmann::json obj;
    obj["nf_point"] = std::vector<double>(s.nf_point.data(), s.nf_point.data() + s.nf_point.size());
    obj["physical_point"] = std::vector<double>(s.physical_point.data(),
                                                s.physical_point.data() + s.physical_point.size());
    seeds_json.push_back(obj);
  }
  std::ofstream seeds_out(out_path + ".seeds.json");
  if (!seeds_out) throw StructuralError("cannot open output file '" + out_path + ".seeds.json'");
  seeds_out << seeds_json.dump(2) << "\n";

  CsvWriter csv(out_path);
  std::vector<std::string> columns = {"seed", "t"};
  for (int k = 1; k <= spec.dof; ++k) columns.push_back("q" + std::to_string(k));
  for (int k = 1; k <= spec.dof; ++k) columns.push_back("p" + std::to_string(k));
  columns.push_back("E");
  columns.push_back("I");
  for (int k = 2; k <= spec.dof; ++k) columns.push_back("J" + std::to_string(k));
  csv.header(columns);
  NfTransformer transformer(result);
  for (std::size_t s = 0; s < manifold.trajectories.size(); ++s) {
    const Trajectory& traj = manifold.trajectories[s];
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
      std::vector<double> row = {double(s), traj.times[i]};
      for (int j = 0; j < traj.states[i].size(); ++j) row.push_back(traj.states[i][j]);
      row.push_back(hamiltonian_value(spec, traj.states[i]));
      // integrals through the normal form map; meaningful near the saddle only
      ActionValues actions = momentum_map(transformer.to_normal_form(traj.states[i]));
      row.push_back(actions.reactive);
      for (int k = 0; k < actions.bath.size(); ++k) row.push_back(actions.bath[k]);
      csv.row(row);
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Phase-space normal form toolkit for reactive scattering"};
  app.require_subcommand(1);

  std::string spec_path, out_path = "out.csv", format = "csv", branch = "W_u_f";
  int order = 6, steps = 100, seeds = 32, n_max = 4;
  double e_min = 0, e_max = 1, epsilon = 1e-3, t_max = 10.0, radius = 0.1, energy = 0;
  std::optional<double> min_action;

  auto add_common = [&](CLI::App* cmd, bool with_grid) {
    cmd->add_option("--spec", spec_path, "system spec JSON file")->required();
    cmd->add_option("--order", order, "normal form order (even, 2..12)");
    cmd->add_option("--out", out_path, "output path");
    if (with_grid) {
      cmd->add_option("--emin", e_min, "energy grid start");
      cmd->add_option("--emax", e_max, "energy grid end");
      cmd->add_option("--steps", steps, "energy grid points");
      cmd->add_option("--format", format, "csv or json");
    }
  };

  CLI::App* cmd_nf = app.add_subcommand("normalform", "compute the normal form tables");
  add_common(cmd_nf, false);

  CLI::App* cmd_crp = app.add_subcommand("crp", "cumulative reaction probability curve");
  add_common(cmd_crp, true);
  cmd_crp->add_option("--min-action", min_action, "validity window floor on I_n");

  CLI::App* cmd_flux = app.add_subcommand("flux", "directional flux and Weyl count curve");
  add_common(cmd_flux, true);

  CLI::App* cmd_res = app.add_subcommand("resonances", "Gamov-Siegert resonance table");
  add_common(cmd_res, false);
  cmd_res->add_option("--nmax", n_max, "max quantum number per mode");
  cmd_res->add_option("--format", format, "csv or json");

  CLI::App* cmd_val = app.add_subcommand("validate", "invariant drift report");
  add_common(cmd_val, false);
  cmd_val->add_option("--seeds", seeds, "number of samples");
  cmd_val->add_option("--radius", radius, "sampling radius around the saddle");
  cmd_val->add_option("--tmax", t_max, "integration time per sample");
  cmd_val->add_option("--format", format, "csv or json");

  CLI::App* cmd_glob = app.add_subcommand("globalize", "globalize invariant manifold branches");
  add_common(cmd_glob, false);
  cmd_glob->add_option("--energy", energy, "energy of the NHIM shell")->required();
  cmd_glob->add_option("--branch", branch, "W_u_f, W_u_b, W_s_f or W_s_b");
  cmd_glob->add_option("--epsilon", epsilon, "seed displacement off the NHIM");
  cmd_glob->add_option("--seeds", seeds, "number of seeds");
  cmd_glob->add_option("--tmax", t_max, "integration time per seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (cmd_nf->parsed()) return run_normalform(spec_path, order, out_path);
    if (cmd_crp->parsed())
      return run_crp(spec_path, order, {e_min, e_max, steps}, out_path, format, min_action);
    if (cmd_flux->parsed())
      return run_flux(spec_path, order, {e_min, e_max, steps}, out_path, format);
    if (cmd_res->parsed()) return run_resonances(spec_path, order, n_max, out_path, format);
    if (cmd_val->parsed())
      return run_validate(spec_path, order, seeds, radius, t_max, out_path, format);
    if (cmd_glob->parsed())
      return run_globalize(spec_path, order, energy, branch, epsilon, seeds, t_max, out_path);
  } catch (const StructuralError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ValidityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
