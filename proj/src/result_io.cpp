#include "saddlescope/result_io.hpp"

#include <json.hpp>

namespace saddlescope {

namespace {

using nlohmann::json;

json action_table_to_json(const ActionPolynomial& table) {
  json arr = json::array();
  const int d = table.dof();
  for (const auto& [m, c] : table.terms()) {
    json exps = json::array();
    for (int k = 0; k < d; ++k) exps.push_back(static_cast<int>(m.slot(d, k)));
    arr.push_back({{"exponents", exps},
                   {"hbar_power", static_cast<int>(m.slot(d, 2 * d))},
                   {"coefficient", c}});
  }
  return arr;
}

ActionPolynomial action_table_from_json(const json& arr, int d) {
  std::vector<ActionPolynomial::Term> terms;
  for (const auto& t : arr) {
    Monomial m;
    const auto& exps = t["exponents"];
    for (int k = 0; k < d; ++k) m.set_slot(d, k, exps[k].get<int>());
    m.set_slot(d, 2 * d, t["hbar_power"].get<int>());
    terms.emplace_back(m, t["coefficient"].get<double>());
  }
  return ActionPolynomial::from_terms(d, std::move(terms));
}

json generator_to_json(const PhasePolynomial& w) {
  json arr = json::array();
  const int d = w.dof();
  for (const auto& [m, c] : w.terms()) {
    json alpha = json::array(), beta = json::array();
    for (int k = 0; k < d; ++k) alpha.push_back(static_cast<int>(m.q_exp(d, k)));
    for (int k = 0; k < d; ++k) beta.push_back(static_cast<int>(m.p_exp(d, k)));
    arr.push_back({{"alpha", alpha},
                   {"beta", beta},
                   {"hbar_power", static_cast<int>(m.hbar_exp(d))},
                   {"coefficient", c}});
  }
  return arr;
}

PhasePolynomial generator_from_json(const json& arr, int d, int order) {
  std::vector<PhasePolynomial::Term> terms;
  for (const auto& t : arr) {
    Monomial m;
    for (int k = 0; k < d; ++k) m.set_slot(d, k, t["alpha"][k].get<int>());
    for (int k = 0; k < d; ++k) m.set_slot(d, d + k, t["beta"][k].get<int>());
    m.set_slot(d, 2 * d, t["hbar_power"].get<int>());
    terms.emplace_back(m, t["coefficient"].get<double>());
  }
  return PhasePolynomial::from_terms(d, order, std::move(terms));
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json arr = json::array();
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) arr.push_back(m(i, j));
  return arr;
}

Eigen::MatrixXd matrix_from_json(const json& arr, int n) {
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = arr[i * n + j].get<double>();
  return m;
}

}  // namespace

std::string serialize_normal_form(const NormalFormResult& r) {
  json root;
  root["dof"] = r.dof;
  root["order"] = r.order;
  root["hbar_eff"] = r.hbar_eff;
  root["quantum"] = r.quantum;
  root["lambda"] = r.spectrum.lambda;
  json omega = json::array();
  for (int k = 0; k < r.spectrum.omega.size(); ++k) omega.push_back(r.spectrum.omega[k]);
  root["omega"] = omega;
  root["E0"] = r.spectrum.E0;
  json shift = json::array();
  for (int i = 0; i < r.shift.size(); ++i) shift.push_back(r.shift[i]);
  root["shift"] = shift;
  root["M"] = matrix_to_json(r.map.M);
  root["M_inv"] = matrix_to_json(r.map.M_inv);
  json gens = json::array();
  for (const auto& w : r.generators) gens.push_back(generator_to_json(w));
  root["generators"] = gens;
  root["K_cnf"] = action_table_to_json(r.K_cnf);
  root["K_qnf_symbol"] = action_table_to_json(r.K_qnf_symbol);
  root["K_qnf_op"] = action_table_to_json(r.K_qnf_op);
  return root.dump(2);
}

NormalFormResult parse_normal_form(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw StructuralError(std::string("normal form result: invalid JSON: ") + e.what());
  }
  NormalFormResult r;
  r.dof = root["dof"].get<int>();
  r.order = root["order"].get<int>();
  r.hbar_eff = root["hbar_eff"].get<double>();
  r.quantum = root["quantum"].get<bool>();
  r.spectrum.lambda = root["lambda"].get<double>();
  const auto& omega = root["omega"];
  r.spectrum.omega = Eigen::VectorXd(omega.size());
  for (std::size_t k = 0; k < omega.size(); ++k) r.spectrum.omega[k] = omega[k].get<double>();
  r.spectrum.E0 = root["E0"].get<double>();
  const auto& shift = root["shift"];
  r.shift = Eigen::VectorXd(shift.size());
  for (std::size_t i = 0; i < shift.size(); ++i) r.shift[i] = shift[i].get<double>();
  r.map.M = matrix_from_json(root["M"], 2 * r.dof);
  r.map.M_inv = matrix_from_json(root["M_inv"], 2 * r.dof);
  for (const auto& g : root["generators"])
    r.generators.push_back(generator_from_json(g, r.dof, r.order));
  r.K_cnf = action_table_from_json(root["K_cnf"], r.dof);
  r.K_qnf_symbol = action_table_from_json(root["K_qnf_symbol"], r.dof);
  r.K_qnf_op = action_table_from_json(root["K_qnf_op"], r.dof);
  return r;
}

}  // namespace saddlescope
