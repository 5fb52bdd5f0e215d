#include "saddlescope/spec_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace saddlescope {

namespace {

using nlohmann::json;

void require_keys(const json& obj, const std::set<std::string>& required,
                  const std::set<std::string>& optional, const std::string& where) {
  for (const auto& key : required)
    if (!obj.contains(key))
      throw StructuralError(where + ": missing key '" + key + "'");
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!required.contains(it.key()) && !optional.contains(it.key()))
      throw StructuralError(where + ": unexpected key '" + it.key() + "'");
}

double positive_number(const json& obj, const std::string& key, const std::string& where) {
  if (!obj[key].is_number())
    throw StructuralError(where + ": key '" + key + "' must be a number");
  double v = obj[key].get<double>();
  if (!(v > 0)) throw StructuralError(where + ": key '" + key + "' must be positive");
  return v;
}

PhasePolynomial parse_phase_terms(const json& terms, int dof, const std::string& where) {
  if (!terms.is_array()) throw StructuralError(where + ": 'terms' must be an array");
  std::vector<PhasePolynomial::Term> out;
  for (const auto& t : terms) {
    require_keys(t, {"exponents", "coefficient"}, {}, where);
    const auto& exps = t["exponents"];
    if (!exps.is_array() ||
        (static_cast<int>(exps.size()) != 2 * dof && static_cast<int>(exps.size()) != dof))
      throw StructuralError(where + ": 'exponents' must list dof (q-only) or 2*dof entries");
    Monomial m;
    for (int i = 0; i < static_cast<int>(exps.size()); ++i) {
      int e = exps[i].get<int>();
      if (e < 0) throw StructuralError(where + ": 'exponents' must be non-negative");
      m.set_slot(dof, i, e);
    }
    out.emplace_back(m, t["coefficient"].get<double>());
  }
  return PhasePolynomial::from_terms(dof, 15, std::move(out));
}

json phase_terms_to_json(const PhasePolynomial& p) {
  json arr = json::array();
  const int d = p.dof();
  for (const auto& [m, c] : p.terms()) {
    json exps = json::array();
    for (int i = 0; i < 2 * d; ++i) exps.push_back(static_cast<int>(m.slot(d, i)));
    arr.push_back({{"exponents", exps}, {"coefficient", c}});
  }
  return arr;
}

}  // namespace

SystemSpec parse_spec(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw StructuralError(std::string("spec: invalid JSON: ") + e.what());
  }
  require_keys(root, {"dof", "hbar_eff", "potentials"}, {"couplings"}, "spec");
  SystemSpec spec;
  if (!root["dof"].is_number_integer())
    throw StructuralError("spec: key 'dof' must be an integer");
  spec.dof = root["dof"].get<int>();
  spec.hbar_eff = positive_number(root, "hbar_eff", "spec");

  const auto& pots = root["potentials"];
  if (!pots.is_array()) throw StructuralError("spec: key 'potentials' must be an array");
  for (const auto& pot : pots) {
    if (!pot.contains("family"))
      throw StructuralError("spec: potential entry missing key 'family'");
    std::string family = pot["family"].get<std::string>();
    if (family == "eckart") {
      require_keys(pot, {"family", "a", "A", "B"}, {}, "eckart potential");
      EckartPotential e;
      e.a = positive_number(pot, "a", "eckart potential");
      e.A = pot["A"].get<double>();
      e.B = pot["B"].get<double>();
      spec.potentials.push_back(e);
    } else if (family == "morse") {
      require_keys(pot, {"family", "De", "aM"}, {}, "morse potential");
      spec.potentials.push_back(MorsePotential{positive_number(pot, "De", "morse potential"),
                                               positive_number(pot, "aM", "morse potential")});
    } else if (family == "harmonic") {
      require_keys(pot, {"family", "omega"}, {}, "harmonic potential");
      spec.potentials.push_back(HarmonicPotential{positive_number(pot, "omega", "harmonic potential")});
    } else if (family == "polynomial") {
      require_keys(pot, {"family", "coefficients"}, {}, "polynomial potential");
      const auto& cs = pot["coefficients"];
      if (!cs.is_array()) throw StructuralError("polynomial potential: 'coefficients' must be an array");
      PolynomialPotential pp;
      for (const auto& c : cs) pp.coefficients.push_back(c.get<double>());
      spec.potentials.push_back(std::move(pp));
    } else {
      throw StructuralError("spec: unknown potential family '" + family + "'");
    }
  }

  if (root.contains("couplings")) {
    const auto& cpls = root["couplings"];
    if (!cpls.is_array()) throw StructuralError("spec: key 'couplings' must be an array");
    for (const auto& c : cpls) {
      if (!c.contains("type")) throw StructuralError("spec: coupling entry missing key 'type'");
      std::string type = c["type"].get<std::string>();
      if (type == "kinetic") {
        require_keys(c, {"type", "epsilon"}, {}, "kinetic coupling");
        spec.couplings.push_back(KineticCoupling{c["epsilon"].get<double>()});
      } else if (type == "polynomial") {
        require_keys(c, {"type"}, {"terms", "file"}, "polynomial coupling");
        json terms;
        if (c.contains("file")) {
          std::ifstream in(c["file"].get<std::string>());
          if (!in) throw StructuralError("polynomial coupling: cannot open file '" +
                                         c["file"].get<std::string>() + "'");
          try {
            in >> terms;
          } catch (const json::exception& e) {
            throw StructuralError(std::string("polynomial coupling file: invalid JSON: ") + e.what());
          }
        } else if (c.contains("terms")) {
          terms = c["terms"];
        } else {
          throw StructuralError("polynomial coupling: needs 'terms' or 'file'");
        }
        spec.couplings.push_back(PolynomialCoupling{parse_phase_terms(terms, spec.dof,
                                                                      "polynomial coupling")});
      } else {
        throw StructuralError("spec: unknown coupling type '" + type + "'");
      }
    }
  }

  spec.validate();
  return spec;
}

SystemSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw StructuralError("cannot open spec file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_spec(ss.str());
}

std::string serialize_spec(const SystemSpec& spec) {
  json root;
  root["dof"] = spec.dof;
  root["hbar_eff"] = spec.hbar_eff;
  json pots = json::array();
  for (const auto& pot : spec.potentials) {
    if (const auto* e = std::get_if<EckartPotential>(&pot)) {
      pots.push_back({{"family", "eckart"}, {"a", e->a}, {"A", e->A}, {"B", e->B}});
    } else if (const auto* m = std::get_if<MorsePotential>(&pot)) {
      pots.push_back({{"family", "morse"}, {"De", m->De}, {"aM", m->aM}});
    } else if (const auto* h = std::get_if<HarmonicPotential>(&pot)) {
      pots.push_back({{"family", "harmonic"}, {"omega", h->omega}});
    } else {
      const auto& p = std::get<PolynomialPotential>(pot);
      pots.push_back({{"family", "polynomial"}, {"coefficients", p.coefficients}});
    }
  }
  root["potentials"] = pots;
  json cpls = json::array();
  for (const auto& c : spec.couplings) {
    if (const auto* kc = std::get_if<KineticCoupling>(&c)) {
      cpls.push_back({{"type", "kinetic"}, {"epsilon", kc->epsilon}});
    } else {
      cpls.push_back(
          {{"type", "polynomial"}, {"terms", phase_terms_to_json(std::get<PolynomialCoupling>(c).poly)}});
    }
  }
  root["couplings"] = cpls;
  return root.dump(2);
}

}  // namespace saddlescope
