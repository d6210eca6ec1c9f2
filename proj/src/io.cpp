#include "til/io.hpp"
#include "til/rng.hpp"
#include "til/spin_space.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace til {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) { throw ParseError(where + ": " + what); }

int get_int(const Json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) fail(where, "missing field \"" + key + "\"");
  const Json& v = j.at(key);
  if (!v.is_number_integer()) fail(where + "." + key, "expected an integer");
  return v.get<int>();
}

double get_number(const Json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) fail(where, "missing field \"" + key + "\"");
  const Json& v = j.at(key);
  if (!v.is_number()) fail(where + "." + key, "expected a number");
  return v.get<double>();
}

bool get_bool(const Json& j, const std::string& key, bool fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_boolean()) fail(where + "." + key, "expected true or false");
  return j.at(key).get<bool>();
}

Json vec_json(const Vec& v) {
  Json a = Json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) a.push_back(v[k]);
  return a;
}

}  // namespace

SymTensor4 tensor_from_json(const Json& j) {
  if (!j.is_object()) fail("tensor", "expected a JSON object");
  const int n = get_int(j, "n", "tensor");
  if (n < 1) fail("tensor.n", "must be >= 1");
  check_dimension(n, kTensorCap);
  const bool sym = get_bool(j, "symmetrize", false, "tensor");
  const bool dz = get_bool(j, "diagonal_zero", false, "tensor");
  if (!j.contains("entries")) fail("tensor", "missing field \"entries\"");
  const Json& es = j.at("entries");
  if (!es.is_array()) fail("tensor.entries", "expected an array");

  SymTensor4 T(n);
  std::vector<double> raw;
  if (sym) raw.assign(T.entries().size(), 0.0);
  std::map<std::array<int, 4>, double> orbits;
  for (std::size_t k = 0; k < es.size(); ++k) {
    const std::string where = "tensor.entries[" + std::to_string(k) + "]";
    const Json& e = es[k];
    if (!e.is_object()) fail(where, "expected an object");
    if (!e.contains("idx") || !e.at("idx").is_array() || e.at("idx").size() != 4)
      fail(where + ".idx", "expected 4 integers");
    std::array<int, 4> a{};
    for (int c = 0; c < 4; ++c) {
      const Json& v = e.at("idx")[static_cast<std::size_t>(c)];
      if (!v.is_number_integer()) fail(where + ".idx", "expected 4 integers");
      a[static_cast<std::size_t>(c)] = v.get<int>() - 1;
      if (a[static_cast<std::size_t>(c)] < 0 || a[static_cast<std::size_t>(c)] >= n)
        fail(where + ".idx", "index out of range [1, n]");
    }
    const double val = get_number(e, "val", where);
    std::array<int, 4> key = a;
    std::sort(key.begin(), key.end());
    if (dz && (key[0] == key[1] || key[1] == key[2] || key[2] == key[3]))
      fail(where + ".idx", "repeated index while diagonal_zero is declared");
    if (sym) {
      raw[T.idx(a[0], a[1], a[2], a[3])] += val;
    } else {
      auto it = orbits.find(key);
      if (it != orbits.end() && it->second != val) fail(where, "conflicting value for an index orbit");
      orbits[key] = val;
    }
  }
  if (sym) return SymTensor4::symmetrize(n, raw);
  for (const auto& [key, val] : orbits) T.set_orbit(key[0], key[1], key[2], key[3], val);
  return T;
}

Json tensor_to_json(const SymTensor4& T, double drop_below) {
  Json j;
  j["n"] = T.n();
  j["symmetrize"] = false;
  Json es = Json::array();
  const int n = T.n();
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b)
      for (int c = b; c < n; ++c)
        for (int d = c; d < n; ++d) {
          const double v = T(a, b, c, d);
          if (std::abs(v) > drop_below) es.push_back({{"idx", {a + 1, b + 1, c + 1, d + 1}}, {"val", v}});
        }
  j["entries"] = es;
  return j;
}

Potential potential_from_json(const Json& j) {
  if (!j.is_object()) fail("potential", "expected a JSON object");
  std::string type = "tensor";
  if (j.contains("type")) {
    if (!j.at("type").is_string()) fail("potential.type", "expected a string");
    type = j.at("type").get<std::string>();
  }
  Potential p;
  p.kind = type;
  if (type == "tensor") {
    p.tensor = tensor_from_json(j);
    p.n = p.tensor->n();
    check_dimension(p.n, std::min(kDenseKernelCap, max_dimension()));
    p.table = p.tensor->potential_table();
  } else if (type == "table") {
    p.n = get_int(j, "n", "potential");
    check_dimension(p.n, std::min(kDenseKernelCap, max_dimension()));
    if (!j.contains("values") || !j.at("values").is_array()) fail("potential.values", "expected an array");
    const Json& vs = j.at("values");
    if (vs.size() != num_configs(p.n)) fail("potential.values", "expected 2^n numbers");
    p.table.resize(static_cast<Eigen::Index>(vs.size()));
    for (std::size_t k = 0; k < vs.size(); ++k) {
      if (!vs[k].is_number()) fail("potential.values[" + std::to_string(k) + "]", "expected a number");
      p.table[static_cast<Eigen::Index>(k)] = vs[k].get<double>();
    }
  } else if (type == "curie_weiss") {
    p.n = get_int(j, "n", "potential");
    check_dimension(p.n, std::min(kDenseKernelCap, max_dimension()));
    const double beta = get_number(j, "beta", "potential");
    const double deg = j.contains("p") ? get_number(j, "p", "potential") : 4.0;
    p.table = curie_weiss_potential(p.n, beta, deg);
  } else if (type == "zero") {
    p.n = get_int(j, "n", "potential");
    check_dimension(p.n, std::min(kDenseKernelCap, max_dimension()));
    p.table = Vec::Zero(static_cast<Eigen::Index>(num_configs(p.n)));
  } else {
    fail("potential.type", "unknown type \"" + type + "\"");
  }
  return p;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path + ": malformed JSON (" + std::string(e.what()) + ")");
  }
}

Vec parse_test_function(const std::string& spec, int n) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  for (std::string t; std::getline(ss, t, ':');) parts.push_back(t);
  if (parts.empty()) throw ParseError("test function: empty spec");
  const Mat S = spin_matrix(n);
  auto coord = [&](const std::string& s) {
    int i = 0;
    try {
      i = std::stoi(s);
    } catch (...) {
      throw ParseError("test function: bad coordinate \"" + s + "\"");
    }
    if (i < 1 || i > n) throw ParseError("test function: coordinate out of range");
    return i - 1;
  };
  if (parts[0] == "magnetization" && parts.size() == 1) return S.rowwise().sum();
  if (parts[0] == "coord" && parts.size() == 2) return S.col(coord(parts[1]));
  if (parts[0] == "pair" && parts.size() == 3) return S.col(coord(parts[1])).cwiseProduct(S.col(coord(parts[2])));
  if (parts[0] == "random" && parts.size() == 2) {
    std::uint64_t seed = 0;
    try {
      seed = std::stoull(parts[1]);
    } catch (...) {
      throw ParseError("test function: bad seed");
    }
    Rng rng(seed);
    return rng.normal_vector(S.rows());
  }
  throw ParseError("test function: unknown spec \"" + spec + "\"");
}

Json to_json(const SpectralReport& r) {
  return {{"gap", r.gap},
          {"generator_gap", r.generator_gap},
          {"poincare", r.poincare_constant},
          {"poincare_variational", r.variational_poincare},
          {"poincare_harmonic", r.poincare_harmonic},
          {"convention", to_string(r.convention)},
          {"eigenvalues", vec_json(r.eigenvalues)}};
}

Json to_json(const Certificate& c) {
  Json j{{"n", c.n},
         {"inj_upper", c.inj_upper},
         {"inj_lower", c.inj_lower},
         {"threshold_336n", c.threshold_336n},
         {"bound", c.bound ? Json(*c.bound) : Json(nullptr)},
         {"optimistic_bound_nonrigorous", c.optimistic ? Json(*c.optimistic) : Json(nullptr)},
         {"breakdown", {{"quartic_terms", kQuarticTerms}, {"quadratic_terms", kQuadraticTerms}}},
         {"shifted", c.shifted},
         {"shift", c.shift}};
  if (!c.bound) j["reason"] = c.reason;
  return j;
}

Json to_json(const DecompositionComponent& c) {
  Json u = Json::array(), v = Json::array(), w = Json::array();
  for (const auto& x : c.u) u.push_back(vec_json(x));
  for (const auto& x : c.v) v.push_back(vec_json(x));
  for (const auto& x : c.w) w.push_back(vec_json(x));
  const ComponentLedger& L = c.ledger;
  return {{"seed", c.seed},
          {"u", u},
          {"v", v},
          {"w", w},
          {"ell", vec_json(c.ell)},
          {"weight", c.weight},
          {"tau_first", c.tau_first},
          {"tau_second", c.tau_second},
          {"tau_quadratic", c.tau_quadratic},
          {"steps", c.steps},
          {"stopped_at_start", c.stopped_at_start},
          {"ledger",
           {{"all", L.all()},
            {"orthogonal", L.orthogonal},
            {"uv_norms", L.uv_norms},
            {"w_norms", L.w_norms},
            {"M_norms", L.M_norms},
            {"tau_first", L.tau_first},
            {"max_inner", L.max_inner},
            {"max_uv_norm_sq", L.max_uv_norm_sq},
            {"uv_limit", L.uv_limit},
            {"max_w_norm_sq", L.max_w_norm_sq},
            {"w_limit", L.w_limit},
            {"max_M_op_sq", L.max_M_op_sq}}}};
}

}  // namespace til
