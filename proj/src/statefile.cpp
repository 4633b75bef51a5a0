#include "ev/statefile.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace ev {

namespace {

using Json = nlohmann::ordered_json;

template <class S>
S scalar_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2)
    throw InvalidInput("complex values must be two-element arrays [re, im]");
  auto part = [](const Json& v) -> Rational {
    if (v.is_string()) return rational_from_string(v.get<std::string>());
    if (v.is_number_integer()) return Rational(v.get<long>());
    if (v.is_number_float()) {
      std::ostringstream os;
      os.precision(17);
      os << v.get<double>();
      return rational_from_string(os.str());
    }
    throw InvalidInput("complex parts must be numbers or \"p/q\" strings");
  };
  Rational re = part(j[0]), im = part(j[1]);
  if constexpr (ScalarOps<S>::exact)
    return ExactScalar(re, im);
  else
    return FloatScalar(re.get_d(), im.get_d());
}

template <class S>
typename ScalarOps<S>::Real real_from_json(const Json& j) {
  Rational q;
  if (j.is_string())
    q = rational_from_string(j.get<std::string>());
  else if (j.is_number_integer())
    q = Rational(j.get<long>());
  else if (j.is_number_float()) {
    std::ostringstream os;
    os.precision(17);
    os << j.get<double>();
    q = rational_from_string(os.str());
  } else {
    throw InvalidInput("weights must be numbers or \"p/q\" strings");
  }
  if constexpr (ScalarOps<S>::exact)
    return q;
  else
    return q.get_d();
}

Json exact_to_json(const ExactScalar& v) {
  return Json::array({rational_to_string(v.re), rational_to_string(v.im)});
}

template <class S>
std::vector<S> vector_from_json(const Json& j, const char* what) {
  if (!j.is_array()) throw InvalidInput(std::string(what) + " must be an array");
  std::vector<S> out;
  out.reserve(j.size());
  for (const auto& v : j) out.push_back(scalar_from_json<S>(v));
  return out;
}

template <class S>
void normalize_float_vectors(Ensemble<S>& e) {
  if constexpr (!ScalarOps<S>::exact) {
    for (auto& v : e.vectors) {
      double n2 = 0;
      for (const auto& x : v) n2 += std::norm(x);
      if (n2 <= 0) throw InvalidInput("ensemble vector is zero");
      double inv = 1.0 / std::sqrt(n2);
      for (auto& x : v) x *= inv;
    }
  }
}

}  // namespace

template <class S>
LoadedState<S> parse_state_text(const std::string& text, double tol) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const std::exception& ex) {
    throw InvalidInput(std::string("state file is not valid JSON: ") +
                       ex.what());
  }
  if (!j.contains("dims")) throw InvalidInput("missing field: dims");
  if (!j.contains("kind")) throw InvalidInput("missing field: kind");
  LoadedState<S> out;
  for (const auto& d : j["dims"]) {
    if (!d.is_number_integer()) throw InvalidInput("dims must be integers");
    out.dims.push_back(d.get<int>());
  }
  out.kind = j["kind"].get<std::string>();
  size_t d = dims_product(out.dims);

  if (out.kind == "ensemble") {
    if (!j.contains("weights")) throw InvalidInput("missing field: weights");
    if (!j.contains("vectors")) throw InvalidInput("missing field: vectors");
    Ensemble<S> e;
    e.dims = out.dims;
    for (const auto& w : j["weights"])
      e.weights.push_back(real_from_json<S>(w));
    for (const auto& v : j["vectors"])
      e.vectors.push_back(vector_from_json<S>(v, "vectors"));
    normalize_float_vectors(e);
    e.validate(tol);
    out.ensemble = std::move(e);
  } else if (out.kind == "density") {
    if (!j.contains("density")) throw InvalidInput("missing field: density");
    Matrix<S> m(d, d);
    const auto& rows = j["density"];
    if (!rows.is_array() || rows.size() != d)
      throw InvalidInput("density must be a D x D matrix");
    for (size_t r = 0; r < d; ++r) {
      auto row = vector_from_json<S>(rows[r], "density");
      if (row.size() != d) throw InvalidInput("density must be a D x D matrix");
      for (size_t c = 0; c < d; ++c) m(r, c) = row[c];
    }
    DensityMatrix<S> rho{out.dims, std::move(m)};
    rho.validate(tol);
    out.ensemble = ensemble_from_density(rho, tol);
  } else if (out.kind == "family") {
    if (!j.contains("family")) throw InvalidInput("missing field: family");
    const auto& fam = j["family"];
    if (!fam.contains("h") || !fam.contains("a"))
      throw InvalidInput("family needs fields h and a");
    if (out.dims != Dims{2, 2, 2, 2})
      throw InvalidInput("family states live on dims [2,2,2,2]");
    FamilyParams<S> p;
    const auto& hh = fam["h"];
    if (!hh.is_array() || hh.size() != 4)
      throw InvalidInput("family.h must hold four vectors");
    for (int i = 0; i < 4; ++i) p.h[i] = vector_from_json<S>(hh[i], "family.h");
    const auto& aa = fam["a"];
    if (!aa.is_array() || aa.size() != 8)
      throw InvalidInput("family.a must hold eight values");
    for (int i = 0; i < 8; ++i) p.a[i] = scalar_from_json<S>(aa[i]);
    if constexpr (!ScalarOps<S>::exact) {
      // normalize the frame vectors so the float validator sees unit length
      for (auto& hv : p.h) {
        double n2 = 0;
        for (const auto& x : hv) n2 += std::norm(x);
        if (n2 <= 0) throw InvalidInput("family.h vector is zero");
        double inv = 1.0 / std::sqrt(n2);
        for (auto& x : hv) x *= inv;
      }
    }
    p.validate(tol);
    out.family = p;
    out.ensemble = family_state(p, tol);
  } else {
    throw InvalidInput("kind must be density, ensemble, or family");
  }
  out.digest = fnv1a_digest(text);
  return out;
}

template <class S>
LoadedState<S> load_state_file(const std::string& path, double tol) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open state file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_state_text<S>(buf.str(), tol);
}

std::string serialize_ensemble(const Ensemble<ExactScalar>& e) {
  Json j;
  j["dims"] = e.dims;
  j["kind"] = "ensemble";
  Json weights = Json::array();
  for (const auto& w : e.weights) weights.push_back(rational_to_string(w));
  j["weights"] = std::move(weights);
  Json vectors = Json::array();
  for (const auto& v : e.vectors) {
    Json vec = Json::array();
    for (const auto& x : v) vec.push_back(exact_to_json(x));
    vectors.push_back(std::move(vec));
  }
  j["vectors"] = std::move(vectors);
  return j.dump(2) + "\n";
}

std::string serialize_family(const FamilyParams<ExactScalar>& p) {
  Json j;
  j["dims"] = Dims{2, 2, 2, 2};
  j["kind"] = "family";
  Json fam;
  Json hh = Json::array();
  for (const auto& hv : p.h) {
    Json vec = Json::array();
    for (const auto& x : hv) vec.push_back(exact_to_json(x));
    hh.push_back(std::move(vec));
  }
  fam["h"] = std::move(hh);
  Json aa = Json::array();
  for (const auto& x : p.a) aa.push_back(exact_to_json(x));
  fam["a"] = std::move(aa);
  auto inv = family_lambda(p);
  Json lam = Json::array();
  for (const auto& x : inv.lambda) lam.push_back(exact_to_json(x));
  fam["lambda"] = std::move(lam);
  j["family"] = std::move(fam);
  return j.dump(2) + "\n";
}

std::string fnv1a_digest(const std::string& data) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

#define EV_INSTANTIATE_STATEFILE(S)                                       \
  template struct LoadedState<S>;                                         \
  template LoadedState<S> load_state_file(const std::string&, double);    \
  template LoadedState<S> parse_state_text(const std::string&, double);

EV_INSTANTIATE_STATEFILE(ExactScalar)
EV_INSTANTIATE_STATEFILE(FloatScalar)
#undef EV_INSTANTIATE_STATEFILE

}  // namespace ev
