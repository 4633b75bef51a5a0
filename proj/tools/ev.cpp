// Command line front end: analyze a state under a cut, compare two states,
// run PPT checks, and emit the built-in example states.

#include <chrono>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ev/random.hpp"
#include "ev/report.hpp"

using Json = nlohmann::ordered_json;

namespace {

struct GlobalOpts {
  std::string mode = "exact";
  double tol = ev::kDefaultTol;
  uint64_t seed = 1;
  bool json = false;
};

std::set<int> parse_party_set(const std::string& text, size_t nparties) {
  std::set<int> out;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    if (c < 'A' || c >= static_cast<char>('A' + nparties))
      throw ev::InvalidInput(std::string("unknown party letter '") + c + "'");
    out.insert(c - 'A');
  }
  return out;
}

template <class S>
int run_analyze(const GlobalOpts& g, const std::string& path,
                const std::string& cut_text,
                std::optional<int> rank_threshold) {
  auto t0 = std::chrono::steady_clock::now();
  auto state = ev::load_state_file<S>(path, g.tol);
  ev::CutSpec cut = ev::parse_cut(cut_text, state.dims);
  auto result =
      ev::separability_verdict(state.ensemble, cut, rank_threshold, g.seed, g.tol);
  std::vector<S> lambdas;
  if (state.family) lambdas = ev::family_lambda(*state.family).lambda;

  ev::ReportMeta meta{g.mode, g.tol, g.seed, state.digest, state.kind};
  double ms = std::chrono::duration<double, std::milli>(
                  std::chrono::steady_clock::now() - t0)
                  .count();
  if (g.json)
    std::cout << ev::analysis_report_json(result, meta,
                                          lambdas.empty() ? nullptr : &lambdas);
  else
    std::cout << ev::analysis_report_text(
        result, meta, lambdas.empty() ? nullptr : &lambdas, ms);
  return 0;
}

template <class S>
int run_ppt(const GlobalOpts& g, const std::string& path,
            const std::string& bipartition) {
  auto state = ev::load_state_file<S>(path, g.tol);
  auto bar = bipartition.find('|');
  if (bar == std::string::npos)
    throw ev::InvalidInput("bipartition must look like AB|CD");
  auto side_a = parse_party_set(bipartition.substr(0, bar), state.dims.size());
  auto side_b = parse_party_set(bipartition.substr(bar + 1), state.dims.size());
  auto rho = ev::density_from_ensemble(state.ensemble);
  auto res = ev::ppt_check(rho, side_a, side_b, g.tol);

  if (g.json) {
    Json j;
    j["schema"] = 1;
    j["command"] = "ppt";
    j["state_digest"] = state.digest;
    j["bipartition"] = bipartition;
    j["mode"] = g.mode;
    j["ppt"] = res.ppt;
    j["transpose_equals_state"] = res.transpose_equals_state;
    if constexpr (ev::ScalarOps<S>::exact) {
      if (!res.ppt) {
        Json ray = Json::array();
        for (const auto& x : res.witness.ray)
          ray.push_back(ev::scalar_to_string(x));
        j["negative_ray"] = std::move(ray);
      } else {
        j["certificate"] = "all elimination pivots nonnegative";
      }
    } else {
      j["min_eigenvalue"] = res.witness.min_eigenvalue;
    }
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "bipartition " << bipartition << ": "
              << (res.ppt ? "PPT" : "NPT") << "\n";
    std::cout << "partial transpose equals state: "
              << (res.transpose_equals_state ? "yes" : "no") << "\n";
    if constexpr (ev::ScalarOps<S>::exact) {
      if (!res.ppt) {
        std::cout << "negative ray:";
        for (const auto& x : res.witness.ray)
          std::cout << " " << ev::scalar_to_string(x);
        std::cout << "\n";
      } else {
        std::cout << "exact certificate: all elimination pivots nonnegative\n";
      }
    } else {
      std::cout << "min eigenvalue: " << res.witness.min_eigenvalue << "\n";
    }
  }
  return 0;
}

template <class S>
int run_compare(const GlobalOpts& g, const std::string& path1,
                const std::string& path2, const std::string& cut_text) {
  auto s1 = ev::load_state_file<S>(path1, g.tol);
  auto s2 = ev::load_state_file<S>(path2, g.tol);
  if (s1.dims != s2.dims)
    throw ev::InvalidInput("states live on different dims");

  Json j;
  j["schema"] = 1;
  j["command"] = "compare";
  j["state_digest"] = Json::array({s1.digest, s2.digest});
  j["mode"] = g.mode;

  if (s1.family && s2.family) {
    auto inv1 = ev::family_lambda(*s1.family);
    auto inv2 = ev::family_lambda(*s2.family);
    auto eq = ev::family_equivalence(inv1, inv2, g.tol);
    const char* name = eq.kind == ev::EquivalenceKind::Equivalent
                           ? "EQUIVALENT"
                           : eq.kind == ev::EquivalenceKind::Inequivalent
                                 ? "INEQUIVALENT"
                                 : "UNKNOWN";
    j["family_equivalence"] = name;
    j["reason"] = eq.reason;
    Json lam1 = Json::array(), lam2 = Json::array();
    for (const auto& x : inv1.lambda) lam1.push_back(ev::scalar_to_string(x));
    for (const auto& x : inv2.lambda) lam2.push_back(ev::scalar_to_string(x));
    j["lambda"] = Json::array({lam1, lam2});
    if (eq.kind == ev::EquivalenceKind::Equivalent) {
      j["permutation"] = eq.perm;
      auto emit = [](const ev::ExtMatrix<S>& m) {
        Json out;
        Json base = Json::array();
        for (size_t r = 0; r < 2; ++r) {
          Json row = Json::array();
          for (size_t c = 0; c < 2; ++c)
            row.push_back(ev::scalar_to_string(m.base(r, c)));
          base.push_back(std::move(row));
        }
        out["base"] = std::move(base);
        if (m.has_radical) {
          Json rad = Json::array();
          for (size_t r = 0; r < 2; ++r) {
            Json row = Json::array();
            for (size_t c = 0; c < 2; ++c)
              row.push_back(ev::scalar_to_string(m.rad(r, c)));
            rad.push_back(std::move(row));
          }
          out["radical"] = std::move(rad);
          out["radical_sq"] = ev::scalar_to_string(m.rad_sq);
        }
        return out;
      };
      j["t1"] = emit(eq.t1);
      j["t2"] = emit(eq.t2);
    }
    if (!g.json) {
      std::cout << "family equivalence: " << name << "\n";
      std::cout << "reason: " << eq.reason << "\n";
      return 0;
    }
  } else {
    ev::CutSpec cut = ev::parse_cut(cut_text, s1.dims);
    auto r1 = ev::separability_verdict<S>(s1.ensemble, cut, {}, g.seed, g.tol);
    auto r2 = ev::separability_verdict<S>(s2.ensemble, cut, {}, g.seed, g.tol);
    auto f1 = ev::fingerprint_of(r1, g.tol);
    auto f2 = ev::fingerprint_of(r2, g.tol);
    bool match = ev::fingerprints_match(f1, f2);
    j["cut"] = cut.to_string();
    auto emit_fp = [](const ev::Fingerprint& f) {
      Json out;
      out["multidegree"] = f.multidegree;
      out["minor_count"] = f.minor_count;
      out["degenerate"] = f.degenerate;
      out["factor_count"] = f.factor_count;
      out["factor_ranks"] = f.factor_ranks;
      return out;
    };
    j["fingerprints"] = Json::array({emit_fp(f1), emit_fp(f2)});
    j["invariants"] = match ? "MATCH" : "MISMATCH";
    if (!g.json) {
      std::cout << "invariant fingerprints: " << (match ? "MATCH" : "MISMATCH")
                << "\n";
      std::cout << "verdicts: " << ev::sep_verdict_name(r1.sep) << " / "
                << ev::sep_verdict_name(r2.sep) << "\n";
      return 0;
    }
  }
  std::cout << j.dump(2) << "\n";
  return 0;
}

ev::FamilyParams<ev::ExactScalar> family_preset(const std::string& h_spec,
                                                const std::string& a_spec) {
  ev::FamilyParams<ev::ExactScalar> p;
  if (h_spec == "identity") {
    for (int i = 0; i < 4; ++i) {
      p.h[i].assign(4, ev::ExactScalar(0));
      p.h[i][i] = ev::ExactScalar(1);
    }
  } else if (h_spec == "paper") {
    // orthogonal +-1 frame; normalization folds into the weights
    const int rows[4][4] = {
        {1, 1, 0, 0}, {1, -1, 0, 0}, {0, 0, 1, 1}, {0, 0, 1, -1}};
    for (int i = 0; i < 4; ++i) {
      p.h[i].clear();
      for (int jj = 0; jj < 4; ++jj)
        p.h[i].push_back(ev::ExactScalar(rows[i][jj]));
    }
  } else {
    // sixteen comma-separated rationals, row major
    std::vector<ev::Rational> vals;
    std::stringstream ss(h_spec);
    std::string tok;
    while (std::getline(ss, tok, ','))
      vals.push_back(ev::rational_from_string(tok));
    if (vals.size() != 16)
      throw ev::InvalidInput("--h needs identity, paper, or 16 values");
    for (int i = 0; i < 4; ++i) {
      p.h[i].clear();
      for (int jj = 0; jj < 4; ++jj)
        p.h[i].push_back(ev::ExactScalar(vals[i * 4 + jj]));
    }
  }
  std::vector<ev::Rational> avals;
  std::stringstream ss(a_spec);
  std::string tok;
  while (std::getline(ss, tok, ','))
    avals.push_back(ev::rational_from_string(tok));
  if (avals.size() != 8) throw ev::InvalidInput("--a needs 8 values");
  for (int i = 0; i < 8; ++i) p.a[i] = ev::ExactScalar(avals[i]);
  p.validate();
  return p;
}

int run_example(const std::string& name, const std::string& h_spec,
                const std::string& a_spec, bool paper_preset,
                const std::string& out_path) {
  std::string payload;
  if (name == "smolin") {
    payload = ev::serialize_ensemble(ev::smolin_state<ev::ExactScalar>());
  } else if (name == "family") {
    auto p = family_preset(paper_preset ? "paper" : h_spec, a_spec);
    payload = ev::serialize_family(p);
    auto inv = ev::family_lambda(p);
    std::cerr << "lambda:";
    for (const auto& x : inv.lambda)
      std::cerr << " " << ev::scalar_to_string(x);
    std::cerr << "\n";
  } else {
    throw ev::InvalidInput("unknown example: " + name);
  }
  if (out_path.empty() || out_path == "-") {
    std::cout << payload;
  } else {
    std::ofstream out(out_path);
    if (!out) throw ev::InvalidInput("cannot write " + out_path);
    out << payload;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"determinantal-variety invariants of multipartite states"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--mode", g.mode, "scalar mode: exact or float")
      ->check(CLI::IsMember({"exact", "float"}))
      ->capture_default_str();
  app.add_option("--tol", g.tol, "float comparison tolerance")
      ->envname("EV_TOL")
      ->capture_default_str();
  app.add_option("--seed", g.seed, "seed for randomized checks")
      ->envname("EV_SEED")
      ->capture_default_str();
  app.add_flag("--json", g.json, "emit the JSON report on stdout");

  auto* analyze = app.add_subcommand("analyze", "variety analysis under a cut");
  std::string state_path, cut_text = "A|B";
  int rank_threshold = -1;
  analyze->add_option("state", state_path, "state file")->required();
  analyze->add_option("cut", cut_text, "cut, e.g. A:B|CD")->required();
  analyze->add_option("--rank-threshold", rank_threshold,
                      "minor size t (default min(colspace, ensemble))");

  auto* compare = app.add_subcommand("compare", "equivalence invariants");
  std::string path1, path2, cmp_cut = "A:B|CD";
  compare->add_option("state1", path1)->required();
  compare->add_option("state2", path2)->required();
  compare->add_option("cut", cmp_cut, "cut for fingerprints");

  auto* ppt = app.add_subcommand("ppt", "partial transpose positivity");
  std::string ppt_path, bipartition;
  ppt->add_option("state", ppt_path)->required();
  ppt->add_option("bipartition", bipartition, "e.g. AB|CD")->required();

  auto* example = app.add_subcommand("example", "write a built-in state file");
  std::string ex_name, ex_h = "identity", ex_a = "1,1,1,1,1,1,1,1", ex_out;
  bool ex_paper = false;
  example->add_option("name", ex_name, "smolin or family")->required();
  example->add_option("--h", ex_h, "identity, paper, or 16 rationals");
  example->add_option("--a", ex_a, "8 comma-separated rationals");
  example->add_flag("--paper", ex_paper, "the preset frame from the family");
  example->add_option("-o,--out", ex_out, "output path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    std::optional<int> threshold;
    if (rank_threshold >= 0) threshold = rank_threshold;
    if (analyze->parsed()) {
      return g.mode == "exact"
                 ? run_analyze<ev::ExactScalar>(g, state_path, cut_text, threshold)
                 : run_analyze<ev::FloatScalar>(g, state_path, cut_text, threshold);
    }
    if (compare->parsed()) {
      return g.mode == "exact"
                 ? run_compare<ev::ExactScalar>(g, path1, path2, cmp_cut)
                 : run_compare<ev::FloatScalar>(g, path1, path2, cmp_cut);
    }
    if (ppt->parsed()) {
      return g.mode == "exact" ? run_ppt<ev::ExactScalar>(g, ppt_path, bipartition)
                               : run_ppt<ev::FloatScalar>(g, ppt_path, bipartition);
    }
    if (example->parsed())
      return run_example(ex_name, ex_h, ex_a, ex_paper, ex_out);
  } catch (const ev::InvalidInput& ex) {
    std::cerr << "input error: " << ex.what() << "\n";
    return 2;
  } catch (const ev::NumericFailure& ex) {
    std::cerr << "numeric failure: " << ex.what() << "\n";
    return 3;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 3;
  }
  return 0;
}
