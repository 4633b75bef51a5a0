#include "ev/report.hpp"

#include <sstream>

#include <json.hpp>

namespace ev {

namespace {

using Json = nlohmann::ordered_json;

template <class S>
Json scalar_json(const S& v) {
  return scalar_to_string(v);
}

template <class S>
Json matrix_json(const Matrix<S>& m) {
  Json rows = Json::array();
  for (size_t r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (size_t c = 0; c < m.cols(); ++c) row.push_back(scalar_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

template <class S>
const char* factor_kind_name(typename FactorReport<S>::Kind k) {
  switch (k) {
    case FactorReport<S>::Kind::LinearSplit:
      return "linear-split";
    case FactorReport<S>::Kind::NonlinearIrreducible:
      return "nonlinear-irreducible";
    default:
      return "undecided";
  }
}

}  // namespace

const char* sep_verdict_name(SepVerdict v) {
  switch (v) {
    case SepVerdict::EntangledAtCut:
      return "ENTANGLED_AT_CUT";
    case SepVerdict::ConsistentWithSeparable:
      return "CONSISTENT_WITH_SEPARABLE";
    case SepVerdict::Degenerate:
      return "DEGENERATE";
    default:
      return "UNDECIDED";
  }
}

template <class S>
static Json analysis_json(const AnalysisResult<S>& r, const ReportMeta& meta,
                          const std::vector<S>* lambdas) {
  Json j;
  j["schema"] = 1;
  j["command"] = "analyze";
  j["state_digest"] = meta.state_digest;
  j["state_kind"] = meta.state_kind;
  j["cut"] = r.cut.to_string();
  j["mode"] = meta.mode;
  j["tolerance"] = meta.tolerance;
  j["seed"] = meta.seed;
  Json pencil;
  pencil["row_dim"] = r.row_dim;
  pencil["col_dim"] = r.col_dim;
  pencil["ensemble_size"] = r.ensemble_size;
  Json groups = Json::array();
  for (const auto& g : r.cut.signature()) {
    Json gj;
    gj["id"] = g.id;
    gj["vars"] = g.var_count;
    groups.push_back(std::move(gj));
  }
  pencil["groups"] = std::move(groups);
  j["pencil"] = std::move(pencil);
  j["rank_threshold"] = r.polys.threshold;
  j["degeneracy"] =
      r.polys.degeneracy == Degeneracy::WholeSpace ? "WHOLE_SPACE" : "NONE";
  Json minors = Json::array();
  for (const auto& m : r.polys.minors) {
    Json mj;
    mj["rows"] = m.row_set;
    mj["cols"] = m.col_set;
    mj["poly"] = m.poly.to_string();
    if constexpr (ScalarOps<S>::exact) {
      mj["scale_folded"] = m.scale_folded;
      if (!m.scale_folded) mj["scale_sq"] = rational_to_string(m.scale_sq);
    }
    minors.push_back(std::move(mj));
  }
  j["minors"] = std::move(minors);

  Json fact;
  fact["kind"] = r.verdict.factorization_kind;
  fact["constant"] = scalar_json(r.verdict.constant);
  Json factors = Json::array();
  for (const auto& f : r.verdict.factors) {
    Json fj;
    fj["poly"] = f.poly.to_string();
    fj["kind"] = factor_kind_name<S>(f.kind);
    if (!f.forms.empty()) {
      Json forms = Json::array();
      for (const auto& form : f.forms) forms.push_back(form.to_string());
      fj["forms"] = std::move(forms);
    }
    if (f.coeff_matrix) fj["coeff_matrix"] = matrix_json(*f.coeff_matrix);
    if (f.coeff_det) fj["coeff_det"] = scalar_json(*f.coeff_det);
    if (f.tensor_cert) {
      Json tc;
      tc["group"] = f.tensor_cert->group;
      tc["minor_value"] = scalar_json(f.tensor_cert->minor_value);
      fj["tensor_minor"] = std::move(tc);
    }
    if (f.numeric) fj["numeric"] = true;
    if (!f.note.empty()) fj["note"] = f.note;
    factors.push_back(std::move(fj));
  }
  fact["factors"] = std::move(factors);
  j["factorization"] = std::move(fact);

  if (r.verdict.segre) {
    const auto& s = *r.verdict.segre;
    Json sj;
    sj["rows"] = s.segre_rows();
    sj["cols"] = s.segre_cols();
    sj["support0"] = s.support0;
    sj["support1"] = s.support1;
    sj["span0"] = s.span0;
    sj["span1"] = s.span1;
    sj["common_span"] = s.common;
    sj["transposed"] = s.transposed;
    j["segre"] = std::move(sj);
  }

  j["verdict"] = sep_verdict_name(r.sep);
  if (r.sep == SepVerdict::ConsistentWithSeparable)
    j["verdict_note"] = "necessary condition only";
  j["reason"] = r.verdict.reason;
  if (lambdas) {
    Json lam = Json::array();
    for (const auto& x : *lambdas) lam.push_back(scalar_json(x));
    j["lambda"] = std::move(lam);
  }
  return j;
}

template <class S>
std::string analysis_report_json(const AnalysisResult<S>& r,
                                 const ReportMeta& meta,
                                 const std::vector<S>* lambdas) {
  return analysis_json(r, meta, lambdas).dump(2) + "\n";
}

template <class S>
std::string analysis_report_text(const AnalysisResult<S>& r,
                                 const ReportMeta& meta,
                                 const std::vector<S>* lambdas,
                                 double elapsed_ms) {
  std::ostringstream os;
  os << "cut " << r.cut.to_string() << "  mode " << meta.mode << "  seed "
     << meta.seed << "\n";
  os << "pencil: " << r.row_dim << " blocks of " << r.col_dim << " x "
     << r.ensemble_size << ", rank threshold " << r.polys.threshold << "\n";
  if (r.polys.degeneracy == Degeneracy::WholeSpace)
    os << "degeneracy: WHOLE_SPACE (determinant vanishes identically)\n";
  os << "minors: " << r.polys.minors.size() << "\n";
  if (r.verdict.factorization_kind != "none" && !r.verdict.factors.empty()) {
    os << "factorization (" << r.verdict.factorization_kind << "):\n";
    for (const auto& f : r.verdict.factors) {
      os << "  [" << factor_kind_name<S>(f.kind) << "] " << f.poly.to_string();
      if (f.coeff_det) os << "   det C = " << scalar_to_string(*f.coeff_det);
      os << "\n";
      for (const auto& form : f.forms) os << "      " << form.to_string() << "\n";
    }
  }
  if (r.verdict.segre) {
    os << "segre: P^" << r.verdict.segre->segre_rows() << " x P^"
       << r.verdict.segre->segre_cols() << " cone, spans "
       << r.verdict.segre->span0 << "/" << r.verdict.segre->span1 << "\n";
  }
  if (lambdas) {
    os << "lambda:";
    for (const auto& x : *lambdas) os << " " << scalar_to_string(x);
    os << "\n";
  }
  os << "verdict: " << sep_verdict_name(r.sep);
  if (r.sep == SepVerdict::ConsistentWithSeparable)
    os << " (necessary condition only)";
  os << "\n";
  os << "reason: " << r.verdict.reason << "\n";
  os << "elapsed_ms: " << elapsed_ms << "\n";
  return os.str();
}

#define EV_INSTANTIATE_REPORT(S)                                          \
  template std::string analysis_report_json(                             \
      const AnalysisResult<S>&, const ReportMeta&, const std::vector<S>*); \
  template std::string analysis_report_text(                             \
      const AnalysisResult<S>&, const ReportMeta&, const std::vector<S>*, \
      double);

EV_INSTANTIATE_REPORT(ExactScalar)
EV_INSTANTIATE_REPORT(FloatScalar)
#undef EV_INSTANTIATE_REPORT

}  // namespace ev
