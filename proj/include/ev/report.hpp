// Report assembly: analysis results rendered as a versioned JSON document
// (schema 1) and as a short human-readable summary. The JSON form is fully
// deterministic for fixed inputs and seed.

#pragma once

#include <string>

#include "ev/classify.hpp"
#include "ev/statefile.hpp"

namespace ev {

struct ReportMeta {
  std::string mode;  // "exact" | "float"
  double tolerance = kDefaultTol;
  uint64_t seed = 1;
  std::string state_digest;
  std::string state_kind;
};

template <class S>
std::string analysis_report_json(const AnalysisResult<S>& r,
                                 const ReportMeta& meta,
                                 const std::vector<S>* lambdas);

template <class S>
std::string analysis_report_text(const AnalysisResult<S>& r,
                                 const ReportMeta& meta,
                                 const std::vector<S>* lambdas,
                                 double elapsed_ms);

const char* sep_verdict_name(SepVerdict v);

#define EV_EXTERN_REPORT(S)                                               \
  extern template std::string analysis_report_json(                      \
      const AnalysisResult<S>&, const ReportMeta&, const std::vector<S>*); \
  extern template std::string analysis_report_text(                      \
      const AnalysisResult<S>&, const ReportMeta&, const std::vector<S>*, \
      double);

EV_EXTERN_REPORT(ExactScalar)
EV_EXTERN_REPORT(FloatScalar)
#undef EV_EXTERN_REPORT

}  // namespace ev
