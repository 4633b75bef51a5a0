// JSON state files. Complex numbers are two-element arrays [re, im] whose
// entries are JSON numbers or exact rational strings "p/q". Kinds:
//   density  — field "density": D x D matrix
//   ensemble — fields "weights", "vectors"
//   family   — field "family": {"h": four vectors in C^4, "a": eight values,
//              optional derived "lambda"}
// Vectors may be unnormalized; weights are mixture probabilities.

#pragma once

#include <string>

#include "ev/classify.hpp"
#include "ev/states.hpp"

namespace ev {

template <class S>
struct LoadedState {
  Dims dims;
  std::string kind;  // "density" | "ensemble" | "family"
  Ensemble<S> ensemble;
  std::optional<FamilyParams<S>> family;
  std::string digest;  // of the canonical serialization
};

template <class S>
LoadedState<S> load_state_file(const std::string& path,
                               double tol = kDefaultTol);
template <class S>
LoadedState<S> parse_state_text(const std::string& text,
                                double tol = kDefaultTol);

// canonical serializations, byte-stable under parse -> emit
std::string serialize_ensemble(const Ensemble<ExactScalar>& e);
std::string serialize_family(const FamilyParams<ExactScalar>& p);

std::string fnv1a_digest(const std::string& data);

#define EV_EXTERN_STATEFILE(S)                                            \
  extern template struct LoadedState<S>;                                  \
  extern template LoadedState<S> load_state_file(const std::string&,      \
                                                 double);                 \
  extern template LoadedState<S> parse_state_text(const std::string&,     \
                                                  double);

EV_EXTERN_STATEFILE(ExactScalar)
EV_EXTERN_STATEFILE(FloatScalar)
#undef EV_EXTERN_STATEFILE

}  // namespace ev
