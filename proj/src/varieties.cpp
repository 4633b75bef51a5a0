#include "ev/varieties.hpp"

#include <algorithm>
#include <sstream>

#include "ev/random.hpp"

namespace ev {

size_t CutSpec::group_dim(size_t g) const {
  size_t d = 1;
  for (int p : row_groups[g]) d *= static_cast<size_t>(dims[p]);
  return d;
}

size_t CutSpec::row_dim() const {
  size_t d = 1;
  for (size_t g = 0; g < row_groups.size(); ++g) d *= group_dim(g);
  return d;
}

size_t CutSpec::col_dim() const {
  size_t d = 1;
  for (int p : col_parties) d *= static_cast<size_t>(dims[p]);
  return d;
}

Signature CutSpec::signature() const {
  Signature sig;
  for (size_t g = 0; g < row_groups.size(); ++g)
    sig.push_back({static_cast<int>(g) + 1, static_cast<int>(group_dim(g))});
  return sig;
}

std::string CutSpec::to_string() const {
  std::ostringstream os;
  for (size_t g = 0; g < row_groups.size(); ++g) {
    if (g) os << ":";
    for (int p : row_groups[g]) os << static_cast<char>('A' + p);
  }
  os << "|";
  for (int p : col_parties) os << static_cast<char>('A' + p);
  return os.str();
}

void CutSpec::validate() const {
  if (row_groups.empty()) throw InvalidInput("cut needs at least one row group");
  if (col_parties.empty()) throw InvalidInput("cut needs a nonempty column side");
  std::vector<bool> seen(dims.size(), false);
  auto mark = [&](int p) {
    if (p < 0 || p >= static_cast<int>(dims.size()))
      throw InvalidInput("cut references a party outside dims");
    if (seen[p]) throw InvalidInput("cut parties overlap");
    seen[p] = true;
  };
  for (const auto& grp : row_groups) {
    if (grp.empty()) throw InvalidInput("empty row group");
    for (int p : grp) mark(p);
  }
  for (int p : col_parties) mark(p);
  for (bool s : seen)
    if (!s) throw InvalidInput("cut does not cover every party");
}

CutSpec parse_cut(const std::string& text, const Dims& dims) {
  auto party_of = [&](char c) -> int {
    if (c < 'A' || c >= static_cast<char>('A' + dims.size()))
      throw InvalidInput(std::string("unknown party letter '") + c + "'");
    return c - 'A';
  };
  std::string rows = text, cols;
  auto bar = text.find('|');
  bool explicit_cols = bar != std::string::npos;
  if (explicit_cols) {
    rows = text.substr(0, bar);
    cols = text.substr(bar + 1);
  }
  CutSpec cut;
  cut.dims = dims;
  std::vector<int> group;
  auto flush = [&]() {
    if (group.empty()) throw InvalidInput("empty row group in cut");
    std::sort(group.begin(), group.end());
    cut.row_groups.push_back(group);
    group.clear();
  };
  for (char c : rows) {
    if (c == ':') {
      flush();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      group.push_back(party_of(c));
    }
  }
  flush();
  if (explicit_cols) {
    for (char c : cols)
      if (!std::isspace(static_cast<unsigned char>(c)))
        cut.col_parties.push_back(party_of(c));
    std::sort(cut.col_parties.begin(), cut.col_parties.end());
  } else {
    std::vector<bool> used(dims.size(), false);
    for (const auto& grp : cut.row_groups)
      for (int p : grp) {
        if (p >= 0 && p < static_cast<int>(dims.size()) && used[p])
          throw InvalidInput("cut parties overlap");
        used[p] = true;
      }
    for (size_t p = 0; p < dims.size(); ++p)
      if (!used[p]) cut.col_parties.push_back(static_cast<int>(p));
  }
  cut.validate();
  return cut;
}

template <class S>
RepresentationMatrix<S> representation_matrix(const Ensemble<S>& e) {
  e.validate();
  size_t d = dims_product(e.dims);
  RepresentationMatrix<S> rep;
  rep.entries = Matrix<S>(d, e.size());
  for (size_t f = 0; f < e.size(); ++f) {
    if constexpr (ScalarOps<S>::exact) {
      rep.weight_sq.push_back(e.column_weight(f));
      for (size_t i = 0; i < d; ++i) rep.entries(i, f) = e.vectors[f][i];
    } else {
      double s = std::sqrt(e.weights[f]);
      for (size_t i = 0; i < d; ++i)
        rep.entries(i, f) = s * e.vectors[f][i];
    }
  }
  return rep;
}

namespace {

// Maps between the party-major basis index and the (row-side composite,
// column-side composite) pair of a cut.
struct CutIndexer {
  const CutSpec& cut;

  explicit CutIndexer(const CutSpec& c) : cut(c) {}

  size_t full_index(size_t row_composite, size_t col_composite) const {
    std::vector<int> idx(cut.dims.size(), 0);
    for (size_t g = cut.row_groups.size(); g-- > 0;) {
      size_t dg = cut.group_dim(g);
      size_t ig = row_composite % dg;
      row_composite /= dg;
      const auto& grp = cut.row_groups[g];
      for (size_t t = grp.size(); t-- > 0;) {
        idx[grp[t]] = static_cast<int>(ig % cut.dims[grp[t]]);
        ig /= cut.dims[grp[t]];
      }
    }
    for (size_t t = cut.col_parties.size(); t-- > 0;) {
      int p = cut.col_parties[t];
      idx[p] = static_cast<int>(col_composite % cut.dims[p]);
      col_composite /= cut.dims[p];
    }
    return flat_index(cut.dims, idx);
  }

  // per-group indices of a row composite, group order
  std::vector<size_t> group_indices(size_t row_composite) const {
    std::vector<size_t> out(cut.row_groups.size());
    for (size_t g = cut.row_groups.size(); g-- > 0;) {
      size_t dg = cut.group_dim(g);
      out[g] = row_composite % dg;
      row_composite /= dg;
    }
    return out;
  }
};

template <class S>
S monomial_value(const CutSpec& cut, const std::vector<S>& point,
                 const std::vector<size_t>& gidx) {
  S v = ScalarOps<S>::one();
  size_t off = 0;
  for (size_t g = 0; g < cut.row_groups.size(); ++g) {
    v *= point[off + gidx[g]];
    off += cut.group_dim(g);
  }
  return v;
}

std::vector<std::vector<int>> subsets_of_size(int n, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(k);
  for (int i = 0; i < k; ++i) cur[i] = i;
  while (true) {
    out.push_back(cur);
    int i = k - 1;
    while (i >= 0 && cur[i] == n - k + i) --i;
    if (i < 0) break;
    ++cur[i];
    for (int j = i + 1; j < k; ++j) cur[j] = cur[j - 1] + 1;
  }
  return out;
}

}  // namespace

template <class S>
std::vector<std::vector<MultiPoly<S>>> LinearPencil<S>::symbolic() const {
  Signature sig = cut.signature();
  size_t dq = cut.col_dim();
  size_t nvars = signature_total_vars(sig);
  std::vector<std::vector<MultiPoly<S>>> m(
      dq, std::vector<MultiPoly<S>>(ensemble_size, MultiPoly<S>(sig)));
  CutIndexer ix(cut);
  for (size_t bi = 0; bi < blocks.size(); ++bi) {
    auto gidx = ix.group_indices(bi);
    ExpVec e(nvars, 0);
    size_t off = 0;
    for (size_t g = 0; g < cut.row_groups.size(); ++g) {
      e[off + gidx[g]] = 1;
      off += cut.group_dim(g);
    }
    for (size_t q = 0; q < dq; ++q)
      for (size_t f = 0; f < ensemble_size; ++f)
        m[q][f].add_term(e, blocks[bi](q, f));
  }
  return m;
}

template <class S>
LinearPencil<S> build_pencil(const Ensemble<S>& e, const CutSpec& cut) {
  cut.validate();
  if (cut.dims != e.dims)
    throw InvalidInput("cut dims do not match ensemble dims");
  auto rep = representation_matrix(e);
  LinearPencil<S> pencil;
  pencil.cut = cut;
  pencil.ensemble_size = e.size();
  pencil.weight_sq = rep.weight_sq;
  size_t dp = cut.row_dim(), dq = cut.col_dim();
  CutIndexer ix(cut);
  pencil.blocks.reserve(dp);
  for (size_t bi = 0; bi < dp; ++bi) {
    Matrix<S> block(dq, e.size());
    for (size_t q = 0; q < dq; ++q) {
      size_t row = ix.full_index(bi, q);
      for (size_t f = 0; f < e.size(); ++f)
        block(q, f) = rep.entries(row, f);
    }
    pencil.blocks.push_back(std::move(block));
  }
  return pencil;
}

namespace {

template <class S>
VarietyPolynomials<S> variety_polynomials_impl(const LinearPencil<S>& pencil,
                                               std::optional<int> rank_threshold,
                                               bool parallel) {
  size_t dq = pencil.cut.col_dim();
  size_t g = pencil.ensemble_size;
  int tmax = static_cast<int>(std::min(dq, g));
  VarietyPolynomials<S> out;
  if (rank_threshold) {
    if (*rank_threshold < 1 || *rank_threshold > tmax)
      throw InvalidInput("rank threshold out of range");
    out.threshold = *rank_threshold;
  } else {
    out.threshold = tmax;
    if (g < dq) {
      // the square determinant the locus definition asks for vanishes
      // identically; report the degeneracy instead of an empty ideal
      out.degeneracy = Degeneracy::WholeSpace;
      return out;
    }
  }
  int t = out.threshold;
  auto rows = subsets_of_size(static_cast<int>(dq), t);
  auto cols = subsets_of_size(static_cast<int>(g), t);
  auto sym = pencil.symbolic();
  size_t total = rows.size() * cols.size();
  out.minors.resize(total);

  auto compute = [&](size_t flat) {
    const auto& rs = rows[flat / cols.size()];
    const auto& cs = cols[flat % cols.size()];
    std::vector<std::vector<MultiPoly<S>>> sub(
        t, std::vector<MultiPoly<S>>(t, MultiPoly<S>(pencil.cut.signature())));
    for (int i = 0; i < t; ++i)
      for (int j = 0; j < t; ++j) sub[i][j] = sym[rs[i]][cs[j]];
    MinorPolynomial<S> mp;
    mp.poly = poly_det(sub);
    mp.row_set = rs;
    mp.col_set = cs;
    if constexpr (ScalarOps<S>::exact) {
      Rational scale_sq = 1;
      for (int j : cs) scale_sq *= pencil.weight_sq[j];
      if (rational_is_perfect_square(scale_sq)) {
        mp.poly = ExactScalar(rational_sqrt(scale_sq)) * mp.poly;
        mp.scale_sq = 1;
        mp.scale_folded = true;
      } else {
        mp.scale_sq = scale_sq;
        mp.scale_folded = false;
      }
    }
    out.minors[flat] = std::move(mp);
  };

  if (parallel) {
#pragma omp parallel for schedule(dynamic)
    for (size_t flat = 0; flat < total; ++flat) compute(flat);
  } else {
    for (size_t flat = 0; flat < total; ++flat) compute(flat);
  }
  return out;
}

}  // namespace

template <class S>
VarietyPolynomials<S> variety_polynomials(const LinearPencil<S>& pencil,
                                          std::optional<int> rank_threshold) {
  return variety_polynomials_impl(pencil, rank_threshold, true);
}

template <class S>
VarietyPolynomials<S> variety_polynomials_serial(
    const LinearPencil<S>& pencil, std::optional<int> rank_threshold) {
  return variety_polynomials_impl(pencil, rank_threshold, false);
}

template <class S>
PencilValue<S> evaluate_pencil(const LinearPencil<S>& pencil,
                               const std::vector<S>& point, double tol) {
  const CutSpec& cut = pencil.cut;
  Signature sig = cut.signature();
  if (point.size() != signature_total_vars(sig))
    throw InvalidInput("pencil point has wrong length");
  size_t off = 0;
  for (size_t g = 0; g < cut.row_groups.size(); ++g) {
    bool nonzero = false;
    for (size_t i = 0; i < cut.group_dim(g); ++i)
      if (!ScalarOps<S>::is_zero(point[off + i], 0.0)) nonzero = true;
    if (!nonzero) throw InvalidInput("group coordinate block is zero");
    off += cut.group_dim(g);
  }
  size_t dq = cut.col_dim();
  Matrix<S> value(dq, pencil.ensemble_size);
  CutIndexer ix(cut);
  for (size_t bi = 0; bi < pencil.blocks.size(); ++bi) {
    S r = monomial_value(cut, point, ix.group_indices(bi));
    if (ScalarOps<S>::is_zero(r, 0.0)) continue;
    value = value + r * pencil.blocks[bi];
  }
  PencilValue<S> out;
  out.rank = matrix_rank(value, tol);
  out.value = std::move(value);
  return out;
}

template <class S>
Matrix<S> conjugated_block_sum(const DensityMatrix<S>& rho, const CutSpec& cut,
                               const std::vector<S>& point) {
  rho.validate();
  cut.validate();
  if (cut.dims != rho.dims) throw InvalidInput("cut dims do not match state");
  size_t dp = cut.row_dim(), dq = cut.col_dim();
  CutIndexer ix(cut);
  Matrix<S> m(dq, dq);
  for (size_t bi = 0; bi < dp; ++bi) {
    S ri = monomial_value(cut, point, ix.group_indices(bi));
    if (ScalarOps<S>::is_zero(ri, 0.0)) continue;
    for (size_t bj = 0; bj < dp; ++bj) {
      S rj = ScalarOps<S>::conj(monomial_value(cut, point, ix.group_indices(bj)));
      if (ScalarOps<S>::is_zero(rj, 0.0)) continue;
      S c = ri * rj;
      for (size_t q = 0; q < dq; ++q)
        for (size_t q2 = 0; q2 < dq; ++q2)
          m(q, q2) += c * rho.entries(ix.full_index(bi, q), ix.full_index(bj, q2));
    }
  }
  return m;
}

template <class S>
TransformLawReport verify_transformation_law(const Ensemble<S>& e,
                                             const CutSpec& cut,
                                             const std::vector<Matrix<S>>& mats,
                                             int trials, uint64_t seed,
                                             double tol) {
  cut.validate();
  if (mats.size() != e.dims.size())
    throw InvalidInput("need one matrix per party");
  Ensemble<S> te = apply_local_transform(e, mats, tol);
  LinearPencil<S> orig = build_pencil(e, cut);
  LinearPencil<S> trans = build_pencil(te, cut);

  // per-group substitution matrices U_g = kron over member parties
  std::vector<std::pair<int, Matrix<S>>> subs;
  std::vector<Matrix<S>> group_mats;
  for (size_t g = 0; g < cut.row_groups.size(); ++g) {
    Matrix<S> u = Matrix<S>::identity(1);
    for (int p : cut.row_groups[g]) u = kron(u, mats[p]);
    group_mats.push_back(u);
  }
  Signature sig = cut.signature();
  size_t dq = cut.col_dim();
  bool square = dq == e.size();

  Rng rng(seed);
  TransformLawReport rep;
  rep.ok = true;

  std::vector<std::vector<S>> points(trials);
  for (int k = 0; k < trials; ++k) points[k] = rng.template grouped_point<S>(sig);

  std::vector<S> ratios(trials, ScalarOps<S>::zero());
  std::vector<int> status(trials, 0);  // 1 ratio recorded, -1 fail, 0 skipped

  auto run_trial = [&](int k) {
    const auto& r = points[k];
    // substituted point: r_sub^{(g)} = U_g^T r^{(g)}
    std::vector<S> rsub(r.size(), ScalarOps<S>::zero());
    size_t off = 0;
    for (size_t g = 0; g < cut.row_groups.size(); ++g) {
      size_t dg = cut.group_dim(g);
      for (size_t i = 0; i < dg; ++i)
        for (size_t j = 0; j < dg; ++j)
          rsub[off + i] += group_mats[g](j, i) * r[off + j];
      off += dg;
    }
    off = 0;
    for (size_t g = 0; g < cut.row_groups.size(); ++g) {
      bool nz = false;
      for (size_t i = 0; i < cut.group_dim(g); ++i)
        if (!ScalarOps<S>::is_zero(rsub[off + i], tol)) nz = true;
      if (!nz) return;  // degenerate substituted point, skip
      off += cut.group_dim(g);
    }
    auto vt = evaluate_pencil(trans, r, tol);
    auto vo = evaluate_pencil(orig, rsub, tol);
    if (vt.rank != vo.rank) {
      status[k] = -1;
      return;
    }
    if (square) {
      S dt = matrix_det(vt.value);
      S dn = matrix_det(vo.value);
      bool zt = ScalarOps<S>::is_zero(dt, tol);
      bool zn = ScalarOps<S>::is_zero(dn, tol);
      if (zt || zn) {
        if (zt != zn) status[k] = -1;
        return;
      }
      ratios[k] = dt / dn;
      status[k] = 1;
    }
  };

#pragma omp parallel for schedule(dynamic)
  for (int k = 0; k < trials; ++k) run_trial(k);

  const S* first = nullptr;
  for (int k = 0; k < trials; ++k) {
    if (status[k] == -1) rep.ok = false;
    if (status[k] != 1) continue;
    ++rep.points_used;
    if (!first) {
      first = &ratios[k];
      continue;
    }
    if constexpr (ScalarOps<S>::exact) {
      if (!(ratios[k] == *first)) rep.ok = false;
    } else {
      double drift = std::abs(ratios[k] - *first) / std::max(1.0, std::abs(*first));
      rep.max_drift = std::max(rep.max_drift, drift);
      if (drift > tol) rep.ok = false;
    }
  }
  if (square && rep.points_used == 0) rep.ok = false;
  return rep;
}

#define EV_INSTANTIATE_VARIETIES(S)                                          \
  template struct RepresentationMatrix<S>;                                   \
  template RepresentationMatrix<S> representation_matrix(const Ensemble<S>&); \
  template struct LinearPencil<S>;                                           \
  template LinearPencil<S> build_pencil(const Ensemble<S>&, const CutSpec&); \
  template struct VarietyPolynomials<S>;                                     \
  template VarietyPolynomials<S> variety_polynomials(const LinearPencil<S>&, \
                                                     std::optional<int>);    \
  template VarietyPolynomials<S> variety_polynomials_serial(                 \
      const LinearPencil<S>&, std::optional<int>);                           \
  template PencilValue<S> evaluate_pencil(const LinearPencil<S>&,            \
                                          const std::vector<S>&, double);    \
  template Matrix<S> conjugated_block_sum(const DensityMatrix<S>&,           \
                                          const CutSpec&,                    \
                                          const std::vector<S>&);            \
  template TransformLawReport verify_transformation_law(                     \
      const Ensemble<S>&, const CutSpec&, const std::vector<Matrix<S>>&,     \
      int, uint64_t, double);

EV_INSTANTIATE_VARIETIES(ExactScalar)
EV_INSTANTIATE_VARIETIES(FloatScalar)
#undef EV_INSTANTIATE_VARIETIES

}  // namespace ev
