#pragma once

#include "scars/basis.hpp"

#include <cmath>
#include <optional>
#include <variant>

namespace scars {

/// Translationally invariant MPS: one chi x chi matrix per local symbol.
struct TiMps {
  LocalBasis local;
  std::vector<CMat> tensors;
  int chi() const { return tensors.empty() ? 0 : static_cast<int>(tensors[0].rows()); }
  bool is_real() const {
    for (const auto& t : tensors)
      if (t.imag().cwiseAbs().maxCoeff() > 0) return false;
    return true;
  }
};

/// Twisted-TI MPS: single-defect state on top of a TI MPS. The optional
/// momentum k multiplies the defect at site r by exp(i k r).
struct TtiMps {
  TiMps base;
  std::vector<CMat> defect;
  double k = 0.0;
};

/// Blocked-antipodal MPS: tensor per pair symbol (s, sbar), index 2*s + sbar,
/// pairing chain site i with its antipode i + L/2.
struct BaMps {
  std::vector<CMat> tensors;  // [00, 01, 10, 11]
  int chi() const { return static_cast<int>(tensors[0].rows()); }
};

using MpsState = std::variant<TiMps, TtiMps, BaMps>;

namespace detail {

/// Symbols of a configuration read in the MPS's local basis; false if the
/// configuration has no valid reading (e.g. a |11> block).
inline bool read_symbols(const ConstrainedBasis& b, const LocalBasis& lb, uint64_t c,
                         std::vector<int>* out) {
  const int L = b.sites();
  switch (lb.kind) {
    case LocalKind::SpinHalf:
    case LocalKind::Spin: {
      out->resize(L);
      for (int i = 0; i < L; ++i) (*out)[i] = b.value(c, i);
      return true;
    }
    case LocalKind::Blocked: {
      if (L % 2 != 0) return false;
      out->resize(L / 2);
      for (int j = 0; j < L / 2; ++j) {
        int s = b.blocked_symbol(c, j);
        if (s < 0) return false;
        (*out)[j] = s;
      }
      return true;
    }
    case LocalKind::BlockedAntipodal: {
      if (L % 2 != 0) return false;
      int Lb = L / 2;
      out->resize(Lb);
      for (int i = 0; i < Lb; ++i)
        (*out)[i] = 2 * b.value(c, i) + b.value(c, i + Lb);
      return true;
    }
    case LocalKind::Motif3:
      return false;  // motif states use expand_motif
  }
  return false;
}

inline Complex trace_product(const std::vector<CMat>& ts, const std::vector<int>& sym) {
  CMat acc = ts[sym[0]];
  for (std::size_t i = 1; i < sym.size(); ++i) acc = acc * ts[sym[i]];
  return acc.trace();
}

}  // namespace detail

/// Dense expansion of a TI MPS over a constrained basis (PBC trace closure).
inline CVec expand_ti(const TiMps& m, const ConstrainedBasis& b) {
  CVec out = CVec::Zero(b.dim());
  std::vector<int> sym;
  for (std::size_t i = 0; i < b.dim(); ++i) {
    if (!detail::read_symbols(b, m.local, b.state(i), &sym))
      throw std::invalid_argument("expand_ti: configuration not readable in local basis");
    out[i] = detail::trace_product(m.tensors, sym);
  }
  return out;
}

/// OBC expansion with termination vectors: amplitude = v^T (prod M) w.
inline CVec expand_ti_obc(const TiMps& m, const ConstrainedBasis& b, const CVec& v, const CVec& w) {
  CVec out = CVec::Zero(b.dim());
  std::vector<int> sym;
  for (std::size_t i = 0; i < b.dim(); ++i) {
    if (!detail::read_symbols(b, m.local, b.state(i), &sym))
      throw std::invalid_argument("expand_ti_obc: configuration not readable in local basis");
    CVec acc = w;
    for (auto it = sym.rbegin(); it != sym.rend(); ++it) acc = m.tensors[*it] * acc;
    out[i] = (v.transpose() * acc).value();  // v^T acc, no conjugation
  }
  return out;
}

/// Expansion over the full product space of the local basis (small sizes);
/// used to verify that constraint-violating configurations get amplitude 0.
inline CVec expand_ti_full(const TiMps& m, int L_units) {
  std::size_t n = 1;
  for (int i = 0; i < L_units; ++i) n *= m.local.dim;
  CVec out(n);
  std::vector<int> sym(L_units);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t x = c;
    for (int i = 0; i < L_units; ++i) {
      sym[i] = x % m.local.dim;
      x /= m.local.dim;
    }
    out[c] = detail::trace_product(m.tensors, sym);
  }
  return out;
}

/// TTI amplitude: sum over defect positions r of exp(i k r) with the defect
/// tensor substituted at r. Equivalent to the twisted trace of the stacked
/// tensors (see stacked_tensors / expand_tti_twisted).
inline CVec expand_tti(const TtiMps& m, const ConstrainedBasis& b) {
  if (b.bc() != Boundary::PBC) throw std::invalid_argument("expand_tti: PBC only");
  CVec out = CVec::Zero(b.dim());
  std::vector<int> sym;
  const auto& M = m.base.tensors;
  for (std::size_t i = 0; i < b.dim(); ++i) {
    if (!detail::read_symbols(b, m.base.local, b.state(i), &sym))
      throw std::invalid_argument("expand_tti: configuration not readable in local basis");
    int n = static_cast<int>(sym.size());
    int chi = m.base.chi();
    // prefix[r] = M^{s_0} ... M^{s_{r-1}}, suffix[r] = M^{s_r} ... M^{s_{n-1}}
    std::vector<CMat> prefix(n + 1), suffix(n + 1);
    prefix[0] = CMat::Identity(chi, chi);
    for (int r = 0; r < n; ++r) prefix[r + 1] = prefix[r] * M[sym[r]];
    suffix[n] = CMat::Identity(chi, chi);
    for (int r = n - 1; r >= 0; --r) suffix[r] = M[sym[r]] * suffix[r + 1];
    Complex amp = 0;
    for (int r = 0; r < n; ++r) {
      Complex phase = std::polar(1.0, m.k * r);
      amp += phase * (suffix[r + 1] * prefix[r] * m.defect[sym[r]]).trace();
    }
    out[i] = amp;
  }
  return out;
}

/// Stacked 2chi x 2chi tensors [[M, 0], [M1, M]] of a (homogeneous) TTI MPS.
inline std::vector<CMat> stacked_tensors(const std::vector<CMat>& M, const std::vector<CMat>& M1) {
  int chi = static_cast<int>(M[0].rows());
  std::vector<CMat> out(M.size());
  for (std::size_t s = 0; s < M.size(); ++s) {
    CMat a = CMat::Zero(2 * chi, 2 * chi);
    a.topLeftCorner(chi, chi) = M[s];
    a.bottomLeftCorner(chi, chi) = M1[s];
    a.bottomRightCorner(chi, chi) = M[s];
    out[s] = a;
  }
  return out;
}

/// Twist matrix [[0, 1], [0, 0]] for the twisted trace.
inline CMat twist_matrix(int chi) {
  CMat t = CMat::Zero(2 * chi, 2 * chi);
  t.topRightCorner(chi, chi) = CMat::Identity(chi, chi);
  return t;
}

/// Twisted-trace amplitude with the twist inserted after `pos` stacked
/// tensors; the result is independent of pos (cyclicity of the twisted trace).
inline Complex twisted_trace(const std::vector<CMat>& stacked, const CMat& twist,
                             const std::vector<int>& sym, int pos = 0) {
  int X = static_cast<int>(twist.rows());
  CMat acc = CMat::Identity(X, X);
  for (int i = 0; i < static_cast<int>(sym.size()); ++i) {
    if (i == pos) acc = acc * twist;
    acc = acc * stacked[sym[i]];
  }
  if (pos == static_cast<int>(sym.size())) acc = acc * twist;
  return acc.trace();
}

/// Dense expansion of a BA MPS: pair symbol i is (site i, site i + L/2).
inline CVec expand_ba(const BaMps& m, const ConstrainedBasis& b) {
  if (b.sites() % 2 != 0) throw std::invalid_argument("expand_ba: even length required");
  CVec out = CVec::Zero(b.dim());
  std::vector<int> sym;
  LocalBasis lb = LocalBasis::blocked_antipodal();
  for (std::size_t i = 0; i < b.dim(); ++i) {
    detail::read_symbols(b, lb, b.state(i), &sym);
    out[i] = detail::trace_product(m.tensors, sym);
  }
  return out;
}

/// Frozen-motif expansion for H^alpha: units of 3 controlled sites followed
/// by alpha-1 frozen |0> sites (PBC: L = (alpha+2) n). For OBC the last
/// frozen tail is dropped (L = (alpha+2) n - (alpha-1)) and terminations
/// v, w close the matrix product.
inline CVec expand_motif3(const std::vector<CMat>& tensors, const ConstrainedBasis& b,
                          const CVec* v = nullptr, const CVec* w = nullptr) {
  const int alpha = b.alpha(), L = b.sites(), unit = alpha + 2;
  int n = (b.bc() == Boundary::PBC) ? L / unit : (L + alpha - 1) / unit;
  if ((b.bc() == Boundary::PBC && L != unit * n) ||
      (b.bc() == Boundary::OBC && L != unit * n - (alpha - 1)))
    throw std::invalid_argument("expand_motif3: incompatible length");
  CVec out = CVec::Zero(b.dim());
  for (std::size_t i = 0; i < b.dim(); ++i) {
    uint64_t c = b.state(i);
    bool ok = true;
    Complex amp;
    std::vector<int> sym(n);
    for (int u = 0; u < n && ok; ++u) {
      int off = unit * u;
      int s0 = b.value(c, off), s1 = b.value(c, off + 1), s2 = b.value(c, off + 2);
      int s;
      if (s0 == 0 && s1 == 0 && s2 == 0) s = 0;
      else if (s0 == 1 && s1 == 0 && s2 == 0) s = 1;
      else if (s0 == 0 && s1 == 1 && s2 == 0) s = 2;
      else if (s0 == 0 && s1 == 0 && s2 == 1) s = 3;
      else { ok = false; break; }
      sym[u] = s;
      for (int fkeep = 3; fkeep < unit; ++fkeep) {
        int site = off + fkeep;
        if (site >= L) break;  // truncated OBC tail
        if (b.value(c, site) != 0) { ok = false; break; }
      }
    }
    if (!ok) continue;
    if (b.bc() == Boundary::PBC) {
      amp = detail::trace_product(tensors, sym);
    } else {
      CVec acc = *w;
      for (int u = n - 1; u >= 0; --u) acc = tensors[sym[u]] * acc;
      amp = (v->transpose() * acc).value();
    }
    out[i] = amp;
  }
  return out;
}

/// PSP-motif expansion: units of one controlled spin-s site followed by
/// alpha frozen |-s> sites. Tensor choice per unit may vary (tensor_of_unit),
/// enabling mixed finite-energy-density states.
inline CVec expand_psp_motif(const std::vector<std::vector<CMat>>& unit_tensors,
                             const ConstrainedBasis& b, const CVec* v = nullptr,
                             const CVec* w = nullptr) {
  const int alpha = b.alpha(), L = b.sites(), unit = alpha + 1;
  int n = static_cast<int>(unit_tensors.size());
  if ((b.bc() == Boundary::PBC && L != unit * n) ||
      (b.bc() == Boundary::OBC && L != unit * n - alpha))
    throw std::invalid_argument("expand_psp_motif: incompatible length");
  CVec out = CVec::Zero(b.dim());
  for (std::size_t i = 0; i < b.dim(); ++i) {
    uint64_t c = b.state(i);
    bool ok = true;
    std::vector<int> sym(n);
    for (int u = 0; u < n && ok; ++u) {
      int off = unit * u;
      sym[u] = b.value(c, off);
      for (int fk = 1; fk <= alpha; ++fk) {
        int site = off + fk;
        if (site >= L) break;
        if (b.value(c, site) != 0) { ok = false; break; }
      }
    }
    if (!ok) continue;
    if (b.bc() == Boundary::PBC) {
      CMat acc = unit_tensors[0][sym[0]];
      for (int u = 1; u < n; ++u) acc = acc * unit_tensors[u][sym[u]];
      out[i] = acc.trace();
    } else {
      CVec acc = *w;
      for (int u = n - 1; u >= 0; --u) acc = unit_tensors[u][sym[u]] * acc;
      out[i] = (v->transpose() * acc).value();
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Transfer matrices, norms, correlation lengths, gauge transformations.
// ---------------------------------------------------------------------------

/// E = sum_s conj(M^s) (x) M^s over the auxiliary space.
inline CMat transfer_matrix(const std::vector<CMat>& tensors) {
  int chi = static_cast<int>(tensors[0].rows());
  CMat E = CMat::Zero(chi * chi, chi * chi);
  for (const auto& m : tensors) {
    for (int i = 0; i < chi; ++i)
      for (int j = 0; j < chi; ++j)
        for (int k = 0; k < chi; ++k)
          for (int l = 0; l < chi; ++l)
            E(i * chi + k, j * chi + l) += std::conj(m(i, j)) * m(k, l);
  }
  return E;
}

inline CMat transfer_matrix(const TiMps& m) { return transfer_matrix(m.tensors); }
inline CMat transfer_matrix(const BaMps& m) { return transfer_matrix(m.tensors); }

/// <psi|psi> = Tr E^{L_units}.
inline double mps_norm2(const CMat& E, int L_units) {
  CMat p = E;
  for (int i = 1; i < L_units; ++i) p = p * E;
  return p.trace().real();
}

/// Transfer eigenvalues sorted by descending magnitude.
inline CVec transfer_spectrum(const CMat& E) {
  Eigen::ComplexEigenSolver<CMat> es(E);
  CVec ev = es.eigenvalues();
  std::sort(ev.data(), ev.data() + ev.size(),
            [](Complex a, Complex b) { return std::abs(a) > std::abs(b); });
  return ev;
}

/// xi = -1 / log|lambda_2 / lambda_1| in chain sites (block_size factor for
/// the blocked basis). Undefined (nullopt) when the top of the transfer
/// spectrum is degenerate in magnitude, as for non-injective MPSs.
inline std::optional<double> correlation_length(const std::vector<CMat>& tensors,
                                                int sites_per_step) {
  CVec ev = transfer_spectrum(transfer_matrix(tensors));
  if (ev.size() < 2) return std::nullopt;
  double l1 = std::abs(ev[0]);
  double l2 = std::abs(ev[1]);
  if (l1 <= 0 || l2 <= 0) return std::nullopt;
  if (l2 > l1 * (1.0 - 1e-9)) return std::nullopt;  // degenerate top: non-injective
  return -static_cast<double>(sites_per_step) / std::log(l2 / l1);
}

inline std::optional<double> correlation_length(const TiMps& m) {
  return correlation_length(m.tensors, m.local.kind == LocalKind::Blocked ? 2 : 1);
}
inline std::optional<double> correlation_length(const BaMps& m) {
  return correlation_length(m.tensors, 1);
}

/// Gauge similarity transform M^s -> P^{-1} M^s P (leaves PBC expansions
/// invariant).
inline TiMps gauge_transform(const TiMps& m, const CMat& P) {
  TiMps out = m;
  CMat Pi = P.inverse();
  for (auto& t : out.tensors) t = Pi * t * P;
  return out;
}

}  // namespace scars
