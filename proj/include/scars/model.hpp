#pragma once

#include "scars/basis.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <unordered_map>

namespace scars {

/// Sparse operator tied to a ConstrainedBasis.
struct SparseOperator {
  const ConstrainedBasis* basis = nullptr;
  SpMat mat;
  bool hermitian = true;

  std::size_t dim() const { return mat.rows(); }
  Vec apply(const Vec& v) const { return mat * v; }
  CVec apply(const CVec& v) const {
    return (mat * v.real()).cast<Complex>() + Complex(0, 1) * (mat * v.imag()).cast<Complex>();
  }
};

namespace detail {

inline bool neighbors_ground(const ConstrainedBasis& b, uint64_t c, int site) {
  for (int k = 1; k <= b.alpha(); ++k) {
    int l = site - k, r = site + k;
    if (b.bc() == Boundary::PBC) {
      l = (l % b.sites() + b.sites()) % b.sites();
      r = r % b.sites();
      if (b.excited(c, l) || b.excited(c, r)) return false;
    } else {
      if (l >= 0 && b.excited(c, l)) return false;
      if (r < b.sites() && b.excited(c, r)) return false;
    }
  }
  return true;
}

}  // namespace detail

/// H^alpha = sum_j P...P X_j P...P on the constrained space (spin-half basis).
/// OBC keeps the truncated boundary terms (X_1 P_2 ... etc.).
inline SparseOperator build_h_alpha(const ConstrainedBasis& b) {
  if (b.local_dim() != 2) throw std::invalid_argument("build_h_alpha: spin-half basis required");
  std::vector<Triplet> trips;
  for (std::size_t i = 0; i < b.dim(); ++i) {
    uint64_t c = b.state(i);
    for (int site = 0; site < b.sites(); ++site) {
      if (!detail::neighbors_ground(b, c, site)) continue;
      uint64_t d = c ^ (uint64_t{1} << site);
      std::ptrdiff_t j = b.index_of(d);
      if (j >= 0) trips.push_back(Triplet(j, i, 1.0));
    }
  }
  SparseOperator op;
  op.basis = &b;
  op.mat.resize(b.dim(), b.dim());
  op.mat.setFromTriplets(trips.begin(), trips.end());
  return op;
}

/// Matrix-free application of H^alpha (same action as build_h_alpha().mat).
inline Vec apply_h_alpha(const ConstrainedBasis& b, const Vec& v) {
  Vec out = Vec::Zero(v.size());
  for (std::size_t i = 0; i < b.dim(); ++i) {
    if (v[i] == 0.0) continue;
    uint64_t c = b.state(i);
    for (int site = 0; site < b.sites(); ++site) {
      if (!detail::neighbors_ground(b, c, site)) continue;
      std::ptrdiff_t j = b.index_of(c ^ (uint64_t{1} << site));
      if (j >= 0) out[j] += v[i];
    }
  }
  return out;
}

/// <s,m|S^x|s,m+-1> = sqrt((s -+ m)(s +- m + 1))/2, with m = q - s for local q.
inline double sx_element(int two_s, int q_from, int q_to) {
  if (std::abs(q_from - q_to) != 1) return 0.0;
  double s = two_s / 2.0;
  double m = q_from - s;
  if (q_to == q_from + 1) return 0.5 * std::sqrt((s - m) * (s + m + 1));
  return 0.5 * std::sqrt((s + m) * (s - m + 1));
}

/// H_PSP^alpha = sum_j Pbar... S^x_j ...Pbar on a spin-s constrained basis
/// (local_dim = 2s+1, ground state |q=0> = |m=-s>).
inline SparseOperator build_psp(const ConstrainedBasis& b, int two_s) {
  if (b.local_dim() != two_s + 1) throw std::invalid_argument("build_psp: local_dim must be 2s+1");
  std::vector<Triplet> trips;
  for (std::size_t i = 0; i < b.dim(); ++i) {
    uint64_t c = b.state(i);
    for (int site = 0; site < b.sites(); ++site) {
      if (!detail::neighbors_ground(b, c, site)) continue;
      int q = b.value(c, site);
      for (int dq : {-1, +1}) {
        int q2 = q + dq;
        if (q2 < 0 || q2 >= b.local_dim()) continue;
        std::ptrdiff_t j = b.index_of(b.with_value(c, site, q2));
        if (j >= 0) trips.push_back(Triplet(j, i, sx_element(two_s, q, q2)));
      }
    }
  }
  SparseOperator op;
  op.basis = &b;
  op.mat.resize(b.dim(), b.dim());
  op.mat.setFromTriplets(trips.begin(), trips.end());
  return op;
}

// ---------------------------------------------------------------------------
// H = H1 + H2 splits, verified on the full (unconstrained) product space.
// ---------------------------------------------------------------------------

enum class SplitScheme { BlockedOneBody, SpinHalfSumX, FrozenMotif, PspSumSx };

/// Split of a kinetically constrained Hamiltonian on the full product space
/// of its declared local basis. P projects onto the constrained subspace;
/// the defining invariant is  P H2 P = 0  with H2 = H - H1.
struct HamiltonianSplit {
  SpMat H, H1, H2;
  SpMat P;  // diagonal indicator of constraint-satisfying configurations

  double php_residual() const {
    SpMat M = P * H2 * P;
    double r = 0;
    for (int k = 0; k < M.outerSize(); ++k)
      for (SpMat::InnerIterator it(M, k); it; ++it) r = std::max(r, std::abs(it.value()));
    return r;
  }
};

namespace detail {

struct FullSpace {
  int sites, local_dim, bits;
  uint64_t nstates;
  int value(uint64_t c, int i) const { return int((c >> (bits * i)) & ((1u << bits) - 1)); }
  uint64_t with_value(uint64_t c, int i, int v) const {
    c &= ~((uint64_t((1u << bits) - 1)) << (bits * i));
    return c | (uint64_t(v) << (bits * i));
  }
  bool encodable(uint64_t c) const {
    for (int i = 0; i < sites; ++i)
      if (value(c, i) >= local_dim) return false;
    return true;
  }
};

inline FullSpace make_full_space(int sites, int local_dim) {
  FullSpace f;
  f.sites = sites;
  f.local_dim = local_dim;
  f.bits = 1;
  while ((1 << f.bits) < local_dim) ++f.bits;
  if (static_cast<long long>(f.bits) * sites > 26)
    throw std::invalid_argument("split: full product space too large");
  f.nstates = uint64_t{1} << (f.bits * sites);
  return f;
}

inline bool full_valid(const FullSpace& f, uint64_t c, int alpha, Boundary bc) {
  for (int i = 0; i < f.sites; ++i) {
    if (f.value(c, i) == 0) continue;
    for (int k = 1; k <= alpha; ++k) {
      int j = i + k;
      if (j >= f.sites) {
        if (bc == Boundary::OBC) break;
        j -= f.sites;
      }
      if (f.value(c, j) != 0) return false;
    }
  }
  return true;
}

/// H^alpha-type terms restricted to sites [lo..hi]. For the full chain the
/// neighbor projectors follow the chain's boundary condition; for a proper
/// sub-window they are truncated at the window edges (OBC sub-Hamiltonian).
inline void add_window_terms(const FullSpace& f, int alpha, Boundary bc, int lo, int hi,
                             double amp, int two_s, std::vector<Triplet>* trips) {
  const bool full_chain = (lo == 0 && hi == f.sites - 1);
  for (uint64_t c = 0; c < f.nstates; ++c) {
    if (!f.encodable(c)) continue;
    for (int site = lo; site <= hi; ++site) {
      bool ok = true;
      for (int k = 1; k <= alpha && ok; ++k) {
        for (int d : {-k, +k}) {
          int j = site + d;
          if (full_chain) {
            if (j < 0 || j >= f.sites) {
              if (bc == Boundary::OBC) continue;
              j = (j % f.sites + f.sites) % f.sites;
            }
          } else {
            if (j < lo || j > hi) continue;
          }
          if (f.value(c, j) != 0) {
            ok = false;
            break;
          }
        }
      }
      if (!ok) continue;
      int q = f.value(c, site);
      if (two_s == 1) {
        uint64_t d = f.with_value(c, site, 1 - q);
        trips->push_back(Triplet(static_cast<int>(d), static_cast<int>(c), amp));
      } else {
        for (int dq : {-1, +1}) {
          int q2 = q + dq;
          if (q2 < 0 || q2 >= f.local_dim) continue;
          uint64_t d = f.with_value(c, site, q2);
          trips->push_back(
              Triplet(static_cast<int>(d), static_cast<int>(c), amp * sx_element(two_s, q, q2)));
        }
      }
    }
  }
}

inline SpMat from_triplets(uint64_t n, std::vector<Triplet>& trips) {
  SpMat m(n, n);
  m.setFromTriplets(trips.begin(), trips.end());
  return m;
}

}  // namespace detail

/// Build the (H, H1, H2, P) split for a given scheme on the full product
/// space. `sites` counts chain sites; for FrozenMotif the chain length must
/// be (alpha+2)*n under PBC. Frozen-motif one-body terms whose window would
/// cross an OBC edge are omitted (truncation convention).
inline HamiltonianSplit split_h1_h2(SplitScheme scheme, int sites, int alpha, Boundary bc,
                                    int two_s = 1) {
  using namespace detail;
  int local_dim = two_s + 1;
  FullSpace f = make_full_space(sites, local_dim);
  HamiltonianSplit out;

  std::vector<Triplet> th;
  add_window_terms(f, alpha, bc, 0, sites - 1, 1.0, two_s, &th);
  out.H = from_triplets(f.nstates, th);

  std::vector<Triplet> t1;
  switch (scheme) {
    case SplitScheme::SpinHalfSumX: {
      if (two_s != 1) throw std::invalid_argument("split: SpinHalfSumX needs spin-half");
      for (uint64_t c = 0; c < f.nstates; ++c)
        for (int i = 0; i < sites; ++i)
          t1.push_back(Triplet(static_cast<int>(c ^ (uint64_t{1} << i)), static_cast<int>(c), 1.0));
      break;
    }
    case SplitScheme::PspSumSx: {
      for (uint64_t c = 0; c < f.nstates; ++c) {
        if (!f.encodable(c)) continue;
        for (int i = 0; i < sites; ++i) {
          int q = f.value(c, i);
          for (int dq : {-1, +1}) {
            int q2 = q + dq;
            if (q2 < 0 || q2 >= local_dim) continue;
            t1.push_back(Triplet(static_cast<int>(f.with_value(c, i, q2)), static_cast<int>(c),
                                 sx_element(two_s, q, q2)));
          }
        }
      }
      break;
    }
    case SplitScheme::BlockedOneBody: {
      // sum_j |O>(<L| + <R|)_j + h.c. acting on two-site blocks (2j, 2j+1).
      if (two_s != 1 || sites % 2 != 0)
        throw std::invalid_argument("split: BlockedOneBody needs an even spin-half chain");
      for (uint64_t c = 0; c < f.nstates; ++c) {
        for (int blk = 0; blk < sites / 2; ++blk) {
          int a = f.value(c, 2 * blk), d = f.value(c, 2 * blk + 1);
          if (a == 1 && d == 1) continue;  // |11> block lies outside the blocked space
          if (a == 0 && d == 0) {          // O -> L and O -> R
            t1.push_back(
                Triplet(static_cast<int>(c ^ (uint64_t{1} << (2 * blk))), static_cast<int>(c), 1.0));
            t1.push_back(Triplet(static_cast<int>(c ^ (uint64_t{1} << (2 * blk + 1))),
                                 static_cast<int>(c), 1.0));
          } else {  // L -> O or R -> O
            uint64_t e = f.with_value(f.with_value(c, 2 * blk, 0), 2 * blk + 1, 0);
            t1.push_back(Triplet(static_cast<int>(e), static_cast<int>(c), 1.0));
          }
        }
      }
      break;
    }
    case SplitScheme::FrozenMotif: {
      if (two_s != 1) throw std::invalid_argument("split: FrozenMotif needs spin-half");
      if (alpha < 2) throw std::invalid_argument("split: FrozenMotif needs alpha >= 2");
      int unit = alpha + 2;
      int n = (bc == Boundary::PBC) ? sites / unit : (sites + alpha - 1) / unit;
      if (bc == Boundary::PBC && sites % unit != 0)
        throw std::invalid_argument("split: FrozenMotif PBC needs L = (alpha+2) n");
      for (int k = 0; k < n; ++k) {
        int off = unit * k;
        // type "A": OBC H^alpha on the 3-site controlled window
        if (off + 2 <= sites - 1) add_window_terms(f, alpha, bc, off, off + 2, 1.0, 1, &t1);
        // type "B": OBC H^alpha on the frozen window of range alpha-1
        int blo = off + 3, bhi = off + 3 + (alpha - 2);
        if (bhi <= sites - 1) add_window_terms(f, alpha, bc, blo, bhi, 1.0, 1, &t1);
      }
      break;
    }
  }
  out.H1 = from_triplets(f.nstates, t1);
  out.H2 = out.H - out.H1;

  std::vector<Triplet> tp;
  for (uint64_t c = 0; c < f.nstates; ++c)
    if (f.encodable(c) && full_valid(f, c, alpha, bc))
      tp.push_back(Triplet(static_cast<int>(c), static_cast<int>(c), 1.0));
  out.P = from_triplets(f.nstates, tp);
  return out;
}

// ---------------------------------------------------------------------------
// Translated projector families (parent Hamiltonians, Appendix-E kernels).
// ---------------------------------------------------------------------------

/// A local vector over a window of chain sites, given as
/// (bitstring -> coefficient) with site w of the window at bit w.
using LocalVector = std::map<uint64_t, double>;

/// V = sum_positions sum_i |v_i><v_i| / <v_i|v_i>, windows translated by
/// `step` sites (1 = spin windows, 2 = blocked windows). Components falling
/// outside the constrained space are dropped (P_f ... P_f restriction).
inline SparseOperator build_projector_family(const ConstrainedBasis& b,
                                             const std::vector<LocalVector>& vectors,
                                             int window_sites, int step) {
  const int L = b.sites();
  std::vector<int> starts;
  if (b.bc() == Boundary::PBC) {
    for (int s = 0; s < L; s += step) starts.push_back(s);
  } else {
    for (int s = 0; s + window_sites <= L; s += step) starts.push_back(s);
  }

  auto window_bits = [&](uint64_t c, int start) {
    uint64_t w = 0;
    for (int k = 0; k < window_sites; ++k)
      w |= uint64_t(b.value(c, (start + k) % L)) << k;
    return w;
  };
  auto replace_window = [&](uint64_t c, int start, uint64_t w) {
    for (int k = 0; k < window_sites; ++k)
      c = b.with_value(c, (start + k) % L, int((w >> k) & 1));
    return c;
  };

  std::vector<Triplet> trips;
  std::vector<double> norms(vectors.size());
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    double n2 = 0;
    for (auto& [w, x] : vectors[i]) n2 += x * x;
    norms[i] = n2;
  }

  std::vector<double> amp(vectors.size());
  for (std::size_t ci = 0; ci < b.dim(); ++ci) {
    uint64_t c = b.state(ci);
    for (int start : starts) {
      uint64_t w = window_bits(c, start);
      bool any = false;
      for (std::size_t i = 0; i < vectors.size(); ++i) {
        auto it = vectors[i].find(w);
        amp[i] = (it == vectors[i].end()) ? 0.0 : it->second;
        any = any || amp[i] != 0.0;
      }
      if (!any) continue;
      for (std::size_t i = 0; i < vectors.size(); ++i) {
        if (amp[i] == 0.0) continue;
        for (auto& [w2, x2] : vectors[i]) {
          uint64_t d = replace_window(c, start, w2);
          std::ptrdiff_t dj = b.index_of(d);
          if (dj >= 0) trips.push_back(Triplet(dj, ci, x2 * amp[i] / norms[i]));
        }
      }
    }
  }
  SparseOperator op;
  op.basis = &b;
  op.mat.resize(b.dim(), b.dim());
  op.mat.setFromTriplets(trips.begin(), trips.end());
  return op;
}

/// Kernel (numerical nullspace) of a symmetric operator: eigenvectors with
/// |E| < tol * max(1, ||H||). Returns (dim x k) column matrix.
inline Mat operator_kernel(const SpMat& H, double tol = 1e-10) {
  Mat dense = Mat(H);
  Eigen::SelfAdjointEigenSolver<Mat> es(dense);
  double scale = std::max(1.0, std::max(std::abs(es.eigenvalues()(0)),
                                        std::abs(es.eigenvalues()(dense.rows() - 1))));
  std::vector<int> keep;
  for (int i = 0; i < dense.rows(); ++i)
    if (std::abs(es.eigenvalues()(i)) < tol * scale) keep.push_back(i);
  Mat out(dense.rows(), keep.size());
  for (std::size_t k = 0; k < keep.size(); ++k) out.col(k) = es.eigenvectors().col(keep[k]);
  return out;
}

/// MatrixMarket coordinate export (1-based indices) for cross-checking.
inline void write_matrix_market(const SpMat& m, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  f << "%%MatrixMarket matrix coordinate real general\n";
  f << m.rows() << " " << m.cols() << " " << m.nonZeros() << "\n";
  for (int k = 0; k < m.outerSize(); ++k)
    for (SpMat::InnerIterator it(m, k); it; ++it)
      f << it.row() + 1 << " " << it.col() + 1 << " " << it.value() << "\n";
}

}  // namespace scars
