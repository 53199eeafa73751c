#pragma once

#include "scars/basis.hpp"

#include <cmath>
#include <unordered_map>
#include <unordered_set>

namespace scars {

/// Orthonormal symmetry-adapted subspace of a ConstrainedBasis, built from
/// orbits of translation by p sites, optionally resolved by inversion and by
/// spectral-reflection parity. Vectors are real sparse columns.
struct SymmetrySector {
  int p = 1;
  int momentum = 0;    // j: character exp(2*pi*i*j/m) on T^p, m = L/p
  int inversion = 0;   // +1/-1 resolved, 0 unresolved
  int c_parity = 0;    // +1/-1 resolved, 0 unresolved
  SpMat vectors;       // dim x sector_dim, orthonormal columns
  std::size_t dim() const { return vectors.cols(); }
};

namespace detail {

struct OrbitVec {
  std::vector<std::pair<std::size_t, double>> terms;  // (basis index, coefficient)

  void axpy(double a, const OrbitVec& o) {
    for (auto& [i, x] : o.terms) add(i, a * x);
  }
  void add(std::size_t i, double x) {
    for (auto& t : terms)
      if (t.first == i) {
        t.second += x;
        return;
      }
    terms.push_back({i, x});
  }
  double norm2() const {
    double s = 0;
    for (auto& t : terms) s += t.second * t.second;
    return s;
  }
  double dot(const OrbitVec& o) const {
    double s = 0;
    for (auto& a : terms)
      for (auto& b : o.terms)
        if (a.first == b.first) s += a.second * b.second;
    return s;
  }
};

}  // namespace detail

/// Build the real semi-momentum sector with character chi = +1 (j=0) or
/// chi = -1 (j=m/2) on T^p, with optional inversion and C-parity resolution.
/// Inversion resolution for other momenta is not implemented (the models
/// here only need the real characters); momentum j with inversion==0 and
/// c_parity==0 is supported for any j via build_momentum_sector below.
inline SymmetrySector build_sector(const ConstrainedBasis& b, int p, int momentum,
                                   int inversion, int c_parity) {
  if (b.bc() != Boundary::PBC) throw std::invalid_argument("build_sector: PBC only");
  if (b.sites() % p != 0) throw std::invalid_argument("build_sector: p must divide L");
  int m = b.sites() / p;
  bool chi_neg = false;
  if (momentum == 0) {
    chi_neg = false;
  } else if (2 * momentum == m) {
    chi_neg = true;
  } else if (inversion != 0 || c_parity != 0) {
    throw std::invalid_argument("build_sector: symmetry resolution needs momentum 0 or m/2");
  }

  const double chi = chi_neg ? -1.0 : 1.0;
  std::unordered_set<uint64_t> visited;
  std::vector<detail::OrbitVec> cols;

  auto tp = [&](uint64_t c) {
    for (int k = 0; k < p; ++k) c = b.translated(c);
    return c;
  };
  auto orbit_vec = [&](uint64_t c0, bool* ok) -> detail::OrbitVec {
    detail::OrbitVec v;
    uint64_t c = c0;
    double phase = 1.0;
    int len = 0;
    do {
      v.add(static_cast<std::size_t>(b.index_of(c)), phase);
      c = tp(c);
      phase *= chi;
      ++len;
    } while (c != c0);
    *ok = !(chi_neg && (len % 2 != 0));  // character must be single-valued on the orbit
    return v;
  };
  auto mark_orbit = [&](uint64_t c0) {
    uint64_t c = c0;
    do {
      visited.insert(c);
      c = tp(c);
    } while (c != c0);
  };

  for (std::size_t i = 0; i < b.dim(); ++i) {
    uint64_t c = b.state(i);
    if (visited.count(c)) continue;
    if (c_parity != 0 && (b.c_sign(c) > 0 ? 1 : -1) != c_parity) {
      mark_orbit(c);
      mark_orbit(b.inverted(c));
      continue;
    }
    bool ok = false;
    detail::OrbitVec u = orbit_vec(c, &ok);
    mark_orbit(c);
    uint64_t ci = b.inverted(c);
    bool same_orbit = visited.count(ci) > 0;
    if (!same_orbit) mark_orbit(ci);
    if (!ok) continue;

    if (inversion == 0) {
      cols.push_back(u);
      if (!same_orbit) {
        bool ok2 = false;
        detail::OrbitVec w = orbit_vec(ci, &ok2);
        if (ok2) cols.push_back(w);
      }
      continue;
    }

    // I u lands on the (possibly identical) partner orbit with matched phases.
    detail::OrbitVec iu;
    for (auto& [idx, x] : u.terms)
      iu.add(static_cast<std::size_t>(b.index_of(b.inverted(b.state(idx)))), x);

    if (same_orbit) {
      double ovl = u.dot(iu) / u.norm2();
      int sigma = ovl > 0 ? 1 : -1;
      if (std::abs(std::abs(ovl) - 1.0) > 1e-9) {
        // I mixes phases inside one orbit; (1 +- I)u still projects correctly.
        detail::OrbitVec v = u;
        v.axpy(static_cast<double>(inversion), iu);
        if (v.norm2() > 1e-18) cols.push_back(v);
        continue;
      }
      if (sigma == inversion) cols.push_back(u);
    } else {
      detail::OrbitVec v = u;
      v.axpy(static_cast<double>(inversion), iu);
      if (v.norm2() > 1e-18) cols.push_back(v);
    }
  }

  SymmetrySector s;
  s.p = p;
  s.momentum = chi_neg ? m / 2 : 0;
  s.inversion = inversion;
  s.c_parity = c_parity;
  s.vectors.resize(b.dim(), cols.size());
  std::vector<Triplet> trips;
  for (std::size_t j = 0; j < cols.size(); ++j) {
    double nrm = std::sqrt(cols[j].norm2());
    for (auto& [i, x] : cols[j].terms) trips.push_back(Triplet(i, j, x / nrm));
  }
  s.vectors.setFromTriplets(trips.begin(), trips.end());
  return s;
}

/// Dimension of the complex momentum-j sector of the T^p cyclic group
/// (number of T^p-orbits whose size is compatible with the character).
inline std::size_t momentum_sector_dim(const ConstrainedBasis& b, int p, int j) {
  if (b.sites() % p != 0) throw std::invalid_argument("momentum_sector_dim: p must divide L");
  int m = b.sites() / p;
  std::unordered_set<uint64_t> visited;
  std::size_t count = 0;
  for (std::size_t i = 0; i < b.dim(); ++i) {
    uint64_t c0 = b.state(i);
    if (visited.count(c0)) continue;
    int len = 0;
    uint64_t c = c0;
    do {
      visited.insert(c);
      for (int k = 0; k < p; ++k) c = b.translated(c);
      ++len;
    } while (c != c0);
    if ((static_cast<long long>(j) * len) % m == 0) ++count;
  }
  return count;
}

/// Restrict a (sparse, symmetric) operator to a sector: V^T H V.
inline Mat restrict_operator(const SpMat& H, const SymmetrySector& s) {
  SpMat HV = H * s.vectors;
  Mat out = Mat(s.vectors.transpose() * HV);
  return out;
}

}  // namespace scars
