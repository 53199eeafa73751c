#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace scars {

using Mat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using SpMat = Eigen::SparseMatrix<double>;
using Complex = std::complex<double>;
using Triplet = Eigen::Triplet<double>;

enum class Boundary { PBC, OBC };

inline std::string to_string(Boundary bc) { return bc == Boundary::PBC ? "pbc" : "obc"; }

/// Local bases a state can be declared in. The constrained chain itself is
/// always stored site-by-site; blocked bases are read off in groups.
enum class LocalKind {
  SpinHalf,          // {0,1}, one site per symbol
  Blocked,           // {O,L,R} = {00,10,01}, two sites per symbol
  BlockedAntipodal,  // {00,01,10,11} pairing site i with site i+L/2
  Motif3,            // {000,100,010,001}, three controlled sites + frozen tail
  Spin               // {q = 0..2s}, one site per symbol, ground = 0
};

struct LocalBasis {
  LocalKind kind = LocalKind::SpinHalf;
  int block_size = 1;  // sites consumed per symbol along the chain
  int dim = 2;         // number of symbols

  static LocalBasis spin_half() { return {LocalKind::SpinHalf, 1, 2}; }
  static LocalBasis blocked() { return {LocalKind::Blocked, 2, 3}; }
  static LocalBasis blocked_antipodal() { return {LocalKind::BlockedAntipodal, 1, 4}; }
  static LocalBasis motif3() { return {LocalKind::Motif3, 3, 4}; }
  static LocalBasis spin(int two_s) { return {LocalKind::Spin, 1, two_s + 1}; }
};

inline const char* blocked_symbol_name(int s) {
  static const char* names[3] = {"O", "L", "R"};
  return names[s];
}

/// Rydberg-constrained configuration space of a chain: no two excited sites
/// (local value != 0) within distance alpha, wrapping for PBC. Configurations
/// are packed little-endian with bits_per_site() bits each and stored in
/// ascending numeric order, so ordinals are reproducible across runs.
class ConstrainedBasis {
public:
  ConstrainedBasis(int sites, int alpha, Boundary bc, int local_dim = 2)
      : sites_(sites), alpha_(alpha), bc_(bc), local_dim_(local_dim) {
    if (sites < 1) throw std::invalid_argument("basis: need at least one site");
    if (alpha < 1) throw std::invalid_argument("basis: alpha must be >= 1");
    if (local_dim < 2 || local_dim > 8) throw std::invalid_argument("basis: local_dim out of range");
    if (bc == Boundary::PBC && sites <= alpha)
      throw std::invalid_argument("basis: PBC requires L > alpha");
    bits_ = 1;
    while ((1 << bits_) < local_dim) ++bits_;
    if (static_cast<long long>(bits_) * sites > 63)
      throw std::invalid_argument("basis: chain too long for packed storage");
    site_mask_ = (uint64_t{1} << bits_) - 1;
    enumerate();
  }

  int sites() const { return sites_; }
  int alpha() const { return alpha_; }
  Boundary bc() const { return bc_; }
  int local_dim() const { return local_dim_; }
  int bits_per_site() const { return bits_; }
  std::size_t dim() const { return states_.size(); }
  const std::vector<uint64_t>& states() const { return states_; }
  uint64_t state(std::size_t i) const { return states_[i]; }

  int value(uint64_t c, int site) const {
    return static_cast<int>((c >> (bits_ * site)) & site_mask_);
  }
  uint64_t with_value(uint64_t c, int site, int v) const {
    c &= ~(site_mask_ << (bits_ * site));
    return c | (uint64_t{v} << (bits_ * site));
  }
  bool excited(uint64_t c, int site) const { return value(c, site) != 0; }

  /// Ordinal of a configuration, or -1 if it violates the constraint.
  std::ptrdiff_t index_of(uint64_t c) const {
    auto it = std::lower_bound(states_.begin(), states_.end(), c);
    if (it == states_.end() || *it != c) return -1;
    return it - states_.begin();
  }

  bool valid(uint64_t c) const {
    for (int i = 0; i < sites_; ++i) {
      if (!excited(c, i)) continue;
      for (int k = 1; k <= alpha_; ++k) {
        int j = i + k;
        if (j >= sites_) {
          if (bc_ == Boundary::OBC) break;
          j -= sites_;
        }
        if (excited(c, j)) return false;
      }
    }
    return true;
  }

  /// T_x: content of site i moves to site i+1 (PBC only).
  uint64_t translated(uint64_t c) const {
    uint64_t total = uint64_t(bits_) * sites_;
    uint64_t full = (total == 64) ? ~uint64_t{0} : ((uint64_t{1} << total) - 1);
    return ((c << bits_) | (c >> (total - bits_))) & full;
  }

  /// Inversion about the chain axis: site i -> L-1-i.
  uint64_t inverted(uint64_t c) const {
    uint64_t r = 0;
    for (int i = 0; i < sites_; ++i)
      r |= uint64_t(value(c, i)) << (bits_ * (sites_ - 1 - i));
    return r;
  }

  int excitation_count(uint64_t c) const {
    int n = 0;
    for (int i = 0; i < sites_; ++i) n += excited(c, i) ? 1 : 0;
    return n;
  }

  /// Spectral reflection C = prod_j Z_j sign of a configuration.
  double c_sign(uint64_t c) const { return (excitation_count(c) % 2 == 0) ? 1.0 : -1.0; }

  /// Blocked symbol of block j: sites (2j, 2j+1) -> O=0, L=1, R=2; -1 on |11>.
  int blocked_symbol(uint64_t c, int block) const {
    int a = value(c, 2 * block), b = value(c, 2 * block + 1);
    if (a == 0 && b == 0) return 0;
    if (a == 1 && b == 0) return 1;
    if (a == 0 && b == 1) return 2;
    return -1;
  }

private:
  void enumerate() {
    states_.clear();
    if (local_dim_ == 2) {
      uint64_t n = uint64_t{1} << sites_;
      for (uint64_t c = 0; c < n; ++c)
        if (valid_bits(c)) states_.push_back(c);
    } else {
      std::vector<int> digit(sites_, 0);
      uint64_t packed = 0;
      while (true) {
        if (valid(packed)) states_.push_back(packed);
        int i = 0;
        for (; i < sites_; ++i) {
          if (digit[i] + 1 < local_dim_) {
            ++digit[i];
            packed += uint64_t{1} << (bits_ * i);
            break;
          }
          packed -= uint64_t(digit[i]) << (bits_ * i);
          digit[i] = 0;
        }
        if (i == sites_) break;
      }
      std::sort(states_.begin(), states_.end());
    }
  }

  bool valid_bits(uint64_t c) const {
    for (int k = 1; k <= alpha_; ++k) {
      if (c & (c >> k)) return false;
      if (bc_ == Boundary::PBC) {
        uint64_t wrap = ((c << (sites_ - k)) | (c >> k)) & ((uint64_t{1} << sites_) - 1);
        if (c & wrap) return false;
      }
    }
    return true;
  }

  int sites_, alpha_, local_dim_, bits_;
  Boundary bc_;
  uint64_t site_mask_ = 1;
  std::vector<uint64_t> states_;
};

inline ConstrainedBasis enumerate_basis(int L, int alpha, Boundary bc, int local_dim = 2) {
  return ConstrainedBasis(L, alpha, bc, local_dim);
}

enum class SymOp { Tx, Inv, C };

/// Permutation (T_x, I) or diagonal-sign (C) action on a constrained vector.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> apply_symmetry(
    const ConstrainedBasis& b, SymOp op,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& v) {
  if (static_cast<std::size_t>(v.size()) != b.dim())
    throw std::invalid_argument("apply_symmetry: dimension mismatch");
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out(v.size());
  if (op == SymOp::C) {
    for (std::size_t i = 0; i < b.dim(); ++i) out[i] = v[i] * b.c_sign(b.state(i));
    return out;
  }
  if (op == SymOp::Tx && b.bc() == Boundary::OBC)
    throw std::invalid_argument("apply_symmetry: T_x undefined for OBC");
  for (std::size_t i = 0; i < b.dim(); ++i) {
    uint64_t c = b.state(i);
    uint64_t d = (op == SymOp::Tx) ? b.translated(c) : b.inverted(c);
    out[b.index_of(d)] = v[i];
  }
  return out;
}

/// Expectation value of a symmetry on a normalized vector (for label checks).
template <typename Scalar>
Scalar symmetry_expectation(const ConstrainedBasis& b, SymOp op,
                            const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& v) {
  auto w = apply_symmetry(b, op, v);
  if constexpr (std::is_same_v<Scalar, Complex>)
    return v.dot(w) / v.squaredNorm();
  else
    return v.dot(w) / v.squaredNorm();
}

}  // namespace scars
