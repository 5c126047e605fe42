#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace qtorus {

/// Thrown when an operation would exceed the configured mode budget.
class CapacityError : public std::runtime_error {
 public:
  explicit CapacityError(const std::string& what) : std::runtime_error(what) {}
};

/// Hard cap on the number of lattice modes any box or convolution may touch.
/// Exceeding it is an error, never a silent truncation.
inline constexpr std::size_t kDefaultModeBudget = 2'000'000;

/// Lattice point k in Z^n.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> entries) : entries_(std::move(entries)) {}
  static MultiIndex zero(std::size_t n) { return MultiIndex(std::vector<int>(n, 0)); }
  static MultiIndex unit(std::size_t n, std::size_t j) {
    std::vector<int> e(n, 0);
    e.at(j) = 1;
    return MultiIndex(std::move(e));
  }

  std::size_t dim() const { return entries_.size(); }
  int operator[](std::size_t i) const { return entries_[i]; }
  const std::vector<int>& entries() const { return entries_; }

  /// l1 length |k| = sum_i |k_i|.
  long norm_l1() const {
    long s = 0;
    for (int e : entries_) s += e < 0 ? -long(e) : long(e);
    return s;
  }
  /// sup norm max_i |k_i|.
  int norm_sup() const {
    int s = 0;
    for (int e : entries_) {
      int a = e < 0 ? -e : e;
      if (a > s) s = a;
    }
    return s;
  }

  MultiIndex operator+(const MultiIndex& o) const {
    std::vector<int> r(entries_);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] += o.entries_[i];
    return MultiIndex(std::move(r));
  }
  MultiIndex operator-(const MultiIndex& o) const {
    std::vector<int> r(entries_);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= o.entries_[i];
    return MultiIndex(std::move(r));
  }
  MultiIndex operator-() const {
    std::vector<int> r(entries_);
    for (int& e : r) e = -e;
    return MultiIndex(std::move(r));
  }

  bool operator==(const MultiIndex& o) const { return entries_ == o.entries_; }
  bool operator!=(const MultiIndex& o) const { return entries_ != o.entries_; }
  /// Canonical (row-major) order: first coordinate outermost.
  bool operator<(const MultiIndex& o) const { return entries_ < o.entries_; }

  std::string str() const;

 private:
  std::vector<int> entries_;
};

/// Box Lambda_N = { k : max_i |k_i| <= N }.
struct LatticeBox {
  int N = 0;        // half-width, N >= 0
  std::size_t n = 1;  // dimension, n >= 1

  bool contains(const MultiIndex& k) const { return k.norm_sup() <= N; }
  /// (2N+1)^n, checked against the mode budget.
  std::size_t point_count(std::size_t budget = kDefaultModeBudget) const;
};

/// Index pair (j, k): component j in [0, n) and lattice point k.
struct ModeIndex {
  int j = 0;
  MultiIndex k;

  bool operator==(const ModeIndex& o) const { return j == o.j && k == o.k; }
  /// k-major canonical order, j ascending within a lattice point.
  bool operator<(const ModeIndex& o) const {
    if (k != o.k) return k < o.k;
    return j < o.j;
  }
};

/// All points of Lambda_N in canonical order (coordinates ascending, first
/// coordinate outermost).
std::vector<MultiIndex> box_points(int N, std::size_t n,
                                   std::size_t budget = kDefaultModeBudget);

/// The resonant pairs { (j, e_j) : j = 0..n-1 } whose linear coefficient
/// vanishes at the unperturbed frequency.
std::vector<ModeIndex> resonant_set(std::size_t n);

inline bool is_resonant(const ModeIndex& m) {
  const auto& e = m.k.entries();
  for (std::size_t i = 0; i < e.size(); ++i) {
    int want = (int(i) == m.j) ? 1 : 0;
    if (e[i] != want) return false;
  }
  return true;
}

/// Bijection between the non-resonant modes of a box and dense row numbers.
/// Rows follow box_points order with j ascending inside each lattice point,
/// skipping the resonant pairs.
class ModeOrdering {
 public:
  explicit ModeOrdering(const LatticeBox& box,
                        std::size_t budget = kDefaultModeBudget);

  std::size_t rows() const { return modes_.size(); }
  const LatticeBox& box() const { return box_; }
  const ModeIndex& mode(std::size_t row) const { return modes_.at(row); }
  const std::vector<ModeIndex>& modes() const { return modes_; }

  /// Row of a mode, or npos when the mode is resonant or outside the box.
  static constexpr std::size_t npos = std::size_t(-1);
  std::size_t row_of(const ModeIndex& m) const;

 private:
  LatticeBox box_;
  std::vector<ModeIndex> modes_;
  std::vector<std::size_t> row_lookup_;  // flat (point, j) -> row
  std::size_t flat_index(const ModeIndex& m) const;
};

/// Finitely supported map (j, k) -> real coefficient. Absent entries are
/// exactly zero; entries touched by arithmetic are kept even when they
/// cancel to zero, so supports reflect the algebraic footprint.
class FourierVector {
 public:
  FourierVector() = default;
  explicit FourierVector(std::size_t n) : n_(n) {}

  std::size_t dim() const { return n_; }
  std::size_t support_size() const { return coeff_.size(); }
  bool empty() const { return coeff_.empty(); }

  double get(const ModeIndex& m) const {
    auto it = coeff_.find(m);
    return it == coeff_.end() ? 0.0 : it->second;
  }
  double get(int j, const MultiIndex& k) const { return get(ModeIndex{j, k}); }
  void set(const ModeIndex& m, double v) { coeff_[m] = v; }
  void add(const ModeIndex& m, double v) { coeff_[m] += v; }

  const std::map<ModeIndex, double>& support() const { return coeff_; }

  /// Largest sup-norm over the support (0 for the empty vector).
  int support_radius() const;
  double norm_l2() const;

  bool operator==(const FourierVector& o) const {
    return n_ == o.n_ && coeff_ == o.coeff_;
  }

 private:
  std::size_t n_ = 0;
  std::map<ModeIndex, double> coeff_;
};

/// P_N: keep coefficients with k in Lambda_N, drop the rest. Idempotent.
FourierVector project(const FourierVector& v, int N);

/// Coefficient flip v'(j,k) = v(j,-k); involution. Represents the passage
/// from z-coefficients to zbar-coefficients under the realness assumption.
FourierVector flip(const FourierVector& v);

}  // namespace qtorus
