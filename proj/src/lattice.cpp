#include "qtorus/lattice.hpp"

#include <cmath>
#include <sstream>

namespace qtorus {

std::string MultiIndex::str() const {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (i) os << ",";
    os << entries_[i];
  }
  os << ")";
  return os.str();
}

std::size_t LatticeBox::point_count(std::size_t budget) const {
  if (N < 0) throw std::invalid_argument("LatticeBox: negative half-width");
  if (n == 0) throw std::invalid_argument("LatticeBox: dimension must be >= 1");
  std::size_t side = 2 * std::size_t(N) + 1;
  std::size_t count = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (count > budget / side) {
      throw CapacityError("lattice box (2N+1)^n exceeds mode budget at N=" +
                          std::to_string(N) + ", n=" + std::to_string(n));
    }
    count *= side;
  }
  return count;
}

std::vector<MultiIndex> box_points(int N, std::size_t n, std::size_t budget) {
  LatticeBox box{N, n};
  std::size_t count = box.point_count(budget);
  std::vector<MultiIndex> points;
  points.reserve(count);
  std::vector<int> cur(n, -N);
  for (;;) {
    points.emplace_back(cur);
    // odometer increment, last coordinate fastest
    std::size_t i = n;
    while (i > 0) {
      --i;
      if (cur[i] < N) {
        ++cur[i];
        break;
      }
      cur[i] = -N;
      if (i == 0) return points;
    }
  }
}

std::vector<ModeIndex> resonant_set(std::size_t n) {
  std::vector<ModeIndex> s;
  s.reserve(n);
  for (std::size_t j = 0; j < n; ++j)
    s.push_back(ModeIndex{int(j), MultiIndex::unit(n, j)});
  return s;
}

ModeOrdering::ModeOrdering(const LatticeBox& box, std::size_t budget) : box_(box) {
  std::size_t points = box.point_count(budget);
  modes_.reserve(points * box.n - box.n);
  row_lookup_.assign(points * box.n, npos);
  std::size_t point_idx = 0;
  for (const MultiIndex& k : box_points(box.N, box.n, budget)) {
    for (std::size_t j = 0; j < box.n; ++j) {
      ModeIndex m{int(j), k};
      if (is_resonant(m)) continue;
      row_lookup_[point_idx * box.n + j] = modes_.size();
      modes_.push_back(std::move(m));
    }
    ++point_idx;
  }
}

std::size_t ModeOrdering::flat_index(const ModeIndex& m) const {
  // point index in box_points order: odometer value of (k_i + N)
  std::size_t idx = 0;
  std::size_t side = 2 * std::size_t(box_.N) + 1;
  for (std::size_t i = 0; i < box_.n; ++i) {
    int shifted = m.k[i] + box_.N;
    idx = idx * side + std::size_t(shifted);
  }
  return idx * box_.n + std::size_t(m.j);
}

std::size_t ModeOrdering::row_of(const ModeIndex& m) const {
  if (m.j < 0 || std::size_t(m.j) >= box_.n) return npos;
  if (m.k.dim() != box_.n || !box_.contains(m.k)) return npos;
  return row_lookup_[flat_index(m)];
}

int FourierVector::support_radius() const {
  int r = 0;
  for (const auto& [m, v] : coeff_) {
    int s = m.k.norm_sup();
    if (s > r) r = s;
  }
  return r;
}

double FourierVector::norm_l2() const {
  double s = 0.0;
  for (const auto& [m, v] : coeff_) s += v * v;
  return std::sqrt(s);
}

FourierVector project(const FourierVector& v, int N) {
  FourierVector out(v.dim());
  for (const auto& [m, val] : v.support())
    if (m.k.norm_sup() <= N) out.set(m, val);
  return out;
}

FourierVector flip(const FourierVector& v) {
  FourierVector out(v.dim());
  for (const auto& [m, val] : v.support()) out.set(ModeIndex{m.j, -m.k}, val);
  return out;
}

}  // namespace qtorus
