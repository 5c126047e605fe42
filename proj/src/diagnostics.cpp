#include "qtorus/diagnostics.hpp"

#include <cmath>
#include <random>

namespace qtorus {

namespace {

double dot_k_omega(const MultiIndex& k, const std::vector<double>& omega) {
  double s = 0.0;
  for (std::size_t i = 0; i < omega.size(); ++i) s += double(k[i]) * omega[i];
  return s;
}

// products[i] = |<k_i, omega>| * |k_i|^tau for every non-zero box point;
// the argmin scan stays serial so results do not depend on thread count.
// Ties (exact resonances) resolve to the shortest k, then canonical order.
DiophantineResult reduce_products(const std::vector<MultiIndex>& points,
                                  const std::vector<double>& products) {
  DiophantineResult res;
  std::size_t best = points.size();
  long best_l1 = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (products[i] < res.margin ||
        (products[i] == res.margin && best < points.size() &&
         points[i].norm_l1() < best_l1)) {
      res.margin = products[i];
      best = i;
      best_l1 = points[i].norm_l1();
    }
  }
  if (best < points.size()) res.worst_k = points[best];
  res.ok = res.margin >= 1.0;
  return res;
}

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

}  // namespace

DiophantineResult diophantine_check(const std::vector<double>& omega, int M_box,
                                    double tau) {
  if (M_box < 1) throw std::invalid_argument("diophantine_check: M_box must be >= 1");
  const std::vector<MultiIndex> points = box_points(2 * (M_box + 1), omega.size());
  std::vector<double> products(points.size(),
                               std::numeric_limits<double>::infinity());
  // the fork overhead beats the arithmetic on small boxes
  const bool parallel = points.size() >= 16384;
#pragma omp parallel for schedule(static) if (parallel)
  for (long long i = 0; i < (long long)points.size(); ++i) {
    const MultiIndex& k = points[std::size_t(i)];
    long l1 = k.norm_l1();
    if (l1 == 0) continue;
    products[std::size_t(i)] =
        std::fabs(dot_k_omega(k, omega)) * std::pow(double(l1), tau);
  }
  return reduce_products(points, products);
}

DiophantineResult diophantine_check_serial(const std::vector<double>& omega,
                                           int M_box, double tau) {
  if (M_box < 1) throw std::invalid_argument("diophantine_check: M_box must be >= 1");
  const std::vector<MultiIndex> points = box_points(2 * (M_box + 1), omega.size());
  std::vector<double> products(points.size(),
                               std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const MultiIndex& k = points[i];
    long l1 = k.norm_l1();
    if (l1 == 0) continue;
    products[i] = std::fabs(dot_k_omega(k, omega)) * std::pow(double(l1), tau);
  }
  return reduce_products(points, products);
}

void FrequencyDomain::validate() const {
  if (lower.empty() || lower.size() != upper.size())
    throw std::invalid_argument("frequency domain: bounds length mismatch");
  for (std::size_t i = 0; i < lower.size(); ++i)
    if (!(lower[i] <= upper[i]))
      throw std::invalid_argument("frequency domain: lower bound exceeds upper");
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::size_t kShardSize = 4096;

bool fails_diophantine(const std::vector<MultiIndex>& points,
                       const std::vector<double>& omega, double tau) {
  for (const MultiIndex& k : points) {
    long l1 = k.norm_l1();
    if (l1 == 0) continue;
    if (std::fabs(dot_k_omega(k, omega)) * std::pow(double(l1), tau) < 1.0)
      return true;
  }
  return false;
}

// failures within one shard; the substream depends only on (seed, shard)
std::size_t mc_shard_failures(const std::vector<MultiIndex>& points,
                              const FrequencyDomain& domain, double tau,
                              std::size_t count, std::uint64_t seed,
                              std::uint64_t shard) {
  std::mt19937_64 rng(splitmix64(seed ^ splitmix64(shard + 1)));
  const std::size_t n = domain.dim();
  std::vector<double> omega(n);
  std::size_t failures = 0;
  for (std::size_t s = 0; s < count; ++s) {
    for (std::size_t i = 0; i < n; ++i) {
      double u = double(rng() >> 11) * 0x1.0p-53;
      omega[i] = domain.lower[i] + u * (domain.upper[i] - domain.lower[i]);
    }
    if (fails_diophantine(points, omega, tau)) ++failures;
  }
  return failures;
}

double mc_run(const FrequencyDomain& domain, int M_box, double tau,
              std::size_t samples, std::uint64_t seed, bool parallel) {
  domain.validate();
  if (samples == 0) throw std::invalid_argument("resonant_measure_mc: samples must be >= 1");
  if (M_box < 1) throw std::invalid_argument("resonant_measure_mc: M_box must be >= 1");
  const std::vector<MultiIndex> points = box_points(2 * (M_box + 1), domain.dim());
  const std::size_t shards = (samples + kShardSize - 1) / kShardSize;
  std::vector<std::size_t> failures(shards, 0);
  if (parallel) {
#pragma omp parallel for schedule(dynamic)
    for (long long sh = 0; sh < (long long)shards; ++sh) {
      std::size_t lo = std::size_t(sh) * kShardSize;
      std::size_t count = std::min(kShardSize, samples - lo);
      failures[std::size_t(sh)] =
          mc_shard_failures(points, domain, tau, count, seed, std::uint64_t(sh));
    }
  } else {
    for (std::size_t sh = 0; sh < shards; ++sh) {
      std::size_t lo = sh * kShardSize;
      std::size_t count = std::min(kShardSize, samples - lo);
      failures[sh] = mc_shard_failures(points, domain, tau, count, seed, sh);
    }
  }
  std::size_t total = 0;
  for (std::size_t f : failures) total += f;  // reduced in shard order
  return double(total) / double(samples);
}

}  // namespace

double resonant_measure_mc(const FrequencyDomain& domain, int M_box, double tau,
                           std::size_t samples, std::uint64_t seed) {
  return mc_run(domain, M_box, tau, samples, seed, true);
}

double resonant_measure_mc_serial(const FrequencyDomain& domain, int M_box,
                                  double tau, std::size_t samples,
                                  std::uint64_t seed) {
  return mc_run(domain, M_box, tau, samples, seed, false);
}

GevreyProfile gevrey_profile(const FourierVector& zhat, double s) {
  if (!(s > 0.0 && s < 1.0))
    throw std::invalid_argument("gevrey_profile: s must lie in (0,1)");
  // ||zhat(k)||_2 over components at a fixed lattice point
  std::map<MultiIndex, double> sq;
  for (const auto& [m, v] : zhat.support()) sq[m.k] += v * v;
  GevreyProfile p;
  for (const auto& [k, v2] : sq) {
    double norm = std::sqrt(v2);
    long shell = k.norm_l1();
    auto [it, fresh] = p.shell_max.try_emplace(shell, norm);
    if (!fresh && norm > it->second) it->second = norm;
    double weighted = norm * std::exp(std::pow(double(shell), s));
    if (weighted > p.sup) p.sup = weighted;
  }
  return p;
}

namespace {

double localization_row_worst(const Matrix& inv, const ModeOrdering& order,
                              double s, double sqrtN, std::size_t r) {
  const ModeIndex& mr = order.mode(r);
  const std::size_t n = mr.k.dim();
  double worst = 0.0;
  for (std::size_t c = 0; c < order.rows(); ++c) {
    const ModeIndex& mc = order.mode(c);
    long ld = 0, ls = 0;
    for (std::size_t i = 0; i < n; ++i) {
      ld += std::labs(long(mr.k[i]) - long(mc.k[i]));
      ls += std::labs(long(mr.k[i]) + long(mc.k[i]));
    }
    double kd = double(ld), ks = double(ls);
    if (kd < sqrtN || ks < sqrtN) continue;
    double bound = std::exp(-0.5 * std::pow(kd, s)) + std::exp(-0.5 * std::pow(ks, s));
    double ratio = std::fabs(inv(r, c)) / bound;
    if (ratio > worst) worst = ratio;
  }
  return worst;
}

}  // namespace

double localization_worst_ratio(const Matrix& inv, const ModeOrdering& order,
                                double s, int N) {
  const double sqrtN = std::sqrt(double(N));
  std::vector<double> row_worst(order.rows(), 0.0);
#pragma omp parallel for schedule(static)
  for (long long r = 0; r < (long long)order.rows(); ++r)
    row_worst[std::size_t(r)] =
        localization_row_worst(inv, order, s, sqrtN, std::size_t(r));
  double worst = 0.0;
  for (double w : row_worst) worst = std::max(worst, w);
  return worst;
}

double localization_worst_ratio_serial(const Matrix& inv, const ModeOrdering& order,
                                       double s, int N) {
  const double sqrtN = std::sqrt(double(N));
  double worst = 0.0;
  for (std::size_t r = 0; r < order.rows(); ++r)
    worst = std::max(worst, localization_row_worst(inv, order, s, sqrtN, r));
  return worst;
}

DiagnosticsReport condition_report(const TangentOperator& T, double s, int N,
                                   std::size_t localization_dim_cap) {
  DiagnosticsReport rep;
  rep.log_epsilon_N = N >= 2 ? log_epsilon_threshold(N) : 0.0;
  OperatorSolver solver(T);  // NearResonance propagates
  rep.log_inverse_norm = solver.log_inverse_norm();
  rep.inversion_ok = rep.log_inverse_norm <= -rep.log_epsilon_N;
  if (T.rows() <= localization_dim_cap) {
    Matrix inv = solver.lu().inverse();
    rep.localization_worst_ratio = localization_worst_ratio(inv, *T.order, s, N);
    rep.localization_checked = true;
  } else {
    rep.localization_worst_ratio = kNan;
    rep.localization_checked = false;
  }
  return rep;
}

}  // namespace qtorus
