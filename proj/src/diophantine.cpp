#include "kamtori/diophantine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace kamtori {

namespace {

struct Best {
  double value = std::numeric_limits<double>::infinity();
  std::vector<int> k;
  long p = 0;
};

void validate(const std::vector<double>& omega, double sigma, long horizon) {
  const int n = static_cast<int>(omega.size());
  if (n < 1) throw std::invalid_argument("diophantine: empty frequency vector");
  if (!(sigma > n - 1))
    throw std::invalid_argument("diophantine: sigma must exceed n - 1 (got sigma = " + std::to_string(sigma) +
                                ", n = " + std::to_string(n) + ")");
  if (std::all_of(omega.begin(), omega.end(), [](double w) { return w == 0.0; }))
    throw std::invalid_argument("diophantine: zero frequency vector");
  if (horizon < 1) throw std::invalid_argument("diophantine: horizon must be at least 1");
}

// Enumerates k with k[0] = first, sum |k_i| <= horizon, canonical sign
// (first nonzero component positive), in a fixed order.
void scan_bucket(const std::vector<double>& omega, double sigma, long horizon, int first, Best& best) {
  const int n = static_cast<int>(omega.size());
  std::vector<int> k(n, 0);
  k[0] = first;
  auto visit = [&](auto&& self, int axis, long budget, bool sign_fixed) -> void {
    if (axis == n) {
      const long l1 = horizon - budget;
      if (l1 == 0) return;
      double dot = 0.0;
      for (int i = 0; i < n; ++i) dot += k[i] * omega[i];
      const double value = std::abs(dot) * std::pow(static_cast<double>(l1), sigma);
      if (value < best.value) {
        best.value = value;
        best.k = k;
        best.p = 0;
      }
      return;
    }
    const int lo = sign_fixed ? -static_cast<int>(budget) : 0;
    for (int v = lo; v <= budget; ++v) {
      k[axis] = v;
      self(self, axis + 1, budget - std::abs(v), sign_fixed || v != 0);
    }
    k[axis] = 0;
  };
  visit(visit, 1, horizon - first, first != 0);
}

Best scan(const std::vector<double>& omega, double sigma, long horizon) {
  const int n = static_cast<int>(omega.size());
  if (n == 1) {
    Best best;
    const double w = omega[0];
    for (long k = 1; k <= horizon; ++k) {
      const double kw = static_cast<double>(k) * w;
      const double p = std::nearbyint(kw);
      const double value = std::abs(kw - p) * std::pow(static_cast<double>(k), sigma);
      if (value < best.value) {
        best.value = value;
        best.k = {static_cast<int>(k)};
        best.p = static_cast<long>(p);
      }
    }
    return best;
  }
  // buckets by first component, reduced in bucket order so the result matches a sequential scan
  const int buckets = static_cast<int>(horizon) + 1;
  std::vector<Best> partial(buckets);
  const unsigned workers = std::max(1u, std::min<unsigned>(worker_count(), buckets));
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (int b = static_cast<int>(w); b < buckets; b += static_cast<int>(workers))
        scan_bucket(omega, sigma, horizon, b, partial[b]);
    });
  }
  for (auto& t : pool) t.join();
  Best best;
  for (auto& b : partial)
    if (b.value < best.value) best = b;
  return best;
}

}  // namespace

unsigned worker_count() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("KAMTORI_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1) hw = std::min<unsigned>(hw, static_cast<unsigned>(cap));
  }
  return hw;
}

DiophantineReport scan_diophantine(const std::vector<double>& omega, double sigma, long horizon) {
  validate(omega, sigma, horizon);
  const Best best = scan(omega, sigma, horizon);
  DiophantineReport r;
  r.worst_k = best.k;
  r.nearest_integer = best.p;
  r.min_value = best.value;
  r.sigma = sigma;
  r.horizon = horizon;
  r.gamma = 0.0;
  r.margin = best.value;
  r.passed = true;
  return r;
}

DiophantineReport check_diophantine(const std::vector<double>& omega, double gamma, double sigma,
                                    long horizon) {
  if (!(gamma > 0.0)) throw std::invalid_argument("diophantine: gamma must be positive");
  DiophantineReport r = scan_diophantine(omega, sigma, horizon);
  r.gamma = gamma;
  r.margin = r.min_value - gamma;
  r.passed = r.min_value >= gamma;
  return r;
}

double estimate_gamma(const std::vector<double>& omega, double sigma, long horizon) {
  return scan_diophantine(omega, sigma, horizon).min_value;
}

FrequencyVector FrequencyVector::verified(std::vector<double> omega, double gamma, double sigma, long horizon) {
  const auto r = check_diophantine(omega, gamma, sigma, horizon);
  if (!r.passed) {
    std::ostringstream os;
    os << "frequency fails the Diophantine condition at k = (";
    for (std::size_t i = 0; i < r.worst_k.size(); ++i) os << (i ? "," : "") << r.worst_k[i];
    os << "), value " << r.min_value << " < gamma " << gamma;
    throw std::invalid_argument(os.str());
  }
  return FrequencyVector{std::move(omega), gamma, sigma, horizon};
}

FrequencyVector FrequencyVector::estimated(std::vector<double> omega, double sigma, long horizon) {
  const double gamma = estimate_gamma(omega, sigma, horizon);
  if (!(gamma > 0.0)) throw std::invalid_argument("frequency is resonant within the horizon");
  return FrequencyVector{std::move(omega), gamma, sigma, horizon};
}

}  // namespace kamtori
