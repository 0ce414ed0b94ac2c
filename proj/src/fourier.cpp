#include "kamtori/fourier.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

#include "kamtori/errors.hpp"

namespace kamtori {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::size_t ipow(std::size_t base, int exp) {
  std::size_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

// The FFTW planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// In-place n-D complex DFT on an N^n array laid out with axis 0 fastest.
void dft(std::vector<cplx>& data, int n, int N, int sign) {
  std::vector<int> dims(n, N);  // equal extents, so FFTW's row-major order only relabels axes
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan = fftw_plan_dft(n, dims.data(), buf, buf, sign, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
}

}  // namespace

std::size_t GridSamples::num_points() const { return ipow(points_per_axis, dim_domain); }

std::vector<double> GridSamples::theta(std::size_t point) const {
  std::vector<double> t(dim_domain);
  for (int a = 0; a < dim_domain; ++a) {
    t[a] = static_cast<double>(point % points_per_axis) / points_per_axis;
    point /= points_per_axis;
  }
  return t;
}

double GridSamples::max_abs() const {
  double mx = 0.0;
  for (double v : values) mx = std::max(mx, std::abs(v));
  return mx;
}

FourierMap::FourierMap(int dim_domain, int dim_range, int trunc)
    : n_(dim_domain), m_(dim_range), trunc_(trunc) {
  if (dim_domain < 1 || dim_range < 1 || trunc < 0)
    throw DimensionError("FourierMap: dimensions must be positive and truncation nonnegative");
  num_modes_ = ipow(2 * trunc + 1, dim_domain);
  coeffs_.assign(num_modes_ * m_, cplx{});
}

FourierMap FourierMap::constant(int dim_domain, std::span<const double> value, int trunc) {
  FourierMap K(dim_domain, static_cast<int>(value.size()), trunc);
  std::vector<int> zero(dim_domain, 0);
  std::size_t idx = K.mode_index(zero);
  for (std::size_t c = 0; c < value.size(); ++c) K.coeff(idx, static_cast<int>(c)) = value[c];
  return K;
}

std::size_t FourierMap::mode_index(std::span<const int> k) const {
  if (static_cast<int>(k.size()) != n_) throw DimensionError("wavevector dimension mismatch");
  std::size_t idx = 0, stride = 1;
  const std::size_t N = points_per_axis();
  for (int a = 0; a < n_; ++a) {
    if (std::abs(k[a]) > trunc_) throw DimensionError("wavevector beyond truncation");
    idx += static_cast<std::size_t>(k[a] + trunc_) * stride;
    stride *= N;
  }
  return idx;
}

std::vector<int> FourierMap::wavevector(std::size_t mode) const {
  std::vector<int> k(n_);
  const std::size_t N = points_per_axis();
  for (int a = 0; a < n_; ++a) {
    k[a] = static_cast<int>(mode % N) - trunc_;
    mode /= N;
  }
  return k;
}

bool FourierMap::contains(std::span<const int> k) const {
  if (static_cast<int>(k.size()) != n_) return false;
  return std::all_of(k.begin(), k.end(), [&](int v) { return std::abs(v) <= trunc_; });
}

cplx FourierMap::mode(std::span<const int> k, int component) const {
  return coeff(mode_index(k), component);
}

void FourierMap::set_mode(std::span<const int> k, int component, cplx value) {
  std::vector<int> neg(k.begin(), k.end());
  for (int& v : neg) v = -v;
  const std::size_t i = mode_index(k), j = mode_index(neg);
  if (i == j) {
    coeff(i, component) = value.real();
  } else {
    coeff(i, component) = value;
    coeff(j, component) = std::conj(value);
  }
}

GridSamples FourierMap::synthesize() const {
  const int N = points_per_axis();
  GridSamples s{n_, m_, N, std::vector<double>(num_modes_ * m_)};
  std::vector<cplx> buf(num_modes_);
  for (int c = 0; c < m_; ++c) {
    // mode index and FFT frequency index differ by a cyclic shift of M per axis
    for (std::size_t idx = 0; idx < num_modes_; ++idx) {
      std::size_t rem = idx, f = 0, stride = 1;
      for (int a = 0; a < n_; ++a) {
        const int k = static_cast<int>(rem % N) - trunc_;
        rem /= N;
        f += static_cast<std::size_t>((k + N) % N) * stride;
        stride *= N;
      }
      buf[f] = coeff(idx, c);
    }
    dft(buf, n_, N, FFTW_BACKWARD);
    for (std::size_t j = 0; j < num_modes_; ++j) s.values[j * m_ + c] = buf[j].real();
  }
  return s;
}

std::vector<double> FourierMap::evaluate(std::span<const double> theta) const {
  if (static_cast<int>(theta.size()) != n_) throw DimensionError("evaluate: theta dimension mismatch");
  std::vector<double> out(m_, 0.0);
  for (std::size_t idx = 0; idx < num_modes_; ++idx) {
    const auto k = wavevector(idx);
    double phase = 0.0;
    for (int a = 0; a < n_; ++a) phase += k[a] * theta[a];
    const cplx e = std::polar(1.0, kTwoPi * phase);
    for (int c = 0; c < m_; ++c) out[c] += (coeff(idx, c) * e).real();
  }
  return out;
}

FourierMap FourierMap::resized(int trunc) const {
  FourierMap out(n_, m_, trunc);
  for (std::size_t idx = 0; idx < num_modes_; ++idx) {
    const auto k = wavevector(idx);
    if (!out.contains(k)) continue;
    const std::size_t j = out.mode_index(k);
    for (int c = 0; c < m_; ++c) out.coeff(j, c) = coeff(idx, c);
  }
  return out;
}

FourierMap FourierMap::components(int first, int count) const {
  if (first < 0 || count < 1 || first + count > m_) throw DimensionError("component slice out of range");
  FourierMap out(n_, count, trunc_);
  for (std::size_t idx = 0; idx < num_modes_; ++idx)
    for (int c = 0; c < count; ++c) out.coeff(idx, c) = coeff(idx, first + c);
  return out;
}

FourierMap FourierMap::partial(int axis) const {
  if (axis < 0 || axis >= n_) throw DimensionError("partial: axis out of range");
  FourierMap out(n_, m_, trunc_);
  for (std::size_t idx = 0; idx < num_modes_; ++idx) {
    const cplx factor(0.0, kTwoPi * wavevector(idx)[axis]);
    for (int c = 0; c < m_; ++c) out.coeff(idx, c) = factor * coeff(idx, c);
  }
  return out;
}

FourierMap FourierMap::shifted(std::span<const double> shift) const {
  if (static_cast<int>(shift.size()) != n_) throw DimensionError("shifted: dimension mismatch");
  FourierMap out(n_, m_, trunc_);
  for (std::size_t idx = 0; idx < num_modes_; ++idx) {
    const auto k = wavevector(idx);
    double phase = 0.0;
    for (int a = 0; a < n_; ++a) phase += k[a] * shift[a];
    const cplx e = std::polar(1.0, kTwoPi * phase);
    for (int c = 0; c < m_; ++c) out.coeff(idx, c) = e * coeff(idx, c);
  }
  out.symmetrize();
  return out;
}

void FourierMap::symmetrize() {
  // the reflection k -> -k maps mode index idx to num_modes - 1 - idx
  for (std::size_t idx = 0; idx < num_modes_; ++idx) {
    const std::size_t neg = num_modes_ - 1 - idx;
    if (neg < idx) continue;
    for (int c = 0; c < m_; ++c) {
      if (neg == idx) {
        coeff(idx, c) = coeff(idx, c).real();
      } else {
        const cplx avg = 0.5 * (coeff(idx, c) + std::conj(coeff(neg, c)));
        coeff(idx, c) = avg;
        coeff(neg, c) = std::conj(avg);
      }
    }
  }
}

FourierMap& FourierMap::operator+=(const FourierMap& other) {
  if (other.n_ != n_ || other.m_ != m_ || other.trunc_ != trunc_)
    throw DimensionError("FourierMap sum: shape mismatch");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
  return *this;
}

FourierMap& FourierMap::operator-=(const FourierMap& other) {
  if (other.n_ != n_ || other.m_ != m_ || other.trunc_ != trunc_)
    throw DimensionError("FourierMap difference: shape mismatch");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
  return *this;
}

FourierMap& FourierMap::operator*=(double s) {
  for (auto& c : coeffs_) c *= s;
  return *this;
}

FourierMap operator+(FourierMap a, const FourierMap& b) { return a += b; }
FourierMap operator-(FourierMap a, const FourierMap& b) { return a -= b; }
FourierMap operator*(double s, FourierMap a) { return a *= s; }

FourierMap analyze(const GridSamples& samples) {
  const int n = samples.dim_domain, m = samples.dim_range, N = samples.points_per_axis;
  if (n < 1 || m < 1) throw DimensionError("analyze: empty grid");
  if (N < 1 || N % 2 == 0) throw DimensionError("analyze: grid size per axis must be odd");
  const std::size_t P = ipow(N, n);
  if (samples.values.size() != P * static_cast<std::size_t>(m))
    throw DimensionError("analyze: sample count does not match (2M+1)^n * m");
  const int M = (N - 1) / 2;
  FourierMap K(n, m, M);
  std::vector<cplx> buf(P);
  const double scale = 1.0 / static_cast<double>(P);
  for (int c = 0; c < m; ++c) {
    for (std::size_t j = 0; j < P; ++j) buf[j] = samples.values[j * m + c];
    dft(buf, n, N, FFTW_FORWARD);
    for (std::size_t f = 0; f < P; ++f) {
      std::size_t rem = f, idx = 0, stride = 1;
      for (int a = 0; a < n; ++a) {
        int k = static_cast<int>(rem % N);
        rem /= N;
        if (k > M) k -= N;
        idx += static_cast<std::size_t>(k + M) * stride;
        stride *= N;
      }
      K.coeff(idx, c) = buf[f] * scale;
    }
  }
  K.symmetrize();
  return K;
}

FourierMap directional_derivative(const FourierMap& K, std::span<const double> omega) {
  if (static_cast<int>(omega.size()) != K.dim_domain())
    throw DimensionError("directional_derivative: frequency dimension mismatch");
  FourierMap out(K.dim_domain(), K.dim_range(), K.trunc());
  for (std::size_t idx = 0; idx < K.num_modes(); ++idx) {
    const auto k = K.wavevector(idx);
    double kw = 0.0;
    for (int a = 0; a < K.dim_domain(); ++a) kw += k[a] * omega[a];
    const cplx factor(0.0, kTwoPi * kw);
    const bool zero_mode = std::all_of(k.begin(), k.end(), [](int v) { return v == 0; });
    for (int c = 0; c < K.dim_range(); ++c)
      out.coeff(idx, c) = zero_mode ? cplx{} : factor * K.coeff(idx, c);
  }
  return out;
}

std::vector<double> average(const FourierMap& K) {
  std::vector<int> zero(K.dim_domain(), 0);
  const std::size_t idx = K.mode_index(zero);
  std::vector<double> out(K.dim_range());
  for (int c = 0; c < K.dim_range(); ++c) out[c] = K.coeff(idx, c).real();
  return out;
}

StripNormEstimate strip_norm(const FourierMap& K, double rho) {
  if (rho < 0.0) throw std::invalid_argument("strip_norm: rho must be nonnegative");
  std::vector<double> total(K.dim_range(), 0.0), tail(K.dim_range(), 0.0);
  const int half = K.trunc() / 2;
  for (std::size_t idx = 0; idx < K.num_modes(); ++idx) {
    const auto k = K.wavevector(idx);
    int l1 = 0, linf = 0;
    for (int v : k) {
      l1 += std::abs(v);
      linf = std::max(linf, std::abs(v));
    }
    const double w = std::exp(kTwoPi * l1 * rho);
    for (int c = 0; c < K.dim_range(); ++c) {
      const double t = std::abs(K.coeff(idx, c)) * w;
      total[c] += t;
      if (linf > half) tail[c] += t;
    }
  }
  StripNormEstimate est{rho, 0.0, false};
  for (int c = 0; c < K.dim_range(); ++c) {
    est.value = std::max(est.value, total[c]);
    if (total[c] > 0.0 && tail[c] > 1e-10 * total[c]) est.tail_flag = true;
  }
  return est;
}

double matrix_strip_norm(const FourierMap& K, int rows, int cols, double rho) {
  if (rows * cols != K.dim_range()) throw DimensionError("matrix_strip_norm: shape mismatch");
  double best = 0.0;
  for (int i = 0; i < rows; ++i) {
    double row = 0.0;
    for (int j = 0; j < cols; ++j) row += strip_norm(K.components(i * cols + j, 1), rho).value;
    best = std::max(best, row);
  }
  return best;
}

}  // namespace kamtori
