// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sodkit Authors

#pragma once

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "sodkit/error.hpp"

namespace sodkit {

/// H x W x C real feature map, row-major, channel-last.
class FeatureTensor {
 public:
  FeatureTensor() = default;
  FeatureTensor(std::size_t h, std::size_t w, std::size_t c, double fill = 0.0)
      : h_(h), w_(w), c_(c), data_(h * w * c, fill) {
    if (h == 0 || w == 0 || c == 0) throw ConfigError("feature tensor dimensions must be >= 1");
  }
  FeatureTensor(std::size_t h, std::size_t w, std::size_t c, std::vector<double> data)
      : h_(h), w_(w), c_(c), data_(std::move(data)) {
    if (h == 0 || w == 0 || c == 0) throw ConfigError("feature tensor dimensions must be >= 1");
    if (data_.size() != h * w * c) throw ConfigError("feature tensor data size mismatch");
  }

  std::size_t height() const noexcept { return h_; }
  std::size_t width() const noexcept { return w_; }
  std::size_t channels() const noexcept { return c_; }
  std::size_t size() const noexcept { return data_.size(); }

  double& at(std::size_t i, std::size_t j, std::size_t k) noexcept {
    return data_[(i * w_ + j) * c_ + k];
  }
  double at(std::size_t i, std::size_t j, std::size_t k) const noexcept {
    return data_[(i * w_ + j) * c_ + k];
  }
  std::vector<double>& data() noexcept { return data_; }
  const std::vector<double>& data() const noexcept { return data_; }

  friend bool operator==(const FeatureTensor&, const FeatureTensor&) = default;

 private:
  std::size_t h_ = 0, w_ = 0, c_ = 0;
  std::vector<double> data_;
};

/// Complex spectrum with the zero-frequency bin at (H/2, W/2) (integer halves).
struct Spectrum {
  std::size_t h = 0, w = 0, c = 0;
  std::vector<std::complex<double>> data;

  std::complex<double>& at(std::size_t i, std::size_t j, std::size_t k) noexcept {
    return data[(i * w + j) * c + k];
  }
  const std::complex<double>& at(std::size_t i, std::size_t j, std::size_t k) const noexcept {
    return data[(i * w + j) * c + k];
  }
};

/// Binary H x W spectral mask, same centering as Spectrum.
struct FreqMask {
  std::size_t h = 0, w = 0;
  std::vector<std::uint8_t> data;

  std::uint8_t at(std::size_t i, std::size_t j) const noexcept { return data[i * w + j]; }
  std::size_t zeros() const noexcept {
    return static_cast<std::size_t>(std::count(data.begin(), data.end(), std::uint8_t{0}));
  }
  friend bool operator==(const FreqMask&, const FreqMask&) = default;
};

/// Hierarchical purification settings: levels l < relay_level are filtered
/// with strength intensity * (relay_level - l) / relay_level, and the filtered
/// branch is added back with weight `weight`.
struct HfpConfig {
  int relay_level = 2;
  double intensity = 0.05;
  double weight = 0.3;

  friend bool operator==(const HfpConfig&, const HfpConfig&) = default;
};

inline void validate(const HfpConfig& cfg) {
  if (cfg.relay_level < 0) throw ConfigError("hfp: relay level must be >= 0");
  if (!(cfg.intensity >= 0.0 && cfg.intensity <= 1.0)) throw ConfigError("hfp: intensity must lie in [0, 1]");
  if (!(cfg.weight >= 0.0) || !std::isfinite(cfg.weight)) throw ConfigError("hfp: weight must be >= 0");
}

/// Cutoffs for the low/high frequency split of RoI features.
struct BandSplitConfig {
  double low_cutoff = 0.85;
  double high_cutoff = 0.10;

  friend bool operator==(const BandSplitConfig&, const BandSplitConfig&) = default;
};

/// Max-abs imaginary residue tolerated by ifft2_centered, relative to
/// max(1, max |real part|).
inline constexpr double kImagResidueTolerance = 1e-5;

namespace detail {

// FFTW planning is not thread-safe; execution on distinct buffers is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

/// Unnormalized 2D DFT over every channel of an interleaved H x W x C buffer.
inline void fft2_inplace(std::vector<std::complex<double>>& buf, std::size_t h, std::size_t w,
                         std::size_t c, int sign) {
  const int dims[2] = {static_cast<int>(h), static_cast<int>(w)};
  const int stride = static_cast<int>(c);
  auto* ptr = reinterpret_cast<fftw_complex*>(buf.data());
  fftw_plan plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan = fftw_plan_many_dft(2, dims, static_cast<int>(c), ptr, nullptr, stride, 1, ptr, nullptr,
                              stride, 1, sign, FFTW_ESTIMATE);
  }
  if (plan == nullptr) throw NumericError("fftw failed to create a plan");
  fftw_execute(plan);
  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
}

inline std::size_t centered(std::size_t k, std::size_t n) noexcept { return (k + n / 2) % n; }
inline std::size_t uncentered(std::size_t k, std::size_t n) noexcept {
  return (k + n - n / 2) % n;
}

inline bool inside_band(std::size_t i, std::size_t j, std::size_t h, std::size_t w,
                        double fraction) noexcept {
  const double di = std::abs(static_cast<double>(i) - static_cast<double>(h / 2));
  const double dj = std::abs(static_cast<double>(j) - static_cast<double>(w / 2));
  return di <= fraction * static_cast<double>(h) / 2.0 &&
         dj <= fraction * static_cast<double>(w) / 2.0;
}

}  // namespace detail

/// Per-channel unnormalized forward DFT, shifted so DC sits at (H/2, W/2).
inline Spectrum fft2_centered(const FeatureTensor& x) {
  const std::size_t h = x.height(), w = x.width(), c = x.channels();
  std::vector<std::complex<double>> buf(x.data().begin(), x.data().end());
  detail::fft2_inplace(buf, h, w, c, FFTW_FORWARD);

  Spectrum s{h, w, c, std::vector<std::complex<double>>(buf.size())};
  for (std::size_t i = 0; i < h; ++i) {
    const std::size_t ci = detail::centered(i, h);
    for (std::size_t j = 0; j < w; ++j) {
      const std::size_t cj = detail::centered(j, w);
      for (std::size_t k = 0; k < c; ++k) s.at(ci, cj, k) = buf[(i * w + j) * c + k];
    }
  }
  return s;
}

/// Inverse of fft2_centered (carries the 1/(H*W) factor). Throws NumericError
/// when the imaginary residue exceeds kImagResidueTolerance, which means the
/// spectrum was not conjugate-symmetric.
inline FeatureTensor ifft2_centered(const Spectrum& s) {
  const std::size_t h = s.h, w = s.w, c = s.c;
  if (h == 0 || w == 0 || c == 0 || s.data.size() != h * w * c) {
    throw ConfigError("spectrum dimensions do not match its data");
  }
  std::vector<std::complex<double>> buf(s.data.size());
  for (std::size_t i = 0; i < h; ++i) {
    const std::size_t ui = detail::uncentered(i, h);
    for (std::size_t j = 0; j < w; ++j) {
      const std::size_t uj = detail::uncentered(j, w);
      for (std::size_t k = 0; k < c; ++k) buf[(ui * w + uj) * c + k] = s.at(i, j, k);
    }
  }
  detail::fft2_inplace(buf, h, w, c, FFTW_BACKWARD);

  const double scale = 1.0 / static_cast<double>(h * w);
  std::vector<double> real(buf.size());
  double max_imag = 0.0, max_real = 0.0;
  for (std::size_t n = 0; n < buf.size(); ++n) {
    real[n] = buf[n].real() * scale;
    max_real = std::max(max_real, std::abs(real[n]));
    max_imag = std::max(max_imag, std::abs(buf[n].imag() * scale));
  }
  if (max_imag > kImagResidueTolerance * std::max(1.0, max_real)) {
    throw NumericError("inverse FFT left an imaginary residue of " + std::to_string(max_imag) +
                       "; the applied mask is not point-symmetric");
  }
  return FeatureTensor(h, w, c, std::move(real));
}

/// Applies `mask` to every channel of `s`.
inline Spectrum apply_mask(Spectrum s, const FreqMask& mask) {
  if (mask.h != s.h || mask.w != s.w) throw ConfigError("mask shape does not match spectrum");
  for (std::size_t i = 0; i < s.h; ++i)
    for (std::size_t j = 0; j < s.w; ++j)
      if (mask.at(i, j) == 0)
        for (std::size_t k = 0; k < s.c; ++k) s.at(i, j, k) = {0.0, 0.0};
  return s;
}

/// IFFT(mask * FFT(x)).
inline FeatureTensor filter(const FeatureTensor& x, const FreqMask& mask) {
  return ifft2_centered(apply_mask(fft2_centered(x), mask));
}

/// Filtering strength at pyramid level `level`: intensity * (r - level) / r.
inline double hfp_strength(int level, const HfpConfig& cfg) {
  validate(cfg);
  if (level < 0 || level >= cfg.relay_level) {
    throw ConfigError("hfp applies to levels 0 <= l < r; got l=" + std::to_string(level) +
                      ", r=" + std::to_string(cfg.relay_level));
  }
  return cfg.intensity * static_cast<double>(cfg.relay_level - level) /
         static_cast<double>(cfg.relay_level);
}

/// Highpass mask removing the central block |i - H/2| <= K*H/2,
/// |j - W/2| <= K*W/2, with K from hfp_strength(). K = 0 still removes DC.
inline FreqMask build_hfp_mask(std::size_t h, std::size_t w, int level, const HfpConfig& cfg) {
  if (h == 0 || w == 0) throw ConfigError("mask dimensions must be >= 1");
  const double k = hfp_strength(level, cfg);
  FreqMask m{h, w, std::vector<std::uint8_t>(h * w, 1)};
  for (std::size_t i = 0; i < h; ++i)
    for (std::size_t j = 0; j < w; ++j)
      if (detail::inside_band(i, j, h, w, k)) m.data[i * w + j] = 0;
  return m;
}

enum class BandKind { lowpass, highpass };

/// Square band mask: lowpass keeps the central block of half-extent
/// cutoff * (H/2, W/2); highpass is its complement.
inline FreqMask build_band_mask(std::size_t h, std::size_t w, double cutoff, BandKind kind) {
  if (h == 0 || w == 0) throw ConfigError("mask dimensions must be >= 1");
  if (!(cutoff >= 0.0 && cutoff <= 1.0)) throw ConfigError("cutoff must lie in [0, 1]");
  FreqMask m{h, w, std::vector<std::uint8_t>(h * w, 0)};
  for (std::size_t i = 0; i < h; ++i) {
    for (std::size_t j = 0; j < w; ++j) {
      const bool in = detail::inside_band(i, j, h, w, cutoff);
      m.data[i * w + j] = static_cast<std::uint8_t>(kind == BandKind::lowpass ? in : !in);
    }
  }
  return m;
}

/// Residual purification: IFFT(mask * FFT(x)) * weight + x.
inline FeatureTensor purify(const FeatureTensor& x, const FreqMask& mask, double weight) {
  FeatureTensor out = filter(x, mask);
  auto& d = out.data();
  const auto& src = x.data();
  for (std::size_t n = 0; n < d.size(); ++n) d[n] = d[n] * weight + src[n];
  return out;
}

inline FeatureTensor hfp_purify(const FeatureTensor& x, int level, const HfpConfig& cfg = {}) {
  return purify(x, build_hfp_mask(x.height(), x.width(), level, cfg), cfg.weight);
}

/// Low- and high-frequency components of an RoI feature map.
inline std::pair<FeatureTensor, FeatureTensor> fd_split(const FeatureTensor& roi,
                                                        const BandSplitConfig& cfg = {}) {
  const Spectrum s = fft2_centered(roi);
  const auto low = build_band_mask(roi.height(), roi.width(), cfg.low_cutoff, BandKind::lowpass);
  const auto high = build_band_mask(roi.height(), roi.width(), cfg.high_cutoff, BandKind::highpass);
  return {ifft2_centered(apply_mask(s, low)), ifft2_centered(apply_mask(s, high))};
}

/// Mask as a single-channel tensor of 0/1 values.
inline FeatureTensor mask_to_tensor(const FreqMask& m) {
  std::vector<double> v(m.data.begin(), m.data.end());
  return FeatureTensor(m.h, m.w, 1, std::move(v));
}

}  // namespace sodkit
