#pragma once

// Separable periodized 3-D discrete wavelet transform, the wavelet
// Earthmover (WEMD) scale weighting, hard thresholding and sparse l1
// distances between coefficient vectors.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <memory>
#include <numeric>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "normlap/error.hpp"

namespace normlap {

using Dims3 = std::array<std::size_t, 3>;

/// Dense 3-D density grid, stored x-slowest / z-fastest.
struct Volume {
  Dims3 dims{0, 0, 0};
  std::vector<double> voxels;
  double voxel_size = 1.0;

  static Volume zeros(std::size_t nx, std::size_t ny, std::size_t nz, double voxel_size = 1.0) {
    Volume v;
    v.dims = {nx, ny, nz};
    v.voxels.assign(nx * ny * nz, 0.0);
    v.voxel_size = voxel_size;
    return v;
  }

  std::size_t size() const { return dims[0] * dims[1] * dims[2]; }
  std::size_t index(std::size_t i, std::size_t j, std::size_t k) const {
    return (i * dims[1] + j) * dims[2] + k;
  }
  double& at(std::size_t i, std::size_t j, std::size_t k) { return voxels[index(i, j, k)]; }
  double at(std::size_t i, std::size_t j, std::size_t k) const { return voxels[index(i, j, k)]; }
};

inline void validate(const Volume& v) {
  detail::require(v.dims[0] > 0 && v.dims[1] > 0 && v.dims[2] > 0, "volume: dims must be positive");
  detail::require(v.voxels.size() == v.size(), "volume: voxel count does not match dims");
  detail::require(std::isfinite(v.voxel_size) && v.voxel_size > 0.0,
                  "volume: voxel_size must be positive");
  for (double x : v.voxels) detail::require(std::isfinite(x), "volume: non-finite voxel value");
}

enum class Wavelet { haar, sym3 };

inline std::string to_string(Wavelet w) { return w == Wavelet::haar ? "haar" : "sym3"; }

inline Wavelet parse_wavelet(const std::string& name) {
  if (name == "haar") return Wavelet::haar;
  if (name == "sym3") return Wavelet::sym3;
  throw InvalidArgument("unknown wavelet '" + name + "' (expected haar or sym3)");
}

struct FilterBank {
  std::vector<double> lo;
  std::vector<double> hi;
};

namespace detail {

inline FilterBank make_qmf(std::vector<double> lo) {
  const std::size_t n = lo.size();
  std::vector<double> hi(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double s = (j % 2 == 0) ? 1.0 : -1.0;
    hi[j] = s * lo[n - 1 - j];
  }
  return {std::move(lo), std::move(hi)};
}

}  // namespace detail

// Orthonormal analysis low-pass filters; the high-pass filter is the
// quadrature mirror hi[j] = (-1)^j lo[L-1-j].
inline constexpr std::array<double, 6> kSym3LowPass = {
    0.035226291882100656, -0.08544127388224149, -0.13501102001039084,
    0.4598775021193313,   0.8068915093133388,   0.3326705529509569};

inline const FilterBank& filter_bank(Wavelet w) {
  static const FilterBank haar = detail::make_qmf({M_SQRT1_2, M_SQRT1_2});
  static const FilterBank sym3 =
      detail::make_qmf(std::vector<double>(kSym3LowPass.begin(), kSym3LowPass.end()));
  return w == Wavelet::haar ? haar : sym3;
}

/// Subband tag: bit 2 = high-pass along x, bit 1 = along y, bit 0 = along z.
/// Tag 0 is the approximation (LLL) band, which exists only at the coarsest level.
struct BandInfo {
  std::size_t offset = 0;
  Dims3 dims{0, 0, 0};
  int level = 0;  // 1 = finest detail level, `levels` = coarsest
  std::uint8_t subband = 0;

  std::size_t size() const { return dims[0] * dims[1] * dims[2]; }
  bool operator==(const BandInfo&) const = default;
};

struct CoeffIndex {
  int level = 0;
  std::uint8_t subband = 0;
  Dims3 shift{0, 0, 0};
  bool operator==(const CoeffIndex&) const = default;
};

/// Where every coefficient of a multilevel transform lives in the flat
/// coefficient vector: approximation band first, then the seven detail bands
/// of each level from coarsest to finest.
struct CoeffLayout {
  Dims3 source_dims{0, 0, 0};
  Dims3 padded_dims{0, 0, 0};
  int levels = 0;
  Wavelet wavelet = Wavelet::haar;
  std::vector<BandInfo> bands;

  std::size_t size() const { return padded_dims[0] * padded_dims[1] * padded_dims[2]; }
  bool operator==(const CoeffLayout&) const = default;

  static int max_levels(const Dims3& dims) {
    const std::size_t m = std::min({dims[0], dims[1], dims[2]});
    int l = 0;
    while ((std::size_t{2} << l) <= m) ++l;
    return l;
  }

  static CoeffLayout make(const Dims3& source, Wavelet wavelet, int levels) {
    detail::require(source[0] > 0 && source[1] > 0 && source[2] > 0, "dwt3: empty volume");
    detail::require(levels >= 1, "dwt3: levels must be positive");
    const int max_l = max_levels(source);
    if (levels > max_l) {
      throw InvalidArgument("dwt3: levels=" + std::to_string(levels) +
                            " too deep for dims; max feasible levels is " + std::to_string(max_l));
    }
    CoeffLayout lay;
    lay.source_dims = source;
    lay.levels = levels;
    lay.wavelet = wavelet;
    const std::size_t block = std::size_t{1} << levels;
    for (int a = 0; a < 3; ++a) lay.padded_dims[a] = (source[a] + block - 1) / block * block;

    std::size_t offset = 0;
    auto dims_at = [&](int level) {
      return Dims3{lay.padded_dims[0] >> level, lay.padded_dims[1] >> level,
                   lay.padded_dims[2] >> level};
    };
    BandInfo approx{offset, dims_at(levels), levels, 0};
    lay.bands.push_back(approx);
    offset += approx.size();
    for (int level = levels; level >= 1; --level) {
      for (std::uint8_t sb = 1; sb < 8; ++sb) {
        BandInfo b{offset, dims_at(level), level, sb};
        lay.bands.push_back(b);
        offset += b.size();
      }
    }
    return lay;
  }

  CoeffIndex locate(std::size_t flat) const {
    detail::require(flat < size(), "coefficient index out of range");
    auto it = std::upper_bound(bands.begin(), bands.end(), flat,
                               [](std::size_t f, const BandInfo& b) { return f < b.offset; });
    const BandInfo& b = *std::prev(it);
    std::size_t r = flat - b.offset;
    CoeffIndex idx{b.level, b.subband, {}};
    idx.shift[2] = r % b.dims[2];
    r /= b.dims[2];
    idx.shift[1] = r % b.dims[1];
    idx.shift[0] = r / b.dims[1];
    return idx;
  }

  std::size_t flat_index(const CoeffIndex& idx) const {
    for (const BandInfo& b : bands) {
      if (b.level == idx.level && b.subband == idx.subband) {
        for (int a = 0; a < 3; ++a) {
          detail::require(idx.shift[a] < b.dims[a], "coefficient shift outside subband grid");
        }
        return b.offset + (idx.shift[0] * b.dims[1] + idx.shift[1]) * b.dims[2] + idx.shift[2];
      }
    }
    throw InvalidArgument("no such subband at this level");
  }
};

/// Direction of the WEMD scale index s. With fine_is_zero the finest detail
/// level has s = 0 and the approximation band s = levels; with coarse_is_zero
/// the coarsest detail level and the approximation band have s = 0.
enum class ScaleOrder { fine_is_zero, coarse_is_zero };

inline std::string to_string(ScaleOrder o) {
  return o == ScaleOrder::fine_is_zero ? "fine_is_zero" : "coarse_is_zero";
}

struct WemdOptions {
  double exponent = 2.5;
  ScaleOrder order = ScaleOrder::coarse_is_zero;
  bool operator==(const WemdOptions&) const = default;
};

inline int scale_index(const BandInfo& band, int levels, ScaleOrder order) {
  if (order == ScaleOrder::fine_is_zero) return band.subband == 0 ? levels : band.level - 1;
  return band.subband == 0 ? 0 : levels - band.level;
}

/// 2^{-exponent * s}
inline double wemd_scale_weight(int s, double exponent = 2.5) {
  detail::require(s >= 0, "wemd weight: negative scale index");
  return std::exp2(-exponent * static_cast<double>(s));
}

struct WaveletCoeffs {
  std::shared_ptr<const CoeffLayout> layout;
  std::vector<double> values;
  bool weighted = false;
  WemdOptions wemd;  // meaningful only when weighted

  std::size_t size() const { return values.size(); }
  double at(const CoeffIndex& idx) const { return values[layout->flat_index(idx)]; }
  double& at(const CoeffIndex& idx) { return values[layout->flat_index(idx)]; }
};

/// Sparse coefficient vector: strictly increasing flat indices with their values.
struct SparseCoeffs {
  std::shared_ptr<const CoeffLayout> layout;
  bool weighted = false;
  WemdOptions wemd;
  std::vector<std::uint32_t> index;
  std::vector<double> value;

  std::size_t nnz() const { return index.size(); }
};

namespace detail {

// One level of periodized analysis along a strided line of even length n.
inline void analyze_line(const FilterBank& fb, const double* in, std::size_t n, double* lo,
                         double* hi) {
  const std::size_t taps = fb.lo.size();
  const std::size_t half = n / 2;
  for (std::size_t k = 0; k < half; ++k) {
    double a = 0.0, d = 0.0;
    for (std::size_t j = 0; j < taps; ++j) {
      const double x = in[(2 * k + j) % n];
      a += fb.lo[j] * x;
      d += fb.hi[j] * x;
    }
    lo[k] = a;
    hi[k] = d;
  }
}

inline void synthesize_line(const FilterBank& fb, const double* lo, const double* hi,
                            std::size_t n, double* out) {
  const std::size_t taps = fb.lo.size();
  std::fill(out, out + n, 0.0);
  for (std::size_t k = 0; k < n / 2; ++k) {
    for (std::size_t j = 0; j < taps; ++j) {
      out[(2 * k + j) % n] += fb.lo[j] * lo[k] + fb.hi[j] * hi[k];
    }
  }
}

// Applies a line transform along `axis` of a dims-shaped block, in place.
// Forward: each line becomes [lowpass half | highpass half].
inline void transform_axis(const FilterBank& fb, std::vector<double>& block, const Dims3& dims,
                           int axis, bool forward) {
  const std::size_t n = dims[axis];
  const std::size_t stride = axis == 2 ? 1 : (axis == 1 ? dims[2] : dims[1] * dims[2]);
  std::vector<double> line(n), out(n);
  const std::size_t total = dims[0] * dims[1] * dims[2];
  for (std::size_t base = 0; base < total; ++base) {
    // base enumerates line starts: those with coordinate 0 along `axis`.
    if ((base / stride) % n != 0) continue;
    for (std::size_t t = 0; t < n; ++t) line[t] = block[base + t * stride];
    if (forward) {
      analyze_line(fb, line.data(), n, out.data(), out.data() + n / 2);
    } else {
      synthesize_line(fb, line.data(), line.data() + n / 2, n, out.data());
    }
    for (std::size_t t = 0; t < n; ++t) block[base + t * stride] = out[t];
  }
}

inline std::size_t octant_offset(const Dims3& dims, std::uint8_t sb, std::size_t i, std::size_t j,
                                 std::size_t k) {
  const std::size_t hx = dims[0] / 2, hy = dims[1] / 2, hz = dims[2] / 2;
  const std::size_t x = i + ((sb & 4) ? hx : 0);
  const std::size_t y = j + ((sb & 2) ? hy : 0);
  const std::size_t z = k + ((sb & 1) ? hz : 0);
  return (x * dims[1] + y) * dims[2] + z;
}

}  // namespace detail

/// Multilevel separable 3-D DWT with periodic boundary handling. Volumes
/// whose dims are not multiples of 2^levels are zero-padded first.
inline WaveletCoeffs dwt3(const Volume& volume, Wavelet wavelet, int levels) {
  validate(volume);
  auto layout = std::make_shared<CoeffLayout>(CoeffLayout::make(volume.dims, wavelet, levels));
  const FilterBank& fb = filter_bank(wavelet);

  Dims3 dims = layout->padded_dims;
  std::vector<double> block(layout->size(), 0.0);
  for (std::size_t i = 0; i < volume.dims[0]; ++i)
    for (std::size_t j = 0; j < volume.dims[1]; ++j)
      for (std::size_t k = 0; k < volume.dims[2]; ++k)
        block[(i * dims[1] + j) * dims[2] + k] = volume.at(i, j, k);

  WaveletCoeffs out;
  out.values.assign(layout->size(), 0.0);
  for (int level = 1; level <= levels; ++level) {
    for (int axis = 2; axis >= 0; --axis) detail::transform_axis(fb, block, dims, axis, true);
    const Dims3 half{dims[0] / 2, dims[1] / 2, dims[2] / 2};
    for (const BandInfo& b : layout->bands) {
      if (b.level != level) continue;
      std::size_t p = b.offset;
      for (std::size_t i = 0; i < half[0]; ++i)
        for (std::size_t j = 0; j < half[1]; ++j)
          for (std::size_t k = 0; k < half[2]; ++k)
            out.values[p++] = block[detail::octant_offset(dims, b.subband, i, j, k)];
    }
    std::vector<double> next(half[0] * half[1] * half[2]);
    std::size_t p = 0;
    for (std::size_t i = 0; i < half[0]; ++i)
      for (std::size_t j = 0; j < half[1]; ++j)
        for (std::size_t k = 0; k < half[2]; ++k) next[p++] = block[detail::octant_offset(dims, 0, i, j, k)];
    block = std::move(next);
    dims = half;
  }
  std::copy(block.begin(), block.end(), out.values.begin() + layout->bands.front().offset);
  out.layout = std::move(layout);
  return out;
}

inline Volume idwt3(const WaveletCoeffs& coeffs, double voxel_size = 1.0) {
  if (coeffs.weighted) throw InvalidArgument("idwt3: cannot invert weighted coefficients");
  detail::require(coeffs.layout != nullptr, "idwt3: missing layout");
  const CoeffLayout& lay = *coeffs.layout;
  detail::require(coeffs.values.size() == lay.size(), "idwt3: coefficient count mismatch");
  const FilterBank& fb = filter_bank(lay.wavelet);

  const BandInfo& approx = lay.bands.front();
  Dims3 dims = approx.dims;
  std::vector<double> block(coeffs.values.begin() + approx.offset,
                            coeffs.values.begin() + approx.offset + approx.size());
  for (int level = lay.levels; level >= 1; --level) {
    const Dims3 full{dims[0] * 2, dims[1] * 2, dims[2] * 2};
    std::vector<double> big(full[0] * full[1] * full[2], 0.0);
    std::size_t p = 0;
    for (std::size_t i = 0; i < dims[0]; ++i)
      for (std::size_t j = 0; j < dims[1]; ++j)
        for (std::size_t k = 0; k < dims[2]; ++k) big[detail::octant_offset(full, 0, i, j, k)] = block[p++];
    for (const BandInfo& b : lay.bands) {
      if (b.level != level || b.subband == 0) continue;
      std::size_t q = b.offset;
      for (std::size_t i = 0; i < dims[0]; ++i)
        for (std::size_t j = 0; j < dims[1]; ++j)
          for (std::size_t k = 0; k < dims[2]; ++k)
            big[detail::octant_offset(full, b.subband, i, j, k)] = coeffs.values[q++];
    }
    for (int axis = 0; axis < 3; ++axis) detail::transform_axis(fb, big, full, axis, false);
    block = std::move(big);
    dims = full;
  }

  Volume v = Volume::zeros(lay.source_dims[0], lay.source_dims[1], lay.source_dims[2], voxel_size);
  for (std::size_t i = 0; i < v.dims[0]; ++i)
    for (std::size_t j = 0; j < v.dims[1]; ++j)
      for (std::size_t k = 0; k < v.dims[2]; ++k) v.at(i, j, k) = block[(i * dims[1] + j) * dims[2] + k];
  return v;
}

/// Multiplies every coefficient at scale index s by 2^{-exponent * s}.
inline WaveletCoeffs wemd_weight(const WaveletCoeffs& coeffs, const WemdOptions& opts = {}) {
  if (coeffs.weighted) throw InvalidArgument("wemd_weight: coefficients already weighted");
  detail::require(coeffs.layout != nullptr, "wemd_weight: missing layout");
  WaveletCoeffs out = coeffs;
  for (const BandInfo& b : coeffs.layout->bands) {
    const double w = wemd_scale_weight(scale_index(b, coeffs.layout->levels, opts.order), opts.exponent);
    for (std::size_t p = b.offset; p < b.offset + b.size(); ++p) out.values[p] *= w;
  }
  out.weighted = true;
  out.wemd = opts;
  return out;
}

/// Keeps the entries with |value| > t (strictly); zeros are always dropped.
inline SparseCoeffs hard_threshold(const WaveletCoeffs& coeffs, double t) {
  detail::require(t >= 0.0, "hard_threshold: t must be nonnegative");
  SparseCoeffs s;
  s.layout = coeffs.layout;
  s.weighted = coeffs.weighted;
  s.wemd = coeffs.wemd;
  for (std::size_t i = 0; i < coeffs.values.size(); ++i) {
    const double v = coeffs.values[i];
    if (std::abs(v) > t && v != 0.0) {
      s.index.push_back(static_cast<std::uint32_t>(i));
      s.value.push_back(v);
    }
  }
  return s;
}

inline SparseCoeffs to_sparse(const WaveletCoeffs& coeffs) { return hard_threshold(coeffs, 0.0); }

namespace detail {

// Largest magnitude threshold keeping at least `fraction` of the l1 mass of
// the given magnitudes (destroys the input order).
inline double threshold_for_mass(std::vector<double>& mags, double fraction) {
  detail::require(!mags.empty(), "select_threshold: empty coefficients");
  detail::require(fraction > 0.0 && fraction <= 1.0, "select_threshold: fraction must be in (0,1]");
  std::sort(mags.begin(), mags.end(), std::greater<>());
  long double total = 0.0L;
  for (double m : mags) total += m;
  if (fraction >= 1.0 || total == 0.0L) return 0.0;
  const long double target = static_cast<long double>(fraction) * total;
  long double prefix = 0.0L;
  std::size_t k = 0;
  while (k < mags.size() && prefix < target) prefix += mags[k++];
  if (k >= mags.size()) return 0.0;
  const double last_kept = mags[k - 1];
  auto it = std::upper_bound(mags.begin() + static_cast<std::ptrdiff_t>(k), mags.end(), last_kept,
                             std::greater<>());
  while (it != mags.end() && *it >= last_kept) ++it;
  return it == mags.end() ? 0.0 : *it;
}

}  // namespace detail

/// Largest threshold t (up to ties) such that the entries with |value| > t
/// keep at least `mass_fraction` of the original weighted l1 mass.
inline double select_threshold(std::span<const WaveletCoeffs> dataset, double mass_fraction) {
  std::vector<double> mags;
  for (const auto& c : dataset) {
    detail::require(c.weighted, "select_threshold: coefficients must be WEMD-weighted");
    for (double v : c.values) mags.push_back(std::abs(v));
  }
  return detail::threshold_for_mass(mags, mass_fraction);
}

inline double select_threshold(const WaveletCoeffs& coeffs, double mass_fraction) {
  return select_threshold(std::span<const WaveletCoeffs>(&coeffs, 1), mass_fraction);
}

namespace detail {

inline void check_compatible(const CoeffLayout* a, const CoeffLayout* b, bool wa, bool wb,
                             const WemdOptions& oa, const WemdOptions& ob) {
  if (a == nullptr || b == nullptr || !(a == b || *a == *b)) {
    throw InvalidArgument("l1 distance: transform metadata mismatch");
  }
  if (!wa || !wb) throw InvalidArgument("l1 distance: coefficients must be WEMD-weighted");
  if (!(oa == ob)) throw InvalidArgument("l1 distance: WEMD weighting mismatch");
}

}  // namespace detail

/// l1 distance over the union of supports, linear in the number of nonzeros.
inline double sparse_l1_distance(const SparseCoeffs& a, const SparseCoeffs& b) {
  detail::check_compatible(a.layout.get(), b.layout.get(), a.weighted, b.weighted, a.wemd, b.wemd);
  double acc = 0.0;
  std::size_t i = 0, j = 0;
  const std::size_t na = a.index.size(), nb = b.index.size();
  while (i < na && j < nb) {
    const auto ia = a.index[i], ib = b.index[j];
    if (ia == ib) {
      acc += std::abs(a.value[i++] - b.value[j++]);
    } else if (ia < ib) {
      acc += std::abs(a.value[i++]);
    } else {
      acc += std::abs(b.value[j++]);
    }
  }
  for (; i < na; ++i) acc += std::abs(a.value[i]);
  for (; j < nb; ++j) acc += std::abs(b.value[j]);
  return acc;
}

/// All pairwise sparse l1 distances. Each row vector is scattered into a
/// dense buffer once, so every pair costs one pass over the other vector's
/// nonzeros: |a - b|_1 = |a|_1 + sum over supp(b) of (|a_k - b_k| - |a_k|).
inline Eigen::MatrixXd sparse_pairwise_l1(const std::vector<SparseCoeffs>& vs) {
  const std::size_t n = vs.size();
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  if (n == 0) return D;
  for (const auto& v : vs) {
    detail::check_compatible(vs[0].layout.get(), v.layout.get(), vs[0].weighted, v.weighted, vs[0].wemd, v.wemd);
  }
  std::vector<double> buf(vs[0].layout->size(), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = vs[i];
    double norm_a = 0.0;
    for (std::size_t k = 0; k < a.index.size(); ++k) {
      buf[a.index[k]] = a.value[k];
      norm_a += std::abs(a.value[k]);
    }
    const double* bu = buf.data();
    for (std::size_t j = i + 1; j < n; ++j) {
      const std::uint32_t* ix = vs[j].index.data();
      const double* bv = vs[j].value.data();
      const std::size_t m = vs[j].index.size();
      double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
      std::size_t k = 0;
      for (; k + 4 <= m; k += 4) {
        const double x0 = bu[ix[k]], x1 = bu[ix[k + 1]], x2 = bu[ix[k + 2]], x3 = bu[ix[k + 3]];
        s0 += std::abs(x0 - bv[k]) - std::abs(x0);
        s1 += std::abs(x1 - bv[k + 1]) - std::abs(x1);
        s2 += std::abs(x2 - bv[k + 2]) - std::abs(x2);
        s3 += std::abs(x3 - bv[k + 3]) - std::abs(x3);
      }
      for (; k < m; ++k) s0 += std::abs(bu[ix[k]] - bv[k]) - std::abs(bu[ix[k]]);
      const double d = std::max(0.0, norm_a + ((s0 + s1) + (s2 + s3)));
      D(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = d;
      D(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = d;
    }
    for (auto k : a.index) buf[k] = 0.0;
  }
  return D;
}

inline double dense_l1_distance(const WaveletCoeffs& a, const WaveletCoeffs& b) {
  detail::check_compatible(a.layout.get(), b.layout.get(), a.weighted, b.weighted, a.wemd, b.wemd);
  const auto n = static_cast<Eigen::Index>(a.values.size());
  const Eigen::Map<const Eigen::ArrayXd> pa(a.values.data(), n), pb(b.values.data(), n);
  return (pa - pb).abs().sum();
}

/// Weighted, transformed representation of a volume, ready for l1 distances.
inline WaveletCoeffs wemd_embed(const Volume& v, Wavelet wavelet, int levels,
                                const WemdOptions& opts = {}) {
  return wemd_weight(dwt3(v, wavelet, levels), opts);
}

inline double wemd_distance(const Volume& a, const Volume& b, Wavelet wavelet, int levels,
                            const WemdOptions& opts = {}) {
  return dense_l1_distance(wemd_embed(a, wavelet, levels, opts), wemd_embed(b, wavelet, levels, opts));
}

// ---------------------------------------------------------------------------
// Volume binary format: one JSON header line of at most 64 bytes (newline
// included) followed by little-endian float32 voxels, x-slowest/z-fastest.

inline constexpr std::size_t kVolumeHeaderMax = 64;

inline void write_volume(std::ostream& os, const Volume& v) {
  validate(v);
  nlohmann::ordered_json h;
  h["nx"] = v.dims[0];
  h["ny"] = v.dims[1];
  h["nz"] = v.dims[2];
  h["voxel_size"] = v.voxel_size;
  h["dtype"] = "f32";
  const std::string header = h.dump();
  if (header.size() + 1 > kVolumeHeaderMax) {
    throw IoError("volume header exceeds 64 bytes: " + header);
  }
  os << header << '\n';
  std::vector<char> raw(v.size() * 4);
  for (std::size_t i = 0; i < v.size(); ++i) {
    auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(v.voxels[i]));
    for (int b = 0; b < 4; ++b) raw[4 * i + b] = static_cast<char>((bits >> (8 * b)) & 0xFFu);
  }
  os.write(raw.data(), static_cast<std::streamsize>(raw.size()));
  if (!os) throw IoError("volume: write failed");
}

inline Volume read_volume(std::istream& is) {
  std::string header;
  char c = 0;
  while (is.get(c) && c != '\n') {
    header.push_back(c);
    if (header.size() >= kVolumeHeaderMax) throw IoError("volume: header line exceeds 64 bytes");
  }
  if (c != '\n') throw IoError("volume: truncated header");
  nlohmann::json h;
  try {
    h = nlohmann::json::parse(header);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("volume: bad header json: ") + e.what());
  }
  Volume v;
  try {
    if (h.at("dtype").get<std::string>() != "f32") throw IoError("volume: unsupported dtype");
    v.dims = {h.at("nx").get<std::size_t>(), h.at("ny").get<std::size_t>(),
              h.at("nz").get<std::size_t>()};
    v.voxel_size = h.at("voxel_size").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("volume: bad header fields: ") + e.what());
  }
  if (v.dims[0] == 0 || v.dims[1] == 0 || v.dims[2] == 0) throw IoError("volume: zero dims");
  std::vector<unsigned char> raw(v.size() * 4);
  is.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(is.gcount()) != raw.size()) throw IoError("volume: truncated voxel data");
  v.voxels.resize(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::uint32_t bits = 0;
    for (int b = 0; b < 4; ++b) bits |= static_cast<std::uint32_t>(raw[4 * i + b]) << (8 * b);
    v.voxels[i] = static_cast<double>(std::bit_cast<float>(bits));
  }
  return v;
}

inline void write_volume(const std::string& path, const Volume& v) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path + " for writing");
  write_volume(os, v);
}

inline Volume read_volume(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path);
  return read_volume(is);
}

}  // namespace normlap
