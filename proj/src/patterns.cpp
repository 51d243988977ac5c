#include "psconv/patterns.hpp"

#include <algorithm>
#include <numeric>

#include "psconv/rng.hpp"

namespace psconv {

namespace {

std::string str(int v) { return std::to_string(v); }

std::vector<KernelPattern> draw_variants(int k, int kss, int kvs, Xoshiro256& rng) {
  const int cells = k * k;
  std::vector<int> pool(static_cast<std::size_t>(cells));
  std::iota(pool.begin(), pool.end(), 0);

  std::vector<KernelPattern> variants;
  variants.reserve(static_cast<std::size_t>(kvs));
  for (int v = 0; v < kvs; ++v) {
    std::vector<int> chosen;
    while (static_cast<int>(chosen.size()) < kss) {
      if (pool.empty()) {
        for (int c = 0; c < cells; ++c)
          if (std::find(chosen.begin(), chosen.end(), c) == chosen.end()) pool.push_back(c);
      }
      const auto pick = static_cast<std::ptrdiff_t>(rng.below(pool.size()));
      chosen.push_back(pool[static_cast<std::size_t>(pick)]);
      pool.erase(pool.begin() + pick);
    }
    std::vector<Cell> support;
    for (int c : chosen) support.push_back(Cell{c / k, c % k});
    variants.emplace_back(k, std::move(support));
  }
  return variants;
}

void check_variant_args(int k, int kss, int kvs) {
  if (k < 1) throw InvalidArgument("kernel side must be positive, got " + str(k));
  if (kss < 1 || kss > k * k) {
    throw InvalidArgument("kss must lie in [1, " + str(k * k) + "], got " + str(kss));
  }
  if (kvs < 1) throw InvalidArgument("kvs must be positive, got " + str(kvs));
}

}  // namespace

KernelPattern::KernelPattern(int k, std::vector<Cell> support) : k_(k), support_(std::move(support)) {
  if (k < 1) throw InvalidArgument("kernel side must be positive");
  for (const Cell& c : support_) {
    if (c.row < 0 || c.row >= k || c.col < 0 || c.col >= k) {
      throw InvalidArgument("cell (" + str(c.row) + ", " + str(c.col) + ") outside " + str(k) +
                            "x" + str(k) + " kernel");
    }
  }
  std::sort(support_.begin(), support_.end());
  if (std::adjacent_find(support_.begin(), support_.end()) != support_.end()) {
    throw InvalidArgument("duplicate cell in kernel support");
  }
}

KernelPattern KernelPattern::full(int k) {
  std::vector<Cell> cells;
  for (int r = 0; r < k; ++r)
    for (int c = 0; c < k; ++c) cells.push_back(Cell{r, c});
  return KernelPattern(k, std::move(cells));
}

bool KernelPattern::contains(int row, int col) const {
  return std::binary_search(support_.begin(), support_.end(), Cell{row, col});
}

bool PatternSchedule::covers_all_cells() const {
  std::vector<bool> seen(static_cast<std::size_t>(k * k), false);
  for (const auto& v : variants)
    for (const Cell& c : v.support()) seen[static_cast<std::size_t>(c.row * k + c.col)] = true;
  return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
}

int PatternSchedule::weights_per_period() const {
  int total = 0;
  for (const auto& v : variants) total += static_cast<int>(v.size());
  return total;
}

void PatternSchedule::validate() const {
  check_variant_args(k, kss, kvs);
  if (period < 1) throw InvalidArgument("period must be positive, got " + str(period));
  if (eta < 0 || eta > period) {
    throw InvalidArgument("eta must lie in [0, period], got " + str(eta));
  }
  if (static_cast<int>(variants.size()) != period) {
    throw InvalidArgument("schedule lists " + std::to_string(variants.size()) +
                          " variants for period " + str(period));
  }
  int fc = 0;
  for (std::size_t i = 0; i < variants.size(); ++i) {
    const auto& v = variants[i];
    if (v.k() != k) throw InvalidArgument("variant " + std::to_string(i) + " has wrong kernel side");
    if (v.is_fc()) {
      ++fc;
    } else if (static_cast<int>(v.size()) != kss) {
      throw InvalidArgument("variant " + std::to_string(i) + " has " + std::to_string(v.size()) +
                            " cells, expected kss " + str(kss));
    }
  }
  if (kss < k * k && fc != eta) {
    throw InvalidArgument("schedule holds " + str(fc) + " FC kernels, expected eta " + str(eta));
  }
  if (!covers_all_cells()) throw CoverageInfeasible("schedule does not cover every kernel cell");
}

std::vector<KernelPattern> generate_variants(int k, int kss, int kvs, std::uint64_t seed) {
  check_variant_args(k, kss, kvs);
  if (kvs * kss < k * k) {
    throw CoverageInfeasible("coverage infeasible: kvs * kss = " + str(kvs * kss) + " < " +
                             str(k * k) + " kernel cells");
  }
  Xoshiro256 rng(seed);
  return draw_variants(k, kss, kvs, rng);
}

PatternSchedule build_schedule(int k, int kss, int kvs, int period, int eta, std::uint64_t seed) {
  check_variant_args(k, kss, kvs);
  if (period < 1) throw InvalidArgument("period must be positive, got " + str(period));
  if (eta < 0 || eta > period) {
    throw InvalidArgument("eta must lie in [0, period], got " + str(eta));
  }
  if (eta > 1) throw InvalidArgument("only eta in {0, 1} is supported, got " + str(eta));
  if (eta == 0 && kvs * kss < k * k) {
    throw CoverageInfeasible("coverage infeasible: kvs * kss = " + str(kvs * kss) + " < " +
                             str(k * k) + " kernel cells and no FC kernel per period");
  }

  PatternSchedule s{k, kss, kvs, period, eta, seed, {}};
  for (int i = 0; i < eta; ++i) s.variants.push_back(KernelPattern::full(k));
  const int slots = period - eta;
  if (slots == 0) return s;

  Xoshiro256 rng(seed);
  std::vector<KernelPattern> sparse = draw_variants(k, kss, kvs, rng);
  if (kvs > slots) {
    std::vector<std::size_t> keep(sparse.size());
    std::iota(keep.begin(), keep.end(), 0);
    for (int i = 0; i < kvs - slots; ++i) {
      keep.erase(keep.begin() + static_cast<std::ptrdiff_t>(rng.below(keep.size())));
    }
    for (std::size_t idx : keep) s.variants.push_back(sparse[idx]);
  } else {
    for (const auto& v : sparse) s.variants.push_back(v);
    for (int i = 0; i < slots - kvs; ++i) {
      s.variants.push_back(sparse[rng.below(sparse.size())]);
    }
  }
  if (eta == 0 && !s.covers_all_cells()) {
    // Dropping surplus variants can lose a cell that only they carried.
    throw CoverageInfeasible("coverage infeasible: the " + str(slots) +
                             " retained variants miss a kernel cell");
  }
  return s;
}

LayerMask::LayerMask(std::size_t filters, std::size_t channels, int k)
    : filters_(filters), channels_(channels), k_(static_cast<std::size_t>(k)) {
  if (filters == 0 || channels == 0 || k < 1) {
    throw InvalidArgument("layer mask extents must be positive");
  }
  bits_.assign(filters_ * channels_ * k_ * k_, 0);
}

std::size_t LayerMask::filter_nnz(std::size_t f) const {
  const std::size_t stride = channels_ * k_ * k_;
  return static_cast<std::size_t>(std::count(bits_.begin() + static_cast<std::ptrdiff_t>(f * stride),
                                             bits_.begin() + static_cast<std::ptrdiff_t>((f + 1) * stride),
                                             std::uint8_t{1}));
}

std::size_t LayerMask::popcount() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

LayerMask expand_mask(const PatternSchedule& schedule, std::size_t in_channels,
                      std::size_t out_channels, std::vector<std::string>* warnings) {
  schedule.validate();
  LayerMask mask(out_channels, in_channels, schedule.k);
  const auto period = static_cast<std::size_t>(schedule.period);
  if (in_channels % period != 0 && warnings != nullptr) {
    warnings->push_back("period " + std::to_string(period) + " does not divide C_i " +
                        std::to_string(in_channels) +
                        "; per-filter non-zero counts may differ across filters");
  }
  for (std::size_t f = 0; f < out_channels; ++f)
    for (std::size_t c = 0; c < in_channels; ++c) {
      const KernelPattern& p = schedule.variants[(c + f) % period];
      for (const Cell& cell : p.support()) {
        mask.set(f, c, static_cast<std::size_t>(cell.row), static_cast<std::size_t>(cell.col), true);
      }
    }
  return mask;
}

Tensor4D apply_mask(const Tensor4D& weights, const LayerMask& mask) {
  if (!(weights.shape() == mask.shape())) {
    throw ShapeError("weights " + weights.shape().str() + " do not match mask " + mask.shape().str());
  }
  std::vector<float> out(weights.values());
  const auto& bits = mask.bits();
  for (std::size_t i = 0; i < out.size(); ++i)
    if (bits[i] == 0) out[i] = 0.0f;
  return Tensor4D(weights.shape(), std::move(out));
}

}  // namespace psconv
