#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace stshap {

// Masks are stored in a single machine word.
inline constexpr std::size_t kMaxFeatures = 64;

// Binary inclusion mask over M features. Bit i set means feature i is present.
class Coalition {
 public:
  Coalition(std::size_t feature_count, std::uint64_t mask);

  static Coalition empty(std::size_t feature_count);
  static Coalition full(std::size_t feature_count);
  // "1001" -> features 0 and 3 present.
  static Coalition from_string(std::string_view bits);

  std::size_t feature_count() const { return feature_count_; }
  std::uint64_t mask() const { return mask_; }
  std::size_t size() const;
  bool contains(std::size_t feature) const { return (mask_ >> feature) & 1u; }
  bool is_empty() const { return mask_ == 0; }
  bool is_full() const { return size() == feature_count_; }

  Coalition complement() const;
  Coalition with(std::size_t feature) const;
  Coalition without(std::size_t feature) const;
  // Layer this coalition belongs to: min(|z|, M - |z|). Zero for the anchors.
  std::size_t layer() const;

  std::string to_string() const;

  friend bool operator==(const Coalition&, const Coalition&) = default;

 private:
  std::size_t feature_count_;
  std::uint64_t mask_;
};

struct CoalitionHash {
  std::size_t operator()(const Coalition& c) const noexcept {
    return std::hash<std::uint64_t>{}(c.mask() * 0x9E3779B97F4A7C15ull ^
                                      c.feature_count());
  }
};

std::uint64_t full_mask(std::size_t feature_count);

// Exact binomial coefficient; throws std::overflow_error if it does not fit.
std::uint64_t binomial(std::size_t n, std::size_t k);

// Throws std::invalid_argument unless 2 <= M <= kMaxFeatures.
void check_feature_count(std::size_t feature_count);

// Number of layers, floor(M / 2).
std::size_t layer_count(std::size_t feature_count);

// 2 * C(M, i), or C(M, i) for the middle layer of an even M.
std::uint64_t layer_size(std::size_t feature_count, std::size_t layer);

// True when the present and absent halves of the layer coincide (i == M / 2
// for even M).
bool is_self_complementary(std::size_t feature_count, std::size_t layer);

// The index-th coalition of a layer in canonical order: colexicographic over
// the size-i present sets, each followed by its complement unless the layer
// is self-complementary.
Coalition layer_member(std::size_t feature_count, std::size_t layer,
                       std::uint64_t index);

std::vector<Coalition> enumerate_layer(std::size_t feature_count,
                                       std::size_t layer);

// Shapley kernel weight. Infinite weights are flagged, never stored as inf.
struct KernelWeight {
  double value = 0.0;
  bool infinite = false;
};

KernelWeight kernel_weight(std::size_t feature_count, std::size_t size);

// Total kernel weight of a layer: layer_size * per-coalition weight.
double layer_weight(std::size_t feature_count, std::size_t layer);

struct LayerBudget {
  std::size_t layer;
  std::uint64_t cumulative_budget;
};

// Budgets at which layers 1..floor(M/2) become complete.
std::vector<LayerBudget> complete_layer_budgets(std::size_t feature_count);

// 2^M - 2, the number of proper non-empty coalitions.
std::uint64_t max_budget(std::size_t feature_count);

}  // namespace stshap
