#include "stshap/coalition.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace stshap {

Coalition::Coalition(std::size_t feature_count, std::uint64_t mask)
    : feature_count_(feature_count), mask_(mask) {
  if (feature_count == 0 || feature_count > kMaxFeatures) {
    throw std::invalid_argument("coalition feature count must be in [1, 64]");
  }
  if ((mask & ~full_mask(feature_count)) != 0) {
    throw std::invalid_argument("coalition mask has bits beyond M");
  }
}

Coalition Coalition::empty(std::size_t feature_count) {
  return Coalition(feature_count, 0);
}

Coalition Coalition::full(std::size_t feature_count) {
  return Coalition(feature_count, full_mask(feature_count));
}

Coalition Coalition::from_string(std::string_view bits) {
  std::uint64_t mask = 0;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] == '1') {
      mask |= std::uint64_t{1} << i;
    } else if (bits[i] != '0') {
      throw std::invalid_argument("coalition string must contain only 0/1: " +
                                  std::string(bits));
    }
  }
  return Coalition(bits.size(), mask);
}

std::size_t Coalition::size() const {
  return static_cast<std::size_t>(std::popcount(mask_));
}

Coalition Coalition::complement() const {
  return Coalition(feature_count_, ~mask_ & full_mask(feature_count_));
}

Coalition Coalition::with(std::size_t feature) const {
  return Coalition(feature_count_, mask_ | (std::uint64_t{1} << feature));
}

Coalition Coalition::without(std::size_t feature) const {
  return Coalition(feature_count_, mask_ & ~(std::uint64_t{1} << feature));
}

std::size_t Coalition::layer() const {
  const std::size_t s = size();
  return std::min(s, feature_count_ - s);
}

std::string Coalition::to_string() const {
  std::string out(feature_count_, '0');
  for (std::size_t i = 0; i < feature_count_; ++i) {
    if (contains(i)) out[i] = '1';
  }
  return out;
}

std::uint64_t full_mask(std::size_t feature_count) {
  return feature_count >= 64 ? ~std::uint64_t{0}
                             : (std::uint64_t{1} << feature_count) - 1;
}

std::uint64_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 result = 1;
  for (std::size_t i = 0; i < k; ++i) {
    result = result * (n - i) / (i + 1);
    if (result > ~std::uint64_t{0}) {
      throw std::overflow_error("binomial coefficient overflows 64 bits");
    }
  }
  return static_cast<std::uint64_t>(result);
}

void check_feature_count(std::size_t feature_count) {
  if (feature_count < 2 || feature_count > kMaxFeatures) {
    throw std::invalid_argument("feature count must be in [2, 64], got " +
                                std::to_string(feature_count));
  }
}

std::size_t layer_count(std::size_t feature_count) {
  check_feature_count(feature_count);
  return feature_count / 2;
}

namespace {

void check_layer(std::size_t feature_count, std::size_t layer) {
  if (layer < 1 || layer > layer_count(feature_count)) {
    throw std::invalid_argument(
        "layer " + std::to_string(layer) + " is invalid for M=" +
        std::to_string(feature_count) + " (valid: 1.." +
        std::to_string(feature_count / 2) + ")");
  }
}

// Colex unranking of a size-k subset of {0..n-1}.
std::uint64_t unrank_combination(std::size_t n, std::size_t k,
                                 std::uint64_t rank) {
  std::uint64_t mask = 0;
  std::size_t upper = n;
  for (std::size_t j = k; j >= 1; --j) {
    std::size_t c = j - 1;
    while (c + 1 < upper && binomial(c + 1, j) <= rank) ++c;
    mask |= std::uint64_t{1} << c;
    rank -= binomial(c, j);
    upper = c;
  }
  return mask;
}

}  // namespace

bool is_self_complementary(std::size_t feature_count, std::size_t layer) {
  return 2 * layer == feature_count;
}

std::uint64_t layer_size(std::size_t feature_count, std::size_t layer) {
  check_layer(feature_count, layer);
  const std::uint64_t c = binomial(feature_count, layer);
  return is_self_complementary(feature_count, layer) ? c : 2 * c;
}

Coalition layer_member(std::size_t feature_count, std::size_t layer,
                       std::uint64_t index) {
  const std::uint64_t size = layer_size(feature_count, layer);
  if (index >= size) {
    throw std::out_of_range("layer member index out of range");
  }
  if (is_self_complementary(feature_count, layer)) {
    return Coalition(feature_count,
                     unrank_combination(feature_count, layer, index));
  }
  const Coalition base(feature_count,
                       unrank_combination(feature_count, layer, index / 2));
  return index % 2 == 0 ? base : base.complement();
}

std::vector<Coalition> enumerate_layer(std::size_t feature_count,
                                       std::size_t layer) {
  const std::uint64_t combos = binomial(feature_count, layer);
  const bool paired = !is_self_complementary(feature_count, layer);
  std::vector<Coalition> out;
  out.reserve(layer_size(feature_count, layer));
  // Gosper's hack walks same-popcount masks in increasing order, which is
  // colex order over the present sets.
  std::uint64_t mask = (std::uint64_t{1} << layer) - 1;
  for (std::uint64_t n = 0; n < combos; ++n) {
    const Coalition c(feature_count, mask);
    out.push_back(c);
    if (paired) out.push_back(c.complement());
    if (n + 1 < combos) {
      const std::uint64_t low = mask & (~mask + 1);
      const std::uint64_t ripple = mask + low;
      mask = (((ripple ^ mask) >> 2) / low) | ripple;
    }
  }
  return out;
}

KernelWeight kernel_weight(std::size_t feature_count, std::size_t size) {
  if (size > feature_count) {
    throw std::invalid_argument("coalition size exceeds feature count");
  }
  if (size == 0 || size == feature_count) return {0.0, true};
  const double m = static_cast<double>(feature_count);
  const double s = static_cast<double>(size);
  const double c = static_cast<double>(binomial(feature_count, size));
  return {(m - 1.0) / (c * s * (m - s)), false};
}

double layer_weight(std::size_t feature_count, std::size_t layer) {
  check_layer(feature_count, layer);
  const double m = static_cast<double>(feature_count);
  const double i = static_cast<double>(layer);
  const double halves = is_self_complementary(feature_count, layer) ? 1.0 : 2.0;
  return halves * (m - 1.0) / (i * (m - i));
}

std::vector<LayerBudget> complete_layer_budgets(std::size_t feature_count) {
  std::vector<LayerBudget> out;
  std::uint64_t total = 0;
  for (std::size_t i = 1; i <= layer_count(feature_count); ++i) {
    total += layer_size(feature_count, i);
    out.push_back({i, total});
  }
  return out;
}

std::uint64_t max_budget(std::size_t feature_count) {
  check_feature_count(feature_count);
  return full_mask(feature_count) - 1;
}

}  // namespace stshap
