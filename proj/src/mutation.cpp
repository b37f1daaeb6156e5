#include "nichelab/mutation.hpp"

#include <cmath>

namespace nichelab {

void sample_flip_positions(std::size_t n, RandomStream& rng, std::vector<std::size_t>& out,
                           MutationSampler sampler) {
  out.clear();
  if (n == 1) {
    out.push_back(0);
    return;
  }
  if (sampler == MutationSampler::PerBit) {
    for (std::size_t i = 0; i < n; ++i) {
      if (rng.uniform_below(n) == 0) {
        out.push_back(i);
      }
    }
    return;
  }

  const double log_keep = std::log1p(-1.0 / static_cast<double>(n));
  std::size_t pos = 0;
  while (true) {
    const double gap = std::floor(std::log(rng.uniform01_open_closed()) / log_keep);
    if (gap >= static_cast<double>(n - pos)) {
      return;
    }
    pos += static_cast<std::size_t>(gap);
    out.push_back(pos);
    ++pos;
    if (pos >= n) {
      return;
    }
  }
}

Genome standard_bit_mutation(const Genome& parent, RandomStream& rng, MutationSampler sampler) {
  std::vector<std::size_t> flips;
  sample_flip_positions(parent.size(), rng, flips, sampler);
  Genome child{parent};
  child.flip_all(flips);
  return child;
}

} // namespace nichelab
