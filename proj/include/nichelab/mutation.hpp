#pragma once

#include <cstddef>
#include <vector>

#include "nichelab/genome.hpp"
#include "nichelab/random.hpp"

namespace nichelab {

// Two samplers for standard bit mutation at rate 1/n. Both produce the same
// distribution over flip sets; they consume the random stream differently.
//
//   PerBit         one uniform_below(n) draw per position, flip iff it is 0.
//   GeometricSkip  jumps straight to the next flipped position by drawing
//                  the Geometric(1/n) gap floor(ln U / ln(1 - 1/n)), U in (0,1].
//                  About 1 + (expected flips) draws per mutation instead of n.
enum class MutationSampler { PerBit, GeometricSkip };

/// Writes the ascending positions flipped by one standard bit mutation of a
/// length-n genome into `out` (cleared first).
void sample_flip_positions(std::size_t n, RandomStream& rng, std::vector<std::size_t>& out,
                           MutationSampler sampler = MutationSampler::GeometricSkip);

/// Returns a mutated copy of `parent`; `parent` is unchanged.
Genome standard_bit_mutation(const Genome& parent, RandomStream& rng,
                             MutationSampler sampler = MutationSampler::GeometricSkip);

} // namespace nichelab
