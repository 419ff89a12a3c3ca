#pragma once

#include "fedsim/bytes.hpp"

#include <span>

namespace fedsim {

/// Binary merkle root over transaction digests. Layers with an odd element
/// count duplicate their last element; a single leaf hashes with itself.
/// Throws std::invalid_argument on an empty list.
Digest32 merkle_root(std::span<const Digest32> leaves);

}  // namespace fedsim
