#include "fedsim/merkle.hpp"

#include "fedsim/hash.hpp"

#include <stdexcept>
#include <vector>

namespace fedsim {

static Digest32 hash_pair(const Digest32& a, const Digest32& b) {
    ByteWriter w;
    w.digest(a);
    w.digest(b);
    return hash32("fedsim/merkle-node", w.bytes());
}

Digest32 merkle_root(std::span<const Digest32> leaves) {
    if (leaves.empty()) throw std::invalid_argument("merkle root of empty list");
    // lone leaf hashes with itself (duplicate-last rule applied uniformly)
    if (leaves.size() == 1) return hash_pair(leaves[0], leaves[0]);
    std::vector<Digest32> layer(leaves.begin(), leaves.end());
    while (layer.size() > 1) {
        std::vector<Digest32> next;
        next.reserve((layer.size() + 1) / 2);
        for (size_t i = 0; i < layer.size(); i += 2) {
            const Digest32& left = layer[i];
            const Digest32& right = i + 1 < layer.size() ? layer[i + 1] : layer[i];
            next.push_back(hash_pair(left, right));
        }
        layer = std::move(next);
    }
    return layer[0];
}

}  // namespace fedsim
