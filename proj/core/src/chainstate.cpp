#include "fedsim/chainstate.hpp"

#include "fedsim/hash.hpp"

namespace fedsim {

Digest32 ChainState::genesis_digest() {
    static const Digest32 d = hash32("fedsim/genesis", {});
    return d;
}

uint64_t ChainState::depth_of(const OutPoint& op) const {
    auto it = utxo_height.find(op);
    if (it == utxo_height.end()) return 0;
    return height - it->second + 1;
}

}  // namespace fedsim
