#pragma once

#include "fedsim/bytes.hpp"

#include <set>
#include <span>

namespace fedsim {

/// One proposal round as the monitor sees it.
struct RoundRecord {
    uint32_t proposer = 0;
    std::vector<Digest32> txids;  // proposed transaction set
    bool success = false;         // did this proposal become the accepted block?
};

/// Heuristic censorship detector: flags any proposer whose last `window`
/// proposals all failed while some other proposer succeeded over the same
/// stretch of history. No false-negative guarantee.
std::set<uint32_t> censorship_monitor(std::span<const RoundRecord> history,
                                      uint32_t window);

}  // namespace fedsim
