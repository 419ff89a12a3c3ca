#pragma once

#include "fedsim/watchman.hpp"

namespace fedsim {

/// Conservation snapshot computed by replaying both chains from genesis.
///
///   locked          value currently frozen under the peg-lock condition
///   circulating     pegged units minted minus burned on the sidechain
///   in_flight_in    user locks not yet minted against (any depth)
///   in_flight_out   burns whose main-chain withdrawal has not confirmed
///   delta           locked - circulating - in_flight_in - in_flight_out
///
/// delta is 0 whenever the peg machinery is honest; backup withdrawal or a
/// confiscation deliberately breaks it (value left peg control).
struct PegAuditReport {
    uint64_t locked = 0;
    uint64_t circulating = 0;
    uint64_t in_flight_in = 0;
    uint64_t in_flight_out = 0;
    int64_t delta = 0;
};

PegAuditReport peg_audit(std::span<const Block> main_blocks,
                         std::span<const Block> side_blocks,
                         const PegParams& params);

}  // namespace fedsim
