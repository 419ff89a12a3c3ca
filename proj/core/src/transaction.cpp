#include "fedsim/transaction.hpp"

#include "fedsim/hash.hpp"

namespace fedsim {

AssetId pegged_asset_id() {
    static const AssetId id = hash32("fedsim/pegged-asset", {});
    return id;
}

// ---- spend conditions -----------------------------------------------------

static void serialize_multikey(ByteWriter& w, const CondMultiKey& m) {
    w.u32(m.threshold);
    w.u32(uint32_t(m.keys.size()));
    for (const auto& k : m.keys) k.serialize(w);
}

static CondMultiKey deserialize_multikey(ByteReader& r) {
    CondMultiKey m;
    m.threshold = r.u32();
    uint32_t n = r.seq_len(256);
    m.keys.reserve(n);
    for (uint32_t i = 0; i < n; ++i) m.keys.push_back(GroupElement::deserialize(r));
    return m;
}

void serialize_condition(ByteWriter& w, const SpendCondition& c) {
    std::visit(
        [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, CondSingleKey>) {
                w.u8(0);
                v.key.serialize(w);
            } else if constexpr (std::is_same_v<T, CondMultiKey>) {
                w.u8(1);
                serialize_multikey(w, v);
            } else if constexpr (std::is_same_v<T, CondTimelock>) {
                w.u8(2);
                w.u64(v.not_before);
                serialize_multikey(w, v.keys);
            } else if constexpr (std::is_same_v<T, CondUnspendable>) {
                w.u8(3);
            } else {
                w.u8(4);
                serialize_multikey(w, v.federation);
                w.u64(v.backup_timelock);
                serialize_multikey(w, v.backup);
            }
        },
        c);
}

SpendCondition deserialize_condition(ByteReader& r) {
    switch (r.u8()) {
        case 0:
            return CondSingleKey{GroupElement::deserialize(r)};
        case 1:
            return deserialize_multikey(r);
        case 2: {
            CondTimelock t;
            t.not_before = r.u64();
            t.keys = deserialize_multikey(r);
            return t;
        }
        case 3:
            return CondUnspendable{};
        case 4: {
            CondPegLock p;
            p.federation = deserialize_multikey(r);
            p.backup_timelock = r.u64();
            p.backup = deserialize_multikey(r);
            return p;
        }
        default:
            throw DeserializeError("unknown spend condition tag");
    }
}

// ---- outputs --------------------------------------------------------------

void TxOutput::serialize(ByteWriter& w) const {
    w.digest(asset);
    if (is_explicit()) {
        w.u8(0);
        w.u64(explicit_amount());
    } else {
        const auto& conf = std::get<ConfidentialAmount>(amount);
        w.u8(1);
        conf.commitment.serialize(w);
        conf.proof.serialize(w);
    }
    serialize_condition(w, condition);
}

TxOutput TxOutput::deserialize(ByteReader& r) {
    TxOutput o;
    o.asset = r.digest();
    switch (r.u8()) {
        case 0:
            o.amount = r.u64();
            break;
        case 1: {
            ConfidentialAmount conf;
            conf.commitment = Commitment::deserialize(r);
            conf.proof = RangeProof::deserialize(r);
            o.amount = std::move(conf);
            break;
        }
        default:
            throw DeserializeError("unknown amount tag");
    }
    o.condition = deserialize_condition(r);
    return o;
}

// ---- transaction ----------------------------------------------------------

void Transaction::serialize_impl(ByteWriter& w, bool with_signatures) const {
    w.u32(uint32_t(inputs.size()));
    for (const auto& in : inputs) {
        in.prev.serialize(w);
        w.u8(uint8_t(in.clause));
        if (with_signatures) {
            w.u32(uint32_t(in.signatures.size()));
            for (const auto& [idx, sig] : in.signatures) {
                w.u8(idx);
                sig.serialize(w);
            }
        }
    }
    w.u32(uint32_t(issuances.size()));
    for (const auto& iss : issuances) {
        w.u64(iss.amount);
        w.var_bytes(iss.policy_note);
    }
    w.u32(uint32_t(outputs.size()));
    for (const auto& out : outputs) out.serialize(w);
    w.u32(uint32_t(fee.size()));
    for (const auto& [asset, amount] : fee) {
        w.digest(asset);
        w.u64(amount);
    }
    w.u8(pegout.has_value() ? 1 : 0);
    if (pegout) {
        pegout->destination.serialize(w);
        pegout->proof.serialize(w);
        w.u64(pegout->amount);
    }
    w.u8(pegin.has_value() ? 1 : 0);
    if (pegin) {
        pegin->lock_outpoint.serialize(w);
        w.u64(pegin->amount);
        pegin->destination.serialize(w);
    }
    w.u8(lock_destination.has_value() ? 1 : 0);
    if (lock_destination) lock_destination->serialize(w);
}

Transaction Transaction::deserialize(ByteReader& r) {
    Transaction tx;
    uint32_t n_in = r.seq_len(4096);
    for (uint32_t i = 0; i < n_in; ++i) {
        TxInput in;
        in.prev = OutPoint::deserialize(r);
        uint8_t clause = r.u8();
        if (clause > 1) throw DeserializeError("unknown spend clause");
        in.clause = SpendClause(clause);
        uint32_t n_sig = r.seq_len(256);
        for (uint32_t s = 0; s < n_sig; ++s) {
            uint8_t idx = r.u8();
            in.signatures.emplace_back(idx, SchnorrSignature::deserialize(r));
        }
        tx.inputs.push_back(std::move(in));
    }
    uint32_t n_iss = r.seq_len(256);
    for (uint32_t i = 0; i < n_iss; ++i) {
        Issuance iss;
        iss.amount = r.u64();
        iss.policy_note = r.var_bytes(4096);
        tx.issuances.push_back(std::move(iss));
    }
    uint32_t n_out = r.seq_len(4096);
    for (uint32_t i = 0; i < n_out; ++i) tx.outputs.push_back(TxOutput::deserialize(r));
    uint32_t n_fee = r.seq_len(256);
    for (uint32_t i = 0; i < n_fee; ++i) {
        AssetId a = r.digest();
        tx.fee[a] = r.u64();
    }
    if (r.u8()) {
        PegoutMetadata m;
        m.destination = GroupElement::deserialize(r);
        m.proof = AuthorizationProof::deserialize(r);
        m.amount = r.u64();
        tx.pegout = std::move(m);
    }
    if (r.u8()) {
        PeginMetadata m;
        m.lock_outpoint = OutPoint::deserialize(r);
        m.amount = r.u64();
        m.destination = GroupElement::deserialize(r);
        tx.pegin = std::move(m);
    }
    if (r.u8()) tx.lock_destination = GroupElement::deserialize(r);
    return tx;
}

Digest32 Transaction::txid() const {
    ByteWriter w;
    serialize_impl(w, false);
    return hash32("fedsim/txid", w.bytes());
}

AssetId Transaction::issued_asset_id(uint32_t position) const {
    // Derived from the consumed outpoints, the issuance slot and its policy
    // note — never from the outputs, which must be able to carry the id.
    ByteWriter w;
    w.u32(uint32_t(inputs.size()));
    for (const auto& in : inputs) in.prev.serialize(w);
    w.u32(position);
    if (position < issuances.size()) w.var_bytes(issuances[position].policy_note);
    return hash32("fedsim/asset-id", w.bytes());
}

Bytes Transaction::signing_message() const {
    ByteWriter w;
    w.digest(txid());
    return w.take();
}

void sign_input(Transaction& tx, size_t input_index, uint8_t key_index,
                const Scalar& secret) {
    Bytes msg = tx.signing_message();
    tx.inputs.at(input_index).signatures.emplace_back(key_index,
                                                      schnorr_sign(secret, msg));
}

}  // namespace fedsim
