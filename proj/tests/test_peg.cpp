#include "fedsim/authproof.hpp"
#include "fedsim/hash.hpp"
#include "fedsim/mainchain.hpp"
#include "fedsim/pegaudit.hpp"
#include "fedsim/watchman.hpp"

#include <doctest.h>

using namespace fedsim;

namespace {

/// A miniature two-chain world: one modeled parent chain, one manually
/// stamped sidechain (1-of-1 blocksigner), three watchmen with a 2-of-3
/// threshold and a 2-key backup quorum behind an absolute timelock.
struct PegEnv {
    DetRng rng{4242};
    SecretsRegistry secrets;
    BuildContext ctx{&rng, &secrets};

    std::vector<Keypair> watchmen_keys, backup_keys, online, offline;
    PegParams params;
    std::vector<WatchmanState> watchmen;

    MainchainModel main{ChainRules{}};
    Keypair blocksigner = Keypair::generate(rng);
    ChainRules side_rules;
    ChainState side;
    std::vector<Block> side_blocks;

    Wallet user_main{Keypair::generate(rng)};
    Wallet user_side{Keypair::generate(rng)};
    AssetId main_asset{};

    PegEnv() {
        for (int i = 0; i < 3; ++i) {
            watchmen_keys.push_back(Keypair::generate(rng));
            params.watchman_keys.push_back(watchmen_keys.back().pub);
            watchmen.push_back({uint32_t(i), watchmen_keys.back(), {}, {}});
            online.push_back(Keypair::generate(rng));
            offline.push_back(Keypair::generate(rng));
            params.auth_online.push_back(online.back().pub);
            params.auth_offline.push_back(offline.back().pub);
        }
        params.watchman_threshold = 2;
        for (int i = 0; i < 2; ++i) {
            backup_keys.push_back(Keypair::generate(rng));
            params.backup_keys.push_back(backup_keys.back().pub);
        }
        params.backup_quorum = 2;
        params.backup_timelock = 1000;
        params.pegin_depth = 2;
        params.pegout_depth = 1;

        side_rules.sidechain = true;
        side_rules.stamp_threshold = 1;
        side_rules.blocksigner_keys = {blocksigner.pub};
        side_rules.auth_online = params.auth_online;
        side_rules.auth_offline = params.auth_offline;
        side_rules.pegin_depth = params.pegin_depth;

        // fund the user on the parent chain
        std::vector<std::pair<GroupElement, uint64_t>> grants{{user_main.key.pub, 1000}};
        Transaction iss = build_issuance(Keypair::generate(rng), Bytes{'m'}, grants);
        main_asset = iss.issued_asset_id(0);
        main.submit(iss);
        const Block& b = main.mine(0, 10);
        user_main.scan_block(b, secrets);
    }

    /// Stamps and applies one sidechain block; the parent view is re-anchored
    /// to the current main tip on every call.
    void apply_side(std::vector<Transaction> txs, uint64_t time) {
        side_rules.parent_view = &main.best();
        Block b;
        b.txs = std::move(txs);
        b.header.height = side.height + 1;
        b.header.prev = side.tip_digest;
        b.header.timestamp = time;
        b.header.merkle_root = b.compute_merkle_root();
        Bytes msg = header_signing_message(b.header.digest());
        b.header.stamp = MultisigStamp{{{0, schnorr_sign(blocksigner.secret, msg)}}};
        ApplyResult r = block_apply(side, b, side_rules);
        REQUIRE_MESSAGE(r.result.ok(), r.result.detail);
        side = *r.state;
        side_blocks.push_back(b);
        user_side.scan_block(b, secrets);
    }

    PegAuditReport audit() {
        return peg_audit(main.best_chain(), side_blocks, params);
    }

    AuthorizationProof auth_for(size_t i, const Keypair& dest) {
        return authorize_key(i, online[i].secret, dest.secret + offline[i].secret,
                             dest.pub, params.auth_online, params.auth_offline);
    }

    /// Locks `amount`, matures it, and mints on the sidechain.
    void pegin(uint64_t amount, uint64_t t0) {
        Transaction lock =
            pegin_create(user_main, main_asset, amount, user_side.key.pub, params, ctx);
        main.submit(lock);
        user_main.scan_block(main.mine(0, t0), secrets);
        main.mine(0, t0 + 10);  // maturity
        std::vector<Block> mb = main.best_chain();
        std::vector<Transaction> mints = pegin_process(mb, main.best(), side, params);
        REQUIRE(mints.size() == 1);
        apply_side(mints, t0 + 20);
    }
};

}  // namespace

TEST_CASE("the peg conserves value at every checkpoint of a full cycle") {
    PegEnv env;
    PegAuditReport a0 = env.audit();
    CHECK(a0.locked == 0);
    CHECK(a0.delta == 0);

    // lock on the parent chain; before the mint it is in-flight inbound
    Transaction lock = pegin_create(env.user_main, env.main_asset, 400,
                                    env.user_side.key.pub, env.params, env.ctx);
    env.main.submit(lock);
    env.user_main.scan_block(env.main.mine(0, 20), env.secrets);
    env.main.mine(0, 30);
    PegAuditReport a1 = env.audit();
    CHECK(a1.locked == 400);
    CHECK(a1.in_flight_in == 400);
    CHECK(a1.circulating == 0);
    CHECK(a1.delta == 0);

    // every watchman derives the same mint; applying it starts circulation
    std::vector<Block> mb = env.main.best_chain();
    std::vector<Transaction> mints =
        pegin_process(mb, env.main.best(), env.side, env.params);
    REQUIRE(mints.size() == 1);
    CHECK(mints == pegin_process(mb, env.main.best(), env.side, env.params));
    env.apply_side(mints, 40);
    CHECK(env.user_side.balance(pegged_asset_id()) == 400);
    PegAuditReport a2 = env.audit();
    CHECK(a2.circulating == 400);
    CHECK(a2.in_flight_in == 0);
    CHECK(a2.delta == 0);

    // confidential activity on the sidechain leaves the peg invariant alone
    Wallet friend_side{Keypair::generate(env.rng)};
    Transaction pay = build_transfer(env.user_side, pegged_asset_id(), 150,
                                     friend_side.key.pub, true, env.ctx);
    env.apply_side({pay}, 50);
    CHECK(env.audit().delta == 0);
    CHECK(env.audit().circulating == 400);

    // burn 120 with an authorization proof; in-flight outbound until withdrawn
    Keypair dest = Keypair::generate(env.rng);
    Transaction burn = pegout_request(env.user_side, 120, dest.pub,
                                      env.auth_for(0, dest), env.ctx);
    env.apply_side({burn}, 60);
    PegAuditReport a3 = env.audit();
    CHECK(a3.circulating == 280);
    CHECK(a3.in_flight_out == 120);
    CHECK(a3.delta == 0);

    std::vector<PegoutRequest> settled =
        find_settled_pegouts(env.side_blocks, env.side, env.params.pegout_depth);
    REQUIRE(settled.size() == 1);
    CHECK(settled[0].amount == 120);
    CHECK(settled[0].destination == dest.pub);

    auto unsigned_tx = build_withdrawal(settled[0], mb, env.main.best(), env.side,
                                        env.params);
    REQUIRE(unsigned_tx.has_value());
    std::vector<std::pair<uint8_t, SchnorrSignature>> shares;
    for (uint32_t w : {0u, 1u}) {
        auto s = watchman_sign_withdrawal(env.watchmen[w], *unsigned_tx, settled[0],
                                          env.side_blocks, env.side, mb,
                                          env.main.best(), env.params, 70);
        REQUIRE(s.has_value());
        shares.emplace_back(uint8_t(w), *s);
    }
    // an honest watchman never signs the same request twice
    CHECK_FALSE(watchman_sign_withdrawal(env.watchmen[0], *unsigned_tx, settled[0],
                                         env.side_blocks, env.side, mb,
                                         env.main.best(), env.params, 71)
                    .has_value());

    env.main.submit(assemble_withdrawal(*unsigned_tx, shares));
    const Block& wb = env.main.mine(0, 80);
    bool paid = false;
    for (const auto& tx : wb.txs)
        for (const auto& out : tx.outputs)
            if (out.condition == SpendCondition{CondSingleKey{dest.pub}})
                paid = out.is_explicit() && out.explicit_amount() == 120;
    CHECK(paid);
    PegAuditReport a4 = env.audit();
    CHECK(a4.locked == 280);
    CHECK(a4.in_flight_out == 0);
    CHECK(a4.delta == 0);
}

TEST_CASE("watchmen refuse every non-canonical or unauthorized withdrawal") {
    PegEnv env;
    env.pegin(300, 20);
    Keypair dest = Keypair::generate(env.rng);
    Transaction burn = pegout_request(env.user_side, 100, dest.pub,
                                      env.auth_for(1, dest), env.ctx);
    env.apply_side({burn}, 50);
    std::vector<Block> mb = env.main.best_chain();
    std::vector<PegoutRequest> settled =
        find_settled_pegouts(env.side_blocks, env.side, 1);
    REQUIRE(settled.size() == 1);
    auto canonical =
        build_withdrawal(settled[0], mb, env.main.best(), env.side, env.params);
    REQUIRE(canonical.has_value());
    auto sign_with = [&](uint32_t w, const Transaction& tx, const PegParams& p,
                         uint64_t now) {
        WatchmanState fresh{w, env.watchmen_keys[w], {}, {}};
        return watchman_sign_withdrawal(fresh, tx, settled[0], env.side_blocks,
                                        env.side, mb, env.main.best(), p, now);
    };
    CHECK(sign_with(0, *canonical, env.params, 60).has_value());

    Transaction short_pay = *canonical;  // destination short-changed
    for (auto& out : short_pay.outputs)
        if (out.condition == SpendCondition{CondSingleKey{dest.pub}})
            out.amount = uint64_t{99};
    CHECK_FALSE(sign_with(0, short_pay, env.params, 60).has_value());

    Transaction redirect = *canonical;  // value siphoned to a thief key
    Keypair thief = Keypair::generate(env.rng);
    for (auto& out : redirect.outputs)
        if (out.condition == SpendCondition{CondSingleKey{dest.pub}})
            out.condition = CondSingleKey{thief.pub};
    CHECK_FALSE(sign_with(0, redirect, env.params, 60).has_value());

    Transaction padded = *canonical;  // extra non-canonical output
    padded.outputs.push_back({env.main_asset, uint64_t{0}, CondSingleKey{thief.pub}});
    CHECK_FALSE(sign_with(0, padded, env.params, 60).has_value());

    PegParams deep = env.params;  // burn not yet buried deep enough
    deep.pegout_depth = 5;
    CHECK_FALSE(sign_with(0, *canonical, deep, 60).has_value());

    WatchmanState off{2, env.watchmen_keys[2], {{0, 10}}, {}};  // offline at now=60
    CHECK_FALSE(watchman_sign_withdrawal(off, *canonical, settled[0],
                                         env.side_blocks, env.side, mb,
                                         env.main.best(), env.params, 60)
                    .has_value());
    off.online_windows = {{0, 100}};
    CHECK(watchman_sign_withdrawal(off, *canonical, settled[0], env.side_blocks,
                                   env.side, mb, env.main.best(), env.params, 60)
              .has_value());
}

TEST_CASE("confiscation needs the full watchman threshold and breaks the audit") {
    PegEnv env;
    env.pegin(300, 20);
    CHECK(env.audit().delta == 0);
    Keypair thief = Keypair::generate(env.rng);

    std::vector<uint32_t> one{0};
    Transaction under = confiscation_attempt(env.main.best(), env.params,
                                             env.watchmen_keys, one, thief.pub);
    CHECK_FALSE(tx_validate(under, env.main.best(), env.main.rules(), 90).ok());

    std::vector<uint32_t> two{0, 1};
    Transaction theft = confiscation_attempt(env.main.best(), env.params,
                                             env.watchmen_keys, two, thief.pub);
    CHECK(tx_validate(theft, env.main.best(), env.main.rules(), 90).ok());
    env.main.submit(theft);
    env.main.mine(0, 90);
    PegAuditReport post = env.audit();
    CHECK(post.locked == 0);
    CHECK(post.delta < 0);  // circulating tokens lost their backing
}

TEST_CASE("the backup quorum can recover locks only after the timelock") {
    PegEnv env;
    env.pegin(300, 20);
    std::vector<uint32_t> both{0, 1};

    // before T the builder refuses outright
    CHECK_FALSE(backup_withdrawal(env.main.best(), env.params, env.backup_keys,
                                  both, 999)
                    .has_value());

    auto recovered = backup_withdrawal(env.main.best(), env.params,
                                       env.backup_keys, both, 1000);
    REQUIRE(recovered.has_value());
    // a premature block cannot confirm it, a post-timelock block can
    CHECK(tx_validate(*recovered, env.main.best(), env.main.rules(), 999).reason ==
          Reject::script);
    CHECK(tx_validate(*recovered, env.main.best(), env.main.rules(), 1000).ok());

    // the backup clause still demands its full quorum
    std::vector<uint32_t> lone{0};
    auto thin = backup_withdrawal(env.main.best(), env.params, env.backup_keys,
                                  lone, 1000);
    REQUIRE(thin.has_value());
    CHECK_FALSE(tx_validate(*thin, env.main.best(), env.main.rules(), 1000).ok());

    env.main.submit(*recovered);
    env.main.mine(0, 1000);
    PegAuditReport post = env.audit();
    CHECK(post.locked == 0);
    CHECK(post.delta < 0);  // deliberate: value left peg control transparently
}

TEST_CASE("peg-in minting waits for maturity and honors annotations") {
    PegEnv env;
    Transaction lock = pegin_create(env.user_main, env.main_asset, 200,
                                    env.user_side.key.pub, env.params, env.ctx);
    env.main.submit(lock);
    env.user_main.scan_block(env.main.mine(0, 20), env.secrets);

    // one confirmation < pegin_depth: nothing to mint yet
    CHECK(pegin_process(env.main.best_chain(), env.main.best(), env.side, env.params)
              .empty());

    env.main.mine(0, 30);
    std::vector<Block> mb = env.main.best_chain();
    std::vector<Transaction> mints =
        pegin_process(mb, env.main.best(), env.side, env.params);
    REQUIRE(mints.size() == 1);
    CHECK(mints[0].pegin.has_value());
    CHECK(mints[0].pegin->amount == 200);

    // the mint is a sidechain-only construct anchored to the parent view
    ChainRules no_parent = env.side_rules;
    no_parent.parent_view = nullptr;
    CHECK(tx_validate(mints[0], env.side, no_parent, 40).reason == Reject::peg);

    env.apply_side(mints, 40);
    CHECK(env.user_side.balance(pegged_asset_id()) == 200);
    // claimed locks are never minted against twice
    CHECK(pegin_process(mb, env.main.best(), env.side, env.params).empty());
    // nor can the mint be replayed directly
    CHECK(tx_validate(mints[0], env.side, env.side_rules, 50).reason == Reject::peg);

    // a lock without a destination annotation is invisible to the watchmen
    Transaction blind = pegin_create(env.user_main, env.main_asset, 50,
                                     env.user_side.key.pub, env.params, env.ctx);
    blind.lock_destination.reset();
    for (auto& in : blind.inputs) in.signatures.clear();
    for (size_t i = 0; i < blind.inputs.size(); ++i)
        sign_input(blind, i, 0, env.user_main.key.secret);
    env.main.submit(blind);
    env.main.mine(0, 50);
    env.main.mine(0, 60);
    CHECK(pegin_process(env.main.best_chain(), env.main.best(), env.side, env.params)
              .empty());
    // the unannotated value still counts as locked, so the audit sees it as
    // in-flight inbound forever (recoverable only via the backup clause)
    CHECK(env.audit().in_flight_in == 50);
    CHECK(env.audit().delta == 0);
}

TEST_CASE("a garbage-key peg-out passes the ledger but strands the coins") {
    PegEnv env;
    env.pegin(300, 20);
    // W = t*G - Q_2: provable via participant 2, spendable by nobody
    Scalar t = Scalar::random(env.rng);
    GroupElement w = GroupElement::base_mul(t) - env.params.auth_offline[2];
    AuthorizationProof proof = authorize_key(2, env.online[2].secret, t, w,
                                             env.params.auth_online,
                                             env.params.auth_offline);
    Transaction burn = pegout_request(env.user_side, 80, w, proof, env.ctx);
    env.apply_side({burn}, 50);  // the sidechain cannot tell and accepts
    CHECK(env.audit().in_flight_out == 80);
    CHECK(env.audit().delta == 0);
}
