// Copyright 2026 The Wibson Sim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "wibson/actors/protocol.hpp"
#include "wibson/net/network.hpp"

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace wibson::actors {

using ledger::BlockNumber;
using ledger::PayIndex;
using ledger::SlotId;

struct LogLine
{
    BlockNumber block = 0;
    std::string actor;
    std::string text;

    std::string str() const { return std::to_string(block) + " " + actor + " " + text; }
};

class NotaryActor;

/// Shared handles an actor acts through. Owned by the engine.
class World
{
public:
    World(ledger::Ledger& ledger, exchange::OrderRegistry& registry, net::Network& net, Rng& rng)
        : ledger(ledger), registry(registry), net(net), rng(rng)
    {
    }

    ledger::Ledger& ledger;
    exchange::OrderRegistry& registry;
    net::Network& net;
    Rng& rng;

    BlockNumber block() const { return ledger.block(); }

    void log(const std::string& actor, std::string text) { logs_.push_back({block(), actor, std::move(text)}); }
    const std::vector<LogLine>& logs() const { return logs_; }

    /// Published notary directory: address -> notary service.
    void publish_notary(NotaryActor* n);
    NotaryActor* notary(const Address& a) const;
    NotaryActor* notary(const std::string& name) const;

private:
    std::vector<LogLine> logs_;
    std::map<Address, NotaryActor*> notaries_;
};

class Actor : public net::Inbox
{
public:
    Actor(World& world, std::string name, crypto::SigningKeyPair key);

    const std::string& name() const { return name_; }
    const crypto::SigningKeyPair& key() const { return key_; }
    const Address& address() const { return key_.address; }
    std::optional<AccountId> account() const { return world_.ledger.account_of(address()); }

    /// Runs once at genesis, in actor order.
    virtual void setup() {}
    virtual void on_block() {}

    void on_message(const std::string& url, const Bytes& sealed, BlockNumber block) override;

    std::uint64_t discarded_messages() const { return discarded_; }

protected:
    virtual void handle(const Message& m, const crypto::OpenedMessage& env) = 0;
    void log(std::string text) { world_.log(name_, std::move(text)); }
    /// Runs a ledger or exchange call; logs and swallows its error.
    template <typename F>
    bool attempt(const std::string& what, F&& fn);
    void post(const std::string& url, const Message& m);

    World& world_;
    std::string name_;
    crypto::SigningKeyPair key_;
    std::uint64_t discarded_ = 0;
};

// ---------------------------------------------------------------------------

struct ChallengerPolicy
{
    /// Challenge collects whose declared amount differs from the honest sum.
    bool honest = false;
    /// Challenge every collect once, honest or not.
    bool spurious = false;
};

struct OrderPlan
{
    BlockNumber create_block = 1;
    exchange::AudienceQuery audience;
    std::vector<exchange::DataQuery> requested;
    Amount price = 1;
    std::string tc_text;
    std::string intended_use;
    std::vector<std::string> notaries;
    BlockNumber response_window = 5;
    /// 0 means no limit.
    std::size_t max_sellers = 0;
};

struct BuyerConfig
{
    Amount tokens = 0;
    Amount deposit = 0;
    std::string description;
    std::vector<OrderPlan> orders;
    ChallengerPolicy challenger;
};

enum class BatchStatus
{
    requested,
    aborted,
    nothing_to_pay,
    registered,
    unlocked,
    refunded,
};

const char* to_string(BatchStatus s);

/// One notarization round: the sellers sent to one notary for one order.
struct Batch
{
    Address notary;
    AccountId notary_id = 0;
    Amount fee = 0;
    crypto::PublicKey notary_pk;
    std::vector<SellerEntry> sellers;
    std::map<Address, crypto::Ciphertext> data;
    BatchStatus status = BatchStatus::requested;
    std::string detail;
    std::optional<NotarizationResponse> response;
    std::optional<PayIndex> pay_index;
    Amount balance_before_escrow = 0;
    Amount balance_after_refund = 0;
    std::map<Address, Bytes> recovered;
    std::vector<std::string> notary_faults;
};

struct ReceivedResponse
{
    DataResponse response;
    BlockNumber block = 0;
};

struct BuyerOrder
{
    OrderPlan plan;
    std::optional<exchange::OrderId> id;
    std::string url;
    exchange::BuyerOrderInfo info;
    bool selected = false;
    std::vector<ReceivedResponse> responses;
    std::uint64_t discarded = 0;
    std::vector<Batch> batches;
};

class BuyerActor : public Actor
{
public:
    BuyerActor(World& world, std::string name, crypto::SigningKeyPair key, BuyerConfig cfg);

    void setup() override;
    void on_block() override;

    const std::vector<BuyerOrder>& orders() const { return orders_; }
    const std::string& url() const { return url_; }
    const std::set<SlotId>& challenged() const { return challenged_; }

protected:
    void handle(const Message& m, const crypto::OpenedMessage& env) override;

private:
    void create(BuyerOrder& o);
    void select(BuyerOrder& o);
    void on_response(const DataResponse& r, const crypto::OpenedMessage& env);
    void on_notarization(const NotarizationResponse& r, const crypto::OpenedMessage& env);
    void watch_payment(Batch& b);
    void monitor();

    BuyerConfig cfg_;
    std::string url_;
    std::vector<BuyerOrder> orders_;
    std::set<SlotId> challenged_;
};

// ---------------------------------------------------------------------------

struct SellerBehavior
{
    bool fabricating = false;
    bool greedy = false;
};

struct SellerConfig
{
    Amount tokens = 0;
    /// Deposited into BatPay once registered, to back collect stakes.
    Amount stake_deposit = 0;
    bool registered = true;
    exchange::SellerProfile profile;
    SellerPolicy policy;
    std::size_t collect_threshold = 1;
    /// Empty: collect directly.
    std::string delegate_url;
    Amount delegate_fee_limit = 0;
    bool withdraw = true;
    SellerBehavior behavior;
};

struct Sale
{
    exchange::OrderId order_id = 0;
    Address notary;
    Bytes payload;
    SymKey key;
    crypto::Ciphertext data;
};

class SellerActor : public Actor
{
public:
    SellerActor(World& world, std::string name, crypto::SigningKeyPair key, SellerConfig cfg);

    void setup() override;
    void on_block() override;
    void on_event(const Bytes& event, BlockNumber block) override;

    const std::vector<Sale>& sales() const { return sales_; }
    const std::vector<SlotId>& slots() const { return slots_; }
    const SellerConfig& config() const { return cfg_; }
    Amount withdrawn() const { return withdrawn_; }

protected:
    void handle(const Message&, const crypto::OpenedMessage&) override {}

private:
    void consider(const exchange::OrderCreated& e);
    void settle(AccountId id);
    void play(AccountId id, const ledger::CollectSlot& s);

    SellerConfig cfg_;
    std::vector<exchange::OrderCreated> inbox_;
    std::vector<Sale> sales_;
    std::vector<SlotId> slots_;
    bool funded_ = false;
    BlockNumber relay_wait_until_ = 0;
    std::set<SlotId> withdrawn_slots_;
    Amount withdrawn_ = 0;
};

// ---------------------------------------------------------------------------

struct NotaryConfig
{
    Amount tokens = 0;
    std::string terms;
    NotaryPolicy policy;
    /// Never unlocks.
    bool silent = false;
    std::map<Address, DataStore> ground_truth;
};

struct PendingUnlock
{
    exchange::OrderId order_id = 0;
    crypto::Lock lock;
    SymKey master_key;
    bool done = false;
};

class NotaryActor : public Actor
{
public:
    NotaryActor(World& world, std::string name, crypto::SigningKeyPair key, NotaryConfig cfg);

    void setup() override;
    void on_block() override;

    const std::string& url() const { return url_; }
    /// The signed offer a buyer lists in its order info.
    exchange::NotaryOffer offer(exchange::OrderId order) const;
    const NotaryConfig& config() const { return cfg_; }
    const std::vector<Notarization>& notarizations() const { return done_; }
    const std::vector<PendingUnlock>& unlocks() const { return unlocks_; }

protected:
    void handle(const Message& m, const crypto::OpenedMessage& env) override;

private:
    NotaryConfig cfg_;
    std::string url_;
    std::map<exchange::OrderId, std::map<Address, SellerNotaryMsg>> seller_msgs_;
    std::vector<NotarizationRequest> requests_;
    std::vector<Notarization> done_;
    std::vector<PendingUnlock> unlocks_;
    PayIndex scanned_ = 0;
};

// ---------------------------------------------------------------------------

struct DelegateConfig
{
    Amount tokens = 0;
    Amount fee = 0;
};

class DelegateActor : public Actor
{
public:
    DelegateActor(World& world, std::string name, crypto::SigningKeyPair key, DelegateConfig cfg);

    void setup() override;
    void on_block() override;

    const std::string& url() const { return url_; }
    std::uint64_t relayed() const { return relayed_; }

protected:
    void handle(const Message& m, const crypto::OpenedMessage& env) override;

private:
    DelegateConfig cfg_;
    std::string url_;
    std::vector<ledger::SignedOp> queue_;
    std::uint64_t relayed_ = 0;
};

} // namespace wibson::actors

namespace wibson::actors {

template <typename F>
bool Actor::attempt(const std::string& what, F&& fn)
{
    try {
        fn();
        return true;
    } catch (const ledger::LedgerError& e) {
        log(what + " failed: " + e.what());
    } catch (const exchange::ExchangeError& e) {
        log(what + " failed: " + e.what());
    } catch (const net::NetError& e) {
        log(what + " failed: " + e.what());
    }
    return false;
}

} // namespace wibson::actors
