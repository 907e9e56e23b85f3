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

#include "wibson/actors/actors.hpp"

namespace wibson::actors {

NotaryActor::NotaryActor(World& world, std::string name, crypto::SigningKeyPair key, NotaryConfig cfg)
    : Actor(world, std::move(name), std::move(key)), cfg_(std::move(cfg)), url_(name_ + "/notarize")
{
}

void NotaryActor::setup()
{
    world_.net.register_endpoint(url_, key_.public_key, this);
    attempt("register", [&] { world_.ledger.register_account(address(), address()); });
    world_.publish_notary(this);
}

exchange::NotaryOffer NotaryActor::offer(exchange::OrderId order) const
{
    return exchange::NotaryOffer::make(key_, *account(), order, cfg_.policy.fee, cfg_.terms);
}

void NotaryActor::handle(const Message& m, const crypto::OpenedMessage& env)
{
    if (const auto* s = std::get_if<SellerNotaryMsg>(&m)) {
        if (env.sender_address != s->seller_address) {
            ++discarded_;
            log("discarded seller message: sender is not the named seller");
            return;
        }
        seller_msgs_[s->order_id].insert_or_assign(s->seller_address, *s);
        return;
    }
    if (const auto* r = std::get_if<NotarizationRequest>(&m)) {
        bool from_buyer = false;
        try {
            from_buyer = world_.registry.order(r->order_id).buyer == env.sender_address;
        } catch (const exchange::ExchangeError&) {
        }
        if (!from_buyer) {
            ++discarded_;
            log("discarded notarization request for order " + std::to_string(r->order_id) + ": not from its buyer");
            return;
        }
        requests_.push_back(*r);
        return;
    }
    ++discarded_;
    log("unexpected message from " + env.sender_address.hex());
}

void NotaryActor::on_block()
{
    const auto id = account();
    if (!id)
        return;

    auto requests = std::move(requests_);
    requests_.clear();
    for (const auto& rq : requests) {
        auto n = notarize(cfg_.policy, key_, *id, rq, seller_msgs_[rq.order_id], cfg_.ground_truth, world_.rng);
        std::size_t approved = 0, rejected = 0, skipped = 0;
        for (const auto& r : n.response.results) {
            approved += r.verdict == Verdict::approved;
            rejected += r.verdict == Verdict::rejected;
            skipped += r.verdict == Verdict::not_notarized;
        }
        log("order " + std::to_string(rq.order_id) + ": notarized " + std::to_string(rq.sellers.size()) +
            " sellers, approved " + std::to_string(approved) + " rejected " + std::to_string(rejected) +
            " not audited " + std::to_string(skipped));
        post(rq.callback_url, n.response);
        unlocks_.push_back({rq.order_id, n.response.lock, n.master_key, false});
        done_.push_back(std::move(n));
    }

    auto& ledger = world_.ledger;
    const auto count = ledger.payment_count();
    for (; scanned_ < count; ++scanned_) {
        const auto& p = ledger.payment(scanned_);
        if (p.notary_address != address())
            continue;
        for (auto& u : unlocks_) {
            if (u.done || u.lock != p.lock)
                continue;
            u.done = true;
            if (cfg_.silent) {
                log("payment " + std::to_string(p.pay_index) + ": withholding key");
                break;
            }
            const auto idx = p.pay_index;
            if (attempt("unlock", [&] { ledger.unlock_payment(address(), idx, *id, u.master_key); }))
                log("payment " + std::to_string(idx) + ": unlocked");
            break;
        }
    }
}

// ---------------------------------------------------------------------------

DelegateActor::DelegateActor(World& world, std::string name, crypto::SigningKeyPair key, DelegateConfig cfg)
    : Actor(world, std::move(name), std::move(key)), cfg_(cfg), url_(name_ + "/relay")
{
}

void DelegateActor::setup()
{
    world_.net.register_endpoint(url_, key_.public_key, this);
    attempt("register", [&] { world_.ledger.register_account(address(), address()); });
}

void DelegateActor::handle(const Message& m, const crypto::OpenedMessage& env)
{
    if (const auto* r = std::get_if<RelayRequest>(&m)) {
        queue_.push_back(r->op);
        return;
    }
    ++discarded_;
    log("unexpected message from " + env.sender_address.hex());
}

void DelegateActor::on_block()
{
    const auto id = account();
    auto queue = std::move(queue_);
    queue_.clear();
    if (!id)
        return;
    for (const auto& op : queue) {
        if (attempt("relay for account " + std::to_string(op.originator),
                    [&] { world_.ledger.submit_delegated(address(), *id, op, cfg_.fee); }))
            ++relayed_;
    }
}

} // namespace wibson::actors
