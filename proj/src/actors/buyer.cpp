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

#include <algorithm>

namespace wibson::actors {

void World::publish_notary(NotaryActor* n)
{
    notaries_[n->address()] = n;
}

NotaryActor* World::notary(const Address& a) const
{
    auto it = notaries_.find(a);
    return it == notaries_.end() ? nullptr : it->second;
}

NotaryActor* World::notary(const std::string& name) const
{
    for (const auto& [addr, n] : notaries_)
        if (n->name() == name)
            return n;
    return nullptr;
}

Actor::Actor(World& world, std::string name, crypto::SigningKeyPair key)
    : world_(world), name_(std::move(name)), key_(std::move(key))
{
}

void Actor::on_message(const std::string& url, const Bytes& sealed, BlockNumber)
{
    try {
        auto env = crypto::open_message(key_, sealed);
        auto m = decode_message(env.payload);
        handle(m, env);
    } catch (const crypto::CryptoError& e) {
        ++discarded_;
        log("discarded message on " + url + ": " + e.what());
    } catch (const DecodeError& e) {
        ++discarded_;
        log("discarded message on " + url + ": " + e.what());
    }
}

void Actor::post(const std::string& url, const Message& m)
{
    attempt("post to " + url, [&] { world_.net.post(key_, url, encode_message(m), world_.block()); });
}

const char* to_string(BatchStatus s)
{
    switch (s) {
    case BatchStatus::requested:
        return "requested";
    case BatchStatus::aborted:
        return "aborted";
    case BatchStatus::nothing_to_pay:
        return "nothing_to_pay";
    case BatchStatus::registered:
        return "registered";
    case BatchStatus::unlocked:
        return "unlocked";
    case BatchStatus::refunded:
        return "refunded";
    }
    return "unknown";
}

// ---------------------------------------------------------------------------

BuyerActor::BuyerActor(World& world, std::string name, crypto::SigningKeyPair key, BuyerConfig cfg)
    : Actor(world, std::move(name), std::move(key)), cfg_(std::move(cfg)), url_(name_ + "/orders")
{
    for (auto& plan : cfg_.orders)
        orders_.push_back(BuyerOrder{plan, std::nullopt, url_, {}, false, {}, 0, {}});
}

void BuyerActor::setup()
{
    world_.net.register_endpoint(url_, key_.public_key, this);
    attempt("register", [&] { world_.ledger.register_account(address(), address()); });
    if (cfg_.deposit > 0)
        attempt("deposit", [&] { world_.ledger.deposit(address(), *account(), cfg_.deposit); });
}

void BuyerActor::on_block()
{
    const auto now = world_.block();
    for (auto& o : orders_) {
        if (!o.id && now >= o.plan.create_block)
            create(o);
        if (o.id && !o.selected && now >= world_.registry.order(*o.id).created_block + o.plan.response_window)
            select(o);
        for (auto& b : o.batches)
            if (b.status == BatchStatus::registered)
                watch_payment(b);
    }
    monitor();
}

void BuyerActor::create(BuyerOrder& o)
{
    exchange::OrderFields f;
    f.audience = o.plan.audience;
    f.requested = o.plan.requested;
    f.price = o.plan.price;
    f.tc_hash = crypto::hash(o.plan.tc_text);
    f.buyer_url = url_;
    exchange::OrderId id = 0;
    if (!attempt("create_order", [&] { id = world_.registry.create_order(address(), f); })) {
        o.plan.create_block = UINT64_MAX;
        return;
    }
    o.id = id;

    auto& info = o.info;
    info.order_id = id;
    info.buyer_pk = key_.public_key;
    info.name = name_;
    info.description = cfg_.description;
    info.tc_text = o.plan.tc_text;
    info.intended_use = o.plan.intended_use;
    for (const auto& n : o.plan.notaries) {
        auto* notary = world_.notary(n);
        if (!notary || !notary->account()) {
            log("order " + std::to_string(id) + ": notary " + n + " unavailable");
            continue;
        }
        info.notaries.push_back(notary->offer(id));
    }
    world_.net.publish(url_ + "/" + std::to_string(id), info.encode());
    log("created order " + std::to_string(id) + " price " + std::to_string(o.plan.price) + " with " +
        std::to_string(info.notaries.size()) + " notaries");
}

void BuyerActor::handle(const Message& m, const crypto::OpenedMessage& env)
{
    if (const auto* r = std::get_if<DataResponse>(&m))
        on_response(*r, env);
    else if (const auto* n = std::get_if<NotarizationResponse>(&m))
        on_notarization(*n, env);
    else {
        ++discarded_;
        log("unexpected message from " + env.sender_address.hex());
    }
}

void BuyerActor::on_response(const DataResponse& r, const crypto::OpenedMessage& env)
{
    auto it = std::find_if(orders_.begin(), orders_.end(), [&](const BuyerOrder& o) { return o.id == r.order_id; });
    auto reject = [&](const std::string& why) {
        ++discarded_;
        if (it != orders_.end())
            ++it->discarded;
        log("discarded response for order " + std::to_string(r.order_id) + " from " + env.sender_address.hex() +
            ": " + why);
    };
    if (it == orders_.end())
        return reject("unknown order");
    if (it->selected)
        return reject("order closed");
    if (env.sender_address != r.seller_address)
        return reject("sender is not the named seller");
    if (r.needs_buyer_registration == r.seller_id.has_value())
        return reject("needs exactly one of seller id or registration request");
    if (r.seller_id) {
        if (*r.seller_id >= world_.ledger.account_count() ||
            world_.ledger.account(*r.seller_id).address != r.seller_address)
            return reject("seller id does not belong to sender");
    }
    const auto& offers = it->info.notaries;
    if (std::none_of(offers.begin(), offers.end(),
                     [&](const exchange::NotaryOffer& n) { return n.notary_address == r.notary_address; }))
        return reject("notary not offered");
    for (const auto& prev : it->responses)
        if (prev.response.seller_address == r.seller_address)
            return reject("duplicate response");
    it->responses.push_back({r, world_.block()});
}

void BuyerActor::select(BuyerOrder& o)
{
    o.selected = true;
    attempt("close_order", [&] { world_.registry.close_order(address(), *o.id); });

    std::size_t take = o.responses.size();
    if (o.plan.max_sellers > 0)
        take = std::min(take, o.plan.max_sellers);

    std::map<Address, Batch> batches;
    for (std::size_t i = 0; i < take; ++i) {
        const auto& r = o.responses[i].response;
        AccountId sid = 0;
        if (r.seller_id)
            sid = *r.seller_id;
        else if (auto existing = world_.ledger.account_of(r.seller_address))
            sid = *existing;
        else if (!attempt("register seller " + r.seller_address.hex(),
                          [&] { sid = world_.ledger.register_account(address(), r.seller_address); }))
            continue;

        auto& b = batches[r.notary_address];
        if (b.sellers.empty()) {
            const auto& offer = *std::find_if(o.info.notaries.begin(), o.info.notaries.end(),
                                              [&](const auto& n) { return n.notary_address == r.notary_address; });
            b.notary = offer.notary_address;
            b.notary_id = offer.notary_id;
            b.fee = offer.fee;
            b.notary_pk = offer.notary_pk;
        }
        b.sellers.push_back({sid, r.seller_address, crypto::hash(r.data.encode())});
        b.data[r.seller_address] = r.data;
    }

    log("order " + std::to_string(*o.id) + ": selected " + std::to_string(take) + " of " +
        std::to_string(o.responses.size()) + " responses");
    for (auto& [addr, b] : batches) {
        auto* notary = world_.notary(addr);
        NotarizationRequest rq{*o.id, url_, b.sellers};
        post(notary->url(), rq);
        o.batches.push_back(std::move(b));
    }
}

void BuyerActor::on_notarization(const NotarizationResponse& r, const crypto::OpenedMessage& env)
{
    auto it = std::find_if(orders_.begin(), orders_.end(), [&](const BuyerOrder& o) { return o.id == r.order_id; });
    Batch* batch = nullptr;
    if (it != orders_.end())
        for (auto& b : it->batches)
            if (b.notary == env.sender_address && b.status == BatchStatus::requested)
                batch = &b;
    if (!batch) {
        ++discarded_;
        log("unexpected notarization for order " + std::to_string(r.order_id));
        return;
    }
    auto& b = *batch;
    auto abort = [&](const std::string& why) {
        b.status = BatchStatus::aborted;
        b.detail = why;
        log("order " + std::to_string(r.order_id) + ": batch aborted: " + why);
    };

    if (!r.verify(b.notary_pk))
        return abort("SignatureInvalid");
    b.response = r;
    bool same = r.results.size() == b.sellers.size();
    for (std::size_t i = 0; same && i < r.results.size(); ++i)
        same = r.results[i].id == b.sellers[i].id && r.results[i].address == b.sellers[i].address &&
               (r.results[i].verdict == Verdict::rejected || r.results[i].encrypted_key.has_value());
    if (!same)
        return abort("ResultMismatch");
    if (r.fee != b.fee)
        return abort("FeeMismatch");

    const auto ids = r.payable_ids();
    if (ids.empty()) {
        b.status = BatchStatus::nothing_to_pay;
        b.detail = "every seller rejected";
        log("order " + std::to_string(r.order_id) + ": nothing to pay");
        return;
    }
    const auto pd = ledger::encode_pay_data(ids);
    if (pd.hash() != r.pay_data_hash)
        return abort("PayDataMismatch");

    const auto me = *account();
    b.balance_before_escrow = world_.ledger.account(me).balance;
    PayIndex idx = 0;
    const bool ok = attempt("register_payment", [&] {
        idx = world_.ledger.register_payment(address(), me, it->plan.price, pd, r.lock, b.fee, b.notary);
    });
    if (!ok)
        return abort("register_payment failed");
    b.pay_index = idx;
    b.status = BatchStatus::registered;
    log("order " + std::to_string(r.order_id) + ": registered payment " + std::to_string(idx) + " for " +
        std::to_string(ids.size()) + " sellers");
}

void BuyerActor::watch_payment(Batch& b)
{
    const auto& p = world_.ledger.payment(*b.pay_index);
    if (p.unlocked) {
        b.status = BatchStatus::unlocked;
        for (const auto& r : b.response->results) {
            if (r.verdict == Verdict::rejected)
                continue;
            try {
                b.recovered[r.address] =
                    recover_data(p.lock, b.notary_id, *p.master_key, *r.encrypted_key, b.data.at(r.address));
            } catch (const RecoveryError& e) {
                b.notary_faults.push_back(r.address.hex() + ": " + to_string(e.code) + ": " + e.what());
                log("payment " + std::to_string(p.pay_index) + ": " + to_string(e.code) + " for seller " +
                    r.address.hex() + " (" + e.what() + ")");
            }
        }
        log("payment " + std::to_string(p.pay_index) + ": recovered " + std::to_string(b.recovered.size()) +
            " payloads");
        return;
    }
    if (world_.block() > p.block + world_.ledger.params().unlock_timeout_blocks) {
        if (attempt("refund", [&] { world_.ledger.refund_locked_payment(address(), p.pay_index); })) {
            b.status = BatchStatus::refunded;
            b.balance_after_refund = world_.ledger.account(*account()).balance;
            log("payment " + std::to_string(p.pay_index) + ": refunded");
        }
    }
}

void BuyerActor::monitor()
{
    const auto& pol = cfg_.challenger;
    if (!pol.honest && !pol.spurious)
        return;
    const auto me = account();
    if (!me)
        return;
    auto& ledger = world_.ledger;
    const auto now = world_.block();
    for (const auto& s : ledger.slots()) {
        if (s.settled())
            continue;
        if (s.status == ledger::SlotStatus::open) {
            if (challenged_.count(s.id) || s.account == *me || now > s.deadline)
                continue;
            const auto honest = ledger::honest_collect_amount(ledger, s.account, s.from_index, s.to_index);
            if ((pol.honest && s.declared_amount != honest) || pol.spurious) {
                challenged_.insert(s.id);
                if (attempt("challenge slot " + std::to_string(s.id), [&] { ledger.challenge_open(address(), s.id); }))
                    log("challenged slot " + std::to_string(s.id) + " declared " + std::to_string(s.declared_amount) +
                        " honest " + std::to_string(honest));
            }
            continue;
        }
        if (s.challenger != address())
            continue;
        if (s.status == ledger::SlotStatus::awaiting_pick) {
            const auto valid = ledger::inclusions(ledger, s.account, s.from_index, s.to_index);
            PayIndex pick = s.response->front();
            for (auto idx : *s.response)
                if (!std::binary_search(valid.begin(), valid.end(), idx)) {
                    pick = idx;
                    break;
                }
            attempt("pick", [&] { ledger.challenge_pick(address(), s.id, pick); });
        } else if (now > s.phase_deadline) {
            attempt("timeout", [&] { ledger.timeout_resolve(address(), s.id); });
        }
    }
}

} // namespace wibson::actors
