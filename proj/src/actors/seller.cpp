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

SellerActor::SellerActor(World& world, std::string name, crypto::SigningKeyPair key, SellerConfig cfg)
    : Actor(world, std::move(name), std::move(key)), cfg_(std::move(cfg))
{
}

void SellerActor::setup()
{
    world_.net.subscribe(this);
    if (cfg_.registered)
        attempt("register", [&] { world_.ledger.register_account(address(), address()); });
}

void SellerActor::on_event(const Bytes& event, BlockNumber)
{
    try {
        inbox_.push_back(exchange::OrderCreated::decode(event));
    } catch (const DecodeError&) {
        ++discarded_;
    }
}

void SellerActor::on_block()
{
    auto events = std::move(inbox_);
    inbox_.clear();
    for (const auto& e : events)
        consider(e);

    const auto id = account();
    if (!id)
        return;
    if (!funded_) {
        funded_ = true;
        if (cfg_.stake_deposit > 0)
            attempt("deposit stake", [&] { world_.ledger.deposit(address(), *id, cfg_.stake_deposit); });
    }
    settle(*id);
}

void SellerActor::consider(const exchange::OrderCreated& e)
{
    const auto tag = "order " + std::to_string(e.order_id) + ": ";
    exchange::DataOrder order;
    if (!attempt("read order", [&] { order = world_.registry.order(e.order_id); }))
        return;
    auto raw = world_.net.fetch(order.buyer_url + "/" + std::to_string(order.id));
    if (!raw) {
        log(tag + "no buyer info published");
        return;
    }
    exchange::BuyerOrderInfo info;
    try {
        info = exchange::BuyerOrderInfo::decode(*raw);
    } catch (const DecodeError& err) {
        log(tag + "unreadable buyer info: " + err.what());
        return;
    }

    const auto d = seller_evaluate_order(cfg_.policy, world_.registry.schema(), cfg_.profile, order, info);
    if (!d.accept) {
        log(tag + "declined: " + d.reason);
        return;
    }
    auto* notary = world_.notary(d.notary->notary_address);
    if (!notary) {
        log(tag + "declined: notary unreachable");
        return;
    }

    Sale sale;
    sale.order_id = order.id;
    sale.notary = d.notary->notary_address;
    sale.payload = exchange::extract_requested(cfg_.profile, order.requested);
    if (cfg_.behavior.fabricating)
        sale.payload = fabricate_payload(sale.payload);
    sale.key = world_.rng.fixed<SymKey>();
    sale.data = crypto::sym_encrypt(sale.key, sale.payload, world_.rng);

    const auto id = account();
    DataResponse resp{order.id, id, address(), sale.notary, sale.data, !id.has_value()};
    post(order.buyer_url, resp);
    SellerNotaryMsg to_notary{order.id, id, address(), sale.data, sale.key};
    post(notary->url(), to_notary);
    log(tag + "sold via notary " + notary->name());
    sales_.push_back(std::move(sale));
}

void SellerActor::settle(AccountId id)
{
    auto& ledger = world_.ledger;
    if (auto open = ledger.open_slot_of(id)) {
        const auto& s = ledger.slot(*open);
        if (std::find(slots_.begin(), slots_.end(), s.id) == slots_.end())
            slots_.push_back(s.id);
        play(id, s);
        return;
    }

    for (auto sid : slots_) {
        const auto& s = ledger.slot(sid);
        if (s.status != ledger::SlotStatus::settled_ok || withdrawn_slots_.count(sid))
            continue;
        withdrawn_slots_.insert(sid);
        if (!cfg_.withdraw)
            continue;
        const auto amount = std::min(s.declared_amount, ledger.account(id).balance);
        if (amount > 0 && attempt("withdraw", [&] { ledger.withdraw(address(), id, amount, address()); }))
            withdrawn_ += amount;
    }

    if (world_.block() < relay_wait_until_)
        return;
    const auto& acct = ledger.account(id);
    const auto from = acct.next_collect_index;
    const auto to = settled_range_end(ledger, id, from);
    if (!to)
        return;
    const auto inc = ledger::inclusions(ledger, id, from, *to);
    if (inc.empty() || inc.size() < cfg_.collect_threshold)
        return;
    const auto declared = ledger::honest_collect_amount(ledger, id, from, *to) + (cfg_.behavior.greedy ? 1 : 0);
    const auto stake = ledger.params().collect_stake;

    if (cfg_.delegate_url.empty()) {
        if (acct.balance < stake)
            return;
        SlotId sid = 0;
        if (attempt("collect", [&] { sid = ledger.collect(address(), id, *to, declared, stake); })) {
            slots_.push_back(sid);
            log("collect [" + std::to_string(from) + ", " + std::to_string(*to) + "] declared " +
                std::to_string(declared));
        }
        return;
    }
    if (acct.balance < stake + cfg_.delegate_fee_limit)
        return;
    auto op = ledger::SignedOp::make(key_, id, acct.next_nonce, cfg_.delegate_fee_limit,
                                     ledger::CollectOp{*to, declared, stake});
    post(cfg_.delegate_url, RelayRequest{op});
    relay_wait_until_ = world_.block() + 2 * world_.net.config().delay_for(cfg_.delegate_url) + 2;
    log("relayed collect [" + std::to_string(from) + ", " + std::to_string(*to) + "] declared " +
        std::to_string(declared));
}

void SellerActor::play(AccountId id, const ledger::CollectSlot& s)
{
    auto& ledger = world_.ledger;
    const auto now = world_.block();
    switch (s.status) {
    case ledger::SlotStatus::open:
        if (now > s.deadline)
            attempt("finalize", [&] { ledger.finalize_collect(address(), s.id); });
        break;
    case ledger::SlotStatus::challenged: {
        auto list = ledger::inclusions(ledger, id, s.from_index, s.to_index);
        attempt("respond", [&] { ledger.challenge_respond_list(address(), s.id, list); });
        break;
    }
    case ledger::SlotStatus::awaiting_proof:
        attempt("prove", [&] { ledger.challenge_prove_inclusion(address(), s.id, ledger.pay_data_calldata(*s.picked)); });
        break;
    case ledger::SlotStatus::awaiting_pick:
        if (now > s.phase_deadline)
            attempt("timeout", [&] { ledger.timeout_resolve(address(), s.id); });
        break;
    default:
        break;
    }
}

} // namespace wibson::actors
