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

#include "wibson/exchange/exchange.hpp"

namespace wibson::exchange {

Bytes OrderCreated::encode() const
{
    ByteWriter w;
    w.u64(order_id).fixed(buyer).str(buyer_url).u64(block);
    return std::move(w).bytes();
}

OrderCreated OrderCreated::decode(ByteView raw)
{
    ByteReader r(raw);
    OrderCreated e;
    e.order_id = r.u64();
    e.buyer = r.fixed<Address>();
    e.buyer_url = r.str();
    e.block = r.u64();
    r.expect_done();
    return e;
}

OrderRegistry::OrderRegistry(ledger::Ledger& ledger, OntologySchema schema)
    : ledger_(ledger), schema_(std::move(schema))
{
}

const DataOrder& OrderRegistry::order(OrderId id) const
{
    if (id >= orders_.size())
        throw ExchangeError(ExchangeErrc::unknown_order, "order " + std::to_string(id));
    return orders_[id];
}

OrderId OrderRegistry::create_order(const Address& buyer, OrderFields fields)
{
    try {
        if (!ledger_.account_of(buyer))
            throw ExchangeError(ExchangeErrc::unregistered_buyer, buyer.hex());
        fields.audience.validate(schema_);
        for (const auto& q : fields.requested)
            q.validate(schema_);
        if (fields.price == 0)
            throw ExchangeError(ExchangeErrc::invalid_order, "price must be positive");
        if (fields.buyer_url.empty())
            throw ExchangeError(ExchangeErrc::invalid_order, "missing buyer url");
    } catch (const ExchangeError& e) {
        ledger_.record_external(ledger::TxKind::create_order, buyer, false, to_string(e.code()));
        throw;
    }

    DataOrder o;
    o.id = orders_.size();
    o.buyer = buyer;
    o.audience = std::move(fields.audience);
    o.requested = std::move(fields.requested);
    o.price = fields.price;
    o.tc_hash = fields.tc_hash;
    o.buyer_url = std::move(fields.buyer_url);
    o.created_block = ledger_.block();
    ledger_.record_external(ledger::TxKind::create_order, buyer, true, "order " + std::to_string(o.id));
    orders_.push_back(std::move(o));

    const auto& stored = orders_.back();
    if (sink_)
        sink_(OrderCreated{stored.id, stored.buyer, stored.buyer_url, stored.created_block});
    return stored.id;
}

void OrderRegistry::close_order(const Address& sender, OrderId id)
{
    try {
        const auto& o = order(id);
        if (o.buyer != sender)
            throw ExchangeError(ExchangeErrc::not_owner, "order " + std::to_string(id));
        if (o.status == OrderStatus::closed)
            throw ExchangeError(ExchangeErrc::already_closed, "order " + std::to_string(id));
    } catch (const ExchangeError& e) {
        ledger_.record_external(ledger::TxKind::close_order, sender, false, to_string(e.code()));
        throw;
    }
    orders_[id].status = OrderStatus::closed;
    ledger_.record_external(ledger::TxKind::close_order, sender, true, "order " + std::to_string(id));
}

// ---------------------------------------------------------------------------

Bytes NotaryOffer::signing_bytes(OrderId order, ledger::AccountId notary_id, Amount fee, const std::string& terms)
{
    ByteWriter w;
    w.str("wibson.notary.offer.v1").u64(order).u32(notary_id).u64(fee).str(terms);
    return std::move(w).bytes();
}

NotaryOffer NotaryOffer::make(const crypto::SigningKeyPair& notary, ledger::AccountId notary_id, OrderId order,
                              Amount fee, std::string terms)
{
    NotaryOffer o;
    o.notary_id = notary_id;
    o.notary_address = notary.address;
    o.notary_pk = notary.public_key;
    o.fee = fee;
    o.terms = std::move(terms);
    o.signature = crypto::sign(notary.secret, signing_bytes(order, notary_id, o.fee, o.terms));
    return o;
}

bool NotaryOffer::verify(OrderId order) const
{
    return crypto::address_of(notary_pk) == notary_address &&
           crypto::verify(notary_pk, signing_bytes(order, notary_id, fee, terms), signature);
}

Bytes BuyerOrderInfo::encode() const
{
    ByteWriter w;
    w.u64(order_id).fixed(buyer_pk).str(name).str(description).str(logo).str(tc_text).str(intended_use);
    w.u32(static_cast<std::uint32_t>(notaries.size()));
    for (const auto& n : notaries)
        w.u32(n.notary_id).fixed(n.notary_address).fixed(n.notary_pk).u64(n.fee).str(n.terms).fixed(n.signature);
    return std::move(w).bytes();
}

BuyerOrderInfo BuyerOrderInfo::decode(ByteView raw)
{
    ByteReader r(raw);
    BuyerOrderInfo info;
    info.order_id = r.u64();
    info.buyer_pk = r.fixed<crypto::PublicKey>();
    info.name = r.str();
    info.description = r.str();
    info.logo = r.str();
    info.tc_text = r.str();
    info.intended_use = r.str();
    const auto n = r.u32();
    for (std::uint32_t i = 0; i < n; ++i) {
        NotaryOffer o;
        o.notary_id = r.u32();
        o.notary_address = r.fixed<Address>();
        o.notary_pk = r.fixed<crypto::PublicKey>();
        o.fee = r.u64();
        o.terms = r.str();
        o.signature = r.fixed<crypto::Signature>();
        info.notaries.push_back(std::move(o));
    }
    r.expect_done();
    return info;
}

bool validate_buyer_info(const BuyerOrderInfo& info, const DataOrder& order)
{
    if (info.order_id != order.id || crypto::hash(as_bytes(info.tc_text)) != order.tc_hash)
        return false;
    for (const auto& n : info.notaries)
        if (!n.verify(order.id))
            return false;
    return true;
}

} // namespace wibson::exchange
