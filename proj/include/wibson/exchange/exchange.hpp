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

#include "wibson/crypto/crypto.hpp"
#include "wibson/ledger/ledger.hpp"

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace wibson::exchange {

using ledger::Amount;
using ledger::BlockNumber;
using OrderId = std::uint64_t;

enum class ExchangeErrc
{
    schema_violation,
    unregistered_buyer,
    not_owner,
    already_closed,
    unknown_order,
    missing_entity,
    invalid_order,
};

const char* to_string(ExchangeErrc code);

class ExchangeError : public std::runtime_error
{
public:
    ExchangeError(ExchangeErrc code, const std::string& detail)
        : std::runtime_error(std::string(to_string(code)) + (detail.empty() ? "" : ": " + detail)), code_(code)
    {
    }
    ExchangeErrc code() const { return code_; }

private:
    ExchangeErrc code_;
};

// ---------------------------------------------------------------------------
// Ontology

enum class AttrKind
{
    categorical,
    numeric,
};

/// Categorical values are strings, numeric values integers.
using AttrValue = std::variant<std::int64_t, std::string>;

std::string to_string(const AttrValue& v);

struct ParamRange
{
    std::int64_t min = INT64_MIN;
    std::int64_t max = INT64_MAX;
};

/// Recognised parameters: "start" and "length" select records with
/// time in [start, start + length).
struct EntitySchema
{
    std::map<std::string, ParamRange> params;
};

struct OntologySchema
{
    std::map<std::string, AttrKind> attributes;
    std::map<std::string, EntitySchema> entities;
};

enum class Op
{
    eq,
    ge,
    le,
};

const char* to_string(Op op);
Op parse_op(std::string_view s);

struct Clause
{
    std::string attribute;
    Op op = Op::eq;
    AttrValue value;
};

/// Conjunction of clauses; empty matches everyone.
struct AudienceQuery
{
    std::vector<Clause> clauses;

    void validate(const OntologySchema& schema) const;
    void encode(ByteWriter& w) const;
    static AudienceQuery decode(ByteReader& r);
};

struct DataQuery
{
    std::string entity;
    std::map<std::string, std::int64_t> params;

    void validate(const OntologySchema& schema) const;
    void encode(ByteWriter& w) const;
    static DataQuery decode(ByteReader& r);
};

// ---------------------------------------------------------------------------
// Seller data

using FieldValue = std::variant<std::int64_t, double, std::string>;

struct Record
{
    std::int64_t time = 0;
    std::map<std::string, FieldValue> fields;

    void encode(ByteWriter& w) const;
    static Record decode(ByteReader& r);
    auto operator<=>(const Record&) const = default;
};

using DataStore = std::map<std::string, std::vector<Record>>;

struct SellerProfile
{
    std::map<std::string, AttrValue> attributes;
    DataStore store;

    void validate(const OntologySchema& schema) const;
};

/// One entity's records inside a payload.
struct EntityRecords
{
    std::string entity;
    std::vector<Record> records;
    bool operator==(const EntityRecords&) const = default;
};

Bytes encode_payload(const std::vector<EntityRecords>& payload);
std::vector<EntityRecords> decode_payload(ByteView raw);

bool audience_match(const OntologySchema& schema, const SellerProfile& profile, const AudienceQuery& query);

/// Canonical serialization of the records each query selects, in request order.
Bytes extract_requested(const SellerProfile& profile, const std::vector<DataQuery>& requested);

// ---------------------------------------------------------------------------
// Orders

enum class OrderStatus
{
    open,
    closed,
};

struct DataOrder
{
    OrderId id = 0;
    Address buyer;
    AudienceQuery audience;
    std::vector<DataQuery> requested;
    Amount price = 0;
    Hash32 tc_hash;
    std::string buyer_url;
    OrderStatus status = OrderStatus::open;
    BlockNumber created_block = 0;
};

struct OrderFields
{
    AudienceQuery audience;
    std::vector<DataQuery> requested;
    Amount price = 0;
    Hash32 tc_hash;
    std::string buyer_url;
};

struct OrderCreated
{
    OrderId order_id = 0;
    Address buyer;
    std::string buyer_url;
    BlockNumber block = 0;

    Bytes encode() const;
    static OrderCreated decode(ByteView raw);
};

/// The data-order contract. Shares the ledger's transaction log and gas meter.
class OrderRegistry
{
public:
    using EventSink = std::function<void(const OrderCreated&)>;

    OrderRegistry(ledger::Ledger& ledger, OntologySchema schema);

    OrderId create_order(const Address& buyer, OrderFields fields);
    void close_order(const Address& sender, OrderId id);

    const DataOrder& order(OrderId id) const;
    const std::vector<DataOrder>& orders() const { return orders_; }
    const OntologySchema& schema() const { return schema_; }

    void set_event_sink(EventSink sink) { sink_ = std::move(sink); }

private:
    ledger::Ledger& ledger_;
    OntologySchema schema_;
    std::vector<DataOrder> orders_;
    EventSink sink_;
};

// ---------------------------------------------------------------------------
// Buyer order info, served off-chain at the order's URL

/// A notary's signed acceptance to serve one order for `fee`.
struct NotaryOffer
{
    ledger::AccountId notary_id = 0;
    Address notary_address;
    crypto::PublicKey notary_pk;
    Amount fee = 0;
    std::string terms;
    crypto::Signature signature;

    static Bytes signing_bytes(OrderId order, ledger::AccountId notary_id, Amount fee, const std::string& terms);
    static NotaryOffer make(const crypto::SigningKeyPair& notary, ledger::AccountId notary_id, OrderId order,
                            Amount fee, std::string terms);
    bool verify(OrderId order) const;
};

struct BuyerOrderInfo
{
    OrderId order_id = 0;
    crypto::PublicKey buyer_pk;
    std::string name;
    std::string description;
    std::string logo;
    std::string tc_text;
    std::string intended_use;
    std::vector<NotaryOffer> notaries;

    Bytes encode() const;
    static BuyerOrderInfo decode(ByteView raw);
};

bool validate_buyer_info(const BuyerOrderInfo& info, const DataOrder& order);

} // namespace wibson::exchange
