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

#include <algorithm>

namespace wibson::exchange {

const char* to_string(ExchangeErrc code)
{
    switch (code) {
    case ExchangeErrc::schema_violation:
        return "SchemaViolation";
    case ExchangeErrc::unregistered_buyer:
        return "UnregisteredBuyer";
    case ExchangeErrc::not_owner:
        return "NotOwner";
    case ExchangeErrc::already_closed:
        return "AlreadyClosed";
    case ExchangeErrc::unknown_order:
        return "UnknownOrder";
    case ExchangeErrc::missing_entity:
        return "MissingEntity";
    case ExchangeErrc::invalid_order:
        return "InvalidOrder";
    }
    return "Unknown";
}

std::string to_string(const AttrValue& v)
{
    if (const auto* i = std::get_if<std::int64_t>(&v))
        return std::to_string(*i);
    return std::get<std::string>(v);
}

const char* to_string(Op op)
{
    switch (op) {
    case Op::eq:
        return "=";
    case Op::ge:
        return ">=";
    case Op::le:
        return "<=";
    }
    return "?";
}

Op parse_op(std::string_view s)
{
    if (s == "=" || s == "==")
        return Op::eq;
    if (s == ">=")
        return Op::ge;
    if (s == "<=")
        return Op::le;
    throw ExchangeError(ExchangeErrc::schema_violation, "unknown operator '" + std::string(s) + "'");
}

namespace {

void check_value(const std::string& name, AttrKind kind, const AttrValue& v)
{
    const bool numeric = std::holds_alternative<std::int64_t>(v);
    if (numeric != (kind == AttrKind::numeric))
        throw ExchangeError(ExchangeErrc::schema_violation,
                            "attribute '" + name + "' expects a " + (kind == AttrKind::numeric ? "numeric" : "categorical") +
                                " value");
}

AttrKind require_attribute(const OntologySchema& schema, const std::string& name)
{
    auto it = schema.attributes.find(name);
    if (it == schema.attributes.end())
        throw ExchangeError(ExchangeErrc::schema_violation, "undeclared attribute '" + name + "'");
    return it->second;
}

void write_attr(ByteWriter& w, const AttrValue& v)
{
    if (const auto* i = std::get_if<std::int64_t>(&v))
        w.u8(0).i64(*i);
    else
        w.u8(1).str(std::get<std::string>(v));
}

AttrValue read_attr(ByteReader& r)
{
    switch (r.u8()) {
    case 0:
        return r.i64();
    case 1:
        return r.str();
    default:
        throw DecodeError("bad attribute value tag");
    }
}

} // namespace

void AudienceQuery::validate(const OntologySchema& schema) const
{
    for (const auto& c : clauses) {
        const auto kind = require_attribute(schema, c.attribute);
        if (c.op != Op::eq && kind != AttrKind::numeric)
            throw ExchangeError(ExchangeErrc::schema_violation,
                                std::string("operator ") + to_string(c.op) + " needs a numeric attribute, '" +
                                    c.attribute + "' is categorical");
        check_value(c.attribute, kind, c.value);
    }
}

void AudienceQuery::encode(ByteWriter& w) const
{
    w.u32(static_cast<std::uint32_t>(clauses.size()));
    for (const auto& c : clauses) {
        w.str(c.attribute).u8(static_cast<std::uint8_t>(c.op));
        write_attr(w, c.value);
    }
}

AudienceQuery AudienceQuery::decode(ByteReader& r)
{
    AudienceQuery q;
    const auto n = r.u32();
    for (std::uint32_t i = 0; i < n; ++i) {
        Clause c;
        c.attribute = r.str();
        const auto op = r.u8();
        if (op > 2)
            throw DecodeError("bad operator");
        c.op = static_cast<Op>(op);
        c.value = read_attr(r);
        q.clauses.push_back(std::move(c));
    }
    return q;
}

void DataQuery::validate(const OntologySchema& schema) const
{
    auto it = schema.entities.find(entity);
    if (it == schema.entities.end())
        throw ExchangeError(ExchangeErrc::schema_violation, "undeclared data entity '" + entity + "'");
    for (const auto& [name, value] : params) {
        auto p = it->second.params.find(name);
        if (p == it->second.params.end())
            throw ExchangeError(ExchangeErrc::schema_violation,
                                "entity '" + entity + "' has no parameter '" + name + "'");
        if (value < p->second.min || value > p->second.max)
            throw ExchangeError(ExchangeErrc::schema_violation,
                                "parameter '" + name + "' = " + std::to_string(value) + " out of range");
    }
}

void DataQuery::encode(ByteWriter& w) const
{
    w.str(entity).u32(static_cast<std::uint32_t>(params.size()));
    for (const auto& [name, value] : params)
        w.str(name).i64(value);
}

DataQuery DataQuery::decode(ByteReader& r)
{
    DataQuery q;
    q.entity = r.str();
    const auto n = r.u32();
    for (std::uint32_t i = 0; i < n; ++i) {
        auto name = r.str();
        q.params[name] = r.i64();
    }
    return q;
}

void SellerProfile::validate(const OntologySchema& schema) const
{
    for (const auto& [name, value] : attributes)
        check_value(name, require_attribute(schema, name), value);
}

bool audience_match(const OntologySchema& schema, const SellerProfile& profile, const AudienceQuery& query)
{
    query.validate(schema);
    profile.validate(schema);
    for (const auto& c : query.clauses) {
        auto it = profile.attributes.find(c.attribute);
        if (it == profile.attributes.end())
            return false;
        const auto& have = it->second;
        bool holds = false;
        switch (c.op) {
        case Op::eq:
            holds = have == c.value;
            break;
        case Op::ge:
            holds = std::get<std::int64_t>(have) >= std::get<std::int64_t>(c.value);
            break;
        case Op::le:
            holds = std::get<std::int64_t>(have) <= std::get<std::int64_t>(c.value);
            break;
        }
        if (!holds)
            return false;
    }
    return true;
}

// ---------------------------------------------------------------------------

void Record::encode(ByteWriter& w) const
{
    w.i64(time).u32(static_cast<std::uint32_t>(fields.size()));
    for (const auto& [name, value] : fields) {
        w.str(name);
        if (const auto* i = std::get_if<std::int64_t>(&value))
            w.u8(0).i64(*i);
        else if (const auto* d = std::get_if<double>(&value))
            w.u8(1).f64(*d);
        else
            w.u8(2).str(std::get<std::string>(value));
    }
}

Record Record::decode(ByteReader& r)
{
    Record rec;
    rec.time = r.i64();
    const auto n = r.u32();
    std::string prev;
    for (std::uint32_t i = 0; i < n; ++i) {
        auto name = r.str();
        if (i > 0 && name <= prev)
            throw DecodeError("record fields are not in canonical order");
        switch (r.u8()) {
        case 0:
            rec.fields[name] = r.i64();
            break;
        case 1:
            rec.fields[name] = r.f64();
            break;
        case 2:
            rec.fields[name] = r.str();
            break;
        default:
            throw DecodeError("bad field tag");
        }
        prev = std::move(name);
    }
    return rec;
}

Bytes encode_payload(const std::vector<EntityRecords>& payload)
{
    ByteWriter w;
    w.u32(static_cast<std::uint32_t>(payload.size()));
    for (const auto& e : payload) {
        w.str(e.entity).u32(static_cast<std::uint32_t>(e.records.size()));
        for (const auto& rec : e.records)
            rec.encode(w);
    }
    return std::move(w).bytes();
}

std::vector<EntityRecords> decode_payload(ByteView raw)
{
    ByteReader r(raw);
    std::vector<EntityRecords> out;
    const auto n = r.u32();
    for (std::uint32_t i = 0; i < n; ++i) {
        EntityRecords e;
        e.entity = r.str();
        const auto m = r.u32();
        for (std::uint32_t j = 0; j < m; ++j)
            e.records.push_back(Record::decode(r));
        out.push_back(std::move(e));
    }
    r.expect_done();
    return out;
}

Bytes extract_requested(const SellerProfile& profile, const std::vector<DataQuery>& requested)
{
    std::vector<EntityRecords> payload;
    for (const auto& q : requested) {
        auto it = profile.store.find(q.entity);
        if (it == profile.store.end())
            throw ExchangeError(ExchangeErrc::missing_entity, q.entity);

        __int128 lo = INT64_MIN, hi = static_cast<__int128>(INT64_MAX) + 1;
        if (auto s = q.params.find("start"); s != q.params.end())
            lo = s->second;
        if (auto l = q.params.find("length"); l != q.params.end())
            hi = lo + l->second;

        EntityRecords e{q.entity, {}};
        for (const auto& rec : it->second)
            if (rec.time >= lo && rec.time < hi)
                e.records.push_back(rec);
        std::stable_sort(e.records.begin(), e.records.end(),
                         [](const Record& a, const Record& b) { return a.time < b.time; });
        payload.push_back(std::move(e));
    }
    return encode_payload(payload);
}

} // namespace wibson::exchange
