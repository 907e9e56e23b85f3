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

#include "wibson/actors/messages.hpp"

#include <algorithm>

namespace wibson::actors {

const char* to_string(Verdict v)
{
    switch (v) {
    case Verdict::not_notarized:
        return "not_notarized";
    case Verdict::approved:
        return "approved";
    case Verdict::rejected:
        return "rejected";
    }
    return "unknown";
}

namespace {

enum Tag : std::uint8_t
{
    kDataResponse = 1,
    kSellerNotary = 2,
    kNotarizationRequest = 3,
    kNotarizationResponse = 4,
    kRelayRequest = 5,
};

void write_opt_id(ByteWriter& w, const std::optional<AccountId>& id)
{
    w.boolean(id.has_value()).u32(id.value_or(0));
}

std::optional<AccountId> read_opt_id(ByteReader& r)
{
    const bool has = r.boolean();
    const auto v = r.u32();
    if (!has)
        return std::nullopt;
    return v;
}

void write_ct(ByteWriter& w, const crypto::Ciphertext& ct)
{
    w.blob(ct.encode());
}

crypto::Ciphertext read_ct(ByteReader& r)
{
    try {
        return crypto::Ciphertext::decode(r.blob());
    } catch (const crypto::CryptoError& e) {
        throw DecodeError(e.what());
    }
}

void write_response_body(ByteWriter& w, const NotarizationResponse& m)
{
    w.u64(m.order_id).u32(static_cast<std::uint32_t>(m.results.size()));
    for (const auto& s : m.results) {
        w.u32(s.id).fixed(s.address).u8(static_cast<std::uint8_t>(s.verdict)).boolean(s.encrypted_key.has_value());
        if (s.encrypted_key)
            write_ct(w, *s.encrypted_key);
    }
    w.u64(m.fee).f64(m.notarization_percentage).fixed(m.notary_address).fixed(m.pay_data_hash).fixed(m.lock.digest);
}

} // namespace

Bytes NotarizationResponse::signing_bytes() const
{
    ByteWriter w;
    w.str("wibson.notarization.v1");
    write_response_body(w, *this);
    return std::move(w).bytes();
}

void NotarizationResponse::sign(const crypto::SigningKeyPair& notary)
{
    signature = crypto::sign(notary.secret, signing_bytes());
}

bool NotarizationResponse::verify(const crypto::PublicKey& notary_pk) const
{
    return crypto::address_of(notary_pk) == notary_address && crypto::verify(notary_pk, signing_bytes(), signature);
}

std::vector<AccountId> NotarizationResponse::payable_ids() const
{
    std::vector<AccountId> ids;
    for (const auto& s : results)
        if (s.verdict != Verdict::rejected)
            ids.push_back(s.id);
    std::sort(ids.begin(), ids.end());
    return ids;
}

Bytes encode_message(const Message& m)
{
    ByteWriter w;
    if (const auto* dr = std::get_if<DataResponse>(&m)) {
        w.u8(kDataResponse).u64(dr->order_id);
        write_opt_id(w, dr->seller_id);
        w.fixed(dr->seller_address).fixed(dr->notary_address);
        write_ct(w, dr->data);
        w.boolean(dr->needs_buyer_registration);
    } else if (const auto* sn = std::get_if<SellerNotaryMsg>(&m)) {
        w.u8(kSellerNotary).u64(sn->order_id);
        write_opt_id(w, sn->seller_id);
        w.fixed(sn->seller_address);
        write_ct(w, sn->data);
        w.fixed(sn->key);
    } else if (const auto* rq = std::get_if<NotarizationRequest>(&m)) {
        w.u8(kNotarizationRequest).u64(rq->order_id).str(rq->callback_url);
        w.u32(static_cast<std::uint32_t>(rq->sellers.size()));
        for (const auto& s : rq->sellers)
            w.u32(s.id).fixed(s.address).fixed(s.data_hash);
    } else if (const auto* rs = std::get_if<NotarizationResponse>(&m)) {
        w.u8(kNotarizationResponse);
        write_response_body(w, *rs);
        w.fixed(rs->signature);
    } else {
        w.u8(kRelayRequest).blob(std::get<RelayRequest>(m).op.encode());
    }
    return std::move(w).bytes();
}

Message decode_message(ByteView raw)
{
    ByteReader r(raw);
    Message out;
    switch (r.u8()) {
    case kDataResponse: {
        DataResponse dr;
        dr.order_id = r.u64();
        dr.seller_id = read_opt_id(r);
        dr.seller_address = r.fixed<Address>();
        dr.notary_address = r.fixed<Address>();
        dr.data = read_ct(r);
        dr.needs_buyer_registration = r.boolean();
        out = std::move(dr);
        break;
    }
    case kSellerNotary: {
        SellerNotaryMsg sn;
        sn.order_id = r.u64();
        sn.seller_id = read_opt_id(r);
        sn.seller_address = r.fixed<Address>();
        sn.data = read_ct(r);
        sn.key = r.fixed<SymKey>();
        out = std::move(sn);
        break;
    }
    case kNotarizationRequest: {
        NotarizationRequest rq;
        rq.order_id = r.u64();
        rq.callback_url = r.str();
        const auto n = r.u32();
        for (std::uint32_t i = 0; i < n; ++i) {
            SellerEntry s;
            s.id = r.u32();
            s.address = r.fixed<Address>();
            s.data_hash = r.fixed<Hash32>();
            rq.sellers.push_back(s);
        }
        out = std::move(rq);
        break;
    }
    case kNotarizationResponse: {
        NotarizationResponse rs;
        rs.order_id = r.u64();
        const auto n = r.u32();
        for (std::uint32_t i = 0; i < n; ++i) {
            SellerResult s;
            s.id = r.u32();
            s.address = r.fixed<Address>();
            const auto v = r.u8();
            if (v > 2)
                throw DecodeError("bad verdict");
            s.verdict = static_cast<Verdict>(v);
            if (r.boolean())
                s.encrypted_key = read_ct(r);
            rs.results.push_back(std::move(s));
        }
        rs.fee = r.u64();
        rs.notarization_percentage = r.f64();
        rs.notary_address = r.fixed<Address>();
        rs.pay_data_hash = r.fixed<Hash32>();
        rs.lock.digest = r.fixed<Hash32>();
        rs.signature = r.fixed<crypto::Signature>();
        out = std::move(rs);
        break;
    }
    case kRelayRequest: {
        auto blob = r.blob();
        try {
            out = RelayRequest{ledger::SignedOp::decode(blob)};
        } catch (const std::exception& e) {
            throw DecodeError(e.what());
        }
        break;
    }
    default:
        throw DecodeError("unknown message tag");
    }
    r.expect_done();
    return out;
}

} // namespace wibson::actors
