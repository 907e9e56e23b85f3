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

#include "wibson/ledger/ledger.hpp"

namespace wibson::ledger {

namespace {

constexpr std::uint8_t kCollectTag = 1;
constexpr std::uint8_t kWithdrawTag = 2;

void write_body(ByteWriter& w, const SignedOp& op)
{
    w.str("wibson.batpay.meta.v1").u32(op.originator).u64(op.nonce).u64(op.fee_limit);
    if (const auto* c = std::get_if<CollectOp>(&op.op))
        w.u8(kCollectTag).u64(c->to_index).u64(c->declared_amount).u64(c->stake);
    else {
        const auto& wd = std::get<WithdrawOp>(op.op);
        w.u8(kWithdrawTag).u64(wd.amount).fixed(wd.to);
    }
}

} // namespace

Bytes SignedOp::signing_bytes() const
{
    ByteWriter w;
    write_body(w, *this);
    return std::move(w).bytes();
}

Bytes SignedOp::encode() const
{
    ByteWriter w;
    write_body(w, *this);
    w.fixed(signer_pk).fixed(signature);
    return std::move(w).bytes();
}

SignedOp SignedOp::decode(ByteView raw)
{
    ByteReader r(raw);
    SignedOp op;
    if (r.str() != "wibson.batpay.meta.v1")
        throw DecodeError("unknown meta-transaction domain");
    op.originator = r.u32();
    op.nonce = r.u64();
    op.fee_limit = r.u64();
    switch (r.u8()) {
    case kCollectTag: {
        CollectOp c;
        c.to_index = r.u64();
        c.declared_amount = r.u64();
        c.stake = r.u64();
        op.op = c;
        break;
    }
    case kWithdrawTag: {
        WithdrawOp wd;
        wd.amount = r.u64();
        wd.to = r.fixed<Address>();
        op.op = wd;
        break;
    }
    default:
        throw DecodeError("unknown meta-transaction kind");
    }
    op.signer_pk = r.fixed<crypto::PublicKey>();
    op.signature = r.fixed<crypto::Signature>();
    r.expect_done();
    return op;
}

SignedOp SignedOp::make(const crypto::SigningKeyPair& signer, AccountId originator, std::uint64_t nonce,
                        Amount fee_limit, std::variant<CollectOp, WithdrawOp> op)
{
    SignedOp s;
    s.originator = originator;
    s.nonce = nonce;
    s.fee_limit = fee_limit;
    s.op = std::move(op);
    s.signer_pk = signer.public_key;
    s.signature = crypto::sign(signer.secret, s.signing_bytes());
    return s;
}

} // namespace wibson::ledger
