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
#include "wibson/exchange/exchange.hpp"
#include "wibson/ledger/ledger.hpp"

#include <optional>
#include <variant>
#include <vector>

namespace wibson::actors {

using exchange::OrderId;
using ledger::AccountId;
using ledger::Amount;

/// Seller -> buyer, posted to the order's URL.
struct DataResponse
{
    OrderId order_id = 0;
    std::optional<AccountId> seller_id;
    Address seller_address;
    Address notary_address;
    crypto::Ciphertext data;
    bool needs_buyer_registration = false;
};

/// Seller -> notary: the same ciphertext plus the key that opens it.
struct SellerNotaryMsg
{
    OrderId order_id = 0;
    std::optional<AccountId> seller_id;
    Address seller_address;
    crypto::Ciphertext data;
    SymKey key;
};

struct SellerEntry
{
    AccountId id = 0;
    Address address;
    /// hash of the encoded ciphertext the buyer received
    Hash32 data_hash;
};

struct NotarizationRequest
{
    OrderId order_id = 0;
    std::string callback_url;
    std::vector<SellerEntry> sellers;
};

enum class Verdict : std::uint8_t
{
    not_notarized,
    approved,
    rejected,
};

const char* to_string(Verdict v);

struct SellerResult
{
    AccountId id = 0;
    Address address;
    Verdict verdict = Verdict::not_notarized;
    /// The seller's key encrypted under the master key; absent when rejected.
    std::optional<crypto::Ciphertext> encrypted_key;
};

struct NotarizationResponse
{
    OrderId order_id = 0;
    std::vector<SellerResult> results;
    Amount fee = 0;
    double notarization_percentage = 0.0;
    Address notary_address;
    Hash32 pay_data_hash;
    crypto::Lock lock;
    crypto::Signature signature;

    Bytes signing_bytes() const;
    void sign(const crypto::SigningKeyPair& notary);
    bool verify(const crypto::PublicKey& notary_pk) const;
    /// Ids the buyer must pay: everyone not rejected, ascending.
    std::vector<AccountId> payable_ids() const;
};

/// Seller -> delegate: a signed ledger operation to relay.
struct RelayRequest
{
    ledger::SignedOp op;
};

using Message = std::variant<DataResponse, SellerNotaryMsg, NotarizationRequest, NotarizationResponse, RelayRequest>;

Bytes encode_message(const Message& m);
/// Throws DecodeError on malformed input.
Message decode_message(ByteView raw);

} // namespace wibson::actors
