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

#include "wibson/actors/messages.hpp"
#include "wibson/actors/verifier.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace wibson::actors {

// Pure protocol steps. The actors wire them to the ledger and transport.

struct SellerPolicy
{
    Amount price_floor = 0;
    bool accepts_terms = true;
    std::vector<Address> trusted_notaries;
};

struct Decision
{
    bool accept = false;
    std::optional<exchange::NotaryOffer> notary;
    std::string reason;
};

/// Accepts iff the audience matches, the price clears the floor, the terms
/// are accepted, every requested entity is held and some offered notary is
/// trusted. Picks the cheapest trusted notary, then the lowest id.
Decision seller_evaluate_order(const SellerPolicy& policy, const exchange::OntologySchema& schema,
                               const exchange::SellerProfile& profile, const exchange::DataOrder& order,
                               const exchange::BuyerOrderInfo& info);

/// Adds a record the ground truth cannot contain: a copy of the first
/// record moved about 55 km north, or a marked record when there is none.
Bytes fabricate_payload(ByteView honest_payload);

struct NotaryPolicy
{
    Amount fee = 0;
    double percentage = 1.0;
    std::map<std::string, VerifierSpec> verifiers;
    /// Encrypts a random key in place of K_S.
    bool garbage_key = false;
};

struct Notarization
{
    NotarizationResponse response;
    SymKey master_key;
    /// Indexes into the request's seller list that were audited.
    std::vector<std::size_t> sampled;
};

/// ceil(percentage * n) sellers are audited, chosen with `rng`. Unaudited
/// sellers pass as not_notarized; a missing message or a hash mismatch is a
/// rejection regardless of sampling.
Notarization notarize(const NotaryPolicy& policy, const crypto::SigningKeyPair& notary, AccountId notary_id,
                      const NotarizationRequest& request,
                      const std::map<Address, SellerNotaryMsg>& seller_messages,
                      const std::map<Address, DataStore>& ground_truth, Rng& rng);

std::size_t sample_count(double percentage, std::size_t n);

enum class RecoveryErrc
{
    bad_key,
    notary_fault,
};

const char* to_string(RecoveryErrc e);

struct RecoveryError : std::runtime_error
{
    RecoveryError(RecoveryErrc c, const std::string& what) : std::runtime_error(what), code(c) {}
    RecoveryErrc code;
};

/// K' = D_M'(c_KS), data = D_K'(C_S), after checking the lock.
Bytes recover_data(const crypto::Lock& lock, AccountId notary_id, const SymKey& published_key,
                   const crypto::Ciphertext& encrypted_key, const crypto::Ciphertext& data);

/// Largest index such that no payment in [from, to] that lists `account`
/// is still waiting to be unlocked, or nullopt when that range is empty.
std::optional<ledger::PayIndex> settled_range_end(const ledger::Ledger& ledger, AccountId account,
                                                  ledger::PayIndex from);

} // namespace wibson::actors
