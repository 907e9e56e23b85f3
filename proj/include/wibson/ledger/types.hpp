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

#include "wibson/crypto/bytes.hpp"
#include "wibson/crypto/crypto.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace wibson::ledger {

using Amount = std::uint64_t;
using AccountId = std::uint32_t;
using PayIndex = std::uint64_t;
using BlockNumber = std::uint64_t;
using SlotId = std::uint64_t;
using Gas = std::uint64_t;

/// One token in base units (nine decimals).
inline constexpr Amount kTokenUnit = 1'000'000'000ULL;
inline constexpr Amount kTotalSupply = 9'000'000'000ULL * kTokenUnit;

enum class LedgerErrc
{
    already_registered,
    unknown_account,
    unknown_payment,
    unknown_slot,
    not_authorized,
    insufficient_token_balance,
    insufficient_batpay_balance,
    malformed_pay_data,
    duplicate_id,
    empty_list,
    bad_key,
    already_unlocked,
    unlock_window_expired,
    payment_voided,
    not_expired,
    slot_already_open,
    insufficient_stake,
    bad_range,
    not_open,
    too_late,
    slot_not_open,
    wrong_phase,
    not_in_list,
    timeout,
    no_timeout_pending,
    escrow_exhausted,
    bad_signature,
    fee_exceeds_limit,
    stale_nonce,
    invalid_argument,
};

const char* to_string(LedgerErrc code);

class LedgerError : public std::runtime_error
{
public:
    LedgerError(LedgerErrc code, const std::string& detail)
        : std::runtime_error(std::string(to_string(code)) + (detail.empty() ? "" : ": " + detail)), code_(code)
    {
    }
    explicit LedgerError(LedgerErrc code) : LedgerError(code, "") {}
    LedgerErrc code() const { return code_; }

private:
    LedgerErrc code_;
};

// ---------------------------------------------------------------------------
// payData: 1-byte width header d in {1..4}, then strictly ascending ids each
// written in d big-endian bytes.

struct PayData
{
    std::uint8_t bytes_per_id = 1;
    Bytes body;

    std::size_t count() const { return bytes_per_id == 0 ? 0 : body.size() / bytes_per_id; }
    Bytes encode() const;
    static PayData parse(ByteView raw);
    Hash32 hash() const { return crypto::hash(encode()); }

    bool operator==(const PayData&) const = default;
};

/// Sorts the ids; rejects empty input and duplicates. Uses the smallest
/// width that holds the largest id.
PayData encode_pay_data(std::span<const AccountId> ids);
/// Throws malformed_pay_data unless the body is well formed and strictly ascending.
std::vector<AccountId> decode_pay_data(const PayData& pd);

// ---------------------------------------------------------------------------

struct LedgerParams
{
    BlockNumber challenge_period_blocks = 40;
    BlockNumber response_timeout_blocks = 20;
    BlockNumber unlock_timeout_blocks = 100;
    Amount collect_stake = 10 * kTokenUnit;
    Amount challenge_stake = 10 * kTokenUnit;

    void validate() const;
};

struct BatPayAccount
{
    AccountId id = 0;
    Address address;
    Amount balance = 0;
    /// First pay index the next collect must start from.
    PayIndex next_collect_index = 0;
    /// Next nonce accepted for a delegated operation.
    std::uint64_t next_nonce = 0;

    std::optional<PayIndex> last_collected_pay_index() const
    {
        if (next_collect_index == 0)
            return std::nullopt;
        return next_collect_index - 1;
    }
};

struct RegisteredPayment
{
    PayIndex pay_index = 0;
    AccountId from = 0;
    Amount per_destination_amount = 0;
    Hash32 pay_data_hash;
    std::uint32_t n_payees = 0;
    crypto::Lock lock;
    Amount notary_fee = 0;
    Address notary_address;
    bool unlocked = false;
    bool voided = false;
    std::optional<SymKey> master_key;
    BlockNumber block = 0;

    Amount escrow() const { return per_destination_amount * n_payees + notary_fee; }
};

enum class SlotStatus
{
    open,
    challenged,
    awaiting_pick,
    awaiting_proof,
    settled_ok,
    settled_fraud,
};

const char* to_string(SlotStatus s);

struct CollectSlot
{
    SlotId id = 0;
    AccountId account = 0;
    PayIndex from_index = 0;
    PayIndex to_index = 0;
    Amount declared_amount = 0;
    Amount stake = 0;
    BlockNumber deadline = 0;
    SlotStatus status = SlotStatus::open;
    std::optional<Address> challenger;
    Amount challenger_stake = 0;
    /// Deadline of the current challenge phase.
    BlockNumber phase_deadline = 0;
    std::optional<std::vector<PayIndex>> response;
    std::optional<PayIndex> picked;
    std::uint32_t challenges_survived = 0;
    std::string resolution;

    bool settled() const { return status == SlotStatus::settled_ok || status == SlotStatus::settled_fraud; }
    bool holds_stake() const { return !settled(); }
};

/// Outcome of a step of the challenge game.
enum class Resolution
{
    pending,
    seller_won,
    seller_lost,
    challenger_lost,
};

const char* to_string(Resolution r);

struct ChallengeOutcome
{
    Resolution resolution = Resolution::pending;
    std::string reason;
};

} // namespace wibson::ledger
