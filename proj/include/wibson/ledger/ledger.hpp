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

#include "wibson/ledger/gas.hpp"
#include "wibson/ledger/types.hpp"

#include <functional>
#include <map>
#include <optional>
#include <variant>
#include <vector>

namespace wibson::ledger {

// ---------------------------------------------------------------------------
// Meta-transactions relayed by a delegate.

struct CollectOp
{
    PayIndex to_index = 0;
    Amount declared_amount = 0;
    Amount stake = 0;
};

struct WithdrawOp
{
    Amount amount = 0;
    Address to;
};

struct SignedOp
{
    AccountId originator = 0;
    std::uint64_t nonce = 0;
    Amount fee_limit = 0;
    std::variant<CollectOp, WithdrawOp> op;
    crypto::PublicKey signer_pk;
    crypto::Signature signature;

    /// Canonical bytes covered by the signature.
    Bytes signing_bytes() const;
    Bytes encode() const;
    static SignedOp decode(ByteView raw);

    static SignedOp make(const crypto::SigningKeyPair& signer, AccountId originator, std::uint64_t nonce,
                         Amount fee_limit, std::variant<CollectOp, WithdrawOp> op);
};

/// The simulated chain: token balances, the BatPay account registry, batched
/// hash-locked payments, optimistic collects with their challenge game, and
/// the gas meter. A single-writer state machine; every mutating call is one
/// transaction. Failed transactions throw LedgerError and leave state intact.
class Ledger
{
public:
    using CommitHook = std::function<void(const TxRecord&)>;

    /// Mints the whole supply to `treasury`.
    Ledger(const Address& treasury, LedgerParams params = {}, GasSchedule gas = {});

    // -- clock -----------------------------------------------------------
    BlockNumber block() const { return block_; }
    BlockNumber advance_block(BlockNumber n = 1);

    // -- token -----------------------------------------------------------
    void transfer(const Address& sender, const Address& to, Amount amount);
    Amount token_balance(const Address& a) const;
    const std::map<Address, Amount>& token_balances() const { return tokens_; }

    // -- accounts --------------------------------------------------------
    AccountId register_account(const Address& sender, const Address& address);
    void deposit(const Address& sender, AccountId id, Amount amount);
    void withdraw(const Address& sender, AccountId id, Amount amount, const Address& to);

    // -- payments --------------------------------------------------------
    PayIndex register_payment(const Address& sender, AccountId from, Amount per_destination_amount,
                              const PayData& pay_data, const crypto::Lock& lock, Amount notary_fee,
                              const Address& notary_address);
    void unlock_payment(const Address& sender, PayIndex idx, AccountId notary_id, const SymKey& master_key);
    void refund_locked_payment(const Address& sender, PayIndex idx);

    // -- collect and the challenge game -----------------------------------
    SlotId collect(const Address& sender, AccountId id, PayIndex to_index, Amount declared_amount, Amount stake);
    void finalize_collect(const Address& sender, SlotId slot);
    void challenge_open(const Address& challenger, SlotId slot);
    ChallengeOutcome challenge_respond_list(const Address& sender, SlotId slot, std::vector<PayIndex> pay_indexes);
    void challenge_pick(const Address& challenger, SlotId slot, PayIndex pay_index);
    ChallengeOutcome challenge_prove_inclusion(const Address& sender, SlotId slot, const PayData& pay_data);
    ChallengeOutcome timeout_resolve(const Address& sender, SlotId slot);

    // -- delegation ------------------------------------------------------
    /// Runs `op` as its originator; `fee` moves originator -> delegate and the
    /// gas is attributed to the delegate. Returns the slot id for collects.
    std::optional<SlotId> submit_delegated(const Address& sender, AccountId delegate, const SignedOp& op, Amount fee);

    // -- externally defined transactions (order registry) -----------------
    /// Charges `gas` to `sender` and appends a log record; used by contracts
    /// that live beside the ledger in the same state machine.
    void record_external(TxKind kind, const Address& sender, bool ok, const std::string& outcome);

    // -- views -----------------------------------------------------------
    const LedgerParams& params() const { return params_; }
    const GasSchedule& gas_schedule() const { return gas_; }
    const GasMeter& gas_meter() const { return meter_; }
    GasReport gas_report() const { return ledger::gas_report(log_, gas_); }
    const std::vector<TxRecord>& tx_log() const { return log_; }

    std::size_t account_count() const { return accounts_.size(); }
    const BatPayAccount& account(AccountId id) const;
    std::optional<AccountId> account_of(const Address& a) const;
    const std::vector<BatPayAccount>& accounts() const { return accounts_; }

    std::size_t payment_count() const { return payments_.size(); }
    const RegisteredPayment& payment(PayIndex idx) const;
    /// Public calldata of the registering transaction.
    const PayData& pay_data_calldata(PayIndex idx) const;
    /// The calldata decoded once at registration, ascending.
    const std::vector<AccountId>& payees(PayIndex idx) const;

    const CollectSlot& slot(SlotId id) const;
    const std::vector<CollectSlot>& slots() const { return slots_; }
    std::optional<SlotId> open_slot_of(AccountId id) const;

    /// Escrow held for registered, not yet collected payments and unpaid fees.
    Amount payment_pool() const { return payment_pool_; }
    /// Stakes held by unsettled slots, recomputed from the slots.
    Amount stakes_held() const;
    /// tokens + BatPay balances + payment pool + stakes; equals kTotalSupply.
    unsigned __int128 accounted_supply() const;

    void set_commit_hook(CommitHook hook) { hook_ = std::move(hook); }

private:
    BatPayAccount& account_mut(AccountId id);
    CollectSlot& slot_mut(SlotId id);
    void require_owner(const Address& sender, const BatPayAccount& acct) const;
    void credit(AccountId id, Amount amount);
    void debit(AccountId id, Amount amount);

    SlotId do_collect(const Address& owner, AccountId id, PayIndex to_index, Amount declared, Amount stake);
    void do_withdraw(const Address& owner, AccountId id, Amount amount, const Address& to);

    void seller_loses(CollectSlot& s, const std::string& reason);
    void challenger_loses(CollectSlot& s, const std::string& reason);

    template <typename F>
    auto transact(TxKind kind, const Address& sender, F&& body);

    LedgerParams params_;
    GasSchedule gas_;
    BlockNumber block_ = 0;

    std::map<Address, Amount> tokens_;
    std::vector<BatPayAccount> accounts_;
    std::map<Address, AccountId> by_address_;
    std::vector<RegisteredPayment> payments_;
    std::vector<PayData> calldata_;
    std::vector<std::vector<AccountId>> payees_;
    std::vector<CollectSlot> slots_;
    std::map<AccountId, SlotId> open_slots_;
    Amount payment_pool_ = 0;

    GasMeter meter_;
    std::vector<TxRecord> log_;
    CommitHook hook_;
};

/// Sum owed to `account` over unlocked payments in [from, to] whose payData
/// lists it, read from public calldata. What an honest collect declares.
Amount honest_collect_amount(const Ledger& ledger, AccountId account, PayIndex from, PayIndex to);
/// The pay indexes contributing to honest_collect_amount, ascending.
std::vector<PayIndex> inclusions(const Ledger& ledger, AccountId account, PayIndex from, PayIndex to);

} // namespace wibson::ledger
