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

#include <algorithm>
#include <type_traits>

namespace wibson::ledger {

const char* to_string(LedgerErrc code)
{
    switch (code) {
    case LedgerErrc::already_registered:
        return "AlreadyRegistered";
    case LedgerErrc::unknown_account:
        return "UnknownAccount";
    case LedgerErrc::unknown_payment:
        return "UnknownPayment";
    case LedgerErrc::unknown_slot:
        return "UnknownSlot";
    case LedgerErrc::not_authorized:
        return "NotAuthorized";
    case LedgerErrc::insufficient_token_balance:
        return "InsufficientTokenBalance";
    case LedgerErrc::insufficient_batpay_balance:
        return "InsufficientBatPayBalance";
    case LedgerErrc::malformed_pay_data:
        return "MalformedPayData";
    case LedgerErrc::duplicate_id:
        return "DuplicateId";
    case LedgerErrc::empty_list:
        return "EmptyList";
    case LedgerErrc::bad_key:
        return "BadKey";
    case LedgerErrc::already_unlocked:
        return "AlreadyUnlocked";
    case LedgerErrc::unlock_window_expired:
        return "UnlockWindowExpired";
    case LedgerErrc::payment_voided:
        return "PaymentVoided";
    case LedgerErrc::not_expired:
        return "NotExpired";
    case LedgerErrc::slot_already_open:
        return "SlotAlreadyOpen";
    case LedgerErrc::insufficient_stake:
        return "InsufficientStake";
    case LedgerErrc::bad_range:
        return "BadRange";
    case LedgerErrc::not_open:
        return "NotOpen";
    case LedgerErrc::too_late:
        return "TooLate";
    case LedgerErrc::slot_not_open:
        return "SlotNotOpen";
    case LedgerErrc::wrong_phase:
        return "WrongPhase";
    case LedgerErrc::not_in_list:
        return "NotInList";
    case LedgerErrc::timeout:
        return "Timeout";
    case LedgerErrc::no_timeout_pending:
        return "NoTimeoutPending";
    case LedgerErrc::escrow_exhausted:
        return "EscrowExhausted";
    case LedgerErrc::bad_signature:
        return "BadSignature";
    case LedgerErrc::fee_exceeds_limit:
        return "FeeExceedsLimit";
    case LedgerErrc::stale_nonce:
        return "StaleNonce";
    case LedgerErrc::invalid_argument:
        return "InvalidArgument";
    }
    return "Unknown";
}

const char* to_string(SlotStatus s)
{
    switch (s) {
    case SlotStatus::open:
        return "open";
    case SlotStatus::challenged:
        return "challenged";
    case SlotStatus::awaiting_pick:
        return "awaiting_pick";
    case SlotStatus::awaiting_proof:
        return "awaiting_proof";
    case SlotStatus::settled_ok:
        return "settled_ok";
    case SlotStatus::settled_fraud:
        return "settled_fraud";
    }
    return "unknown";
}

const char* to_string(Resolution r)
{
    switch (r) {
    case Resolution::pending:
        return "pending";
    case Resolution::seller_won:
        return "seller_won";
    case Resolution::seller_lost:
        return "seller_lost";
    case Resolution::challenger_lost:
        return "challenger_lost";
    }
    return "unknown";
}

void LedgerParams::validate() const
{
    if (challenge_period_blocks == 0 || response_timeout_blocks == 0 || unlock_timeout_blocks == 0 ||
        collect_stake == 0 || challenge_stake == 0)
        throw LedgerError(LedgerErrc::invalid_argument, "ledger parameters must be positive");
}

namespace {

Amount checked_mul(Amount a, Amount b)
{
    unsigned __int128 r = static_cast<unsigned __int128>(a) * b;
    if (r > UINT64_MAX)
        throw LedgerError(LedgerErrc::invalid_argument, "amount overflow");
    return static_cast<Amount>(r);
}

Amount checked_add(Amount a, Amount b)
{
    if (a > UINT64_MAX - b)
        throw LedgerError(LedgerErrc::invalid_argument, "amount overflow");
    return a + b;
}

} // namespace

// ---------------------------------------------------------------------------

Ledger::Ledger(const Address& treasury, LedgerParams params, GasSchedule gas)
    : params_(params), gas_(gas)
{
    params_.validate();
    tokens_[treasury] = kTotalSupply;
}

template <typename F>
auto Ledger::transact(TxKind kind, const Address& sender, F&& body)
{
    TxRecord rec;
    rec.seq = log_.size();
    rec.block = block_;
    rec.kind = kind;
    rec.sender = sender;
    rec.gas = gas_.fixed_cost(kind);

    auto commit = [&] {
        rec.ok = true;
        if (rec.outcome.empty())
            rec.outcome = "ok";
        meter_.charge(rec);
        log_.push_back(rec);
        if (hook_)
            hook_(log_.back());
    };

    try {
        if constexpr (std::is_void_v<std::invoke_result_t<F, TxRecord&>>) {
            body(rec);
            commit();
        } else {
            auto result = body(rec);
            commit();
            return result;
        }
    } catch (const LedgerError& e) {
        rec.ok = false;
        rec.gas = 0;
        rec.items = 0;
        rec.outcome = to_string(e.code());
        log_.push_back(rec);
        throw;
    }
}

BlockNumber Ledger::advance_block(BlockNumber n)
{
    if (n < 1)
        throw LedgerError(LedgerErrc::invalid_argument, "advance_block requires n >= 1");
    block_ += n;
    return block_;
}

// -- token -------------------------------------------------------------------

void Ledger::transfer(const Address& sender, const Address& to, Amount amount)
{
    transact(TxKind::transfer, sender, [&](TxRecord&) {
        auto it = tokens_.find(sender);
        const Amount have = it == tokens_.end() ? 0 : it->second;
        if (have < amount)
            throw LedgerError(LedgerErrc::insufficient_token_balance);
        if (amount == 0 || sender == to)
            return;
        it->second -= amount;
        tokens_[to] += amount;
    });
}

Amount Ledger::token_balance(const Address& a) const
{
    auto it = tokens_.find(a);
    return it == tokens_.end() ? 0 : it->second;
}

// -- accounts ----------------------------------------------------------------

const BatPayAccount& Ledger::account(AccountId id) const
{
    if (id >= accounts_.size())
        throw LedgerError(LedgerErrc::unknown_account, "id " + std::to_string(id));
    return accounts_[id];
}

BatPayAccount& Ledger::account_mut(AccountId id)
{
    if (id >= accounts_.size())
        throw LedgerError(LedgerErrc::unknown_account, "id " + std::to_string(id));
    return accounts_[id];
}

std::optional<AccountId> Ledger::account_of(const Address& a) const
{
    auto it = by_address_.find(a);
    if (it == by_address_.end())
        return std::nullopt;
    return it->second;
}

void Ledger::require_owner(const Address& sender, const BatPayAccount& acct) const
{
    if (sender != acct.address)
        throw LedgerError(LedgerErrc::not_authorized, "sender does not own account " + std::to_string(acct.id));
}

void Ledger::credit(AccountId id, Amount amount)
{
    auto& a = account_mut(id);
    a.balance = checked_add(a.balance, amount);
}

void Ledger::debit(AccountId id, Amount amount)
{
    auto& a = account_mut(id);
    if (a.balance < amount)
        throw LedgerError(LedgerErrc::insufficient_batpay_balance);
    a.balance -= amount;
}

AccountId Ledger::register_account(const Address& sender, const Address& address)
{
    return transact(TxKind::register_account, sender, [&](TxRecord&) {
        if (by_address_.count(address))
            throw LedgerError(LedgerErrc::already_registered, address.hex());
        if (accounts_.size() > UINT32_MAX)
            throw LedgerError(LedgerErrc::invalid_argument, "account id space exhausted");
        BatPayAccount acct;
        acct.id = static_cast<AccountId>(accounts_.size());
        acct.address = address;
        accounts_.push_back(acct);
        by_address_[address] = acct.id;
        return acct.id;
    });
}

void Ledger::deposit(const Address& sender, AccountId id, Amount amount)
{
    transact(TxKind::deposit, sender, [&](TxRecord&) {
        auto& acct = account_mut(id);
        require_owner(sender, acct);
        auto it = tokens_.find(sender);
        const Amount have = it == tokens_.end() ? 0 : it->second;
        if (have < amount)
            throw LedgerError(LedgerErrc::insufficient_token_balance);
        if (amount == 0)
            return;
        acct.balance = checked_add(acct.balance, amount);
        it->second -= amount;
    });
}

void Ledger::do_withdraw(const Address& owner, AccountId id, Amount amount, const Address& to)
{
    auto& acct = account_mut(id);
    require_owner(owner, acct);
    if (acct.balance < amount)
        throw LedgerError(LedgerErrc::insufficient_batpay_balance);
    if (amount == 0)
        return;
    acct.balance -= amount;
    tokens_[to] += amount;
}

void Ledger::withdraw(const Address& sender, AccountId id, Amount amount, const Address& to)
{
    transact(TxKind::withdraw, sender, [&](TxRecord&) { do_withdraw(sender, id, amount, to); });
}

// -- payments ----------------------------------------------------------------

const RegisteredPayment& Ledger::payment(PayIndex idx) const
{
    if (idx >= payments_.size())
        throw LedgerError(LedgerErrc::unknown_payment, "pay index " + std::to_string(idx));
    return payments_[idx];
}

const PayData& Ledger::pay_data_calldata(PayIndex idx) const
{
    payment(idx);
    return calldata_[idx];
}

const std::vector<AccountId>& Ledger::payees(PayIndex idx) const
{
    payment(idx);
    return payees_[idx];
}

PayIndex Ledger::register_payment(const Address& sender, AccountId from, Amount per_destination_amount,
                                  const PayData& pay_data, const crypto::Lock& lock, Amount notary_fee,
                                  const Address& notary_address)
{
    return transact(TxKind::register_payment, sender, [&](TxRecord& rec) {
        auto& payer = account_mut(from);
        require_owner(sender, payer);
        std::vector<AccountId> ids;
        try {
            ids = decode_pay_data(pay_data);
        } catch (const LedgerError& e) {
            throw LedgerError(LedgerErrc::malformed_pay_data, e.what());
        }
        if (ids.back() >= accounts_.size())
            throw LedgerError(LedgerErrc::unknown_account, "payee id " + std::to_string(ids.back()));
        if (!by_address_.count(notary_address))
            throw LedgerError(LedgerErrc::unknown_account, "notary address is not registered");

        const Amount total = checked_add(checked_mul(per_destination_amount, ids.size()), notary_fee);
        if (payer.balance < total)
            throw LedgerError(LedgerErrc::insufficient_batpay_balance,
                              "need " + std::to_string(total) + ", have " + std::to_string(payer.balance));

        payer.balance -= total;
        payment_pool_ = checked_add(payment_pool_, total);

        RegisteredPayment p;
        p.pay_index = payments_.size();
        p.from = from;
        p.per_destination_amount = per_destination_amount;
        p.pay_data_hash = pay_data.hash();
        p.n_payees = static_cast<std::uint32_t>(ids.size());
        p.lock = lock;
        p.notary_fee = notary_fee;
        p.notary_address = notary_address;
        p.block = block_;
        payments_.push_back(p);
        calldata_.push_back(pay_data);
        payees_.push_back(std::move(ids));

        rec.gas = gas_.register_payment_gas(p.n_payees);
        rec.items = p.n_payees;
        return p.pay_index;
    });
}

void Ledger::unlock_payment(const Address& sender, PayIndex idx, AccountId notary_id, const SymKey& master_key)
{
    transact(TxKind::unlock_payment, sender, [&](TxRecord&) {
        payment(idx);
        auto& p = payments_[idx];
        if (p.voided)
            throw LedgerError(LedgerErrc::payment_voided);
        if (p.unlocked)
            throw LedgerError(LedgerErrc::already_unlocked);
        if (block_ > p.block + params_.unlock_timeout_blocks)
            throw LedgerError(LedgerErrc::unlock_window_expired);
        if (!crypto::verify_lock(p.lock, notary_id, master_key))
            throw LedgerError(LedgerErrc::bad_key);

        const AccountId notary = by_address_.at(p.notary_address);
        credit(notary, p.notary_fee);
        payment_pool_ -= p.notary_fee;
        p.unlocked = true;
        p.master_key = master_key;
    });
}

void Ledger::refund_locked_payment(const Address& sender, PayIndex idx)
{
    transact(TxKind::refund_payment, sender, [&](TxRecord&) {
        payment(idx);
        auto& p = payments_[idx];
        if (p.unlocked)
            throw LedgerError(LedgerErrc::already_unlocked);
        if (p.voided)
            throw LedgerError(LedgerErrc::payment_voided);
        if (block_ <= p.block + params_.unlock_timeout_blocks)
            throw LedgerError(LedgerErrc::not_expired);
        const Amount total = p.escrow();
        if (payment_pool_ < total)
            throw LedgerError(LedgerErrc::escrow_exhausted);
        payment_pool_ -= total;
        credit(p.from, total);
        p.voided = true;
    });
}

// -- collect -----------------------------------------------------------------

const CollectSlot& Ledger::slot(SlotId id) const
{
    if (id >= slots_.size())
        throw LedgerError(LedgerErrc::unknown_slot, "slot " + std::to_string(id));
    return slots_[id];
}

CollectSlot& Ledger::slot_mut(SlotId id)
{
    if (id >= slots_.size())
        throw LedgerError(LedgerErrc::unknown_slot, "slot " + std::to_string(id));
    return slots_[id];
}

std::optional<SlotId> Ledger::open_slot_of(AccountId id) const
{
    auto it = open_slots_.find(id);
    if (it == open_slots_.end())
        return std::nullopt;
    return it->second;
}

Amount Ledger::stakes_held() const
{
    Amount total = 0;
    for (const auto& s : slots_) {
        if (!s.holds_stake())
            continue;
        total += s.stake;
        if (s.challenger)
            total += s.challenger_stake;
    }
    return total;
}

unsigned __int128 Ledger::accounted_supply() const
{
    unsigned __int128 total = 0;
    for (const auto& [addr, amount] : tokens_)
        total += amount;
    for (const auto& a : accounts_)
        total += a.balance;
    total += payment_pool_;
    total += stakes_held();
    return total;
}

SlotId Ledger::do_collect(const Address& owner, AccountId id, PayIndex to_index, Amount declared, Amount stake)
{
    auto& acct = account_mut(id);
    require_owner(owner, acct);
    if (open_slots_.count(id))
        throw LedgerError(LedgerErrc::slot_already_open);
    if (stake < params_.collect_stake)
        throw LedgerError(LedgerErrc::insufficient_stake, "stake below the required collect stake");
    if (to_index >= payments_.size() || to_index < acct.next_collect_index)
        throw LedgerError(LedgerErrc::bad_range, "range [" + std::to_string(acct.next_collect_index) + ", " +
                                                     std::to_string(to_index) + "] with " +
                                                     std::to_string(payments_.size()) + " payments");
    if (acct.balance < stake)
        throw LedgerError(LedgerErrc::insufficient_stake, "balance cannot cover the stake");

    acct.balance -= stake;
    CollectSlot s;
    s.id = slots_.size();
    s.account = id;
    s.from_index = acct.next_collect_index;
    s.to_index = to_index;
    s.declared_amount = declared;
    s.stake = stake;
    s.deadline = block_ + params_.challenge_period_blocks;
    slots_.push_back(s);
    open_slots_[id] = s.id;
    return s.id;
}

SlotId Ledger::collect(const Address& sender, AccountId id, PayIndex to_index, Amount declared_amount, Amount stake)
{
    return transact(TxKind::collect, sender,
                    [&](TxRecord&) { return do_collect(sender, id, to_index, declared_amount, stake); });
}

void Ledger::finalize_collect(const Address& sender, SlotId slot_id)
{
    transact(TxKind::finalize_collect, sender, [&](TxRecord&) {
        auto& s = slot_mut(slot_id);
        if (s.status != SlotStatus::open)
            throw LedgerError(LedgerErrc::not_open, to_string(s.status));
        if (block_ <= s.deadline)
            throw LedgerError(LedgerErrc::not_expired);
        if (payment_pool_ < s.declared_amount)
            throw LedgerError(LedgerErrc::escrow_exhausted, "declared amount exceeds unclaimed escrow");

        payment_pool_ -= s.declared_amount;
        auto& acct = account_mut(s.account);
        acct.balance = checked_add(acct.balance, checked_add(s.declared_amount, s.stake));
        acct.next_collect_index = s.to_index + 1;
        s.status = SlotStatus::settled_ok;
        s.resolution = "settled";
        open_slots_.erase(s.account);
    });
}

// -- challenge game ----------------------------------------------------------

void Ledger::seller_loses(CollectSlot& s, const std::string& reason)
{
    const AccountId challenger = by_address_.at(*s.challenger);
    credit(challenger, checked_add(s.stake, s.challenger_stake));
    s.status = SlotStatus::settled_fraud;
    s.resolution = reason;
    open_slots_.erase(s.account);
}

void Ledger::challenger_loses(CollectSlot& s, const std::string& reason)
{
    credit(s.account, s.challenger_stake);
    s.challenger.reset();
    s.challenger_stake = 0;
    s.response.reset();
    s.picked.reset();
    s.status = SlotStatus::open;
    s.deadline = block_ + params_.challenge_period_blocks;
    s.resolution = reason;
    ++s.challenges_survived;
}

void Ledger::challenge_open(const Address& challenger, SlotId slot_id)
{
    transact(TxKind::challenge_open, challenger, [&](TxRecord&) {
        auto& s = slot_mut(slot_id);
        if (s.status != SlotStatus::open)
            throw LedgerError(LedgerErrc::slot_not_open, to_string(s.status));
        if (block_ > s.deadline)
            throw LedgerError(LedgerErrc::too_late);
        auto cid = account_of(challenger);
        if (!cid || accounts_[*cid].balance < params_.challenge_stake)
            throw LedgerError(LedgerErrc::insufficient_stake);
        if (*cid == s.account)
            throw LedgerError(LedgerErrc::not_authorized, "an account cannot challenge its own collect");

        accounts_[*cid].balance -= params_.challenge_stake;
        s.challenger = challenger;
        s.challenger_stake = params_.challenge_stake;
        s.status = SlotStatus::challenged;
        s.phase_deadline = block_ + params_.response_timeout_blocks;
    });
}

ChallengeOutcome Ledger::challenge_respond_list(const Address& sender, SlotId slot_id,
                                                std::vector<PayIndex> pay_indexes)
{
    return transact(TxKind::challenge_respond, sender, [&](TxRecord& rec) {
        auto& s = slot_mut(slot_id);
        require_owner(sender, account(s.account));
        if (s.status != SlotStatus::challenged)
            throw LedgerError(LedgerErrc::wrong_phase, to_string(s.status));
        if (block_ > s.phase_deadline)
            throw LedgerError(LedgerErrc::timeout, "response window closed");

        ChallengeOutcome out;
        bool well_formed = std::adjacent_find(pay_indexes.begin(), pay_indexes.end(),
                                              [](PayIndex a, PayIndex b) { return a >= b; }) == pay_indexes.end();
        for (auto idx : pay_indexes)
            well_formed = well_formed && idx >= s.from_index && idx <= s.to_index;
        if (!well_formed) {
            out = {Resolution::seller_lost, "MalformedList"};
            seller_loses(s, out.reason);
        } else {
            unsigned __int128 sum = 0;
            for (auto idx : pay_indexes)
                sum += payments_[idx].per_destination_amount;
            if (sum != s.declared_amount) {
                out = {Resolution::seller_lost, "SumMismatch"};
                seller_loses(s, out.reason);
            } else {
                s.response = std::move(pay_indexes);
                s.status = SlotStatus::awaiting_pick;
                s.phase_deadline = block_ + params_.response_timeout_blocks;
            }
        }
        rec.outcome = std::string(to_string(out.resolution)) + (out.reason.empty() ? "" : ":" + out.reason);
        return out;
    });
}

void Ledger::challenge_pick(const Address& challenger, SlotId slot_id, PayIndex pay_index)
{
    transact(TxKind::challenge_pick, challenger, [&](TxRecord&) {
        auto& s = slot_mut(slot_id);
        if (s.status != SlotStatus::awaiting_pick)
            throw LedgerError(LedgerErrc::wrong_phase, to_string(s.status));
        if (!s.challenger || *s.challenger != challenger)
            throw LedgerError(LedgerErrc::not_authorized, "only the challenger picks");
        if (block_ > s.phase_deadline)
            throw LedgerError(LedgerErrc::timeout, "pick window closed");
        if (!std::binary_search(s.response->begin(), s.response->end(), pay_index))
            throw LedgerError(LedgerErrc::not_in_list);
        s.picked = pay_index;
        s.status = SlotStatus::awaiting_proof;
        s.phase_deadline = block_ + params_.response_timeout_blocks;
    });
}

ChallengeOutcome Ledger::challenge_prove_inclusion(const Address& sender, SlotId slot_id, const PayData& pay_data)
{
    return transact(TxKind::challenge_prove, sender, [&](TxRecord& rec) {
        auto& s = slot_mut(slot_id);
        require_owner(sender, account(s.account));
        if (s.status != SlotStatus::awaiting_proof)
            throw LedgerError(LedgerErrc::wrong_phase, to_string(s.status));
        if (block_ > s.phase_deadline)
            throw LedgerError(LedgerErrc::timeout, "proof window closed");

        const auto& p = payments_[*s.picked];
        std::string failure;
        if (*s.picked < s.from_index || *s.picked > s.to_index)
            failure = "OutOfRange";
        else if (pay_data.hash() != p.pay_data_hash)
            failure = "PayDataHashMismatch";
        else if (!p.unlocked)
            failure = "PaymentLocked";
        else {
            std::vector<AccountId> ids;
            try {
                ids = decode_pay_data(pay_data);
            } catch (const LedgerError&) {
                failure = "MalformedPayData";
            }
            if (failure.empty() && !std::binary_search(ids.begin(), ids.end(), s.account))
                failure = "NotIncluded";
        }

        ChallengeOutcome out;
        if (failure.empty()) {
            out = {Resolution::seller_won, "InclusionProven"};
            challenger_loses(s, out.reason);
        } else {
            out = {Resolution::seller_lost, failure};
            seller_loses(s, failure);
        }
        rec.outcome = std::string(to_string(out.resolution)) + ":" + out.reason;
        return out;
    });
}

ChallengeOutcome Ledger::timeout_resolve(const Address& sender, SlotId slot_id)
{
    return transact(TxKind::timeout_resolve, sender, [&](TxRecord& rec) {
        auto& s = slot_mut(slot_id);
        const bool seller_turn = s.status == SlotStatus::challenged || s.status == SlotStatus::awaiting_proof;
        const bool challenger_turn = s.status == SlotStatus::awaiting_pick;
        if (!(seller_turn || challenger_turn) || block_ <= s.phase_deadline)
            throw LedgerError(LedgerErrc::no_timeout_pending);

        ChallengeOutcome out;
        if (seller_turn) {
            out = {Resolution::seller_lost, "SellerTimeout"};
            seller_loses(s, out.reason);
        } else {
            out = {Resolution::challenger_lost, "ChallengerTimeout"};
            challenger_loses(s, out.reason);
        }
        rec.outcome = std::string(to_string(out.resolution)) + ":" + out.reason;
        return out;
    });
}

// -- delegation --------------------------------------------------------------

std::optional<SlotId> Ledger::submit_delegated(const Address& sender, AccountId delegate, const SignedOp& op,
                                               Amount fee)
{
    const TxKind kind = std::holds_alternative<CollectOp>(op.op) ? TxKind::collect : TxKind::withdraw;
    return transact(kind, sender, [&](TxRecord& rec) -> std::optional<SlotId> {
        require_owner(sender, account(delegate));
        auto& origin = account_mut(op.originator);
        rec.on_behalf_of = origin.address;
        if (crypto::address_of(op.signer_pk) != origin.address ||
            !crypto::verify(op.signer_pk, op.signing_bytes(), op.signature))
            throw LedgerError(LedgerErrc::bad_signature);
        if (fee > op.fee_limit)
            throw LedgerError(LedgerErrc::fee_exceeds_limit);
        if (op.nonce != origin.next_nonce)
            throw LedgerError(LedgerErrc::stale_nonce, "expected nonce " + std::to_string(origin.next_nonce));
        if (origin.balance < fee)
            throw LedgerError(LedgerErrc::insufficient_batpay_balance, "cannot cover the delegate fee");

        const Address owner = origin.address;
        const AccountId origin_id = op.originator;
        debit(origin_id, fee);
        credit(delegate, fee);
        std::optional<SlotId> result;
        try {
            if (const auto* c = std::get_if<CollectOp>(&op.op))
                result = do_collect(owner, origin_id, c->to_index, c->declared_amount, c->stake);
            else {
                const auto& w = std::get<WithdrawOp>(op.op);
                do_withdraw(owner, origin_id, w.amount, w.to);
            }
        } catch (...) {
            debit(delegate, fee);
            credit(origin_id, fee);
            throw;
        }
        ++account_mut(origin_id).next_nonce;
        return result;
    });
}

void Ledger::record_external(TxKind kind, const Address& sender, bool ok, const std::string& outcome)
{
    if (ok) {
        transact(kind, sender, [&](TxRecord& rec) { rec.outcome = outcome; });
        return;
    }
    TxRecord rec;
    rec.seq = log_.size();
    rec.block = block_;
    rec.kind = kind;
    rec.sender = sender;
    rec.ok = false;
    rec.outcome = outcome;
    log_.push_back(rec);
}

// ---------------------------------------------------------------------------

std::vector<PayIndex> inclusions(const Ledger& ledger, AccountId account, PayIndex from, PayIndex to)
{
    std::vector<PayIndex> out;
    if (ledger.payment_count() == 0)
        return out;
    to = std::min<PayIndex>(to, ledger.payment_count() - 1);
    for (PayIndex i = from; i <= to; ++i) {
        const auto& p = ledger.payment(i);
        if (!p.unlocked)
            continue;
        const auto& ids = ledger.payees(i);
        if (std::binary_search(ids.begin(), ids.end(), account))
            out.push_back(i);
    }
    return out;
}

Amount honest_collect_amount(const Ledger& ledger, AccountId account, PayIndex from, PayIndex to)
{
    Amount total = 0;
    for (auto i : inclusions(ledger, account, from, to))
        total += ledger.payment(i).per_destination_amount;
    return total;
}

} // namespace wibson::ledger
