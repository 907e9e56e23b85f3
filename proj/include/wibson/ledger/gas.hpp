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

#include "wibson/ledger/types.hpp"

#include <map>
#include <string>
#include <vector>

namespace wibson::ledger {

enum class TxKind
{
    transfer,
    register_account,
    deposit,
    register_payment,
    unlock_payment,
    refund_payment,
    collect,
    finalize_collect,
    challenge_open,
    challenge_respond,
    challenge_pick,
    challenge_prove,
    timeout_resolve,
    withdraw,
    create_order,
    close_order,
};

const char* to_string(TxKind k);

/// Exact rational, used for the USD-per-gas calibration.
struct Rational
{
    std::int64_t num = 0;
    std::int64_t den = 1;
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

/// Affine cost model. register_payment and collect are pinned to the
/// reference measurements (228,255 gas for 1000 payees, 167,440 per collect);
/// the remaining constants are illustrative and only feed per-kind totals.
struct GasSchedule
{
    Gas register_payment_fixed = 36'255;
    Gas register_payment_per_id = 192;
    Gas collect = 167'440;

    Gas transfer = 51'000;
    Gas register_account = 64'000;
    Gas deposit = 48'000;
    Gas unlock_payment = 42'000;
    Gas refund_payment = 38'000;
    Gas finalize_collect = 31'000;
    Gas challenge_open = 62'000;
    Gas challenge_respond = 45'000;
    Gas challenge_pick = 33'000;
    Gas challenge_prove = 58'000;
    Gas timeout_resolve = 36'000;
    Gas withdraw = 41'000;
    Gas create_order = 118'000;
    Gas close_order = 29'000;

    /// 397 gas costs $0.00044.
    Rational usd_per_gas{44, 39'700'000};

    Gas register_payment_gas(std::uint64_t n_payees) const
    {
        return register_payment_fixed + register_payment_per_id * n_payees;
    }
    Gas fixed_cost(TxKind k) const;
};

inline std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b)
{
    return b == 0 ? 0 : (a + b - 1) / b;
}

/// One line of the transaction log.
struct TxRecord
{
    std::uint64_t seq = 0;
    BlockNumber block = 0;
    TxKind kind = TxKind::transfer;
    /// Account paying the gas: the submitter, or the delegate for relayed ops.
    Address sender;
    std::optional<Address> on_behalf_of;
    Gas gas = 0;
    /// Payees for register_payment; 0 otherwise.
    std::uint64_t items = 0;
    bool ok = true;
    std::string outcome;
};

struct KindTotals
{
    std::uint64_t count = 0;
    Gas gas = 0;
    std::uint64_t items = 0;
};

/// Live accumulator updated on every charged transaction.
class GasMeter
{
public:
    void charge(const TxRecord& rec);

    Gas cumulative() const { return cumulative_; }
    const std::map<TxKind, KindTotals>& by_kind() const { return by_kind_; }
    const std::map<Address, Gas>& by_payer() const { return by_payer_; }

private:
    Gas cumulative_ = 0;
    std::map<TxKind, KindTotals> by_kind_;
    std::map<Address, Gas> by_payer_;
};

struct GasReport
{
    std::map<TxKind, KindTotals> by_kind;
    std::map<Address, Gas> by_payer;
    Gas cumulative = 0;

    /// Mean payees per registered payment.
    std::uint64_t batch_size = 0;
    /// ceil(register gas / payees).
    Gas register_per_payment = 0;
    /// ceil(mean collect gas / batch_size): one collect per accumulated batch.
    Gas collect_per_payment = 0;
    Gas total_per_payment = 0;
    double usd_per_payment = 0.0;
    double usd_total = 0.0;
};

/// Recomputes everything from the log; failed transactions carry no gas.
GasReport gas_report(const std::vector<TxRecord>& log, const GasSchedule& schedule);

} // namespace wibson::ledger
