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

#include "wibson/ledger/gas.hpp"

namespace wibson::ledger {

const char* to_string(TxKind k)
{
    switch (k) {
    case TxKind::transfer:
        return "transfer";
    case TxKind::register_account:
        return "register";
    case TxKind::deposit:
        return "deposit";
    case TxKind::register_payment:
        return "register_payment";
    case TxKind::unlock_payment:
        return "unlock_payment";
    case TxKind::refund_payment:
        return "refund_locked_payment";
    case TxKind::collect:
        return "collect";
    case TxKind::finalize_collect:
        return "finalize_collect";
    case TxKind::challenge_open:
        return "challenge_open";
    case TxKind::challenge_respond:
        return "challenge_respond_list";
    case TxKind::challenge_pick:
        return "challenge_pick";
    case TxKind::challenge_prove:
        return "challenge_prove_inclusion";
    case TxKind::timeout_resolve:
        return "timeout_resolve";
    case TxKind::withdraw:
        return "withdraw";
    case TxKind::create_order:
        return "create_order";
    case TxKind::close_order:
        return "close_order";
    }
    return "unknown";
}

Gas GasSchedule::fixed_cost(TxKind k) const
{
    switch (k) {
    case TxKind::transfer:
        return transfer;
    case TxKind::register_account:
        return register_account;
    case TxKind::deposit:
        return deposit;
    case TxKind::register_payment:
        return register_payment_fixed;
    case TxKind::unlock_payment:
        return unlock_payment;
    case TxKind::refund_payment:
        return refund_payment;
    case TxKind::collect:
        return collect;
    case TxKind::finalize_collect:
        return finalize_collect;
    case TxKind::challenge_open:
        return challenge_open;
    case TxKind::challenge_respond:
        return challenge_respond;
    case TxKind::challenge_pick:
        return challenge_pick;
    case TxKind::challenge_prove:
        return challenge_prove;
    case TxKind::timeout_resolve:
        return timeout_resolve;
    case TxKind::withdraw:
        return withdraw;
    case TxKind::create_order:
        return create_order;
    case TxKind::close_order:
        return close_order;
    }
    return 0;
}

void GasMeter::charge(const TxRecord& rec)
{
    if (!rec.ok)
        return;
    cumulative_ += rec.gas;
    auto& k = by_kind_[rec.kind];
    ++k.count;
    k.gas += rec.gas;
    k.items += rec.items;
    by_payer_[rec.sender] += rec.gas;
}

GasReport gas_report(const std::vector<TxRecord>& log, const GasSchedule& schedule)
{
    GasReport r;
    for (const auto& rec : log) {
        if (!rec.ok)
            continue;
        r.cumulative += rec.gas;
        auto& k = r.by_kind[rec.kind];
        ++k.count;
        k.gas += rec.gas;
        k.items += rec.items;
        r.by_payer[rec.sender] += rec.gas;
    }

    const auto reg = r.by_kind.count(TxKind::register_payment) ? r.by_kind.at(TxKind::register_payment) : KindTotals{};
    const auto col = r.by_kind.count(TxKind::collect) ? r.by_kind.at(TxKind::collect) : KindTotals{};
    if (reg.count > 0 && reg.items > 0) {
        r.batch_size = (reg.items + reg.count / 2) / reg.count;
        r.register_per_payment = ceil_div(reg.gas, reg.items);
    }
    if (col.count > 0 && r.batch_size > 0)
        r.collect_per_payment = ceil_div(col.gas, col.count * r.batch_size);
    r.total_per_payment = r.register_per_payment + r.collect_per_payment;
    r.usd_per_payment = static_cast<double>(r.total_per_payment) * schedule.usd_per_gas.value();
    r.usd_total = static_cast<double>(r.cumulative) * schedule.usd_per_gas.value();
    return r;
}

} // namespace wibson::ledger
