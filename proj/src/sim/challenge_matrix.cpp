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

#include "wibson/sim/challenge_matrix.hpp"

#include <algorithm>
#include <bit>
#include <sstream>
#include <thread>

namespace wibson::sim {

using namespace wibson::ledger;

namespace {

constexpr unsigned kShapes = 6;

Address tag(std::uint8_t t)
{
    Address a;
    a.bytes.fill(t);
    return a;
}

LedgerParams matrix_params()
{
    LedgerParams p;
    p.challenge_period_blocks = 3;
    p.response_timeout_blocks = 2;
    p.unlock_timeout_blocks = 2;
    p.collect_stake = 5;
    p.challenge_stake = 5;
    return p;
}

const Address kTreasury = tag(0xee);
const Address kBuyer = tag(1);
const Address kNotary = tag(2);
const Address kSeller[4] = {tag(3), tag(4), tag(5), tag(6)};
const Address kChallenger = tag(7);

struct Base
{
    Ledger ledger{kTreasury, matrix_params()};
    AccountId s0 = 0;
    AccountId challenger = 0;
    Amount honest = 0;
    std::vector<PayIndex> inclusions;
    PayIndex last = 0;
};

Base build(const std::vector<PaymentCase>& payments, Amount per)
{
    Base b;
    auto& L = b.ledger;
    L.transfer(kTreasury, kBuyer, 1000);
    const auto buyer = L.register_account(kBuyer, kBuyer);
    L.deposit(kBuyer, buyer, 1000);
    const auto notary = L.register_account(kNotary, kNotary);
    std::vector<AccountId> sellers;
    for (const auto& a : kSeller)
        sellers.push_back(L.register_account(a, a));
    b.s0 = sellers[0];
    L.transfer(kTreasury, kSeller[0], 100);
    L.deposit(kSeller[0], b.s0, 100);
    L.transfer(kTreasury, kChallenger, 100);
    b.challenger = L.register_account(kChallenger, kChallenger);
    L.deposit(kChallenger, b.challenger, 100);

    SymKey master;
    master.bytes.fill(0x42);
    const auto lock = crypto::make_lock(static_cast<std::uint32_t>(notary), master);

    std::vector<PayIndex> idx;
    for (std::size_t i = 0; i < payments.size(); ++i) {
        std::vector<AccountId> ids;
        switch (payments[i].shape) {
        case PaymentShape::focal_alone:
            ids = {sellers[0]};
            break;
        case PaymentShape::focal_crowded:
            ids = sellers;
            break;
        case PaymentShape::others_only:
            ids = {sellers[1], sellers[2], sellers[3]};
            break;
        }
        idx.push_back(L.register_payment(kBuyer, buyer, per, encode_pay_data(ids), lock, 1, kNotary));
        if (payments[i].unlocked && payments[i].shape != PaymentShape::others_only) {
            b.honest += per;
            b.inclusions.push_back(idx.back());
        }
    }
    for (std::size_t i = 0; i < payments.size(); ++i)
        if (payments[i].unlocked)
            L.unlock_payment(kNotary, idx[i], notary, master);
    L.advance_block(L.params().unlock_timeout_blocks + 1);
    for (std::size_t i = 0; i < payments.size(); ++i)
        if (!payments[i].unlocked)
            L.refund_locked_payment(kBuyer, idx[i]);
    b.last = idx.back();
    return b;
}

std::string describe(const std::vector<PaymentCase>& payments)
{
    std::ostringstream os;
    for (const auto& p : payments)
        os << (p.shape == PaymentShape::focal_alone ? 'A' : p.shape == PaymentShape::focal_crowded ? 'C' : 'O')
           << (p.unlocked ? 'u' : 'r');
    return os.str();
}

class Runner
{
public:
    Runner(const std::vector<PaymentCase>& payments, Amount per, MatrixResult& out)
        : base_(build(payments, per)), per_(per), out_(out), name_(describe(payments))
    {
    }

    void run()
    {
        const auto h = base_.honest;
        honest_cases(h);
        fraud_cases(h + 1);
        fraud_cases(h + per_);
        if (h >= 1)
            fraud_cases(h - 1);
    }

private:
    struct Play
    {
        Ledger ledger;
        SlotId slot = 0;
        Amount seller_before = 0;
        Amount challenger_before = 0;
    };

    Play start(Amount declared, bool challenge)
    {
        Play p{base_.ledger};
        auto& L = p.ledger;
        p.seller_before = L.account(base_.s0).balance;
        p.challenger_before = L.account(base_.challenger).balance;
        p.slot = L.collect(kSeller[0], base_.s0, base_.last, declared, L.params().collect_stake);
        if (challenge)
            L.challenge_open(kChallenger, p.slot);
        return p;
    }

    void advance_past_phase(Ledger& L, SlotId slot) { L.advance_block(L.slot(slot).phase_deadline + 1 - L.block()); }

    void finalize(Ledger& L, SlotId slot)
    {
        L.advance_block(L.slot(slot).deadline + 1 - L.block());
        L.finalize_collect(kSeller[0], slot);
    }

    template <typename F>
    void attempt(const std::string& strategy, bool honest, Amount declared, F&& body)
    {
        ++out_.cases;
        ++(honest ? out_.honest_cases : out_.fraud_cases);
        ++out_.by_strategy[strategy];
        std::string failure;
        try {
            failure = body();
        } catch (const std::exception& e) {
            failure = std::string("unexpected error: ") + e.what();
        }
        if (!failure.empty()) {
            ++out_.failures;
            if (out_.failure_samples.size() < 10)
                out_.failure_samples.push_back(name_ + " declared " + std::to_string(declared) + " " + strategy +
                                               ": " + failure);
        }
    }

    std::string expect_honest(const Play& p, Amount challenger_loss)
    {
        const auto& L = p.ledger;
        const auto& s = L.slot(p.slot);
        if (s.status != SlotStatus::settled_ok)
            return std::string("expected settled_ok, got ") + to_string(s.status);
        if (L.account(base_.s0).balance != p.seller_before + base_.honest + challenger_loss)
            return "seller balance " + std::to_string(L.account(base_.s0).balance);
        if (L.account(base_.challenger).balance + challenger_loss != p.challenger_before)
            return "challenger balance " + std::to_string(L.account(base_.challenger).balance);
        if (L.account(base_.s0).next_collect_index != base_.last + 1)
            return "range not consumed";
        return conserved(L);
    }

    std::string expect_fraud(const Play& p)
    {
        const auto& L = p.ledger;
        const auto& s = L.slot(p.slot);
        const auto stake = L.params().collect_stake;
        if (s.status != SlotStatus::settled_fraud)
            return std::string("expected settled_fraud, got ") + to_string(s.status);
        if (L.account(base_.s0).balance + stake != p.seller_before)
            return "seller balance " + std::to_string(L.account(base_.s0).balance);
        if (L.account(base_.challenger).balance != p.challenger_before + stake)
            return "challenger balance " + std::to_string(L.account(base_.challenger).balance);
        if (L.account(base_.s0).next_collect_index != 0)
            return "range consumed by a fraudulent collect";
        return conserved(L);
    }

    static std::string conserved(const Ledger& L)
    {
        return L.accounted_supply() == static_cast<unsigned __int128>(kTotalSupply) ? "" : "supply not conserved";
    }

    void honest_cases(Amount h)
    {
        const auto cstake = base_.ledger.params().challenge_stake;
        attempt("honest/unchallenged", true, h, [&] {
            auto p = start(h, false);
            finalize(p.ledger, p.slot);
            return expect_honest(p, 0);
        });
        for (auto pick : base_.inclusions) {
            attempt("honest/proved", true, h, [&]() -> std::string {
                auto p = start(h, true);
                auto& L = p.ledger;
                L.challenge_respond_list(kSeller[0], p.slot, base_.inclusions);
                L.challenge_pick(kChallenger, p.slot, pick);
                auto out = L.challenge_prove_inclusion(kSeller[0], p.slot, L.pay_data_calldata(pick));
                if (out.resolution != Resolution::seller_won)
                    return "proof rejected: " + out.reason;
                finalize(L, p.slot);
                return expect_honest(p, cstake);
            });
        }
        attempt("honest/challenger_timeout", true, h, [&]() -> std::string {
            auto p = start(h, true);
            auto& L = p.ledger;
            L.challenge_respond_list(kSeller[0], p.slot, base_.inclusions);
            advance_past_phase(L, p.slot);
            L.timeout_resolve(kSeller[0], p.slot);
            finalize(L, p.slot);
            return expect_honest(p, cstake);
        });
    }

    PayIndex honest_pick(const std::vector<PayIndex>& list) const
    {
        for (auto i : list)
            if (!std::binary_search(base_.inclusions.begin(), base_.inclusions.end(), i))
                return i;
        return list.front();
    }

    void fraud_cases(Amount d)
    {
        attempt("fraud/silent", false, d, [&] {
            auto p = start(d, true);
            advance_past_phase(p.ledger, p.slot);
            p.ledger.timeout_resolve(kChallenger, p.slot);
            return expect_fraud(p);
        });
        attempt("fraud/sum_mismatch", false, d, [&] {
            auto p = start(d, true);
            p.ledger.challenge_respond_list(kSeller[0], p.slot, base_.inclusions);
            return expect_fraud(p);
        });
        if (d % per_ != 0)
            return;

        const auto n = static_cast<unsigned>(base_.last + 1);
        const auto first = base_.last + 1 - n;
        for (unsigned mask = 1; mask < (1u << n); ++mask) {
            if (std::popcount(mask) * per_ != d)
                continue;
            std::vector<PayIndex> list;
            for (unsigned i = 0; i < n; ++i)
                if (mask & (1u << i))
                    list.push_back(first + i);
            if (list == base_.inclusions)
                continue;
            const auto pick = honest_pick(list);

            auto picked = [&] {
                auto p = start(d, true);
                p.ledger.challenge_respond_list(kSeller[0], p.slot, list);
                p.ledger.challenge_pick(kChallenger, p.slot, pick);
                return p;
            };
            attempt("fraud/proof_real", false, d, [&] {
                auto p = picked();
                p.ledger.challenge_prove_inclusion(kSeller[0], p.slot, p.ledger.pay_data_calldata(pick));
                return expect_fraud(p);
            });
            attempt("fraud/proof_forged", false, d, [&] {
                auto p = picked();
                p.ledger.challenge_prove_inclusion(kSeller[0], p.slot, encode_pay_data(std::vector<AccountId>{base_.s0}));
                return expect_fraud(p);
            });
            attempt("fraud/silent_after_pick", false, d, [&] {
                auto p = picked();
                advance_past_phase(p.ledger, p.slot);
                p.ledger.timeout_resolve(kChallenger, p.slot);
                return expect_fraud(p);
            });
        }
    }

    Base base_;
    Amount per_;
    MatrixResult& out_;
    std::string name_;
};

std::vector<PaymentCase> decode_sequence(std::size_t length, std::uint64_t code)
{
    std::vector<PaymentCase> out(length);
    for (auto& p : out) {
        const auto digit = code % kShapes;
        code /= kShapes;
        p.shape = static_cast<PaymentShape>(digit / 2);
        p.unlocked = digit % 2 == 0;
    }
    return out;
}

void merge(MatrixResult& into, const MatrixResult& from)
{
    into.sequences += from.sequences;
    into.cases += from.cases;
    into.honest_cases += from.honest_cases;
    into.fraud_cases += from.fraud_cases;
    into.failures += from.failures;
    for (const auto& [k, v] : from.by_strategy)
        into.by_strategy[k] += v;
    for (const auto& f : from.failure_samples)
        if (into.failure_samples.size() < 10)
            into.failure_samples.push_back(f);
}

} // namespace

std::uint64_t matrix_sequence_count(std::size_t max_payments)
{
    std::uint64_t total = 0, layer = 1;
    for (std::size_t n = 1; n <= max_payments; ++n) {
        layer *= kShapes;
        total += layer;
    }
    return total;
}

MatrixResult run_matrix_sequence(const std::vector<PaymentCase>& payments, Amount per)
{
    MatrixResult r;
    r.sequences = 1;
    Runner(payments, per, r).run();
    return r;
}

MatrixResult run_challenge_matrix(const MatrixSpec& spec)
{
    // flatten (length, code) pairs into one index space
    std::vector<std::pair<std::size_t, std::uint64_t>> layers;
    std::uint64_t size = 1;
    for (std::size_t n = 1; n <= spec.max_payments; ++n) {
        size *= kShapes;
        layers.emplace_back(n, size);
    }
    const auto total = matrix_sequence_count(spec.max_payments);

    unsigned threads = spec.threads ? spec.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, total));
    std::vector<MatrixResult> partial(threads);

    auto work = [&](unsigned t) {
        std::uint64_t flat = 0;
        for (const auto& [len, count] : layers)
            for (std::uint64_t code = 0; code < count; ++code, ++flat) {
                if (flat % threads != t)
                    continue;
                ++partial[t].sequences;
                Runner(decode_sequence(len, code), spec.per, partial[t]).run();
            }
    };
    if (threads == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back(work, t);
        for (auto& th : pool)
            th.join();
    }

    MatrixResult out;
    for (const auto& p : partial)
        merge(out, p);
    return out;
}

} // namespace wibson::sim
