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

// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "wibson/sim/engine.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

using namespace wibson;
using namespace wibson::sim;
namespace fs = std::filesystem;

namespace {

fs::path g_dir = WIBSON_SCENARIO_DIR;

struct Outcome
{
    bool pass = true;
    std::ostringstream detail;

    void require(bool cond, const std::string& what)
    {
        if (!cond && pass) {
            pass = false;
            detail << "FAILED: " << what << "; ";
        }
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<fs::path> bundled()
{
    std::vector<fs::path> out;
    for (const auto& e : fs::directory_iterator(g_dir))
        if (e.path().extension() == ".json")
            out.push_back(e.path());
    std::sort(out.begin(), out.end());
    return out;
}

Address tag(std::uint8_t t, std::uint16_t i = 0)
{
    Address a;
    a.bytes.fill(t);
    a.bytes[18] = static_cast<std::uint8_t>(i >> 8);
    a.bytes[19] = static_cast<std::uint8_t>(i);
    return a;
}

bool decrypt_fails(const SymKey& key, const crypto::Ciphertext& ct)
{
    try {
        crypto::sym_decrypt(key, ct);
        return false;
    } catch (const std::exception&) {
        return true;
    }
}

std::set<Address> payee_addresses(const ledger::Ledger& L, ledger::PayIndex idx)
{
    std::set<Address> out;
    for (auto id : L.payees(idx))
        out.insert(L.account(id).address);
    return out;
}

// -- 1 ----------------------------------------------------------------------

Outcome gas_amortization()
{
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();

    // one register of 1000 payees and one collect, straight on the ledger
    ledger::Ledger L(tag(0xee));
    const auto buyer = tag(1), notary = tag(2);
    L.transfer(tag(0xee), buyer, 10'000);
    const auto bid = L.register_account(buyer, buyer);
    L.deposit(buyer, bid, 5'000);
    const auto nid = L.register_account(notary, notary);
    std::vector<ledger::AccountId> ids;
    for (std::uint16_t i = 0; i < 1000; ++i)
        ids.push_back(L.register_account(tag(0x40, i), tag(0x40, i)));
    const auto first = ids.front();
    L.transfer(tag(0xee), tag(0x40, 0), L.params().collect_stake);
    L.deposit(tag(0x40, 0), first, L.params().collect_stake);

    Rng rng(1);
    const auto m = rng.fixed<SymKey>();
    const auto idx = L.register_payment(buyer, bid, 1, ledger::encode_pay_data(ids), crypto::make_lock(nid, m), 0, notary);
    L.unlock_payment(notary, idx, nid, m);
    L.collect(tag(0x40, 0), first, idx, 1, L.params().collect_stake);

    const auto r = L.gas_report();
    o.require(r.by_kind.at(ledger::TxKind::register_payment).gas == 228'255, "ledger register gas 228,255");
    o.require(r.by_kind.at(ledger::TxKind::collect).gas == 167'440, "ledger collect gas 167,440");
    o.require(r.register_per_payment == 229 && r.collect_per_payment == 168 && r.total_per_payment == 397,
              "ledger per-payment 229/168/397");
    o.require(std::abs(r.usd_per_payment - 0.00044) <= 0.00001, "ledger usd/payment");

    // the same figures from the market run
    Engine e(load_scenario(g_dir / "happy_1000.json"));
    o.require(e.run(), "happy_1000 invariants");
    const auto g = e.ledger().gas_report();
    const auto& reg = g.by_kind.at(ledger::TxKind::register_payment);
    o.require(reg.count == 1 && reg.items == 1000 && reg.gas == 228'255, "happy_1000 single register of 1000");
    o.require(g.register_per_payment == 229, "happy_1000 register/payment");
    o.require(g.collect_per_payment == 168, "happy_1000 collect/payment");
    o.require(g.total_per_payment == 397, "happy_1000 total/payment");
    o.require(std::abs(g.usd_per_payment - 0.00044) <= 0.00001, "happy_1000 usd/payment");

    const double secs = seconds_since(t0);
    o.require(secs < 5.0, "runtime under 5 s");
    o.detail << "register " << reg.gas << " (" << g.register_per_payment << "/payment), collect "
             << g.by_kind.at(ledger::TxKind::collect).gas / g.by_kind.at(ledger::TxKind::collect).count << " ("
             << g.collect_per_payment << "/payment), " << g.total_per_payment << " gas/payment, $" << std::fixed
             << std::setprecision(5) << g.usd_per_payment << "/payment, " << std::setprecision(2) << secs << " s";
    return o;
}

// -- 2 ----------------------------------------------------------------------

Outcome atomic_exchange()
{
    Outcome o;
    const auto base = load_scenario(g_dir / "happy_small.json");
    std::size_t payloads = 0, slots = 0, fees = 0;

    // the fee lands in the unlock transaction itself
    {
        ledger::Ledger L(tag(0xee));
        const auto buyer = tag(1), notary = tag(2), seller = tag(3);
        L.transfer(tag(0xee), buyer, 1000);
        const auto bid = L.register_account(buyer, buyer);
        L.deposit(buyer, bid, 1000);
        const auto nid = L.register_account(notary, notary);
        const auto sid = L.register_account(seller, seller);
        Rng rng(2);
        const auto m = rng.fixed<SymKey>();
        const std::vector<ledger::AccountId> one{sid};
        const auto idx = L.register_payment(buyer, bid, 10, ledger::encode_pay_data(one), crypto::make_lock(nid, m), 7, notary);
        const auto before = L.account(nid).balance;
        const auto log_size = L.tx_log().size();
        L.unlock_payment(notary, idx, nid, m);
        o.require(L.tx_log().size() == log_size + 1 && L.account(nid).balance == before + 7,
                  "notary fee credited by the unlock transaction");
    }

    for (std::uint64_t seed = 1; seed <= 100 && o.pass; ++seed) {
        Engine e(base, seed);
        o.require(e.run(), "invariants, seed " + std::to_string(seed));
        const auto& L = e.ledger();

        ledger::Amount notary_due = 0;
        for (const auto* b : e.buyers())
            for (const auto& ord : b->orders())
                for (const auto& batch : ord.batches) {
                    o.require(batch.status == actors::BatchStatus::unlocked, "batch unlocked");
                    if (!batch.response || !batch.pay_index)
                        continue;
                    notary_due += batch.fee;
                    o.require(L.payment(*batch.pay_index).unlocked, "payment unlocked");
                    for (const auto& r : batch.response->results) {
                        if (r.verdict == actors::Verdict::rejected)
                            continue;
                        const auto* s = e.seller_by_address(r.address);
                        o.require(s != nullptr, "payee is a seller");
                        if (!s)
                            continue;
                        const actors::Sale* sale = nullptr;
                        for (const auto& x : s->sales())
                            if (x.order_id == *ord.id && x.notary == batch.notary)
                                sale = &x;
                        o.require(sale && batch.recovered.count(r.address) &&
                                      batch.recovered.at(r.address) == sale->payload,
                                  "recovered plaintext equals extracted payload");
                        ++payloads;
                    }
                }

        for (const auto* s : e.sellers())
            for (auto sid : s->slots()) {
                const auto& slot = L.slot(sid);
                ledger::Amount inclusions = 0;
                for (auto p = slot.from_index; p <= slot.to_index; ++p) {
                    const auto& ids = L.payees(p);
                    inclusions += std::count(ids.begin(), ids.end(), slot.account);
                }
                const ledger::Amount owed = e.buyers()[0]->orders()[0].plan.price * inclusions;
                o.require(slot.status == ledger::SlotStatus::settled_ok && slot.declared_amount == owed &&
                              s->withdrawn() == owed,
                          "collect credits price x inclusions");
                ++slots;
            }

        for (const auto* n : e.notaries()) {
            const auto gained = e.balances(n->address()).batpay - e.start_balances(n->name()).batpay;
            o.require(gained == notary_due, "notary fee credited");
            fees += notary_due ? 1 : 0;
        }
    }
    o.detail << "100 seeded runs, " << payloads << " payloads byte-identical, " << slots
             << " collects equal to price x inclusions, notary fee credited in " << fees << " runs";
    return o;
}

// -- 3 ----------------------------------------------------------------------

Outcome atomicity_under_failure()
{
    Outcome o;
    const auto base = load_scenario(g_dir / "silent_notary.json");
    std::size_t attempts = 0;
    for (std::uint64_t seed = 1; seed <= 20 && o.pass; ++seed) {
        Engine e(base, seed);
        o.require(e.run(), "invariants, seed " + std::to_string(seed));
        Rng guess(seed);
        for (const auto* b : e.buyers())
            for (const auto& ord : b->orders())
                for (const auto& batch : ord.batches) {
                    o.require(batch.status == actors::BatchStatus::refunded, "batch refunded");
                    o.require(batch.balance_after_refund == batch.balance_before_escrow, "refund restores balance");
                    o.require(batch.recovered.empty(), "nothing recovered");
                    if (batch.pay_index)
                        o.require(!e.ledger().payment(*batch.pay_index).master_key, "master key never published");
                    for (const auto& [addr, ct] : batch.data) {
                        const std::vector<SymKey> keys{SymKey{}, guess.fixed<SymKey>(), guess.fixed<SymKey>()};
                        for (const auto& k : keys) {
                            o.require(decrypt_fails(k, ct), "decrypt attempt fails");
                            ++attempts;
                        }
                        if (batch.response)
                            for (const auto& r : batch.response->results)
                                if (r.encrypted_key)
                                    for (const auto& k : keys) {
                                        o.require(decrypt_fails(k, *r.encrypted_key), "key unwrap fails");
                                        ++attempts;
                                    }
                    }
                }
        for (const auto* s : e.sellers()) {
            const auto now = e.balances(s->address());
            const auto start = e.start_balances(s->name());
            o.require(now.batpay + now.tokens == start.batpay + start.tokens, "seller receives nothing");
            o.require(s->slots().empty() && s->withdrawn() == 0, "seller never collects");
        }
        for (const auto* n : e.notaries()) {
            const auto now = e.balances(n->address());
            const auto start = e.start_balances(n->name());
            o.require(now.batpay == start.batpay && now.tokens == start.tokens, "notary receives nothing");
        }
    }

    std::size_t violations = 0;
    for (const char* name : {"silent_notary", "fabricating_seller", "greedy_seller", "garbage_key",
                             "spurious_challenger", "lossy_transport", "delegate"}) {
        Engine e(load_scenario(g_dir / (std::string(name) + ".json")));
        e.run();
        violations += e.violations().size();
    }
    o.require(violations == 0, "adversarial suite has no violations");
    o.detail << "20 seeds refunded exactly, " << attempts << " decrypt attempts failed, " << violations
             << " violations over the adversarial suite";
    return o;
}

// -- 4 ----------------------------------------------------------------------

Outcome challenge_game()
{
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    const auto s = load_scenario(g_dir / "challenge_matrix.json");
    const auto r = run_challenge_matrix(s.matrix);
    const double secs = seconds_since(t0);
    o.require(r.sequences == matrix_sequence_count(s.matrix.max_payments), "every sequence enumerated");
    o.require(r.failures == 0, "every case sound");
    o.require(secs < 60.0, "runtime under 60 s");
    o.detail << r.sequences << " payment sequences, " << r.cases << " cases (" << r.honest_cases << " honest, "
             << r.fraud_cases << " fraudulent), " << r.failures << " failures, " << std::fixed << std::setprecision(1)
             << secs << " s";
    for (const auto& f : r.failure_samples)
        o.detail << "\n    " << f;
    return o;
}

// -- 5 ----------------------------------------------------------------------

Outcome conservation()
{
    Outcome o;
    std::uint64_t checked = 0;
    std::size_t n = 0;
    for (const auto& path : bundled()) {
        Engine e(load_scenario(path));
        e.run();
        ++n;
        for (const auto& inv : e.invariants())
            if (inv.name == "conservation" || inv.name == "challenge_matrix") {
                checked += inv.checked;
                o.require(inv.violations == 0, path.filename().string() + " " + inv.name);
            }
        if (e.scenario().kind == Scenario::Kind::market)
            o.require(e.ledger().accounted_supply() == static_cast<unsigned __int128>(ledger::kTotalSupply),
                      path.filename().string() + " final supply");
    }
    o.detail << n << " scenarios, " << checked << " post-transaction checks, supply 9e18 exact";
    return o;
}

// -- 6 ----------------------------------------------------------------------

Outcome notarization_filtering()
{
    Outcome o;
    auto base = load_scenario(g_dir / "fabricating_seller.json");
    base.notaries[0].policy.percentage = 1.0;
    std::size_t rejected = 0, fakers = 0;
    for (std::uint64_t seed = 1; seed <= 1000 && o.pass; ++seed) {
        Engine e(base, seed);
        o.require(e.run(), "invariants, seed " + std::to_string(seed));
        for (const auto* b : e.buyers())
            for (const auto& ord : b->orders())
                for (const auto& batch : ord.batches) {
                    o.require(batch.response && batch.pay_index, "batch paid");
                    if (!batch.response || !batch.pay_index)
                        continue;
                    const auto paid = payee_addresses(e.ledger(), *batch.pay_index);
                    for (const auto& r : batch.response->results) {
                        const bool faker = e.seller_by_address(r.address)->config().behavior.fabricating;
                        if (faker) {
                            ++fakers;
                            o.require(r.verdict == actors::Verdict::rejected, "fabricator rejected");
                            o.require(!paid.count(r.address), "fabricator excluded from payData");
                            rejected += r.verdict == actors::Verdict::rejected && !paid.count(r.address);
                        } else {
                            o.require(r.verdict == actors::Verdict::approved && paid.count(r.address),
                                      "honest seller approved and paid");
                        }
                    }
                }
    }
    o.require(fakers > 0, "fabricators took part");

    base.notaries[0].policy.percentage = 0.0;
    Engine e(base);
    o.require(e.run(), "p=0 invariants");
    std::size_t paid_all = 0;
    for (const auto* b : e.buyers())
        for (const auto& ord : b->orders())
            for (const auto& batch : ord.batches) {
                o.require(batch.response && batch.pay_index, "p=0 batch paid");
                if (!batch.response || !batch.pay_index)
                    continue;
                const auto paid = payee_addresses(e.ledger(), *batch.pay_index);
                for (const auto& r : batch.response->results) {
                    o.require(r.verdict == actors::Verdict::not_notarized && paid.count(r.address),
                              "p=0 seller paid as not_notarized");
                    ++paid_all;
                }
            }
    o.detail << "p=1: " << rejected << "/" << fakers << " fabricator entries rejected and unpaid over 1000 trials; p=0: "
             << paid_all << " sellers paid as not_notarized";
    return o;
}

// -- 7 ----------------------------------------------------------------------

Outcome properties()
{
    Outcome o;
    Rng rng(7);

    std::size_t lists = 0;
    for (int trial = 0; trial < 10'000; ++trial) {
        std::set<ledger::AccountId> s;
        const auto n = 1 + rng.below(64);
        const int shift = static_cast<int>(rng.below(4)) * 8;
        while (s.size() < n)
            s.insert(static_cast<ledger::AccountId>(rng.next() >> (32 + 24 - shift)));
        const std::vector<ledger::AccountId> ids(s.begin(), s.end());
        const auto pd = ledger::encode_pay_data(ids);
        o.require(ledger::decode_pay_data(pd) == ids, "payData round trip");
        o.require(ledger::decode_pay_data(ledger::PayData::parse(pd.encode())) == ids, "payData wire round trip");
        ++lists;
    }

    std::size_t locks = 0;
    for (int i = 0; i < 2000; ++i) {
        const auto n = static_cast<std::uint32_t>(rng.next());
        const auto key = rng.fixed<SymKey>();
        auto other = rng.fixed<SymKey>();
        const auto lock = crypto::make_lock(n, key);
        o.require(crypto::verify_lock(lock, n, key), "lock verifies");
        o.require(other == key || !crypto::verify_lock(lock, n, other), "lock rejects another key");
        o.require(!crypto::verify_lock(lock, n + 1, key), "lock binds the notary id");
        other = key;
        other.bytes[rng.below(32)] ^= static_cast<std::uint8_t>(1u << rng.below(8));
        o.require(!crypto::verify_lock(lock, n, other), "lock rejects a one-bit change");
        ++locks;
    }

    std::size_t envelopes = 0;
    const auto sender = crypto::SigningKeyPair::generate(rng);
    const auto recipient = crypto::SigningKeyPair::generate(rng);
    const auto stranger = crypto::SigningKeyPair::generate(rng);
    for (int i = 0; i < 300; ++i) {
        const auto p = rng.bytes(rng.below(512));
        const auto sealed = crypto::seal_message(sender, recipient.public_key, p, rng);
        const auto opened = crypto::open_message(recipient.secret, sealed);
        o.require(opened.payload == p && opened.sender_address == sender.address, "seal/open identity");
        auto tampered = sealed;
        tampered[rng.below(tampered.size())] ^= static_cast<std::uint8_t>(1u << rng.below(8));
        bool rejected = false;
        try {
            crypto::open_message(recipient.secret, tampered);
        } catch (const crypto::CryptoError&) {
            rejected = true;
        }
        o.require(rejected, "tampered envelope rejected");
        rejected = false;
        try {
            crypto::open_message(stranger.secret, sealed);
        } catch (const crypto::CryptoError&) {
            rejected = true;
        }
        o.require(rejected, "wrong recipient rejected");
        ++envelopes;
    }
    o.detail << lists << " payData lists, " << locks << " lock cases, " << envelopes << " envelopes";
    return o;
}

// -- 8 ----------------------------------------------------------------------

Outcome determinism()
{
    Outcome o;
    std::size_t n = 0;
    for (const auto& path : bundled()) {
        const auto s = load_scenario(path);
        Engine a(s), b(s);
        a.run();
        b.run();
        o.require(a.report_json() == b.report_json(), path.filename().string() + " report");
        o.require(a.trace() == b.trace(), path.filename().string() + " trace");
        ++n;
    }
    o.detail << n << " scenarios, reports and traces byte-identical";
    return o;
}

} // namespace

int main(int argc, char** argv)
{
    if (argc > 1)
        g_dir = argv[1];

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"gas amortization", gas_amortization},
        {"atomic exchange end-to-end", atomic_exchange},
        {"atomicity under failure", atomicity_under_failure},
        {"challenge-game soundness", challenge_game},
        {"conservation", conservation},
        {"notarization filtering", notarization_filtering},
        {"codec and crypto properties", properties},
        {"determinism", determinism},
    };

    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << "exception: " << e.what();
        }
        failed += o.pass ? 0 : 1;
        std::cout << (o.pass ? "PASS" : "FAIL") << " " << (i + 1) << " " << criteria[i].first << ": " << o.detail.str()
                  << std::endl;
    }
    std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
    return failed ? 1 : 0;
}
