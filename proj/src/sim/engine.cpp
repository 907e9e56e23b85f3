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

#include "wibson/sim/engine.hpp"

#include <json.hpp>

#include <algorithm>
#include <iomanip>
#include <sstream>

namespace wibson::sim {

using nlohmann::json;
using namespace wibson::actors;

namespace {

const char* const kInvariantNames[] = {
    "conservation",          "rejected_never_paid",        "payment_resolved",     "atomic_settlement",
    "recovered_payload_identity", "collect_settlement", "challenge_matrix",
};

DataStore generate_store(const std::map<std::string, TrackSpec>& data, Rng& rng)
{
    DataStore store;
    for (const auto& [entity, t] : data) {
        auto& records = store[entity];
        for (std::size_t i = 0; i < t.records; ++i) {
            Record r;
            r.time = t.start + static_cast<std::int64_t>(i) * t.step;
            r.fields["lat"] = t.lat + (rng.unit() * 2 - 1) * t.jitter;
            r.fields["lon"] = t.lon + (rng.unit() * 2 - 1) * t.jitter;
            records.push_back(std::move(r));
        }
    }
    return store;
}

std::size_t count_verdict(const Batch& b, Verdict v)
{
    if (!b.response)
        return 0;
    return static_cast<std::size_t>(std::count_if(b.response->results.begin(), b.response->results.end(),
                                                  [&](const SellerResult& r) { return r.verdict == v; }));
}

std::string amount_str(unsigned __int128 v)
{
    std::string s;
    do {
        s.insert(s.begin(), static_cast<char>('0' + static_cast<int>(v % 10)));
        v /= 10;
    } while (v);
    return s;
}

} // namespace

std::string Violation::str() const
{
    std::string s = "block " + std::to_string(block);
    if (tx)
        s += " tx " + std::to_string(*tx);
    return s + " " + check + ": " + detail;
}

Engine::Engine(Scenario scenario, std::optional<std::uint64_t> seed_override)
    : scenario_(std::move(scenario)), seed_(seed_override.value_or(scenario_.seed))
{
    for (const auto* name : kInvariantNames)
        invariants_.push_back({name, 0, 0});
    if (scenario_.kind == Scenario::Kind::market)
        build();
}

Engine::~Engine() = default;

InvariantResult& Engine::invariant(const std::string& name)
{
    for (auto& i : invariants_)
        if (i.name == name)
            return i;
    invariants_.push_back({name, 0, 0});
    return invariants_.back();
}

void Engine::violation(const std::string& check, std::string detail, std::optional<std::uint64_t> tx)
{
    ++invariant(check).violations;
    violations_.push_back({ledger_ ? ledger_->block() : 0, tx, check, std::move(detail)});
}

void Engine::build()
{
    rng_ = std::make_unique<Rng>(seed_);
    auto& rng = *rng_;
    treasury_ = crypto::SigningKeyPair::generate(rng);

    ledger_ = std::make_unique<ledger::Ledger>(treasury_.address, scenario_.ledger);
    ledger_->set_commit_hook([this](const ledger::TxRecord& rec) {
        ++invariant("conservation").checked;
        const auto supply = ledger_->accounted_supply();
        if (supply != static_cast<unsigned __int128>(ledger::kTotalSupply))
            violation("conservation", "accounted supply " + amount_str(supply), rec.seq);
    });
    net_ = std::make_unique<net::Network>(scenario_.transport, rng);
    registry_ = std::make_unique<exchange::OrderRegistry>(*ledger_, scenario_.ontology);
    registry_->set_event_sink(
        [this](const exchange::OrderCreated& e) { net_->broadcast_event(e.encode(), ledger_->block()); });
    world_ = std::make_unique<World>(*ledger_, *registry_, *net_, rng);

    std::vector<crypto::SigningKeyPair> notary_keys, delegate_keys, buyer_keys, seller_keys;
    for (std::size_t i = 0; i < scenario_.notaries.size(); ++i)
        notary_keys.push_back(crypto::SigningKeyPair::generate(rng));
    for (std::size_t i = 0; i < scenario_.delegates.size(); ++i)
        delegate_keys.push_back(crypto::SigningKeyPair::generate(rng));
    for (std::size_t i = 0; i < scenario_.buyers.size(); ++i)
        buyer_keys.push_back(crypto::SigningKeyPair::generate(rng));
    std::vector<const SellerGroupSpec*> seller_group;
    std::vector<std::string> seller_names;
    std::vector<DataStore> seller_stores;
    for (const auto& g : scenario_.sellers)
        for (std::size_t i = 0; i < g.count; ++i) {
            seller_keys.push_back(crypto::SigningKeyPair::generate(rng));
            seller_group.push_back(&g);
            seller_names.push_back(g.count == 1 ? g.name : g.name + "-" + std::to_string(i));
            seller_stores.push_back(generate_store(g.data, rng));
        }

    std::map<Address, DataStore> ground_truth;
    for (std::size_t i = 0; i < seller_keys.size(); ++i)
        ground_truth[seller_keys[i].address] = seller_stores[i];

    std::map<std::string, Address> notary_address;
    std::map<std::string, std::string> delegate_url;
    for (std::size_t i = 0; i < scenario_.notaries.size(); ++i) {
        const auto& spec = scenario_.notaries[i];
        notary_address[spec.name] = notary_keys[i].address;
        NotaryConfig cfg{spec.tokens, spec.terms, spec.policy, spec.silent, ground_truth};
        auto a = std::make_unique<NotaryActor>(*world_, spec.name, notary_keys[i], std::move(cfg));
        notaries_.push_back(a.get());
        actors_.push_back(std::move(a));
    }
    for (std::size_t i = 0; i < scenario_.delegates.size(); ++i) {
        const auto& spec = scenario_.delegates[i];
        auto a = std::make_unique<DelegateActor>(*world_, spec.name, delegate_keys[i], DelegateConfig{spec.tokens, spec.fee});
        delegate_url[spec.name] = a->url();
        delegates_.push_back(a.get());
        actors_.push_back(std::move(a));
    }
    for (std::size_t i = 0; i < scenario_.buyers.size(); ++i) {
        const auto& spec = scenario_.buyers[i];
        auto a = std::make_unique<BuyerActor>(*world_, spec.name, buyer_keys[i], spec.config);
        buyers_.push_back(a.get());
        actors_.push_back(std::move(a));
    }
    for (std::size_t i = 0; i < seller_keys.size(); ++i) {
        const auto& g = *seller_group[i];
        SellerConfig cfg;
        cfg.tokens = g.tokens;
        cfg.stake_deposit = g.stake_deposit;
        cfg.registered = g.registered;
        cfg.profile.attributes = g.attributes;
        cfg.profile.store = seller_stores[i];
        cfg.policy.price_floor = g.price_floor;
        cfg.policy.accepts_terms = g.accepts_terms;
        if (g.trusted.empty())
            for (const auto& [name, addr] : notary_address)
                cfg.policy.trusted_notaries.push_back(addr);
        else
            for (const auto& name : g.trusted)
                cfg.policy.trusted_notaries.push_back(notary_address.at(name));
        cfg.collect_threshold = g.collect_threshold;
        if (!g.delegate.empty())
            cfg.delegate_url = delegate_url.at(g.delegate);
        cfg.delegate_fee_limit = g.delegate_fee_limit;
        cfg.withdraw = g.withdraw;
        cfg.behavior = g.behavior;
        auto a = std::make_unique<SellerActor>(*world_, seller_names[i], seller_keys[i], std::move(cfg));
        sellers_.push_back(a.get());
        seller_index_[a->address()] = a.get();
        actors_.push_back(std::move(a));
    }

    auto fund = [&](const Actor& a, ledger::Amount tokens) {
        if (tokens > 0)
            ledger_->transfer(treasury_.address, a.address(), tokens);
    };
    for (std::size_t i = 0; i < notaries_.size(); ++i)
        fund(*notaries_[i], scenario_.notaries[i].tokens);
    for (std::size_t i = 0; i < delegates_.size(); ++i)
        fund(*delegates_[i], scenario_.delegates[i].tokens);
    for (std::size_t i = 0; i < buyers_.size(); ++i)
        fund(*buyers_[i], scenario_.buyers[i].config.tokens);
    for (auto* s : sellers_)
        fund(*s, s->config().tokens);

    for (auto& a : actors_)
        a->setup();
    for (auto& a : actors_)
        start_[a->name()] = balances(a->address());
}

const Actor* Engine::actor(const std::string& name) const
{
    for (const auto& a : actors_)
        if (a->name() == name)
            return a.get();
    return nullptr;
}

const SellerActor* Engine::seller_by_address(const Address& a) const
{
    auto it = seller_index_.find(a);
    return it == seller_index_.end() ? nullptr : it->second;
}

Balances Engine::balances(const Address& a) const
{
    Balances b;
    b.tokens = ledger_->token_balance(a);
    if (auto id = ledger_->account_of(a))
        b.batpay = ledger_->account(*id).balance;
    return b;
}

bool Engine::run()
{
    if (ran_)
        return ok();
    ran_ = true;

    if (scenario_.kind == Scenario::Kind::challenge_matrix) {
        matrix_ = run_challenge_matrix(scenario_.matrix);
        auto& inv = invariant("challenge_matrix");
        inv.checked = matrix_->cases;
        for (const auto& f : matrix_->failure_samples)
            violations_.push_back({0, std::nullopt, "challenge_matrix", f});
        inv.violations = matrix_->failures;
        if (matrix_->failures > matrix_->failure_samples.size())
            violations_.push_back({0, std::nullopt, "challenge_matrix",
                                   std::to_string(matrix_->failures - matrix_->failure_samples.size()) +
                                       " further failures"});
        return ok();
    }

    while (ledger_->block() < scenario_.blocks)
        step();
    check_end();
    return ok();
}

void Engine::step()
{
    ledger_->advance_block(1);
    net_->deliver(ledger_->block());
    for (auto& a : actors_)
        a->on_block();
    check_block();
}

void Engine::check_block()
{
    auto& inv = invariant("conservation");
    ++inv.checked;
    const auto supply = ledger_->accounted_supply();
    if (supply != static_cast<unsigned __int128>(ledger::kTotalSupply))
        violation("conservation", "accounted supply " + amount_str(supply) + " at end of block");
}

void Engine::check_end()
{
    const auto& L = *ledger_;
    for (const auto* buyer : buyers_) {
        for (const auto& o : buyer->orders()) {
            if (!o.id)
                continue;
            for (const auto& b : o.batches) {
                const auto tag = buyer->name() + " order " + std::to_string(*o.id) + " notary " + b.notary.hex();

                if (b.response && b.pay_index) {
                    const auto& payees = L.payees(*b.pay_index);
                    for (const auto& r : b.response->results) {
                        if (r.verdict != Verdict::rejected)
                            continue;
                        ++invariant("rejected_never_paid").checked;
                        if (std::binary_search(payees.begin(), payees.end(), r.id))
                            violation("rejected_never_paid", tag + ": rejected seller " + std::to_string(r.id) + " paid");
                    }
                }
                if (!b.pay_index)
                    continue;

                const auto& p = L.payment(*b.pay_index);
                ++invariant("payment_resolved").checked;
                if (!p.unlocked && !p.voided) {
                    violation("payment_resolved", tag + ": payment " + std::to_string(p.pay_index) + " still locked");
                    continue;
                }

                ++invariant("atomic_settlement").checked;
                const auto owed = b.response->payable_ids().size();
                const auto* notary = world_->notary(b.notary);
                const bool garbage = notary && notary->config().policy.garbage_key;
                if (p.unlocked) {
                    const bool key_public =
                        p.master_key && crypto::verify_lock(p.lock, static_cast<std::uint32_t>(b.notary_id), *p.master_key);
                    const bool all = b.recovered.size() == owed && b.notary_faults.empty();
                    const bool attributed = garbage && b.recovered.size() + b.notary_faults.size() == owed;
                    if (!key_public || b.status != BatchStatus::unlocked || !(all || attributed))
                        violation("atomic_settlement", tag + ": unlocked but recovered " +
                                                           std::to_string(b.recovered.size()) + " of " +
                                                           std::to_string(owed));
                } else if (b.status != BatchStatus::refunded || !b.recovered.empty()) {
                    violation("atomic_settlement", tag + ": voided payment not cleanly refunded");
                }

                for (const auto& [addr, data] : b.recovered) {
                    ++invariant("recovered_payload_identity").checked;
                    const auto* seller = seller_by_address(addr);
                    bool match = false;
                    if (seller)
                        for (const auto& sale : seller->sales())
                            match = match || (sale.order_id == *o.id && sale.payload == data);
                    if (!match)
                        violation("recovered_payload_identity", tag + ": payload from " + addr.hex() + " differs");
                }
            }
        }
    }

    bool honest_watcher = false;
    for (const auto& b : scenario_.buyers)
        honest_watcher = honest_watcher || b.config.challenger.honest;
    for (const auto& s : L.slots()) {
        if (!s.settled())
            continue;
        ++invariant("collect_settlement").checked;
        const auto honest = ledger::honest_collect_amount(L, s.account, s.from_index, s.to_index);
        const auto who = "slot " + std::to_string(s.id) + " of account " + std::to_string(s.account);
        if (s.status == ledger::SlotStatus::settled_fraud && s.declared_amount == honest)
            violation("collect_settlement", who + ": honest collect settled as fraud");
        if (s.status == ledger::SlotStatus::settled_ok && s.declared_amount != honest && honest_watcher)
            violation("collect_settlement", who + ": fraudulent collect settled despite an honest challenger");
    }
}

// ---------------------------------------------------------------------------

std::string Engine::report_json() const
{
    json r;
    r["format_version"] = kReportFormatVersion;
    r["scenario"] = scenario_.name;
    r["kind"] = scenario_.kind == Scenario::Kind::market ? "market" : "challenge_matrix";
    r["seed"] = seed_;
    r["ok"] = ok();

    json inv = json::array();
    for (const auto& i : invariants_)
        inv.push_back({{"name", i.name}, {"checked", i.checked}, {"violations", i.violations}});
    r["invariants"] = inv;
    json vio = json::array();
    for (const auto& v : violations_)
        vio.push_back(v.str());
    r["violations"] = vio;

    if (matrix_) {
        json by = json::object();
        for (const auto& [k, v] : matrix_->by_strategy)
            by[k] = v;
        r["matrix"] = {{"max_payments", scenario_.matrix.max_payments},
                       {"per", scenario_.matrix.per},
                       {"sequences", matrix_->sequences},
                       {"cases", matrix_->cases},
                       {"honest_cases", matrix_->honest_cases},
                       {"fraud_cases", matrix_->fraud_cases},
                       {"failures", matrix_->failures},
                       {"by_strategy", by}};
        return r.dump(2) + "\n";
    }

    const auto& L = *ledger_;
    r["blocks"] = scenario_.blocks;

    const auto gas = L.gas_report();
    json kinds = json::object();
    for (const auto& [k, t] : gas.by_kind)
        kinds[ledger::to_string(k)] = {{"count", t.count}, {"gas", t.gas}, {"items", t.items}};
    r["gas"] = {{"cumulative", gas.cumulative},
                {"batch_size", gas.batch_size},
                {"register_per_payment", gas.register_per_payment},
                {"collect_per_payment", gas.collect_per_payment},
                {"total_per_payment", gas.total_per_payment},
                {"usd_per_payment", gas.usd_per_payment},
                {"usd_total", gas.usd_total},
                {"by_kind", kinds}};
    r["transport"] = {{"posted", net_->posted()}, {"delivered", net_->delivered()}, {"dropped", net_->dropped()}};

    auto role = [&](const Actor* a) -> const char* {
        if (std::find(buyers_.begin(), buyers_.end(), a) != buyers_.end())
            return "buyer";
        if (std::find(notaries_.begin(), notaries_.end(), a) != notaries_.end())
            return "notary";
        if (std::find(delegates_.begin(), delegates_.end(), a) != delegates_.end())
            return "delegate";
        return "seller";
    };
    std::map<ledger::AccountId, std::string> names;
    json actors = json::array();
    for (const auto& a : actors_) {
        const auto start = start_.at(a->name());
        const auto end = balances(a->address());
        if (auto id = a->account())
            names[*id] = a->name();
        actors.push_back({{"name", a->name()},
                          {"role", role(a.get())},
                          {"address", a->address().hex()},
                          {"start", {{"tokens", start.tokens}, {"batpay", start.batpay}}},
                          {"end", {{"tokens", end.tokens}, {"batpay", end.batpay}}},
                          {"discarded_messages", a->discarded_messages()}});
    }
    r["actors"] = actors;

    json orders = json::array();
    for (const auto* buyer : buyers_)
        for (const auto& o : buyer->orders()) {
            if (!o.id)
                continue;
            json batches = json::array();
            for (const auto& b : o.batches) {
                std::size_t verified = 0;
                for (const auto& [addr, data] : b.recovered)
                    if (const auto* s = seller_by_address(addr))
                        for (const auto& sale : s->sales())
                            verified += sale.order_id == *o.id && sale.payload == data;
                json faults = b.notary_faults;
                batches.push_back({{"notary", world_->notary(b.notary)->name()},
                                   {"status", to_string(b.status)},
                                   {"detail", b.detail},
                                   {"sellers", b.sellers.size()},
                                   {"approved", count_verdict(b, Verdict::approved)},
                                   {"rejected", count_verdict(b, Verdict::rejected)},
                                   {"not_notarized", count_verdict(b, Verdict::not_notarized)},
                                   {"pay_index", b.pay_index ? json(*b.pay_index) : json(nullptr)},
                                   {"recovered", b.recovered.size()},
                                   {"verified_payloads", verified},
                                   {"notary_faults", faults}});
            }
            orders.push_back({{"buyer", buyer->name()},
                              {"order_id", *o.id},
                              {"price", o.plan.price},
                              {"responses", o.responses.size()},
                              {"discarded", o.discarded},
                              {"batches", batches}});
        }
    r["orders"] = orders;

    json collects = json::array();
    std::map<std::string, std::uint64_t> outcome_counts;
    for (const auto& s : L.slots()) {
        const auto honest = ledger::honest_collect_amount(L, s.account, s.from_index, s.to_index);
        ++outcome_counts[ledger::to_string(s.status)];
        collects.push_back({{"slot", s.id},
                            {"seller", names.count(s.account) ? names.at(s.account) : std::to_string(s.account)},
                            {"from", s.from_index},
                            {"to", s.to_index},
                            {"declared", s.declared_amount},
                            {"honest", honest},
                            {"status", ledger::to_string(s.status)},
                            {"challenges_survived", s.challenges_survived},
                            {"resolution", s.resolution}});
    }
    r["collects"] = collects;
    r["collect_outcomes"] = outcome_counts;
    return r.dump(2) + "\n";
}

std::string Engine::summary() const
{
    std::ostringstream os;
    os << "scenario " << scenario_.name << "  seed " << seed_;
    if (matrix_) {
        os << "\n\nchallenge matrix (payments <= " << scenario_.matrix.max_payments << ", per " << scenario_.matrix.per
           << ")\n";
        os << "  sequences  " << matrix_->sequences << "\n";
        os << "  cases      " << matrix_->cases << " (" << matrix_->honest_cases << " honest, " << matrix_->fraud_cases
           << " fraudulent)\n";
        for (const auto& [k, v] : matrix_->by_strategy)
            os << "    " << std::left << std::setw(28) << k << v << "\n";
        os << "  failures   " << matrix_->failures << "\n";
    } else {
        const auto gas = ledger_->gas_report();
        os << "  blocks " << scenario_.blocks << "\n\n";
        os << "gas\n";
        for (const auto& [k, t] : gas.by_kind)
            os << "  " << std::left << std::setw(20) << ledger::to_string(k) << std::right << std::setw(8) << t.count
               << " tx " << std::setw(14) << t.gas << " gas\n";
        os << "  per payment: register " << gas.register_per_payment << " + collect " << gas.collect_per_payment
           << " = " << gas.total_per_payment << " gas, $" << std::fixed << std::setprecision(5) << gas.usd_per_payment
           << "\n\n";
        os << "orders\n";
        for (const auto* buyer : buyers_)
            for (const auto& o : buyer->orders()) {
                if (!o.id)
                    continue;
                os << "  " << buyer->name() << " #" << *o.id << "  responses " << o.responses.size() << "  discarded "
                   << o.discarded << "\n";
                for (const auto& b : o.batches)
                    os << "    " << std::left << std::setw(16) << world_->notary(b.notary)->name() << std::setw(15)
                       << to_string(b.status) << " approved " << count_verdict(b, Verdict::approved) << "  rejected "
                       << count_verdict(b, Verdict::rejected) << "  not_notarized "
                       << count_verdict(b, Verdict::not_notarized) << "  recovered " << b.recovered.size()
                       << "  faults " << b.notary_faults.size() << "\n";
            }
        std::map<std::string, std::uint64_t> outcomes;
        for (const auto& s : ledger_->slots())
            ++outcomes[ledger::to_string(s.status)];
        os << "\ncollects\n";
        for (const auto& [k, v] : outcomes)
            os << "  " << std::left << std::setw(16) << k << v << "\n";
        os << "\ntransport  posted " << net_->posted() << "  delivered " << net_->delivered() << "  dropped "
           << net_->dropped() << "\n";
    }
    os << "\ninvariants\n";
    for (const auto& i : invariants_)
        os << "  " << std::left << std::setw(28) << i.name << std::right << std::setw(10) << i.checked << " checked  "
           << i.violations << " violated\n";
    for (const auto& v : violations_)
        os << "  ! " << v.str() << "\n";
    os << "\n" << (ok() ? "OK" : "FAILED") << "\n";
    return os.str();
}

std::string Engine::trace() const
{
    std::ostringstream os;
    os << "# wibson-sim trace format_version " << kTraceFormatVersion << " scenario " << scenario_.name << " seed "
       << seed_ << "\n";
    if (!ledger_)
        return os.str();
    os << "# transport\n";
    for (const auto& t : net_->trace())
        os << t.str() << "\n";
    os << "# ledger\n";
    for (const auto& tx : ledger_->tx_log()) {
        os << tx.seq << " " << tx.block << " " << ledger::to_string(tx.kind) << " " << tx.sender.hex();
        if (tx.on_behalf_of)
            os << " for " << tx.on_behalf_of->hex();
        os << " gas " << tx.gas << (tx.ok ? " ok" : " failed");
        if (!tx.outcome.empty())
            os << " " << tx.outcome;
        os << "\n";
    }
    os << "# actors\n";
    for (const auto& l : world_->logs())
        os << l.str() << "\n";
    return os.str();
}

} // namespace wibson::sim
