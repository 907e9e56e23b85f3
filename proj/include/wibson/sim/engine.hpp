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

#include "wibson/sim/challenge_matrix.hpp"
#include "wibson/sim/scenario.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace wibson::sim {

inline constexpr int kReportFormatVersion = 1;
inline constexpr int kTraceFormatVersion = 1;

struct Violation
{
    ledger::BlockNumber block = 0;
    /// Sequence number of the offending transaction, when there is one.
    std::optional<std::uint64_t> tx;
    std::string check;
    std::string detail;

    std::string str() const;
};

struct InvariantResult
{
    std::string name;
    std::uint64_t checked = 0;
    std::uint64_t violations = 0;
};

struct Balances
{
    ledger::Amount tokens = 0;
    ledger::Amount batpay = 0;
};

/// Deterministic run of one scenario: per block, deliver the transport
/// queue, tick every actor in a fixed order, then check invariants.
class Engine
{
public:
    explicit Engine(Scenario scenario, std::optional<std::uint64_t> seed_override = std::nullopt);
    ~Engine();

    Engine(const Engine&) = delete;
    Engine& operator=(const Engine&) = delete;

    /// Runs to the end. Returns true iff every invariant held.
    bool run();
    /// Advances one block; run() finishes the remaining ones.
    void step();
    ledger::BlockNumber block() const { return ledger_ ? ledger_->block() : 0; }

    const Scenario& scenario() const { return scenario_; }
    std::uint64_t seed() const { return seed_; }
    const ledger::Ledger& ledger() const { return *ledger_; }
    const net::Network& network() const { return *net_; }
    net::Network& network() { return *net_; }
    const actors::World& world() const { return *world_; }

    const std::vector<actors::BuyerActor*>& buyers() const { return buyers_; }
    const std::vector<actors::SellerActor*>& sellers() const { return sellers_; }
    const std::vector<actors::NotaryActor*>& notaries() const { return notaries_; }
    const std::vector<actors::DelegateActor*>& delegates() const { return delegates_; }
    const actors::Actor* actor(const std::string& name) const;
    const actors::SellerActor* seller_by_address(const Address& a) const;

    Balances start_balances(const std::string& name) const { return start_.at(name); }
    Balances balances(const Address& a) const;

    const std::vector<Violation>& violations() const { return violations_; }
    const std::vector<InvariantResult>& invariants() const { return invariants_; }
    const std::optional<MatrixResult>& matrix() const { return matrix_; }
    bool ok() const { return violations_.empty(); }

    /// Machine report, pretty-printed JSON.
    std::string report_json() const;
    /// Human summary table.
    std::string summary() const;
    /// Transport trace, transaction log and actor logs, one event per line.
    std::string trace() const;

private:
    void build();
    void check_block();
    void check_end();
    void violation(const std::string& check, std::string detail, std::optional<std::uint64_t> tx = std::nullopt);
    InvariantResult& invariant(const std::string& name);

    Scenario scenario_;
    std::uint64_t seed_;
    std::unique_ptr<Rng> rng_;
    std::unique_ptr<ledger::Ledger> ledger_;
    std::unique_ptr<exchange::OrderRegistry> registry_;
    std::unique_ptr<net::Network> net_;
    std::unique_ptr<actors::World> world_;
    crypto::SigningKeyPair treasury_;

    std::vector<std::unique_ptr<actors::Actor>> actors_;
    std::vector<actors::BuyerActor*> buyers_;
    std::vector<actors::SellerActor*> sellers_;
    std::vector<actors::NotaryActor*> notaries_;
    std::vector<actors::DelegateActor*> delegates_;
    std::map<std::string, Balances> start_;
    std::map<Address, const actors::SellerActor*> seller_index_;

    std::vector<Violation> violations_;
    std::vector<InvariantResult> invariants_;
    std::optional<MatrixResult> matrix_;
    bool ran_ = false;
};

} // namespace wibson::sim
