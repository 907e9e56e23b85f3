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

#include "wibson/actors/actors.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace wibson::sim {

/// Parse or validation failure. `where` is a JSON-pointer-like location.
class ScenarioError : public std::runtime_error
{
public:
    ScenarioError(const std::string& where, const std::string& what)
        : std::runtime_error(where.empty() ? what : where + ": " + what), where_(where)
    {
    }
    const std::string& where() const { return where_; }

private:
    std::string where_;
};

struct NotarySpec
{
    std::string name;
    ledger::Amount tokens = 0;
    std::string terms;
    actors::NotaryPolicy policy;
    bool silent = false;
};

struct DelegateSpec
{
    std::string name;
    ledger::Amount tokens = 0;
    ledger::Amount fee = 0;
};

struct OrderSpec
{
    actors::OrderPlan plan;
};

struct BuyerSpec
{
    std::string name;
    actors::BuyerConfig config;
};

/// Synthetic location-like track for one entity.
struct TrackSpec
{
    std::size_t records = 0;
    std::int64_t start = 0;
    std::int64_t step = 10;
    double lat = 0;
    double lon = 0;
    /// Uniform jitter in degrees around (lat, lon).
    double jitter = 0.001;
};

/// `count` sellers sharing one configuration, named "<name>-<i>".
struct SellerGroupSpec
{
    std::string name;
    std::size_t count = 1;
    ledger::Amount tokens = 0;
    ledger::Amount stake_deposit = 0;
    bool registered = true;
    std::map<std::string, exchange::AttrValue> attributes;
    std::map<std::string, TrackSpec> data;
    ledger::Amount price_floor = 0;
    bool accepts_terms = true;
    /// Notary names; empty trusts every notary.
    std::vector<std::string> trusted;
    std::size_t collect_threshold = 1;
    std::string delegate;
    ledger::Amount delegate_fee_limit = 0;
    bool withdraw = true;
    actors::SellerBehavior behavior;
};

struct MatrixSpec
{
    std::size_t max_payments = 6;
    ledger::Amount per = 2;
    /// 0 uses the hardware concurrency.
    unsigned threads = 0;
};

struct Scenario
{
    enum class Kind
    {
        market,
        challenge_matrix,
    };

    std::string name;
    Kind kind = Kind::market;
    std::uint64_t seed = 0;
    ledger::BlockNumber blocks = 100;
    ledger::LedgerParams ledger;
    net::TransportConfig transport;
    exchange::OntologySchema ontology;
    std::vector<NotarySpec> notaries;
    std::vector<DelegateSpec> delegates;
    std::vector<BuyerSpec> buyers;
    std::vector<SellerGroupSpec> sellers;
    MatrixSpec matrix;

    std::size_t seller_count() const;
};

/// Parses and validates; throws ScenarioError naming the offending location.
Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario(const std::filesystem::path& path);

} // namespace wibson::sim
