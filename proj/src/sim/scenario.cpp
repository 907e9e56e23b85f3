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

#include "wibson/sim/scenario.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace wibson::sim {

using nlohmann::json;

namespace {

/// A JSON object plus its location; every key must be consumed.
class Node
{
public:
    Node(const json& j, std::string path) : j_(j), path_(std::move(path))
    {
        if (!j_.is_object())
            fail("expected an object");
    }

    ~Node() noexcept(false)
    {
        if (std::uncaught_exceptions() == 0)
            for (const auto& [k, v] : j_.items())
                if (!seen_.count(k))
                    throw ScenarioError(at(k), "unknown key");
    }

    Node(const Node&) = delete;
    Node& operator=(const Node&) = delete;

    [[noreturn]] void fail(const std::string& what) const { throw ScenarioError(path_, what); }
    std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
    const std::string& path() const { return path_; }

    bool has(const std::string& key) const { return j_.contains(key); }

    const json& raw(const std::string& key)
    {
        seen_.insert(key);
        auto it = j_.find(key);
        if (it == j_.end())
            throw ScenarioError(at(key), "missing");
        return *it;
    }

    template <typename T>
    T get(const std::string& key, std::optional<T> fallback = std::nullopt)
    {
        if (!has(key)) {
            seen_.insert(key);
            if (fallback)
                return *fallback;
            throw ScenarioError(at(key), "missing");
        }
        return as<T>(raw(key), at(key));
    }

    template <typename T>
    static T as(const json& v, const std::string& where)
    {
        if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean())
                throw ScenarioError(where, "expected a boolean");
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (!v.is_string())
                throw ScenarioError(where, "expected a string");
        } else if constexpr (std::is_floating_point_v<T>) {
            if (!v.is_number())
                throw ScenarioError(where, "expected a number");
        } else if constexpr (std::is_unsigned_v<T>) {
            if (!v.is_number_unsigned())
                throw ScenarioError(where, "expected a non-negative integer");
        } else {
            if (!v.is_number_integer())
                throw ScenarioError(where, "expected an integer");
        }
        return v.get<T>();
    }

    template <typename F>
    void each(const std::string& key, F&& fn)
    {
        if (!has(key)) {
            seen_.insert(key);
            return;
        }
        const auto& arr = raw(key);
        if (!arr.is_array())
            throw ScenarioError(at(key), "expected an array");
        for (std::size_t i = 0; i < arr.size(); ++i)
            fn(arr[i], at(key) + "[" + std::to_string(i) + "]");
    }

    template <typename F>
    void members(const std::string& key, F&& fn)
    {
        if (!has(key)) {
            seen_.insert(key);
            return;
        }
        const auto& obj = raw(key);
        if (!obj.is_object())
            throw ScenarioError(at(key), "expected an object");
        for (const auto& [k, v] : obj.items())
            fn(k, v, at(key) + "." + k);
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

exchange::AttrValue attr_value(const json& v, const std::string& where)
{
    if (v.is_string())
        return v.get<std::string>();
    if (v.is_number_integer())
        return v.get<std::int64_t>();
    throw ScenarioError(where, "expected a string or an integer");
}

exchange::OntologySchema parse_ontology(const json& j, const std::string& where)
{
    Node n(j, where);
    exchange::OntologySchema s;
    n.members("attributes", [&](const std::string& k, const json& v, const std::string& at) {
        const auto kind = Node::as<std::string>(v, at);
        if (kind == "numeric")
            s.attributes[k] = exchange::AttrKind::numeric;
        else if (kind == "categorical")
            s.attributes[k] = exchange::AttrKind::categorical;
        else
            throw ScenarioError(at, "kind must be numeric or categorical");
    });
    n.members("entities", [&](const std::string& k, const json& v, const std::string& at) {
        Node e(v, at);
        auto& ent = s.entities[k];
        e.members("params", [&](const std::string& p, const json& range, const std::string& pat) {
            if (!range.is_array() || range.size() != 2 || !range[0].is_number_integer() ||
                !range[1].is_number_integer())
                throw ScenarioError(pat, "expected [min, max]");
            exchange::ParamRange r{range[0].get<std::int64_t>(), range[1].get<std::int64_t>()};
            if (r.min > r.max)
                throw ScenarioError(pat, "min exceeds max");
            ent.params[p] = r;
        });
    });
    return s;
}

actors::NotaryPolicy parse_notary_policy(Node& n)
{
    actors::NotaryPolicy p;
    p.fee = n.get<ledger::Amount>("fee", 0);
    p.percentage = n.get<double>("percentage", 1.0);
    if (!(p.percentage >= 0.0 && p.percentage <= 1.0))
        throw ScenarioError(n.at("percentage"), "must lie in [0, 1]");
    p.garbage_key = n.get<bool>("garbage_key", false);
    n.members("verifiers", [&](const std::string& entity, const json& v, const std::string& at) {
        Node vn(v, at);
        actors::VerifierSpec spec;
        const auto kind = vn.get<std::string>("kind", std::string("subset"));
        if (kind == "geolocation")
            spec.kind = actors::VerifierSpec::Kind::geolocation;
        else if (kind != "subset")
            throw ScenarioError(vn.at("kind"), "must be subset or geolocation");
        spec.max_km = vn.get<double>("max_km", 5.0);
        spec.window = vn.get<std::int64_t>("window", 30);
        p.verifiers[entity] = spec;
    });
    return p;
}

actors::OrderPlan parse_order(const json& j, const std::string& where)
{
    Node n(j, where);
    actors::OrderPlan o;
    o.create_block = n.get<ledger::BlockNumber>("create_block", 1);
    n.each("audience", [&](const json& c, const std::string& at) {
        if (!c.is_array() || c.size() != 3 || !c[0].is_string() || !c[1].is_string())
            throw ScenarioError(at, "expected [attribute, op, value]");
        exchange::Op op;
        try {
            op = exchange::parse_op(c[1].get<std::string>());
        } catch (const std::exception&) {
            throw ScenarioError(at, "unknown operator '" + c[1].get<std::string>() + "'");
        }
        o.audience.clauses.push_back({c[0].get<std::string>(), op, attr_value(c[2], at)});
    });
    n.each("requested", [&](const json& q, const std::string& at) {
        Node qn(q, at);
        exchange::DataQuery dq;
        dq.entity = qn.get<std::string>("entity");
        qn.members("params", [&](const std::string& k, const json& v, const std::string& pat) {
            dq.params[k] = Node::as<std::int64_t>(v, pat);
        });
        o.requested.push_back(std::move(dq));
    });
    o.price = n.get<ledger::Amount>("price");
    o.tc_text = n.get<std::string>("terms", std::string("standard terms"));
    o.intended_use = n.get<std::string>("intended_use", std::string());
    n.each("notaries", [&](const json& v, const std::string& at) { o.notaries.push_back(Node::as<std::string>(v, at)); });
    o.response_window = n.get<ledger::BlockNumber>("response_window", 5);
    o.max_sellers = n.get<std::size_t>("max_sellers", 0);
    return o;
}

TrackSpec parse_track(const json& j, const std::string& where)
{
    Node n(j, where);
    TrackSpec t;
    t.records = n.get<std::size_t>("records");
    t.start = n.get<std::int64_t>("start", 0);
    t.step = n.get<std::int64_t>("step", 10);
    t.lat = n.get<double>("lat", 0.0);
    t.lon = n.get<double>("lon", 0.0);
    t.jitter = n.get<double>("jitter", 0.001);
    if (t.step <= 0)
        throw ScenarioError(n.at("step"), "must be positive");
    return t;
}

SellerGroupSpec parse_sellers(const json& j, const std::string& where)
{
    Node n(j, where);
    SellerGroupSpec g;
    g.name = n.get<std::string>("name");
    g.count = n.get<std::size_t>("count", 1);
    if (g.count == 0)
        throw ScenarioError(n.at("count"), "must be positive");
    g.tokens = n.get<ledger::Amount>("tokens", 0);
    g.stake_deposit = n.get<ledger::Amount>("stake_deposit", 0);
    g.registered = n.get<bool>("registered", true);
    n.members("attributes", [&](const std::string& k, const json& v, const std::string& at) {
        g.attributes[k] = attr_value(v, at);
    });
    n.members("data", [&](const std::string& k, const json& v, const std::string& at) { g.data[k] = parse_track(v, at); });
    g.price_floor = n.get<ledger::Amount>("price_floor", 0);
    g.accepts_terms = n.get<bool>("accepts_terms", true);
    n.each("trusted", [&](const json& v, const std::string& at) { g.trusted.push_back(Node::as<std::string>(v, at)); });
    g.collect_threshold = n.get<std::size_t>("collect_threshold", 1);
    g.delegate = n.get<std::string>("delegate", std::string());
    g.delegate_fee_limit = n.get<ledger::Amount>("delegate_fee_limit", 0);
    g.withdraw = n.get<bool>("withdraw", true);
    g.behavior.fabricating = n.get<bool>("fabricating", false);
    g.behavior.greedy = n.get<bool>("greedy", false);
    return g;
}

void check_name(std::set<std::string>& names, const std::string& name, const std::string& where)
{
    if (name.empty() || name.find('/') != std::string::npos)
        throw ScenarioError(where, "names must be non-empty and free of '/'");
    if (!names.insert(name).second)
        throw ScenarioError(where, "duplicate name '" + name + "'");
}

void validate(const Scenario& s, const std::vector<std::string>& buyer_paths, const std::vector<std::string>& seller_paths)
{
    try {
        s.ledger.validate();
    } catch (const std::exception& e) {
        throw ScenarioError("ledger", e.what());
    }
    try {
        s.transport.validate();
    } catch (const std::exception& e) {
        throw ScenarioError("transport", e.what());
    }

    std::set<std::string> names, notaries, delegates;
    for (std::size_t i = 0; i < s.notaries.size(); ++i) {
        check_name(names, s.notaries[i].name, "notaries[" + std::to_string(i) + "].name");
        notaries.insert(s.notaries[i].name);
        for (const auto& [entity, spec] : s.notaries[i].policy.verifiers)
            if (!s.ontology.entities.count(entity))
                throw ScenarioError("notaries[" + std::to_string(i) + "].verifiers." + entity, "undeclared entity");
    }
    for (std::size_t i = 0; i < s.delegates.size(); ++i) {
        check_name(names, s.delegates[i].name, "delegates[" + std::to_string(i) + "].name");
        delegates.insert(s.delegates[i].name);
    }

    for (std::size_t i = 0; i < s.buyers.size(); ++i) {
        const auto& b = s.buyers[i];
        check_name(names, b.name, buyer_paths[i] + ".name");
        if (b.config.deposit > b.config.tokens)
            throw ScenarioError(buyer_paths[i] + ".deposit", "exceeds tokens");
        for (std::size_t k = 0; k < b.config.orders.size(); ++k) {
            const auto& o = b.config.orders[k];
            const auto at = buyer_paths[i] + ".orders[" + std::to_string(k) + "]";
            try {
                o.audience.validate(s.ontology);
            } catch (const exchange::ExchangeError& e) {
                throw ScenarioError(at + ".audience", e.what());
            }
            for (std::size_t q = 0; q < o.requested.size(); ++q) {
                try {
                    o.requested[q].validate(s.ontology);
                } catch (const exchange::ExchangeError& e) {
                    throw ScenarioError(at + ".requested[" + std::to_string(q) + "]", e.what());
                }
            }
            if (o.requested.empty())
                throw ScenarioError(at + ".requested", "must not be empty");
            if (o.notaries.empty())
                throw ScenarioError(at + ".notaries", "must not be empty");
            for (const auto& n : o.notaries)
                if (!notaries.count(n))
                    throw ScenarioError(at + ".notaries", "unknown notary '" + n + "'");
            if (o.create_block == 0)
                throw ScenarioError(at + ".create_block", "must be at least 1");
        }
    }

    for (std::size_t i = 0; i < s.sellers.size(); ++i) {
        const auto& g = s.sellers[i];
        const auto& at = seller_paths[i];
        check_name(names, g.name, at + ".name");
        exchange::SellerProfile p;
        p.attributes = g.attributes;
        for (const auto& [entity, track] : g.data)
            p.store[entity];
        try {
            p.validate(s.ontology);
        } catch (const exchange::ExchangeError& e) {
            throw ScenarioError(at, e.what());
        }
        for (const auto& t : g.trusted)
            if (!notaries.count(t))
                throw ScenarioError(at + ".trusted", "unknown notary '" + t + "'");
        if (!g.delegate.empty() && !delegates.count(g.delegate))
            throw ScenarioError(at + ".delegate", "unknown delegate '" + g.delegate + "'");
        if (g.stake_deposit > g.tokens)
            throw ScenarioError(at + ".stake_deposit", "exceeds tokens");
    }

    if (s.kind == Scenario::Kind::challenge_matrix) {
        if (s.matrix.max_payments == 0 || s.matrix.max_payments > 8)
            throw ScenarioError("matrix.max_payments", "must lie in [1, 8]");
        if (s.matrix.per < 2)
            throw ScenarioError("matrix.per", "must be at least 2");
    }
}

} // namespace

std::size_t Scenario::seller_count() const
{
    std::size_t n = 0;
    for (const auto& g : sellers)
        n += g.count;
    return n;
}

Scenario parse_scenario(const std::string& json_text)
{
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ScenarioError("", std::string("malformed JSON: ") + e.what());
    }

    Scenario s;
    std::vector<std::string> buyer_paths, seller_paths;
    {
        Node root(j, "");
        s.name = root.get<std::string>("name");
        const auto kind = root.get<std::string>("kind", std::string("market"));
        if (kind == "challenge_matrix")
            s.kind = Scenario::Kind::challenge_matrix;
        else if (kind != "market")
            throw ScenarioError("kind", "must be market or challenge_matrix");
        s.seed = root.get<std::uint64_t>("seed", 0);
        s.blocks = root.get<ledger::BlockNumber>("blocks", 100);

        if (root.has("ledger")) {
            Node l(root.raw("ledger"), "ledger");
            auto& p = s.ledger;
            p.challenge_period_blocks = l.get<ledger::BlockNumber>("challenge_period_blocks", p.challenge_period_blocks);
            p.response_timeout_blocks = l.get<ledger::BlockNumber>("response_timeout_blocks", p.response_timeout_blocks);
            p.unlock_timeout_blocks = l.get<ledger::BlockNumber>("unlock_timeout_blocks", p.unlock_timeout_blocks);
            p.collect_stake = l.get<ledger::Amount>("collect_stake", p.collect_stake);
            p.challenge_stake = l.get<ledger::Amount>("challenge_stake", p.challenge_stake);
        }
        if (root.has("transport")) {
            Node t(root.raw("transport"), "transport");
            s.transport.delay_blocks = t.get<ledger::BlockNumber>("delay_blocks", 1);
            s.transport.drop_rate = t.get<double>("drop_rate", 0.0);
            t.members("url_delay", [&](const std::string& url, const json& v, const std::string& at) {
                s.transport.url_delay[url] = Node::as<ledger::BlockNumber>(v, at);
            });
        }
        if (root.has("ontology"))
            s.ontology = parse_ontology(root.raw("ontology"), "ontology");

        root.each("notaries", [&](const json& v, const std::string& at) {
            Node n(v, at);
            NotarySpec spec;
            spec.name = n.get<std::string>("name");
            spec.tokens = n.get<ledger::Amount>("tokens", 0);
            spec.terms = n.get<std::string>("terms", std::string("notary terms"));
            spec.silent = n.get<bool>("silent", false);
            spec.policy = parse_notary_policy(n);
            s.notaries.push_back(std::move(spec));
        });
        root.each("delegates", [&](const json& v, const std::string& at) {
            Node n(v, at);
            s.delegates.push_back({n.get<std::string>("name"), n.get<ledger::Amount>("tokens", 0),
                                   n.get<ledger::Amount>("fee", 0)});
        });
        root.each("buyers", [&](const json& v, const std::string& at) {
            Node n(v, at);
            BuyerSpec b;
            b.name = n.get<std::string>("name");
            b.config.tokens = n.get<ledger::Amount>("tokens", 0);
            b.config.deposit = n.get<ledger::Amount>("deposit", 0);
            b.config.description = n.get<std::string>("description", std::string());
            const auto ch = n.get<std::string>("challenger", std::string("none"));
            if (ch == "honest")
                b.config.challenger.honest = true;
            else if (ch == "spurious")
                b.config.challenger.spurious = true;
            else if (ch != "none")
                throw ScenarioError(n.at("challenger"), "must be none, honest or spurious");
            n.each("orders", [&](const json& o, const std::string& oat) { b.config.orders.push_back(parse_order(o, oat)); });
            s.buyers.push_back(std::move(b));
            buyer_paths.push_back(at);
        });
        root.each("sellers", [&](const json& v, const std::string& at) {
            s.sellers.push_back(parse_sellers(v, at));
            seller_paths.push_back(at);
        });
        if (root.has("matrix")) {
            Node m(root.raw("matrix"), "matrix");
            s.matrix.max_payments = m.get<std::size_t>("max_payments", 6);
            s.matrix.per = m.get<ledger::Amount>("per", 2);
            s.matrix.threads = m.get<unsigned>("threads", 0);
        }
    }
    validate(s, buyer_paths, seller_paths);
    return s;
}

Scenario load_scenario(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ScenarioError("", "cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str());
}

} // namespace wibson::sim
