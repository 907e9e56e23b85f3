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

#include "ledger_fixture.hpp"
#include "wibson/actors/protocol.hpp"

#include <doctest.h>

using namespace wibson;
using namespace wibson::actors;
using exchange::Record;
using namespace wibson::testing;

namespace {

Record fix(std::int64_t t, double lat, double lon)
{
    return Record{t, {{"lat", lat}, {"lon", lon}}};
}

exchange::OntologySchema schema()
{
    exchange::OntologySchema s;
    s.attributes = {{"Age", exchange::AttrKind::numeric}, {"Residency", exchange::AttrKind::categorical}};
    s.entities["location"].params = {{"start", {0, 1'000'000}}, {"length", {1, 1'000'000}}};
    return s;
}

exchange::SellerProfile profile()
{
    exchange::SellerProfile p;
    p.attributes = {{"Age", std::int64_t{45}}, {"Residency", std::string("Spain")}};
    p.store["location"] = {fix(10, 40.4168, -3.7038), fix(20, 40.4170, -3.7040), fix(30, 40.4172, -3.7042)};
    return p;
}

template <typename T>
void round_trip(const T& v)
{
    const Message m = v;
    const auto raw = encode_message(m);
    const auto back = decode_message(raw);
    REQUIRE(std::holds_alternative<T>(back));
    CHECK(encode_message(back) == raw);
}

struct Parties
{
    Rng rng{7};
    crypto::SigningKeyPair notary = crypto::SigningKeyPair::generate(rng);
    std::vector<crypto::SigningKeyPair> sellers;
    std::vector<Bytes> payloads;
    std::map<Address, SellerNotaryMsg> msgs;
    std::map<Address, DataStore> truth;
    NotarizationRequest request;
    NotaryPolicy policy;

    explicit Parties(std::size_t n, std::size_t fabricating = SIZE_MAX)
    {
        request.order_id = 3;
        request.callback_url = "buyer/orders";
        policy.fee = 4;
        for (std::size_t i = 0; i < n; ++i) {
            sellers.push_back(crypto::SigningKeyPair::generate(rng));
            const auto& s = sellers.back();
            auto p = profile();
            truth[s.address] = p.store;
            auto payload = exchange::extract_requested(p, {exchange::DataQuery{"location", {{"start", 0}, {"length", 100}}}});
            if (i == fabricating)
                payload = fabricate_payload(payload);
            const auto key = rng.fixed<SymKey>();
            auto ct = crypto::sym_encrypt(key, payload, rng);
            payloads.push_back(payload);
            msgs[s.address] = SellerNotaryMsg{3, static_cast<AccountId>(10 + i), s.address, ct, key};
            request.sellers.push_back({static_cast<AccountId>(10 + i), s.address, crypto::hash(ct.encode())});
        }
    }

    Notarization run() { return notarize(policy, notary, 2, request, msgs, truth, rng); }
};

} // namespace

TEST_CASE("every message kind survives encode and decode")
{
    Rng rng(1);
    auto k = crypto::SigningKeyPair::generate(rng);
    auto ct = crypto::sym_encrypt(rng.fixed<SymKey>(), as_bytes(std::string_view("payload")), rng);

    round_trip(DataResponse{5, std::nullopt, k.address, k.address, ct, true});
    round_trip(DataResponse{5, AccountId{9}, k.address, k.address, ct, false});
    round_trip(SellerNotaryMsg{5, AccountId{9}, k.address, ct, rng.fixed<SymKey>()});
    round_trip(NotarizationRequest{5, "b/orders", {{1, k.address, crypto::hash(ct.encode())}}});

    NotarizationResponse r;
    r.order_id = 5;
    r.results = {{1, k.address, Verdict::approved, ct}, {2, k.address, Verdict::rejected, std::nullopt}};
    r.fee = 3;
    r.notarization_percentage = 0.25;
    r.notary_address = k.address;
    r.sign(k);
    round_trip(r);
    round_trip(RelayRequest{ledger::SignedOp::make(k, 4, 0, 2, ledger::CollectOp{7, 30, 10})});

    CHECK_THROWS_AS(decode_message(Bytes{0x09, 0x00}), DecodeError);
    CHECK_THROWS_AS(decode_message(Bytes{}), DecodeError);
}

TEST_CASE("notarization signature covers every field")
{
    Parties p(3);
    auto n = p.run();
    CHECK(n.response.verify(p.notary.public_key));

    auto tampered = n.response;
    tampered.fee += 1;
    CHECK_FALSE(tampered.verify(p.notary.public_key));
    tampered = n.response;
    tampered.results[1].verdict = Verdict::rejected;
    CHECK_FALSE(tampered.verify(p.notary.public_key));
    tampered = n.response;
    tampered.lock.digest.bytes[0] ^= 1;
    CHECK_FALSE(tampered.verify(p.notary.public_key));

    Rng other(99);
    CHECK_FALSE(n.response.verify(crypto::SigningKeyPair::generate(other).public_key));
}

TEST_CASE("haversine matches the reference values")
{
    // frozen from an independent double-precision evaluation, R = 6371 km
    CHECK(haversine_km(0, 0, 0, 1) == doctest::Approx(111.19492664455873).epsilon(1e-12));
    CHECK(haversine_km(-34.6037, -58.3816, -34.1037, -58.3816) == doctest::Approx(55.59746332227937).epsilon(1e-12));
    CHECK(haversine_km(51.5007, -0.1246, 40.6892, -74.0445) == doctest::Approx(5574.840456848555).epsilon(1e-12));
    CHECK(haversine_km(12.5, 33.1, 12.5, 33.1) == 0.0);
}

TEST_CASE("geolocation verifier")
{
    const std::vector<Record> ground = {fix(100, -34.6037, -58.3816), fix(200, -34.6040, -58.3820)};

    CHECK(verify_geolocation(ground, ground, 5, 30));
    // about 55.6 km north of the first ground fix
    CHECK_FALSE(verify_geolocation(ground, {fix(110, -34.1037, -58.3816)}, 5, 30));
    CHECK(verify_geolocation(ground, {fix(110, -34.1037, -58.3816)}, 60, 30));
    // no temporal overlap passes
    CHECK(verify_geolocation(ground, {fix(5000, 10, 10)}, 5, 30));
    CHECK(geolocation_coverage(ground, {fix(5000, 10, 10)}, 30) == 0);
    CHECK(geolocation_coverage(ground, {fix(150, 0, 0)}, 50) == 2);
    // records without coordinates cannot be checked
    CHECK_FALSE(verify_geolocation(ground, {Record{100, {}}}, 5, 30));
}

TEST_CASE("subset verifier")
{
    const auto g = profile().store.at("location");
    CHECK(verify_subset(g, g));
    CHECK(verify_subset(g, {}));
    CHECK(verify_subset(g, {g[2], g[0]}));
    auto fake = g[0];
    fake.time += 1;
    CHECK_FALSE(verify_subset(g, {g[1], fake}));
}

TEST_CASE("fabricated payloads never pass the subset check")
{
    auto p = profile();
    auto honest = exchange::extract_requested(p, {exchange::DataQuery{"location", {{"start", 0}, {"length", 100}}}});
    auto fake = fabricate_payload(honest);
    CHECK(fake != honest);
    CHECK(verify_payload({}, p.store, exchange::decode_payload(honest)));
    CHECK_FALSE(verify_payload({}, p.store, exchange::decode_payload(fake)));

    std::map<std::string, VerifierSpec> geo{{"location", {VerifierSpec::Kind::geolocation, 5, 30}}};
    CHECK(verify_payload(geo, p.store, exchange::decode_payload(honest)));
    CHECK_FALSE(verify_payload(geo, p.store, exchange::decode_payload(fake)));
}

TEST_CASE("seller order evaluation")
{
    Rng rng(3);
    auto n1 = crypto::SigningKeyPair::generate(rng);
    auto n2 = crypto::SigningKeyPair::generate(rng);
    auto n3 = crypto::SigningKeyPair::generate(rng);
    const std::string tc = "use for research";

    exchange::DataOrder order;
    order.id = 4;
    order.audience = {{{"Age", exchange::Op::ge, std::int64_t{40}}}};
    order.requested = {exchange::DataQuery{"location", {{"start", 0}, {"length", 50}}}};
    order.price = 10;
    order.tc_hash = crypto::hash(as_bytes(tc));

    exchange::BuyerOrderInfo info;
    info.order_id = 4;
    info.tc_text = tc;
    info.notaries = {exchange::NotaryOffer::make(n1, 7, 4, 3, "t"), exchange::NotaryOffer::make(n2, 5, 4, 3, "t"),
                     exchange::NotaryOffer::make(n3, 1, 4, 9, "t")};

    SellerPolicy pol;
    pol.price_floor = 10;
    pol.trusted_notaries = {n1.address, n2.address, n3.address};

    auto d = seller_evaluate_order(pol, schema(), profile(), order, info);
    REQUIRE(d.accept);
    // equal fees: the lower id wins over the cheaper-looking order in the list
    CHECK(d.notary->notary_address == n2.address);

    pol.trusted_notaries = {n3.address};
    d = seller_evaluate_order(pol, schema(), profile(), order, info);
    REQUIRE(d.accept);
    CHECK(d.notary->notary_id == 1);

    SUBCASE("price below floor")
    {
        pol.price_floor = 11;
        CHECK_FALSE(seller_evaluate_order(pol, schema(), profile(), order, info).accept);
    }
    SUBCASE("terms rejected")
    {
        pol.accepts_terms = false;
        CHECK_FALSE(seller_evaluate_order(pol, schema(), profile(), order, info).accept);
    }
    SUBCASE("no trusted notary")
    {
        pol.trusted_notaries.clear();
        CHECK(seller_evaluate_order(pol, schema(), profile(), order, info).reason == "no trusted notary");
    }
    SUBCASE("audience mismatch")
    {
        order.audience = {{{"Residency", exchange::Op::eq, std::string("France")}}};
        CHECK(seller_evaluate_order(pol, schema(), profile(), order, info).reason == "audience mismatch");
    }
    SUBCASE("missing entity")
    {
        order.requested.push_back(exchange::DataQuery{"browsing", {}});
        CHECK_FALSE(seller_evaluate_order(pol, schema(), profile(), order, info).accept);
    }
    SUBCASE("terms text does not hash to the order's commitment")
    {
        info.tc_text += ".";
        CHECK_FALSE(seller_evaluate_order(pol, schema(), profile(), order, info).accept);
    }
    SUBCASE("closed order")
    {
        order.status = exchange::OrderStatus::closed;
        CHECK_FALSE(seller_evaluate_order(pol, schema(), profile(), order, info).accept);
    }
}

TEST_CASE("sample counts round up")
{
    CHECK(sample_count(0.0, 10) == 0);
    CHECK(sample_count(0.3, 10) == 3);
    CHECK(sample_count(0.25, 10) == 3);
    CHECK(sample_count(0.01, 10) == 1);
    CHECK(sample_count(1.0, 10) == 10);
    CHECK(sample_count(0.5, 0) == 0);
}

TEST_CASE("notarize with percentage 0 pays everyone")
{
    Parties p(4, 1);
    p.policy.percentage = 0;
    auto n = p.run();
    CHECK(n.sampled.empty());
    for (const auto& r : n.response.results) {
        CHECK(r.verdict == Verdict::not_notarized);
        CHECK(r.encrypted_key.has_value());
    }
    CHECK(n.response.payable_ids() == std::vector<AccountId>{10, 11, 12, 13});
    CHECK(n.response.pay_data_hash == ledger::encode_pay_data(std::vector<AccountId>{10, 11, 12, 13}).hash());
    CHECK(crypto::verify_lock(n.response.lock, 2, n.master_key));
}

TEST_CASE("notarize with percentage 1 rejects the fabricating seller")
{
    Parties p(4, 2);
    auto n = p.run();
    CHECK(n.sampled.size() == 4);
    const auto& res = n.response.results;
    CHECK(res[0].verdict == Verdict::approved);
    CHECK(res[1].verdict == Verdict::approved);
    CHECK(res[2].verdict == Verdict::rejected);
    CHECK_FALSE(res[2].encrypted_key.has_value());
    CHECK(res[3].verdict == Verdict::approved);
    CHECK(n.response.payable_ids() == std::vector<AccountId>{10, 11, 13});
    CHECK(n.response.pay_data_hash == ledger::encode_pay_data(std::vector<AccountId>{10, 11, 13}).hash());
}

TEST_CASE("hash mismatch and missing data are rejected regardless of sampling")
{
    Parties p(3);
    p.policy.percentage = 0;
    p.request.sellers[0].data_hash.bytes[5] ^= 1;
    p.msgs.erase(p.sellers[2].address);
    auto n = p.run();
    CHECK(n.response.results[0].verdict == Verdict::rejected);
    CHECK(n.response.results[1].verdict == Verdict::not_notarized);
    CHECK(n.response.results[2].verdict == Verdict::rejected);
    CHECK(n.response.payable_ids() == std::vector<AccountId>{11});
}

TEST_CASE("partial sampling audits exactly ceil(p n) sellers")
{
    Parties p(10);
    p.policy.percentage = 0.25;
    auto n = p.run();
    CHECK(n.sampled.size() == 3);
    std::size_t approved = 0;
    for (const auto& r : n.response.results)
        approved += r.verdict == Verdict::approved;
    CHECK(approved == 3);
}

TEST_CASE("buyer recovers the seller payload")
{
    Parties p(3);
    auto n = p.run();
    for (std::size_t i = 0; i < 3; ++i) {
        const auto& r = n.response.results[i];
        auto data = recover_data(n.response.lock, 2, n.master_key, *r.encrypted_key, p.msgs.at(r.address).data);
        CHECK(data == p.payloads[i]);
    }

    const auto& r0 = n.response.results[0];
    const auto& ct0 = p.msgs.at(r0.address).data;
    SUBCASE("a key that does not open the lock fails before decrypting")
    {
        auto wrong = n.master_key;
        wrong.bytes[0] ^= 1;
        try {
            recover_data(n.response.lock, 2, wrong, *r0.encrypted_key, ct0);
            FAIL("expected BadKey");
        } catch (const RecoveryError& e) {
            CHECK(e.code == RecoveryErrc::bad_key);
        }
        try {
            recover_data(n.response.lock, 3, n.master_key, *r0.encrypted_key, ct0);
            FAIL("expected BadKey");
        } catch (const RecoveryError& e) {
            CHECK(e.code == RecoveryErrc::bad_key);
        }
    }
    SUBCASE("garbage seller key is a notary fault")
    {
        p.policy.garbage_key = true;
        auto g = p.run();
        const auto& r = g.response.results[0];
        try {
            recover_data(g.response.lock, 2, g.master_key, *r.encrypted_key, ct0);
            FAIL("expected NotaryFault");
        } catch (const RecoveryError& e) {
            CHECK(e.code == RecoveryErrc::notary_fault);
        }
    }
}

TEST_CASE_FIXTURE(LedgerFixture, "settled range stops before the first pending payment")
{
    const auto buyer_addr = addr(1);
    const auto notary_addr = addr(2);
    const auto buyer = open(buyer_addr, 10'000, 5'000);
    const auto notary = open(notary_addr);
    const auto s1 = open(addr(3));
    const auto s2 = open(addr(4));
    (void)buyer;

    Rng rng(5);
    std::vector<SymKey> keys;
    auto pay = [&](std::vector<AccountId> ids) {
        keys.push_back(rng.fixed<SymKey>());
        return ledger.register_payment(buyer_addr, buyer, 10, ledger::encode_pay_data(ids),
                                       crypto::make_lock(notary, keys.back()), 1, notary_addr);
    };

    CHECK_FALSE(settled_range_end(ledger, s1, 0).has_value());
    const auto p0 = pay({s1});
    const auto p1 = pay({s2});
    const auto p2 = pay({s1, s2});
    CHECK_FALSE(settled_range_end(ledger, s1, 0).has_value());
    CHECK(settled_range_end(ledger, s2, 0) == p0);

    ledger.unlock_payment(notary_addr, p0, notary, keys[0]);
    CHECK(settled_range_end(ledger, s1, 0) == p1);
    CHECK(settled_range_end(ledger, s1, p2).has_value() == false);

    ledger.unlock_payment(notary_addr, p2, notary, keys[2]);
    CHECK(settled_range_end(ledger, s1, 0) == p2);
    CHECK(settled_range_end(ledger, s2, 0) == p0);

    advance(ledger.params().unlock_timeout_blocks + 1);
    ledger.refund_locked_payment(buyer_addr, p1);
    CHECK(settled_range_end(ledger, s2, 0) == p2);
}
