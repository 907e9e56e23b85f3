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

#include "wibson/actors/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace wibson::actors {

Decision seller_evaluate_order(const SellerPolicy& policy, const exchange::OntologySchema& schema,
                               const exchange::SellerProfile& profile, const exchange::DataOrder& order,
                               const exchange::BuyerOrderInfo& info)
{
    Decision d;
    if (order.status != exchange::OrderStatus::open) {
        d.reason = "order closed";
        return d;
    }
    if (!exchange::validate_buyer_info(info, order)) {
        d.reason = "buyer info does not match the order";
        return d;
    }
    if (!exchange::audience_match(schema, profile, order.audience)) {
        d.reason = "audience mismatch";
        return d;
    }
    if (order.price < policy.price_floor) {
        d.reason = "price below floor";
        return d;
    }
    if (!policy.accepts_terms) {
        d.reason = "terms rejected";
        return d;
    }
    for (const auto& q : order.requested)
        if (!profile.store.count(q.entity)) {
            d.reason = "missing entity " + q.entity;
            return d;
        }

    const exchange::NotaryOffer* best = nullptr;
    for (const auto& offer : info.notaries) {
        if (std::find(policy.trusted_notaries.begin(), policy.trusted_notaries.end(), offer.notary_address) ==
            policy.trusted_notaries.end())
            continue;
        if (!best || offer.fee < best->fee || (offer.fee == best->fee && offer.notary_id < best->notary_id))
            best = &offer;
    }
    if (!best) {
        d.reason = "no trusted notary";
        return d;
    }
    d.accept = true;
    d.notary = *best;
    d.reason = "accepted";
    return d;
}

Bytes fabricate_payload(ByteView honest_payload)
{
    auto payload = exchange::decode_payload(honest_payload);
    if (payload.empty())
        return Bytes(honest_payload.begin(), honest_payload.end());
    auto& records = payload.front().records;
    exchange::Record fake;
    if (!records.empty()) {
        fake = records.front();
        auto lat = fake.fields.find("lat");
        if (lat != fake.fields.end() && std::holds_alternative<double>(lat->second))
            lat->second = std::get<double>(lat->second) + 0.5;
        else
            fake.fields["fabricated"] = std::int64_t{1};
    } else {
        fake.fields["fabricated"] = std::int64_t{1};
    }
    records.push_back(std::move(fake));
    return exchange::encode_payload(payload);
}

std::size_t sample_count(double percentage, std::size_t n)
{
    if (percentage <= 0.0)
        return 0;
    if (percentage >= 1.0)
        return n;
    // small epsilon so that e.g. 0.3 * 10 does not round up to 4
    return std::min(n, static_cast<std::size_t>(std::ceil(percentage * static_cast<double>(n) - 1e-9)));
}

Notarization notarize(const NotaryPolicy& policy, const crypto::SigningKeyPair& notary, AccountId notary_id,
                      const NotarizationRequest& request,
                      const std::map<Address, SellerNotaryMsg>& seller_messages,
                      const std::map<Address, DataStore>& ground_truth, Rng& rng)
{
    const auto n = request.sellers.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    const auto k = sample_count(policy.percentage, n);
    for (std::size_t i = 0; i < k; ++i)
        std::swap(order[i], order[i + rng.below(n - i)]);
    std::vector<bool> audited(n, false);
    for (std::size_t i = 0; i < k; ++i)
        audited[order[i]] = true;

    Notarization out;
    out.sampled.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
    std::sort(out.sampled.begin(), out.sampled.end());
    out.master_key = rng.fixed<SymKey>();

    auto& resp = out.response;
    resp.order_id = request.order_id;
    resp.fee = policy.fee;
    resp.notarization_percentage = policy.percentage;
    resp.notary_address = notary.address;

    static const DataStore empty;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& entry = request.sellers[i];
        SellerResult r;
        r.id = entry.id;
        r.address = entry.address;

        auto msg = seller_messages.find(entry.address);
        if (msg == seller_messages.end() || msg->second.order_id != request.order_id ||
            crypto::hash(msg->second.data.encode()) != entry.data_hash) {
            r.verdict = Verdict::rejected;
        } else if (audited[i]) {
            bool ok = false;
            try {
                auto plain = crypto::sym_decrypt(msg->second.key, msg->second.data);
                auto truth = ground_truth.find(entry.address);
                ok = verify_payload(policy.verifiers, truth == ground_truth.end() ? empty : truth->second,
                                    exchange::decode_payload(plain));
            } catch (const std::exception&) {
                ok = false;
            }
            r.verdict = ok ? Verdict::approved : Verdict::rejected;
        } else {
            r.verdict = Verdict::not_notarized;
        }

        if (r.verdict != Verdict::rejected) {
            const SymKey inner = policy.garbage_key ? rng.fixed<SymKey>() : msg->second.key;
            r.encrypted_key = crypto::sym_encrypt(out.master_key, inner.view(), rng);
        }
        resp.results.push_back(std::move(r));
    }

    resp.lock = crypto::make_lock(notary_id, out.master_key);
    const auto ids = resp.payable_ids();
    if (!ids.empty())
        resp.pay_data_hash = ledger::encode_pay_data(ids).hash();
    resp.sign(notary);
    return out;
}

const char* to_string(RecoveryErrc e)
{
    switch (e) {
    case RecoveryErrc::bad_key:
        return "BadKey";
    case RecoveryErrc::notary_fault:
        return "NotaryFault";
    }
    return "Unknown";
}

Bytes recover_data(const crypto::Lock& lock, AccountId notary_id, const SymKey& published_key,
                   const crypto::Ciphertext& encrypted_key, const crypto::Ciphertext& data)
{
    if (!crypto::verify_lock(lock, notary_id, published_key))
        throw RecoveryError(RecoveryErrc::bad_key, "published key does not open the lock");
    SymKey k;
    try {
        auto raw = crypto::sym_decrypt(published_key, encrypted_key);
        k = SymKey::from(raw);
    } catch (const std::exception& e) {
        throw RecoveryError(RecoveryErrc::notary_fault, std::string("encrypted seller key: ") + e.what());
    }
    try {
        return crypto::sym_decrypt(k, data);
    } catch (const crypto::CryptoError& e) {
        throw RecoveryError(RecoveryErrc::notary_fault, std::string("seller data: ") + e.what());
    }
}

std::optional<ledger::PayIndex> settled_range_end(const ledger::Ledger& ledger, AccountId account,
                                                  ledger::PayIndex from)
{
    const auto count = ledger.payment_count();
    ledger::PayIndex end = count;
    for (ledger::PayIndex i = from; i < count; ++i) {
        const auto& p = ledger.payment(i);
        if (p.unlocked || p.voided)
            continue;
        const auto& ids = ledger.payees(i);
        if (std::binary_search(ids.begin(), ids.end(), account)) {
            end = i;
            break;
        }
    }
    if (end <= from)
        return std::nullopt;
    return end - 1;
}

} // namespace wibson::actors
