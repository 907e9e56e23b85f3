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

#include "wibson/net/network.hpp"

namespace wibson::net {

const char* to_string(NetErrc code)
{
    switch (code) {
    case NetErrc::url_taken:
        return "UrlTaken";
    case NetErrc::unknown_endpoint:
        return "UnknownEndpoint";
    case NetErrc::invalid_config:
        return "InvalidConfig";
    }
    return "Unknown";
}

void TransportConfig::validate() const
{
    if (delay_blocks == 0)
        throw NetError(NetErrc::invalid_config, "delay_blocks must be at least 1");
    for (const auto& [url, d] : url_delay)
        if (d == 0)
            throw NetError(NetErrc::invalid_config, "delay for " + url + " must be at least 1");
    if (!(drop_rate >= 0.0 && drop_rate <= 1.0))
        throw NetError(NetErrc::invalid_config, "drop_rate must lie in [0, 1]");
}

BlockNumber TransportConfig::delay_for(const std::string& url) const
{
    auto it = url_delay.find(url);
    return it == url_delay.end() ? delay_blocks : it->second;
}

std::string TraceLine::str() const
{
    return std::to_string(block) + " " + kind + " " + sender.hex() + " " + url + " " + payload_hash.hex();
}

Network::Network(TransportConfig config, Rng& rng) : config_(std::move(config)), rng_(rng)
{
    config_.validate();
}

void Network::register_endpoint(const std::string& url, const crypto::PublicKey& owner_pk, Inbox* inbox)
{
    if (endpoints_.count(url))
        throw NetError(NetErrc::url_taken, url);
    endpoints_[url] = Endpoint{owner_pk, inbox};
}

const crypto::PublicKey& Network::endpoint_key(const std::string& url) const
{
    auto it = endpoints_.find(url);
    if (it == endpoints_.end())
        throw NetError(NetErrc::unknown_endpoint, url);
    return it->second.owner_pk;
}

Receipt Network::post(const crypto::SigningKeyPair& sender, const std::string& url, ByteView payload, BlockNumber now)
{
    const auto& pk = endpoint_key(url);
    return enqueue(sender.address, url, crypto::seal_message(sender, pk, payload, rng_), now);
}

Receipt Network::post_sealed(const Address& claimed_sender, const std::string& url, Bytes sealed, BlockNumber now)
{
    endpoint_key(url);
    return enqueue(claimed_sender, url, std::move(sealed), now);
}

Receipt Network::enqueue(const Address& sender, const std::string& url, Bytes sealed, BlockNumber now)
{
    Receipt r;
    r.seq = seq_++;
    r.deliver_at = now + config_.delay_for(url);
    ++posted_;
    if (tap_)
        tap_(url, sealed);
    const auto h = crypto::hash(sealed);
    trace_.push_back({now, "post", sender, url, h});

    if (config_.drop_rate > 0.0 && (config_.drop_rate >= 1.0 || rng_.unit() < config_.drop_rate)) {
        r.dropped = true;
        ++dropped_;
        trace_.push_back({now, "drop", sender, url, h});
        return r;
    }
    queue_.emplace(std::make_pair(r.deliver_at, r.seq), Pending{sender, url, std::move(sealed)});
    return r;
}

void Network::broadcast_event(ByteView event, BlockNumber now)
{
    events_.emplace_back(event.begin(), event.end());
    trace_.push_back({now, "event", Address{}, "*", crypto::hash(event)});
}

std::optional<Bytes> Network::fetch(const std::string& url) const
{
    auto it = documents_.find(url);
    if (it == documents_.end())
        return std::nullopt;
    return it->second;
}

void Network::deliver(BlockNumber block)
{
    auto events = std::move(events_);
    events_.clear();
    for (const auto& e : events)
        for (auto* s : subscribers_)
            s->on_event(e, block);

    while (!queue_.empty() && queue_.begin()->first.first <= block) {
        auto node = queue_.extract(queue_.begin());
        auto& p = node.mapped();
        ++delivered_;
        trace_.push_back({block, "deliver", p.sender, p.url, crypto::hash(p.sealed)});
        auto it = endpoints_.find(p.url);
        if (it->second.inbox)
            it->second.inbox->on_message(p.url, p.sealed, block);
    }
}

} // namespace wibson::net
