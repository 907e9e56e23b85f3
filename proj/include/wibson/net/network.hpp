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

#include "wibson/crypto/crypto.hpp"
#include "wibson/crypto/rng.hpp"
#include "wibson/ledger/types.hpp"

#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace wibson::net {

using ledger::BlockNumber;

enum class NetErrc
{
    url_taken,
    unknown_endpoint,
    invalid_config,
};

const char* to_string(NetErrc code);

class NetError : public std::runtime_error
{
public:
    NetError(NetErrc code, const std::string& detail)
        : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code)
    {
    }
    NetErrc code() const { return code_; }

private:
    NetErrc code_;
};

/// Receiving side of an endpoint or event subscription.
class Inbox
{
public:
    virtual ~Inbox() = default;
    /// `sealed` is addressed to the endpoint owner's key.
    virtual void on_message(const std::string& url, const Bytes& sealed, BlockNumber block)
    {
        (void)url, (void)sealed, (void)block;
    }
    virtual void on_event(const Bytes& event, BlockNumber block) { (void)event, (void)block; }
};

struct TransportConfig
{
    BlockNumber delay_blocks = 1;
    /// Per-url override of delay_blocks.
    std::map<std::string, BlockNumber> url_delay;
    double drop_rate = 0.0;

    void validate() const;
    BlockNumber delay_for(const std::string& url) const;
};

struct Receipt
{
    std::uint64_t seq = 0;
    BlockNumber deliver_at = 0;
    bool dropped = false;
};

struct TraceLine
{
    BlockNumber block = 0;
    std::string kind; // post, drop, deliver, event
    Address sender;
    std::string url;
    Hash32 payload_hash;

    std::string str() const;
};

/// In-memory stand-in for HTTPS posts between public URLs. Every message is
/// sealed to the endpoint owner's key on send; delivery happens at block
/// boundaries in (deliver block, send order) order, so per-sender FIFO holds.
class Network
{
public:
    using WireTap = std::function<void(const std::string& url, const Bytes& sealed)>;

    Network(TransportConfig config, Rng& rng);

    void register_endpoint(const std::string& url, const crypto::PublicKey& owner_pk, Inbox* inbox);
    bool has_endpoint(const std::string& url) const { return endpoints_.count(url) != 0; }
    const crypto::PublicKey& endpoint_key(const std::string& url) const;

    Receipt post(const crypto::SigningKeyPair& sender, const std::string& url, ByteView payload, BlockNumber now);
    /// Posts bytes that are already sealed; used to inject forgeries.
    Receipt post_sealed(const Address& claimed_sender, const std::string& url, Bytes sealed, BlockNumber now);

    void subscribe(Inbox* inbox) { subscribers_.push_back(inbox); }
    /// Events are never dropped and reach every subscriber in emission order.
    void broadcast_event(ByteView event, BlockNumber now);

    /// Public documents served by GET.
    void publish(const std::string& url, Bytes document) { documents_[url] = std::move(document); }
    std::optional<Bytes> fetch(const std::string& url) const;

    /// Delivers pending events, then every message due at or before `block`.
    void deliver(BlockNumber block);

    std::size_t pending() const { return queue_.size() + events_.size(); }
    std::uint64_t posted() const { return posted_; }
    std::uint64_t delivered() const { return delivered_; }
    std::uint64_t dropped() const { return dropped_; }

    const std::vector<TraceLine>& trace() const { return trace_; }
    void set_wire_tap(WireTap tap) { tap_ = std::move(tap); }
    const TransportConfig& config() const { return config_; }

private:
    struct Endpoint
    {
        crypto::PublicKey owner_pk;
        Inbox* inbox = nullptr;
    };
    struct Pending
    {
        Address sender;
        std::string url;
        Bytes sealed;
    };

    Receipt enqueue(const Address& sender, const std::string& url, Bytes sealed, BlockNumber now);

    TransportConfig config_;
    Rng& rng_;
    std::map<std::string, Endpoint> endpoints_;
    std::vector<Inbox*> subscribers_;
    std::map<std::string, Bytes> documents_;
    std::map<std::pair<BlockNumber, std::uint64_t>, Pending> queue_;
    std::vector<Bytes> events_;
    std::uint64_t seq_ = 0;
    std::uint64_t posted_ = 0, delivered_ = 0, dropped_ = 0;
    std::vector<TraceLine> trace_;
    WireTap tap_;
};

} // namespace wibson::net
