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

#include "wibson/crypto/bytes.hpp"
#include "wibson/crypto/rng.hpp"

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace wibson::crypto {

enum class CryptoErrc
{
    authentication_failure,
    signature_invalid,
    malformed,
};

const char* to_string(CryptoErrc code);

class CryptoError : public std::runtime_error
{
public:
    CryptoError(CryptoErrc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    CryptoErrc code() const { return code_; }

private:
    CryptoErrc code_;
};

// ---------------------------------------------------------------------------
// Hashing

/// Keccak-256 (the pre-standard padding used by Ethereum, not SHA3-256).
Hash32 hash(ByteView data);
inline Hash32 hash(std::string_view s) { return hash(as_bytes(s)); }

namespace detail {
/// Keccak[c=512] sponge with a caller-chosen domain byte: 0x01 gives
/// Keccak-256, 0x06 gives FIPS-202 SHA3-256.
Hash32 sponge256(ByteView data, std::uint8_t domain);
} // namespace detail

// ---------------------------------------------------------------------------
// Hash lock binding a payment batch to a notary's master key.

struct Lock
{
    Hash32 digest;
    auto operator<=>(const Lock&) const = default;
};

/// Preimage layout: 4-byte big-endian notary id followed by the 32 key bytes.
Bytes lock_preimage(std::uint32_t notary_id, const SymKey& master_key);
Lock make_lock(std::uint32_t notary_id, const SymKey& master_key);
bool verify_lock(const Lock& lock, std::uint32_t notary_id, const SymKey& master_key);

// ---------------------------------------------------------------------------
// Authenticated symmetric encryption (AES-256-GCM).

struct Ciphertext
{
    std::array<std::uint8_t, 12> nonce{};
    Bytes body;
    std::array<std::uint8_t, 16> tag{};

    /// nonce || tag || body
    Bytes encode() const;
    static Ciphertext decode(ByteView data);

    bool operator==(const Ciphertext&) const = default;
};

Ciphertext sym_encrypt(const SymKey& key, ByteView plaintext, Rng& rng);
/// Throws CryptoError(authentication_failure) on a wrong key or any tamper.
Bytes sym_decrypt(const SymKey& key, const Ciphertext& ct);

// ---------------------------------------------------------------------------
// Signing keys. ECDSA over NIST P-256 with deterministic (RFC 6979) nonces;
// public keys travel in 33-byte SEC1 compressed form.

struct PublicKeyTag {};
struct SecretKeyTag {};
struct SignatureTag {};
using PublicKey = FixedBytes<33, PublicKeyTag>;
using SecretKey = FixedBytes<32, SecretKeyTag>;
using Signature = FixedBytes<64, SignatureTag>; // r || s, low-s form

/// Low 20 bytes of hash(uncompressed x || y).
Address address_of(const PublicKey& pk);

struct SigningKeyPair
{
    SecretKey secret;
    PublicKey public_key;
    Address address;

    static SigningKeyPair generate(Rng& rng);
    static SigningKeyPair from_secret(const SecretKey& sk);
};

Signature sign_digest(const SecretKey& sk, const Hash32& digest);
bool verify_digest(const PublicKey& pk, const Hash32& digest, const Signature& sig);

/// Signs hash(msg).
Signature sign(const SecretKey& sk, ByteView msg);
bool verify(const PublicKey& pk, ByteView msg, const Signature& sig);

namespace detail {
/// RFC 6979 nonce for P-256 with HMAC-SHA256.
std::array<std::uint8_t, 32> rfc6979_nonce(const SecretKey& sk, const Hash32& digest);
} // namespace detail

// ---------------------------------------------------------------------------
// Off-chain message envelopes: sign-then-encrypt.

struct Envelope
{
    Bytes payload;
    Signature signature;
    PublicKey sender_pk;

    /// u32 payload length || payload || 64-byte signature || 33-byte key
    Bytes encode() const;
    static Envelope decode(ByteView data);
    bool verify() const;
};

Envelope make_envelope(const SigningKeyPair& sender, ByteView payload);

struct OpenedMessage
{
    Bytes payload;
    PublicKey sender_pk;
    Address sender_address;
};

/// ephemeral public key (33) || AES-GCM ciphertext of the encoded envelope.
/// The symmetric key is HKDF-SHA256 over the ECDH shared secret.
Bytes seal_message(const SigningKeyPair& sender, const PublicKey& recipient_pk, ByteView payload, Rng& rng);
/// Seals an already-built envelope; used to inject forged envelopes in tests.
Bytes seal_envelope(const Envelope& env, const PublicKey& recipient_pk, Rng& rng);

/// Throws CryptoError(authentication_failure) if the outer layer does not
/// open with this key, CryptoError(signature_invalid) if the inner signature
/// does not verify.
OpenedMessage open_message(const SecretKey& recipient_sk, ByteView sealed);
/// Same, skipping the public key recomputation.
OpenedMessage open_message(const SigningKeyPair& recipient, ByteView sealed);

} // namespace wibson::crypto
