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

#include "wibson/crypto/crypto.hpp"

#include <openssl/core_names.h>
#include <openssl/evp.h>
#include <openssl/kdf.h>
#include <openssl/params.h>

#include "ec_util.hpp"

namespace wibson::crypto {

namespace {

constexpr std::string_view kKdfInfo = "wibson-envelope-v1";

SymKey derive_key(const std::array<std::uint8_t, 32>& shared, const PublicKey& ephemeral, const PublicKey& recipient)
{
    static EVP_KDF* kdf = EVP_KDF_fetch(nullptr, "HKDF", nullptr);
    if (!kdf)
        throw std::runtime_error("HKDF unavailable");
    std::unique_ptr<EVP_KDF_CTX, decltype(&EVP_KDF_CTX_free)> kctx(EVP_KDF_CTX_new(kdf), &EVP_KDF_CTX_free);
    if (!kctx)
        throw std::bad_alloc();

    Bytes salt(ephemeral.bytes.begin(), ephemeral.bytes.end());
    salt.insert(salt.end(), recipient.bytes.begin(), recipient.bytes.end());
    std::string digest = "SHA256";
    std::string info(kKdfInfo);

    OSSL_PARAM params[] = {
        OSSL_PARAM_construct_utf8_string(OSSL_KDF_PARAM_DIGEST, digest.data(), 0),
        OSSL_PARAM_construct_octet_string(OSSL_KDF_PARAM_KEY, const_cast<std::uint8_t*>(shared.data()),
                                          shared.size()),
        OSSL_PARAM_construct_octet_string(OSSL_KDF_PARAM_SALT, salt.data(), salt.size()),
        OSSL_PARAM_construct_octet_string(OSSL_KDF_PARAM_INFO, info.data(), info.size()),
        OSSL_PARAM_construct_end(),
    };
    SymKey key;
    if (EVP_KDF_derive(kctx.get(), key.data(), SymKey::size(), params) != 1)
        throw std::runtime_error("HKDF derivation failed");
    return key;
}

std::array<std::uint8_t, 32> ecdh(const SecretKey& sk, const EC_POINT* peer, BN_CTX* ctx)
{
    auto d = ec::bn_from(sk.view());
    auto shared = ec::point_new();
    if (EC_POINT_mul(ec::group(), shared.get(), nullptr, peer, d.get(), ctx) != 1)
        throw std::runtime_error("ECDH multiplication failed");
    return ec::x_coordinate(shared.get(), ctx);
}

} // namespace

Bytes Envelope::encode() const
{
    ByteWriter w;
    w.blob(payload).fixed(signature).fixed(sender_pk);
    return std::move(w).bytes();
}

Envelope Envelope::decode(ByteView data)
{
    try {
        ByteReader r(data);
        Envelope env;
        env.payload = r.blob();
        env.signature = r.fixed<Signature>();
        env.sender_pk = r.fixed<PublicKey>();
        r.expect_done();
        return env;
    } catch (const DecodeError& e) {
        throw CryptoError(CryptoErrc::malformed, std::string("malformed envelope: ") + e.what());
    }
}

bool Envelope::verify() const
{
    return crypto::verify(sender_pk, payload, signature);
}

Envelope make_envelope(const SigningKeyPair& sender, ByteView payload)
{
    return Envelope{Bytes(payload.begin(), payload.end()), sign(sender.secret, payload), sender.public_key};
}

Bytes seal_envelope(const Envelope& env, const PublicKey& recipient_pk, Rng& rng)
{
    auto ctx = ec::ctx_new();
    auto peer = ec::point_from(recipient_pk, ctx.get());
    if (!peer)
        throw CryptoError(CryptoErrc::malformed, "invalid recipient public key");

    auto eph = SigningKeyPair::from_secret(ec::random_scalar(rng));
    auto key = derive_key(ecdh(eph.secret, peer.get(), ctx.get()), eph.public_key, recipient_pk);
    auto ct = sym_encrypt(key, env.encode(), rng);

    Bytes out(eph.public_key.bytes.begin(), eph.public_key.bytes.end());
    auto body = ct.encode();
    out.insert(out.end(), body.begin(), body.end());
    return out;
}

Bytes seal_message(const SigningKeyPair& sender, const PublicKey& recipient_pk, ByteView payload, Rng& rng)
{
    return seal_envelope(make_envelope(sender, payload), recipient_pk, rng);
}

namespace {

OpenedMessage open_with(const SecretKey& recipient_sk, const PublicKey& recipient_pk, ByteView sealed)
{
    if (sealed.size() < PublicKey::size())
        throw CryptoError(CryptoErrc::authentication_failure, "sealed message too short");
    auto eph_pk = PublicKey::from(sealed.subspan(0, PublicKey::size()));
    auto ctx = ec::ctx_new();
    auto eph = ec::point_from(eph_pk, ctx.get());
    if (!eph)
        throw CryptoError(CryptoErrc::authentication_failure, "invalid ephemeral key");

    auto key = derive_key(ecdh(recipient_sk, eph.get(), ctx.get()), eph_pk, recipient_pk);
    auto inner = sym_decrypt(key, Ciphertext::decode(sealed.subspan(PublicKey::size())));

    auto env = Envelope::decode(inner);
    if (!env.verify())
        throw CryptoError(CryptoErrc::signature_invalid, "envelope signature does not verify");
    auto addr = address_of(env.sender_pk);
    return OpenedMessage{std::move(env.payload), env.sender_pk, addr};
}

} // namespace

OpenedMessage open_message(const SecretKey& recipient_sk, ByteView sealed)
{
    return open_with(recipient_sk, SigningKeyPair::from_secret(recipient_sk).public_key, sealed);
}

OpenedMessage open_message(const SigningKeyPair& recipient, ByteView sealed)
{
    return open_with(recipient.secret, recipient.public_key, sealed);
}

} // namespace wibson::crypto
