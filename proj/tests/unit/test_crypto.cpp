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

#include <doctest.h>

#include "wibson/crypto/crypto.hpp"

#include <openssl/bn.h>
#include <openssl/core_names.h>
#include <openssl/ec.h>
#include <openssl/evp.h>
#include <openssl/param_build.h>

#include <memory>
#include <set>

using namespace wibson;
using namespace wibson::crypto;

namespace {

// Independent verifier: OpenSSL's own ECDSA over the raw digest.
bool openssl_verify(const PublicKey& pk, const Hash32& digest, const Signature& sig)
{
    std::unique_ptr<OSSL_PARAM_BLD, decltype(&OSSL_PARAM_BLD_free)> bld(OSSL_PARAM_BLD_new(), &OSSL_PARAM_BLD_free);
    OSSL_PARAM_BLD_push_utf8_string(bld.get(), OSSL_PKEY_PARAM_GROUP_NAME, "prime256v1", 0);
    OSSL_PARAM_BLD_push_octet_string(bld.get(), OSSL_PKEY_PARAM_PUB_KEY, pk.data(), pk.size());
    std::unique_ptr<OSSL_PARAM, decltype(&OSSL_PARAM_free)> params(OSSL_PARAM_BLD_to_param(bld.get()),
                                                                   &OSSL_PARAM_free);
    std::unique_ptr<EVP_PKEY_CTX, decltype(&EVP_PKEY_CTX_free)> fctx(EVP_PKEY_CTX_new_from_name(nullptr, "EC", nullptr),
                                                                     &EVP_PKEY_CTX_free);
    EVP_PKEY* raw = nullptr;
    REQUIRE(EVP_PKEY_fromdata_init(fctx.get()) == 1);
    REQUIRE(EVP_PKEY_fromdata(fctx.get(), &raw, EVP_PKEY_PUBLIC_KEY, params.get()) == 1);
    std::unique_ptr<EVP_PKEY, decltype(&EVP_PKEY_free)> key(raw, &EVP_PKEY_free);

    ECDSA_SIG* es = ECDSA_SIG_new();
    ECDSA_SIG_set0(es, BN_bin2bn(sig.data(), 32, nullptr), BN_bin2bn(sig.data() + 32, 32, nullptr));
    unsigned char* der = nullptr;
    int der_len = i2d_ECDSA_SIG(es, &der);
    ECDSA_SIG_free(es);

    std::unique_ptr<EVP_PKEY_CTX, decltype(&EVP_PKEY_CTX_free)> vctx(EVP_PKEY_CTX_new(key.get(), nullptr),
                                                                     &EVP_PKEY_CTX_free);
    REQUIRE(EVP_PKEY_verify_init(vctx.get()) == 1);
    int ok = EVP_PKEY_verify(vctx.get(), der, static_cast<std::size_t>(der_len), digest.data(), digest.size());
    OPENSSL_free(der);
    return ok == 1;
}

Hash32 openssl_sha3_256(ByteView data)
{
    Hash32 out;
    unsigned int len = 0;
    REQUIRE(EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha3_256(), nullptr) == 1);
    return out;
}

Hash32 openssl_sha256(ByteView data)
{
    Hash32 out;
    unsigned int len = 0;
    REQUIRE(EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(), nullptr) == 1);
    return out;
}

} // namespace

TEST_SUITE("crypto.hash")
{
    // Reference values computed with pycryptodome's Keccak-256.
    TEST_CASE("keccak-256 reference vectors")
    {
        CHECK(hash(ByteView{}).hex() == "c5d2460186f7233c927e7db2dcc703c0e500b653ca82273b7bfad8045d85a470");
        CHECK(hash("abc").hex() == "4e03657aea45a94fc7d47ba826c8d667c0d1e6e33a64a036ec44f58fa12d6c45");
        Bytes seq(200);
        for (int i = 0; i < 200; ++i)
            seq[i] = static_cast<std::uint8_t>(i);
        CHECK(hash(seq).hex() == "bfb0aa97863e797943cf7c33bb7e880bb4543f3d2703c0923c6901c2af57b890");
    }

    TEST_CASE("sponge with SHA3 padding agrees with OpenSSL SHA3-256 across block boundaries")
    {
        Rng rng(7);
        for (std::size_t len : {0, 1, 55, 135, 136, 137, 271, 272, 273, 1000}) {
            auto data = rng.bytes(len);
            CHECK(detail::sponge256(data, 0x06) == openssl_sha3_256(data));
        }
    }

    TEST_CASE("deterministic and sensitive to a trailing zero byte")
    {
        Rng rng(11);
        for (int i = 0; i < 1000; ++i) {
            auto x = rng.bytes(rng.below(300));
            CHECK(hash(x) == hash(x));
            auto y = x;
            y.push_back(0x00);
            CHECK(hash(x) != hash(y));
        }
    }
}

TEST_SUITE("crypto.lock")
{
    TEST_CASE("lock preimage layout matches externally computed digest")
    {
        SymKey m0;
        for (int i = 0; i < 32; ++i)
            m0.bytes[i] = static_cast<std::uint8_t>(i);
        auto pre = lock_preimage(5, m0);
        REQUIRE(pre.size() == 36);
        CHECK(pre[0] == 0x00);
        CHECK(pre[3] == 0x05);
        // pycryptodome keccak256(00000005 || 00..1f)
        CHECK(make_lock(5, m0).digest.hex() == "db4fc78393da528c6fc90d8be3ef8832df84276131a4cb518a55826ccddafa88");
    }

    TEST_CASE("verify / forge")
    {
        Rng rng(3);
        auto m = rng.fixed<SymKey>();
        auto lock = make_lock(1, m);
        CHECK(verify_lock(lock, 1, m));
        CHECK_FALSE(verify_lock(lock, 2, m));
        CHECK_FALSE(verify_lock(lock, 1, SymKey{}));
        for (int i = 0; i < 500; ++i) {
            auto n = static_cast<std::uint32_t>(rng.next());
            auto key = rng.fixed<SymKey>();
            auto other = rng.fixed<SymKey>();
            auto l = make_lock(n, key);
            CHECK(verify_lock(l, n, key));
            if (other != key)
                CHECK_FALSE(verify_lock(l, n, other));
        }
    }
}

TEST_SUITE("crypto.symmetric")
{
    TEST_CASE("round trip, wrong key, truncation")
    {
        Rng rng(5);
        auto k = rng.fixed<SymKey>();
        auto k2 = rng.fixed<SymKey>();
        for (std::size_t len : {0, 1, 16, 64, 1000}) {
            auto d = rng.bytes(len);
            auto ct = sym_encrypt(k, d, rng);
            CHECK(sym_decrypt(k, ct) == d);
            CHECK(Ciphertext::decode(ct.encode()) == ct);
            try {
                sym_decrypt(k2, ct);
                FAIL("wrong key accepted");
            } catch (const CryptoError& e) {
                CHECK(e.code() == CryptoErrc::authentication_failure);
            }
            if (!ct.body.empty()) {
                auto trunc = ct;
                trunc.body.pop_back();
                CHECK_THROWS_AS(sym_decrypt(k, trunc), CryptoError);
            }
        }
    }

    TEST_CASE("every single-bit flip of body or tag on a 64-byte message fails")
    {
        Rng rng(9);
        auto k = rng.fixed<SymKey>();
        auto d = rng.bytes(64);
        auto ct = sym_encrypt(k, d, rng);
        int rejected = 0, total = 0;
        for (std::size_t byte = 0; byte < ct.body.size(); ++byte)
            for (int bit = 0; bit < 8; ++bit) {
                auto t = ct;
                t.body[byte] ^= static_cast<std::uint8_t>(1u << bit);
                ++total;
                try {
                    sym_decrypt(k, t);
                } catch (const CryptoError& e) {
                    rejected += e.code() == CryptoErrc::authentication_failure;
                }
            }
        for (std::size_t byte = 0; byte < ct.tag.size(); ++byte)
            for (int bit = 0; bit < 8; ++bit) {
                auto t = ct;
                t.tag[byte] ^= static_cast<std::uint8_t>(1u << bit);
                ++total;
                try {
                    sym_decrypt(k, t);
                } catch (const CryptoError& e) {
                    rejected += e.code() == CryptoErrc::authentication_failure;
                }
            }
        CHECK(total == (64 + 16) * 8);
        CHECK(rejected == total);
    }

    TEST_CASE("nonce comes from the seeded generator")
    {
        SymKey k{};
        Rng a(42), b(42);
        CHECK(sym_encrypt(k, as_bytes("hello"), a) == sym_encrypt(k, as_bytes("hello"), b));
    }
}

TEST_SUITE("crypto.signatures")
{
    TEST_CASE("RFC 6979 P-256/SHA-256 'sample' vector")
    {
        auto sk = SecretKey::from_hex("c9afa9d845ba75166b5c215767b1d6934e50c3db36e89b127b8a622b120f6721");
        auto digest = openssl_sha256(as_bytes("sample"));
        CHECK(to_hex(detail::rfc6979_nonce(sk, digest)) ==
              "a6e3c57dd01abe90086538398355dd4c3b17aa873382b0f24d6129493d8aad60");

        auto sig = sign_digest(sk, digest);
        CHECK(to_hex(sig.view().subspan(0, 32)) == "efd48b2aacb6a8fd1140dd9cd45e81d69d2c877b56aaf991c34d0ea84eaf3716");
        // The RFC's s is high; we emit n - s.
        BIGNUM* n = BN_new();
        BN_hex2bn(&n, "FFFFFFFF00000000FFFFFFFFFFFFFFFFBCE6FAADA7179E84F3B9CAC2FC632551");
        BIGNUM* s = BN_new();
        BN_hex2bn(&s, "F7CB1C942D657C41D436C7A1B6E29F65F3E900DBB9AFF4064DC4AB2F843ACDA8");
        BN_sub(s, n, s);
        std::array<std::uint8_t, 32> low{};
        BN_bn2binpad(s, low.data(), 32);
        BN_free(n);
        BN_free(s);
        CHECK(to_hex(sig.view().subspan(32, 32)) == to_hex(low));

        auto kp = SigningKeyPair::from_secret(sk);
        CHECK(verify_digest(kp.public_key, digest, sig));
        CHECK(openssl_verify(kp.public_key, digest, sig));
    }

    TEST_CASE("sign/verify properties, cross-checked against OpenSSL")
    {
        Rng rng(21);
        auto k1 = SigningKeyPair::generate(rng);
        auto k2 = SigningKeyPair::generate(rng);
        for (int i = 0; i < 50; ++i) {
            auto m = rng.bytes(1 + rng.below(100));
            auto sig = sign(k1.secret, m);
            CHECK(verify(k1.public_key, m, sig));
            CHECK(openssl_verify(k1.public_key, hash(m), sig));
            auto m2 = m;
            m2.push_back(0x01);
            CHECK_FALSE(verify(k1.public_key, m2, sig));
            CHECK_FALSE(verify(k2.public_key, m, sig));
            auto bad = sig;
            bad.bytes[rng.below(64)] ^= 0x10;
            CHECK_FALSE(verify(k1.public_key, m, bad));
        }
    }

    TEST_CASE("address derivation is deterministic and injective over a key corpus")
    {
        Rng rng(99);
        std::set<Address> seen;
        for (int i = 0; i < 200; ++i) {
            auto kp = SigningKeyPair::generate(rng);
            CHECK(address_of(kp.public_key) == kp.address);
            CHECK(SigningKeyPair::from_secret(kp.secret).address == kp.address);
            seen.insert(kp.address);
        }
        CHECK(seen.size() == 200);
    }
}

TEST_SUITE("crypto.envelope")
{
    TEST_CASE("encoding layout")
    {
        Rng rng(1);
        auto s = SigningKeyPair::generate(rng);
        auto env = make_envelope(s, as_bytes("xyz"));
        auto enc = env.encode();
        REQUIRE(enc.size() == 4 + 3 + 64 + 33);
        CHECK(enc[3] == 3);
        CHECK(enc[4] == 'x');
        CHECK(std::equal(enc.begin() + 7, enc.begin() + 71, env.signature.bytes.begin()));
        CHECK(std::equal(enc.begin() + 71, enc.end(), s.public_key.bytes.begin()));
        auto back = Envelope::decode(enc);
        CHECK(back.payload == env.payload);
        CHECK(back.verify());
    }

    TEST_CASE("seal/open identity over random payloads")
    {
        Rng rng(17);
        auto sender = SigningKeyPair::generate(rng);
        auto recipient = SigningKeyPair::generate(rng);
        for (int i = 0; i < 100; ++i) {
            auto p = rng.bytes(rng.below(512));
            auto sealed = seal_message(sender, recipient.public_key, p, rng);
            auto opened = open_message(recipient.secret, sealed);
            CHECK(opened.payload == p);
            CHECK(opened.sender_pk == sender.public_key);
            CHECK(opened.sender_address == sender.address);
        }
    }

    TEST_CASE("wrong recipient key, tampering, forged signature")
    {
        Rng rng(23);
        auto sender = SigningKeyPair::generate(rng);
        auto recipient = SigningKeyPair::generate(rng);
        auto stranger = SigningKeyPair::generate(rng);
        auto sealed = seal_message(sender, recipient.public_key, as_bytes("payload"), rng);

        try {
            open_message(stranger.secret, sealed);
            FAIL("opened with the wrong key");
        } catch (const CryptoError& e) {
            CHECK(e.code() == CryptoErrc::authentication_failure);
        }

        for (std::size_t i = 0; i < sealed.size(); i += 7) {
            auto t = sealed;
            t[i] ^= 0x01;
            CHECK_THROWS_AS(open_message(recipient.secret, t), CryptoError);
        }

        auto env = make_envelope(sender, as_bytes("payload"));
        env.signature.bytes[5] ^= 0xff;
        auto forged = seal_envelope(env, recipient.public_key, rng);
        try {
            open_message(recipient, forged);
            FAIL("forged signature accepted");
        } catch (const CryptoError& e) {
            CHECK(e.code() == CryptoErrc::signature_invalid);
        }

        // Claiming someone else's key with our own signature.
        auto impostor = make_envelope(stranger, as_bytes("payload"));
        impostor.sender_pk = sender.public_key;
        CHECK_THROWS_AS(open_message(recipient, seal_envelope(impostor, recipient.public_key, rng)), CryptoError);
    }
}
