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

#include <openssl/bn.h>
#include <openssl/ec.h>
#include <openssl/evp.h>
#include <openssl/hmac.h>
#include <openssl/obj_mac.h>

#include <memory>

#include "ec_util.hpp"

namespace wibson::crypto {

namespace ec {

const EC_GROUP* group()
{
    static const EC_GROUP* g = [] {
        auto* grp = EC_GROUP_new_by_curve_name(NID_X9_62_prime256v1);
        if (!grp)
            throw std::runtime_error("P-256 group unavailable");
        return grp;
    }();
    return g;
}

const BIGNUM* order()
{
    return EC_GROUP_get0_order(group());
}

BnPtr bn_from(ByteView be)
{
    BnPtr out(BN_bin2bn(be.data(), static_cast<int>(be.size()), nullptr));
    if (!out)
        throw std::bad_alloc();
    return out;
}

BnPtr bn_new()
{
    BnPtr out(BN_new());
    if (!out)
        throw std::bad_alloc();
    return out;
}

void bn_to32(const BIGNUM* v, std::uint8_t* out)
{
    if (BN_bn2binpad(v, out, 32) != 32)
        throw std::runtime_error("scalar does not fit 32 bytes");
}

CtxPtr ctx_new()
{
    CtxPtr out(BN_CTX_new());
    if (!out)
        throw std::bad_alloc();
    return out;
}

PointPtr point_new()
{
    PointPtr out(EC_POINT_new(group()));
    if (!out)
        throw std::bad_alloc();
    return out;
}

PointPtr point_from(const PublicKey& pk, BN_CTX* ctx)
{
    auto p = point_new();
    if (EC_POINT_oct2point(group(), p.get(), pk.data(), PublicKey::size(), ctx) != 1)
        return nullptr;
    return p;
}

PublicKey compress(const EC_POINT* p, BN_CTX* ctx)
{
    PublicKey pk;
    if (EC_POINT_point2oct(group(), p, POINT_CONVERSION_COMPRESSED, pk.data(), PublicKey::size(), ctx) !=
        PublicKey::size())
        throw std::runtime_error("point compression failed");
    return pk;
}

std::array<std::uint8_t, 32> x_coordinate(const EC_POINT* p, BN_CTX* ctx)
{
    auto x = bn_new();
    if (EC_POINT_get_affine_coordinates(group(), p, x.get(), nullptr, ctx) != 1)
        throw std::runtime_error("affine conversion failed");
    std::array<std::uint8_t, 32> out{};
    bn_to32(x.get(), out.data());
    return out;
}

SecretKey random_scalar(Rng& rng)
{
    for (;;) {
        auto sk = rng.fixed<SecretKey>();
        auto v = bn_from(sk.view());
        if (!BN_is_zero(v.get()) && BN_cmp(v.get(), order()) < 0)
            return sk;
    }
}

} // namespace ec

namespace {

using Mac = std::array<std::uint8_t, 32>;

Mac hmac_sha256(const Mac& key, ByteView data)
{
    Mac out{};
    unsigned int len = 0;
    if (!HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()), data.data(), data.size(), out.data(), &len))
        throw std::runtime_error("HMAC-SHA256 failed");
    return out;
}

template <typename... Parts>
Bytes concat(const Parts&... parts)
{
    Bytes out;
    (out.insert(out.end(), std::begin(parts), std::end(parts)), ...);
    return out;
}

} // namespace

namespace detail {

std::array<std::uint8_t, 32> rfc6979_nonce(const SecretKey& sk, const Hash32& digest)
{
    // bits2octets: reduce the digest mod n (qlen == hlen == 256).
    std::array<std::uint8_t, 32> h1{};
    {
        auto ctx = ec::ctx_new();
        auto z = ec::bn_from(digest.view());
        auto r = ec::bn_new();
        BN_nnmod(r.get(), z.get(), ec::order(), ctx.get());
        ec::bn_to32(r.get(), h1.data());
    }

    Mac v;
    v.fill(0x01);
    Mac k{};
    const std::array<std::uint8_t, 1> zero{0x00};
    const std::array<std::uint8_t, 1> one{0x01};

    k = hmac_sha256(k, concat(v, zero, sk.bytes, h1));
    v = hmac_sha256(k, v);
    k = hmac_sha256(k, concat(v, one, sk.bytes, h1));
    v = hmac_sha256(k, v);

    for (;;) {
        v = hmac_sha256(k, v);
        auto cand = ec::bn_from(v);
        if (!BN_is_zero(cand.get()) && BN_cmp(cand.get(), ec::order()) < 0)
            return v;
        k = hmac_sha256(k, concat(v, zero));
        v = hmac_sha256(k, v);
    }
}

} // namespace detail

Address address_of(const PublicKey& pk)
{
    auto ctx = ec::ctx_new();
    auto p = ec::point_from(pk, ctx.get());
    if (!p)
        throw CryptoError(CryptoErrc::malformed, "invalid public key encoding");
    std::array<std::uint8_t, 65> full{};
    if (EC_POINT_point2oct(ec::group(), p.get(), POINT_CONVERSION_UNCOMPRESSED, full.data(), full.size(),
                           ctx.get()) != full.size())
        throw std::runtime_error("point encoding failed");
    auto h = hash(ByteView(full).subspan(1));
    return Address::from(h.view().subspan(12));
}

SigningKeyPair SigningKeyPair::from_secret(const SecretKey& sk)
{
    auto ctx = ec::ctx_new();
    auto d = ec::bn_from(sk.view());
    if (BN_is_zero(d.get()) || BN_cmp(d.get(), ec::order()) >= 0)
        throw CryptoError(CryptoErrc::malformed, "secret key out of range");
    auto p = ec::point_new();
    if (EC_POINT_mul(ec::group(), p.get(), d.get(), nullptr, nullptr, ctx.get()) != 1)
        throw std::runtime_error("scalar multiplication failed");
    SigningKeyPair kp;
    kp.secret = sk;
    kp.public_key = ec::compress(p.get(), ctx.get());
    kp.address = address_of(kp.public_key);
    return kp;
}

SigningKeyPair SigningKeyPair::generate(Rng& rng)
{
    return from_secret(ec::random_scalar(rng));
}

Signature sign_digest(const SecretKey& sk, const Hash32& digest)
{
    const BIGNUM* n = ec::order();
    auto ctx = ec::ctx_new();
    auto d = ec::bn_from(sk.view());
    auto z = ec::bn_from(digest.view());
    auto kb = detail::rfc6979_nonce(sk, digest);
    auto k = ec::bn_from(kb);

    auto R = ec::point_new();
    if (EC_POINT_mul(ec::group(), R.get(), k.get(), nullptr, nullptr, ctx.get()) != 1)
        throw std::runtime_error("scalar multiplication failed");
    auto rx = ec::x_coordinate(R.get(), ctx.get());
    auto r = ec::bn_from(rx);
    BN_nnmod(r.get(), r.get(), n, ctx.get());

    auto kinv = ec::bn_new();
    if (!BN_mod_inverse(kinv.get(), k.get(), n, ctx.get()))
        throw std::runtime_error("nonce inversion failed");
    auto s = ec::bn_new();
    BN_mod_mul(s.get(), r.get(), d.get(), n, ctx.get());
    BN_mod_add(s.get(), s.get(), z.get(), n, ctx.get());
    BN_mod_mul(s.get(), s.get(), kinv.get(), n, ctx.get());
    if (BN_is_zero(r.get()) || BN_is_zero(s.get()))
        throw std::runtime_error("degenerate signature");

    auto half = ec::bn_new();
    BN_rshift1(half.get(), n);
    if (BN_cmp(s.get(), half.get()) > 0)
        BN_sub(s.get(), n, s.get());

    Signature sig;
    ec::bn_to32(r.get(), sig.data());
    ec::bn_to32(s.get(), sig.data() + 32);
    return sig;
}

bool verify_digest(const PublicKey& pk, const Hash32& digest, const Signature& sig)
{
    const BIGNUM* n = ec::order();
    auto ctx = ec::ctx_new();
    auto q = ec::point_from(pk, ctx.get());
    if (!q)
        return false;
    auto r = ec::bn_from(sig.view().subspan(0, 32));
    auto s = ec::bn_from(sig.view().subspan(32, 32));
    auto half = ec::bn_new();
    BN_rshift1(half.get(), n);
    if (BN_is_zero(r.get()) || BN_is_zero(s.get()) || BN_cmp(r.get(), n) >= 0 || BN_cmp(s.get(), half.get()) > 0)
        return false;

    auto z = ec::bn_from(digest.view());
    auto w = ec::bn_new();
    if (!BN_mod_inverse(w.get(), s.get(), n, ctx.get()))
        return false;
    auto u1 = ec::bn_new();
    auto u2 = ec::bn_new();
    BN_mod_mul(u1.get(), z.get(), w.get(), n, ctx.get());
    BN_mod_mul(u2.get(), r.get(), w.get(), n, ctx.get());

    auto X = ec::point_new();
    if (EC_POINT_mul(ec::group(), X.get(), u1.get(), q.get(), u2.get(), ctx.get()) != 1)
        return false;
    if (EC_POINT_is_at_infinity(ec::group(), X.get()))
        return false;
    auto xb = ec::x_coordinate(X.get(), ctx.get());
    auto v = ec::bn_from(xb);
    BN_nnmod(v.get(), v.get(), n, ctx.get());
    return BN_cmp(v.get(), r.get()) == 0;
}

Signature sign(const SecretKey& sk, ByteView msg)
{
    return sign_digest(sk, hash(msg));
}

bool verify(const PublicKey& pk, ByteView msg, const Signature& sig)
{
    return verify_digest(pk, hash(msg), sig);
}

} // namespace wibson::crypto
