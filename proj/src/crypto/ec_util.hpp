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

// Internal OpenSSL helpers shared by the signing and sealing code.

#include "wibson/crypto/crypto.hpp"

#include <openssl/bn.h>
#include <openssl/ec.h>

#include <memory>

namespace wibson::crypto::ec {

struct BnDeleter
{
    void operator()(BIGNUM* b) const { BN_clear_free(b); }
};
struct CtxDeleter
{
    void operator()(BN_CTX* c) const { BN_CTX_free(c); }
};
struct PointDeleter
{
    void operator()(EC_POINT* p) const { EC_POINT_clear_free(p); }
};

using BnPtr = std::unique_ptr<BIGNUM, BnDeleter>;
using CtxPtr = std::unique_ptr<BN_CTX, CtxDeleter>;
using PointPtr = std::unique_ptr<EC_POINT, PointDeleter>;

const EC_GROUP* group();
const BIGNUM* order();

BnPtr bn_from(ByteView be);
BnPtr bn_new();
void bn_to32(const BIGNUM* v, std::uint8_t* out);
CtxPtr ctx_new();
PointPtr point_new();
/// nullptr when the encoding is not a valid curve point.
PointPtr point_from(const PublicKey& pk, BN_CTX* ctx);
PublicKey compress(const EC_POINT* p, BN_CTX* ctx);
std::array<std::uint8_t, 32> x_coordinate(const EC_POINT* p, BN_CTX* ctx);
SecretKey random_scalar(Rng& rng);

} // namespace wibson::crypto::ec
