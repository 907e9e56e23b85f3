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

#include <openssl/evp.h>

#include <memory>

namespace wibson::crypto {

const char* to_string(CryptoErrc code)
{
    switch (code) {
    case CryptoErrc::authentication_failure:
        return "AuthenticationFailure";
    case CryptoErrc::signature_invalid:
        return "SignatureInvalid";
    case CryptoErrc::malformed:
        return "Malformed";
    }
    return "Unknown";
}

namespace {

struct CipherCtxDeleter
{
    void operator()(EVP_CIPHER_CTX* c) const { EVP_CIPHER_CTX_free(c); }
};
using CipherCtx = std::unique_ptr<EVP_CIPHER_CTX, CipherCtxDeleter>;

CipherCtx new_ctx()
{
    CipherCtx ctx(EVP_CIPHER_CTX_new());
    if (!ctx)
        throw std::bad_alloc();
    return ctx;
}

[[noreturn]] void auth_failure()
{
    throw CryptoError(CryptoErrc::authentication_failure, "ciphertext failed authentication");
}

} // namespace

Bytes Ciphertext::encode() const
{
    Bytes out;
    out.reserve(nonce.size() + tag.size() + body.size());
    out.insert(out.end(), nonce.begin(), nonce.end());
    out.insert(out.end(), tag.begin(), tag.end());
    out.insert(out.end(), body.begin(), body.end());
    return out;
}

Ciphertext Ciphertext::decode(ByteView data)
{
    Ciphertext ct;
    if (data.size() < ct.nonce.size() + ct.tag.size())
        auth_failure();
    std::copy_n(data.begin(), ct.nonce.size(), ct.nonce.begin());
    std::copy_n(data.begin() + ct.nonce.size(), ct.tag.size(), ct.tag.begin());
    ct.body.assign(data.begin() + ct.nonce.size() + ct.tag.size(), data.end());
    return ct;
}

Ciphertext sym_encrypt(const SymKey& key, ByteView plaintext, Rng& rng)
{
    Ciphertext ct;
    rng.fill(ct.nonce);
    ct.body.resize(plaintext.size());

    auto ctx = new_ctx();
    int len = 0;
    if (EVP_EncryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, key.data(), ct.nonce.data()) != 1)
        throw std::runtime_error("AES-GCM init failed");
    if (!plaintext.empty() &&
        EVP_EncryptUpdate(ctx.get(), ct.body.data(), &len, plaintext.data(), static_cast<int>(plaintext.size())) != 1)
        throw std::runtime_error("AES-GCM encrypt failed");
    if (EVP_EncryptFinal_ex(ctx.get(), ct.body.data() + len, &len) != 1)
        throw std::runtime_error("AES-GCM finalize failed");
    if (EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_GET_TAG, static_cast<int>(ct.tag.size()), ct.tag.data()) != 1)
        throw std::runtime_error("AES-GCM tag extraction failed");
    return ct;
}

Bytes sym_decrypt(const SymKey& key, const Ciphertext& ct)
{
    Bytes out(ct.body.size());
    auto ctx = new_ctx();
    int len = 0;
    if (EVP_DecryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, key.data(), ct.nonce.data()) != 1)
        throw std::runtime_error("AES-GCM init failed");
    if (!ct.body.empty() &&
        EVP_DecryptUpdate(ctx.get(), out.data(), &len, ct.body.data(), static_cast<int>(ct.body.size())) != 1)
        auth_failure();
    auto tag = ct.tag;
    if (EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_TAG, static_cast<int>(tag.size()), tag.data()) != 1)
        auth_failure();
    if (EVP_DecryptFinal_ex(ctx.get(), out.data() + len, &len) != 1)
        auth_failure();
    return out;
}

} // namespace wibson::crypto
