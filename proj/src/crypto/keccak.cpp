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

#include <array>
#include <bit>
#include <cstring>

namespace wibson::crypto {

namespace {

constexpr std::array<std::uint64_t, 24> kRoundConstants = {
    0x0000000000000001ULL, 0x0000000000008082ULL, 0x800000000000808aULL, 0x8000000080008000ULL,
    0x000000000000808bULL, 0x0000000080000001ULL, 0x8000000080008081ULL, 0x8000000000008009ULL,
    0x000000000000008aULL, 0x0000000000000088ULL, 0x0000000080008009ULL, 0x000000008000000aULL,
    0x000000008000808bULL, 0x800000000000008bULL, 0x8000000000008089ULL, 0x8000000000008003ULL,
    0x8000000000008002ULL, 0x8000000000000080ULL, 0x000000000000800aULL, 0x800000008000000aULL,
    0x8000000080008081ULL, 0x8000000000008080ULL, 0x0000000080000001ULL, 0x8000000080008008ULL,
};

// Rotation offsets and lane permutation for the combined rho/pi step.
constexpr std::array<int, 24> kRho = {1,  3,  6,  10, 15, 21, 28, 36, 45, 55, 2,  14,
                                      27, 41, 56, 8,  25, 43, 62, 18, 39, 61, 20, 44};
constexpr std::array<int, 24> kPi = {10, 7,  11, 17, 18, 3, 5,  16, 8,  21, 24, 4,
                                     15, 23, 19, 13, 12, 2, 20, 14, 22, 9,  6,  1};

void keccak_f1600(std::array<std::uint64_t, 25>& st)
{
    for (auto rc : kRoundConstants) {
        // theta
        std::array<std::uint64_t, 5> c{};
        for (int x = 0; x < 5; ++x)
            c[x] = st[x] ^ st[x + 5] ^ st[x + 10] ^ st[x + 15] ^ st[x + 20];
        for (int x = 0; x < 5; ++x) {
            auto d = c[(x + 4) % 5] ^ std::rotl(c[(x + 1) % 5], 1);
            for (int y = 0; y < 25; y += 5)
                st[y + x] ^= d;
        }
        // rho + pi
        auto cur = st[1];
        for (int i = 0; i < 24; ++i) {
            auto j = kPi[i];
            auto tmp = st[j];
            st[j] = std::rotl(cur, kRho[i]);
            cur = tmp;
        }
        // chi
        for (int y = 0; y < 25; y += 5) {
            std::array<std::uint64_t, 5> row;
            for (int x = 0; x < 5; ++x)
                row[x] = st[y + x];
            for (int x = 0; x < 5; ++x)
                st[y + x] = row[x] ^ (~row[(x + 1) % 5] & row[(x + 2) % 5]);
        }
        // iota
        st[0] ^= rc;
    }
}

std::uint64_t load_le64(const std::uint8_t* p)
{
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i)
        v = (v << 8) | p[i];
    return v;
}

} // namespace

namespace detail {

Hash32 sponge256(ByteView data, std::uint8_t domain)
{
    constexpr std::size_t rate = 136; // (1600 - 2*256) / 8
    std::array<std::uint64_t, 25> st{};

    auto absorb = [&st](const std::uint8_t* block) {
        for (std::size_t i = 0; i < rate / 8; ++i)
            st[i] ^= load_le64(block + 8 * i);
        keccak_f1600(st);
    };

    std::size_t off = 0;
    for (; data.size() - off >= rate; off += rate)
        absorb(data.data() + off);

    std::array<std::uint8_t, rate> last{};
    std::memcpy(last.data(), data.data() + off, data.size() - off);
    last[data.size() - off] ^= domain;
    last[rate - 1] ^= 0x80;
    absorb(last.data());

    Hash32 out;
    for (std::size_t i = 0; i < 32; ++i)
        out.bytes[i] = static_cast<std::uint8_t>(st[i / 8] >> (8 * (i % 8)));
    return out;
}

} // namespace detail

Hash32 hash(ByteView data)
{
    return detail::sponge256(data, 0x01);
}

Bytes lock_preimage(std::uint32_t notary_id, const SymKey& master_key)
{
    Bytes pre;
    pre.reserve(4 + SymKey::size());
    append_be32(pre, notary_id);
    pre.insert(pre.end(), master_key.bytes.begin(), master_key.bytes.end());
    return pre;
}

Lock make_lock(std::uint32_t notary_id, const SymKey& master_key)
{
    return Lock{hash(lock_preimage(notary_id, master_key))};
}

bool verify_lock(const Lock& lock, std::uint32_t notary_id, const SymKey& master_key)
{
    return make_lock(notary_id, master_key) == lock;
}

} // namespace wibson::crypto
