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

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace wibson {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

std::string to_hex(ByteView data);
Bytes from_hex(std::string_view hex);

inline ByteView as_bytes(std::string_view s)
{
    return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

// Fixed-width opaque byte string with value semantics.
template <std::size_t N, typename Tag>
struct FixedBytes
{
    std::array<std::uint8_t, N> bytes{};

    static constexpr std::size_t size() { return N; }
    const std::uint8_t* data() const { return bytes.data(); }
    std::uint8_t* data() { return bytes.data(); }
    ByteView view() const { return {bytes.data(), N}; }
    std::string hex() const { return to_hex(view()); }
    bool is_zero() const
    {
        for (auto b : bytes)
            if (b != 0)
                return false;
        return true;
    }

    static FixedBytes from(ByteView src)
    {
        if (src.size() != N)
            throw std::invalid_argument("fixed-width value: expected " + std::to_string(N) + " bytes, got " +
                                        std::to_string(src.size()));
        FixedBytes out;
        std::copy(src.begin(), src.end(), out.bytes.begin());
        return out;
    }
    static FixedBytes from_hex(std::string_view h) { return from(wibson::from_hex(h)); }

    auto operator<=>(const FixedBytes&) const = default;
};

struct Hash32Tag {};
struct AddressTag {};
struct SymKeyTag {};

using Hash32 = FixedBytes<32, Hash32Tag>;
using Address = FixedBytes<20, AddressTag>;
using SymKey = FixedBytes<32, SymKeyTag>;

class DecodeError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Canonical length-prefixed binary encoding. All integers are big-endian.
class ByteWriter
{
public:
    ByteWriter& u8(std::uint8_t v);
    ByteWriter& u32(std::uint32_t v);
    ByteWriter& u64(std::uint64_t v);
    ByteWriter& i64(std::int64_t v) { return u64(static_cast<std::uint64_t>(v)); }
    ByteWriter& f64(double v);
    ByteWriter& boolean(bool v) { return u8(v ? 1 : 0); }
    ByteWriter& raw(ByteView data);
    ByteWriter& blob(ByteView data); // u32 length + bytes
    ByteWriter& str(std::string_view s) { return blob(as_bytes(s)); }
    template <std::size_t N, typename T>
    ByteWriter& fixed(const FixedBytes<N, T>& v)
    {
        return raw(v.view());
    }

    const Bytes& bytes() const& { return buf_; }
    Bytes bytes() && { return std::move(buf_); }

private:
    Bytes buf_;
};

class ByteReader
{
public:
    explicit ByteReader(ByteView data) : data_(data) {}

    std::uint8_t u8();
    std::uint32_t u32();
    std::uint64_t u64();
    std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
    double f64();
    bool boolean();
    ByteView raw(std::size_t n);
    Bytes blob();
    std::string str();
    template <typename F>
    F fixed()
    {
        return F::from(raw(F::size()));
    }

    std::size_t remaining() const { return data_.size() - pos_; }
    bool done() const { return remaining() == 0; }
    void expect_done() const
    {
        if (!done())
            throw DecodeError("trailing bytes after record");
    }

private:
    ByteView data_;
    std::size_t pos_ = 0;
};

void append_be32(Bytes& out, std::uint32_t v);

} // namespace wibson
