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

#include "wibson/crypto/bytes.hpp"

#include <bit>
#include <cstring>

namespace wibson {

std::string to_hex(ByteView data)
{
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(data.size() * 2);
    for (auto b : data) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0x0f]);
    }
    return out;
}

namespace {
int nibble(char c)
{
    if (c >= '0' && c <= '9')
        return c - '0';
    if (c >= 'a' && c <= 'f')
        return c - 'a' + 10;
    if (c >= 'A' && c <= 'F')
        return c - 'A' + 10;
    return -1;
}
} // namespace

Bytes from_hex(std::string_view hex)
{
    if (hex.starts_with("0x") || hex.starts_with("0X"))
        hex.remove_prefix(2);
    if (hex.size() % 2 != 0)
        throw std::invalid_argument("hex string has odd length");
    Bytes out(hex.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i) {
        int hi = nibble(hex[2 * i]);
        int lo = nibble(hex[2 * i + 1]);
        if (hi < 0 || lo < 0)
            throw std::invalid_argument("invalid hex digit");
        out[i] = static_cast<std::uint8_t>((hi << 4) | lo);
    }
    return out;
}

void append_be32(Bytes& out, std::uint32_t v)
{
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

ByteWriter& ByteWriter::u8(std::uint8_t v)
{
    buf_.push_back(v);
    return *this;
}

ByteWriter& ByteWriter::u32(std::uint32_t v)
{
    append_be32(buf_, v);
    return *this;
}

ByteWriter& ByteWriter::u64(std::uint64_t v)
{
    u32(static_cast<std::uint32_t>(v >> 32));
    return u32(static_cast<std::uint32_t>(v));
}

ByteWriter& ByteWriter::f64(double v)
{
    return u64(std::bit_cast<std::uint64_t>(v));
}

ByteWriter& ByteWriter::raw(ByteView data)
{
    buf_.insert(buf_.end(), data.begin(), data.end());
    return *this;
}

ByteWriter& ByteWriter::blob(ByteView data)
{
    if (data.size() > 0xffffffffu)
        throw std::length_error("blob too large");
    u32(static_cast<std::uint32_t>(data.size()));
    return raw(data);
}

ByteView ByteReader::raw(std::size_t n)
{
    if (remaining() < n)
        throw DecodeError("truncated record: need " + std::to_string(n) + " bytes, have " +
                          std::to_string(remaining()));
    auto out = data_.subspan(pos_, n);
    pos_ += n;
    return out;
}

std::uint8_t ByteReader::u8()
{
    return raw(1)[0];
}

std::uint32_t ByteReader::u32()
{
    auto b = raw(4);
    return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) | (std::uint32_t{b[2]} << 8) | b[3];
}

std::uint64_t ByteReader::u64()
{
    std::uint64_t hi = u32();
    return (hi << 32) | u32();
}

double ByteReader::f64()
{
    return std::bit_cast<double>(u64());
}

bool ByteReader::boolean()
{
    auto v = u8();
    if (v > 1)
        throw DecodeError("invalid boolean byte");
    return v == 1;
}

Bytes ByteReader::blob()
{
    auto n = u32();
    auto v = raw(n);
    return {v.begin(), v.end()};
}

std::string ByteReader::str()
{
    auto n = u32();
    auto v = raw(n);
    return {reinterpret_cast<const char*>(v.data()), v.size()};
}

} // namespace wibson
