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

#include "wibson/ledger/types.hpp"

#include <algorithm>

namespace wibson::ledger {

Bytes PayData::encode() const
{
    Bytes out;
    out.reserve(1 + body.size());
    out.push_back(bytes_per_id);
    out.insert(out.end(), body.begin(), body.end());
    return out;
}

PayData PayData::parse(ByteView raw)
{
    if (raw.empty())
        throw LedgerError(LedgerErrc::malformed_pay_data, "missing width header");
    PayData pd;
    pd.bytes_per_id = raw[0];
    pd.body.assign(raw.begin() + 1, raw.end());
    return pd;
}

PayData encode_pay_data(std::span<const AccountId> ids)
{
    if (ids.empty())
        throw LedgerError(LedgerErrc::empty_list);
    std::vector<AccountId> sorted(ids.begin(), ids.end());
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw LedgerError(LedgerErrc::duplicate_id);

    const AccountId max_id = sorted.back();
    std::uint8_t width = 1;
    while (width < 4 && (max_id >> (8 * width)) != 0)
        ++width;

    PayData pd;
    pd.bytes_per_id = width;
    pd.body.reserve(sorted.size() * width);
    for (auto id : sorted)
        for (int b = width - 1; b >= 0; --b)
            pd.body.push_back(static_cast<std::uint8_t>(id >> (8 * b)));
    return pd;
}

std::vector<AccountId> decode_pay_data(const PayData& pd)
{
    const auto width = pd.bytes_per_id;
    if (width < 1 || width > 4)
        throw LedgerError(LedgerErrc::malformed_pay_data, "width must be 1..4");
    if (pd.body.empty() || pd.body.size() % width != 0)
        throw LedgerError(LedgerErrc::malformed_pay_data, "body length is not a positive multiple of the width");

    std::vector<AccountId> ids;
    ids.reserve(pd.body.size() / width);
    for (std::size_t off = 0; off < pd.body.size(); off += width) {
        AccountId id = 0;
        for (std::size_t b = 0; b < width; ++b)
            id = (id << 8) | pd.body[off + b];
        if (!ids.empty() && id <= ids.back())
            throw LedgerError(LedgerErrc::malformed_pay_data, "ids are not strictly ascending");
        ids.push_back(id);
    }
    return ids;
}

} // namespace wibson::ledger
