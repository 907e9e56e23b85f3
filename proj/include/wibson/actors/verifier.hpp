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

#include "wibson/exchange/exchange.hpp"

#include <map>
#include <string>
#include <vector>

namespace wibson::actors {

using exchange::DataStore;
using exchange::EntityRecords;
using exchange::Record;

/// Great-circle distance in km on a sphere of radius 6371 km.
double haversine_km(double lat1, double lon1, double lat2, double lon2);

/// Every submitted record must sit within `max_km` of each ground record
/// taken within `window` time units of it. Records read fields "lat" and
/// "lon". No temporal overlap passes.
bool verify_geolocation(const std::vector<Record>& ground, const std::vector<Record>& submitted, double max_km,
                        std::int64_t window);
/// Number of (ground, submitted) pairs that fall within the time window.
std::size_t geolocation_coverage(const std::vector<Record>& ground, const std::vector<Record>& submitted,
                                 std::int64_t window);

/// True iff every submitted record appears in the ground truth.
bool verify_subset(const std::vector<Record>& ground, const std::vector<Record>& submitted);

struct VerifierSpec
{
    enum class Kind
    {
        subset,
        geolocation,
    } kind = Kind::subset;
    double max_km = 5.0;
    std::int64_t window = 30;
};

/// Applies the per-entity verifier (subset when none is configured) to
/// every entity of a decoded payload.
bool verify_payload(const std::map<std::string, VerifierSpec>& specs, const DataStore& ground,
                    const std::vector<EntityRecords>& payload);

} // namespace wibson::actors
