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

#include "wibson/actors/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace wibson::actors {

namespace {

constexpr double kEarthRadiusKm = 6371.0;

bool coords(const Record& r, double& lat, double& lon)
{
    auto a = r.fields.find("lat");
    auto b = r.fields.find("lon");
    if (a == r.fields.end() || b == r.fields.end())
        return false;
    const auto* pa = std::get_if<double>(&a->second);
    const auto* pb = std::get_if<double>(&b->second);
    if (!pa || !pb)
        return false;
    lat = *pa;
    lon = *pb;
    return true;
}

bool within(std::int64_t a, std::int64_t b, std::int64_t window)
{
    const __int128 d = static_cast<__int128>(a) - b;
    return (d < 0 ? -d : d) <= window;
}

} // namespace

double haversine_km(double lat1, double lon1, double lat2, double lon2)
{
    constexpr double rad = std::numbers::pi / 180.0;
    const double dlat = (lat2 - lat1) * rad;
    const double dlon = (lon2 - lon1) * rad;
    const double h = std::sin(dlat / 2) * std::sin(dlat / 2) +
                     std::cos(lat1 * rad) * std::cos(lat2 * rad) * std::sin(dlon / 2) * std::sin(dlon / 2);
    return 2 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

bool verify_geolocation(const std::vector<Record>& ground, const std::vector<Record>& submitted, double max_km,
                        std::int64_t window)
{
    for (const auto& s : submitted) {
        double slat, slon;
        if (!coords(s, slat, slon))
            return false;
        for (const auto& g : ground) {
            if (!within(s.time, g.time, window))
                continue;
            double glat, glon;
            if (!coords(g, glat, glon) || haversine_km(glat, glon, slat, slon) > max_km)
                return false;
        }
    }
    return true;
}

std::size_t geolocation_coverage(const std::vector<Record>& ground, const std::vector<Record>& submitted,
                                 std::int64_t window)
{
    std::size_t n = 0;
    for (const auto& s : submitted)
        for (const auto& g : ground)
            n += within(s.time, g.time, window) ? 1 : 0;
    return n;
}

bool verify_subset(const std::vector<Record>& ground, const std::vector<Record>& submitted)
{
    std::vector<Record> sorted = ground;
    std::sort(sorted.begin(), sorted.end());
    return std::all_of(submitted.begin(), submitted.end(),
                       [&](const Record& r) { return std::binary_search(sorted.begin(), sorted.end(), r); });
}

bool verify_payload(const std::map<std::string, VerifierSpec>& specs, const DataStore& ground,
                    const std::vector<EntityRecords>& payload)
{
    static const std::vector<Record> none;
    for (const auto& e : payload) {
        auto g = ground.find(e.entity);
        const auto& truth = g == ground.end() ? none : g->second;
        auto s = specs.find(e.entity);
        const VerifierSpec spec = s == specs.end() ? VerifierSpec{} : s->second;
        const bool ok = spec.kind == VerifierSpec::Kind::geolocation
                            ? verify_geolocation(truth, e.records, spec.max_km, spec.window)
                            : verify_subset(truth, e.records);
        if (!ok)
            return false;
    }
    return true;
}

} // namespace wibson::actors
