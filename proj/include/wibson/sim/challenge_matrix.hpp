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

#include "wibson/sim/scenario.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace wibson::sim {

/// Shape of one payment as seen by the focal seller S0 among four sellers.
enum class PaymentShape : std::uint8_t
{
    focal_alone,    // payees {S0}
    focal_crowded,  // payees {S0, S1, S2, S3}
    others_only,    // payees {S1, S2, S3}
};

struct PaymentCase
{
    PaymentShape shape = PaymentShape::focal_alone;
    bool unlocked = true;
};

struct MatrixResult
{
    std::uint64_t sequences = 0;
    std::uint64_t cases = 0;
    std::uint64_t honest_cases = 0;
    std::uint64_t fraud_cases = 0;
    std::uint64_t failures = 0;
    /// Cases per strategy label.
    std::map<std::string, std::uint64_t> by_strategy;
    /// The first few failures, for diagnosis.
    std::vector<std::string> failure_samples;
};

/// Number of payment sequences of length 1..max_payments.
std::uint64_t matrix_sequence_count(std::size_t max_payments);

/// Plays every collect/challenge strategy over every payment sequence and
/// checks the settlement against the expected outcome: honest collects keep
/// the stake and are credited, fraudulent ones lose the stake and get nothing.
MatrixResult run_challenge_matrix(const MatrixSpec& spec);

/// One sequence only; used by tests.
MatrixResult run_matrix_sequence(const std::vector<PaymentCase>& payments, ledger::Amount per);

} // namespace wibson::sim
