// Copyright The tdinv Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef TDINV_SERIALIZATION_HPP
#define TDINV_SERIALIZATION_HPP

#include <string>
#include <json.hpp>
#include "tdinv/inversion.hpp"
#include "tdinv/rba.hpp"
#include "tdinv/sensitivity.hpp"

namespace tdinv
{

using Json = nlohmann::json;

Json ToJson(const RationalApproximant &approx);
RationalApproximant ApproximantFromJson(const Json &j);

Json ToJson(const Model &model);
Model ModelFromJson(const Json &j);

Json ToJson(const DataSet &data);
DataSet DataSetFromJson(const Json &j);

Json ToJson(const IterationRecord &rec);
Json ToJson(const InversionState &state);
InversionState StateFromJson(const Json &j);

Json ToJson(const SolveCounters &counters);
Json ToJson(const TaylorReport &report);

Json VectorToJson(const Vector &v);
Vector VectorFromJson(const Json &j);

// Doubles are written with round-trip precision.
void SaveJson(const Json &j, const std::string &path);
Json LoadJson(const std::string &path);

}  // namespace tdinv

#endif  // TDINV_SERIALIZATION_HPP
