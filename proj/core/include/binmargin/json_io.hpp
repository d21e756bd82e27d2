#pragma once

#include <nlohmann/json.hpp>
#include <string>

#include "binmargin/analysis.hpp"
#include "binmargin/entropy.hpp"
#include "binmargin/exact_oracle.hpp"
#include "binmargin/margins.hpp"
#include "binmargin/table.hpp"

namespace binmargin {

using Json = nlohmann::ordered_json;

// Margins are {"r": [...], "c": [...]}; block parameters are
// {"n", "delta", "b", "c"}; tables are arrays of 0/1 rows.
void to_json(Json& j, const MarginPair& mp);
void from_json(const Json& j, MarginPair& mp);
void to_json(Json& j, const BlockParams& p);
void from_json(const Json& j, BlockParams& p);
void to_json(Json& j, const Cell& c);
void to_json(Json& j, const BinaryTable& t);
void to_json(Json& j, const TypicalTable& t);
void to_json(Json& j, const BlockSolution& s);
void to_json(Json& j, const LimitLaw& l);
void to_json(Json& j, const RegimeSet& r);
void to_json(Json& j, const UniformityReport& r);
void to_json(Json& j, const MarginalReport& r);
void to_json(Json& j, const JointReport& r);
void to_json(Json& j, const ExactJointReport& r);
void to_json(Json& j, const MomentReport& r);
void to_json(Json& j, const LlnReport& r);
void to_json(Json& j, const BlockFit& f);
void to_json(Json& j, const RateFit& f);

/// Reads a margins file. Throws InvalidArgument on I/O or format errors.
MarginPair read_margins_file(const std::string& path);

/// Decimal string of an exact count; JSON numbers cannot hold it losslessly.
std::string to_decimal(const BigInt& x);

/// Header and rows with one line per (n, block).
std::string marginal_csv_header();
std::string marginal_csv_rows(const MarginalReport& r);

}  // namespace binmargin
