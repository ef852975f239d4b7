#pragma once

#include "sybilid/credential.hpp"

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sybilid {

enum class CmpOp : std::uint8_t { Lt = 1, Le = 2, Eq = 3, Ne = 4, Ge = 5, Gt = 6 };

/// Expression over a single claim key: comparisons against constants, set
/// membership, and AND/OR combinations.
struct Predicate {
    enum class Kind : std::uint8_t { Compare = 1, In = 7, NotIn = 8, And = 9, Or = 10 };

    Kind kind = Kind::Compare;
    CmpOp op = CmpOp::Eq;
    std::string key;
    std::vector<std::string> constants; // one for Compare, the set for In/NotIn
    std::vector<Predicate> children;    // two for And/Or
};

/// Parses e.g. "age >= 18", "grade in {A,B,C}", "blood != AB", "age > 17 and age < 65".
/// Throws InvalidInput on syntax errors or when more than one claim key is referenced.
Predicate parse_predicate(std::string_view text);
std::string predicate_to_text(const Predicate& p);

/// A predicate with constants encoded for a claim schema. The encoding is the public
/// form carried in statements: [key digest, kind, node...].
struct BoundPredicate {
    std::string key;
    ClaimSchema schema;
    FieldVector encoding;
};

/// Throws InvalidInput for ordering comparisons on non-integer claims; EncodingError for
/// constants that do not encode under the schema.
BoundPredicate bind_predicate(const Deployment& d, const EnumRegistry& enums, const Predicate& p, const ClaimSchema& schema);

/// Evaluates an encoded predicate against an encoded claim. Malformed encodings and
/// key/kind mismatches evaluate to false.
bool evaluate_predicate(const Deployment& d, std::span<const FieldElement> encoding, const EncodedClaim& claim);

/// Key digest the encoding refers to; nullopt if the encoding is too short.
std::optional<FieldElement> predicate_key(std::span<const FieldElement> encoding);

} // namespace sybilid
