#pragma once

#include "sybilid/field.hpp"

namespace sybilid {

/// Group element of the order-p subgroup of Z_q^*, q = 2p + 1. Stored canonically.
struct GroupElement {
    U256 value;

    friend bool operator==(const GroupElement&, const GroupElement&) = default;
};

/// Quadratic-residue subgroup of a safe-prime group; generator 4, prime order p.
class SchnorrGroup {
public:
    /// Throws InvalidInput unless 2p+1 is prime.
    explicit SchnorrGroup(const PrimeField& field);

    const U256& q() const noexcept { return ctx_.modulus(); }
    GroupElement generator() const noexcept { return GroupElement{U256::from_u64(4)}; }

    GroupElement exp_generator(const FieldElement& k) const noexcept;
    GroupElement exp(const GroupElement& base, const FieldElement& k) const noexcept;
    GroupElement mul(const GroupElement& a, const GroupElement& b) const noexcept;
    /// 1 < x < q and x^p == 1.
    bool is_member(const GroupElement& x) const noexcept;

    /// Two field elements [x mod p, x div p]; x div p is at most 2.
    FieldVector to_fields(const GroupElement& x) const;
    /// Throws InvalidInput for encodings outside [0, q).
    GroupElement from_fields(const FieldElement& lo, const FieldElement& hi) const;

private:
    const PrimeField* field_;
    MontgomeryContext ctx_;
    U256 g_mont_;
};

} // namespace sybilid
