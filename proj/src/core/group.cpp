#include "sybilid/group.hpp"

#include "sybilid/errors.hpp"

namespace sybilid {

namespace {

U256 safe_prime_of(const PrimeField& field) {
    U256 q = field.modulus();
    add_into(q, field.modulus());
    add_into(q, U256::from_u64(1));
    if (!is_probable_prime(q)) fail(ErrorCode::InvalidInput, "2p+1 is not prime; no Schnorr group for this field");
    return q;
}

} // namespace

SchnorrGroup::SchnorrGroup(const PrimeField& field)
    : field_(&field), ctx_(safe_prime_of(field)), g_mont_(ctx_.to_mont(U256::from_u64(4))) {}

GroupElement SchnorrGroup::exp_generator(const FieldElement& k) const noexcept {
    return GroupElement{ctx_.from_mont(ctx_.pow(g_mont_, k.value()))};
}

GroupElement SchnorrGroup::exp(const GroupElement& base, const FieldElement& k) const noexcept {
    return GroupElement{ctx_.from_mont(ctx_.pow(ctx_.to_mont(base.value), k.value()))};
}

GroupElement SchnorrGroup::mul(const GroupElement& a, const GroupElement& b) const noexcept {
    return GroupElement{ctx_.from_mont(ctx_.mul(ctx_.to_mont(a.value), ctx_.to_mont(b.value)))};
}

bool SchnorrGroup::is_member(const GroupElement& x) const noexcept {
    if (x.value <= U256::from_u64(1) || x.value >= q()) return false;
    U256 r = ctx_.pow(ctx_.to_mont(x.value), field_->modulus());
    return r == ctx_.one();
}

FieldVector SchnorrGroup::to_fields(const GroupElement& x) const {
    const U256& p = field_->modulus();
    U256 lo = x.value;
    std::uint64_t hi = 0;
    while (lo >= p) {
        sub_into(lo, p);
        ++hi;
    }
    return {field_->from_canonical(lo), field_->from_u64(hi)};
}

GroupElement SchnorrGroup::from_fields(const FieldElement& lo, const FieldElement& hi) const {
    const U256& h = hi.value();
    if (h > U256::from_u64(2)) fail(ErrorCode::InvalidInput, "group encoding high word out of range");
    U256 v = lo.value();
    for (std::uint64_t i = 0; i < h.limb[0]; ++i) add_into(v, field_->modulus());
    if (v >= q()) fail(ErrorCode::InvalidInput, "group encoding out of range");
    return GroupElement{v};
}

} // namespace sybilid
