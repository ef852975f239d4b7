#include "sybilid/holder.hpp"

#include "sybilid/errors.hpp"
#include "sybilid/relations.hpp"

namespace sybilid {

FieldElement AssociationSecret::id_a(const Deployment& d) const {
    return association_id(d, ids, u_a);
}

FieldElement AssociationSecret::n_a(const Deployment& d) const {
    return association_nullifier(d, ids, u_a);
}

namespace {

// Path for the leaf if present; otherwise an all-zero path that no honest root accepts.
FieldVector path_or_dummy(const Deployment& d, const MerkleTree& tree, const FieldElement& leaf) {
    if (auto index = Vdr::find_leaf(tree, leaf)) return encode_path(d, tree.prove(*index));
    return FieldVector(static_cast<std::size_t>(d.protocol().tree_depth) + 1, d.field().zero());
}

std::optional<FieldElement> fresh_randomness(const Deployment& d, std::mt19937_64& rng) {
    if (!d.protocol().randomized_association) return std::nullopt;
    return d.field().random(rng);
}

FieldVector optional_slot(const std::optional<FieldElement>& x) {
    return x ? FieldVector{*x} : FieldVector{};
}

FieldVector association_path(const Nizk& nizk, const Vdr& vdr, const AssociationSecret& s) {
    const auto& d = nizk.deployment();
    return path_or_dummy(d, vdr.association_tree(), s.id_a(d));
}

} // namespace

Proof prove_registration(const Nizk& nizk, const Vdr& vdr, const Member& m) {
    const auto& d = nizk.deployment();
    if (m.sk.is_zero()) fail(ErrorCode::InvalidScalar, "secret key must be nonzero");
    FieldVector path = path_or_dummy(d, vdr.identity_tree(), identity_leaf(d, m.id, pubkey_of(d, m.sk)));
    SlotMap stmt{{"r_id", {vdr.identity_tree().root()}}, {"h_id", {registration_leaf(d, m.id, m.sk)}}};
    SlotMap wit{{"id", {m.id}}, {"sk", {m.sk}}, {"rho_id", path}};
    return nizk.prove(nizk.setup(rel::IdRegister), stmt, wit);
}

AssociationStep prove_association(const Nizk& nizk, const Vdr& vdr, const std::vector<Member>& members,
                                  std::mt19937_64& rng) {
    const auto& d = nizk.deployment();
    AssociationStep out;
    out.secret.u_a = fresh_randomness(d, rng);
    FieldVector sks, nulls, paths;
    for (const auto& m : members) {
        out.secret.ids.push_back(m.id);
        sks.push_back(m.sk);
        nulls.push_back(registration_nullifier(d, m.id, m.sk));
        auto p = path_or_dummy(d, vdr.registration_tree(), registration_leaf(d, m.id, m.sk));
        paths.insert(paths.end(), p.begin(), p.end());
    }
    SlotMap stmt{{"r_reg", {vdr.registration_tree().root()}}, {"id_a", {out.secret.id_a(d)}}, {"n_reg", nulls}};
    SlotMap wit{{"ids", out.secret.ids}, {"sks", sks}, {"rho_reg", paths}, {"u_a", optional_slot(out.secret.u_a)}};
    out.proof = nizk.prove(nizk.setup(rel::IdAssociate), stmt, wit);
    return out;
}

AssociationStep prove_append(const Nizk& nizk, const Vdr& vdr, const AssociationSecret& current, const Member& m,
                             std::mt19937_64& rng) {
    const auto& d = nizk.deployment();
    AssociationStep out;
    out.secret.ids = current.ids;
    out.secret.ids.push_back(m.id);
    out.secret.u_a = fresh_randomness(d, rng);
    SlotMap stmt{{"r_a", {vdr.association_tree().root()}},
                 {"r_reg", {vdr.registration_tree().root()}},
                 {"n_a", {current.n_a(d)}},
                 {"id_a_new", {out.secret.id_a(d)}},
                 {"n_reg_new", {registration_nullifier(d, m.id, m.sk)}}};
    SlotMap wit{{"ids", current.ids},
                {"rho_a", association_path(nizk, vdr, current)},
                {"u_a", optional_slot(current.u_a)},
                {"id_new", {m.id}},
                {"sk_new", {m.sk}},
                {"rho_reg", path_or_dummy(d, vdr.registration_tree(), registration_leaf(d, m.id, m.sk))},
                {"u_a_new", optional_slot(out.secret.u_a)}};
    out.proof = nizk.prove(nizk.setup(rel::IdAppend), stmt, wit);
    return out;
}

AssociationStep prove_aggregate(const Nizk& nizk, const Vdr& vdr, const AssociationSecret& first,
                                const AssociationSecret& second, std::mt19937_64& rng) {
    const auto& d = nizk.deployment();
    AssociationStep out;
    out.secret.ids = first.ids;
    out.secret.ids.insert(out.secret.ids.end(), second.ids.begin(), second.ids.end());
    out.secret.u_a = fresh_randomness(d, rng);
    SlotMap stmt{{"r_a", {vdr.association_tree().root()}},
                 {"n_a1", {first.n_a(d)}},
                 {"n_a2", {second.n_a(d)}},
                 {"id_a_new", {out.secret.id_a(d)}}};
    SlotMap wit{{"ids1", first.ids},
                {"rho_a1", association_path(nizk, vdr, first)},
                {"u_a1", optional_slot(first.u_a)},
                {"ids2", second.ids},
                {"rho_a2", association_path(nizk, vdr, second)},
                {"u_a2", optional_slot(second.u_a)},
                {"u_a_new", optional_slot(out.secret.u_a)}};
    out.proof = nizk.prove(nizk.setup(rel::IdAggregate), stmt, wit);
    return out;
}

AssociationStep prove_randomness_refresh(const Nizk& nizk, const Vdr& vdr, const AssociationSecret& current,
                                         std::mt19937_64& rng) {
    const auto& d = nizk.deployment();
    if (!current.u_a) fail(ErrorCode::UnsatisfiedRelation, "association carries no randomness to refresh");
    AssociationStep out;
    out.secret.ids = current.ids;
    out.secret.u_a = d.field().random(rng);
    SlotMap stmt{{"r_a", {vdr.association_tree().root()}}, {"n_a", {current.n_a(d)}}, {"id_a_new", {out.secret.id_a(d)}}};
    SlotMap wit{{"ids", current.ids},
                {"rho_a", association_path(nizk, vdr, current)},
                {"u_a", {*current.u_a}},
                {"u_a_new", {*out.secret.u_a}}};
    out.proof = nizk.prove(nizk.setup(rel::AssocRandRefresh), stmt, wit);
    return out;
}

Proof prove_key_refresh(const Nizk& nizk, const Vdr& vdr, const AssociationSecret& current, const FieldElement& id,
                        const FieldElement& sk_new) {
    const auto& d = nizk.deployment();
    if (sk_new.is_zero()) fail(ErrorCode::InvalidScalar, "secret key must be nonzero");
    bool randomized = d.protocol().randomized_association;
    SlotMap stmt{{"r_a", {vdr.association_tree().root()}},
                 {"n_a", {current.n_a(d)}},
                 {"id_H", {id}},
                 {"pk_new", d.group().to_fields(pubkey_of(d, sk_new))},
                 {"n_reg_new", {registration_nullifier(d, id, sk_new)}}};
    SlotMap wit{{"ids", current.ids}, {"rho_a", association_path(nizk, vdr, current)}, {"sk_new", {sk_new}}};
    if (randomized) {
        if (!current.u_a) fail(ErrorCode::UnsatisfiedRelation, "association carries no randomness");
        wit["u_a"] = {*current.u_a};
    }
    return nizk.prove(nizk.setup(randomized ? rel::KeyRefreshRand : rel::KeyRefresh), stmt, wit);
}

Proof prove_identifier_presentation(const Nizk& nizk, const Vdr& vdr, const AssociationSecret& current,
                                    const FieldElement& id, const FieldElement& campaign) {
    const auto& d = nizk.deployment();
    SlotMap stmt{{"r_a", {vdr.association_tree().root()}},
                 {"id_H", {id}},
                 {"id_eps", {campaign}},
                 {"n_a_eps", {campaign_association_nullifier(d, current.ids, campaign)}},
                 {"n_a", {current.n_a(d)}}};
    SlotMap wit{{"ids", current.ids}, {"rho_a", association_path(nizk, vdr, current)}, {"u_a", optional_slot(current.u_a)}};
    return nizk.prove(nizk.setup(rel::IdPresent), stmt, wit);
}

} // namespace sybilid
