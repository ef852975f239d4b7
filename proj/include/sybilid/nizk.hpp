#pragma once

#include "sybilid/deployment.hpp"
#include "sybilid/merkle.hpp"

#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <vector>

namespace sybilid {

/// Named slots holding one or more field elements; ordered by name.
using SlotMap = std::map<std::string, FieldVector>;

inline constexpr std::size_t kUnbounded = std::numeric_limits<std::size_t>::max();

/// Arity bounds for one slot. With `paths` set, the arity counts Merkle paths of
/// 1 + depth elements each rather than single elements.
struct SlotSpec {
    std::string name;
    std::size_t min = 1;
    std::size_t max = 1;
    bool paths = false;
};

class ClauseContext {
public:
    ClauseContext(const Deployment& d, const SlotMap& statement, const SlotMap& witness, const SlotMap& verifier)
        : d_(d), statement_(statement), witness_(witness), verifier_(verifier) {}

    const Deployment& deployment() const noexcept { return d_; }
    /// Looks the name up in statement, witness, then verifier slots; empty if absent.
    const FieldVector& get(const std::string& name) const;
    /// Exactly one element; throws SchemaError otherwise.
    const FieldElement& one(const std::string& name) const;
    bool has(const std::string& name) const { return !get(name).empty(); }

private:
    const Deployment& d_;
    const SlotMap& statement_;
    const SlotMap& witness_;
    const SlotMap& verifier_;
};

struct Clause {
    std::string name;
    bool needs_verifier_witness = false; // evaluated only at verification
    std::function<bool(const ClauseContext&)> holds;
};

struct RelationDescriptor {
    std::string label;
    std::vector<SlotSpec> statement;
    std::vector<SlotSpec> witness;
    std::vector<SlotSpec> verifier;
    std::vector<Clause> clauses;
};

class RelationRegistry {
public:
    /// Every protocol relation, keyed by label.
    static const RelationRegistry& standard();

    /// Throws Conflict on a duplicate label.
    void add(RelationDescriptor relation);
    /// nullptr when unknown.
    const RelationDescriptor* find(const std::string& label) const;
    std::vector<std::string> labels() const;

private:
    std::map<std::string, RelationDescriptor> relations_;
};

struct ReferenceString {
    std::string relation;
    int version = 1;
};

struct Proof {
    std::string relation;
    std::string backend = "direct-check";
    SlotMap statement;
    std::string payload; // base64
};

/// Outcome of evaluating every clause directly; names the first failing clause.
struct ClauseReport {
    bool satisfied = true;
    std::string failed_clause;
};

/// Direct-check backend: the payload carries the witness and a digest of the statement;
/// verification re-evaluates every clause.
class Nizk {
public:
    explicit Nizk(DeploymentPtr deployment, const RelationRegistry& registry = RelationRegistry::standard());

    const Deployment& deployment() const noexcept { return *d_; }
    const RelationRegistry& registry() const noexcept { return *registry_; }

    /// Throws UnknownRelation.
    ReferenceString setup(const std::string& relation) const;

    /// Throws RelationMismatch, SchemaError (including any verifier-only slot in the
    /// witness) or UnsatisfiedRelation naming the failing clause.
    Proof prove(const ReferenceString& crs, const SlotMap& statement, const SlotMap& witness) const;

    /// Throws RelationMismatch when the proof is for another relation; every other defect rejects.
    bool verify(const ReferenceString& crs, const SlotMap& statement, const Proof& proof,
                const SlotMap& verifier_witness = {}) const;
    bool verify(const ReferenceString& crs, const Proof& proof, const SlotMap& verifier_witness = {}) const {
        return verify(crs, proof.statement, proof, verifier_witness);
    }

    /// Evaluates clauses without producing a proof. Verifier clauses run only if
    /// `include_verifier` is set. Schema violations are reported as a failure of "schema".
    ClauseReport check(const std::string& relation, const SlotMap& statement, const SlotMap& witness,
                       const SlotMap& verifier_witness, bool include_verifier) const;

    FieldElement statement_digest(const std::string& relation, const SlotMap& statement) const;

private:
    const RelationDescriptor& lookup(const std::string& relation) const;

    DeploymentPtr d_;
    const RelationRegistry* registry_;
};

/// Public slot of a proof; throws SchemaError when absent (or, for the single form, not of arity one).
const FieldVector& statement_slot(const Proof& proof, const std::string& name);
const FieldElement& statement_one(const Proof& proof, const std::string& name);

// Canonical JSON form: keys sorted, field elements as fixed-width hex.
std::string proof_to_json(const Deployment& d, const Proof& proof);
/// Throws EncodingError on malformed input.
Proof proof_from_json(const Deployment& d, const std::string& text);

std::string base64_encode(std::string_view bytes);
/// Throws EncodingError on malformed input.
std::string base64_decode(std::string_view text);

// Merkle paths inside slots: [index, sibling_0, ..., sibling_{d-1}].
FieldVector encode_path(const Deployment& d, const MerkleProof& proof);
std::optional<MerkleProof> decode_path(const Deployment& d, std::span<const FieldElement> packed);

} // namespace sybilid
