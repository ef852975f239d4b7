#pragma once

#include "sybilid/field.hpp"
#include "sybilid/group.hpp"
#include "sybilid/hash.hpp"

#include <memory>
#include <optional>

namespace sybilid {

enum class ForwardingGuard : int {
    VerifierKey = 1, // proof binds pk_V; verifier supplies sk_V at verification
    Challenge = 2,   // proof binds a verifier-chosen challenge e_c
};

struct ProtocolConfig {
    int tree_depth = 16;
    std::size_t root_window = 64;
    /// id_a and n_a carry holder randomness u_a.
    bool randomized_association = true;
    /// Key refresh leaves n_a live unless this is set.
    bool consume_na_on_key_refresh = false;
    ForwardingGuard default_guard = ForwardingGuard::Challenge;
    bool mask_signature = false;
};

struct DeploymentOptions {
    U256 modulus = default_field_modulus();
    std::optional<HashConfig> hash;
    ProtocolConfig protocol;
};

/// Everything fixed once per deployment: the field, the hash instantiation, the
/// signature group and protocol knobs. Shared immutably by every ledger and actor.
class Deployment {
public:
    explicit Deployment(const DeploymentOptions& options);
    Deployment(const Deployment&) = delete;
    Deployment& operator=(const Deployment&) = delete;

    const PrimeField& field() const noexcept { return field_; }
    const Hasher& hasher() const noexcept { return hasher_; }
    const SchnorrGroup& group() const noexcept { return group_; }
    const ProtocolConfig& protocol() const noexcept { return protocol_; }

private:
    PrimeField field_;
    Hasher hasher_;
    SchnorrGroup group_;
    ProtocolConfig protocol_;
};

using DeploymentPtr = std::shared_ptr<const Deployment>;

DeploymentPtr make_deployment(const DeploymentOptions& options = {});

} // namespace sybilid
