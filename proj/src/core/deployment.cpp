#include "sybilid/deployment.hpp"

#include "sybilid/errors.hpp"

namespace sybilid {

Deployment::Deployment(const DeploymentOptions& options)
    : field_(options.modulus),
      hasher_(field_, options.hash.value_or(HashConfig::defaults_for(field_))),
      group_(field_),
      protocol_(options.protocol) {
    if (protocol_.tree_depth < 1 || protocol_.tree_depth > 32) fail(ErrorCode::InvalidInput, "tree depth must be 1..32");
    if (protocol_.root_window < 1) fail(ErrorCode::InvalidInput, "root window must be positive");
}

DeploymentPtr make_deployment(const DeploymentOptions& options) {
    return std::make_shared<const Deployment>(options);
}

} // namespace sybilid
