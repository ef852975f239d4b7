#pragma once

#include "sybilid/hash.hpp"

#include <cstdint>
#include <deque>
#include <optional>

namespace sybilid {

/// Sibling path from leaf to root; exactly `depth` entries.
struct MerkleProof {
    std::uint64_t index = 0;
    FieldVector siblings;

    friend bool operator==(const MerkleProof&, const MerkleProof&) = default;
};

/// padding[0] = h2(0, 0) is the empty leaf; padding[i+1] = h2(padding[i], padding[i]).
FieldVector padding_nodes(const Hasher& hasher, int depth);

bool verify_membership(const Hasher& hasher, int depth, const FieldElement& root, const FieldElement& leaf,
                       const MerkleProof& proof);

/// Fixed-depth, zero-padded, append-only Merkle tree.
///
/// The root is maintained through a frontier of `depth` left-hand nodes, so an append
/// costs `depth` compressions regardless of the number of leaves. Leaves are kept so
/// that membership proofs can be served for any index.
class MerkleTree {
public:
    MerkleTree(const Hasher& hasher, int depth);

    /// Batch construction; throws CapacityExceeded if leaves exceed 2^depth.
    static MerkleTree build(const Hasher& hasher, int depth, const FieldVector& leaves);

    int depth() const noexcept { return depth_; }
    std::uint64_t size() const noexcept { return leaves_.size(); }
    std::uint64_t capacity() const noexcept { return std::uint64_t{1} << depth_; }
    const FieldElement& root() const noexcept { return root_; }
    const FieldVector& leaves() const noexcept { return leaves_; }
    const FieldVector& frontier() const noexcept { return frontier_; }
    const FieldElement& empty_root() const noexcept { return padding_.back(); }

    /// Returns the index of the new leaf. Throws CapacityExceeded when full.
    std::uint64_t append(const FieldElement& leaf);
    /// Root the tree would have after appending `leaf`, without mutating.
    FieldElement peek_append_root(const FieldElement& leaf) const;
    /// Appends only if `claimed` is a valid proof for the new leaf under the new root;
    /// otherwise throws InvalidInput and leaves the tree untouched.
    std::uint64_t append_checked(const FieldElement& leaf, const MerkleProof& claimed);
    /// Replaces a leaf in place and recomputes root and frontier.
    void overwrite(std::uint64_t index, const FieldElement& leaf);

    /// Throws NotFound for index >= size().
    MerkleProof prove(std::uint64_t index) const;

private:
    void rebuild_from_leaves();
    const std::vector<FieldVector>& layers() const;

    const Hasher* hasher_;
    int depth_;
    FieldVector padding_;
    FieldVector leaves_;
    FieldVector frontier_;
    FieldElement root_;
    mutable std::optional<std::vector<FieldVector>> layers_;
};

/// The most recent roots of one tree; a verifier treats these as "recent".
class RootWindow {
public:
    explicit RootWindow(std::size_t capacity) : capacity_(capacity) {}

    void push(const FieldElement& root);
    /// Forget every prior root; only `root` remains acceptable.
    void reset(const FieldElement& root);
    bool contains(const FieldElement& root) const;

    std::size_t capacity() const noexcept { return capacity_; }
    const std::deque<FieldElement>& roots() const noexcept { return roots_; }

private:
    std::size_t capacity_;
    std::deque<FieldElement> roots_;
};

} // namespace sybilid
