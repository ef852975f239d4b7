#include "sybilid/merkle.hpp"

#include "sybilid/errors.hpp"

#include <algorithm>

namespace sybilid {

FieldVector padding_nodes(const Hasher& hasher, int depth) {
    const auto& f = hasher.field();
    FieldVector pad;
    pad.reserve(static_cast<std::size_t>(depth) + 1);
    pad.push_back(hasher.h2(f.zero(), f.zero()));
    for (int i = 0; i < depth; ++i) pad.push_back(hasher.h2(pad.back(), pad.back()));
    return pad;
}

bool verify_membership(const Hasher& hasher, int depth, const FieldElement& root, const FieldElement& leaf,
                       const MerkleProof& proof) {
    if (proof.siblings.size() != static_cast<std::size_t>(depth)) return false;
    if (depth < 64 && proof.index >= (std::uint64_t{1} << depth)) return false;
    FieldElement cur = leaf;
    for (int level = 0; level < depth; ++level) {
        const auto& sib = proof.siblings[static_cast<std::size_t>(level)];
        cur = ((proof.index >> level) & 1U) ? hasher.h2(sib, cur) : hasher.h2(cur, sib);
    }
    return cur == root;
}

MerkleTree::MerkleTree(const Hasher& hasher, int depth)
    : hasher_(&hasher), depth_(depth), padding_(padding_nodes(hasher, depth)) {
    if (depth < 1 || depth > 32) fail(ErrorCode::InvalidInput, "tree depth must be 1..32");
    frontier_.assign(static_cast<std::size_t>(depth), hasher.field().zero());
    root_ = padding_.back();
}

MerkleTree MerkleTree::build(const Hasher& hasher, int depth, const FieldVector& leaves) {
    MerkleTree t(hasher, depth);
    if (leaves.size() > t.capacity()) fail(ErrorCode::CapacityExceeded, "too many leaves for tree depth");
    t.leaves_ = leaves;
    t.rebuild_from_leaves();
    return t;
}

std::uint64_t MerkleTree::append(const FieldElement& leaf) {
    if (size() >= capacity()) fail(ErrorCode::CapacityExceeded, "merkle tree is full");
    std::uint64_t index = size();
    FieldElement cur = leaf;
    std::uint64_t idx = index;
    for (int level = 0; level < depth_; ++level, idx >>= 1) {
        auto lv = static_cast<std::size_t>(level);
        if ((idx & 1U) == 0) {
            frontier_[lv] = cur;
            cur = hasher_->h2(cur, padding_[lv]);
        } else {
            cur = hasher_->h2(frontier_[lv], cur);
        }
    }
    root_ = cur;
    leaves_.push_back(leaf);
    layers_.reset();
    return index;
}

FieldElement MerkleTree::peek_append_root(const FieldElement& leaf) const {
    if (size() >= capacity()) fail(ErrorCode::CapacityExceeded, "merkle tree is full");
    FieldElement cur = leaf;
    std::uint64_t idx = size();
    for (int level = 0; level < depth_; ++level, idx >>= 1) {
        auto lv = static_cast<std::size_t>(level);
        cur = (idx & 1U) == 0 ? hasher_->h2(cur, padding_[lv]) : hasher_->h2(frontier_[lv], cur);
    }
    return cur;
}

std::uint64_t MerkleTree::append_checked(const FieldElement& leaf, const MerkleProof& claimed) {
    FieldElement next = peek_append_root(leaf);
    if (claimed.index != size() || !verify_membership(*hasher_, depth_, next, leaf, claimed)) {
        fail(ErrorCode::InvalidInput, "submitted update path does not match the tree");
    }
    return append(leaf);
}

void MerkleTree::overwrite(std::uint64_t index, const FieldElement& leaf) {
    if (index >= size()) fail(ErrorCode::NotFound, "leaf index out of range");
    leaves_[index] = leaf;
    rebuild_from_leaves();
}

void MerkleTree::rebuild_from_leaves() {
    layers_.reset();
    const auto& ls = layers();
    root_ = ls.back().empty() ? padding_.back() : ls.back().front();
    // Frontier entry at a level is the last left child written there, i.e. the node
    // at the largest even index not exceeding the last occupied position.
    frontier_.assign(static_cast<std::size_t>(depth_), hasher_->field().zero());
    if (leaves_.empty()) return;
    std::uint64_t last = size() - 1;
    for (int level = 0; level < depth_; ++level, last >>= 1) {
        std::uint64_t left = last & ~std::uint64_t{1};
        frontier_[static_cast<std::size_t>(level)] = ls[static_cast<std::size_t>(level)][left];
    }
}

const std::vector<FieldVector>& MerkleTree::layers() const {
    if (layers_) return *layers_;
    std::vector<FieldVector> ls;
    ls.reserve(static_cast<std::size_t>(depth_) + 1);
    ls.push_back(leaves_);
    for (int level = 0; level < depth_; ++level) {
        const auto& below = ls.back();
        FieldVector up;
        up.reserve((below.size() + 1) / 2);
        for (std::size_t i = 0; i < below.size(); i += 2) {
            const FieldElement& right = i + 1 < below.size() ? below[i + 1] : padding_[static_cast<std::size_t>(level)];
            up.push_back(hasher_->h2(below[i], right));
        }
        ls.push_back(std::move(up));
    }
    layers_ = std::move(ls);
    return *layers_;
}

MerkleProof MerkleTree::prove(std::uint64_t index) const {
    if (index >= size()) fail(ErrorCode::NotFound, "leaf index out of range");
    const auto& ls = layers();
    MerkleProof proof;
    proof.index = index;
    std::uint64_t idx = index;
    for (int level = 0; level < depth_; ++level, idx >>= 1) {
        const auto& layer = ls[static_cast<std::size_t>(level)];
        std::uint64_t sib = idx ^ 1U;
        proof.siblings.push_back(sib < layer.size() ? layer[sib] : padding_[static_cast<std::size_t>(level)]);
    }
    return proof;
}

void RootWindow::push(const FieldElement& root) {
    if (!roots_.empty() && roots_.back() == root) return;
    roots_.push_back(root);
    while (roots_.size() > capacity_) roots_.pop_front();
}

void RootWindow::reset(const FieldElement& root) {
    roots_.clear();
    roots_.push_back(root);
}

bool RootWindow::contains(const FieldElement& root) const {
    return std::find(roots_.begin(), roots_.end(), root) != roots_.end();
}

} // namespace sybilid
