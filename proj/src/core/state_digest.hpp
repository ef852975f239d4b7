#pragma once

#include "sybilid/hash.hpp"
#include "sybilid/merkle.hpp"

#include <set>
#include <string_view>

namespace sybilid::detail {

// Accumulates the public state of one ledger into a single field element.
class StateDigestBuilder {
public:
    StateDigestBuilder(const Hasher& h, std::string_view kind) : h_(h) { in_.push_back(h.hash_bytes(kind, Site::StateDigest)); }

    void add(const FieldElement& x) { in_.push_back(x); }
    void add_count(std::uint64_t n) { in_.push_back(h_.field().from_u64(n)); }
    void add_tree(const MerkleTree& t) {
        add(t.root());
        add_count(t.size());
    }
    void add_window(const RootWindow& w) {
        add_count(w.roots().size());
        for (const auto& r : w.roots()) add(r);
    }
    void add_set(const std::set<FieldElement>& s) {
        add_count(s.size());
        for (const auto& x : s) add(x);
    }
    FieldElement finish() const { return h_.h1(in_, Site::StateDigest); }

private:
    const Hasher& h_;
    FieldVector in_;
};

} // namespace sybilid::detail
