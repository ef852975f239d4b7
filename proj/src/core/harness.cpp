#include "sybilid/harness.hpp"

#include "sybilid/campaign.hpp"
#include "sybilid/errors.hpp"
#include "sybilid/holder.hpp"
#include "sybilid/presentation.hpp"
#include "sybilid/relations.hpp"
#include "state_digest.hpp"

#include <nlohmann/json.hpp>

#include <charconv>
#include <cstdlib>
#include <functional>
#include <set>
#include <sstream>

namespace sybilid::harness {

using nlohmann::json;

namespace {

const std::set<std::string> kVerbs = {
    "keygen",   "publish",   "issue",  "present",          "forward",     "register",           "associate",
    "append",   "aggregate", "refresh-randomness",         "refresh-key", "revoke",             "refresh-revocation",
    "open-campaign",         "present-campaign",           "block",       "submit",             "snapshot"};

[[noreturn]] void script_error(std::size_t line, const std::string& what) {
    fail(ErrorCode::ScriptError, "line " + std::to_string(line) + ": " + what);
}

std::vector<std::string> tokenize(std::string_view s, std::size_t line) {
    std::vector<std::string> out;
    std::string cur;
    bool in_token = false, quoted = false;
    for (char c : s) {
        if (quoted) {
            if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
            continue;
        }
        if (c == '#' && !in_token) break;
        if (c == ' ' || c == '\t' || c == '\r') {
            if (in_token) out.push_back(std::move(cur));
            cur.clear();
            in_token = false;
            continue;
        }
        in_token = true;
        if (c == '"') {
            quoted = true;
        } else {
            cur += c;
        }
    }
    if (quoted) script_error(line, "unterminated quote");
    if (in_token) out.push_back(std::move(cur));
    return out;
}

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::uint64_t parse_u64(const std::string& v, std::size_t line) {
    std::uint64_t out = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size()) script_error(line, "expected an unsigned integer, got '" + v + "'");
    return out;
}

bool parse_flag(const std::string& v, std::size_t line) {
    if (v == "yes" || v == "true" || v == "1") return true;
    if (v == "no" || v == "false" || v == "0") return false;
    script_error(line, "expected yes or no, got '" + v + "'");
}

ForwardingGuard parse_guard(const std::string& v, std::size_t line) {
    if (v == "challenge") return ForwardingGuard::Challenge;
    if (v == "key") return ForwardingGuard::VerifierKey;
    script_error(line, "guard must be challenge or key");
}

std::string guard_name(ForwardingGuard g) {
    return g == ForwardingGuard::Challenge ? "challenge" : "key";
}

// An option key is a bare word; claim arguments such as `age:int=25` stay positional.
bool is_option(const std::string& tok) {
    auto eq = tok.find('=');
    if (eq == std::string::npos || eq == 0) return false;
    return tok.find(':') > eq || tok.find(':') == std::string::npos;
}

void apply_config(Script& s, const std::vector<std::string>& tokens, std::size_t line) {
    auto& p = s.deployment.protocol;
    for (std::size_t i = 1; i < tokens.size(); ++i) {
        auto eq = tokens[i].find('=');
        if (eq == std::string::npos) script_error(line, "config expects key=value");
        std::string key = tokens[i].substr(0, eq), value = tokens[i].substr(eq + 1);
        if (key == "depth") {
            p.tree_depth = static_cast<int>(parse_u64(value, line));
        } else if (key == "window") {
            p.root_window = parse_u64(value, line);
        } else if (key == "randomized") {
            p.randomized_association = parse_flag(value, line);
        } else if (key == "consume-na") {
            p.consume_na_on_key_refresh = parse_flag(value, line);
        } else if (key == "mask") {
            p.mask_signature = parse_flag(value, line);
        } else if (key == "guard") {
            p.default_guard = parse_guard(value, line);
        } else if (key == "modulus") {
            try {
                s.deployment.modulus = U256::from_hex(value);
            } catch (const std::exception&) {
                script_error(line, "bad modulus");
            }
        } else {
            script_error(line, "unknown config key '" + key + "'");
        }
    }
}

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// ---------------------------------------------------------------------------

struct IdentEntry {
    std::string owner;
    FieldElement id;
    FieldElement sk;
    std::vector<FieldElement> previous_sks;
};

struct CredEntry {
    std::string issuer;
    std::string holder;
    Credential cred;
};

struct PresentationEntry {
    PresentationBundle bundle;
    std::string credential;
    std::string predicate;
    ForwardingGuard guard;
};

struct Pending {
    std::string actor;
    json transcript;
    std::function<void()> submit;
};

class World {
public:
    World(DeploymentPtr d, std::uint64_t seed) : d_(d), nizk_(d), vdr_(d), nobody_(d, d->field().zero()), seed_(seed) {}

    const Deployment& d() const { return *d_; }

    FieldElement digest() const {
        const auto& h = d_->hasher();
        detail::StateDigestBuilder b(h, "world");
        b.add(vdr_.state_digest());
        b.add_count(issuers_.size());
        for (const auto& [name, ledger] : issuers_) {
            b.add(h.hash_bytes(name, Site::StateDigest));
            b.add(ledger.state_digest());
        }
        b.add_count(campaigns_.size());
        for (const auto& [name, c] : campaigns_) {
            b.add(h.hash_bytes(name, Site::StateDigest));
            b.add(c.state_digest(h));
        }
        return b.finish();
    }

    RegistryStats stats() const {
        RegistryStats s;
        s.identity_leaves = vdr_.identity_tree().size();
        s.registration_leaves = vdr_.registration_tree().size();
        s.association_leaves = vdr_.association_tree().size();
        s.identity_records = vdr_.records().size();
        s.registration_nullifiers = vdr_.registration_nullifiers().size();
        s.association_nullifiers = vdr_.association_nullifiers().size();
        s.blocked = vdr_.blocked().size();
        s.key_refreshes = vdr_.key_refreshes();
        for (const auto& [name, l] : issuers_) {
            s.issuer_leaves[name] = l.tree().size();
            s.revocation_buckets[name] = l.bucket().size();
        }
        for (const auto& [name, c] : campaigns_) {
            s.campaign_credential_nullifiers[name] = c.credential_nullifiers().size();
            s.campaign_association_nullifiers[name] = c.association_nullifiers().size();
        }
        return s;
    }

    std::map<std::string, std::string> credentials() const {
        std::map<std::string, std::string> out;
        for (const auto& [name, c] : creds_) out[name] = credential_to_text(*d_, c.cred);
        return out;
    }

    /// Protocol rejections propagate as ProtocolError; broken references as ScriptError.
    void execute(const ScriptAction& a, json& transcript, std::string& actor) {
        line_ = a.line;
        const std::string& v = a.verb;
        if (v == "keygen") return keygen(a, actor);
        if (v == "publish") return publish(a, transcript, actor);
        if (v == "issue") return issue(a, transcript, actor);
        if (v == "present") return present_action(a, transcript, actor);
        if (v == "forward") return forward(a, transcript, actor);
        if (v == "revoke") return revoke(a, transcript, actor);
        if (v == "open-campaign") return open_campaign(a, transcript, actor);
        if (v == "block") return block(a, transcript, actor);
        if (v == "snapshot") {
            actor = "observer";
            return;
        }
        if (v == "submit") {
            need_args(a, 1);
            auto it = pending_.find(a.args[0]);
            if (it == pending_.end()) script_error(line_, "no stored submission '" + a.args[0] + "'");
            actor = it->second.actor;
            transcript = it->second.transcript;
            it->second.submit();
            return;
        }
        Pending p = build(a);
        actor = p.actor;
        transcript = p.transcript;
        bool hold = a.options.count("hold") && parse_flag(a.options.at("hold"), line_);
        if (hold && !a.options.count("as")) script_error(line_, "hold needs as=<name>");
        if (a.options.count("as")) pending_[a.options.at("as")] = p;
        if (!hold) p.submit();
    }

private:
    std::mt19937_64& rng(const std::string& actor) {
        auto it = rngs_.find(actor);
        if (it == rngs_.end()) it = rngs_.emplace(actor, std::mt19937_64(seed_ ^ fnv1a(actor))).first;
        return it->second;
    }

    void need_args(const ScriptAction& a, std::size_t n) const {
        if (a.args.size() < n) script_error(line_, a.verb + " needs " + std::to_string(n) + " argument(s)");
    }

    const std::string& opt(const ScriptAction& a, const std::string& key) const {
        auto it = a.options.find(key);
        if (it == a.options.end()) script_error(line_, a.verb + " needs " + key + "=");
        return it->second;
    }

    std::string opt_or(const ScriptAction& a, const std::string& key, const std::string& fallback) const {
        auto it = a.options.find(key);
        return it == a.options.end() ? fallback : it->second;
    }

    // `name` or `name~k`, k counting back from the current version.
    static std::pair<std::string, std::size_t> split_version(const std::string& ref) {
        auto t = ref.find('~');
        if (t == std::string::npos) return {ref, 0};
        return {ref.substr(0, t), static_cast<std::size_t>(std::stoul(ref.substr(t + 1)))};
    }

    IdentEntry& ident(const std::string& name) {
        auto it = idents_.find(name);
        if (it == idents_.end()) script_error(line_, "unknown identifier '" + name + "'");
        return it->second;
    }

    FieldElement key_of(const std::string& ref) {
        auto [name, back] = split_version(ref);
        auto& e = ident(name);
        if (back == 0) return e.sk;
        if (back > e.previous_sks.size()) script_error(line_, "identifier '" + name + "' has no key ~" + std::to_string(back));
        return e.previous_sks[e.previous_sks.size() - back];
    }

    const AssociationSecret& association(const std::string& ref) {
        auto [name, back] = split_version(ref);
        auto it = holders_.find(name);
        if (it == holders_.end() || it->second.empty()) script_error(line_, "holder '" + name + "' has no association");
        if (back >= it->second.size()) script_error(line_, "holder '" + name + "' has no version ~" + std::to_string(back));
        return it->second[it->second.size() - 1 - back];
    }

    CredEntry& credential(const std::string& name) {
        auto it = creds_.find(name);
        if (it == creds_.end()) script_error(line_, "unknown credential '" + name + "'");
        return it->second;
    }

    IssuerLedger& ledger_of(const std::string& issuer) {
        auto it = issuers_.find(issuer);
        if (it == issuers_.end()) {
            it = issuers_.emplace(issuer, IssuerLedger(d_, ident(issuer).id)).first;
        }
        return it->second;
    }

    Identity identity(const std::string& name) {
        auto& e = ident(name);
        return Identity{e.id, KeyPair{e.sk, pubkey_of(*d_, e.sk)}};
    }

    std::string hex(const FieldElement& x) const { return d_->field().to_hex(x); }
    json proof_json(const Proof& p) const { return json::parse(proof_to_json(*d_, p)); }

    void keygen(const ScriptAction& a, std::string& actor) {
        need_args(a, 2);
        actor = a.args[0];
        if (idents_.count(a.args[1])) script_error(line_, "identifier '" + a.args[1] + "' already exists");
        auto& r = rng(actor);
        FieldElement id = d_->field().random(r);
        FieldElement sk = sybilid::keygen(*d_, r).sk;
        idents_.emplace(a.args[1], IdentEntry{actor, id, sk, {}});
    }

    void publish(const ScriptAction& a, json& t, std::string& actor) {
        need_args(a, 1);
        auto& e = ident(a.args[0]);
        actor = e.owner;
        PublicKey pk = pubkey_of(*d_, a.options.count("key") ? key_of(a.options.at("key")) : e.sk);
        t["id"] = hex(e.id);
        t["pk"] = encode_public_key(*d_, pk);
        vdr_.publish_identifier(e.id, pk);
    }

    void issue(const ScriptAction& a, json& t, std::string& actor) {
        need_args(a, 2);
        const std::string& issuer = a.args[0];
        const std::string& name = a.args[1];
        if (creds_.count(name)) script_error(line_, "credential '" + name + "' already exists");
        auto& holder = ident(opt(a, "holder"));
        actor = ident(issuer).owner;
        std::vector<Claim> claims;
        for (std::size_t i = 2; i < a.args.size(); ++i) {
            const auto& arg = a.args[i];
            auto colon = arg.find(':'), eq = arg.find('=');
            if (colon == std::string::npos || eq == std::string::npos || eq < colon) {
                script_error(line_, "claims are written key:kind=value");
            }
            ClaimValue value;
            std::string kind = arg.substr(colon + 1, eq - colon - 1);
            std::string text = arg.substr(eq + 1);
            if (kind == "int") {
                value.kind = ClaimKind::Int;
                try {
                    value.integer = std::stoll(text);
                } catch (const std::exception&) {
                    script_error(line_, "bad integer claim '" + text + "'");
                }
            } else if (kind == "string") {
                value.kind = ClaimKind::String;
                value.text = text;
            } else {
                value.kind = ClaimKind::Enum;
                value.table = kind;
                value.text = text;
            }
            claims.push_back(make_claim(*d_, enums_, arg.substr(0, colon), value));
        }
        auto& ledger = ledger_of(opt_or(a, "ledger", issuer));
        Credential cred = issue_credential(*d_, identity(issuer), holder.id, std::move(claims), ledger, rng(actor));
        t["issuer"] = hex(cred.issuer_id);
        t["r_rv"] = hex(ledger.tree().root());
        creds_.emplace(name, CredEntry{issuer, opt(a, "holder"), std::move(cred)});
    }

    VerifierContext context_for(const std::string& verifier, ForwardingGuard guard) {
        auto& v = ident(verifier);
        VerifierContext ctx;
        ctx.guard = guard;
        if (guard == ForwardingGuard::Challenge) {
            ctx.challenge = d_->field().random(rng(v.owner));
        } else {
            ctx.pk_V = pubkey_of(*d_, v.sk);
        }
        return ctx;
    }

    VerifierPolicy policy_for(const std::string& verifier, const VerifierContext& ctx, const CredEntry& c,
                              const std::string& predicate) {
        Predicate p = parse_predicate(predicate);
        const Claim* claim = c.cred.find(p.key);
        ClaimSchema schema = claim ? ClaimSchema{claim->value.kind, claim->value.table} : ClaimSchema{};
        VerifierPolicy policy{bind_predicate(*d_, enums_, p, schema).encoding, ctx, std::nullopt};
        if (ctx.guard == ForwardingGuard::VerifierKey) policy.sk_V = ident(verifier).sk;
        return policy;
    }

    json bundle_json(const PresentationBundle& b) const {
        return json{{"credential", proof_json(b.credential)}, {"validity", proof_json(b.validity)}};
    }

    void present_action(const ScriptAction& a, json& t, std::string& actor) {
        need_args(a, 1);
        auto& c = credential(opt(a, "cred"));
        actor = ident(c.holder).owner;
        const std::string& verifier = opt(a, "verifier");
        std::string predicate = opt(a, "predicate");
        ForwardingGuard guard = a.options.count("guard") ? parse_guard(a.options.at("guard"), line_) : d_->protocol().default_guard;
        PresentOptions po;
        po.mask_signature = a.options.count("mask") ? parse_flag(a.options.at("mask"), line_) : d_->protocol().mask_signature;
        VerifierContext ctx = context_for(verifier, guard);
        FieldElement sk = key_of(opt_or(a, "key", c.holder));
        auto p = present(nizk_, enums_, c.cred, parse_predicate(predicate), sk, ctx, vdr_, ledger_of(c.issuer),
                         rng(actor), po);
        t = bundle_json(p.bundle);
        presentations_[a.args[0]] = PresentationEntry{p.bundle, opt(a, "cred"), predicate, guard};
        verify_presentation(nizk_, p.bundle, vdr_, ledger_of(c.issuer),
                            policy_for(verifier, ctx, c, opt_or(a, "require", predicate)));
    }

    void forward(const ScriptAction& a, json& t, std::string& actor) {
        need_args(a, 1);
        auto it = presentations_.find(a.args[0]);
        if (it == presentations_.end()) script_error(line_, "unknown presentation '" + a.args[0] + "'");
        const auto& entry = it->second;
        const std::string& verifier = opt(a, "verifier");
        actor = ident(verifier).owner;
        auto& c = credential(entry.credential);
        VerifierContext ctx = context_for(verifier, entry.guard);
        t = bundle_json(entry.bundle);
        verify_presentation(nizk_, entry.bundle, vdr_, ledger_of(c.issuer), policy_for(verifier, ctx, c, entry.predicate));
    }

    void revoke(const ScriptAction& a, json& t, std::string& actor) {
        need_args(a, 2);
        auto& acting = ident(a.args[0]);
        actor = acting.owner;
        auto& c = credential(a.args[1]);
        FieldElement digest = c.cred.digest(*d_);
        t["n_rv"] = hex(revocation_nullifier(*d_, digest, c.cred.u_rv));
        ledger_of(c.issuer).revoke(acting.id, digest, c.cred.u_rv);
    }

    void open_campaign(const ScriptAction& a, json& t, std::string& actor) {
        need_args(a, 1);
        if (campaigns_.count(a.args[0])) script_error(line_, "campaign '" + a.args[0] + "' already exists");
        const std::string& verifier = opt(a, "verifier");
        actor = ident(verifier).owner;
        Campaign c = Campaign::open(*d_, ident(verifier).id, rng(actor));
        t["id_eps"] = hex(c.id());
        t["id_V"] = hex(c.verifier_id());
        campaigns_.emplace(a.args[0], c);
        campaign_verifiers_[a.args[0]] = verifier;
    }

    void block(const ScriptAction& a, json& t, std::string& actor) {
        need_args(a, 1);
        actor = "governance";
        FieldElement n_a = association(a.args[0]).n_a(*d_);
        t["n_a"] = hex(n_a);
        bool confirmed = parse_flag(opt_or(a, "confirmed", "yes"), line_);
        vdr_.block_associated_identifier(n_a, opt_or(a, "evidence", ""), confirmed);
    }

    // Actions that produce proofs a ledger or verifier consumes; they can be held and submitted later.
    Pending build(const ScriptAction& a) {
        const std::string& v = a.verb;
        Pending p;
        p.transcript = json::object();
        if (v == "register") {
            need_args(a, 1);
            auto& e = ident(a.args[0]);
            p.actor = e.owner;
            Proof proof = prove_registration(nizk_, vdr_, Member{e.id, key_of(opt_or(a, "key", a.args[0]))});
            p.transcript["proof"] = proof_json(proof);
            p.submit = [this, proof] { vdr_.register_identifier(nizk_, proof); };
        } else if (v == "associate") {
            need_args(a, 2);
            std::string holder = a.args[0];
            p.actor = holder;
            std::vector<Member> members;
            for (std::size_t i = 1; i < a.args.size(); ++i) {
                std::stringstream ss(a.args[i]);
                std::string name;
                while (std::getline(ss, name, ',')) {
                    if (!name.empty()) members.push_back(Member{ident(name).id, key_of(name)});
                }
            }
            auto step = prove_association(nizk_, vdr_, members, rng(holder));
            p.transcript["proof"] = proof_json(step.proof);
            p.submit = [this, holder, step] {
                vdr_.associate(nizk_, step.proof);
                holders_[holder].push_back(step.secret);
            };
        } else if (v == "append") {
            need_args(a, 2);
            std::string holder = split_version(a.args[0]).first;
            p.actor = holder;
            Member m{ident(a.args[1]).id, key_of(a.args[1])};
            auto step = prove_append(nizk_, vdr_, association(a.args[0]), m, rng(holder));
            p.transcript["proof"] = proof_json(step.proof);
            p.submit = [this, holder, step] {
                vdr_.append_identifier(nizk_, step.proof);
                holders_[holder].push_back(step.secret);
            };
        } else if (v == "aggregate") {
            need_args(a, 2);
            std::string holder = split_version(a.args[0]).first;
            p.actor = holder;
            auto step = prove_aggregate(nizk_, vdr_, association(a.args[0]), association(a.args[1]), rng(holder));
            p.transcript["proof"] = proof_json(step.proof);
            p.submit = [this, holder, step] {
                vdr_.aggregate_identifiers(nizk_, step.proof);
                holders_[holder].push_back(step.secret);
            };
        } else if (v == "refresh-randomness") {
            need_args(a, 1);
            std::string holder = split_version(a.args[0]).first;
            p.actor = holder;
            auto step = prove_randomness_refresh(nizk_, vdr_, association(a.args[0]), rng(holder));
            p.transcript["proof"] = proof_json(step.proof);
            p.submit = [this, holder, step] {
                vdr_.refresh_association_randomness(nizk_, step.proof);
                holders_[holder].push_back(step.secret);
            };
        } else if (v == "refresh-key") {
            need_args(a, 2);
            std::string holder = split_version(a.args[0]).first;
            std::string name = a.args[1];
            p.actor = holder;
            FieldElement sk_new = sybilid::keygen(*d_, rng(holder)).sk;
            Proof proof = prove_key_refresh(nizk_, vdr_, association(a.args[0]), ident(name).id, sk_new);
            p.transcript["proof"] = proof_json(proof);
            p.submit = [this, name, proof, sk_new] {
                vdr_.refresh_key(nizk_, proof);
                auto& e = idents_.at(name);
                e.previous_sks.push_back(e.sk);
                e.sk = sk_new;
            };
        } else if (v == "refresh-revocation") {
            need_args(a, 1);
            std::string name = a.args[0];
            auto& c = credential(name);
            p.actor = ident(c.holder).owner;
            auto refresh = prepare_nullifier_refresh(nizk_, c.cred, ledger_of(c.issuer), rng(p.actor));
            p.transcript["proof"] = proof_json(refresh.proof);
            p.submit = [this, name, refresh] {
                auto& entry = creds_.at(name);
                issuers_.at(entry.issuer).accept_nullifier_refresh(nizk_, refresh.proof);
                entry.cred.u_rv = refresh.u_rv_new;
            };
        } else if (v == "present-campaign") {
            need_args(a, 1);
            std::string name = a.args[0];
            auto cit = campaigns_.find(name);
            if (cit == campaigns_.end()) script_error(line_, "unknown campaign '" + name + "'");
            const Campaign& campaign = cit->second;
            const std::string& verifier = campaign_verifiers_.at(name);
            const std::string& id_name = opt(a, "ident");
            p.actor = ident(id_name).owner;
            CampaignSubmission sub;
            VerifierPolicy policy;
            std::string issuer;
            if (a.options.count("cred")) {
                auto& c = credential(a.options.at("cred"));
                issuer = c.issuer;
                std::string predicate = opt(a, "predicate");
                VerifierContext ctx = context_for(verifier, ForwardingGuard::Challenge);
                FieldElement sk = key_of(opt_or(a, "key", c.holder));
                auto pr = present(nizk_, enums_, c.cred, parse_predicate(predicate), sk, ctx, vdr_, ledger_of(c.issuer),
                                  rng(p.actor), PresentOptions{d_->protocol().mask_signature});
                sub.bundle = pr.bundle;
                sub.uniqueness = prove_campaign_uniqueness(nizk_, c.cred, sk, pr.u_c, vdr_, campaign);
                policy = policy_for(verifier, ctx, c, predicate);
                p.transcript["bundle"] = bundle_json(pr.bundle);
                p.transcript["uniqueness"] = proof_json(*sub.uniqueness);
            }
            if (a.options.count("holder")) {
                sub.association =
                    prove_identifier_presentation(nizk_, vdr_, association(a.options.at("holder")), ident(id_name).id, campaign.id());
                p.transcript["association"] = proof_json(*sub.association);
            }
            p.submit = [this, name, sub, policy, issuer] {
                const IssuerLedger& ledger = issuer.empty() ? nobody_ : issuers_.at(issuer);
                campaigns_.at(name).admit(nizk_, sub, vdr_, ledger, policy);
            };
        } else {
            script_error(line_, "unsupported action '" + v + "'");
        }
        return p;
    }

    DeploymentPtr d_;
    Nizk nizk_;
    Vdr vdr_;
    IssuerLedger nobody_;
    EnumRegistry enums_ = EnumRegistry::with_builtins();
    std::uint64_t seed_;
    std::size_t line_ = 0;
    std::map<std::string, std::mt19937_64> rngs_;
    std::map<std::string, IdentEntry> idents_;
    std::map<std::string, CredEntry> creds_;
    std::map<std::string, IssuerLedger> issuers_;
    std::map<std::string, std::vector<AssociationSecret>> holders_;
    std::map<std::string, PresentationEntry> presentations_;
    std::map<std::string, Campaign> campaigns_;
    std::map<std::string, std::string> campaign_verifiers_;
    std::map<std::string, Pending> pending_;
};

constexpr const char* kLogFormat = "sybilid-ledger-log";

json make_header(const Script& script, const Deployment& d, std::uint64_t seed) {
    const auto& p = d.protocol();
    json lines = json::array();
    for (const auto& c : script.config_lines) lines.push_back(c);
    for (const auto& a : script.actions) lines.push_back(a.text);
    return json{{"format", kLogFormat},
                {"version", 1},
                {"seed", seed},
                {"p", d.field().modulus().to_hex()},
                {"depth", p.tree_depth},
                {"window", p.root_window},
                {"modes",
                 {{"randomized_association", p.randomized_association},
                  {"consume_na_on_key_refresh", p.consume_na_on_key_refresh},
                  {"mask_signature", p.mask_signature},
                  {"guard", guard_name(p.default_guard)}}},
                {"script", lines}};
}

std::vector<std::string> split_lines(std::string_view text, bool& partial_tail) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    partial_tail = false;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) {
            out.emplace_back(text.substr(pos));
            partial_tail = true;
            break;
        }
        out.emplace_back(text.substr(pos, nl - pos));
        pos = nl + 1;
    }
    return out;
}

struct ParsedLog {
    json header;
    Script script;
    std::uint64_t seed = 0;
    std::vector<std::string> lines; // complete lines, header first
};

ParsedLog parse_log(std::string_view text) {
    ParsedLog out;
    bool partial = false;
    auto lines = split_lines(text, partial);
    if (partial) lines.pop_back();
    if (lines.empty()) fail(ErrorCode::LogError, "log is empty");
    try {
        out.header = json::parse(lines[0]);
        if (out.header.at("format").get<std::string>() != kLogFormat || out.header.at("version").get<int>() != 1) {
            fail(ErrorCode::LogError, "unsupported log format");
        }
        out.seed = out.header.at("seed").get<std::uint64_t>();
        std::string script_text;
        for (const auto& l : out.header.at("script")) script_text += l.get<std::string>() + "\n";
        out.script = parse_script(script_text);
    } catch (const ProtocolError& e) {
        if (e.code() == ErrorCode::LogError) throw;
        fail(ErrorCode::LogError, std::string("log header does not describe a valid run: ") + e.what());
    } catch (const std::exception& e) {
        fail(ErrorCode::LogError, std::string("corrupt log header: ") + e.what());
    }
    out.lines = std::move(lines);
    return out;
}

RunReport rerun(const ParsedLog& log) {
    try {
        return run_scenario(log.script, log.seed);
    } catch (const ProtocolError& e) {
        fail(ErrorCode::LogError, std::string("log script does not run: ") + e.what());
    }
}

json stats_json(const RegistryStats& s) {
    return json{{"identity_leaves", s.identity_leaves},
                {"registration_leaves", s.registration_leaves},
                {"association_leaves", s.association_leaves},
                {"identity_records", s.identity_records},
                {"registration_nullifiers", s.registration_nullifiers},
                {"association_nullifiers", s.association_nullifiers},
                {"blocked", s.blocked},
                {"key_refreshes", s.key_refreshes},
                {"issuer_leaves", s.issuer_leaves},
                {"revocation_buckets", s.revocation_buckets},
                {"campaign_credential_nullifiers", s.campaign_credential_nullifiers},
                {"campaign_association_nullifiers", s.campaign_association_nullifiers}};
}

} // namespace

Script parse_script(std::string_view text) {
    Script s;
    std::size_t lineno = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++lineno;
        auto tokens = tokenize(raw, lineno);
        if (tokens.empty()) continue;
        const std::string& verb = tokens[0];
        if (verb == "seed") {
            if (tokens.size() != 2) script_error(lineno, "seed takes one value");
            s.seed = parse_u64(tokens[1], lineno);
            continue;
        }
        if (verb == "config") {
            if (!s.actions.empty()) script_error(lineno, "config must precede actions");
            apply_config(s, tokens, lineno);
            s.config_lines.push_back(trim(raw));
            continue;
        }
        if (!kVerbs.count(verb)) script_error(lineno, "unknown action '" + verb + "'");
        ScriptAction a;
        a.line = lineno;
        a.text = trim(raw);
        a.verb = verb;
        for (std::size_t i = 1; i < tokens.size(); ++i) {
            const auto& tok = tokens[i];
            if (!is_option(tok)) {
                a.args.push_back(tok);
                continue;
            }
            auto eq = tok.find('=');
            std::string key = tok.substr(0, eq), value = tok.substr(eq + 1);
            if (key == "expect") {
                ErrorCode code;
                if (value != "ok" && (!parse_error_code(value, code) || code == ErrorCode::Ok)) {
                    script_error(lineno, "unknown expected outcome '" + value + "'");
                }
                a.expect = value;
            } else if (!a.options.emplace(key, value).second) {
                script_error(lineno, "option '" + key + "' given twice");
            }
        }
        s.actions.push_back(std::move(a));
    }
    return s;
}

std::uint64_t resolve_seed(const Script& script, std::optional<std::uint64_t> explicit_seed) {
    if (explicit_seed) return *explicit_seed;
    if (script.seed) return *script.seed;
    if (const char* env = std::getenv("SYBILID_SEED")) {
        std::uint64_t v = 0;
        std::string_view s(env);
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec == std::errc() && p == s.data() + s.size()) return v;
        fail(ErrorCode::InvalidInput, "SYBILID_SEED is not an unsigned integer");
    }
    return 1;
}

RunReport run_scenario(const Script& script, std::uint64_t seed) {
    auto d = make_deployment(script.deployment);
    const auto& h = d->hasher();
    const auto& f = d->field();
    World world(d, seed);
    RunReport report;
    report.seed = seed;

    json header = make_header(script, *d, seed);
    std::string head = header.dump();
    std::string log = head + "\n";
    FieldElement chain = h.hash_bytes(head, Site::LogChain);

    std::uint64_t seq = 0;
    for (const auto& action : script.actions) {
        ++seq;
        FieldElement before = world.digest();
        json transcript = json::object();
        std::string actor;
        ActionReport ar{seq, action.text, action.expect, "ok", {}};
        try {
            world.execute(action, transcript, actor);
        } catch (const ProtocolError& e) {
            if (e.code() == ErrorCode::ScriptError) throw;
            ar.outcome = std::string(to_string(e.code()));
            ar.detail = e.what();
        }
        json record{{"seq", seq},
                    {"actor", actor},
                    {"verb", action.verb},
                    {"line", action.text},
                    {"expect", action.expect},
                    {"outcome", ar.outcome},
                    {"transcript", transcript},
                    {"before", f.to_hex(before)},
                    {"after", f.to_hex(world.digest())}};
        chain = h.h1({chain, h.hash_bytes(record.dump(), Site::LogChain)}, Site::LogChain);
        record["chain"] = f.to_hex(chain);
        log += record.dump() + "\n";
        report.actions.push_back(std::move(ar));
        if (report.actions.back().outcome != action.expect) {
            report.divergence = seq;
            break;
        }
    }
    report.final_digest = f.to_hex(world.digest());
    report.stats = world.stats();
    report.credentials = world.credentials();
    json footer{{"end", true}, {"records", seq}, {"final", report.final_digest}, {"chain", f.to_hex(chain)}};
    if (report.divergence) footer["divergence"] = *report.divergence;
    log += footer.dump() + "\n";
    report.log = std::move(log);
    return report;
}

ReplayVerdict replay_log(std::string_view text) {
    ParsedLog log = parse_log(text);
    RunReport fresh = rerun(log);
    bool partial = false;
    auto expected = split_lines(fresh.log, partial);
    ReplayVerdict v;
    if (log.lines[0] != expected[0]) {
        v.kind = ReplayVerdict::Kind::Inconsistent;
        v.divergent_seq = 0;
        v.detail = "header differs from the re-executed run";
        return v;
    }
    for (std::size_t i = 1; i < log.lines.size(); ++i) {
        if (i >= expected.size() || log.lines[i] != expected[i]) {
            v.kind = ReplayVerdict::Kind::Inconsistent;
            v.divergent_seq = i;
            if (i >= expected.size()) {
                v.detail = "line beyond the end of the re-executed run";
            } else if (i + 1 == expected.size()) {
                v.detail = "footer differs from the re-executed run";
            } else {
                v.detail = "record differs from the re-executed run";
            }
            v.records = i - 1;
            return v;
        }
    }
    if (log.lines.size() < expected.size()) {
        v.kind = ReplayVerdict::Kind::Truncated;
        v.records = log.lines.size() - 1;
        v.detail = "log ends after " + std::to_string(v.records) + " of " + std::to_string(expected.size() - 2) + " records";
        return v;
    }
    v.records = expected.size() - 2;
    return v;
}

std::string inspect_log(std::string_view text, std::optional<std::uint64_t> at) {
    ParsedLog log = parse_log(text);
    json out;
    out["header"] = log.header;
    std::vector<json> records;
    std::optional<json> footer;
    for (std::size_t i = 1; i < log.lines.size(); ++i) {
        json r;
        try {
            r = json::parse(log.lines[i]);
        } catch (const std::exception&) {
            fail(ErrorCode::LogError, "line " + std::to_string(i + 1) + " is not a record");
        }
        if (r.contains("end")) {
            footer = r;
        } else {
            records.push_back(std::move(r));
        }
    }
    out["records"] = records.size();
    out["complete"] = footer.has_value();
    if (at) {
        if (*at == 0 || *at > records.size()) fail(ErrorCode::NotFound, "no record with seq " + std::to_string(*at));
        out["record"] = records[*at - 1];
    } else {
        json summary = json::array();
        for (const auto& r : records) {
            summary.push_back({{"seq", r.value("seq", 0)},
                               {"actor", r.value("actor", "")},
                               {"verb", r.value("verb", "")},
                               {"outcome", r.value("outcome", "")}});
        }
        out["summary"] = summary;
        if (footer) out["footer"] = *footer;
    }
    return out.dump(2);
}

RegistryStats stats_from_log(std::string_view text) {
    ParsedLog log = parse_log(text);
    std::size_t records = 0;
    for (std::size_t i = 1; i < log.lines.size(); ++i) {
        if (log.lines[i].find("\"end\":true") == std::string::npos) ++records;
    }
    if (records < log.script.actions.size()) log.script.actions.resize(records);
    return rerun(log).stats;
}

std::string stats_to_json(const RegistryStats& stats) {
    return stats_json(stats).dump(2);
}

} // namespace sybilid::harness
