#include "sybilid/predicate.hpp"

#include "sybilid/errors.hpp"

#include <cctype>
#include <charconv>

namespace sybilid {

namespace {

struct Token {
    enum class Type { Word, Op, LBrace, RBrace, LParen, RParen, Comma, End } type;
    std::string text;
};

std::vector<Token> tokenize(std::string_view s) {
    std::vector<Token> out;
    std::size_t i = 0;
    auto is_word = [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.' || c == '+';
    };
    while (i < s.size()) {
        char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
        } else if (c == '{') {
            out.push_back({Token::Type::LBrace, "{"}), ++i;
        } else if (c == '}') {
            out.push_back({Token::Type::RBrace, "}"}), ++i;
        } else if (c == '(') {
            out.push_back({Token::Type::LParen, "("}), ++i;
        } else if (c == ')') {
            out.push_back({Token::Type::RParen, ")"}), ++i;
        } else if (c == ',') {
            out.push_back({Token::Type::Comma, ","}), ++i;
        } else if (c == '<' || c == '>' || c == '=' || c == '!') {
            std::string op(1, c);
            if (i + 1 < s.size() && s[i + 1] == '=') op += '=';
            if (op == "!") fail(ErrorCode::InvalidInput, "dangling '!' in predicate");
            i += op.size();
            out.push_back({Token::Type::Op, op});
        } else if (c == '"' || c == '\'') {
            auto end = s.find(c, i + 1);
            if (end == std::string_view::npos) fail(ErrorCode::InvalidInput, "unterminated quote in predicate");
            out.push_back({Token::Type::Word, std::string(s.substr(i + 1, end - i - 1))});
            i = end + 1;
        } else if (is_word(c)) {
            std::size_t j = i;
            while (j < s.size() && is_word(s[j])) ++j;
            out.push_back({Token::Type::Word, std::string(s.substr(i, j - i))});
            i = j;
        } else {
            fail(ErrorCode::InvalidInput, std::string("unexpected character '") + c + "' in predicate");
        }
    }
    out.push_back({Token::Type::End, ""});
    return out;
}

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    Predicate parse() {
        Predicate p = expr();
        if (peek().type != Token::Type::End) fail(ErrorCode::InvalidInput, "trailing tokens in predicate");
        return p;
    }

private:
    const Token& peek() const { return toks_[pos_]; }
    Token next() { return toks_[pos_++]; }
    bool peek_word(std::string_view w) const { return peek().type == Token::Type::Word && peek().text == w; }

    Predicate combine(Predicate::Kind kind, Predicate l, Predicate r) {
        Predicate p;
        p.kind = kind;
        p.key = l.key;
        p.children.push_back(std::move(l));
        p.children.push_back(std::move(r));
        return p;
    }

    Predicate expr() {
        Predicate left = term();
        while (peek_word("or")) {
            next();
            left = combine(Predicate::Kind::Or, std::move(left), term());
        }
        return left;
    }

    Predicate term() {
        Predicate left = factor();
        while (peek_word("and")) {
            next();
            left = combine(Predicate::Kind::And, std::move(left), factor());
        }
        return left;
    }

    Predicate factor() {
        if (peek().type == Token::Type::LParen) {
            next();
            Predicate p = expr();
            if (next().type != Token::Type::RParen) fail(ErrorCode::InvalidInput, "missing ')' in predicate");
            return p;
        }
        Token key = next();
        if (key.type != Token::Type::Word) fail(ErrorCode::InvalidInput, "expected claim key in predicate");
        Predicate p;
        p.key = key.text;
        if (peek_word("in") || peek_word("notin") || peek_word("not")) {
            std::string w = next().text;
            if (w == "not") {
                if (!peek_word("in")) fail(ErrorCode::InvalidInput, "expected 'in' after 'not'");
                next();
                w = "notin";
            }
            p.kind = w == "in" ? Predicate::Kind::In : Predicate::Kind::NotIn;
            if (next().type != Token::Type::LBrace) fail(ErrorCode::InvalidInput, "expected '{' in predicate set");
            for (;;) {
                Token v = next();
                if (v.type != Token::Type::Word) fail(ErrorCode::InvalidInput, "expected set element");
                p.constants.push_back(v.text);
                Token sep = next();
                if (sep.type == Token::Type::RBrace) break;
                if (sep.type != Token::Type::Comma) fail(ErrorCode::InvalidInput, "expected ',' or '}' in set");
            }
            return p;
        }
        Token op = next();
        if (op.type != Token::Type::Op) fail(ErrorCode::InvalidInput, "expected comparison operator");
        p.kind = Predicate::Kind::Compare;
        if (op.text == "<") p.op = CmpOp::Lt;
        else if (op.text == "<=") p.op = CmpOp::Le;
        else if (op.text == "=" || op.text == "==") p.op = CmpOp::Eq;
        else if (op.text == "!=") p.op = CmpOp::Ne;
        else if (op.text == ">=") p.op = CmpOp::Ge;
        else if (op.text == ">") p.op = CmpOp::Gt;
        else fail(ErrorCode::InvalidInput, "unknown operator '" + op.text + "'");
        Token v = next();
        if (v.type != Token::Type::Word) fail(ErrorCode::InvalidInput, "expected constant after operator");
        p.constants.push_back(v.text);
        return p;
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

void check_single_key(const Predicate& p, const std::string& key) {
    if (p.key != key) fail(ErrorCode::InvalidInput, "predicate references more than one claim key");
    for (const auto& c : p.children) check_single_key(c, key);
}

std::string_view op_text(CmpOp op) {
    switch (op) {
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Eq: return "==";
    case CmpOp::Ne: return "!=";
    case CmpOp::Ge: return ">=";
    case CmpOp::Gt: return ">";
    }
    return "?";
}

FieldElement encode_constant(const Deployment& d, const EnumRegistry& enums, const ClaimSchema& schema,
                             const std::string& text) {
    ClaimValue v;
    v.kind = schema.kind;
    v.table = schema.table;
    if (schema.kind == ClaimKind::Int) {
        std::int64_t n = 0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), n);
        if (ec != std::errc{} || ptr != text.data() + text.size()) {
            fail(ErrorCode::EncodingError, "'" + text + "' is not an integer constant");
        }
        v.integer = n;
    } else {
        v.text = text;
    }
    return encode_claim_value(d, enums, v);
}

void encode_node(const Deployment& d, const EnumRegistry& enums, const ClaimSchema& schema, const Predicate& p,
                 FieldVector& out) {
    const auto& f = d.field();
    switch (p.kind) {
    case Predicate::Kind::Compare:
        if (schema.kind != ClaimKind::Int && p.op != CmpOp::Eq && p.op != CmpOp::Ne) {
            fail(ErrorCode::InvalidInput, "ordering comparisons need an integer claim");
        }
        out.push_back(f.from_u64(static_cast<std::uint64_t>(p.op)));
        out.push_back(encode_constant(d, enums, schema, p.constants.at(0)));
        return;
    case Predicate::Kind::In:
    case Predicate::Kind::NotIn:
        out.push_back(f.from_u64(static_cast<std::uint64_t>(p.kind)));
        out.push_back(f.from_u64(p.constants.size()));
        for (const auto& c : p.constants) out.push_back(encode_constant(d, enums, schema, c));
        return;
    case Predicate::Kind::And:
    case Predicate::Kind::Or:
        out.push_back(f.from_u64(static_cast<std::uint64_t>(p.kind)));
        encode_node(d, enums, schema, p.children.at(0), out);
        encode_node(d, enums, schema, p.children.at(1), out);
        return;
    }
}

class Evaluator {
public:
    Evaluator(const Deployment& d, std::span<const FieldElement> enc, const EncodedClaim& claim, bool is_int)
        : d_(d), enc_(enc), claim_(claim), is_int_(is_int) {}

    // Returns false (and sets malformed_) on bad layout.
    bool node(int depth) {
        if (depth > 64 || pos_ >= enc_.size()) return malformed();
        std::int64_t tag = 0;
        if (!d_.field().to_i64(enc_[pos_++], tag)) return malformed();
        switch (tag) {
        case 1: case 2: case 3: case 4: case 5: case 6: {
            if (pos_ >= enc_.size()) return malformed();
            return compare(static_cast<CmpOp>(tag), enc_[pos_++]);
        }
        case 7: case 8: {
            if (pos_ >= enc_.size()) return malformed();
            std::int64_t n = 0;
            if (!d_.field().to_i64(enc_[pos_++], n) || n < 1 || static_cast<std::size_t>(n) > enc_.size() - pos_) {
                return malformed();
            }
            bool member = false;
            for (std::int64_t i = 0; i < n; ++i) member |= enc_[pos_++] == claim_.value;
            return tag == 7 ? member : !member;
        }
        case 9: case 10: {
            bool l = node(depth + 1);
            bool r = node(depth + 1);
            return tag == 9 ? (l && r) : (l || r);
        }
        default:
            return malformed();
        }
    }

    bool malformed_ = false;
    std::size_t pos_ = 2;

private:
    bool malformed() {
        malformed_ = true;
        return false;
    }

    bool compare(CmpOp op, const FieldElement& constant) {
        if (op == CmpOp::Eq) return claim_.value == constant;
        if (op == CmpOp::Ne) return claim_.value != constant;
        if (!is_int_) return malformed();
        std::int64_t a = 0;
        std::int64_t b = 0;
        if (!d_.field().to_i64(claim_.value, a) || !d_.field().to_i64(constant, b)) return malformed();
        switch (op) {
        case CmpOp::Lt: return a < b;
        case CmpOp::Le: return a <= b;
        case CmpOp::Ge: return a >= b;
        case CmpOp::Gt: return a > b;
        default: return malformed();
        }
    }

    const Deployment& d_;
    std::span<const FieldElement> enc_;
    const EncodedClaim& claim_;
    bool is_int_;
};

} // namespace

Predicate parse_predicate(std::string_view text) {
    Parser parser(tokenize(text));
    Predicate p = parser.parse();
    check_single_key(p, p.key);
    return p;
}

std::string predicate_to_text(const Predicate& p) {
    auto join = [](const std::vector<std::string>& xs) {
        std::string s;
        for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + xs[i];
        return s;
    };
    switch (p.kind) {
    case Predicate::Kind::Compare:
        return p.key + " " + std::string(op_text(p.op)) + " " + p.constants.at(0);
    case Predicate::Kind::In:
        return p.key + " in {" + join(p.constants) + "}";
    case Predicate::Kind::NotIn:
        return p.key + " notin {" + join(p.constants) + "}";
    case Predicate::Kind::And:
        return "(" + predicate_to_text(p.children.at(0)) + " and " + predicate_to_text(p.children.at(1)) + ")";
    case Predicate::Kind::Or:
        return "(" + predicate_to_text(p.children.at(0)) + " or " + predicate_to_text(p.children.at(1)) + ")";
    }
    return {};
}

BoundPredicate bind_predicate(const Deployment& d, const EnumRegistry& enums, const Predicate& p, const ClaimSchema& schema) {
    BoundPredicate bp{p.key, schema, {}};
    bp.encoding.push_back(claim_key_digest(d, p.key));
    bp.encoding.push_back(d.field().from_u64(static_cast<std::uint64_t>(schema.kind)));
    encode_node(d, enums, schema, p, bp.encoding);
    return bp;
}

bool evaluate_predicate(const Deployment& d, std::span<const FieldElement> encoding, const EncodedClaim& claim) {
    if (encoding.size() < 3) return false;
    if (encoding[0] != claim.key_digest || encoding[1] != claim.kind) return false;
    std::int64_t kind = 0;
    if (!d.field().to_i64(claim.kind, kind)) return false;
    Evaluator ev(d, encoding, claim, kind == static_cast<std::int64_t>(ClaimKind::Int));
    bool result = ev.node(0);
    if (ev.malformed_ || ev.pos_ != encoding.size()) return false;
    return result;
}

std::optional<FieldElement> predicate_key(std::span<const FieldElement> encoding) {
    if (encoding.empty()) return std::nullopt;
    return encoding[0];
}

} // namespace sybilid
