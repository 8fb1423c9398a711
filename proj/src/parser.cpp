#include "sqlsem/parser.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <unordered_set>

namespace sqlsem {

namespace {

enum class Tok {
    End,
    Ident,
    Keyword,
    IntLit,
    FloatLit,
    StrLit,
    LParen,
    RParen,
    Comma,
    Star,
    Plus,
    Minus,
    Slash,
    Concat,
    Eq,
    Ne,
    Lt,
    Gt,
    Le,
    Ge,
};

struct Token {
    Tok kind = Tok::End;
    std::string text;     // identifier spelling / literal body / upper-cased keyword
    size_t offset = 0;
};

const std::unordered_set<std::string>& keyword_set() {
    static const std::unordered_set<std::string> kws = {
        "ABS", "ALL", "AND", "AS", "ASC", "AVG", "BETWEEN", "BY", "CASE", "CAST", "CEIL",
        "CEILING", "CHAR_LENGTH", "CHARACTER_LENGTH", "COUNT", "CROSS", "DESC", "DISTINCT",
        "ELSE", "END", "EXCEPT", "EXISTS", "EXP", "FALSE", "FLOOR", "FROM", "FULL", "GROUP",
        "HAVING", "IN", "INNER", "INTERSECT", "IS", "JOIN", "LEFT", "LENGTH", "LN", "LOWER",
        "LTRIM", "MAX", "MIN", "MOD", "NATURAL", "NOT", "NULL", "ON", "OR", "ORDER", "OUTER",
        "POWER", "RIGHT", "RTRIM", "SELECT", "SQRT", "SUBSTRING", "SUM", "THEN", "TRUE",
        "UNION", "UNKNOWN", "UPPER", "WHEN", "WHERE", "XOR",
    };
    return kws;
}

std::string to_upper(std::string s) {
    for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
}

std::vector<Token> lex(const std::string& text) {
    std::vector<Token> out;
    size_t i = 0;
    const size_t n = text.size();
    auto push = [&](Tok kind, std::string s, size_t off) {
        out.push_back(Token{kind, std::move(s), off});
    };
    while (i < n) {
        char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        size_t off = i;
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t b = i;
            while (i < n && (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_')) ++i;
            std::string word = text.substr(b, i - b);
            std::string upper = to_upper(word);
            if (keyword_set().count(upper)) {
                push(Tok::Keyword, upper, off);
                continue;
            }
            // dotted reference t.c scans as one identifier token
            if (i + 1 < n && text[i] == '.' &&
                (std::isalpha(static_cast<unsigned char>(text[i + 1])) || text[i + 1] == '_')) {
                size_t b2 = ++i;
                while (i < n &&
                       (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_')) {
                    ++i;
                }
                word += "." + text.substr(b2, i - b2);
            }
            push(Tok::Ident, word, off);
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t b = i;
            while (i < n && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
            bool fractional = false;
            if (i + 1 < n && text[i] == '.' && std::isdigit(static_cast<unsigned char>(text[i + 1]))) {
                fractional = true;
                ++i;
                while (i < n && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
            }
            push(fractional ? Tok::FloatLit : Tok::IntLit, text.substr(b, i - b), off);
            continue;
        }
        if (c == '\'') {
            std::string body;
            ++i;
            bool closed = false;
            while (i < n) {
                if (text[i] == '\'') {
                    if (i + 1 < n && text[i + 1] == '\'') {
                        body += '\'';
                        i += 2;
                        continue;
                    }
                    ++i;
                    closed = true;
                    break;
                }
                body += text[i++];
            }
            if (!closed) throw SyntaxError(off, {"'"}, "unterminated string literal");
            push(Tok::StrLit, std::move(body), off);
            continue;
        }
        auto two = [&](char a, char b) { return c == a && i + 1 < n && text[i + 1] == b; };
        if (two('|', '|')) { push(Tok::Concat, "||", off); i += 2; continue; }
        if (two('!', '=')) { push(Tok::Ne, "!=", off); i += 2; continue; }
        if (two('<', '>')) { push(Tok::Ne, "!=", off); i += 2; continue; }
        if (two('<', '=')) { push(Tok::Le, "<=", off); i += 2; continue; }
        if (two('>', '=')) { push(Tok::Ge, ">=", off); i += 2; continue; }
        switch (c) {
            case '(': push(Tok::LParen, "(", off); break;
            case ')': push(Tok::RParen, ")", off); break;
            case ',': push(Tok::Comma, ",", off); break;
            case '*': push(Tok::Star, "*", off); break;
            case '+': push(Tok::Plus, "+", off); break;
            case '-': push(Tok::Minus, "-", off); break;
            case '/': push(Tok::Slash, "/", off); break;
            case '=': push(Tok::Eq, "=", off); break;
            case '<': push(Tok::Lt, "<", off); break;
            case '>': push(Tok::Gt, ">", off); break;
            default:
                throw SyntaxError(off, {}, std::string("unexpected character '") + c + "'");
        }
        ++i;
    }
    out.push_back(Token{Tok::End, "", n});
    return out;
}

class Parser {
public:
    explicit Parser(const std::string& text) : toks_(lex(text)) {}

    QueryPtr parse_statement() {
        QueryPtr q = parse_query();
        expect_end();
        return q;
    }

    ExprPtr parse_lone_expression() {
        ExprPtr e = parse_expr();
        expect_end();
        return e;
    }

private:
    std::vector<Token> toks_;
    size_t pos_ = 0;

    const Token& peek(size_t ahead = 0) const {
        size_t i = std::min(pos_ + ahead, toks_.size() - 1);
        return toks_[i];
    }

    const Token& advance() { return toks_[std::min(pos_++, toks_.size() - 1)]; }

    bool at_kw(const char* kw, size_t ahead = 0) const {
        const Token& t = peek(ahead);
        return t.kind == Tok::Keyword && t.text == kw;
    }

    bool eat_kw(const char* kw) {
        if (!at_kw(kw)) return false;
        advance();
        return true;
    }

    bool eat(Tok kind) {
        if (peek().kind != kind) return false;
        advance();
        return true;
    }

    [[noreturn]] void unexpected(std::vector<std::string> expected) {
        const Token& t = peek();
        std::string found = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
        throw SyntaxError(t.offset, std::move(expected), found);
    }

    void expect_kw(const char* kw) {
        if (!eat_kw(kw)) unexpected({kw});
    }

    void expect(Tok kind, const char* spelling) {
        if (!eat(kind)) unexpected({spelling});
    }

    void expect_end() {
        if (peek().kind != Tok::End) unexpected({"end of input"});
    }

    std::string parse_identifier(const char* what) {
        if (peek().kind != Tok::Ident) unexpected({what});
        return advance().text;
    }

    QueryPtr parse_query() {
        QueryPtr q = parse_query_term();
        while (true) {
            std::optional<SetOpKind> op;
            if (at_kw("UNION")) {
                advance();
                op = eat_kw("ALL") ? SetOpKind::UnionAll : SetOpKind::Union;
            } else if (at_kw("INTERSECT")) {
                advance();
                op = eat_kw("ALL") ? SetOpKind::IntersectAll : SetOpKind::Intersect;
            } else if (at_kw("EXCEPT")) {
                advance();
                op = eat_kw("ALL") ? SetOpKind::ExceptAll : SetOpKind::Except;
            }
            if (!op) break;
            QueryPtr rhs = parse_query_term();
            q = make_set(*op, q, rhs);
        }
        if (eat_kw("ORDER")) {
            expect_kw("BY");
            OrderBy ob;
            ob.column = parse_dotted_name();
            if (eat_kw("DESC")) {
                ob.desc = true;
            } else {
                eat_kw("ASC");
            }
            q->order_by = ob;
        }
        return q;
    }

    QueryPtr parse_query_term() {
        if (eat(Tok::LParen)) {
            QueryPtr q = parse_query();
            expect(Tok::RParen, ")");
            return q;
        }
        return parse_select_core();
    }

    QueryPtr parse_select_core() {
        expect_kw("SELECT");
        auto core = std::make_shared<SelectCore>();
        if (eat_kw("DISTINCT")) {
            core->modifier = SelectModifier::Distinct;
        } else if (eat_kw("ALL")) {
            core->modifier = SelectModifier::All;
        } else if (at_kw("MAX") || at_kw("MIN") || at_kw("SUM") || at_kw("COUNT") || at_kw("AVG")) {
            std::string agg = advance().text;
            core->modifier = agg == "MAX"   ? SelectModifier::Max
                             : agg == "MIN" ? SelectModifier::Min
                             : agg == "SUM" ? SelectModifier::Sum
                             : agg == "AVG" ? SelectModifier::Avg
                                            : SelectModifier::Count;
            if (eat(Tok::LParen)) {
                parse_select_list(*core);
                expect(Tok::RParen, ")");
            } else {
                parse_select_list(*core);
            }
            parse_select_tail(*core);
            return make_select(core);
        }
        parse_select_list(*core);
        parse_select_tail(*core);
        return make_select(core);
    }

    void parse_select_list(SelectCore& core) {
        if (eat(Tok::Star)) {
            core.star = true;
            return;
        }
        core.items.push_back(parse_expr());
        while (eat(Tok::Comma)) core.items.push_back(parse_expr());
    }

    void parse_select_tail(SelectCore& core) {
        if (eat_kw("FROM")) {
            core.from.push_back(parse_table_ref());
            while (eat(Tok::Comma)) core.from.push_back(parse_table_ref());
        }
        if (eat_kw("WHERE")) core.where = parse_expr();
        if (eat_kw("GROUP")) {
            expect_kw("BY");
            core.group_by = parse_dotted_name();
        }
        if (eat_kw("HAVING")) core.having = parse_expr();
    }

    TableRef parse_table_ref() {
        TableRef ref;
        std::string first = parse_identifier("table name");
        std::optional<JoinKind> kind;
        if (eat_kw("CROSS")) {
            expect_kw("JOIN");
            kind = JoinKind::Cross;
        } else if (eat_kw("NATURAL")) {
            expect_kw("JOIN");
            kind = JoinKind::Natural;
        } else if (at_kw("INNER") || at_kw("LEFT") || at_kw("RIGHT") || at_kw("FULL") ||
                   at_kw("JOIN")) {
            if (eat_kw("INNER")) {
                kind = JoinKind::Inner;
            } else if (eat_kw("LEFT")) {
                kind = JoinKind::Left;
            } else if (eat_kw("RIGHT")) {
                kind = JoinKind::Right;
            } else if (eat_kw("FULL")) {
                kind = JoinKind::Full;
            } else {
                kind = JoinKind::Inner;  // bare JOIN
            }
            eat_kw("OUTER");
            expect_kw("JOIN");
        }
        if (!kind) {
            ref.table = first;
            return ref;
        }
        ref.joined = true;
        ref.kind = *kind;
        ref.left = first;
        ref.right = parse_identifier("table name");
        if (*kind == JoinKind::Inner || *kind == JoinKind::Left || *kind == JoinKind::Right ||
            *kind == JoinKind::Full) {
            expect_kw("ON");
            ref.on = parse_expr();
        }
        return ref;
    }

    // identifier with optional dotted tail; the lexer has no '.' token, so
    // dotted references arrive as a single scan here.
    std::string parse_dotted_name() { return parse_identifier("column name"); }

    ExprPtr parse_expr() { return parse_or(); }

    ExprPtr parse_or() {
        ExprPtr e = parse_xor();
        while (eat_kw("OR")) e = logic(ExprKind::Or, e, parse_xor());
        return e;
    }

    ExprPtr parse_xor() {
        ExprPtr e = parse_and();
        while (eat_kw("XOR")) e = logic(ExprKind::Xor, e, parse_and());
        return e;
    }

    ExprPtr parse_and() {
        ExprPtr e = parse_not();
        while (eat_kw("AND")) e = logic(ExprKind::And, e, parse_not());
        return e;
    }

    ExprPtr parse_not() {
        if (eat_kw("NOT")) return not_of(parse_not());
        return parse_predicate();
    }

    // One flat left-associative level: comparisons, IS tests, BETWEEN, IN.
    ExprPtr parse_predicate() {
        ExprPtr e = parse_concat();
        while (true) {
            std::optional<CompareOp> cmp;
            switch (peek().kind) {
                case Tok::Eq: cmp = CompareOp::Eq; break;
                case Tok::Ne: cmp = CompareOp::Ne; break;
                case Tok::Lt: cmp = CompareOp::Lt; break;
                case Tok::Gt: cmp = CompareOp::Gt; break;
                case Tok::Le: cmp = CompareOp::Le; break;
                case Tok::Ge: cmp = CompareOp::Ge; break;
                default: break;
            }
            if (cmp) {
                advance();
                e = compare(*cmp, e, parse_concat());
                continue;
            }
            if (at_kw("IS")) {
                advance();
                bool negated = eat_kw("NOT");
                if (eat_kw("TRUE")) {
                    e = is_test(e, IsOp::True, negated);
                } else if (eat_kw("FALSE")) {
                    e = is_test(e, IsOp::False, negated);
                } else if (eat_kw("UNKNOWN")) {
                    e = is_test(e, IsOp::Unknown, negated);
                } else if (eat_kw("NULL")) {
                    e = is_test(e, IsOp::Null, negated);
                } else {
                    unexpected({"TRUE", "FALSE", "UNKNOWN", "NULL"});
                }
                continue;
            }
            if (at_kw("BETWEEN") || (at_kw("NOT") && at_kw("BETWEEN", 1))) {
                bool negated = eat_kw("NOT");
                expect_kw("BETWEEN");
                ExprPtr lo = parse_concat();
                expect_kw("AND");
                ExprPtr hi = parse_concat();
                e = between(e, lo, hi, negated);
                continue;
            }
            if (at_kw("IN") || (at_kw("NOT") && at_kw("IN", 1))) {
                bool negated = eat_kw("NOT");
                expect_kw("IN");
                expect(Tok::LParen, "(");
                std::vector<ExprPtr> elems;
                elems.push_back(parse_expr());
                while (eat(Tok::Comma)) elems.push_back(parse_expr());
                expect(Tok::RParen, ")");
                e = in_list(e, std::move(elems), negated);
                continue;
            }
            break;
        }
        return e;
    }

    ExprPtr parse_concat() {
        ExprPtr e = parse_additive();
        while (eat(Tok::Concat)) e = binary_fn(ExprKind::Concat, e, parse_additive());
        return e;
    }

    ExprPtr parse_additive() {
        ExprPtr e = parse_multiplicative();
        while (true) {
            if (eat(Tok::Plus)) {
                e = arith(ArithOp::Add, e, parse_multiplicative());
            } else if (eat(Tok::Minus)) {
                e = arith(ArithOp::Sub, e, parse_multiplicative());
            } else {
                break;
            }
        }
        return e;
    }

    ExprPtr parse_multiplicative() {
        ExprPtr e = parse_primary();
        while (true) {
            if (eat(Tok::Star)) {
                e = arith(ArithOp::Mul, e, parse_primary());
            } else if (eat(Tok::Slash)) {
                e = arith(ArithOp::Div, e, parse_primary());
            } else {
                break;
            }
        }
        return e;
    }

    Value parse_signed_number(bool negative) {
        const Token& t = peek();
        if (t.kind == Tok::IntLit) {
            advance();
            return text_to_num((negative ? "-" : "") + t.text);
        }
        if (t.kind == Tok::FloatLit) {
            advance();
            double d = std::strtod(t.text.c_str(), nullptr);
            return Value::real(negative ? -d : d);
        }
        unexpected({"numeric literal"});
    }

    ExprPtr parse_fn_args(ExprKind kind, size_t arity) {
        expect(Tok::LParen, "(");
        std::vector<ExprPtr> args;
        args.push_back(parse_expr());
        while (eat(Tok::Comma)) args.push_back(parse_expr());
        expect(Tok::RParen, ")");
        if (args.size() != arity) {
            throw SyntaxError(peek().offset, {},
                              "wrong argument count for function (expected " +
                                  std::to_string(arity) + ", got " + std::to_string(args.size()) +
                                  ")");
        }
        if (arity == 1) return unary_fn(kind, args[0]);
        return binary_fn(kind, args[0], args[1]);
    }

    ExprPtr parse_primary() {
        const Token& t = peek();
        switch (t.kind) {
            case Tok::IntLit:
            case Tok::FloatLit: return lit(parse_signed_number(false));
            case Tok::Minus: advance(); return lit(parse_signed_number(true));
            case Tok::Plus: advance(); return lit(parse_signed_number(false));
            case Tok::StrLit: advance(); return lit(Value::text(t.text));
            case Tok::Ident: {
                advance();
                return col(t.text);
            }
            case Tok::LParen: {
                if (peek(1).kind == Tok::Keyword && peek(1).text == "SELECT") {
                    advance();
                    QueryPtr sub = parse_query();
                    expect(Tok::RParen, ")");
                    return scalar_subquery(sub);
                }
                advance();
                ExprPtr e = parse_expr();
                expect(Tok::RParen, ")");
                return e;
            }
            case Tok::Keyword: break;
            default: unexpected({"expression"});
        }
        const std::string& kw = t.text;
        if (kw == "NULL") { advance(); return lit(Value::null()); }
        if (kw == "TRUE") { advance(); return lit(Value::boolean(true)); }
        if (kw == "FALSE") { advance(); return lit(Value::boolean(false)); }
        if (kw == "NOT") { advance(); return not_of(parse_not()); }
        if (kw == "EXISTS") {
            advance();
            expect(Tok::LParen, "(");
            QueryPtr sub = parse_query();
            expect(Tok::RParen, ")");
            return exists(sub);
        }
        if (kw == "CASE") {
            advance();
            expect_kw("WHEN");
            ExprPtr cond = parse_expr();
            expect_kw("THEN");
            ExprPtr then_e = parse_expr();
            expect_kw("ELSE");
            ExprPtr else_e = parse_expr();
            eat_kw("END");
            return case_when(cond, then_e, else_e);
        }
        if (kw == "CAST") {
            advance();
            expect(Tok::LParen, "(");
            ExprPtr e = parse_expr();
            expect_kw("AS");
            CastType type;
            if (peek().kind == Tok::Ident || peek().kind == Tok::Keyword) {
                std::string ty = to_upper(advance().text);
                if (ty == "STRING") {
                    type = CastType::String;
                } else if (ty == "NUMERIC") {
                    type = CastType::Numeric;
                } else if (ty == "BOOLEAN") {
                    type = CastType::Boolean;
                } else {
                    unexpected({"string", "numeric", "boolean"});
                }
            } else {
                unexpected({"string", "numeric", "boolean"});
            }
            expect(Tok::RParen, ")");
            return cast_as(e, type);
        }
        if (kw == "SUBSTRING") {
            advance();
            expect(Tok::LParen, "(");
            ExprPtr s = parse_expr();
            expect_kw("FROM");
            ExprPtr start = parse_expr();
            expect(Tok::RParen, ")");
            return binary_fn(ExprKind::Substring, s, start);
        }
        if (kw == "MOD") { advance(); return parse_fn_args(ExprKind::Mod, 2); }
        if (kw == "POWER") { advance(); return parse_fn_args(ExprKind::Power, 2); }
        if (kw == "ABS") { advance(); return parse_fn_args(ExprKind::Abs, 1); }
        if (kw == "LN") { advance(); return parse_fn_args(ExprKind::Ln, 1); }
        if (kw == "EXP") { advance(); return parse_fn_args(ExprKind::ExpFn, 1); }
        if (kw == "SQRT") { advance(); return parse_fn_args(ExprKind::Sqrt, 1); }
        if (kw == "FLOOR") { advance(); return parse_fn_args(ExprKind::Floor, 1); }
        if (kw == "CEIL" || kw == "CEILING") {
            advance();
            ExprPtr e = parse_fn_args(ExprKind::Ceil, 1);
            e->ceil_spelling = kw == "CEIL" ? CeilSpelling::Ceil : CeilSpelling::Ceiling;
            return e;
        }
        if (kw == "LENGTH" || kw == "CHAR_LENGTH" || kw == "CHARACTER_LENGTH") {
            advance();
            ExprPtr e = parse_fn_args(ExprKind::Length, 1);
            e->length_spelling = kw == "LENGTH"        ? LengthSpelling::Length
                                 : kw == "CHAR_LENGTH" ? LengthSpelling::CharLength
                                                       : LengthSpelling::CharacterLength;
            return e;
        }
        if (kw == "LTRIM" || kw == "RTRIM") {
            advance();
            ExprPtr e = parse_fn_args(ExprKind::Trim, 1);
            e->trim_left = kw == "LTRIM";
            return e;
        }
        if (kw == "UPPER" || kw == "LOWER") {
            advance();
            ExprPtr e = parse_fn_args(ExprKind::Fold, 1);
            e->fold_upper = kw == "UPPER";
            return e;
        }
        unexpected({"expression"});
    }
};

}  // namespace

SyntaxError::SyntaxError(size_t offset, std::vector<std::string> expected, std::string found)
    : EngineError(ErrorKind::Syntax,
                  [&] {
                      std::string msg = "syntax error at byte " + std::to_string(offset);
                      if (!found.empty()) msg += ": found " + found;
                      if (!expected.empty()) {
                          msg += " (expected";
                          for (const std::string& e : expected) msg += " " + e;
                          msg += ")";
                      }
                      return msg;
                  }()),
      offset_(offset),
      expected_(std::move(expected)) {}

QueryPtr parse(const std::string& text) { return Parser(text).parse_statement(); }

ExprPtr parse_expression(const std::string& text) { return Parser(text).parse_lone_expression(); }

}  // namespace sqlsem
