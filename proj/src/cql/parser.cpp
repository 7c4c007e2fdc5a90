#include "fogsense/cql/parser.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <optional>

namespace fogsense::cql {

namespace {

std::string describe(const std::vector<std::string>& expected) {
    std::string out;
    for (std::size_t i = 0; i < expected.size(); ++i) {
        out += (i == 0 ? "" : ", ") + expected[i];
    }
    return out;
}

enum class Tok { Word, Number, String, LParen, RParen, Star, Cmp, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;  // raw text; for String the unescaped contents
    std::size_t pos = 0;
    double number = 0;
    Comparator cmp = Comparator::Eq;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            skip_space();
            Token t;
            t.pos = i_;
            if (i_ >= src_.size()) {
                t.kind = Tok::End;
                out.push_back(t);
                return out;
            }
            const char c = src_[i_];
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                const auto start = i_;
                while (i_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[i_])) || src_[i_] == '_' ||
                                            src_[i_] == '.')) {
                    ++i_;
                }
                t.kind = Tok::Word;
                t.text = std::string(src_.substr(start, i_ - start));
            } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '.') {
                lex_number(t);
            } else if (c == '\'') {
                lex_string(t);
            } else if (c == '(') {
                t.kind = Tok::LParen;
                t.text = "(";
                ++i_;
            } else if (c == ')') {
                t.kind = Tok::RParen;
                t.text = ")";
                ++i_;
            } else if (c == '*') {
                t.kind = Tok::Star;
                t.text = "*";
                ++i_;
            } else if (!lex_comparator(t)) {
                throw ParseError(i_, {"token"}, std::string(1, c));
            }
            out.push_back(std::move(t));
        }
    }

private:
    void skip_space() {
        while (i_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[i_]))) {
            ++i_;
        }
    }

    void lex_number(Token& t) {
        const auto start = i_;
        if (src_[i_] == '-') ++i_;
        while (i_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[i_])) || src_[i_] == '.')) ++i_;
        if (i_ < src_.size() && (src_[i_] == 'e' || src_[i_] == 'E')) {
            ++i_;
            if (i_ < src_.size() && (src_[i_] == '+' || src_[i_] == '-')) ++i_;
            while (i_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_]))) ++i_;
        }
        t.kind = Tok::Number;
        t.text = std::string(src_.substr(start, i_ - start));
        const auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.number);
        if (ec != std::errc{} || ptr != t.text.data() + t.text.size() || !std::isfinite(t.number)) {
            throw ParseError(start, {"number"}, t.text);
        }
    }

    void lex_string(Token& t) {
        const auto start = i_;
        ++i_;
        std::string value;
        for (;;) {
            if (i_ >= src_.size()) {
                throw ParseError(start, {"closing quote"}, "end of input");
            }
            if (src_[i_] == '\'') {
                if (i_ + 1 < src_.size() && src_[i_ + 1] == '\'') {
                    value += '\'';
                    i_ += 2;
                    continue;
                }
                ++i_;
                break;
            }
            value += src_[i_++];
        }
        t.kind = Tok::String;
        t.text = std::move(value);
    }

    bool lex_comparator(Token& t) {
        struct Spelling {
            std::string_view text;
            Comparator op;
        };
        // Longest spellings first.
        static constexpr Spelling spellings[] = {
            {"<=", Comparator::Le},         {">=", Comparator::Ge},         {"!=", Comparator::Ne},
            {"<>", Comparator::Ne},         {"≤", Comparator::Le},     {"≥", Comparator::Ge},
            {"≠", Comparator::Ne},     {"=", Comparator::Eq},          {"<", Comparator::Lt},
            {">", Comparator::Gt},
        };
        for (const auto& s : spellings) {
            if (src_.substr(i_, s.text.size()) == s.text) {
                t.kind = Tok::Cmp;
                t.text = std::string(s.text);
                t.cmp = s.op;
                i_ += s.text.size();
                return true;
            }
        }
        return false;
    }

    std::string_view src_;
    std::size_t i_ = 0;
};

std::string upper(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::toupper(c); });
    return out;
}

class Parser {
public:
    explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

    QueryAst query() {
        QueryAst ast;
        keyword("SELECT");
        const auto& agg = peek();
        std::optional<Aggregate> a;
        if (agg.kind == Tok::Word) {
            a = parse_aggregate(upper(agg.text));
        }
        if (!a) {
            fail({"COUNT", "SUM", "AVG", "MIN", "MAX", "LAST"});
        }
        ast.aggregate = *a;
        ++i_;
        expect(Tok::LParen, "(");
        if (peek().kind == Tok::Star) {
            ast.field = "*";
            ++i_;
        } else {
            ast.field = word("field name or *");
        }
        expect(Tok::RParen, ")");
        keyword("FROM");
        ast.stream = word("stream name");
        if (is_keyword("WHERE")) {
            ++i_;
            ast.where.push_back(comparison());
            while (is_keyword("AND")) {
                ++i_;
                ast.where.push_back(comparison());
            }
        }
        if (!is_keyword("WINDOW")) {
            fail(ast.where.empty() ? std::vector<std::string>{"WHERE", "WINDOW"}
                                   : std::vector<std::string>{"AND", "WINDOW"});
        }
        ++i_;
        if (is_keyword("TIME")) {
            ast.window = WindowKind::Time;
        } else if (is_keyword("COUNT")) {
            ast.window = WindowKind::Count;
        } else {
            fail({"TIME", "COUNT"});
        }
        ++i_;
        ast.size = integer();
        ast.every = ast.size;
        if (is_keyword("EVERY")) {
            ++i_;
            ast.every = integer();
        }
        if (peek().kind != Tok::End) {
            fail({"EVERY", "end of query"});
        }
        validate(ast);
        return ast;
    }

private:
    const Token& peek() const { return toks_[i_]; }

    [[noreturn]] void fail(std::vector<std::string> expected) const {
        const auto& t = peek();
        throw ParseError(t.pos, std::move(expected), t.kind == Tok::End ? "end of query" : t.text);
    }

    bool is_keyword(std::string_view kw) const { return peek().kind == Tok::Word && upper(peek().text) == kw; }

    void keyword(std::string_view kw) {
        if (!is_keyword(kw)) {
            fail({std::string(kw)});
        }
        ++i_;
    }

    void expect(Tok kind, std::string_view what) {
        if (peek().kind != kind) {
            fail({std::string(what)});
        }
        ++i_;
    }

    std::string word(std::string_view what) {
        if (peek().kind != Tok::Word) {
            fail({std::string(what)});
        }
        return toks_[i_++].text;
    }

    std::int64_t integer() {
        const auto& t = peek();
        if (t.kind != Tok::Number || t.number != std::floor(t.number) || std::fabs(t.number) > 9.0e15) {
            fail({"integer"});
        }
        ++i_;
        return static_cast<std::int64_t>(t.number);
    }

    Comparison comparison() {
        Comparison c;
        c.field = word("field name");
        if (peek().kind != Tok::Cmp) {
            fail({"=", "!=", "<", "<=", ">", ">="});
        }
        c.op = toks_[i_++].cmp;
        const auto& lit = peek();
        if (lit.kind == Tok::Number) {
            c.literal = lit.number;
        } else if (lit.kind == Tok::String) {
            c.literal = lit.text;
        } else {
            fail({"number", "string literal"});
        }
        ++i_;
        return c;
    }

    std::vector<Token> toks_;
    std::size_t i_ = 0;
};

}  // namespace

ParseError::ParseError(std::size_t position, std::vector<std::string> expected, std::string found)
    : std::invalid_argument("parse error at " + std::to_string(position) + ": expected " + describe(expected) +
                            " but found '" + found + "'"),
      position_(position),
      expected_(std::move(expected)),
      found_(std::move(found)) {}

QueryAst parse(std::string_view text) {
    Lexer lexer(text);
    Parser parser(lexer.run());
    return parser.query();
}

}  // namespace fogsense::cql
