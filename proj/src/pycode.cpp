#include "augsearch/pycode.hpp"

#include <cctype>
#include <set>
#include <sstream>

#include "augsearch/errors.hpp"

namespace augsearch::baselines::py {

namespace {

struct Token {
    std::string text;
    enum class Kind { Ident, Int, Float, Str, Op } kind = Kind::Op;
};

bool ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

std::vector<Token> lex_line(const std::string& line, long line_no) {
    std::vector<Token> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        char c = line[i];
        if (c == ' ') {
            ++i;
            continue;
        }
        if (c == '\t')
            throw ParseError("line " + std::to_string(line_no) + ": tab indentation/spacing "
                             "is not supported",
                             line_no);
        if (c == '#') break;
        if (ident_start(c)) {
            std::size_t j = i;
            while (j < line.size() && ident_char(line[j])) ++j;
            tokens.push_back({line.substr(i, j - i), Token::Kind::Ident});
            i = j;
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && i + 1 < line.size() &&
             std::isdigit(static_cast<unsigned char>(line[i + 1])))) {
            std::size_t j = i;
            bool is_float = false;
            while (j < line.size() &&
                   (std::isdigit(static_cast<unsigned char>(line[j])) || line[j] == '.')) {
                if (line[j] == '.') is_float = true;
                ++j;
            }
            tokens.push_back({line.substr(i, j - i),
                              is_float ? Token::Kind::Float : Token::Kind::Int});
            i = j;
            continue;
        }
        if (c == '"' || c == '\'') {
            char quote = c;
            std::string value;
            std::size_t j = i + 1;
            while (j < line.size() && line[j] != quote) {
                if (line[j] == '\\' && j + 1 < line.size()) {
                    char esc = line[j + 1];
                    switch (esc) {
                        case 'n': value += '\n'; break;
                        case 't': value += '\t'; break;
                        case '\\': value += '\\'; break;
                        case '\'': value += '\''; break;
                        case '"': value += '"'; break;
                        default: value += esc; break;
                    }
                    j += 2;
                } else {
                    value += line[j];
                    ++j;
                }
            }
            if (j >= line.size())
                throw ParseError("line " + std::to_string(line_no) + ": unterminated string",
                                 line_no);
            tokens.push_back({value, Token::Kind::Str});
            i = j + 1;
            continue;
        }
        static const char* two_char[] = {"**", "//", "<=", ">=", "==", "!="};
        bool matched = false;
        for (const char* op : two_char) {
            if (line.compare(i, 2, op) == 0) {
                tokens.push_back({op, Token::Kind::Op});
                i += 2;
                matched = true;
                break;
            }
        }
        if (matched) continue;
        static const std::string single = "+-*/%<>=()[],.:";
        if (single.find(c) != std::string::npos) {
            tokens.push_back({std::string(1, c), Token::Kind::Op});
            ++i;
            continue;
        }
        throw ParseError("line " + std::to_string(line_no) + ": unexpected character '" +
                         std::string(1, c) + "'",
                         line_no);
    }
    return tokens;
}

struct Line {
    int indent = 0;
    std::vector<Token> tokens;
    long number = 0;
};

std::vector<Line> lex_lines(const std::string& code) {
    std::vector<Line> lines;
    std::istringstream in(code);
    std::string raw;
    long line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::size_t indent = 0;
        while (indent < raw.size() && raw[indent] == ' ') ++indent;
        if (indent < raw.size() && raw[indent] == '\t')
            throw ParseError("line " + std::to_string(line_no) + ": tab indentation",
                             line_no);
        auto tokens = lex_line(raw.substr(indent), line_no);
        if (tokens.empty()) continue;
        lines.push_back({static_cast<int>(indent), std::move(tokens), line_no});
    }
    return lines;
}

// ---- expression parsing (precedence climbing) ----

class ExprParser {
public:
    ExprParser(const std::vector<Token>& tokens, long line_no)
        : tokens_(tokens), line_(line_no) {}

    ExprPtr parse() {
        auto e = parse_or();
        return e;
    }

    bool done() const { return pos_ >= tokens_.size(); }
    std::size_t pos() const { return pos_; }
    void set_pos(std::size_t p) { pos_ = p; }

    const Token* peek() const { return pos_ < tokens_.size() ? &tokens_[pos_] : nullptr; }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError("line " + std::to_string(line_) + ": " + msg, line_);
    }

private:
    const std::vector<Token>& tokens_;
    long line_;
    std::size_t pos_ = 0;

    bool accept(const std::string& text, Token::Kind kind = Token::Kind::Op) {
        if (pos_ < tokens_.size() && tokens_[pos_].text == text &&
            tokens_[pos_].kind == kind) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(const std::string& text) {
        if (!accept(text) && !accept(text, Token::Kind::Ident))
            fail("expected '" + text + "'");
    }

    ExprPtr make_binary(std::string op, ExprPtr lhs, ExprPtr rhs) {
        auto e = std::make_unique<Expr>();
        e->kind = Expr::Kind::Binary;
        e->op = std::move(op);
        e->lhs = std::move(lhs);
        e->rhs = std::move(rhs);
        return e;
    }

    ExprPtr parse_or() {
        auto lhs = parse_and();
        while (accept("or", Token::Kind::Ident)) lhs = make_binary("or", std::move(lhs), parse_and());
        return lhs;
    }

    ExprPtr parse_and() {
        auto lhs = parse_not();
        while (accept("and", Token::Kind::Ident))
            lhs = make_binary("and", std::move(lhs), parse_not());
        return lhs;
    }

    ExprPtr parse_not() {
        if (accept("not", Token::Kind::Ident)) {
            auto e = std::make_unique<Expr>();
            e->kind = Expr::Kind::Unary;
            e->op = "not";
            e->lhs = parse_not();
            return e;
        }
        return parse_comparison();
    }

    ExprPtr parse_comparison() {
        auto lhs = parse_add();
        static const char* ops[] = {"==", "!=", "<=", ">=", "<", ">"};
        for (const char* op : ops) {
            if (accept(op)) return make_binary(op, std::move(lhs), parse_add());
        }
        return lhs;
    }

    ExprPtr parse_add() {
        auto lhs = parse_mul();
        while (true) {
            if (accept("+"))
                lhs = make_binary("+", std::move(lhs), parse_mul());
            else if (accept("-"))
                lhs = make_binary("-", std::move(lhs), parse_mul());
            else
                break;
        }
        return lhs;
    }

    ExprPtr parse_mul() {
        auto lhs = parse_unary();
        while (true) {
            if (accept("*"))
                lhs = make_binary("*", std::move(lhs), parse_unary());
            else if (accept("//"))
                lhs = make_binary("//", std::move(lhs), parse_unary());
            else if (accept("/"))
                lhs = make_binary("/", std::move(lhs), parse_unary());
            else if (accept("%"))
                lhs = make_binary("%", std::move(lhs), parse_unary());
            else
                break;
        }
        return lhs;
    }

    ExprPtr parse_unary() {
        if (accept("-")) {
            auto e = std::make_unique<Expr>();
            e->kind = Expr::Kind::Unary;
            e->op = "-";
            e->lhs = parse_unary();
            return e;
        }
        return parse_power();
    }

    ExprPtr parse_power() {
        auto base = parse_postfix();
        if (accept("**")) return make_binary("**", std::move(base), parse_unary());
        return base;
    }

    ExprPtr parse_postfix() {
        auto e = parse_atom();
        while (true) {
            if (accept("(")) {
                auto call = std::make_unique<Expr>();
                call->kind = Expr::Kind::Call;
                call->callee = std::move(e);
                if (!accept(")")) {
                    do {
                        call->args.push_back(parse());
                    } while (accept(","));
                    expect(")");
                }
                e = std::move(call);
            } else if (accept(".")) {
                const Token* t = peek();
                if (!t || t->kind != Token::Kind::Ident) fail("expected attribute name");
                auto attr = std::make_unique<Expr>();
                attr->kind = Expr::Kind::Attribute;
                attr->name = t->text;
                ++pos_;
                attr->lhs = std::move(e);
                e = std::move(attr);
            } else if (accept("[")) {
                auto sub = std::make_unique<Expr>();
                sub->kind = Expr::Kind::Subscript;
                sub->lhs = std::move(e);
                sub->rhs = parse();
                expect("]");
                e = std::move(sub);
            } else {
                break;
            }
        }
        return e;
    }

    ExprPtr parse_atom() {
        const Token* t = peek();
        if (!t) fail("unexpected end of expression");
        auto e = std::make_unique<Expr>();
        if (t->kind == Token::Kind::Int) {
            e->kind = Expr::Kind::IntLit;
            e->int_value = std::stoll(t->text);
            ++pos_;
            return e;
        }
        if (t->kind == Token::Kind::Float) {
            e->kind = Expr::Kind::FloatLit;
            e->float_value = std::stod(t->text);
            e->str_value = t->text;  // lexeme kept for exact re-rendering
            ++pos_;
            return e;
        }
        if (t->kind == Token::Kind::Str) {
            e->kind = Expr::Kind::StrLit;
            e->str_value = t->text;
            ++pos_;
            return e;
        }
        if (t->kind == Token::Kind::Ident) {
            if (t->text == "True" || t->text == "False") {
                e->kind = Expr::Kind::BoolLit;
                e->bool_value = t->text == "True";
                ++pos_;
                return e;
            }
            if (t->text == "None") {
                e->kind = Expr::Kind::NoneLit;
                ++pos_;
                return e;
            }
            e->kind = Expr::Kind::Name;
            e->name = t->text;
            ++pos_;
            return e;
        }
        if (accept("(")) {
            auto inner = parse();
            expect(")");
            return inner;
        }
        if (accept("[")) {
            e->kind = Expr::Kind::ListLit;
            if (!accept("]")) {
                do {
                    e->args.push_back(parse());
                } while (accept(","));
                expect("]");
            }
            return e;
        }
        fail("unexpected token '" + t->text + "'");
    }
};

// ---- statement parsing ----

class BlockParser {
public:
    explicit BlockParser(std::vector<Line> lines) : lines_(std::move(lines)) {}

    Module parse() {
        Module m;
        m.body = parse_block(0);
        if (pos_ < lines_.size())
            throw ParseError("line " + std::to_string(lines_[pos_].number) +
                                 ": unexpected indentation",
                             lines_[pos_].number);
        return m;
    }

private:
    std::vector<Line> lines_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const Line& line, const std::string& msg) {
        throw ParseError("line " + std::to_string(line.number) + ": " + msg, line.number);
    }

    std::vector<StmtPtr> parse_block(int indent) {
        std::vector<StmtPtr> body;
        while (pos_ < lines_.size() && lines_[pos_].indent == indent)
            body.push_back(parse_stmt(indent));
        if (pos_ < lines_.size() && lines_[pos_].indent > indent)
            fail(lines_[pos_], "unexpected indentation");
        return body;
    }

    std::vector<StmtPtr> parse_suite(const Line& header, int indent) {
        if (pos_ >= lines_.size() || lines_[pos_].indent <= indent)
            fail(header, "expected an indented block");
        int inner = lines_[pos_].indent;
        std::vector<StmtPtr> body;
        while (pos_ < lines_.size() && lines_[pos_].indent == inner)
            body.push_back(parse_stmt(inner));
        if (pos_ < lines_.size() && lines_[pos_].indent > indent &&
            lines_[pos_].indent != inner)
            fail(lines_[pos_], "inconsistent indentation");
        return body;
    }

    bool is_kw(const Token& t, const char* kw) {
        return t.kind == Token::Kind::Ident && t.text == kw;
    }

    ExprPtr parse_full_expr(const Line& line, std::size_t from, std::size_t to) {
        std::vector<Token> slice(line.tokens.begin() + from, line.tokens.begin() + to);
        ExprParser p(slice, line.number);
        auto e = p.parse();
        if (!p.done()) fail(line, "trailing tokens after expression");
        return e;
    }

    StmtPtr parse_stmt(int indent) {
        const Line line = lines_[pos_];
        const auto& toks = line.tokens;
        auto stmt = std::make_unique<Stmt>();

        if (is_kw(toks[0], "def")) {
            ++pos_;
            if (toks.size() < 5 || toks[1].kind != Token::Kind::Ident)
                fail(line, "malformed def");
            stmt->kind = Stmt::Kind::FuncDef;
            stmt->name = toks[1].text;
            std::size_t i = 2;
            if (toks[i].text != "(") fail(line, "expected '(' after function name");
            ++i;
            while (toks[i].text != ")") {
                if (toks[i].kind != Token::Kind::Ident) fail(line, "malformed parameter list");
                stmt->params.push_back(toks[i].text);
                ++i;
                if (toks[i].text == ",") ++i;
            }
            ++i;
            if (i >= toks.size() || toks[i].text != ":") fail(line, "expected ':'");
            if (i + 1 != toks.size()) fail(line, "trailing tokens after ':'");
            stmt->body = parse_suite(line, indent);
            return stmt;
        }
        if (is_kw(toks[0], "if")) {
            ++pos_;
            if (toks.back().text != ":") fail(line, "expected ':'");
            stmt->kind = Stmt::Kind::If;
            stmt->cond = parse_full_expr(line, 1, toks.size() - 1);
            stmt->body = parse_suite(line, indent);
            if (pos_ < lines_.size() && lines_[pos_].indent == indent &&
                is_kw(lines_[pos_].tokens[0], "else")) {
                const Line else_line = lines_[pos_];
                if (else_line.tokens.size() != 2 || else_line.tokens[1].text != ":")
                    fail(else_line, "malformed else");
                ++pos_;
                stmt->orelse = parse_suite(else_line, indent);
            }
            return stmt;
        }
        if (is_kw(toks[0], "while")) {
            ++pos_;
            if (toks.back().text != ":") fail(line, "expected ':'");
            stmt->kind = Stmt::Kind::While;
            stmt->cond = parse_full_expr(line, 1, toks.size() - 1);
            stmt->body = parse_suite(line, indent);
            return stmt;
        }
        if (is_kw(toks[0], "for")) {
            ++pos_;
            if (toks.size() < 5 || toks[1].kind != Token::Kind::Ident ||
                !is_kw(toks[2], "in") || toks.back().text != ":")
                fail(line, "malformed for");
            stmt->kind = Stmt::Kind::For;
            stmt->name = toks[1].text;
            stmt->cond = parse_full_expr(line, 3, toks.size() - 1);
            stmt->body = parse_suite(line, indent);
            return stmt;
        }
        if (is_kw(toks[0], "return")) {
            ++pos_;
            stmt->kind = Stmt::Kind::Return;
            if (toks.size() > 1) stmt->value = parse_full_expr(line, 1, toks.size());
            return stmt;
        }
        if (is_kw(toks[0], "pass")) {
            ++pos_;
            if (toks.size() != 1) fail(line, "trailing tokens after pass");
            stmt->kind = Stmt::Kind::Pass;
            return stmt;
        }
        if (toks.size() >= 2 && toks[0].kind == Token::Kind::Ident && toks[1].text == "=" &&
            toks[1].kind == Token::Kind::Op) {
            ++pos_;
            stmt->kind = Stmt::Kind::Assign;
            stmt->name = toks[0].text;
            stmt->value = parse_full_expr(line, 2, toks.size());
            return stmt;
        }
        ++pos_;
        stmt->kind = Stmt::Kind::ExprStmt;
        stmt->value = parse_full_expr(line, 0, toks.size());
        return stmt;
    }
};

// ---- rendering ----

int binary_prec(const std::string& op) {
    if (op == "or") return 1;
    if (op == "and") return 2;
    if (op == "==" || op == "!=" || op == "<" || op == "<=" || op == ">" || op == ">=")
        return 4;
    if (op == "+" || op == "-") return 5;
    if (op == "*" || op == "/" || op == "//" || op == "%") return 6;
    if (op == "**") return 8;
    return 0;
}

void render_expr_prec(const Expr& e, int parent_prec, bool right_side, std::string& out);

void render_child(const Expr& child, int my_prec, bool right_side, std::string& out) {
    render_expr_prec(child, my_prec, right_side, out);
}

int expr_prec(const Expr& e) {
    switch (e.kind) {
        case Expr::Kind::Binary: return binary_prec(e.op);
        case Expr::Kind::Unary: return e.op == "not" ? 3 : 7;
        default: return 10;
    }
}

void render_expr_prec(const Expr& e, int parent_prec, bool right_side, std::string& out) {
    int my_prec = expr_prec(e);
    bool parens = my_prec < parent_prec || (my_prec == parent_prec && right_side);
    if (parens) out += '(';
    switch (e.kind) {
        case Expr::Kind::Name:
            out += e.name;
            break;
        case Expr::Kind::IntLit:
            out += std::to_string(e.int_value);
            break;
        case Expr::Kind::FloatLit:
            out += e.str_value;
            break;
        case Expr::Kind::StrLit: {
            out += '"';
            for (char c : e.str_value) {
                switch (c) {
                    case '\\': out += "\\\\"; break;
                    case '"': out += "\\\""; break;
                    case '\n': out += "\\n"; break;
                    case '\t': out += "\\t"; break;
                    default: out += c; break;
                }
            }
            out += '"';
            break;
        }
        case Expr::Kind::BoolLit:
            out += e.bool_value ? "True" : "False";
            break;
        case Expr::Kind::NoneLit:
            out += "None";
            break;
        case Expr::Kind::Unary:
            if (e.op == "not") {
                out += "not ";
                render_child(*e.lhs, 3, false, out);
            } else {
                out += '-';
                render_child(*e.lhs, 7, false, out);
            }
            break;
        case Expr::Kind::Binary: {
            int p = binary_prec(e.op);
            // ** is right-associative; everything else is left-associative
            bool rassoc = e.op == "**";
            render_child(*e.lhs, rassoc ? p + 1 : p, false, out);
            out += ' ';
            out += e.op;
            out += ' ';
            render_child(*e.rhs, rassoc ? p : p + 1, true, out);
            break;
        }
        case Expr::Kind::Call: {
            render_child(*e.callee, 9, false, out);
            out += '(';
            for (std::size_t i = 0; i < e.args.size(); ++i) {
                if (i) out += ", ";
                render_child(*e.args[i], 0, false, out);
            }
            out += ')';
            break;
        }
        case Expr::Kind::Attribute:
            render_child(*e.lhs, 9, false, out);
            out += '.';
            out += e.name;
            break;
        case Expr::Kind::Subscript:
            render_child(*e.lhs, 9, false, out);
            out += '[';
            render_child(*e.rhs, 0, false, out);
            out += ']';
            break;
        case Expr::Kind::ListLit:
            out += '[';
            for (std::size_t i = 0; i < e.args.size(); ++i) {
                if (i) out += ", ";
                render_child(*e.args[i], 0, false, out);
            }
            out += ']';
            break;
    }
    if (parens) out += ')';
}

void render_block(const std::vector<StmtPtr>& body, int indent, std::string& out);

void render_stmt(const Stmt& s, int indent, std::string& out) {
    std::string pad(static_cast<std::size_t>(indent) * 4, ' ');
    out += pad;
    switch (s.kind) {
        case Stmt::Kind::ExprStmt:
            render_expr_prec(*s.value, 0, false, out);
            out += '\n';
            break;
        case Stmt::Kind::Assign:
            out += s.name;
            out += " = ";
            render_expr_prec(*s.value, 0, false, out);
            out += '\n';
            break;
        case Stmt::Kind::Return:
            out += "return";
            if (s.value) {
                out += ' ';
                render_expr_prec(*s.value, 0, false, out);
            }
            out += '\n';
            break;
        case Stmt::Kind::Pass:
            out += "pass\n";
            break;
        case Stmt::Kind::If:
            out += "if ";
            render_expr_prec(*s.cond, 0, false, out);
            out += ":\n";
            render_block(s.body, indent + 1, out);
            if (!s.orelse.empty()) {
                out += pad;
                out += "else:\n";
                render_block(s.orelse, indent + 1, out);
            }
            break;
        case Stmt::Kind::While:
            out += "while ";
            render_expr_prec(*s.cond, 0, false, out);
            out += ":\n";
            render_block(s.body, indent + 1, out);
            break;
        case Stmt::Kind::For:
            out += "for ";
            out += s.name;
            out += " in ";
            render_expr_prec(*s.cond, 0, false, out);
            out += ":\n";
            render_block(s.body, indent + 1, out);
            break;
        case Stmt::Kind::FuncDef: {
            out += "def ";
            out += s.name;
            out += '(';
            for (std::size_t i = 0; i < s.params.size(); ++i) {
                if (i) out += ", ";
                out += s.params[i];
            }
            out += "):\n";
            render_block(s.body, indent + 1, out);
            break;
        }
    }
}

void render_block(const std::vector<StmtPtr>& body, int indent, std::string& out) {
    for (const auto& s : body) render_stmt(*s, indent, out);
}

}  // namespace

ExprPtr Expr::clone() const {
    auto e = std::make_unique<Expr>();
    e->kind = kind;
    e->name = name;
    e->op = op;
    e->int_value = int_value;
    e->float_value = float_value;
    e->str_value = str_value;
    e->bool_value = bool_value;
    if (lhs) e->lhs = lhs->clone();
    if (rhs) e->rhs = rhs->clone();
    if (callee) e->callee = callee->clone();
    for (const auto& a : args) e->args.push_back(a->clone());
    return e;
}

StmtPtr Stmt::clone() const {
    auto s = std::make_unique<Stmt>();
    s->kind = kind;
    s->name = name;
    s->params = params;
    if (value) s->value = value->clone();
    if (cond) s->cond = cond->clone();
    for (const auto& b : body) s->body.push_back(b->clone());
    for (const auto& b : orelse) s->orelse.push_back(b->clone());
    return s;
}

Module Module::clone() const {
    Module m;
    for (const auto& s : body) m.body.push_back(s->clone());
    return m;
}

Module parse_module(const std::string& code) {
    BlockParser parser(lex_lines(code));
    return parser.parse();
}

std::string render(const Module& module) {
    std::string out;
    render_block(module.body, 0, out);
    return out;
}

std::string render_expr(const Expr& expr) {
    std::string out;
    render_expr_prec(expr, 0, false, out);
    return out;
}

bool expr_equal(const Expr& a, const Expr& b) {
    return render_expr(a) == render_expr(b);
}

namespace {
bool stmt_equal(const Stmt& a, const Stmt& b) {
    std::string sa, sb;
    render_stmt(a, 0, sa);
    render_stmt(b, 0, sb);
    return sa == sb;
}
}  // namespace

bool module_equal(const Module& a, const Module& b) {
    if (a.body.size() != b.body.size()) return false;
    for (std::size_t i = 0; i < a.body.size(); ++i)
        if (!stmt_equal(*a.body[i], *b.body[i])) return false;
    return true;
}

std::vector<std::string> lex_tokens(const std::string& code) {
    std::vector<std::string> out;
    for (const auto& line : lex_lines(code))
        for (const auto& t : line.tokens) out.push_back(t.text);
    return out;
}

namespace {
void collect_expr_names(const Expr& e, std::set<std::string>& names) {
    if (e.kind == Expr::Kind::Name) names.insert(e.name);
    if (e.kind == Expr::Kind::Attribute) names.insert(e.name);
    if (e.lhs) collect_expr_names(*e.lhs, names);
    if (e.rhs) collect_expr_names(*e.rhs, names);
    if (e.callee) collect_expr_names(*e.callee, names);
    for (const auto& a : e.args) collect_expr_names(*a, names);
}

void collect_stmt_names(const Stmt& s, std::set<std::string>& names) {
    if (!s.name.empty()) names.insert(s.name);
    for (const auto& p : s.params) names.insert(p);
    if (s.value) collect_expr_names(*s.value, names);
    if (s.cond) collect_expr_names(*s.cond, names);
    for (const auto& b : s.body) collect_stmt_names(*b, names);
    for (const auto& b : s.orelse) collect_stmt_names(*b, names);
}
}  // namespace

std::vector<std::string> collect_names(const Module& module) {
    std::set<std::string> names;
    for (const auto& s : module.body) collect_stmt_names(*s, names);
    return {names.begin(), names.end()};
}

}  // namespace augsearch::baselines::py
