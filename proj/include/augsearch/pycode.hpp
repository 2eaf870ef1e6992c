#pragma once
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace augsearch::baselines::py {

// Python-subset tree: function defs, assignments, for/while loops, if/else,
// binary ops, calls, returns, names, literals. render(parse(code)) reparses
// to an identical tree.

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

struct Expr {
    enum class Kind {
        Name,
        IntLit,
        FloatLit,
        StrLit,
        BoolLit,
        NoneLit,
        Unary,      // op in {"-", "not"}, operand = lhs
        Binary,     // op in {+ - * / // % ** == != < <= > >= and or}
        Call,       // callee(args)
        Attribute,  // lhs.name
        Subscript,  // lhs[rhs]
        ListLit,    // [args...]
    };
    Kind kind = Kind::Name;
    std::string name;       // Name id / Attribute member
    std::string op;         // Unary / Binary operator
    long long int_value = 0;
    double float_value = 0;
    std::string str_value;  // raw contents without quotes
    bool bool_value = false;
    ExprPtr lhs, rhs;
    ExprPtr callee;
    std::vector<ExprPtr> args;

    ExprPtr clone() const;
};

struct Stmt;
using StmtPtr = std::unique_ptr<Stmt>;

struct Stmt {
    enum class Kind {
        ExprStmt,  // value
        Assign,    // target = value
        Return,    // optional value
        Pass,
        If,        // cond, body, orelse (possibly empty)
        While,     // cond, body
        For,       // var, iter, body
        FuncDef,   // name, params, body
    };
    Kind kind = Kind::Pass;
    std::string name;                 // Assign target / For var / FuncDef name
    std::vector<std::string> params;  // FuncDef
    ExprPtr value;                    // ExprStmt / Assign / Return
    ExprPtr cond;                     // If / While / For iter
    std::vector<StmtPtr> body;
    std::vector<StmtPtr> orelse;

    StmtPtr clone() const;
};

struct Module {
    std::vector<StmtPtr> body;
    Module clone() const;
};

Module parse_module(const std::string& code);  // ParseError with line number
std::string render(const Module& module);
std::string render_expr(const Expr& expr);

bool expr_equal(const Expr& a, const Expr& b);
bool module_equal(const Module& a, const Module& b);

// Flat lexical token stream of a source string; used for subsequence checks.
std::vector<std::string> lex_tokens(const std::string& code);

// All names referenced anywhere in the module (targets, loop vars, params,
// call targets, attribute members included).
std::vector<std::string> collect_names(const Module& module);

}  // namespace augsearch::baselines::py
