#include "augsearch/natgen.hpp"

#include <random>
#include <set>
#include <unordered_set>

#include "augsearch/errors.hpp"

namespace augsearch::baselines {

namespace py = augsearch::baselines::py;
using py::Expr;
using py::Module;
using py::Stmt;
using py::StmtPtr;

namespace {

bool is_range_call(const Expr& e) {
    return e.kind == Expr::Kind::Call && e.callee && e.callee->kind == Expr::Kind::Name &&
           e.callee->name == "range" && !e.args.empty() && e.args.size() <= 3;
}

// step must be a literal int (possibly negated) so the while condition
// direction is known
bool literal_step(const Expr& e, long long& out) {
    if (e.kind == Expr::Kind::IntLit) {
        out = e.int_value;
        return true;
    }
    if (e.kind == Expr::Kind::Unary && e.op == "-" && e.lhs &&
        e.lhs->kind == Expr::Kind::IntLit) {
        out = -e.lhs->int_value;
        return true;
    }
    return false;
}

bool numeric_by_inspection(const Expr& e) {
    switch (e.kind) {
        case Expr::Kind::IntLit:
        case Expr::Kind::FloatLit:
        case Expr::Kind::BoolLit:
            return true;
        case Expr::Kind::Unary:
            return e.op == "-" && numeric_by_inspection(*e.lhs);
        case Expr::Kind::Binary:
            if (e.op == "+" || e.op == "-" || e.op == "*" || e.op == "/" || e.op == "//" ||
                e.op == "%" || e.op == "**")
                return numeric_by_inspection(*e.lhs) && numeric_by_inspection(*e.rhs);
            return false;
        default:
            return false;
    }
}

bool swappable(const Expr& e) {
    if (e.kind != Expr::Kind::Binary) return false;
    const std::string& op = e.op;
    if (op == "*" || op == "==" || op == "!=") return true;
    if (op == "<" || op == "<=" || op == ">" || op == ">=") return true;
    if (op == "+") return numeric_by_inspection(*e.lhs) && numeric_by_inspection(*e.rhs);
    return false;
}

struct Sites {
    std::vector<Stmt*> range_loops;
    std::vector<std::pair<std::vector<StmtPtr>*, std::size_t>> insert_points;
    std::vector<Expr*> swap_ops;
    std::vector<Stmt*> if_else;
    std::set<std::string> local_vars;
};

void collect_expr_sites(Expr& e, Sites& sites) {
    if (swappable(e)) sites.swap_ops.push_back(&e);
    if (e.lhs) collect_expr_sites(*e.lhs, sites);
    if (e.rhs) collect_expr_sites(*e.rhs, sites);
    if (e.callee) collect_expr_sites(*e.callee, sites);
    for (auto& a : e.args) collect_expr_sites(*a, sites);
}

// `insertable` marks blocks the renderer actually emits; only those may
// receive injected statements.
void collect_block_sites(std::vector<StmtPtr>& block, Sites& sites, bool insertable) {
    if (insertable) {
        for (std::size_t i = 0; i <= block.size(); ++i)
            sites.insert_points.push_back({&block, i});
    }
    for (auto& sp : block) {
        Stmt& s = *sp;
        bool body_insertable = false;
        switch (s.kind) {
            case Stmt::Kind::Assign:
                sites.local_vars.insert(s.name);
                break;
            case Stmt::Kind::For:
                sites.local_vars.insert(s.name);
                if (is_range_call(*s.cond)) sites.range_loops.push_back(&s);
                body_insertable = true;
                break;
            case Stmt::Kind::If:
                if (!s.orelse.empty()) sites.if_else.push_back(&s);
                body_insertable = true;
                break;
            case Stmt::Kind::While:
                body_insertable = true;
                break;
            case Stmt::Kind::FuncDef:
                for (const auto& p : s.params) sites.local_vars.insert(p);
                body_insertable = true;
                break;
            default:
                break;
        }
        if (s.value) collect_expr_sites(*s.value, sites);
        if (s.cond) collect_expr_sites(*s.cond, sites);
        collect_block_sites(s.body, sites, body_insertable);
        // the renderer only emits else blocks on if statements that already
        // have one
        collect_block_sites(s.orelse, sites,
                            s.kind == Stmt::Kind::If && !s.orelse.empty());
    }
}

Sites collect_sites(Module& m) {
    Sites sites;
    collect_block_sites(m.body, sites, true);
    return sites;
}

py::ExprPtr make_name(const std::string& id) {
    auto e = std::make_unique<Expr>();
    e->kind = Expr::Kind::Name;
    e->name = id;
    return e;
}

py::ExprPtr make_int(long long v) {
    auto e = std::make_unique<Expr>();
    e->kind = Expr::Kind::IntLit;
    e->int_value = v;
    return e;
}

py::ExprPtr make_binary(const std::string& op, py::ExprPtr lhs, py::ExprPtr rhs) {
    auto e = std::make_unique<Expr>();
    e->kind = Expr::Kind::Binary;
    e->op = op;
    e->lhs = std::move(lhs);
    e->rhs = std::move(rhs);
    return e;
}

std::string fresh_name(const Module& m, const std::string& prefix, std::uint64_t start) {
    std::unordered_set<std::string> taken;
    for (const auto& n : py::collect_names(m)) taken.insert(n);
    for (std::uint64_t k = start;; ++k) {
        std::string candidate = prefix + std::to_string(k % 1000);
        if (!taken.count(candidate)) return candidate;
    }
}

void apply_loop_transform(Module& m, std::mt19937_64& rng) {
    auto sites = collect_sites(m);
    std::vector<Stmt*> usable;
    for (Stmt* loop : sites.range_loops) {
        if (loop->cond->args.size() < 3) {
            usable.push_back(loop);
        } else {
            long long step;
            if (literal_step(*loop->cond->args[2], step) && step != 0) usable.push_back(loop);
        }
    }
    if (usable.empty()) throw InapplicableError("no for-range loop");
    Stmt* loop = usable[rng() % usable.size()];

    const auto& args = loop->cond->args;
    py::ExprPtr start = args.size() >= 2 ? args[0]->clone() : make_int(0);
    py::ExprPtr stop = args.size() >= 2 ? args[1]->clone() : args[0]->clone();
    py::ExprPtr step = args.size() == 3 ? args[2]->clone() : make_int(1);
    long long step_value = 1;
    if (args.size() == 3) literal_step(*args[2], step_value);

    std::string var = loop->name;
    auto body = std::move(loop->body);
    body.push_back(std::make_unique<Stmt>());
    body.back()->kind = Stmt::Kind::Assign;
    body.back()->name = var;
    body.back()->value = make_binary("+", make_name(var), std::move(step));

    // The loop statement becomes the counter initializer; a while loop with
    // the original body plus the increment follows it.
    auto while_stmt = std::make_unique<Stmt>();
    while_stmt->kind = Stmt::Kind::While;
    while_stmt->cond =
        make_binary(step_value > 0 ? "<" : ">", make_name(var), std::move(stop));
    while_stmt->body = std::move(body);

    loop->kind = Stmt::Kind::Assign;
    loop->cond.reset();
    loop->value = std::move(start);
    loop->body.clear();

    // insert the while right after the initializer in its parent block
    struct Inserter {
        Stmt* after;
        StmtPtr stmt;
        bool done = false;
        void visit(std::vector<StmtPtr>& block) {
            for (std::size_t i = 0; i < block.size() && !done; ++i) {
                if (block[i].get() == after) {
                    block.insert(block.begin() + i + 1, std::move(stmt));
                    done = true;
                    return;
                }
                visit(block[i]->body);
                if (!done) visit(block[i]->orelse);
            }
        }
    } inserter{loop, std::move(while_stmt)};
    inserter.visit(m.body);
}

void apply_dead_code(Module& m, std::mt19937_64& rng) {
    auto sites = collect_sites(m);
    if (sites.insert_points.empty()) throw InapplicableError("no statement boundary");
    auto [block, index] = sites.insert_points[rng() % sites.insert_points.size()];

    auto guard = std::make_unique<Stmt>();
    guard->kind = Stmt::Kind::If;
    guard->cond = std::make_unique<Expr>();
    guard->cond->kind = Expr::Kind::BoolLit;
    guard->cond->bool_value = false;
    auto dead = std::make_unique<Stmt>();
    dead->kind = Stmt::Kind::Assign;
    dead->name = fresh_name(m, "unused", rng());
    dead->value = make_int(static_cast<long long>(rng() % 1000));
    guard->body.push_back(std::move(dead));
    block->insert(block->begin() + index, std::move(guard));
}

void apply_operand_swap(Module& m, std::mt19937_64& rng) {
    auto sites = collect_sites(m);
    if (sites.swap_ops.empty()) throw InapplicableError("no commutative operator");
    Expr* op = sites.swap_ops[rng() % sites.swap_ops.size()];
    std::swap(op->lhs, op->rhs);
    if (op->op == "<")
        op->op = ">";
    else if (op->op == ">")
        op->op = "<";
    else if (op->op == "<=")
        op->op = ">=";
    else if (op->op == ">=")
        op->op = "<=";
}

void apply_block_swap(Module& m, std::mt19937_64& rng) {
    auto sites = collect_sites(m);
    if (sites.if_else.empty()) throw InapplicableError("no if/else block");
    Stmt* branch = sites.if_else[rng() % sites.if_else.size()];
    auto negated = std::make_unique<Expr>();
    negated->kind = Expr::Kind::Unary;
    negated->op = "not";
    negated->lhs = std::move(branch->cond);
    branch->cond = std::move(negated);
    std::swap(branch->body, branch->orelse);
}

void rename_in_expr(Expr& e, const std::string& from, const std::string& to) {
    if (e.kind == Expr::Kind::Name && e.name == from) e.name = to;
    if (e.lhs) rename_in_expr(*e.lhs, from, to);
    if (e.rhs) rename_in_expr(*e.rhs, from, to);
    if (e.callee) rename_in_expr(*e.callee, from, to);
    for (auto& a : e.args) rename_in_expr(*a, from, to);
}

void rename_in_block(std::vector<StmtPtr>& block, const std::string& from,
                     const std::string& to) {
    for (auto& sp : block) {
        Stmt& s = *sp;
        if ((s.kind == Stmt::Kind::Assign || s.kind == Stmt::Kind::For) && s.name == from)
            s.name = to;
        if (s.kind == Stmt::Kind::FuncDef)
            for (auto& p : s.params)
                if (p == from) p = to;
        if (s.value) rename_in_expr(*s.value, from, to);
        if (s.cond) rename_in_expr(*s.cond, from, to);
        rename_in_block(s.body, from, to);
        rename_in_block(s.orelse, from, to);
    }
}

void apply_variable_rename(Module& m, std::mt19937_64& rng) {
    auto sites = collect_sites(m);
    if (sites.local_vars.empty()) throw InapplicableError("no local variable");
    std::vector<std::string> vars(sites.local_vars.begin(), sites.local_vars.end());
    const std::string& from = vars[rng() % vars.size()];
    std::string to = fresh_name(m, "v", rng());
    rename_in_block(m.body, from, to);
}

void apply_transform(Module& m, CodeTransform transform, std::mt19937_64& rng) {
    switch (transform) {
        case CodeTransform::LoopTransform: apply_loop_transform(m, rng); break;
        case CodeTransform::DeadCodeInject: apply_dead_code(m, rng); break;
        case CodeTransform::OperandSwap: apply_operand_swap(m, rng); break;
        case CodeTransform::BlockSwap: apply_block_swap(m, rng); break;
        case CodeTransform::VariableRename: apply_variable_rename(m, rng); break;
    }
}

}  // namespace

std::string natgen_rewrite(const py::Module& tree, CodeTransform transform,
                           std::uint64_t seed) {
    Module copy = tree.clone();
    std::mt19937_64 rng(seed);
    apply_transform(copy, transform, rng);
    return py::render(copy);
}

py::Module rename_variable(const py::Module& tree, const std::string& from,
                           const std::string& to) {
    Module copy = tree.clone();
    rename_in_block(copy.body, from, to);
    return copy;
}

std::vector<std::string> natgen_augment(const std::string& code, int n_per_transform,
                                        std::uint64_t seed) {
    Module tree = py::parse_module(code);
    std::mt19937_64 rng(seed);
    std::vector<std::string> out;
    std::unordered_set<std::string> seen;
    const std::string original = py::render(tree);
    seen.insert(original);

    for (CodeTransform transform : kAllCodeTransforms) {
        for (int k = 0; k < n_per_transform; ++k) {
            std::string variant;
            for (int attempt = 0; attempt < 8 && variant.empty(); ++attempt) {
                Module copy = tree.clone();
                CodeTransform chosen = transform;
                try {
                    apply_transform(copy, chosen, rng);
                } catch (const InapplicableError&) {
                    // fall back to a uniformly chosen transform that applies
                    bool applied = false;
                    for (int fallback = 0; fallback < 8 && !applied; ++fallback) {
                        chosen = kAllCodeTransforms[rng() % 5];
                        Module retry = tree.clone();
                        try {
                            apply_transform(retry, chosen, rng);
                            copy = std::move(retry);
                            applied = true;
                        } catch (const InapplicableError&) {
                        }
                    }
                    if (!applied) break;
                }
                std::string rendered = py::render(copy);
                if (seen.insert(rendered).second) variant = std::move(rendered);
            }
            if (!variant.empty()) out.push_back(std::move(variant));
        }
    }
    return out;
}

}  // namespace augsearch::baselines
