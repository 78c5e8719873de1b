#include "morphgen/parser.hpp"

#include <cstdlib>
#include <unordered_map>

#include "morphgen/lexer.hpp"

namespace morphgen {

namespace {

ExprPtr make_expr(Expr::Kind k, SourceLoc loc) {
    auto e = std::make_unique<Expr>();
    e->kind = k;
    e->loc = loc;
    return e;
}

ExprPtr make_num(double v, SourceLoc loc = {}) {
    auto e = make_expr(Expr::Kind::Num, loc);
    e->num = v;
    return e;
}

ExprPtr make_bin(BinOp op, ExprPtr a, ExprPtr b) {
    auto e = make_expr(Expr::Kind::Bin, a->loc);
    e->bin_op = op;
    e->args.push_back(std::move(a));
    e->args.push_back(std::move(b));
    return e;
}

const std::unordered_map<std::string, Builtin>& builtin_table() {
    static const std::unordered_map<std::string, Builtin> tbl = {
        {"exp", Builtin::Exp},   {"ln", Builtin::Ln},     {"sqrt", Builtin::Sqrt},
        {"sin", Builtin::Sin},   {"cos", Builtin::Cos},   {"tanh", Builtin::Tanh},
        {"arccos", Builtin::Arccos}, {"min", Builtin::Min}, {"max", Builtin::Max},
    };
    return tbl;
}

enum class BracketClass { Heaviside, Noise, Group };

class Parser {
public:
    explicit Parser(const TokenStream& ts) : ts_(ts) {}

    ProgramAst parse_program();
    ExprPtr parse_lone_expr();

private:
    const TokenStream& ts_;
    size_t pos_ = 0;

    const Token& peek(size_t off = 0) const { return ts_.at(pos_ + off); }
    const Token& next() { return ts_.at(pos_++); }
    SourceLoc loc() const { return {peek().line, peek().col}; }

    [[noreturn]] void fail(const std::string& expected) const {
        const Token& t = peek();
        std::string found;
        switch (t.kind) {
            case TokKind::Indent: found = "indent"; break;
            case TokKind::Dedent: found = "dedent"; break;
            case TokKind::Newline: found = "end of line"; break;
            case TokKind::Eof: found = "end of input"; break;
            default: found = "'" + t.lexeme + "'";
        }
        throw ParseError("expected " + expected + ", found " + found, {t.line, t.col});
    }

    bool accept_op(const char* s) {
        if (peek().is_op(s)) {
            pos_++;
            return true;
        }
        return false;
    }
    bool accept_word(const char* s) {
        if (peek().is_word(s)) {
            pos_++;
            return true;
        }
        return false;
    }
    void expect_op(const char* s) {
        if (!accept_op(s)) fail(std::string("'") + s + "'");
    }
    void expect_word(const char* s) {
        if (!accept_word(s)) fail(std::string("'") + s + "'");
    }
    void expect_newline() {
        if (!peek().is(TokKind::Newline)) fail("end of line");
        pos_++;
    }
    bool accept(TokKind k) {
        if (peek().is(k)) {
            pos_++;
            return true;
        }
        return false;
    }
    void expect(TokKind k, const char* what) {
        if (!accept(k)) fail(what);
    }

    std::string expect_ident() {
        if (peek().kind != TokKind::Ident) fail("identifier");
        return next().lexeme;
    }
    // A name position that tolerates keyword-looking words (e.g. a body
    // called `Start`). Fields and params still parse as Ident.
    std::string expect_name() {
        if (peek().kind != TokKind::Ident && peek().kind != TokKind::Keyword)
            fail("name");
        return next().lexeme;
    }
    std::string expect_filename() {
        if (peek().kind == TokKind::Str) return next().lexeme;
        if (peek().kind == TokKind::Ident || peek().kind == TokKind::Keyword)
            return next().lexeme;
        fail("file name");
    }

    // If a block at one indent column is followed by a sibling block at a
    // different (shallower or deeper) column, the lexer emits DEDENT+INDENT.
    // Consume that seam when the token after it is the given word.
    bool seam_before(const char* word) {
        if (peek().is(TokKind::Dedent) && peek(1).is(TokKind::Indent) &&
            peek(2).is_word(word)) {
            pos_ += 2;
            return true;
        }
        return false;
    }

    // --- sections ---
    SimParamsAst parse_sim_params();
    SubstanceAst parse_substance();
    BodyAst parse_body();
    std::vector<VizCmd> parse_visualization();
    Stmt parse_stmt();
    void parse_field_decls(SubstanceAst& sub);
    Region parse_region();
    VizCmd parse_viz_cmd();
    std::string parse_options_text();

    // --- expressions ---
    ExprPtr parse_expr() { return parse_sum(); }
    ExprPtr parse_sum();
    ExprPtr parse_term(bool allow_leading_sign);
    ExprPtr parse_product(ExprPtr first);
    ExprPtr parse_juxt();
    ExprPtr parse_factor();
    ExprPtr parse_primary();
    ExprPtr parse_bracket();
    CondPtr parse_cond();
    CondPtr parse_cmp_chain();
    BracketClass classify_bracket() const;
    bool starts_primary(const Token& t, bool first_in_juxt) const;

    bool in_norm_ = false;  // inside ||...|| the next '||' closes it
};

bool Parser::starts_primary(const Token& t, bool first_in_juxt) const {
    switch (t.kind) {
        case TokKind::Number:
            return true;
        case TokKind::Ident:
            return true;
        case TokKind::Keyword:
            return t.lexeme == "del" || t.lexeme == "div" || t.lexeme == "dot";
        case TokKind::Op:
            if (t.lexeme == "(" || t.lexeme == "[") return true;
            if (t.lexeme == "||") return !in_norm_;
            // `<name>` only opens a sensed reference at the head of a factor
            // chain; later it reads as a comparison.
            if (t.lexeme == "<" && first_in_juxt) return true;
            return false;
        default:
            return false;
    }
}

BracketClass Parser::classify_bracket() const {
    // pos_ is at '['. Scan the bracket body at top level: DW wins, then a
    // comparison operator makes it a Heaviside factor, else it groups.
    size_t i = pos_ + 1;
    int depth = 1;
    bool has_cmp = false;
    const Token* prev = nullptr;
    while (true) {
        const Token& t = ts_.at(i);
        if (t.is(TokKind::Eof) || t.is(TokKind::Newline)) break;
        if (t.is_op("[") || t.is_op("(")) depth++;
        else if (t.is_op("]") || t.is_op(")")) {
            depth--;
            if (depth == 0) break;
        } else if (depth == 1) {
            if (t.is_word("DW")) return BracketClass::Noise;
            if (t.is_op("<")) {
                // sensed-reference pattern `< ident >` in operand position
                bool operand_pos = prev == nullptr || prev->kind == TokKind::Op ||
                                   prev->is_word("and") || prev->is_word("or");
                if (operand_pos && ts_.at(i + 1).kind == TokKind::Ident &&
                    ts_.at(i + 2).is_op(">")) {
                    prev = &ts_.at(i + 2);
                    i += 3;
                    continue;
                }
                has_cmp = true;
            } else if (t.is_op("<=") || t.is_op(">") || t.is_op(">=")) {
                has_cmp = true;
            }
        }
        prev = &t;
        i++;
    }
    return has_cmp ? BracketClass::Heaviside : BracketClass::Group;
}

ExprPtr Parser::parse_sum() {
    ExprPtr lhs = parse_term(true);
    while (peek().is_op("+") || peek().is_op("-")) {
        BinOp op = peek().is_op("+") ? BinOp::Add : BinOp::Sub;
        pos_++;
        ExprPtr rhs = parse_term(false);
        lhs = make_bin(op, std::move(lhs), std::move(rhs));
    }
    return lhs;
}

// One additive term. Heaviside factors written before a signed term gate
// it: `[t>t_D] -div[C*V]` is the product of the step factor and the negated
// divergence, not a subtraction.
ExprPtr Parser::parse_term(bool allow_leading_sign) {
    SourceLoc l = loc();
    bool neg = false;
    if (allow_leading_sign && (peek().is_op("-") || peek().is_op("+"))) {
        neg = peek().is_op("-");
        pos_++;
    }

    std::vector<ExprPtr> gates;
    while (peek().is_op("[") && classify_bracket() == BracketClass::Heaviside) {
        gates.push_back(parse_bracket());
    }

    ExprPtr body;
    if (!gates.empty() && (peek().is_op("-") || peek().is_op("+"))) {
        if (peek().is_op("-")) neg = !neg;
        pos_++;
        if (!starts_primary(peek(), true)) fail("expression after sign");
        body = parse_product(parse_juxt());
    } else if (starts_primary(peek(), true)) {
        body = parse_product(parse_juxt());
    } else if (!gates.empty() && (peek().is_op("*") || peek().is_op("/"))) {
        ExprPtr g = std::move(gates.back());
        gates.pop_back();
        body = parse_product(std::move(g));
    }

    ExprPtr out;
    for (auto& g : gates) {
        out = out ? make_bin(BinOp::Mul, std::move(out), std::move(g)) : std::move(g);
    }
    if (body) out = out ? make_bin(BinOp::Mul, std::move(out), std::move(body)) : std::move(body);
    if (!out) fail("expression");
    if (neg) {
        auto n = make_expr(Expr::Kind::Neg, l);
        n->args.push_back(std::move(out));
        out = std::move(n);
    }
    return out;
}

ExprPtr Parser::parse_product(ExprPtr first) {
    ExprPtr lhs = std::move(first);
    while (peek().is_op("*") || peek().is_op("/")) {
        BinOp op = peek().is_op("*") ? BinOp::Mul : BinOp::Div;
        pos_++;
        ExprPtr rhs = parse_juxt();
        lhs = make_bin(op, std::move(lhs), std::move(rhs));
    }
    return lhs;
}

// Adjacent factors multiply: `[t>t_D] k_P [C*(1-P)]`.
ExprPtr Parser::parse_juxt() {
    ExprPtr lhs = parse_factor();
    while (starts_primary(peek(), false)) {
        ExprPtr rhs = parse_factor();
        lhs = make_bin(BinOp::Mul, std::move(lhs), std::move(rhs));
    }
    return lhs;
}

ExprPtr Parser::parse_factor() {
    ExprPtr base = parse_primary();
    if (peek().is_op("^")) {
        pos_++;
        ExprPtr exp = parse_primary();
        base = make_bin(BinOp::Pow, std::move(base), std::move(exp));
    }
    return base;
}

ExprPtr Parser::parse_primary() {
    SourceLoc l = loc();
    const Token& t = peek();

    if (t.is(TokKind::Number)) {
        pos_++;
        return make_num(std::strtod(t.lexeme.c_str(), nullptr), l);
    }
    if (t.is_word("del")) {
        pos_++;
        bool lapl = false;
        if (peek().is_op("^")) {
            pos_++;
            if (!(peek().is(TokKind::Number) && peek().lexeme == "2"))
                fail("'2' after del^");
            pos_++;
            lapl = true;
        }
        auto e = make_expr(lapl ? Expr::Kind::Lapl : Expr::Kind::Grad, l);
        e->args.push_back(parse_factor());
        return e;
    }
    if (t.is_word("div")) {
        pos_++;
        auto e = make_expr(Expr::Kind::Div, l);
        e->args.push_back(parse_factor());
        return e;
    }
    if (t.is_word("dot")) {
        pos_++;
        expect_op("(");
        auto e = make_expr(Expr::Kind::Dot, l);
        e->args.push_back(parse_expr());
        expect_op(",");
        e->args.push_back(parse_expr());
        expect_op(")");
        return e;
    }
    if (t.is(TokKind::Ident)) {
        auto it = builtin_table().find(t.lexeme);
        if (it != builtin_table().end() && peek(1).is_op("(")) {
            pos_ += 2;
            auto e = make_expr(Expr::Kind::Call, l);
            e->builtin = it->second;
            e->args.push_back(parse_expr());
            bool binary = it->second == Builtin::Min || it->second == Builtin::Max;
            if (binary) {
                expect_op(",");
                e->args.push_back(parse_expr());
            }
            expect_op(")");
            return e;
        }
        pos_++;
        if (t.lexeme == "t") return make_expr(Expr::Kind::Time, l);
        auto e = make_expr(Expr::Kind::Ident, l);
        e->name = t.lexeme;
        return e;
    }
    if (t.is_op("(")) {
        pos_++;
        ExprPtr a = parse_expr();
        if (accept_op(",")) {
            ExprPtr b = parse_expr();
            expect_op(")");
            auto e = make_expr(Expr::Kind::VecLit, l);
            e->args.push_back(std::move(a));
            e->args.push_back(std::move(b));
            return e;
        }
        expect_op(")");
        return a;
    }
    if (t.is_op("[")) return parse_bracket();
    if (t.is_op("||")) {
        pos_++;
        auto e = make_expr(Expr::Kind::Norm, l);
        bool saved = in_norm_;
        in_norm_ = true;
        e->args.push_back(parse_expr());
        in_norm_ = saved;
        expect_op("||");
        return e;
    }
    if (t.is_op("<") && peek(1).is(TokKind::Ident) && peek(2).is_op(">")) {
        pos_++;
        auto e = make_expr(Expr::Kind::Sensed, l);
        e->name = next().lexeme;
        expect_op(">");
        return e;
    }
    if (t.is_op("-")) {
        // unary minus inside a bracket or parenthesis
        pos_++;
        auto e = make_expr(Expr::Kind::Neg, l);
        e->args.push_back(parse_factor());
        return e;
    }
    fail("expression");
}

ExprPtr Parser::parse_bracket() {
    SourceLoc l = loc();
    BracketClass cls = classify_bracket();
    expect_op("[");
    if (peek().is_op("]")) throw ParseError("EmptyBracket", {l.line, l.col});

    if (cls == BracketClass::Heaviside) {
        auto e = make_expr(Expr::Kind::Heaviside, l);
        e->cond = parse_cond();
        expect_op("]");
        return e;
    }
    if (cls == BracketClass::Noise) {
        ExprPtr weight;
        if (!peek().is_word("DW")) weight = parse_sum();
        expect_word("DW");
        expect_op("^");
        if (!peek().is(TokKind::Number)) fail("noise arity");
        int arity = std::atoi(next().lexeme.c_str());
        if (arity != 1 && arity != 2)
            throw ParseError("DW arity must be 1 or 2", {l.line, l.col});
        expect_op("]");
        auto e = make_expr(Expr::Kind::Noise, l);
        e->noise_arity = arity;
        e->args.push_back(weight ? std::move(weight) : make_num(1.0, l));
        return e;
    }
    auto e = make_expr(Expr::Kind::Group, l);
    e->args.push_back(parse_expr());
    expect_op("]");
    return e;
}

CondPtr Parser::parse_cmp_chain() {
    auto c = std::make_unique<Cond>();
    c->kind = Cond::Kind::Chain;
    c->chain.operands.push_back(parse_sum());
    while (true) {
        CmpOp op;
        if (peek().is_op("<")) op = CmpOp::Lt;
        else if (peek().is_op("<=")) op = CmpOp::Le;
        else if (peek().is_op(">")) op = CmpOp::Gt;
        else if (peek().is_op(">=")) op = CmpOp::Ge;
        else break;
        pos_++;
        c->chain.ops.push_back(op);
        c->chain.operands.push_back(parse_sum());
    }
    if (c->chain.ops.empty()) fail("comparison operator");
    return c;
}

CondPtr Parser::parse_cond() {
    auto parse_and = [this]() {
        CondPtr first = parse_cmp_chain();
        if (!peek().is_word("and")) return first;
        auto c = std::make_unique<Cond>();
        c->kind = Cond::Kind::And;
        c->children.push_back(std::move(first));
        while (accept_word("and")) c->children.push_back(parse_cmp_chain());
        return c;
    };
    CondPtr first = parse_and();
    if (!peek().is_word("or")) return first;
    auto c = std::make_unique<Cond>();
    c->kind = Cond::Kind::Or;
    c->children.push_back(std::move(first));
    while (accept_word("or")) c->children.push_back(parse_and());
    return c;
}

// ---------------------------------------------------------------------------
// statements and sections

Stmt Parser::parse_stmt() {
    Stmt s;
    s.loc = loc();
    if (accept_word("let")) {
        s.kind = Stmt::Kind::Let;
        s.name = expect_ident();
        expect_op("=");
        s.expr = parse_expr();
        expect_newline();
        return s;
    }
    if (accept_word("D")) {
        s.kind = Stmt::Kind::Change;
        s.name = expect_ident();
        if (accept_op("=")) s.mode = ChangeMode::Assign;
        else if (accept_op("+=")) s.mode = ChangeMode::Add;
        else if (accept_op("-=")) s.mode = ChangeMode::Sub;
        else fail("'=', '+=' or '-='");
        s.expr = parse_expr();
        expect_newline();
        return s;
    }
    if (peek().is_word("param")) {
        pos_++;
        s.kind = Stmt::Kind::Param;
        s.name = expect_ident();
        expect_op("=");
        s.expr = parse_expr();
        expect_newline();
        return s;
    }
    if (peek().is(TokKind::Ident) && peek(1).is_op("=")) {
        s.kind = Stmt::Kind::Assign;
        s.name = next().lexeme;
        pos_++;  // '='
        s.expr = parse_expr();
        expect_newline();
        return s;
    }
    fail("statement");
}

void Parser::parse_field_decls(SubstanceAst& sub) {
    while (true) {
        if (peek().is_word("behavior")) return;
        if (seam_before("behavior")) return;

        bool scalar;
        SourceLoc l = loc();
        if (accept_word("scalar")) scalar = true;
        else if (accept_word("vector")) scalar = false;
        else fail("field declaration or 'behavior'");

        if (accept_word("field")) {
            std::string nm = expect_ident();
            sub.fields.push_back({nm, scalar ? FieldKind::Scalar : FieldKind::Vector, l});
            expect_newline();
        } else if (accept_word("fields")) {
            expect_op(":");
            expect_newline();
            expect(TokKind::Indent, "indented field names");
            while (!accept(TokKind::Dedent)) {
                SourceLoc fl = loc();
                std::string nm = expect_ident();
                sub.fields.push_back({nm, scalar ? FieldKind::Scalar : FieldKind::Vector, fl});
                expect_newline();
            }
        } else {
            fail("'field' or 'fields'");
        }
    }
}

SubstanceAst Parser::parse_substance() {
    SubstanceAst sub;
    sub.loc = loc();
    expect_word("substance");
    sub.name = expect_name();
    if (peek().is_word("is"))
        throw ParseError("substance derivation ('is ... with') is not supported; "
                         "declare the substance directly",
                         {peek().line, peek().col});
    expect_op(":");
    expect_newline();
    expect(TokKind::Indent, "indented substance body");
    int depth = 1;

    parse_field_decls(sub);

    expect_word("behavior");
    expect_op(":");
    expect_newline();
    if (accept(TokKind::Indent)) {
        depth++;
        while (!peek().is(TokKind::Dedent)) sub.behavior.push_back(parse_stmt());
        pos_++;  // dedent
        depth--;
    }
    expect(TokKind::Dedent, "end of substance");
    (void)depth;
    return sub;
}

Region Parser::parse_region() {
    Region r;
    r.loc = loc();
    // Disc: (x, y) within <expr> of (<expr>, <expr>)
    if (peek().is_op("(") && peek(1).is(TokKind::Ident) && peek(2).is_op(",") &&
        peek(3).is(TokKind::Ident) && peek(4).is_op(")") && peek(5).is_word("within")) {
        pos_++;
        std::string n1 = expect_ident();
        expect_op(",");
        std::string n2 = expect_ident();
        if (n1 != "x" || n2 != "y") fail("'(x, y)' in region");
        expect_op(")");
        expect_word("within");
        r.kind = Region::Kind::Disc;
        r.c = parse_expr();  // radius
        expect_word("of");
        expect_op("(");
        r.a = parse_expr();
        expect_op(",");
        r.b = parse_expr();
        expect_op(")");
        return r;
    }
    // Box: <expr> < x < <expr>, <expr> < y < <expr>
    r.kind = Region::Kind::Box;
    r.a = parse_expr();
    expect_op("<");
    if (expect_ident() != "x") fail("'x' in region bounds");
    expect_op("<");
    r.b = parse_expr();
    expect_op(",");
    r.c = parse_expr();
    expect_op("<");
    if (expect_ident() != "y") fail("'y' in region bounds");
    expect_op("<");
    r.d = parse_expr();
    return r;
}

BodyAst Parser::parse_body() {
    BodyAst body;
    body.loc = loc();
    expect_word("body");
    body.name = expect_name();
    expect_word("of");
    body.substance = expect_name();
    accept_op(":");  // the colon is optional: §3.4-style headers omit it
    expect_newline();
    expect(TokKind::Indent, "indented body initializations");
    while (!accept(TokKind::Dedent)) {
        expect_word("for");
        BodyInit init;
        init.region = parse_region();
        expect_op(":");
        if (accept(TokKind::Newline)) {
            expect(TokKind::Indent, "indented initializations");
            while (!accept(TokKind::Dedent)) {
                std::string f = expect_ident();
                expect_op("=");
                init.assigns.emplace_back(f, parse_expr());
                expect_newline();
            }
        } else {
            std::string f = expect_ident();
            expect_op("=");
            init.assigns.emplace_back(f, parse_expr());
            expect_newline();
        }
        body.inits.push_back(std::move(init));
    }
    return body;
}

SimParamsAst Parser::parse_sim_params() {
    SimParamsAst sim;
    sim.loc = loc();
    expect_word("simulation");
    expect_word("parameters");
    expect_op(":");
    expect_newline();
    expect(TokKind::Indent, "indented simulation parameters");
    while (!accept(TokKind::Dedent)) {
        SourceLoc l = loc();
        if (accept_word("duration")) {
            expect_op("=");
            sim.duration = parse_expr();
            expect_newline();
        } else if (accept_word("temporal")) {
            expect_word("resolution");
            expect_op("=");
            sim.temporal_resolution = parse_expr();
            expect_newline();
        } else if (accept_word("spatial")) {
            expect_word("resolution");
            expect_op("=");
            sim.spatial_resolution = parse_expr();
            expect_newline();
        } else if (accept_word("space")) {
            sim.xlo = parse_expr();
            expect_op("<");
            if (expect_ident() != "x") fail("'x' in space bounds");
            expect_op("<");
            sim.xhi = parse_expr();
            expect_op(",");
            sim.ylo = parse_expr();
            expect_op("<");
            if (expect_ident() != "y") fail("'y' in space bounds");
            expect_op("<");
            sim.yhi = parse_expr();
            expect_newline();
        } else if (peek().is_word("save") || peek().is_word("load")) {
            bool is_save = next().lexeme == "save";
            SaveLoadDirective d;
            d.is_save = is_save;
            d.loc = l;
            d.fields.push_back(expect_ident());
            while (peek().is(TokKind::Ident) && !peek(1).is(TokKind::Newline) &&
                   !(peek().is_word("to") || peek().is_word("from")))
                d.fields.push_back(expect_ident());
            expect_word(is_save ? "to" : "from");
            d.filename = expect_filename();
            expect_newline();
            sim.save_load.push_back(std::move(d));
        } else if (accept_word("log")) {
            if (accept_word("params")) {
                sim.log_params.push_back(expect_ident());
                while (accept_op(",")) sim.log_params.push_back(expect_ident());
                expect_newline();
            } else if (accept_word("note")) {
                std::string note;
                while (!peek().is(TokKind::Newline) && !peek().is(TokKind::Eof)) {
                    if (!note.empty()) note += " ";
                    note += next().lexeme;
                }
                sim.log_notes.push_back(note);
                expect_newline();
            } else {
                fail("'params' or 'note' after 'log'");
            }
        } else if (peek().is_word("param")) {
            sim.global_params.push_back(parse_stmt());
        } else if (peek().is_word("params")) {
            pos_++;
            expect_op(":");
            expect_newline();
            expect(TokKind::Indent, "indented parameter list");
            while (!accept(TokKind::Dedent)) {
                Stmt s;
                s.kind = Stmt::Kind::Param;
                s.loc = loc();
                s.name = expect_ident();
                expect_op("=");
                s.expr = parse_expr();
                expect_newline();
                sim.global_params.push_back(std::move(s));
            }
        } else {
            fail("simulation parameter");
        }
    }
    return sim;
}

std::string Parser::parse_options_text() {
    std::string opts;
    while (!peek().is(TokKind::Newline) && !peek().is(TokKind::Eof)) {
        if (!opts.empty()) opts += " ";
        opts += next().lexeme;
    }
    return opts;
}

VizCmd Parser::parse_viz_cmd() {
    VizCmd cmd;
    cmd.loc = loc();
    if (accept_word("report")) {
        cmd.kind = VizCmd::Kind::Stability;
        if (accept_word("diffusion")) cmd.report = VizCmd::Report::Diffusion;
        else if (accept_word("Courant")) cmd.report = VizCmd::Report::Courant;
        else if (accept_word("Peclet")) cmd.report = VizCmd::Report::Peclet;
        else fail("'diffusion', 'Courant' or 'Peclet'");
        expect_word("number");
        expect_word("for");
        cmd.operands.push_back(parse_expr());
        if (cmd.report == VizCmd::Report::Peclet) {
            expect_word("and");
            cmd.operands.push_back(parse_expr());
        }
        expect_newline();
        return cmd;
    }

    bool is_movie = false;
    if (accept_word("display")) {
        cmd.kind = VizCmd::Kind::Display;
        if (accept_word("running")) cmd.time = DisplayTime::Running;
        else if (accept_word("final")) cmd.time = DisplayTime::Final;
        else fail("'running' or 'final'");
    } else if (accept_word("make")) {
        expect_word("movie");
        cmd.kind = VizCmd::Kind::Movie;
        is_movie = true;
        cmd.filename = expect_filename();
        expect_word("of");
    } else {
        fail("visualization command");
    }

    cmd.field = expect_ident();
    expect_word("as");
    if (accept_word("mesh")) cmd.style = DisplayKind::Mesh;
    else if (accept_word("contours")) cmd.style = DisplayKind::Contours;
    else if (accept_word("colors")) cmd.style = DisplayKind::Colors;
    else if (accept_word("quivers")) cmd.style = DisplayKind::Quivers;
    else fail("display kind");

    if (cmd.style == DisplayKind::Quivers) {
        if (!peek().is(TokKind::Newline) && !peek().is_word("mesh")) {
            cmd.mesh_pitch = parse_expr();
        }
        accept_word("mesh");
    } else if (accept_word("limits")) {
        expect_op("(");
        cmd.limit_lo = parse_expr();
        expect_op(",");
        cmd.limit_hi = parse_expr();
        expect_op(")");
    }
    cmd.options = parse_options_text();
    expect_newline();
    (void)is_movie;
    return cmd;
}

std::vector<VizCmd> Parser::parse_visualization() {
    std::vector<VizCmd> out;
    expect_word("visualization");
    expect_op(":");
    expect_newline();
    expect(TokKind::Indent, "indented visualization commands");
    while (!accept(TokKind::Dedent)) out.push_back(parse_viz_cmd());
    return out;
}

ProgramAst Parser::parse_program() {
    ProgramAst prog;
    expect_word("morphogenetic");
    expect_word("program");
    prog.name = expect_name();
    expect_op(":");
    expect_newline();
    expect(TokKind::Indent, "indented program body");

    // phase 0: sim params, 1: substances, 2: bodies, 3: visualization
    int phase = 0;
    bool have_sim = false;
    while (!peek().is(TokKind::Dedent)) {
        // sibling sections may sit at different indent columns
        if (peek().is(TokKind::Dedent) && peek(1).is(TokKind::Indent)) {
            pos_ += 2;
            continue;
        }
        const Token& t = peek();
        if (t.is_word("simulation")) {
            if (phase > 0)
                throw ParseError("SectionOrderError: simulation parameters must come first",
                                 {t.line, t.col});
            prog.sim = parse_sim_params();
            have_sim = true;
            phase = 1;
        } else if (t.is_word("substance")) {
            if (phase > 1)
                throw ParseError("SectionOrderError: substances must precede bodies and "
                                 "visualization",
                                 {t.line, t.col});
            phase = 1;
            prog.substances.push_back(parse_substance());
        } else if (t.is_word("body")) {
            if (phase > 2)
                throw ParseError("SectionOrderError: bodies must precede visualization",
                                 {t.line, t.col});
            phase = 2;
            prog.bodies.push_back(parse_body());
        } else if (t.is_word("visualization")) {
            if (phase > 2)
                throw ParseError("SectionOrderError: duplicate visualization section",
                                 {t.line, t.col});
            phase = 3;
            prog.viz = parse_visualization();
        } else {
            fail("section (simulation parameters, substance, body or visualization)");
        }
    }
    expect(TokKind::Dedent, "end of program body");
    expect_word("end");
    expect_word("program");
    accept(TokKind::Newline);
    if (!peek().is(TokKind::Eof)) fail("end of input");
    if (!have_sim)
        throw ParseError("program lacks a 'simulation parameters' section");
    return prog;
}

ExprPtr Parser::parse_lone_expr() {
    ExprPtr e = parse_expr();
    accept(TokKind::Newline);
    if (!peek().is(TokKind::Eof)) fail("end of expression");
    return e;
}

}  // namespace

ProgramAst parse(const TokenStream& tokens) {
    Parser p(tokens);
    return p.parse_program();
}

ExprPtr parse_expr(const TokenStream& tokens) {
    Parser p(tokens);
    return p.parse_lone_expr();
}

ProgramAst parse_source(const std::string& source) {
    return parse(tokenize(source));
}

// --- deep clone -------------------------------------------------------------

CondPtr clone_cond(const Cond& c) {
    auto out = std::make_unique<Cond>();
    out->kind = c.kind;
    for (const auto& e : c.chain.operands) out->chain.operands.push_back(e->clone());
    out->chain.ops = c.chain.ops;
    for (const auto& ch : c.children) out->children.push_back(clone_cond(*ch));
    return out;
}

ExprPtr Expr::clone() const {
    auto e = std::make_unique<Expr>();
    e->kind = kind;
    e->loc = loc;
    e->num = num;
    e->name = name;
    e->bin_op = bin_op;
    e->builtin = builtin;
    e->noise_arity = noise_arity;
    e->noise_id = noise_id;
    for (const auto& a : args) e->args.push_back(a->clone());
    if (cond) e->cond = clone_cond(*cond);
    return e;
}

}  // namespace morphgen
