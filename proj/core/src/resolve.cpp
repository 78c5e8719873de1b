#include "morphgen/model.hpp"

#include <cmath>
#include <set>
#include <sstream>
#include <unordered_map>

#include "morphgen/pretty.hpp"

namespace morphgen {

namespace {

double apply_builtin(Builtin b, double x, double y) {
    switch (b) {
        case Builtin::Exp: return std::exp(x);
        case Builtin::Ln: return std::log(x);
        case Builtin::Sqrt: return std::sqrt(x);
        case Builtin::Sin: return std::sin(x);
        case Builtin::Cos: return std::cos(x);
        case Builtin::Tanh: return std::tanh(x);
        case Builtin::Arccos: return std::acos(x);
        case Builtin::Min: return std::min(x, y);
        case Builtin::Max: return std::max(x, y);
    }
    return 0;
}

// Constant evaluation over an environment of named numbers.
double const_eval(const Expr& e, const std::map<std::string, double>& env,
                  const char* what) {
    switch (e.kind) {
        case Expr::Kind::Num: return e.num;
        case Expr::Kind::Ident: {
            auto it = env.find(e.name);
            if (it != env.end()) return it->second;
            if (e.name == "pi") return M_PI;
            throw SemanticError("UnknownIdentifier: '" + e.name + "' in " + what, e.loc);
        }
        case Expr::Kind::Time:
            throw SemanticError(std::string("the time symbol 't' is not allowed in ") + what,
                                e.loc);
        case Expr::Kind::Neg: return -const_eval(*e.args[0], env, what);
        case Expr::Kind::Group: return const_eval(*e.args[0], env, what);
        case Expr::Kind::Bin: {
            double a = const_eval(*e.args[0], env, what);
            double b = const_eval(*e.args[1], env, what);
            switch (e.bin_op) {
                case BinOp::Add: return a + b;
                case BinOp::Sub: return a - b;
                case BinOp::Mul: return a * b;
                case BinOp::Div: return a / b;
                case BinOp::Pow: return std::pow(a, b);
            }
            return 0;
        }
        case Expr::Kind::Call: {
            double a = const_eval(*e.args[0], env, what);
            double b = e.args.size() > 1 ? const_eval(*e.args[1], env, what) : 0;
            return apply_builtin(e.builtin, a, b);
        }
        default:
            throw SemanticError(std::string("expression is not constant in ") + what, e.loc);
    }
}

struct Resolver {
    const ProgramAst& ast;
    const Overrides& overrides;
    CompiledModel model;
    std::map<std::string, double> params;  // folded values
    int next_noise_id = 0;

    Resolver(const ProgramAst& a, const Overrides& o) : ast(a), overrides(o) {}

    void collect_fields() {
        for (const auto& sub : ast.substances) {
            for (const auto& f : sub.fields) {
                if (model.field_index.count(f.name))
                    throw SemanticError("field '" + f.name + "' declared twice", f.loc);
                if (f.name == "t" || f.name == "pi")
                    throw SemanticError("field name '" + f.name + "' shadows a builtin",
                                        f.loc);
                model.field_index[f.name] = (int)model.fields.size();
                model.fields.push_back({f.name, f.kind, sub.name});
            }
        }
        model.updates.resize(model.fields.size());
    }

    void fold_param(const Stmt& s) {
        if (params.count(s.name))
            throw SemanticError("parameter '" + s.name + "' defined twice", s.loc);
        if (model.field_index.count(s.name))
            throw SemanticError("parameter '" + s.name + "' collides with a field", s.loc);
        double v;
        auto ov = overrides.find(s.name);
        if (ov != overrides.end()) {
            v = ov->second;
        } else {
            v = const_eval(*s.expr, params, "parameter definition");
        }
        params[s.name] = v;
        model.params.emplace_back(s.name, v);
    }

    void collect_params() {
        for (const auto& s : ast.sim.global_params) fold_param(s);
        for (const auto& sub : ast.substances)
            for (const auto& s : sub.behavior)
                if (s.kind == Stmt::Kind::Param) fold_param(s);
        for (const auto& [name, v] : overrides)
            if (!params.count(name))
                throw SemanticError("override of unknown parameter '" + name + "'");
    }

    // Inline let macros and parameters; rewrite identifiers.
    ExprPtr resolve_expr(const Expr& e,
                         const std::map<std::string, const Expr*>& lets,
                         std::set<std::string>& expanding) {
        switch (e.kind) {
            case Expr::Kind::Ident: {
                auto lit = lets.find(e.name);
                if (lit != lets.end()) {
                    if (expanding.count(e.name))
                        throw SemanticError("recursive let '" + e.name + "'", e.loc);
                    expanding.insert(e.name);
                    ExprPtr r = resolve_expr(*lit->second, lets, expanding);
                    expanding.erase(e.name);
                    return r;
                }
                auto pit = params.find(e.name);
                if (pit != params.end()) return num(pit->second, e.loc);
                if (model.field_index.count(e.name)) return e.clone();
                if (e.name == "pi") return num(M_PI, e.loc);
                throw SemanticError("UnknownIdentifier: '" + e.name + "'", e.loc);
            }
            case Expr::Kind::Sensed:
                if (!model.field_index.count(e.name))
                    throw SemanticError("UndeclaredField: '<" + e.name + ">'", e.loc);
                return e.clone();
            case Expr::Kind::Heaviside: {
                auto out = std::make_unique<Expr>();
                out->kind = Expr::Kind::Heaviside;
                out->loc = e.loc;
                out->cond = resolve_cond(*e.cond, lets, expanding);
                return out;
            }
            default: {
                auto out = std::make_unique<Expr>();
                out->kind = e.kind;
                out->loc = e.loc;
                out->num = e.num;
                out->name = e.name;
                out->bin_op = e.bin_op;
                out->builtin = e.builtin;
                out->noise_arity = e.noise_arity;
                if (e.kind == Expr::Kind::Noise) out->noise_id = next_noise_id++;
                for (const auto& a : e.args)
                    out->args.push_back(resolve_expr(*a, lets, expanding));
                return fold(std::move(out));
            }
        }
    }

    CondPtr resolve_cond(const Cond& c, const std::map<std::string, const Expr*>& lets,
                         std::set<std::string>& expanding) {
        auto out = std::make_unique<Cond>();
        out->kind = c.kind;
        out->chain.ops = c.chain.ops;
        for (const auto& e : c.chain.operands)
            out->chain.operands.push_back(resolve_expr(*e, lets, expanding));
        for (const auto& ch : c.children)
            out->children.push_back(resolve_cond(*ch, lets, expanding));
        return out;
    }

    static ExprPtr num(double v, SourceLoc loc) {
        auto e = std::make_unique<Expr>();
        e->kind = Expr::Kind::Num;
        e->num = v;
        e->loc = loc;
        return e;
    }

    // Bottom-up constant folding of arithmetic on literals.
    static ExprPtr fold(ExprPtr e) {
        auto is_num = [](const ExprPtr& p) { return p->kind == Expr::Kind::Num; };
        switch (e->kind) {
            case Expr::Kind::Neg:
                if (is_num(e->args[0])) return num(-e->args[0]->num, e->loc);
                break;
            case Expr::Kind::Group:
                return std::move(e->args[0]);
            case Expr::Kind::Bin:
                if (is_num(e->args[0]) && is_num(e->args[1])) {
                    double a = e->args[0]->num, b = e->args[1]->num;
                    switch (e->bin_op) {
                        case BinOp::Add: return num(a + b, e->loc);
                        case BinOp::Sub: return num(a - b, e->loc);
                        case BinOp::Mul: return num(a * b, e->loc);
                        case BinOp::Div: return num(a / b, e->loc);
                        case BinOp::Pow: return num(std::pow(a, b), e->loc);
                    }
                }
                break;
            case Expr::Kind::Call: {
                bool all = true;
                for (auto& a : e->args) all = all && is_num(a);
                if (all) {
                    double a = e->args[0]->num;
                    double b = e->args.size() > 1 ? e->args[1]->num : 0;
                    return num(apply_builtin(e->builtin, a, b), e->loc);
                }
                break;
            }
            default: break;
        }
        return e;
    }

    void process_behavior() {
        for (const auto& sub : ast.substances) {
            // `let` names that are not declared fields act as macros local
            // to the substance; `let` of a declared field and bare `X = e`
            // are algebraic assignments recomputed every step.
            std::map<std::string, const Expr*> lets;
            for (const auto& s : sub.behavior) {
                switch (s.kind) {
                    case Stmt::Kind::Param: break;
                    case Stmt::Kind::Let:
                    case Stmt::Kind::Assign: {
                        int fi = model.index_of(s.name);
                        if (fi < 0) {
                            if (s.kind == Stmt::Kind::Assign)
                                throw SemanticError("UndeclaredField: assignment target '" +
                                                    s.name + "'", s.loc);
                            if (params.count(s.name))
                                throw SemanticError("let '" + s.name +
                                                    "' collides with a parameter", s.loc);
                            lets[s.name] = s.expr.get();
                            break;
                        }
                        for (auto& [afi, ae] : model.algebraic)
                            if (afi == fi)
                                throw SemanticError("field '" + s.name +
                                                    "' assigned algebraically twice", s.loc);
                        std::set<std::string> expanding;
                        model.algebraic.emplace_back(fi,
                                                     resolve_expr(*s.expr, lets, expanding));
                        break;
                    }
                    case Stmt::Kind::Change: {
                        int fi = model.index_of(s.name);
                        if (fi < 0)
                            throw SemanticError("UndeclaredField: '" + s.name + "'", s.loc);
                        std::set<std::string> expanding;
                        ExprPtr rhs = resolve_expr(*s.expr, lets, expanding);
                        if (s.mode == ChangeMode::Assign) {
                            if (model.updates[fi].base)
                                throw SemanticError("DuplicateBaseEquation: field '" +
                                                    s.name + "'", s.loc);
                            model.updates[fi].base = std::move(rhs);
                        } else {
                            int sign = s.mode == ChangeMode::Add ? 1 : -1;
                            model.updates[fi].partials.emplace_back(sign, std::move(rhs));
                        }
                        break;
                    }
                }
            }
        }
        for (auto& [fi, e] : model.algebraic) {
            if (!model.updates[fi].empty())
                throw SemanticError("field '" + model.fields[fi].name +
                                    "' has both an algebraic assignment and change equations");
        }
    }

    void lower_bodies() {
        std::set<std::string> substance_names;
        for (const auto& sub : ast.substances) substance_names.insert(sub.name);

        for (const auto& b : ast.bodies) {
            if (!substance_names.count(b.substance))
                throw SemanticError("BodyOfUnknownSubstance: '" + b.substance + "'", b.loc);
            LoweredBody lb;
            lb.name = b.name;
            lb.substance = b.substance;
            for (const auto& init : b.inits) {
                LoweredBodyInit li;
                li.region.kind = init.region.kind;
                const char* ctx = "body region bounds";
                if (init.region.kind == Region::Kind::Box) {
                    li.region.a = const_eval(*init.region.a, params, ctx);
                    li.region.b = const_eval(*init.region.b, params, ctx);
                    li.region.c = const_eval(*init.region.c, params, ctx);
                    li.region.d = const_eval(*init.region.d, params, ctx);
                    if (!(li.region.a < li.region.b) || !(li.region.c < li.region.d))
                        throw SemanticError("degenerate box region in body '" + b.name + "'",
                                            init.region.loc);
                } else {
                    li.region.a = const_eval(*init.region.a, params, ctx);
                    li.region.b = const_eval(*init.region.b, params, ctx);
                    li.region.c = const_eval(*init.region.c, params, ctx);
                    if (!(li.region.c > 0))
                        throw SemanticError("disc radius must be positive in body '" +
                                            b.name + "'", init.region.loc);
                }
                for (const auto& [fname, fexpr] : init.assigns) {
                    int fi = model.index_of(fname);
                    if (fi < 0)
                        throw SemanticError("UndeclaredField: '" + fname +
                                            "' in body '" + b.name + "'", b.loc);
                    LoweredInit la;
                    la.field = fi;
                    if (model.fields[fi].kind == FieldKind::Vector) {
                        if (fexpr->kind != Expr::Kind::VecLit)
                            throw SemanticError("vector field '" + fname +
                                                "' needs a (x, y) initializer", fexpr->loc);
                        la.value = const_eval(*fexpr->args[0], params, "body initialization");
                        la.vy = const_eval(*fexpr->args[1], params, "body initialization");
                    } else {
                        la.value = const_eval(*fexpr, params, "body initialization");
                    }
                    li.assigns.push_back(la);
                }
                lb.inits.push_back(std::move(li));
            }
            model.bodies.push_back(std::move(lb));
        }
    }

    void plan_viz() {
        for (const auto& v : ast.viz) {
            if (v.kind == VizCmd::Kind::Stability) {
                StabilityReport r;
                r.kind = v.report;
                std::map<std::string, const Expr*> nolets;
                for (const auto& op : v.operands) {
                    std::set<std::string> expanding;
                    r.text += (r.text.empty() ? "" : " and ") + print_expr(*op);
                    r.operands.push_back(resolve_expr(*op, nolets, expanding));
                }
                model.reports.push_back(std::move(r));
                continue;
            }
            DisplayPlan d;
            d.movie = v.kind == VizCmd::Kind::Movie;
            d.time = d.movie ? DisplayTime::Running : v.time;
            d.style = v.style;
            d.filename = v.filename;
            d.options = v.options;
            int fi = model.index_of(v.field);
            if (fi < 0)
                throw SemanticError("UndeclaredField: '" + v.field + "' in visualization",
                                    v.loc);
            d.field = fi;
            if (v.style == DisplayKind::Quivers) {
                if (model.fields[fi].kind != FieldKind::Vector)
                    throw SemanticError("quivers need a vector field", v.loc);
            } else if (model.fields[fi].kind != FieldKind::Scalar) {
                throw SemanticError("display of a vector field as " +
                                    std::string(v.style == DisplayKind::Contours
                                                    ? "contours" : "colors/mesh") +
                                    " is not supported; use quivers", v.loc);
            }
            if (v.limit_lo) {
                d.has_limits = true;
                d.limit_lo = const_eval(*v.limit_lo, params, "display limits");
                d.limit_hi = const_eval(*v.limit_hi, params, "display limits");
                if (!(d.limit_lo < d.limit_hi))
                    throw SemanticError("DegenerateLimits: lo must be below hi", v.loc);
            }
            if (v.mesh_pitch)
                d.mesh_pitch = const_eval(*v.mesh_pitch, params, "quiver mesh pitch");
            parse_options(d);
            model.displays.push_back(std::move(d));
        }
    }

    // Recognized keys: interval=<steps>, levels=<n>. Anything else is kept
    // opaque per the grammar and reported as a warning by the run log.
    void parse_options(DisplayPlan& d) {
        std::istringstream is(d.options);
        std::string tok;
        std::string rest;
        while (is >> tok) {
            auto eq = tok.find('=');
            // the lexer splits around '=', so also accept "interval = 10"
            std::string key = tok, val;
            if (eq != std::string::npos) {
                key = tok.substr(0, eq);
                val = tok.substr(eq + 1);
            } else {
                std::string op;
                std::streampos save = is.tellg();
                if (is >> op && op == "=" && is >> val) {
                    // consumed
                } else {
                    is.clear();
                    is.seekg(save);
                    val.clear();
                }
            }
            if (key == "interval" && !val.empty()) d.interval_steps = std::atoi(val.c_str());
            else if (key == "levels" && !val.empty()) d.contour_levels = std::atoi(val.c_str());
            else rest += (rest.empty() ? "" : " ") + tok + (val.empty() ? "" : "=" + val);
        }
    }

    void geometry() {
        const SimParamsAst& sim = ast.sim;
        auto need = [&](const ExprPtr& e, const char* what) -> double {
            if (!e) throw SemanticError(std::string("missing ") + what +
                                        " in simulation parameters", sim.loc);
            return const_eval(*e, params, what);
        };
        model.duration = need(sim.duration, "duration");
        double tres = need(sim.temporal_resolution, "temporal resolution");
        double sres = need(sim.spatial_resolution, "spatial resolution");
        model.xlo = need(sim.xlo, "space bounds");
        model.xhi = need(sim.xhi, "space bounds");
        model.ylo = need(sim.ylo, "space bounds");
        model.yhi = need(sim.yhi, "space bounds");
        if (!(model.duration > 0)) throw SemanticError("duration must be positive", sim.loc);
        if (!(tres > 0) || !(sres > 0))
            throw SemanticError("resolutions must be positive", sim.loc);
        if (!(model.xlo < model.xhi) || !(model.ylo < model.yhi))
            throw SemanticError("space bounds must be ordered", sim.loc);
        model.dt = 1.0 / tres;
        model.dx = 1.0 / sres;
        model.nx = (int)std::lround((model.xhi - model.xlo) / model.dx);
        model.ny = (int)std::lround((model.yhi - model.ylo) / model.dx);

        for (const auto& d : ast.sim.save_load) {
            SaveLoadPlan p;
            p.is_save = d.is_save;
            p.filename = d.filename;
            for (const auto& f : d.fields) {
                int fi = model.index_of(f);
                if (fi < 0)
                    throw SemanticError("UndeclaredField: '" + f + "' in save/load", d.loc);
                p.fields.push_back(fi);
            }
            model.save_load.push_back(std::move(p));
        }
        model.log_params = ast.sim.log_params;
        model.log_notes = ast.sim.log_notes;
        for (const auto& n : model.log_params)
            if (!params.count(n))
                throw SemanticError("log params names unknown parameter '" + n + "'");
    }

    CompiledModel run() {
        model.name = ast.name;
        collect_fields();
        collect_params();
        geometry();
        process_behavior();
        lower_bodies();
        plan_viz();
        model.noise_stream_count = next_noise_id;
        check_update_kinds(model);
        return std::move(model);
    }
};

FieldKind expr_kind(const Expr& e, const CompiledModel& m);

FieldKind cond_operand_kind(const Cond& c, const CompiledModel& m) {
    if (c.kind == Cond::Kind::Chain) {
        for (const auto& op : c.chain.operands) {
            if (expr_kind(*op, m) != FieldKind::Scalar)
                throw SemanticError("KindMismatch: comparison operands must be scalar",
                                    op->loc);
        }
    }
    for (const auto& ch : c.children) cond_operand_kind(*ch, m);
    return FieldKind::Scalar;
}

FieldKind expr_kind(const Expr& e, const CompiledModel& m) {
    auto scalar_only = [&](const Expr& a, const char* what) {
        if (expr_kind(a, m) != FieldKind::Scalar)
            throw SemanticError(std::string("KindMismatch: ") + what +
                                " expects a scalar operand", a.loc);
    };
    auto vector_only = [&](const Expr& a, const char* what) {
        if (expr_kind(a, m) != FieldKind::Vector)
            throw SemanticError(std::string("KindMismatch: ") + what +
                                " expects a vector operand", a.loc);
    };
    switch (e.kind) {
        case Expr::Kind::Num:
        case Expr::Kind::Time:
            return FieldKind::Scalar;
        case Expr::Kind::Ident: {
            int fi = m.index_of(e.name);
            if (fi < 0)
                throw SemanticError("UnknownIdentifier: '" + e.name + "'", e.loc);
            return m.fields[fi].kind;
        }
        case Expr::Kind::Sensed: {
            int fi = m.index_of(e.name);
            if (fi < 0) throw SemanticError("UndeclaredField: '" + e.name + "'", e.loc);
            if (m.fields[fi].kind != FieldKind::Scalar)
                throw SemanticError("KindMismatch: sensed reference must name a scalar field",
                                    e.loc);
            return FieldKind::Scalar;
        }
        case Expr::Kind::VecLit:
            scalar_only(*e.args[0], "vector literal component");
            scalar_only(*e.args[1], "vector literal component");
            return FieldKind::Vector;
        case Expr::Kind::Neg:
            return expr_kind(*e.args[0], m);
        case Expr::Kind::Group:
            return expr_kind(*e.args[0], m);
        case Expr::Kind::Bin: {
            FieldKind a = expr_kind(*e.args[0], m);
            FieldKind b = expr_kind(*e.args[1], m);
            switch (e.bin_op) {
                case BinOp::Add:
                case BinOp::Sub:
                    if (a != b)
                        throw SemanticError("KindMismatch: cannot mix scalar and vector in "
                                            "addition", e.loc);
                    return a;
                case BinOp::Mul:
                    if (a == FieldKind::Vector && b == FieldKind::Vector)
                        throw SemanticError("KindMismatch: vector*vector needs dot()", e.loc);
                    return (a == FieldKind::Vector || b == FieldKind::Vector)
                               ? FieldKind::Vector
                               : FieldKind::Scalar;
                case BinOp::Div:
                    if (b == FieldKind::Vector)
                        throw SemanticError("KindMismatch: division by a vector", e.loc);
                    return a;
                case BinOp::Pow:
                    if (a != FieldKind::Scalar || b != FieldKind::Scalar)
                        throw SemanticError("KindMismatch: power needs scalar operands",
                                            e.loc);
                    return FieldKind::Scalar;
            }
            return FieldKind::Scalar;
        }
        case Expr::Kind::Grad:
            scalar_only(*e.args[0], "del");
            return FieldKind::Vector;
        case Expr::Kind::Lapl:
            // componentwise on vectors
            return expr_kind(*e.args[0], m);
        case Expr::Kind::Div:
            vector_only(*e.args[0], "div");
            return FieldKind::Scalar;
        case Expr::Kind::Norm:
            vector_only(*e.args[0], "||.||");
            return FieldKind::Scalar;
        case Expr::Kind::Dot:
            vector_only(*e.args[0], "dot");
            vector_only(*e.args[1], "dot");
            return FieldKind::Scalar;
        case Expr::Kind::Call:
            for (const auto& a : e.args) scalar_only(*a, "math function");
            return FieldKind::Scalar;
        case Expr::Kind::Heaviside:
            cond_operand_kind(*e.cond, m);
            return FieldKind::Scalar;
        case Expr::Kind::Noise: {
            scalar_only(*e.args[0], "noise weight");
            return e.noise_arity == 2 ? FieldKind::Vector : FieldKind::Scalar;
        }
    }
    return FieldKind::Scalar;
}

}  // namespace

CompiledModel resolve(const ProgramAst& ast, const Overrides& overrides) {
    Resolver r(ast, overrides);
    return r.run();
}

FieldKind kindcheck(const Expr& e, const CompiledModel& model) {
    return expr_kind(e, model);
}

void check_update_kinds(const CompiledModel& model) {
    for (size_t i = 0; i < model.fields.size(); i++) {
        const UpdateSpec& u = model.updates[i];
        FieldKind want = model.fields[i].kind;
        auto check = [&](const Expr& e) {
            FieldKind got = expr_kind(e, model);
            if (got != want)
                throw SemanticError("KindMismatch: field '" + model.fields[i].name +
                                    "' is " +
                                    (want == FieldKind::Scalar ? "scalar" : "vector") +
                                    " but its change equation is " +
                                    (got == FieldKind::Scalar ? "scalar" : "vector"),
                                    e.loc);
        };
        if (u.base) check(*u.base);
        for (const auto& [sign, p] : u.partials) check(*p);
    }
    for (const auto& [fi, e] : model.algebraic) {
        FieldKind got = expr_kind(*e, model);
        if (got != model.fields[fi].kind)
            throw SemanticError("KindMismatch: algebraic assignment to '" +
                                model.fields[fi].name + "' has the wrong kind", e->loc);
    }
}

std::string model_summary(const CompiledModel& m) {
    std::ostringstream os;
    os << "model " << m.name << ": grid " << m.nx << "x" << m.ny << " dx=" << m.dx
       << " dt=" << m.dt << " duration=" << m.duration << "\n";
    for (size_t i = 0; i < m.fields.size(); i++) {
        const auto& f = m.fields[i];
        os << "  " << (f.kind == FieldKind::Scalar ? "scalar" : "vector") << " " << f.name
           << " [" << f.substance << "]";
        const UpdateSpec& u = m.updates[i];
        if (u.base) os << " base";
        if (!u.partials.empty()) os << " partials=" << u.partials.size();
        for (const auto& [fi, e] : m.algebraic)
            if (fi == (int)i) os << " algebraic";
        os << "\n";
    }
    os << "  params:";
    for (const auto& [n, v] : m.params) os << " " << n << "=" << format_number(v);
    os << "\n";
    return os.str();
}

}  // namespace morphgen
