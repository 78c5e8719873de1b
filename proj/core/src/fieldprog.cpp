#include "morphgen/fieldprog.hpp"

#include <cmath>

#include "morphgen/parallel.hpp"
#include "morphgen/stencil.hpp"

namespace morphgen {

// Register reuse discipline: pointwise instructions may write in place, so
// operands flagged as dead are released before the destination is drawn
// from the pool. Stencil instructions read neighbors and must never alias
// their input, so they allocate the destination first.
struct FieldProgram::Compiler {
    const CompiledModel& model;
    FieldProgram& prog;
    std::vector<int> free_regs;
    double noise_scale = 1.0;

    Compiler(const CompiledModel& m, FieldProgram& p) : model(m), prog(p) {}

    int alloc_reg() {
        if (!free_regs.empty()) {
            int r = free_regs.back();
            free_regs.pop_back();
            return r;
        }
        return prog.nregs_++;
    }
    void release(const Operand& o) {
        if (o.kind == Operand::Kind::Reg) free_regs.push_back(o.idx);
    }
    void release(const CVal& v) {
        release(v.x);
        if (v.vec) release(v.y);
    }

    static Operand konst(double c) {
        Operand o;
        o.kind = Operand::Kind::Const;
        o.c = c;
        return o;
    }
    static Operand reg(int r) {
        Operand o;
        o.kind = Operand::Kind::Reg;
        o.idx = r;
        return o;
    }
    static Operand field(int f, int comp) {
        Operand o;
        o.kind = Operand::Kind::Field;
        o.idx = f;
        o.comp = comp;
        return o;
    }

    Operand emit_bin(Op op, Operand a, Operand b, bool rel_a = true, bool rel_b = true) {
        if (rel_a) release(a);
        if (rel_b) release(b);
        int r = alloc_reg();
        Ins ins;
        ins.op = op;
        ins.dst = r;
        ins.a = a;
        ins.b = b;
        prog.ins_.push_back(ins);
        return reg(r);
    }
    Operand emit_un(Op op, Operand a, int aux = 0, bool rel = true) {
        if (rel) release(a);
        int r = alloc_reg();
        Ins ins;
        ins.op = op;
        ins.dst = r;
        ins.a = a;
        ins.aux = aux;
        prog.ins_.push_back(ins);
        return reg(r);
    }

    Operand scalar_bin(BinOp op, Operand a, Operand b, bool rel_a = true,
                       bool rel_b = true) {
        if (a.kind == Operand::Kind::Const && b.kind == Operand::Kind::Const) {
            switch (op) {
                case BinOp::Add: return konst(a.c + b.c);
                case BinOp::Sub: return konst(a.c - b.c);
                case BinOp::Mul: return konst(a.c * b.c);
                case BinOp::Div: return konst(a.c / b.c);
                case BinOp::Pow: return konst(std::pow(a.c, b.c));
            }
        }
        switch (op) {
            case BinOp::Add: return emit_bin(Op::Add, a, b, rel_a, rel_b);
            case BinOp::Sub: return emit_bin(Op::Sub, a, b, rel_a, rel_b);
            case BinOp::Mul: return emit_bin(Op::Mul, a, b, rel_a, rel_b);
            case BinOp::Div: return emit_bin(Op::DivOp, a, b, rel_a, rel_b);
            case BinOp::Pow:
                if (b.kind == Operand::Kind::Const && b.c == std::floor(b.c) &&
                    b.c >= 2 && b.c <= 16)
                    return emit_un(Op::PowI, a, (int)b.c, rel_a);
                return emit_bin(Op::Pow, a, b, rel_a, rel_b);
        }
        return konst(0);
    }

    Operand emit_neg(Operand a, bool rel = true) {
        if (a.kind == Operand::Kind::Const) return konst(-a.c);
        return emit_un(Op::Neg, a, 0, rel);
    }

    CVal compile(const Expr& e) {
        switch (e.kind) {
            case Expr::Kind::Num: return {false, konst(e.num), {}};
            case Expr::Kind::Time: {
                Operand o;
                o.kind = Operand::Kind::Time;
                return {false, o, {}};
            }
            case Expr::Kind::Ident: {
                int fi = model.index_of(e.name);
                if (fi < 0) throw SemanticError("unresolved identifier '" + e.name + "'");
                if (model.fields[fi].kind == FieldKind::Vector)
                    return {true, field(fi, 0), field(fi, 1)};
                return {false, field(fi, 0), {}};
            }
            case Expr::Kind::Sensed: {
                // in the Eulerian engine the neighborhood estimate of a
                // field is the field itself
                int fi = model.index_of(e.name);
                if (fi < 0) throw SemanticError("unresolved field '" + e.name + "'");
                return {false, field(fi, 0), {}};
            }
            case Expr::Kind::VecLit: {
                CVal a = compile(*e.args[0]);
                CVal b = compile(*e.args[1]);
                return {true, a.x, b.x};
            }
            case Expr::Kind::Group: return compile(*e.args[0]);
            case Expr::Kind::Neg: {
                CVal a = compile(*e.args[0]);
                CVal out;
                out.vec = a.vec;
                out.x = emit_neg(a.x);
                if (a.vec) out.y = emit_neg(a.y);
                return out;
            }
            case Expr::Kind::Bin: {
                CVal a = compile(*e.args[0]);
                CVal b = compile(*e.args[1]);
                if (!a.vec && !b.vec)
                    return {false, scalar_bin(e.bin_op, a.x, b.x), {}};
                CVal out;
                out.vec = true;
                if (a.vec && b.vec) {
                    out.x = scalar_bin(e.bin_op, a.x, b.x);
                    out.y = scalar_bin(e.bin_op, a.y, b.y);
                } else if (a.vec) {  // vector op scalar
                    out.x = scalar_bin(e.bin_op, a.x, b.x, true, false);
                    out.y = scalar_bin(e.bin_op, a.y, b.x, true, true);
                } else {  // scalar op vector
                    out.x = scalar_bin(e.bin_op, a.x, b.x, false, true);
                    out.y = scalar_bin(e.bin_op, a.x, b.y, true, true);
                }
                return out;
            }
            case Expr::Kind::Call: {
                CVal a = compile(*e.args[0]);
                if (e.args.size() == 2) {
                    CVal b = compile(*e.args[1]);
                    Op op = e.builtin == Builtin::Min ? Op::Min2 : Op::Max2;
                    return {false, emit_bin(op, a.x, b.x), {}};
                }
                Op op;
                switch (e.builtin) {
                    case Builtin::Exp: op = Op::Exp; break;
                    case Builtin::Ln: op = Op::Ln; break;
                    case Builtin::Sqrt: op = Op::Sqrt; break;
                    case Builtin::Sin: op = Op::Sin; break;
                    case Builtin::Cos: op = Op::Cos; break;
                    case Builtin::Tanh: op = Op::Tanh; break;
                    case Builtin::Arccos: op = Op::Arccos; break;
                    default: op = Op::Exp; break;
                }
                return {false, emit_un(op, a.x), {}};
            }
            case Expr::Kind::Grad: {
                CVal a = compile(*e.args[0]);
                if (a.x.kind == Operand::Kind::Const) return {true, konst(0), konst(0)};
                int rx = alloc_reg();
                int ry = alloc_reg();
                release(a);
                Ins ins;
                ins.op = Op::Grad;
                ins.dst = rx;
                ins.dst2 = ry;
                ins.a = a.x;
                prog.ins_.push_back(ins);
                return {true, reg(rx), reg(ry)};
            }
            case Expr::Kind::Lapl: {
                CVal a = compile(*e.args[0]);
                CVal out;
                out.vec = a.vec;
                out.x = emit_stencil1(Op::Lapl, a.x);
                if (a.vec) out.y = emit_stencil1(Op::Lapl, a.y);
                return out;
            }
            case Expr::Kind::Div: {
                CVal a = compile(*e.args[0]);
                if (a.x.kind == Operand::Kind::Const && a.y.kind == Operand::Kind::Const)
                    return {false, konst(0), {}};
                Operand fx = materialize(a.x);
                Operand fy = materialize(a.y);
                int r = alloc_reg();
                release(fx);
                release(fy);
                Ins ins;
                ins.op = Op::Diverg;
                ins.dst = r;
                ins.a = fx;
                ins.b = fy;
                prog.ins_.push_back(ins);
                return {false, reg(r), {}};
            }
            case Expr::Kind::Norm: {
                CVal a = compile(*e.args[0]);
                if (a.x.kind == Operand::Kind::Const && a.y.kind == Operand::Kind::Const)
                    return {false, konst(std::hypot(a.x.c, a.y.c)), {}};
                return {false, emit_bin(Op::NormV, a.x, a.y), {}};
            }
            case Expr::Kind::Dot: {
                CVal a = compile(*e.args[0]);
                CVal b = compile(*e.args[1]);
                release(a);
                release(b);
                int r = alloc_reg();
                Ins ins;
                ins.op = Op::DotV;
                ins.dst = r;
                ins.a = a.x;
                ins.b = a.vec ? a.y : a.x;
                ins.c = b.x;
                ins.d = b.vec ? b.y : b.x;
                prog.ins_.push_back(ins);
                return {false, reg(r), {}};
            }
            case Expr::Kind::Heaviside:
                return {false, compile_cond(*e.cond), {}};
            case Expr::Kind::Noise: {
                CVal w = compile(*e.args[0]);
                bool vec = e.noise_arity == 2;
                CVal out;
                out.vec = vec;
                int ncomp = vec ? 2 : 1;
                for (int compn = 0; compn < ncomp; compn++) {
                    bool last = compn == ncomp - 1;
                    if (last) release(w.x);
                    int r = alloc_reg();
                    Ins ins;
                    ins.op = Op::NoiseOp;
                    ins.dst = r;
                    ins.a = w.x;
                    ins.aux = e.noise_id;
                    ins.comp = compn;
                    ins.scale = noise_scale;
                    prog.ins_.push_back(ins);
                    (compn == 0 ? out.x : out.y) = reg(r);
                }
                return out;
            }
        }
        throw SemanticError("unsupported expression in field program");
    }

    Operand emit_stencil1(Op op, Operand a) {
        if (a.kind == Operand::Kind::Const) return konst(0);
        int r = alloc_reg();
        release(a);
        Ins ins;
        ins.op = op;
        ins.dst = r;
        ins.a = a;
        prog.ins_.push_back(ins);
        return reg(r);
    }

    Operand materialize(const Operand& o) {
        if (o.kind != Operand::Kind::Const) return o;
        int r = alloc_reg();
        Ins ins;
        ins.op = Op::Fill;
        ins.dst = r;
        ins.a = o;
        prog.ins_.push_back(ins);
        return reg(r);
    }

    Operand compile_cond(const Cond& c) {
        switch (c.kind) {
            case Cond::Kind::Chain: {
                std::vector<CVal> ops;
                for (const auto& e : c.chain.operands) ops.push_back(compile(*e));
                Operand acc = konst(1.0);
                bool first = true;
                size_t ncmp = c.chain.ops.size();
                for (size_t k = 0; k < ncmp; k++) {
                    Op op;
                    switch (c.chain.ops[k]) {
                        case CmpOp::Lt: op = Op::CLt; break;
                        case CmpOp::Le: op = Op::CLe; break;
                        case CmpOp::Gt: op = Op::CGt; break;
                        case CmpOp::Ge: op = Op::CGe; break;
                    }
                    // operand k dies with comparison k; operand k+1 dies
                    // with the last comparison it appears in
                    bool rel_rhs = k == ncmp - 1;
                    Operand cmp = emit_bin(op, ops[k].x, ops[k + 1].x, true, rel_rhs);
                    acc = first ? cmp : emit_bin(Op::Mul, acc, cmp);
                    first = false;
                }
                return acc;
            }
            case Cond::Kind::And: {
                Operand acc = compile_cond(*c.children[0]);
                for (size_t i = 1; i < c.children.size(); i++)
                    acc = emit_bin(Op::Mul, acc, compile_cond(*c.children[i]));
                return acc;
            }
            case Cond::Kind::Or: {
                Operand acc = compile_cond(*c.children[0]);
                for (size_t i = 1; i < c.children.size(); i++)
                    acc = emit_bin(Op::OrMax, acc, compile_cond(*c.children[i]));
                return acc;
            }
        }
        return konst(0);
    }

    void store_field(int fi, const CVal& v) {
        const FieldInfo& info = model.fields[fi];
        int comps = info.kind == FieldKind::Vector ? 2 : 1;
        for (int comp = 0; comp < comps; comp++) {
            Ins ins;
            ins.op = Op::StoreField;
            ins.aux = fi;
            ins.comp = comp;
            ins.a = comp == 0 ? v.x : v.y;
            prog.ins_.push_back(ins);
        }
        release(v);
    }

    void commit_field(int fi, const CVal& v) {
        const FieldInfo& info = model.fields[fi];
        int comps = info.kind == FieldKind::Vector ? 2 : 1;
        for (int comp = 0; comp < comps; comp++) {
            Ins ins;
            ins.op = Op::Commit;
            ins.aux = fi;
            ins.comp = comp;
            ins.a = comp == 0 ? v.x : (info.kind == FieldKind::Vector ? v.y : v.x);
            prog.ins_.push_back(ins);
        }
    }
};

FieldProgram FieldProgram::compile(const CompiledModel& model, bool dw_sde) {
    FieldProgram prog;
    prog.dt_ = model.dt;
    Compiler c(model, prog);

    // algebraic assignments, recomputed from the current state in order
    c.noise_scale = 1.0;
    for (const auto& [fi, expr] : model.algebraic) {
        CVal v = c.compile(*expr);
        c.store_field(fi, v);
    }

    // every D-field RHS reads the pre-step state (Jacobi update)
    c.noise_scale = dw_sde ? 1.0 / std::sqrt(model.dt) : 1.0;
    std::vector<std::pair<int, CVal>> results;
    for (size_t fi = 0; fi < model.fields.size(); fi++) {
        const UpdateSpec& u = model.updates[fi];
        if (u.empty()) continue;
        CVal acc;
        bool have = false;
        if (u.base) {
            acc = c.compile(*u.base);
            have = true;
        }
        for (const auto& [sign, p] : u.partials) {
            CVal pv = c.compile(*p);
            if (!have) {
                if (sign > 0) {
                    acc = pv;
                } else {
                    CVal neg;
                    neg.vec = pv.vec;
                    neg.x = c.emit_neg(pv.x);
                    if (pv.vec) neg.y = c.emit_neg(pv.y);
                    acc = neg;
                }
                have = true;
                continue;
            }
            BinOp op = sign > 0 ? BinOp::Add : BinOp::Sub;
            CVal sum;
            sum.vec = acc.vec || pv.vec;
            if (acc.vec && pv.vec) {
                sum.x = c.scalar_bin(op, acc.x, pv.x);
                sum.y = c.scalar_bin(op, acc.y, pv.y);
            } else {
                sum.x = c.scalar_bin(op, acc.x, pv.x);
                sum.y = acc.vec ? acc.y : pv.y;
            }
            acc = sum;
        }
        if (!have) continue;
        results.emplace_back((int)fi, acc);
    }
    for (auto& [fi, v] : results) c.commit_field(fi, v);
    return prog;
}

void FieldProgram::exec_ins(const Ins& ins, SimState& state,
                            std::vector<ScalarGrid>& regs, int threads) const {
    const size_t n = state.geom.cells();
    auto src = [&](const Operand& o) -> const double* {
        switch (o.kind) {
            case Operand::Kind::Reg: return regs[o.idx].v.data();
            case Operand::Kind::Field: return state.plane(o.idx, o.comp).v.data();
            default: return nullptr;
        }
    };
    auto cval = [&](const Operand& o) -> double {
        return o.kind == Operand::Kind::Time ? state.t : o.c;
    };

    auto binary = [&](auto f) {
        double* d = regs[ins.dst].v.data();
        const double* A = src(ins.a);
        const double* B = src(ins.b);
        double ca = cval(ins.a), cb = cval(ins.b);
        parallel_for(n, threads, [&](size_t b, size_t e) {
            if (A && B) for (size_t i = b; i < e; i++) d[i] = f(A[i], B[i]);
            else if (A) for (size_t i = b; i < e; i++) d[i] = f(A[i], cb);
            else if (B) for (size_t i = b; i < e; i++) d[i] = f(ca, B[i]);
            else        for (size_t i = b; i < e; i++) d[i] = f(ca, cb);
        });
    };
    auto unary = [&](auto f) {
        double* d = regs[ins.dst].v.data();
        const double* A = src(ins.a);
        double ca = cval(ins.a);
        parallel_for(n, threads, [&](size_t b, size_t e) {
            if (A) for (size_t i = b; i < e; i++) d[i] = f(A[i]);
            else   for (size_t i = b; i < e; i++) d[i] = f(ca);
        });
    };

    switch (ins.op) {
        case Op::Add: binary([](double a, double b) { return a + b; }); break;
        case Op::Sub: binary([](double a, double b) { return a - b; }); break;
        case Op::Mul: binary([](double a, double b) { return a * b; }); break;
        case Op::DivOp: binary([](double a, double b) { return a / b; }); break;
        case Op::Pow: binary([](double a, double b) { return std::pow(a, b); }); break;
        case Op::PowI: {
            int k = ins.aux;
            unary([k](double a) {
                double r = 1.0, base = a;
                for (int m = k; m > 0; m >>= 1) {
                    if (m & 1) r *= base;
                    base *= base;
                }
                return r;
            });
            break;
        }
        case Op::Neg: unary([](double a) { return -a; }); break;
        case Op::Exp: unary([](double a) { return std::exp(a); }); break;
        case Op::Ln: unary([](double a) { return std::log(a); }); break;
        case Op::Sqrt: unary([](double a) { return std::sqrt(a); }); break;
        case Op::Sin: unary([](double a) { return std::sin(a); }); break;
        case Op::Cos: unary([](double a) { return std::cos(a); }); break;
        case Op::Tanh: unary([](double a) { return std::tanh(a); }); break;
        case Op::Arccos: unary([](double a) { return std::acos(a); }); break;
        case Op::Min2: binary([](double a, double b) { return std::min(a, b); }); break;
        case Op::Max2: binary([](double a, double b) { return std::max(a, b); }); break;
        case Op::CLt: binary([](double a, double b) { return a < b ? 1.0 : 0.0; }); break;
        case Op::CLe: binary([](double a, double b) { return a <= b ? 1.0 : 0.0; }); break;
        case Op::CGt: binary([](double a, double b) { return a > b ? 1.0 : 0.0; }); break;
        case Op::CGe: binary([](double a, double b) { return a >= b ? 1.0 : 0.0; }); break;
        case Op::OrMax: binary([](double a, double b) { return std::max(a, b); }); break;
        case Op::Fill: unary([](double a) { return a; }); break;
        case Op::Grad: {
            const ScalarGrid& f = ins.a.kind == Operand::Kind::Field
                                      ? state.plane(ins.a.idx, ins.a.comp)
                                      : regs[ins.a.idx];
            gradient_into(f, state.geom.dx, regs[ins.dst], regs[ins.dst2], threads);
            break;
        }
        case Op::Lapl: {
            const ScalarGrid& f = ins.a.kind == Operand::Kind::Field
                                      ? state.plane(ins.a.idx, ins.a.comp)
                                      : regs[ins.a.idx];
            laplacian_into(f, state.geom.dx, regs[ins.dst], threads);
            break;
        }
        case Op::Diverg: {
            const ScalarGrid& fx = ins.a.kind == Operand::Kind::Field
                                       ? state.plane(ins.a.idx, ins.a.comp)
                                       : regs[ins.a.idx];
            const ScalarGrid& fy = ins.b.kind == Operand::Kind::Field
                                       ? state.plane(ins.b.idx, ins.b.comp)
                                       : regs[ins.b.idx];
            divergence_into(fx, fy, state.geom.dx, regs[ins.dst], threads);
            break;
        }
        case Op::NormV: binary([](double a, double b) { return std::hypot(a, b); }); break;
        case Op::DotV: {
            double* d = regs[ins.dst].v.data();
            const double* ax = src(ins.a);
            const double* ay = src(ins.b);
            const double* bx = src(ins.c);
            const double* by = src(ins.d);
            double cax = cval(ins.a), cay = cval(ins.b), cbx = cval(ins.c),
                   cby = cval(ins.d);
            parallel_for(n, threads, [&](size_t b, size_t e) {
                for (size_t i = b; i < e; i++) {
                    double x1 = ax ? ax[i] : cax, y1 = ay ? ay[i] : cay;
                    double x2 = bx ? bx[i] : cbx, y2 = by ? by[i] : cby;
                    d[i] = x1 * x2 + y1 * y2;
                }
            });
            break;
        }
        case Op::NoiseOp: {
            double* d = regs[ins.dst].v.data();
            const double* W = src(ins.a);
            double cw = cval(ins.a);
            const NoisePlan& np = state.noise;
            uint64_t stream = (uint64_t)ins.aux;
            uint64_t stepno = (uint64_t)state.step;
            uint64_t comp = (uint64_t)ins.comp;
            double scale = ins.scale;
            parallel_for(n, threads, [&](size_t b, size_t e) {
                for (size_t i = b; i < e; i++) {
                    double w = W ? W[i] : cw;
                    d[i] = w * scale * np.normal(stream, stepno, comp, i);
                }
            });
            break;
        }
        case Op::StoreField: {
            double* d = state.plane(ins.aux, ins.comp).v.data();
            const double* A = src(ins.a);
            double ca = cval(ins.a);
            parallel_for(n, threads, [&](size_t b, size_t e) {
                if (A) for (size_t i = b; i < e; i++) d[i] = A[i];
                else   for (size_t i = b; i < e; i++) d[i] = ca;
            });
            break;
        }
        case Op::Commit: {
            double* d = state.plane(ins.aux, ins.comp).v.data();
            const double* A = src(ins.a);
            double ca = cval(ins.a);
            double dt = dt_;
            parallel_for(n, threads, [&](size_t b, size_t e) {
                if (A) for (size_t i = b; i < e; i++) d[i] += dt * A[i];
                else   for (size_t i = b; i < e; i++) d[i] += dt * ca;
            });
            break;
        }
    }
}

void FieldProgram::execute_step(SimState& state, int threads) const {
    if ((int)scratch_.size() != nregs_ ||
        (nregs_ > 0 && (scratch_[0].nx != state.geom.nx || scratch_[0].ny != state.geom.ny))) {
        scratch_.assign(nregs_, ScalarGrid(state.geom.nx, state.geom.ny));
    }
    for (const auto& ins : ins_) exec_ins(ins, state, scratch_, threads);
}

ScalarGrid FieldProgram::eval_scalar(const CompiledModel& model, const SimState& state,
                                     const Expr& expr) {
    FieldProgram prog;
    prog.dt_ = model.dt;
    Compiler c(model, prog);
    CVal v = c.compile(expr);
    Operand res = c.materialize(v.x);
    std::vector<ScalarGrid> regs(prog.nregs_, ScalarGrid(state.geom.nx, state.geom.ny));
    SimState& mut = const_cast<SimState&>(state);
    for (const auto& ins : prog.ins_) prog.exec_ins(ins, mut, regs, 1);
    if (res.kind == Operand::Kind::Reg) return regs[res.idx];
    return state.plane(res.idx, res.comp);
}

VectorGrid FieldProgram::eval_vector(const CompiledModel& model, const SimState& state,
                                     const Expr& expr) {
    FieldProgram prog;
    prog.dt_ = model.dt;
    Compiler c(model, prog);
    CVal v = c.compile(expr);
    Operand rx = c.materialize(v.x);
    Operand ry = c.materialize(v.vec ? v.y : v.x);
    std::vector<ScalarGrid> regs(prog.nregs_, ScalarGrid(state.geom.nx, state.geom.ny));
    SimState& mut = const_cast<SimState&>(state);
    for (const auto& ins : prog.ins_) prog.exec_ins(ins, mut, regs, 1);
    VectorGrid out;
    out.x = rx.kind == Operand::Kind::Reg ? regs[rx.idx] : state.plane(rx.idx, rx.comp);
    out.y = ry.kind == Operand::Kind::Reg ? regs[ry.idx] : state.plane(ry.idx, ry.comp);
    return out;
}

}  // namespace morphgen
