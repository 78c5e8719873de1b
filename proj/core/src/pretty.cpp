#include "morphgen/pretty.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <sstream>

namespace morphgen {

std::string format_number(double v) {
    char buf[64];
    if (v == (long long)v && v > -1e15 && v < 1e15) {
        snprintf(buf, sizeof buf, "%lld", (long long)v);
        return buf;
    }
    for (int prec = 1; prec <= 17; prec++) {
        snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    // negative literals print via unary minus in expressions
    return buf;
}

namespace {

const char* builtin_name(Builtin b) {
    switch (b) {
        case Builtin::Exp: return "exp";
        case Builtin::Ln: return "ln";
        case Builtin::Sqrt: return "sqrt";
        case Builtin::Sin: return "sin";
        case Builtin::Cos: return "cos";
        case Builtin::Tanh: return "tanh";
        case Builtin::Arccos: return "arccos";
        case Builtin::Min: return "min";
        case Builtin::Max: return "max";
    }
    return "?";
}

const char* cmp_name(CmpOp op) {
    switch (op) {
        case CmpOp::Lt: return "<";
        case CmpOp::Le: return "<=";
        case CmpOp::Gt: return ">";
        case CmpOp::Ge: return ">=";
    }
    return "?";
}

// precedence: 1 sum, 2 product, 3 power, 4 prefix, 5 primary
int prec_of(const Expr& e) {
    switch (e.kind) {
        case Expr::Kind::Bin:
            switch (e.bin_op) {
                case BinOp::Add:
                case BinOp::Sub: return 1;
                case BinOp::Mul:
                case BinOp::Div: return 2;
                case BinOp::Pow: return 3;
            }
            return 1;
        case Expr::Kind::Neg: return 1;  // prints like a signed term
        case Expr::Kind::Grad:
        case Expr::Kind::Lapl:
        case Expr::Kind::Div: return 4;
        default: return 5;
    }
}

void print_rec(const Expr& e, int parent_prec, std::string& out);
void print_cond(const Cond& c, std::string& out);

void print_child(const Expr& e, int min_prec, std::string& out) {
    if (prec_of(e) < min_prec) {
        out += "(";
        print_rec(e, 0, out);
        out += ")";
    } else {
        print_rec(e, min_prec, out);
    }
}

void print_rec(const Expr& e, int parent_prec, std::string& out) {
    (void)parent_prec;
    switch (e.kind) {
        case Expr::Kind::Num:
            if (e.num < 0) {
                out += "(-" + format_number(-e.num) + ")";
            } else {
                out += format_number(e.num);
            }
            break;
        case Expr::Kind::Ident: out += e.name; break;
        case Expr::Kind::Time: out += "t"; break;
        case Expr::Kind::Sensed: out += "<" + e.name + ">"; break;
        case Expr::Kind::VecLit:
            out += "(";
            print_rec(*e.args[0], 0, out);
            out += ", ";
            print_rec(*e.args[1], 0, out);
            out += ")";
            break;
        case Expr::Kind::Neg:
            out += "-";
            print_child(*e.args[0], 2, out);
            break;
        case Expr::Kind::Bin: {
            const char* op = nullptr;
            int prec = prec_of(e);
            switch (e.bin_op) {
                case BinOp::Add: op = " + "; break;
                case BinOp::Sub: op = " - "; break;
                case BinOp::Mul: op = " * "; break;
                case BinOp::Div: op = " / "; break;
                case BinOp::Pow: op = "^"; break;
            }
            // left child may share the level except under - and /
            bool strict_rhs = e.bin_op == BinOp::Sub || e.bin_op == BinOp::Div ||
                              e.bin_op == BinOp::Pow;
            print_child(*e.args[0], prec, out);
            out += op;
            print_child(*e.args[1], strict_rhs ? prec + 1 : prec, out);
            break;
        }
        case Expr::Kind::Grad:
            out += "del ";
            print_child(*e.args[0], 3, out);
            break;
        case Expr::Kind::Lapl:
            out += "del^2 ";
            print_child(*e.args[0], 3, out);
            break;
        case Expr::Kind::Div:
            out += "div ";
            print_child(*e.args[0], 3, out);
            break;
        case Expr::Kind::Norm:
            out += "||";
            print_rec(*e.args[0], 0, out);
            out += "||";
            break;
        case Expr::Kind::Dot:
            out += "dot(";
            print_rec(*e.args[0], 0, out);
            out += ", ";
            print_rec(*e.args[1], 0, out);
            out += ")";
            break;
        case Expr::Kind::Call:
            out += builtin_name(e.builtin);
            out += "(";
            for (size_t i = 0; i < e.args.size(); i++) {
                if (i) out += ", ";
                print_rec(*e.args[i], 0, out);
            }
            out += ")";
            break;
        case Expr::Kind::Heaviside:
            out += "[";
            print_cond(*e.cond, out);
            out += "]";
            break;
        case Expr::Kind::Noise:
            out += "[";
            print_rec(*e.args[0], 0, out);
            out += " DW^" + std::to_string(e.noise_arity) + "]";
            break;
        case Expr::Kind::Group:
            out += "[";
            print_rec(*e.args[0], 0, out);
            out += "]";
            break;
    }
}

void print_cond(const Cond& c, std::string& out) {
    switch (c.kind) {
        case Cond::Kind::Chain:
            for (size_t i = 0; i < c.chain.operands.size(); i++) {
                if (i) out += std::string(" ") + cmp_name(c.chain.ops[i - 1]) + " ";
                print_rec(*c.chain.operands[i], 1, out);
            }
            break;
        case Cond::Kind::And:
            for (size_t i = 0; i < c.children.size(); i++) {
                if (i) out += " and ";
                print_cond(*c.children[i], out);
            }
            break;
        case Cond::Kind::Or:
            for (size_t i = 0; i < c.children.size(); i++) {
                if (i) out += " or ";
                print_cond(*c.children[i], out);
            }
            break;
    }
}

void print_stmt(const Stmt& s, const std::string& ind, std::string& out) {
    out += ind;
    switch (s.kind) {
        case Stmt::Kind::Param: out += "param " + s.name + " = "; break;
        case Stmt::Kind::Let: out += "let " + s.name + " = "; break;
        case Stmt::Kind::Change:
            out += "D " + s.name;
            out += s.mode == ChangeMode::Assign ? " = " : (s.mode == ChangeMode::Add ? " += " : " -= ");
            break;
        case Stmt::Kind::Assign: out += s.name + " = "; break;
    }
    out += print_expr(*s.expr);
    out += "\n";
}

void print_region(const Region& r, std::string& out) {
    if (r.kind == Region::Kind::Box) {
        out += print_expr(*r.a) + " < x < " + print_expr(*r.b) + ", " +
               print_expr(*r.c) + " < y < " + print_expr(*r.d);
    } else {
        out += "(x, y) within " + print_expr(*r.c) + " of (" + print_expr(*r.a) +
               ", " + print_expr(*r.b) + ")";
    }
}

const char* kind_word(DisplayKind k) {
    switch (k) {
        case DisplayKind::Mesh: return "mesh";
        case DisplayKind::Contours: return "contours";
        case DisplayKind::Colors: return "colors";
        case DisplayKind::Quivers: return "quivers";
    }
    return "?";
}

}  // namespace

std::string print_expr(const Expr& e) {
    std::string out;
    print_rec(e, 0, out);
    return out;
}

std::string pretty_print(const ProgramAst& prog) {
    std::string out = "morphogenetic program " + prog.name + ":\n";
    const SimParamsAst& sim = prog.sim;
    out += "  simulation parameters:\n";
    if (sim.xlo)
        out += "    space " + print_expr(*sim.xlo) + " < x < " + print_expr(*sim.xhi) +
               ", " + print_expr(*sim.ylo) + " < y < " + print_expr(*sim.yhi) + "\n";
    if (sim.spatial_resolution)
        out += "    spatial resolution = " + print_expr(*sim.spatial_resolution) + "\n";
    if (sim.temporal_resolution)
        out += "    temporal resolution = " + print_expr(*sim.temporal_resolution) + "\n";
    if (sim.duration) out += "    duration = " + print_expr(*sim.duration) + "\n";
    for (const auto& p : sim.global_params)
        out += "    param " + p.name + " = " + print_expr(*p.expr) + "\n";
    for (const auto& d : sim.save_load) {
        out += d.is_save ? "    save" : "    load";
        for (const auto& f : d.fields) out += " " + f;
        out += d.is_save ? " to " : " from ";
        out += d.filename + "\n";
    }
    for (const auto& n : sim.log_params) out += "    log params " + n + "\n";
    for (const auto& n : sim.log_notes) out += "    log note " + n + "\n";

    for (const auto& sub : prog.substances) {
        out += "  substance " + sub.name + ":\n";
        for (const auto& f : sub.fields) {
            out += "    ";
            out += f.kind == FieldKind::Scalar ? "scalar field " : "vector field ";
            out += f.name + "\n";
        }
        out += "    behavior:\n";
        for (const auto& s : sub.behavior) print_stmt(s, "      ", out);
    }
    for (const auto& body : prog.bodies) {
        out += "  body " + body.name + " of " + body.substance + ":\n";
        for (const auto& init : body.inits) {
            out += "    for ";
            print_region(init.region, out);
            out += ":\n";
            for (const auto& [f, e] : init.assigns)
                out += "      " + f + " = " + print_expr(*e) + "\n";
        }
    }
    if (!prog.viz.empty()) {
        out += "  visualization:\n";
        for (const auto& v : prog.viz) {
            out += "    ";
            switch (v.kind) {
                case VizCmd::Kind::Display:
                    out += "display ";
                    out += v.time == DisplayTime::Running ? "running " : "final ";
                    out += v.field + " as " + kind_word(v.style);
                    if (v.style == DisplayKind::Quivers) {
                        if (v.mesh_pitch) out += " " + print_expr(*v.mesh_pitch) + " mesh";
                    } else if (v.limit_lo) {
                        out += " limits (" + print_expr(*v.limit_lo) + ", " +
                               print_expr(*v.limit_hi) + ")";
                    }
                    break;
                case VizCmd::Kind::Movie:
                    out += "make movie " + v.filename + " of " + v.field + " as " +
                           kind_word(v.style);
                    break;
                case VizCmd::Kind::Stability:
                    out += "report ";
                    out += v.report == VizCmd::Report::Diffusion
                               ? "diffusion"
                               : (v.report == VizCmd::Report::Courant ? "Courant" : "Peclet");
                    out += " number for " + print_expr(*v.operands[0]);
                    if (v.report == VizCmd::Report::Peclet)
                        out += " and " + print_expr(*v.operands[1]);
                    break;
            }
            if (!v.options.empty()) out += " " + v.options;
            out += "\n";
        }
    }
    out += "end program\n";
    return out;
}

// --- canonical dump ----------------------------------------------------------

namespace {

void dump_rec(const Expr& e, std::string& out);

void dump_cond_rec(const Cond& c, std::string& out) {
    switch (c.kind) {
        case Cond::Kind::Chain:
            out += "(chain";
            for (size_t i = 0; i < c.chain.operands.size(); i++) {
                out += " ";
                if (i) {
                    out += cmp_name(c.chain.ops[i - 1]);
                    out += " ";
                }
                dump_rec(*c.chain.operands[i], out);
            }
            out += ")";
            break;
        case Cond::Kind::And:
        case Cond::Kind::Or:
            out += c.kind == Cond::Kind::And ? "(and" : "(or";
            for (const auto& ch : c.children) {
                out += " ";
                dump_cond_rec(*ch, out);
            }
            out += ")";
            break;
    }
}

void dump_rec(const Expr& e, std::string& out) {
    switch (e.kind) {
        case Expr::Kind::Num: out += format_number(e.num); break;
        case Expr::Kind::Ident: out += e.name; break;
        case Expr::Kind::Time: out += "(time)"; break;
        case Expr::Kind::Sensed: out += "(sensed " + e.name + ")"; break;
        case Expr::Kind::VecLit:
            out += "(vec ";
            dump_rec(*e.args[0], out);
            out += " ";
            dump_rec(*e.args[1], out);
            out += ")";
            break;
        case Expr::Kind::Neg:
            out += "(neg ";
            dump_rec(*e.args[0], out);
            out += ")";
            break;
        case Expr::Kind::Bin: {
            const char* op = "?";
            switch (e.bin_op) {
                case BinOp::Add: op = "+"; break;
                case BinOp::Sub: op = "-"; break;
                case BinOp::Mul: op = "*"; break;
                case BinOp::Div: op = "/"; break;
                case BinOp::Pow: op = "^"; break;
            }
            out += std::string("(") + op + " ";
            dump_rec(*e.args[0], out);
            out += " ";
            dump_rec(*e.args[1], out);
            out += ")";
            break;
        }
        case Expr::Kind::Grad:
            out += "(grad ";
            dump_rec(*e.args[0], out);
            out += ")";
            break;
        case Expr::Kind::Lapl:
            out += "(lapl ";
            dump_rec(*e.args[0], out);
            out += ")";
            break;
        case Expr::Kind::Div:
            out += "(div ";
            dump_rec(*e.args[0], out);
            out += ")";
            break;
        case Expr::Kind::Norm:
            out += "(norm ";
            dump_rec(*e.args[0], out);
            out += ")";
            break;
        case Expr::Kind::Dot:
            out += "(dot ";
            dump_rec(*e.args[0], out);
            out += " ";
            dump_rec(*e.args[1], out);
            out += ")";
            break;
        case Expr::Kind::Call:
            out += std::string("(") + builtin_name(e.builtin);
            for (const auto& a : e.args) {
                out += " ";
                dump_rec(*a, out);
            }
            out += ")";
            break;
        case Expr::Kind::Heaviside:
            out += "(step ";
            dump_cond_rec(*e.cond, out);
            out += ")";
            break;
        case Expr::Kind::Noise:
            out += "(dw " + std::to_string(e.noise_arity) + " ";
            dump_rec(*e.args[0], out);
            out += ")";
            break;
        case Expr::Kind::Group:
            out += "(group ";
            dump_rec(*e.args[0], out);
            out += ")";
            break;
    }
}

}  // namespace

std::string dump_expr(const Expr& e) {
    std::string out;
    dump_rec(e, out);
    return out;
}

std::string dump_ast(const ProgramAst& prog) {
    std::ostringstream os;
    os << "(program " << prog.name << "\n";
    const SimParamsAst& sim = prog.sim;
    os << " (sim";
    if (sim.duration) os << " (duration " << dump_expr(*sim.duration) << ")";
    if (sim.temporal_resolution)
        os << " (temporal " << dump_expr(*sim.temporal_resolution) << ")";
    if (sim.spatial_resolution)
        os << " (spatial " << dump_expr(*sim.spatial_resolution) << ")";
    if (sim.xlo)
        os << " (space " << dump_expr(*sim.xlo) << " " << dump_expr(*sim.xhi) << " "
           << dump_expr(*sim.ylo) << " " << dump_expr(*sim.yhi) << ")";
    for (const auto& p : sim.global_params)
        os << " (param " << p.name << " " << dump_expr(*p.expr) << ")";
    for (const auto& d : sim.save_load) {
        os << (d.is_save ? " (save" : " (load");
        for (const auto& f : d.fields) os << " " << f;
        os << " " << d.filename << ")";
    }
    for (const auto& n : sim.log_params) os << " (log-params " << n << ")";
    for (const auto& n : sim.log_notes) os << " (log-note \"" << n << "\")";
    os << ")\n";
    for (const auto& sub : prog.substances) {
        os << " (substance " << sub.name << "\n";
        for (const auto& f : sub.fields)
            os << "  (field " << f.name << " "
               << (f.kind == FieldKind::Scalar ? "scalar" : "vector") << ")\n";
        for (const auto& s : sub.behavior) {
            os << "  ";
            switch (s.kind) {
                case Stmt::Kind::Param: os << "(param " << s.name; break;
                case Stmt::Kind::Let: os << "(let " << s.name; break;
                case Stmt::Kind::Change:
                    os << "(change "
                       << (s.mode == ChangeMode::Assign
                               ? "="
                               : (s.mode == ChangeMode::Add ? "+=" : "-="))
                       << " " << s.name;
                    break;
                case Stmt::Kind::Assign: os << "(assign " << s.name; break;
            }
            os << " " << dump_expr(*s.expr) << ")\n";
        }
        os << " )\n";
    }
    for (const auto& b : prog.bodies) {
        os << " (body " << b.name << " " << b.substance << "\n";
        for (const auto& init : b.inits) {
            os << "  (for ";
            const Region& r = init.region;
            if (r.kind == Region::Kind::Box) {
                os << "(box " << dump_expr(*r.a) << " " << dump_expr(*r.b) << " "
                   << dump_expr(*r.c) << " " << dump_expr(*r.d) << ")";
            } else {
                os << "(disc " << dump_expr(*r.a) << " " << dump_expr(*r.b) << " "
                   << dump_expr(*r.c) << ")";
            }
            for (const auto& [f, e] : init.assigns)
                os << " (" << f << " " << dump_expr(*e) << ")";
            os << ")\n";
        }
        os << " )\n";
    }
    for (const auto& v : prog.viz) {
        switch (v.kind) {
            case VizCmd::Kind::Display:
                os << " (display " << (v.time == DisplayTime::Running ? "running" : "final")
                   << " " << v.field << " " << kind_word(v.style);
                if (v.limit_lo)
                    os << " (limits " << dump_expr(*v.limit_lo) << " "
                       << dump_expr(*v.limit_hi) << ")";
                if (v.mesh_pitch) os << " (pitch " << dump_expr(*v.mesh_pitch) << ")";
                break;
            case VizCmd::Kind::Movie:
                os << " (movie " << v.filename << " " << v.field << " " << kind_word(v.style);
                break;
            case VizCmd::Kind::Stability:
                os << " (report "
                   << (v.report == VizCmd::Report::Diffusion
                           ? "diffusion"
                           : (v.report == VizCmd::Report::Courant ? "courant" : "peclet"));
                for (const auto& o : v.operands) os << " " << dump_expr(*o);
                break;
        }
        if (!v.options.empty()) os << " (options \"" << v.options << "\")";
        os << ")\n";
    }
    os << ")\n";
    return os.str();
}

bool expr_equal(const Expr& a, const Expr& b) {
    return dump_expr(a) == dump_expr(b);
}

bool program_equal(const ProgramAst& a, const ProgramAst& b) {
    return dump_ast(a) == dump_ast(b);
}

}  // namespace morphgen
