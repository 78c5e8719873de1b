#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "morphgen/diag.hpp"

namespace morphgen {

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

enum class BinOp { Add, Sub, Mul, Div, Pow };

enum class Builtin { Exp, Ln, Sqrt, Sin, Cos, Tanh, Arccos, Min, Max };

enum class CmpOp { Lt, Le, Gt, Ge };

// Condition inside a Heaviside bracket: comparison chains joined by
// `and` / `or`. A chain `a < X < b` holds when every adjacent pair holds.
struct Cond;
using CondPtr = std::unique_ptr<Cond>;

struct CmpChain {
    std::vector<ExprPtr> operands;  // n+1 operands
    std::vector<CmpOp> ops;         // n comparison operators
};

struct Cond {
    enum class Kind { Chain, And, Or } kind;
    CmpChain chain;                  // Kind::Chain
    std::vector<CondPtr> children;   // Kind::And / Kind::Or
};

struct Expr {
    enum class Kind {
        Num,       // literal
        Ident,     // field / param / let reference
        Time,      // builtin simulated-time symbol `t`
        VecLit,    // (ex, ey) vector literal
        Neg,       // unary minus
        Bin,       // + - * / ^
        Grad,      // del X
        Lapl,      // del^2 X
        Div,       // div X
        Norm,      // ||X||
        Dot,       // dot(U, V)
        Call,      // builtin math function
        Heaviside, // [cond]
        Noise,     // [M DW^n]
        Sensed,    // <X>: neighborhood estimate of a field
        Group,     // [ ... ] grouping bracket (kept for round-tripping)
    };

    Kind kind;
    SourceLoc loc;

    double num = 0;                       // Num
    std::string name;                     // Ident / Sensed
    BinOp bin_op = BinOp::Add;            // Bin
    Builtin builtin = Builtin::Exp;       // Call
    int noise_arity = 0;                  // Noise
    int noise_id = -1;                    // Noise: unique stream id (set by resolve)
    std::vector<ExprPtr> args;            // children
    CondPtr cond;                         // Heaviside

    ExprPtr clone() const;
};

ExprPtr clone_cond_expr(const Expr& e);
CondPtr clone_cond(const Cond& c);

enum class ChangeMode { Assign, Add, Sub };

struct Stmt {
    enum class Kind { Param, Let, Change, Assign } kind;
    SourceLoc loc;
    std::string name;   // param/let name, change/assign target
    ChangeMode mode = ChangeMode::Assign;  // Change only
    ExprPtr expr;
};

enum class FieldKind { Scalar, Vector };

struct FieldDecl {
    std::string name;
    FieldKind kind;
    SourceLoc loc;
};

struct SubstanceAst {
    std::string name;
    SourceLoc loc;
    std::vector<FieldDecl> fields;
    std::vector<Stmt> behavior;
};

struct Region {
    enum class Kind { Box, Disc } kind;
    SourceLoc loc;
    // Box: xlo xhi ylo yhi; Disc: cx cy radius
    ExprPtr a, b, c, d;
};

struct BodyInit {
    Region region;
    std::vector<std::pair<std::string, ExprPtr>> assigns;
};

struct BodyAst {
    std::string name;
    std::string substance;
    SourceLoc loc;
    std::vector<BodyInit> inits;
};

struct SaveLoadDirective {
    bool is_save;
    std::vector<std::string> fields;
    std::string filename;
    SourceLoc loc;
};

struct SimParamsAst {
    ExprPtr duration;
    ExprPtr temporal_resolution;
    ExprPtr spatial_resolution;
    ExprPtr xlo, xhi, ylo, yhi;
    std::vector<SaveLoadDirective> save_load;
    std::vector<std::string> log_params;
    std::vector<std::string> log_notes;
    std::vector<Stmt> global_params;
    SourceLoc loc;
};

enum class DisplayTime { Running, Final };
enum class DisplayKind { Mesh, Contours, Colors, Quivers };

struct VizCmd {
    enum class Kind { Display, Movie, Stability } kind;
    SourceLoc loc;

    // Display / Movie
    DisplayTime time = DisplayTime::Running;
    std::string field;
    DisplayKind style = DisplayKind::Colors;
    ExprPtr limit_lo, limit_hi;  // optional
    ExprPtr mesh_pitch;          // quivers
    std::string filename;        // movie
    std::string options;         // opaque trailing option text

    // Stability
    enum class Report { Diffusion, Courant, Peclet } report = Report::Diffusion;
    std::vector<ExprPtr> operands;
};

struct ProgramAst {
    std::string name;
    SimParamsAst sim;
    std::vector<SubstanceAst> substances;
    std::vector<BodyAst> bodies;
    std::vector<VizCmd> viz;
};

}  // namespace morphgen
