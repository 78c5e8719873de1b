#pragma once

#include <vector>

#include "morphgen/grid.hpp"
#include "morphgen/model.hpp"
#include "morphgen/noise.hpp"

namespace morphgen {

// One field of simulation state; vector fields use both planes.
struct FieldData {
    FieldKind kind = FieldKind::Scalar;
    ScalarGrid a, b;
};

struct SimState {
    Grid2D geom;
    double t = 0;
    long step = 0;
    NoisePlan noise;
    std::vector<FieldData> fields;
    std::vector<std::string> warnings;

    ScalarGrid& plane(int field, int comp) {
        return comp == 0 ? fields[field].a : fields[field].b;
    }
    const ScalarGrid& plane(int field, int comp) const {
        return comp == 0 ? fields[field].a : fields[field].b;
    }
};

// Whole-grid bytecode: each instruction evaluates one operation over every
// cell. One program updates all fields of a model for one step: algebraic
// assignments write their fields in source order, then every change-equation
// RHS is evaluated against the pre-step state, then Euler commits run.
class FieldProgram {
public:
    FieldProgram() = default;

    // dw_sde selects the sqrt(dt) stochastic-integral scaling of DW terms
    // inside change equations (default: plain finite-difference reading).
    static FieldProgram compile(const CompiledModel& model, bool dw_sde);

    void execute_step(SimState& state, int threads) const;

    // Evaluate a single resolved expression on the current state (test and
    // diagnostics path; slow path, compiles on the fly).
    static ScalarGrid eval_scalar(const CompiledModel& model, const SimState& state,
                                  const Expr& expr);
    static VectorGrid eval_vector(const CompiledModel& model, const SimState& state,
                                  const Expr& expr);

    int register_count() const { return nregs_; }

private:
    struct Operand {
        enum class Kind { Const, Reg, Field, Time } kind = Kind::Const;
        int idx = 0;   // register or field index
        int comp = 0;  // field plane
        double c = 0;
    };

    enum class Op {
        Add, Sub, Mul, DivOp, Pow, PowI, Neg,
        Exp, Ln, Sqrt, Sin, Cos, Tanh, Arccos, Min2, Max2,
        CLt, CLe, CGt, CGe, OrMax,
        Grad, Lapl, Diverg, NormV, DotV,
        NoiseOp, Fill, StoreField, Commit,
    };

    struct Ins {
        Op op;
        int dst = -1, dst2 = -1;
        Operand a, b, c, d;
        int aux = 0;        // PowI exponent, noise stream, field index
        int comp = 0;       // noise component / store component
        double scale = 1.0; // noise amplitude multiplier
    };

    struct CVal {
        bool vec = false;
        Operand x, y;
    };

    std::vector<Ins> ins_;
    int nregs_ = 0;
    double dt_ = 0;
    mutable std::vector<ScalarGrid> scratch_;

    struct Compiler;
    friend struct Compiler;

    void exec_ins(const Ins& ins, SimState& state, std::vector<ScalarGrid>& regs,
                  int threads) const;
};

}  // namespace morphgen
