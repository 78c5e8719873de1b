#include "morphgen/engine.hpp"

#include <cmath>
#include <sstream>

namespace morphgen {

SimState allocate(const CompiledModel& model, const RunOptions& opts) {
    if (model.nx < 3 || model.ny < 3)
        throw SemanticError("GridTooSmall: grid is " + std::to_string(model.nx) + "x" +
                            std::to_string(model.ny) + ", need at least 3x3");
    SimState st;
    st.geom.nx = model.nx;
    st.geom.ny = model.ny;
    st.geom.dx = model.dx;
    st.geom.xlo = model.xlo;
    st.geom.ylo = model.ylo;
    st.noise.seed = opts.seed;
    st.fields.resize(model.fields.size());
    for (size_t i = 0; i < model.fields.size(); i++) {
        st.fields[i].kind = model.fields[i].kind;
        st.fields[i].a = ScalarGrid(model.nx, model.ny);
        if (model.fields[i].kind == FieldKind::Vector)
            st.fields[i].b = ScalarGrid(model.nx, model.ny);
    }
    for (const auto& body : model.bodies)
        for (const auto& init : body.inits)
            apply_region(st, init.region, init.assigns, model);
    return st;
}

void apply_region(SimState& state, const LoweredRegion& region,
                  const std::vector<LoweredInit>& assigns, const CompiledModel& model) {
    const Grid2D& g = state.geom;
    long hits = 0;
    for (int j = 0; j < g.ny; j++) {
        double y = g.cy(j);
        for (int i = 0; i < g.nx; i++) {
            double x = g.cx(i);
            bool inside;
            if (region.kind == Region::Kind::Box) {
                inside = x > region.a && x < region.b && y > region.c && y < region.d;
            } else {
                double dxr = x - region.a, dyr = y - region.b;
                inside = dxr * dxr + dyr * dyr <= region.c * region.c;
            }
            if (!inside) continue;
            hits++;
            for (const auto& a : assigns) {
                state.fields[a.field].a.at(i, j) = a.value;
                if (model.fields[a.field].kind == FieldKind::Vector)
                    state.fields[a.field].b.at(i, j) = a.vy;
            }
        }
    }
    if (hits == 0)
        state.warnings.push_back("region does not intersect the simulation space");
}

double diffusion_number(double D, double dt, double dx) { return D * dt / (dx * dx); }
double courant_number(double vmax, double dt, double dx) { return vmax * dt / dx; }
double peclet_number(double vmax, double dx, double D) { return vmax * dx / D; }

namespace {

// Constant operands give their value; field operands give the grid maximum
// (norm for vector fields).
double operand_magnitude(const Expr& e, const CompiledModel& model,
                         const SimState& state) {
    if (e.kind == Expr::Kind::Num) return std::fabs(e.num);
    FieldKind k = kindcheck(e, model);
    double best = 0;
    if (k == FieldKind::Vector) {
        VectorGrid v = FieldProgram::eval_vector(model, state, e);
        for (size_t i = 0; i < v.x.size(); i++)
            best = std::max(best, std::hypot(v.x[i], v.y[i]));
    } else {
        ScalarGrid s = FieldProgram::eval_scalar(model, state, e);
        for (size_t i = 0; i < s.size(); i++) best = std::max(best, std::fabs(s[i]));
    }
    return best;
}

}  // namespace

StabilityResult evaluate_report(const StabilityReport& rep, const CompiledModel& model,
                                const SimState& state) {
    StabilityResult out;
    out.warn = false;
    std::ostringstream msg;
    switch (rep.kind) {
        case VizCmd::Report::Diffusion: {
            double D = operand_magnitude(*rep.operands[0], model, state);
            out.value = diffusion_number(D, model.dt, model.dx);
            out.label = "diffusion number for " + rep.text;
            if (out.value > 0.25) {
                out.warn = true;
                msg << "diffusion number " << out.value << " exceeds 0.25; explicit "
                       "Euler diffusion is unstable";
            }
            break;
        }
        case VizCmd::Report::Courant: {
            double vmax = operand_magnitude(*rep.operands[0], model, state);
            out.value = courant_number(vmax, model.dt, model.dx);
            out.label = "Courant number for " + rep.text;
            if (out.value >= 1.0) {
                out.warn = true;
                msg << "Courant number " << out.value << " is at or beyond the stability "
                       "boundary 1.0";
            }
            break;
        }
        case VizCmd::Report::Peclet: {
            double vmax = operand_magnitude(*rep.operands[0], model, state);
            double D = operand_magnitude(*rep.operands[1], model, state);
            out.label = "Peclet number for " + rep.text;
            if (D == 0) {
                out.value = std::numeric_limits<double>::infinity();
                out.warn = true;
                msg << "DivisionByZero: Peclet number is infinite (no diffusion)";
            } else {
                out.value = peclet_number(vmax, model.dx, D);
                if (out.value > 2.0) {
                    out.warn = true;
                    msg << "Peclet number " << out.value
                        << " exceeds 2.0; advection dominates the grid";
                }
            }
            break;
        }
    }
    out.message = msg.str();
    return out;
}

Engine::Engine(const CompiledModel& model, RunOptions opts)
    : model_(model), opts_(opts), program_(FieldProgram::compile(model, opts.dw_sde)) {}

long Engine::total_steps() const {
    return (long)std::ceil(model_.duration / model_.dt - 1e-9);
}

int Engine::display_interval(const DisplayPlan& d) const {
    if (d.interval_steps > 0) return d.interval_steps;
    return (int)std::ceil(0.1 / model_.dt - 1e-9);
}

void Engine::check_finite(const SimState& state) const {
    for (size_t f = 0; f < state.fields.size(); f++) {
        const FieldData& fd = state.fields[f];
        int comps = fd.kind == FieldKind::Vector ? 2 : 1;
        for (int c = 0; c < comps; c++) {
            const ScalarGrid& g = c == 0 ? fd.a : fd.b;
            for (size_t i = 0; i < g.size(); i++) {
                if (!std::isfinite(g[i]))
                    throw SimError("NonFiniteField: field '" + model_.fields[f].name +
                                   "' became non-finite at step " +
                                   std::to_string(state.step + 1));
            }
        }
    }
}

void Engine::step(SimState& state) const {
    program_.execute_step(state, opts_.threads);
    state.step++;
    state.t = state.step * model_.dt;
    check_finite(state);
}

SimState Engine::run(const RunSinks& sinks) const {
    auto log = [&](const std::string& s) {
        if (sinks.log) sinks.log(s);
    };
    SimState state = allocate(model_, opts_);
    for (const auto& w : state.warnings) log("warning: " + w);

    for (const auto& plan : model_.save_load)
        if (!plan.is_save && sinks.load) sinks.load(plan, state);

    for (const auto& rep : model_.reports) {
        StabilityResult r = evaluate_report(rep, model_, state);
        std::ostringstream os;
        os << r.label << " = " << r.value;
        log(os.str());
        if (r.warn) log("warning: " + r.message);
    }

    const long steps = total_steps();
    std::vector<long> frames(model_.displays.size(), 0);

    auto emit_running = [&](long stepno) {
        for (size_t d = 0; d < model_.displays.size(); d++) {
            const DisplayPlan& plan = model_.displays[d];
            if (plan.time != DisplayTime::Running) continue;
            if (stepno % display_interval(plan) == 0 && sinks.frame)
                sinks.frame(plan, state, ++frames[d] - 1);
        }
    };

    if (steps == 0 && sinks.frame) {
        // zero-duration run still produces one frame of the initial state
        for (size_t d = 0; d < model_.displays.size(); d++) {
            const DisplayPlan& plan = model_.displays[d];
            if (plan.time == DisplayTime::Running) sinks.frame(plan, state, 0);
        }
    }

    for (long s = 1; s <= steps; s++) {
        step(state);
        emit_running(s);
        size_t before = state.warnings.size();
        (void)before;
    }

    for (size_t d = 0; d < model_.displays.size(); d++) {
        const DisplayPlan& plan = model_.displays[d];
        if (plan.time == DisplayTime::Final && sinks.frame) sinks.frame(plan, state, 0);
    }

    for (const auto& plan : model_.save_load)
        if (plan.is_save && sinks.save) sinks.save(plan, state);

    for (const auto& rep : model_.reports) {
        StabilityResult r = evaluate_report(rep, model_, state);
        std::ostringstream os;
        os << r.label << " = " << r.value << " (final state)";
        log(os.str());
        if (r.warn) log("warning: " + r.message);
    }
    for (const auto& w : state.warnings) log("warning: " + w);
    return state;
}

}  // namespace morphgen
