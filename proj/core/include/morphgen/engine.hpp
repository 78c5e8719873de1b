#pragma once

#include <functional>

#include "morphgen/fieldprog.hpp"
#include "morphgen/model.hpp"

namespace morphgen {

struct RunOptions {
    uint64_t seed = 0;
    int threads = 1;
    bool dw_sde = false;  // sqrt(dt) stochastic-integral reading of DW terms
};

struct RunSinks {
    // called after each display interval and for final displays at the end
    std::function<void(const DisplayPlan&, const SimState&, long frame)> frame;
    std::function<void(const std::string&)> log;       // run-log lines
    std::function<void(const SaveLoadPlan&, SimState&)> save;
    std::function<void(const SaveLoadPlan&, SimState&)> load;
};

// Zeroed grids, bodies applied in source order.
SimState allocate(const CompiledModel& model, const RunOptions& opts = {});

// Assign region cells (box: strict inequalities on the center; disc: center
// distance <= radius). Warns when the region misses the grid entirely.
void apply_region(SimState& state, const LoweredRegion& region,
                  const std::vector<LoweredInit>& assigns, const CompiledModel& model);

double diffusion_number(double D, double dt, double dx);
double courant_number(double vmax, double dt, double dx);
double peclet_number(double vmax, double dx, double D);

struct StabilityResult {
    std::string label;
    double value;
    bool warn;
    std::string message;
};
StabilityResult evaluate_report(const StabilityReport& rep, const CompiledModel& model,
                                const SimState& state);

class Engine {
public:
    Engine(const CompiledModel& model, RunOptions opts);

    // advance one step: algebraic assignments, Jacobi Euler commits,
    // finiteness check
    void step(SimState& state) const;

    // full run: load directives, stability reports, stepping with display
    // sinks, save directives
    SimState run(const RunSinks& sinks) const;

    long total_steps() const;
    int display_interval(const DisplayPlan& d) const;

    const CompiledModel& model() const { return model_; }

private:
    const CompiledModel& model_;
    RunOptions opts_;
    FieldProgram program_;

    void check_finite(const SimState& state) const;
};

}  // namespace morphgen
