#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "morphgen/ast.hpp"

namespace morphgen {

struct FieldInfo {
    std::string name;
    FieldKind kind;
    std::string substance;
};

// Merged change equations for one field: at most one base `D X = ...` plus
// any number of signed partials `D X += / -=` gathered across substances.
struct UpdateSpec {
    ExprPtr base;
    std::vector<std::pair<int, ExprPtr>> partials;  // sign in {+1, -1}

    bool empty() const { return !base && partials.empty(); }
};

struct LoweredRegion {
    Region::Kind kind;
    // Box: xlo xhi ylo yhi; Disc: cx cy radius
    double a = 0, b = 0, c = 0, d = 0;
};

struct LoweredInit {
    int field = -1;
    double value = 0;     // scalar
    double vy = 0;        // vector y-component
};

struct LoweredBodyInit {
    LoweredRegion region;
    std::vector<LoweredInit> assigns;
};

struct LoweredBody {
    std::string name;
    std::string substance;
    std::vector<LoweredBodyInit> inits;
};

struct StabilityReport {
    VizCmd::Report kind;
    std::vector<ExprPtr> operands;  // resolved; constant or field refs
    std::string text;               // printable operand description
};

struct DisplayPlan {
    bool movie = false;
    DisplayTime time = DisplayTime::Running;
    int field = -1;
    DisplayKind style = DisplayKind::Colors;
    bool has_limits = false;
    double limit_lo = 0, limit_hi = 0;
    double mesh_pitch = 0;          // quivers; 0 = auto
    std::string filename;           // movie
    int interval_steps = 0;         // 0 = default
    int contour_levels = 10;
    std::string options;
};

struct SaveLoadPlan {
    bool is_save;
    std::vector<int> fields;
    std::string filename;
};

struct CompiledModel {
    std::string name;

    double xlo = 0, xhi = 0, ylo = 0, yhi = 0;
    double dx = 0, dt = 0, duration = 0;
    int nx = 0, ny = 0;

    std::vector<FieldInfo> fields;
    std::map<std::string, int> field_index;

    // parameter values in declaration order, post override and folding
    std::vector<std::pair<std::string, double>> params;

    std::vector<UpdateSpec> updates;                       // per field
    std::vector<std::pair<int, ExprPtr>> algebraic;        // source order
    std::vector<LoweredBody> bodies;
    std::vector<DisplayPlan> displays;
    std::vector<StabilityReport> reports;
    std::vector<SaveLoadPlan> save_load;
    std::vector<std::string> log_params;
    std::vector<std::string> log_notes;

    int noise_stream_count = 0;

    int index_of(const std::string& field) const {
        auto it = field_index.find(field);
        return it == field_index.end() ? -1 : it->second;
    }
    FieldKind kind_of(int i) const { return fields[i].kind; }
    double param(const std::string& name) const {
        for (auto& [n, v] : params)
            if (n == name) return v;
        throw SemanticError("unknown parameter '" + name + "'");
    }
    bool has_param(const std::string& name) const {
        for (auto& [n, v] : params)
            if (n == name) return true;
        return false;
    }
};

using Overrides = std::map<std::string, double>;

// Bind names, inline lets and parameters, merge change equations, lower
// bodies, and kind-check every update.
CompiledModel resolve(const ProgramAst& ast, const Overrides& overrides = {});

// Kind of a resolved expression (scalar/vector), errors on mismatches.
FieldKind kindcheck(const Expr& e, const CompiledModel& model);

// Validate that every field's effective RHS matches the field kind.
void check_update_kinds(const CompiledModel& model);

std::string model_summary(const CompiledModel& model);

}  // namespace morphgen
