#pragma once

#include <string>
#include <vector>

#include "morphgen/fieldprog.hpp"
#include "morphgen/model.hpp"

namespace morphgen {

// MGF1 field archive: ASCII header, then raw little-endian float64 planes.
//   line 1: MGF1
//   line 2: nx ny dx xlo ylo
//   line 3+: P <name> <scalar|vector-x|vector-y>   (one per plane)
//   line:   DATA
//   payload: nx*ny doubles per plane, row-major, y-major ascending.
struct ArchivePlane {
    std::string field;
    std::string role;  // scalar | vector-x | vector-y
    ScalarGrid data;
};

struct FieldArchive {
    int nx = 0, ny = 0;
    double dx = 0, xlo = 0, ylo = 0;
    std::vector<ArchivePlane> planes;

    const ArchivePlane* find(const std::string& field, const std::string& role) const {
        for (const auto& p : planes)
            if (p.field == field && p.role == role) return &p;
        return nullptr;
    }
};

void write_archive(const FieldArchive& ar, const std::string& path);
FieldArchive read_archive(const std::string& path);

// Save/load named model fields; load overwrites grids in place and insists
// on matching geometry.
void save_fields(const SimState& state, const CompiledModel& model,
                 const std::vector<int>& fields, const std::string& path);
void load_fields(SimState& state, const CompiledModel& model,
                 const std::vector<int>& fields, const std::string& path);

}  // namespace morphgen
