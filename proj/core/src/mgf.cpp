#include "morphgen/mgf.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "morphgen/pretty.hpp"

namespace morphgen {

void write_archive(const FieldArchive& ar, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError("cannot write archive '" + path + "'");
    out << "MGF1\n";
    out << ar.nx << " " << ar.ny << " " << format_number(ar.dx) << " "
        << format_number(ar.xlo) << " " << format_number(ar.ylo) << "\n";
    for (const auto& p : ar.planes) out << "P " << p.field << " " << p.role << "\n";
    out << "DATA\n";
    for (const auto& p : ar.planes)
        out.write(reinterpret_cast<const char*>(p.data.v.data()),
                  (std::streamsize)(p.data.size() * sizeof(double)));
    if (!out) throw UsageError("IoError: short write to '" + path + "'");
}

FieldArchive read_archive(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot open archive '" + path + "'");
    std::string line;
    if (!std::getline(in, line) || line != "MGF1")
        throw UsageError("BadMagic: '" + path + "' is not an MGF1 archive");
    FieldArchive ar;
    if (!std::getline(in, line)) throw UsageError("BadMagic: truncated header");
    {
        std::istringstream hs(line);
        if (!(hs >> ar.nx >> ar.ny >> ar.dx >> ar.xlo >> ar.ylo))
            throw UsageError("BadMagic: malformed geometry line");
    }
    while (std::getline(in, line)) {
        if (line == "DATA") break;
        std::istringstream ps(line);
        std::string tag;
        ArchivePlane p;
        if (!(ps >> tag >> p.field >> p.role) || tag != "P")
            throw UsageError("BadMagic: malformed plane line '" + line + "'");
        ar.planes.push_back(std::move(p));
    }
    for (auto& p : ar.planes) {
        p.data = ScalarGrid(ar.nx, ar.ny);
        in.read(reinterpret_cast<char*>(p.data.v.data()),
                (std::streamsize)(p.data.size() * sizeof(double)));
        if (in.gcount() != (std::streamsize)(p.data.size() * sizeof(double)))
            throw UsageError("BadMagic: archive payload truncated");
    }
    return ar;
}

void save_fields(const SimState& state, const CompiledModel& model,
                 const std::vector<int>& fields, const std::string& path) {
    FieldArchive ar;
    ar.nx = state.geom.nx;
    ar.ny = state.geom.ny;
    ar.dx = state.geom.dx;
    ar.xlo = state.geom.xlo;
    ar.ylo = state.geom.ylo;
    for (int fi : fields) {
        const FieldInfo& info = model.fields[fi];
        if (info.kind == FieldKind::Scalar) {
            ar.planes.push_back({info.name, "scalar", state.fields[fi].a});
        } else {
            ar.planes.push_back({info.name, "vector-x", state.fields[fi].a});
            ar.planes.push_back({info.name, "vector-y", state.fields[fi].b});
        }
    }
    write_archive(ar, path);
}

void load_fields(SimState& state, const CompiledModel& model,
                 const std::vector<int>& fields, const std::string& path) {
    FieldArchive ar = read_archive(path);
    if (ar.nx != state.geom.nx || ar.ny != state.geom.ny ||
        std::fabs(ar.dx - state.geom.dx) > 1e-12 * state.geom.dx)
        throw UsageError("GeometryMismatch: archive is " + std::to_string(ar.nx) + "x" +
                         std::to_string(ar.ny) + ", model grid is " +
                         std::to_string(state.geom.nx) + "x" +
                         std::to_string(state.geom.ny));
    for (int fi : fields) {
        const FieldInfo& info = model.fields[fi];
        if (info.kind == FieldKind::Scalar) {
            const ArchivePlane* p = ar.find(info.name, "scalar");
            if (!p) throw UsageError("MissingField: '" + info.name + "' not in archive");
            state.fields[fi].a = p->data;
        } else {
            const ArchivePlane* px = ar.find(info.name, "vector-x");
            const ArchivePlane* py = ar.find(info.name, "vector-y");
            if (!px || !py)
                throw UsageError("MissingField: '" + info.name + "' not in archive");
            state.fields[fi].a = px->data;
            state.fields[fi].b = py->data;
        }
    }
}

}  // namespace morphgen
