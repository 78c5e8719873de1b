#include "morphgen/runlog.hpp"

#include <ctime>

#include "morphgen/pretty.hpp"

namespace morphgen {

void RunLog::open(const std::string& path) {
    out_.open(path);
    if (!out_) throw UsageError("cannot open run log '" + path + "'");
}

void RunLog::header(const CompiledModel& model, uint64_t seed, const std::string& extra) {
    if (!out_) return;
    std::time_t now = std::time(nullptr);
    char buf[64];
    std::strftime(buf, sizeof buf, "%Y-%m-%d %H:%M:%S", std::localtime(&now));
    out_ << "# morphgen run log\n";
    out_ << "time: " << buf << "\n";
    out_ << "program: " << model.name << "\n";
    out_ << "seed: " << seed << "\n";
    out_ << "grid: " << model.nx << "x" << model.ny << " dx=" << format_number(model.dx)
         << " dt=" << format_number(model.dt)
         << " duration=" << format_number(model.duration) << "\n";
    if (!extra.empty()) out_ << extra;
    out_ << "params:\n";
    for (const auto& [n, v] : model.params)
        out_ << "  " << n << " = " << format_number(v) << "\n";
    for (const auto& n : model.log_notes) out_ << "note: " << n << "\n";
    out_.flush();
}

void RunLog::line(const std::string& s) {
    if (!out_) return;
    out_ << s << "\n";
    out_.flush();
}

}  // namespace morphgen
