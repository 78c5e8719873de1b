#pragma once

#include <fstream>
#include <string>

#include "morphgen/model.hpp"

namespace morphgen {

// Plain-text run log: timestamped header, program name, seed, the full
// effective parameter set, then appended stability reports and warnings.
class RunLog {
public:
    RunLog() = default;
    void open(const std::string& path);
    void header(const CompiledModel& model, uint64_t seed,
                const std::string& extra = "");
    void line(const std::string& s);
    bool is_open() const { return out_.is_open(); }

private:
    std::ofstream out_;
};

}  // namespace morphgen
