#pragma once

#include <filesystem>
#include <string>

#include "softboltz/fields.hpp"
#include "softboltz/solver.hpp"

namespace softboltz {

/// cell,v_index,v1,v2,v3,F,f for one time slice.
std::string slice_csv(const PerturbationField& f);

/// Writes `text` to `path`, creating parent directories. Throws Error on I/O failure.
void write_file(const std::filesystem::path& path, const std::string& text);

/// window,t0,t1,T1,iterations,converged,min_F_ratio,<NormReport columns>
std::string windows_csv(const MarchResult& march);

} // namespace softboltz
