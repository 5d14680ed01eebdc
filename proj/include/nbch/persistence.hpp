#pragma once

#include <string>

#include "nbch/diagnostics.hpp"
#include "nbch/state.hpp"

namespace nbch {

/// Checkpoint layout (bit-exact, little-endian):
///   magic "NBCH", u32 version = 1, u64 nx, u64 ny, f64 L, f64 Y, f64 t,
///   then three row-major f64 blocks of nx*ny values: xi, theta, psi.
/// load(save(s)) == s bitwise, t included.
void save_checkpoint(const State& state, const std::string& path);
State load_checkpoint(const std::string& path);
/// As above but rejects a checkpoint whose grid differs from `expect`.
State load_checkpoint(const std::string& path, const GridSpec& expect);

/// Appends one CSV row; writes the header first on a fresh or empty file,
/// and refuses to append when the existing header does not match the
/// record's schema (tail-k set included). One writer per file, enforced by
/// a <path>.lock file held for the duration of the append.
void append_record(const DiagRecord& record, const std::string& csv_path);

}  // namespace nbch
