#pragma once

#include "eofsep/states.hpp"

#include <filesystem>
#include <iosfwd>

namespace eofsep {

// State file layout:
//
//   DIM n1 n2
//   re im  re im ...        (n1*n2)^2 pairs, row-major, any line breaks
//
// '#' starts a comment that runs to the end of the line.

/// Parses and validates a state. Throws ParseError (with line number) for
/// malformed text and ValidityError/DimensionError for a matrix that is not a
/// density matrix.
DensityMatrix read_state(std::istream& in);
DensityMatrix read_state_file(const std::filesystem::path& path);

/// Writes with 17 significant digits so that reading back is exact.
void write_state(std::ostream& out, const BipartiteDims& dims, const ComplexMatrix& matrix);
void write_state_file(const std::filesystem::path& path, const DensityMatrix& rho);

}  // namespace eofsep
