#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "kslab/grid.hpp"

namespace kslab {

/// Snapshot of a run. CSV layout:
///
///   cfg_hash,<16 hex digits>
///   step,<integer>
///   time,<%.17g>
///   index,u,v
///   <flat cell index>,<u>,<v>      one row per cell, row-major
///
/// Values are printed with 17 significant digits, so reading a checkpoint
/// back reproduces every double exactly.
struct Checkpoint {
  std::uint64_t cfg_hash = 0;
  int step = 0;
  double time = 0.0;
  Field u;
  Field v;
};

void write_checkpoint(std::ostream& os, const Checkpoint& cp);
/// `grid` must be the grid the checkpoint was written on.
Checkpoint read_checkpoint(std::istream& is, const Grid& grid);

/// "i0[,i1[,i2]],value" rows after a header naming the index columns.
void write_field_csv(std::ostream& os, const Field& f);

/// %.17g formatting.
std::string format_double(double x);

}  // namespace kslab
