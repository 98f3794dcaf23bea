#pragma once

#include <iosfwd>

#include "okr/klms.hpp"
#include "okr/online_gp.hpp"

namespace okr {

// Plain-text model snapshots: `key=value` header lines followed by CSV blocks
// introduced by `[name]` lines.
//
//   # okr state snapshot v1
//   model=gp
//   lengthscale=1
//   ...
//   size=2
//   dim=1
//   [dict]          id,x_1..x_D per row
//   [targets]       one value per row            (gp)
//   [mu]            one value per row            (gp)
//   [sigma]         m rows of m values           (gp)
//   [q_inv]         m rows of m values           (gp)
//   [alpha]         one value per row            (klms)
//
// Numbers use the shortest round-trip representation, so reading a snapshot
// back reproduces every double exactly.

void write_snapshot(std::ostream& os, const GpState& state);
void write_snapshot(std::ostream& os, const KlmsState& state);

/// Throws ParseError on malformed input.
[[nodiscard]] GpState read_gp_snapshot(std::istream& is);
[[nodiscard]] KlmsState read_klms_snapshot(std::istream& is);

}  // namespace okr
