#pragma once

#include "wlsm/forward.hpp"
#include "wlsm/methods.hpp"

#include <iosfwd>
#include <string>

namespace wlsm {

// CSV with header "x,y,value" (2D) or "x,y,z,value" (3D), grid order.
void write_index_csv(std::ostream& os, const IndexField& f);
// 8-bit binary PGM of sqrt(I) normalized to [0, 255]; 2D fields only,
// top row is the largest y.
void write_index_pgm(std::ostream& os, const IndexField& f);
// key/value lines, then one "i tau discrepancy target flag" line per point.
void write_regularization_record(std::ostream& os, const IndexField& f);

// Rejects anything but a finite double; used by all readers.
double parse_double(const std::string& token, const std::string& what);

}  // namespace wlsm
