#pragma once

#include <iosfwd>
#include <string>

#include "conesta/solvers.hpp"

namespace conesta {

// Decimal text with 17 significant digits (round-trips every double).
std::string format_double(double value);

// CSV with header `k,outer,f,f_mu,gap,mu,seconds`.
void write_trace_csv(std::ostream& out, const SolverTrace& trace);
// Throws InvalidArgument on a malformed header or row.
SolverTrace read_trace_csv(std::istream& in);

}  // namespace conesta
