#include "conesta/trace_io.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "conesta/errors.hpp"

namespace conesta {

std::string format_double(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

namespace {

constexpr const char* kHeader = "k,outer,f,f_mu,gap,mu,seconds";

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) fields.push_back(field);
  if (!line.empty() && line.back() == sep) fields.emplace_back();
  return fields;
}

double parse_number(const std::string& text, std::size_t line_no) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw InvalidArgument("trace csv: bad number '" + text + "' on line " +
                          std::to_string(line_no));
  }
}

}  // namespace

void write_trace_csv(std::ostream& out, const SolverTrace& trace) {
  out << kHeader << '\n';
  for (const auto& r : trace) {
    out << r.k << ',' << r.outer << ',' << format_double(r.f) << ',' << format_double(r.f_mu)
        << ',' << format_double(r.gap) << ',' << format_double(r.mu) << ','
        << format_double(r.seconds) << '\n';
  }
}

SolverTrace read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument("trace csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kHeader) throw InvalidArgument("trace csv: unexpected header '" + line + "'");

  SolverTrace trace;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != 7) {
      throw InvalidArgument("trace csv: expected 7 fields on line " + std::to_string(line_no));
    }
    TraceRecord r;
    const double k = parse_number(fields[0], line_no);
    const double outer = parse_number(fields[1], line_no);
    if (k < 0 || outer < 0) throw InvalidArgument("trace csv: negative index");
    r.k = static_cast<std::size_t>(k);
    r.outer = static_cast<std::size_t>(outer);
    r.f = parse_number(fields[2], line_no);
    r.f_mu = parse_number(fields[3], line_no);
    r.gap = parse_number(fields[4], line_no);
    r.mu = parse_number(fields[5], line_no);
    r.seconds = parse_number(fields[6], line_no);
    if (!trace.empty() && r.k <= trace.back().k) {
      throw InvalidArgument("trace csv: k must be strictly increasing (line " +
                            std::to_string(line_no) + ")");
    }
    trace.push_back(r);
  }
  return trace;
}

}  // namespace conesta
