#include "conesta/grid_mask.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "conesta/errors.hpp"

namespace conesta {

GridMask::GridMask(GridDims dims, std::vector<bool> inside)
    : dims_(dims), inside_(std::move(inside)) {
  if (dims_.d1 == 0 || dims_.d2 == 0 || dims_.d3 == 0) {
    throw InvalidArgument("grid mask: every extent must be positive");
  }
  if (inside_.size() != dims_.cells()) {
    throw InvalidArgument("grid mask: expected " + std::to_string(dims_.cells()) +
                          " cells, got " + std::to_string(inside_.size()));
  }
  phi_.assign(inside_.size(), 0);
  for (std::size_t c = 0; c < inside_.size(); ++c) {
    if (inside_[c]) phi_[c] = count_++;
  }
}

GridMask GridMask::full(GridDims dims) {
  return GridMask(dims, std::vector<bool>(dims.cells(), true));
}

bool GridMask::inside(std::size_t i, std::size_t j, std::size_t k) const {
  if (i >= dims_.d1 || j >= dims_.d2 || k >= dims_.d3) return false;
  return inside_[flat(i, j, k)];
}

std::optional<std::size_t> GridMask::index(std::size_t i, std::size_t j, std::size_t k) const {
  if (!inside(i, j, k)) return std::nullopt;
  return phi_[flat(i, j, k)];
}

GridMask GridMask::without(std::size_t i, std::size_t j, std::size_t k) const {
  if (i >= dims_.d1 || j >= dims_.d2 || k >= dims_.d3) {
    throw InvalidArgument("grid mask: cell outside the grid");
  }
  auto copy = inside_;
  copy[flat(i, j, k)] = false;
  return GridMask(dims_, std::move(copy));
}

namespace {

// Next line that is not blank, or false at end of input.
bool next_content_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
  }
  return false;
}

}  // namespace

GridMask read_mask(std::istream& in) {
  std::string line;
  if (!next_content_line(in, line)) throw InvalidArgument("mask: empty input");
  std::istringstream header(line);
  std::string tag;
  GridDims dims;
  if (!(header >> tag >> dims.d1 >> dims.d2 >> dims.d3) || tag != "dims") {
    throw InvalidArgument("mask: first line must be `dims D1 D2 D3`");
  }
  if (dims.d1 == 0 || dims.d2 == 0 || dims.d3 == 0) {
    throw InvalidArgument("mask: extents must be positive");
  }

  std::vector<bool> inside(dims.cells(), false);
  for (std::size_t k = 0; k < dims.d3; ++k) {
    for (std::size_t i = 0; i < dims.d1; ++i) {
      if (!next_content_line(in, line)) throw InvalidArgument("mask: truncated grid");
      std::istringstream row(line);
      for (std::size_t j = 0; j < dims.d2; ++j) {
        int v = -1;
        if (!(row >> v) || (v != 0 && v != 1)) {
          throw InvalidArgument("mask: expected " + std::to_string(dims.d2) +
                                " values of 0/1 on line for i=" + std::to_string(i) +
                                ", k=" + std::to_string(k));
        }
        inside[(i * dims.d2 + j) * dims.d3 + k] = (v == 1);
      }
      int extra = 0;
      if (row >> extra) throw InvalidArgument("mask: too many values on a row");
    }
  }
  if (next_content_line(in, line)) throw InvalidArgument("mask: trailing data after grid");
  return GridMask(dims, std::move(inside));
}

void write_mask(std::ostream& out, const GridMask& mask) {
  const auto& d = mask.dims();
  out << "dims " << d.d1 << ' ' << d.d2 << ' ' << d.d3 << '\n';
  for (std::size_t k = 0; k < d.d3; ++k) {
    if (k > 0) out << '\n';
    for (std::size_t i = 0; i < d.d1; ++i) {
      for (std::size_t j = 0; j < d.d2; ++j) {
        if (j > 0) out << ' ';
        out << (mask.inside(i, j, k) ? 1 : 0);
      }
      out << '\n';
    }
  }
}

GridMask load_mask(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("mask: cannot open " + path.string());
  return read_mask(in);
}

}  // namespace conesta
