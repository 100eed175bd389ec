#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

namespace conesta {

// Grid extents. 1D and 2D grids use trailing extents of 1.
struct GridDims {
  std::size_t d1 = 1;
  std::size_t d2 = 1;
  std::size_t d3 = 1;

  std::size_t cells() const { return d1 * d2 * d3; }
  bool operator==(const GridDims&) const = default;
};

// A boolean mask over a 3D grid together with the linear index map from
// in-mask cells to parameter positions.
//
// Cells are enumerated row-major over (i, j, k), k fastest; the n-th in-mask
// cell in that order maps to parameter index n (0-based). The map is
// therefore a deterministic bijection between in-mask cells and [0, p).
class GridMask {
 public:
  GridMask(GridDims dims, std::vector<bool> inside);

  // Every cell inside.
  static GridMask full(GridDims dims);
  // 1D chain of length p, every cell inside.
  static GridMask chain(std::size_t p) { return full({p, 1, 1}); }

  const GridDims& dims() const { return dims_; }
  // Number of in-mask cells (the parameter dimension p).
  std::size_t size() const { return count_; }

  bool inside(std::size_t i, std::size_t j, std::size_t k) const;
  // Parameter index of cell (i, j, k), or nullopt when the cell is outside
  // the grid or the mask.
  std::optional<std::size_t> index(std::size_t i, std::size_t j, std::size_t k) const;

  // Copy with one more cell removed from the mask.
  GridMask without(std::size_t i, std::size_t j, std::size_t k) const;

  bool operator==(const GridMask& other) const {
    return dims_ == other.dims_ && inside_ == other.inside_;
  }

 private:
  std::size_t flat(std::size_t i, std::size_t j, std::size_t k) const {
    return (i * dims_.d2 + j) * dims_.d3 + k;
  }

  GridDims dims_;
  std::vector<bool> inside_;
  std::vector<std::size_t> phi_;
  std::size_t count_ = 0;
};

// Text mask format:
//   dims D1 D2 D3
//   then D3 blocks separated by blank lines; block k holds D1 lines of D2
//   space-separated 0/1 integers (line i, column j -> cell (i, j, k)).
GridMask read_mask(std::istream& in);
void write_mask(std::ostream& out, const GridMask& mask);
GridMask load_mask(const std::filesystem::path& path);

}  // namespace conesta
