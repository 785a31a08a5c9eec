#include "hlift/bevpool.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include "hlift/error.hpp"

namespace hlift {

namespace {

int cell_count_along(double lo, double hi, double res, const char* axis) {
  const double ratio = (hi - lo) / res;
  const double rounded = std::round(ratio);
  if (!(rounded >= 1.0) || std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string("grid spec: extent along ") + axis + " is not a whole number of cells");
  }
  return static_cast<int>(rounded);
}

constexpr std::uint32_t kNoCell = 0xffffffffu;

}  // namespace

void GridSpec::validate() const {
  if (!(x_max > x_min) || !(y_max > y_min)) {
    throw Error(ErrorCode::kInvalidArgument, "grid spec: extents must be positive");
  }
  if (!(res_x > 0.0) || !(res_y > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "grid spec: resolution must be positive");
  }
  if (channels < 1) throw Error(ErrorCode::kInvalidArgument, "grid spec: channels must be >= 1");
  (void)nx();
  (void)ny();
}

int GridSpec::nx() const { return cell_count_along(x_min, x_max, res_x, "x"); }
int GridSpec::ny() const { return cell_count_along(y_min, y_max, res_y, "y"); }

std::optional<CellIndex> grid_cell_of(double x, double y, const GridSpec& spec) {
  if (!(x >= spec.x_min && x < spec.x_max && y >= spec.y_min && y < spec.y_max)) return std::nullopt;
  const int nx = spec.nx();
  const int ny = spec.ny();
  const int ix = std::min(static_cast<int>(std::floor((x - spec.x_min) / spec.res_x)), nx - 1);
  const int iy = std::min(static_cast<int>(std::floor((y - spec.y_min) / spec.res_y)), ny - 1);
  return CellIndex{ix, iy};
}

namespace {

std::vector<std::uint32_t> destination_cells(const WedgeCloud& cloud, const GridSpec& spec, int nx) {
  std::vector<std::uint32_t> dest(cloud.size(), kNoCell);
  for (std::size_t p = 0; p < cloud.size(); ++p) {
    const Vec3& q = cloud.positions[p];
    if (auto c = grid_cell_of(q.x(), q.y(), spec)) {
      dest[p] = static_cast<std::uint32_t>(c->iy) * static_cast<std::uint32_t>(nx) +
                static_cast<std::uint32_t>(c->ix);
    }
  }
  return dest;
}

void accumulate(BevGrid& grid, const WedgeCloud& cloud, std::size_t point, std::size_t cell) {
  const std::size_t ch = static_cast<std::size_t>(grid.spec.channels);
  double* dst = grid.data.data() + cell * ch;
  const double w = cloud.weights[point];
  const auto f = cloud.feature(point);
  for (std::size_t c = 0; c < ch; ++c) dst[c] += w * f[c];
  ++grid.hit_count[cell];
}

bool canonical_less(const WedgeCloud& cloud, std::size_t a, std::size_t b) {
  const Vec3& pa = cloud.positions[a];
  const Vec3& pb = cloud.positions[b];
  for (int k = 0; k < 3; ++k) {
    if (pa[k] != pb[k]) return pa[k] < pb[k];
  }
  if (cloud.weights[a] != cloud.weights[b]) return cloud.weights[a] < cloud.weights[b];
  const auto fa = cloud.feature(a);
  const auto fb = cloud.feature(b);
  return std::lexicographical_compare(fa.begin(), fa.end(), fb.begin(), fb.end());
}

}  // namespace

BevGrid pool(const WedgeCloud& cloud, const GridSpec& spec, PoolMode mode, unsigned threads) {
  spec.validate();
  if (cloud.channels != spec.channels && cloud.size() > 0) {
    throw Error(ErrorCode::kShapeMismatch, "pool: cloud channels differ from grid channels");
  }
  BevGrid grid;
  grid.spec = spec;
  grid.nx = spec.nx();
  grid.ny = spec.ny();
  const std::size_t cells = static_cast<std::size_t>(grid.nx) * grid.ny;
  grid.data.assign(cells * spec.channels, 0.0);
  grid.hit_count.assign(cells, 0);

  const auto dest = destination_cells(cloud, spec, grid.nx);
  grid.dropped = static_cast<std::size_t>(std::count(dest.begin(), dest.end(), kNoCell));

  switch (mode) {
    case PoolMode::kFixedOrder: {
      for (std::size_t p = 0; p < cloud.size(); ++p) {
        if (dest[p] != kNoCell) accumulate(grid, cloud, p, dest[p]);
      }
      break;
    }
    case PoolMode::kParallel: {
      // Stable counting sort by destination cell.
      std::vector<std::size_t> offsets(cells + 1, 0);
      for (auto d : dest) {
        if (d != kNoCell) ++offsets[d + 1];
      }
      std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
      std::vector<std::size_t> order(offsets.back());
      std::vector<std::size_t> cursor(offsets.begin(), offsets.end() - 1);
      for (std::size_t p = 0; p < dest.size(); ++p) {
        if (dest[p] != kNoCell) order[cursor[dest[p]]++] = p;
      }
      unsigned n_threads = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
      n_threads = static_cast<unsigned>(std::min<std::size_t>(n_threads, std::max<std::size_t>(cells, 1)));
      auto work = [&](std::size_t begin_cell, std::size_t end_cell) {
        for (std::size_t cell = begin_cell; cell < end_cell; ++cell) {
          for (std::size_t k = offsets[cell]; k < offsets[cell + 1]; ++k) {
            accumulate(grid, cloud, order[k], cell);
          }
        }
      };
      std::vector<std::jthread> workers;
      const std::size_t chunk = (cells + n_threads - 1) / n_threads;
      for (unsigned t = 1; t < n_threads; ++t) {
        const std::size_t b = std::min(cells, t * chunk);
        const std::size_t e = std::min(cells, b + chunk);
        if (b < e) workers.emplace_back(work, b, e);
      }
      work(0, std::min(cells, chunk));
      break;
    }
    case PoolMode::kCanonical: {
      std::vector<std::size_t> order;
      order.reserve(cloud.size() - grid.dropped);
      for (std::size_t p = 0; p < cloud.size(); ++p) {
        if (dest[p] != kNoCell) order.push_back(p);
      }
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (dest[a] != dest[b]) return dest[a] < dest[b];
        return canonical_less(cloud, a, b);
      });
      for (auto p : order) accumulate(grid, cloud, p, dest[p]);
      break;
    }
  }
  return grid;
}

}  // namespace hlift
