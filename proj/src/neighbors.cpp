#include "intdim/neighbors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <thread>

#include "intdim/errors.hpp"

namespace intdim {

namespace {

constexpr double kUnitRoundoff = 0x1.0p-53;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct Candidate {
  double approx;
  std::size_t position;
};

// Per-row candidate pool for the approximate pass. Keeps every column whose
// approximate squared distance lies within `margin` of the running second
// best, so the exact top-2 is always a subset.
class CandidateSet {
 public:
  void offer(double approx, std::size_t position, double margin) {
    if (approx > best2_ + margin) return;
    items_.push_back({approx, position});
    if (approx < best1_) {
      best2_ = best1_;
      best1_ = approx;
    } else if (approx < best2_) {
      best2_ = approx;
    }
    if (items_.size() >= capacity_) {
      prune(best2_, margin);
      capacity_ = std::max<std::size_t>(32, 2 * items_.size());
    }
  }

  void prune(double second_best, double margin) {
    std::erase_if(items_, [&](const Candidate& c) { return c.approx > second_best + margin; });
  }

  const std::vector<Candidate>& items() const noexcept { return items_; }

 private:
  double best1_ = kInf;
  double best2_ = kInf;
  std::size_t capacity_ = 32;
  std::vector<Candidate> items_;
};

struct Tile {
  std::size_t row_block;
  std::size_t col_block;
};

template <class T>
class BlockedKernel {
 public:
  BlockedKernel(std::span<const T> values, std::size_t rows, std::size_t cols, const KernelOptions& options)
      : values_(values), rows_(rows), cols_(cols), block_(std::max<std::size_t>(1, options.block_rows)) {
    unsigned hw = options.threads != 0 ? options.threads : std::thread::hardware_concurrency();
    threads_ = std::max(1u, hw);
    chunk_ = std::clamp<std::size_t>(cols_, 1, 2048);
  }

  // Exact neighbours as (position1, position2, d1^2, d2^2) per row.
  void run(std::vector<std::size_t>& nn1, std::vector<std::size_t>& nn2, std::vector<double>& d1,
           std::vector<double>& d2, std::span<const RowId> ids) {
    prepare_centering();

    const std::size_t blocks = (rows_ + block_ - 1) / block_;
    std::vector<Tile> tiles;
    for (std::size_t i = 0; i < blocks; ++i) {
      for (std::size_t j = i; j < blocks; ++j) tiles.push_back({i, j});
    }

    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(threads_, tiles.size()));
    std::vector<std::vector<CandidateSet>> pools(workers, std::vector<CandidateSet>(rows_));
    std::atomic<std::size_t> next{0};
    {
      std::vector<std::jthread> pool;
      for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
          Workspace ws;
          for (std::size_t t = next++; t < tiles.size(); t = next++) process_tile(tiles[t], ws, pools[w]);
        });
      }
    }

    nn1.assign(rows_, 0);
    nn2.assign(rows_, 0);
    d1.assign(rows_, 0.0);
    d2.assign(rows_, 0.0);
    std::atomic<std::size_t> next_row{0};
    {
      std::vector<std::jthread> pool;
      for (unsigned w = 0; w < threads_; ++w) {
        pool.emplace_back([&] {
          std::vector<Candidate> merged;
          for (std::size_t i = next_row++; i < rows_; i = next_row++) {
            merged.clear();
            for (const auto& p : pools) {
              merged.insert(merged.end(), p[i].items().begin(), p[i].items().end());
            }
            resolve_row(i, merged, ids, nn1[i], nn2[i], d1[i], d2[i]);
          }
        });
      }
    }
  }

 private:
  struct Workspace {
    RowMatrix left;
    RowMatrix right;
    RowMatrix gram;
  };

  std::span<const T> row(std::size_t i) const { return values_.subspan(i * cols_, cols_); }

  // Centering by the column mean shrinks the norms that enter the
  // ||a||^2 + ||b||^2 - 2ab expansion and with them its rounding error.
  void prepare_centering() {
    mean_.assign(cols_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
      auto r = row(i);
      for (std::size_t c = 0; c < cols_; ++c) mean_[c] += static_cast<double>(r[c]);
    }
    for (double& m : mean_) m /= static_cast<double>(rows_);

    norms_.assign(rows_, 0.0);
    double max_norm = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) {
      auto r = row(i);
      double s = 0.0;
      for (std::size_t c = 0; c < cols_; ++c) {
        const double v = static_cast<double>(r[c]) - mean_[c];
        s += v * v;
      }
      norms_[i] = s;
      max_norm = std::max(max_norm, std::sqrt(s));
    }

    // Worst-case forward error of a length-D dot product (any summation
    // order, FMA or not), plus the centering and the three final
    // additions; the factor 8 covers both the approximate value and the
    // rounding of the exact re-check that ranks the survivors.
    const double d = static_cast<double>(cols_) + 2.0;
    const double gamma = d * kUnitRoundoff / (1.0 - d * kUnitRoundoff);
    margins_.resize(rows_);
    for (std::size_t i = 0; i < rows_; ++i) {
      const double scale = std::sqrt(norms_[i]) + max_norm;
      margins_[i] = 8.0 * (gamma + 8.0 * kUnitRoundoff) * scale * scale;
    }
  }

  void load_chunk(std::size_t row_begin, std::size_t row_count, std::size_t col_begin, std::size_t col_count,
                  RowMatrix& out) const {
    out.resize(static_cast<Eigen::Index>(row_count), static_cast<Eigen::Index>(col_count));
    for (std::size_t r = 0; r < row_count; ++r) {
      const T* src = values_.data() + (row_begin + r) * cols_ + col_begin;
      double* dst = out.data() + r * col_count;
      for (std::size_t c = 0; c < col_count; ++c) dst[c] = static_cast<double>(src[c]) - mean_[col_begin + c];
    }
  }

  void process_tile(const Tile& tile, Workspace& ws, std::vector<CandidateSet>& pool) const {
    const std::size_t r0 = tile.row_block * block_;
    const std::size_t c0 = tile.col_block * block_;
    const std::size_t nr = std::min(block_, rows_ - r0);
    const std::size_t nc = std::min(block_, rows_ - c0);
    const bool diagonal = tile.row_block == tile.col_block;

    ws.gram.setZero(static_cast<Eigen::Index>(nr), static_cast<Eigen::Index>(nc));
    for (std::size_t k0 = 0; k0 < cols_; k0 += chunk_) {
      const std::size_t nk = std::min(chunk_, cols_ - k0);
      load_chunk(r0, nr, k0, nk, ws.left);
      if (diagonal) {
        ws.gram.noalias() += ws.left * ws.left.transpose();
      } else {
        load_chunk(c0, nc, k0, nk, ws.right);
        ws.gram.noalias() += ws.left * ws.right.transpose();
      }
    }

    for (std::size_t a = 0; a < nr; ++a) {
      const std::size_t ia = r0 + a;
      const double na = norms_[ia];
      const double ma = margins_[ia];
      const double* g = ws.gram.data() + a * nc;
      for (std::size_t b = diagonal ? a + 1 : 0; b < nc; ++b) {
        const std::size_t ib = c0 + b;
        const double approx = na + norms_[ib] - 2.0 * g[b];
        pool[ia].offer(approx, ib, ma);
        pool[ib].offer(approx, ia, margins_[ib]);
      }
    }
  }

  void resolve_row(std::size_t i, std::vector<Candidate>& merged, std::span<const RowId> ids, std::size_t& p1,
                   std::size_t& p2, double& d1, double& d2) const {
    double best1 = kInf;
    double best2 = kInf;
    for (const auto& c : merged) {
      if (c.approx < best1) {
        best2 = best1;
        best1 = c.approx;
      } else if (c.approx < best2) {
        best2 = c.approx;
      }
    }
    const double cutoff = best2 + margins_[i];

    // (distance, row id) lexicographic order.
    auto better = [&](double da, std::size_t pa, double db, std::size_t pb) {
      return da < db || (da == db && ids[pa] < ids[pb]);
    };
    d1 = d2 = kInf;
    p1 = p2 = rows_;
    for (const auto& c : merged) {
      if (c.approx > cutoff) continue;
      const double d = squared_distance(row(i), row(c.position));
      if (p1 == rows_ || better(d, c.position, d1, p1)) {
        d2 = d1;
        p2 = p1;
        d1 = d;
        p1 = c.position;
      } else if (p2 == rows_ || better(d, c.position, d2, p2)) {
        d2 = d;
        p2 = c.position;
      }
    }
  }

  std::span<const T> values_;
  std::size_t rows_;
  std::size_t cols_;
  std::size_t block_;
  std::size_t chunk_;
  unsigned threads_;
  std::vector<double> mean_;
  std::vector<double> norms_;
  std::vector<double> margins_;
};

}  // namespace

NeighborStats two_nearest(const ActivationMatrix& m, const KernelOptions& options) {
  const std::size_t n = m.rows();
  if (n < 3) {
    throw DegenerateDataError("two nearest neighbours need at least 3 points, got " + std::to_string(n));
  }
  auto ids = m.row_ids();

  std::vector<std::size_t> p1, p2;
  std::vector<double> d1, d2;
  m.visit([&](auto values) {
    using T = typename decltype(values)::value_type;
    BlockedKernel<std::remove_const_t<T>> kernel(values, n, m.cols(), options);
    kernel.run(p1, p2, d1, d2, ids);
  });

  NeighborStats out;
  out.row_ids.assign(ids.begin(), ids.end());
  out.r1.resize(n);
  out.r2.resize(n);
  out.nn1.resize(n);
  out.nn2.resize(n);
  out.mu.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (d1[i] == 0.0) {
      throw DegenerateDataError("row id " + std::to_string(ids[i]) + " duplicates row id " +
                                std::to_string(ids[p1[i]]) + " (r1 = 0); run dedupe first");
    }
    out.r1[i] = std::sqrt(d1[i]);
    out.r2[i] = std::sqrt(d2[i]);
    out.nn1[i] = ids[p1[i]];
    out.nn2[i] = ids[p2[i]];
    out.mu[i] = out.r2[i] / out.r1[i];
  }
  return out;
}

DedupeResult dedupe(const ActivationMatrix& m, double tol) {
  if (!(tol >= 0.0) || !std::isfinite(tol)) {
    throw ConfigError("dedupe tolerance must be a finite nonnegative number");
  }
  const std::size_t n = m.rows();
  const std::size_t d = m.cols();
  auto ids = m.row_ids();
  std::vector<bool> keep(n, true);

  m.visit([&](auto values) {
    auto row = [&](std::size_t i) { return values.subspan(i * d, d); };
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;

    if (tol == 0.0) {
      auto less = [&](std::size_t a, std::size_t b) {
        auto ra = row(a);
        auto rb = row(b);
        for (std::size_t k = 0; k < d; ++k) {
          if (ra[k] < rb[k]) return true;
          if (rb[k] < ra[k]) return false;
        }
        return ids[a] < ids[b];
      };
      auto equal = [&](std::size_t a, std::size_t b) {
        auto ra = row(a);
        auto rb = row(b);
        for (std::size_t k = 0; k < d; ++k) {
          if (ra[k] != rb[k]) return false;
        }
        return true;
      };
      std::sort(order.begin(), order.end(), less);
      for (std::size_t k = 1; k < n; ++k) {
        if (equal(order[k - 1], order[k])) keep[order[k]] = false;
      }
      return;
    }

    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ids[a] < ids[b]; });
    const double tol2 = tol * tol;
    std::vector<std::size_t> kept;
    for (std::size_t p : order) {
      const bool twin = std::any_of(kept.begin(), kept.end(),
                                    [&](std::size_t q) { return squared_distance(row(p), row(q)) <= tol2; });
      if (twin) {
        keep[p] = false;
      } else {
        kept.push_back(p);
      }
    }
  });

  std::vector<std::size_t> positions;
  for (std::size_t i = 0; i < n; ++i) {
    if (keep[i]) positions.push_back(i);
  }
  if (positions.size() < 3) {
    throw DegenerateDataError("only " + std::to_string(positions.size()) +
                              " distinct rows remain after deduplication (need at least 3)");
  }
  return {m.select_rows(positions), n - positions.size()};
}

}  // namespace intdim
