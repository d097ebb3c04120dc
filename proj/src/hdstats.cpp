#include "hdflip/hdstats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <thread>

#include "hdflip/errors.hpp"
#include "hdflip/rng.hpp"

namespace hdflip {

namespace {

constexpr double kZeroNormTolerance = 1e-12;

// Gathers the rows of a column subset: X(rows, cols).
Matrix gather(const Matrix& X, const IndexList& rows,
              const std::vector<int>& cols) {
  Matrix out(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c)
    for (std::size_t r = 0; r < rows.size(); ++r)
      out(static_cast<Index>(r), static_cast<Index>(c)) = X(rows[r], cols[c]);
  return out;
}

Vector gather_vector(const Vector& v, const IndexList& rows) {
  Vector out(static_cast<Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) out(static_cast<Index>(r)) = v(rows[r]);
  return out;
}

std::vector<int> without(const SelectedSet& selected, int j) {
  std::vector<int> out;
  out.reserve(selected.size() - 1);
  for (int v : selected)
    if (v != j) out.push_back(v);
  return out;
}

void check_stat_inputs(const DesignData& data, const SplitPlan& plan,
                       const FlipSet& flips) {
  if (data.Y.size() != data.n()) {
    throw Error(ErrorCode::DimensionMismatch, "response length != design rows");
  }
  if (plan.n != data.n() || flips.n != data.n()) {
    throw Error(ErrorCode::DimensionMismatch,
                "plan, flips and data must share the same n");
  }
}

Matrix gather_rows(const Matrix& X, const IndexList& rows) {
  Matrix out(static_cast<Index>(rows.size()), X.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) out.row(static_cast<Index>(r)) = X.row(rows[r]);
  return out;
}

void run_over_columns(Index m, int threads,
                      const std::function<void(Index, Index)>& chunk_fn) {
  threads = std::max(1, threads);
  if (threads == 1 || m < 2) {
    chunk_fn(0, m);
    return;
  }
  const Index n_threads = std::min<Index>(threads, m);
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(n_threads));
  const Index chunk = (m + n_threads - 1) / n_threads;
  for (Index t = 0; t < n_threads; ++t) {
    const Index begin = t * chunk;
    const Index end = std::min(m, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back(chunk_fn, begin, end);
  }
  for (auto& th : pool) th.join();
}

}  // namespace

SplitPlan make_splits(Index n, int Q, const Selector& selector,
                      const DesignData& data, std::uint64_t seed) {
  if (Q < 1) throw Error(ErrorCode::InvalidConfig, "need Q >= 1");
  if (n < 4) throw Error(ErrorCode::InvalidConfig, "need n >= 4 to split");
  if (data.n() != n) {
    throw Error(ErrorCode::DimensionMismatch, "plan n != data rows");
  }

  Rng split_rng(derive_seed(seed, stream::kSplits));
  Rng selection_rng(derive_seed(seed, stream::kSelection));

  SplitPlan plan;
  plan.n = n;
  plan.seed = seed;
  plan.splits.reserve(static_cast<std::size_t>(Q));

  const Index n_fit = (n + 1) / 2;  // fit half takes the extra row when n is odd
  std::vector<Index> order(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;

  for (int q = 0; q < Q; ++q) {
    split_rng.shuffle(order);
    Split split;
    split.fit_rows.assign(order.begin(), order.begin() + n_fit);
    split.test_rows.assign(order.begin() + n_fit, order.end());
    std::sort(split.fit_rows.begin(), split.fit_rows.end());
    std::sort(split.test_rows.begin(), split.test_rows.end());

    const int capacity = static_cast<int>(split.test_rows.size()) / 2;
    Matrix X_fit = gather_rows(data.X, split.fit_rows);
    Vector Y_fit = gather_vector(data.Y, split.fit_rows);

    split.selected = selector(X_fit, Y_fit, capacity, selection_rng);
    std::sort(split.selected.begin(), split.selected.end());
    if (std::adjacent_find(split.selected.begin(), split.selected.end()) !=
        split.selected.end()) {
      throw Error(ErrorCode::InvalidConfig, "selector returned duplicates");
    }
    if (!split.selected.empty() &&
        (split.selected.front() < 0 || split.selected.back() >= data.m())) {
      throw Error(ErrorCode::IndexOutOfRange, "selected index outside design");
    }
    if (static_cast<int>(split.selected.size()) > capacity) {
      throw Error(ErrorCode::CapacityExceeded,
                  "split selected " + std::to_string(split.selected.size()) +
                      " variables, capacity " + std::to_string(capacity));
    }
    plan.splits.push_back(std::move(split));
  }
  return plan;
}

StatMatrix exact_stats(const DesignData& data, const SplitPlan& plan,
                       const FlipSet& flips, int threads) {
  check_stat_inputs(data, plan, flips);
  const Index n = data.n();
  const Index m = data.m();
  const int B = flips.B;
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));

  StatMatrix result;
  result.method = StatMatrix::Method::Exact;
  result.values = Matrix::Zero(B, m);
  Matrix& G = result.values;

  run_over_columns(m, threads, [&](Index begin, Index end) {
    Matrix U;        // n x B accumulated score vectors for the current j
    Matrix S_block;  // test-row slice of the sign matrix
    for (Index j = begin; j < end; ++j) {
      bool selected_somewhere = false;
      for (const Split& split : plan.splits) {
        if (!std::binary_search(split.selected.begin(), split.selected.end(),
                                static_cast<int>(j)))
          continue;
        if (!selected_somewhere) {
          U = Matrix::Zero(n, B);
          selected_somewhere = true;
        }
        const IndexList& rows = split.test_rows;
        const Index n_out = static_cast<Index>(rows.size());

        // Residual maker of the split block, applied on each side of every
        // sign flip: contribution = R (f_b . (R x_j)) on the test rows.
        const Matrix R_block =
            residual_maker(gather(data.X, rows, without(split.selected,
                                                        static_cast<int>(j))));
        const Vector r_x = R_block * gather_vector(data.X.col(j), rows);

        S_block.resize(n_out, B);
        for (int b = 0; b < B; ++b)
          for (Index i = 0; i < n_out; ++i)
            S_block(i, b) = flips.signs(rows[static_cast<std::size_t>(i)], b);

        const Matrix contribution =
            R_block * (S_block.array().colwise() * r_x.array()).matrix();
        for (int b = 0; b < B; ++b)
          for (Index i = 0; i < n_out; ++i)
            U(rows[static_cast<std::size_t>(i)], b) += contribution(i, b);
      }
      if (!selected_somewhere) continue;  // column stays identically zero

      for (int b = 0; b < B; ++b) {
        const double norm = U.col(b).norm() * inv_sqrt_n;
        G(b, j) = norm <= kZeroNormTolerance ? 0.0 : U.col(b).dot(data.Y) * inv_sqrt_n / norm;
      }
    }
  });
  return result;
}

StatMatrix approx_stats(const DesignData& data, const SplitPlan& plan,
                        const FlipSet& flips, int threads,
                        MemoryStats* memory) {
  check_stat_inputs(data, plan, flips);
  const Index n = data.n();
  const Index m = data.m();
  const int B = flips.B;
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
  const Index panel = std::min<Index>(B, n);

  StatMatrix result;
  result.method = StatMatrix::Method::Approximate;
  result.values = Matrix::Zero(B, m);
  Matrix& G = result.values;

  // The memory contract: one accumulated n x n matrix plus one per-split
  // block (and flip panels capped at n columns) per thread, independent of Q.
  Index max_n_out = 0;
  Index max_k = 0;
  for (const Split& split : plan.splits) {
    max_n_out = std::max<Index>(max_n_out, static_cast<Index>(split.test_rows.size()));
    max_k = std::max<Index>(max_k, static_cast<Index>(split.selected.size()));
  }
  if (memory) {
    const std::size_t doubles =
        static_cast<std::size_t>(n * n)                    // accumulated R-bar
        + 3 * static_cast<std::size_t>(max_n_out * max_n_out)  // block + factor scratch
        + 2 * static_cast<std::size_t>(n * panel)          // flip/score panels
        + static_cast<std::size_t>(2 * n + B);             // vectors
    memory->peak_workspace_bytes_per_thread = doubles * sizeof(double);
  }

  run_over_columns(m, threads, [&](Index begin, Index end) {
    Matrix Rbar(n, n);
    Matrix W(n, panel);
    Matrix C(n, panel);
    for (Index j = begin; j < end; ++j) {
      bool selected_somewhere = false;
      for (const Split& split : plan.splits) {
        if (!std::binary_search(split.selected.begin(), split.selected.end(),
                                static_cast<int>(j)))
          continue;
        if (!selected_somewhere) {
          Rbar.setZero();
          selected_somewhere = true;
        }
        const IndexList& rows = split.test_rows;
        const Index n_out = static_cast<Index>(rows.size());
        const Matrix R_block =
            residual_maker(gather(data.X, rows, without(split.selected,
                                                        static_cast<int>(j))));
        for (Index c = 0; c < n_out; ++c)
          for (Index r = 0; r < n_out; ++r)
            Rbar(rows[static_cast<std::size_t>(r)], rows[static_cast<std::size_t>(c)]) +=
                R_block(r, c);
      }
      if (!selected_somewhere) continue;

      const Vector v1 = Rbar * data.X.col(j);
      for (int b0 = 0; b0 < B; b0 += static_cast<int>(panel)) {
        const int nb = std::min<int>(static_cast<int>(panel), B - b0);
        W.leftCols(nb) =
            flips.signs.middleCols(b0, nb).array().colwise() * v1.array();
        C.leftCols(nb).noalias() = Rbar * W.leftCols(nb);
        for (int b = 0; b < nb; ++b) {
          const double norm = C.col(b).norm() * inv_sqrt_n;
          G(b0 + b, j) =
              norm <= kZeroNormTolerance ? 0.0 : C.col(b).dot(data.Y) * inv_sqrt_n / norm;
        }
      }
    }
  });
  return result;
}

std::string stat_matrix_to_csv(const StatMatrix& G) {
  std::ostringstream out;
  for (Index j = 0; j < G.m(); ++j) {
    if (j) out << ',';
    out << (j + 1);
  }
  out << '\n';
  char buffer[40];
  for (int b = 0; b < G.B(); ++b) {
    for (Index j = 0; j < G.m(); ++j) {
      std::snprintf(buffer, sizeof(buffer), "%.10g", G.values(b, j));
      if (j) out << ',';
      out << buffer;
    }
    out << '\n';
  }
  return out.str();
}

StatMatrix stat_matrix_from_csv(const std::string& csv,
                                StatMatrix::Method method) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorCode::ParseError, "empty statistic matrix");
  }
  const Index m = static_cast<Index>(std::count(line.begin(), line.end(), ',')) + 1;

  std::vector<double> entries;
  int rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string field;
    Index cols = 0;
    while (std::getline(fields, field, ',')) {
      std::size_t pos = 0;
      double value = 0.0;
      try {
        value = std::stod(field, &pos);
      } catch (const std::exception&) {
        throw Error(ErrorCode::ParseError,
                    "bad numeric field '" + field + "' at data row " +
                        std::to_string(rows + 1));
      }
      if (pos != field.size()) {
        throw Error(ErrorCode::ParseError,
                    "trailing characters in field '" + field + "'");
      }
      if (!std::isfinite(value)) {
        throw Error(ErrorCode::NonFiniteValue,
                    "non-finite statistic at data row " + std::to_string(rows + 1));
      }
      entries.push_back(value);
      ++cols;
    }
    if (cols != m) {
      throw Error(ErrorCode::DimensionMismatch,
                  "row " + std::to_string(rows + 1) + " has " +
                      std::to_string(cols) + " fields, header has " +
                      std::to_string(m));
    }
    ++rows;
  }
  if (rows < 1) throw Error(ErrorCode::ParseError, "no data rows");

  StatMatrix G;
  G.method = method;
  G.values.resize(rows, m);
  for (int b = 0; b < rows; ++b)
    for (Index j = 0; j < m; ++j)
      G.values(b, j) = entries[static_cast<std::size_t>(b) * static_cast<std::size_t>(m) +
                               static_cast<std::size_t>(j)];
  return G;
}

}  // namespace hdflip
