#include "hheat/operators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hheat {

namespace {

struct Entry {
  std::int32_t col;
  double val;
};

struct Triplet {
  std::int32_t row, col;
  double val;
};

std::vector<std::int64_t> axis_strides(const GridSpec& spec) {
  std::vector<std::int64_t> stride(spec.dim());
  std::int64_t s = 1;
  for (int a = spec.dim() - 1; a >= 0; --a) {
    stride[a] = s;
    s *= spec.cells[a];
  }
  return stride;
}

// Bracketing l-nodes and interpolation weight for a target l-coordinate:
// target = l_lo + (t + 0.5) * dl, k0 = floor(t), xi = t - k0.
struct LBracket {
  int k0;
  double xi;
  bool exact;  // lands on a node up to fp noise
};

LBracket l_bracket(const GridSpec& spec, double l_target) {
  const int la = spec.l_axis();
  const double t = (l_target - spec.lo[la]) / spec.spacing(la) - 0.5;
  double k0f = std::floor(t);
  double xi = t - k0f;
  if (xi > 1.0 - 1e-12) {
    k0f += 1;
    xi = 0.0;
  }
  const bool exact = (xi < 1e-12);
  if (exact) xi = 0.0;
  if (xi < 0 || xi > 1)
    throw std::logic_error("assemble: interpolation weight outside [0,1]");  // cannot happen
  return {int(k0f), xi, exact};
}

}  // namespace

SparseOperator assemble_sublaplacian(const GridSpec& spec) {
  spec.validate();
  const std::int64_t n = spec.size();
  const int dim = spec.dim();
  const int N = spec.N;
  const int la = spec.l_axis();
  const auto stride = axis_strides(spec);
  const int rowcap = 1 + 8 * N;

  SparseOperator op;
  op.n = n;
  op.rows.assign(std::size_t(n), {});
  std::vector<Entry> scratch(std::size_t(n) * rowcap);
  std::vector<int> count(std::size_t(n), 0);

  std::vector<int> idx(dim, 0);
  std::vector<double> coord(dim);
  for (int a = 0; a < dim; ++a) coord[a] = spec.coord(a, 0);

  const double dl = spec.spacing(la);
  const int nl = spec.cells[la];

  for (std::int64_t f = 0; f < n; ++f) {
    Entry* row = &scratch[std::size_t(f) * rowcap];
    int& cnt = count[f];
    auto& info = op.rows[f];
    double diag = 0;

    auto add = [&](std::int64_t col, double val) {
      row[cnt++] = {std::int32_t(col), val};
    };

    // One flow stencil: move axis `ax` by dir*h, move l by dir*shift_rate*h.
    auto flow_endpoint = [&](int ax, int dir, double shift_rate) {
      const double h = spec.spacing(ax);
      const double inv_h2 = 1.0 / (h * h);
      diag -= inv_h2;  // one half of the -2/h^2 center weight per endpoint
      const int ia = idx[ax] + dir;
      if (ia < 0 || ia >= spec.cells[ax]) {
        info.clipped_endpoints++;
        return;
      }
      const double l_target = coord[la] + dir * shift_rate * h;
      const LBracket br = l_bracket(spec, l_target);
      if (!br.exact) info.exact_landing = false;
      const std::int64_t base = f + std::int64_t(dir) * stride[ax] - std::int64_t(idx[la]);
      bool clipped = false;
      if (br.k0 >= 0 && br.k0 < nl && 1.0 - br.xi > 0)
        add(base + br.k0, (1.0 - br.xi) * inv_h2);
      else if (1.0 - br.xi > 0)
        clipped = true;
      if (br.k0 + 1 >= 0 && br.k0 + 1 < nl && br.xi > 0)
        add(base + br.k0 + 1, br.xi * inv_h2);
      else if (br.xi > 0)
        clipped = true;
      if (clipped) info.clipped_endpoints++;
    };

    for (int j = 0; j < N; ++j) {
      const double yj = coord[N + j];
      const double xj = coord[j];
      flow_endpoint(j, +1, 2.0 * yj);       // X_j moves l by +2 y_j h per +h in x_j
      flow_endpoint(j, -1, 2.0 * yj);
      flow_endpoint(N + j, +1, -2.0 * xj);  // Y_j moves l by -2 x_j h per +h in y_j
      flow_endpoint(N + j, -1, -2.0 * xj);
    }
    add(f, diag);

    // advance the multi-index (l fastest)
    for (int a = dim - 1; a >= 0; --a) {
      if (++idx[a] < spec.cells[a]) {
        coord[a] = spec.coord(a, idx[a]);
        break;
      }
      idx[a] = 0;
      coord[a] = spec.coord(a, 0);
    }
  }

  // Compact to CSR, merging duplicate columns within each row.
  op.row_ptr.assign(std::size_t(n) + 1, 0);
  std::int64_t nnz = 0;
  for (std::int64_t f = 0; f < n; ++f) nnz += count[f];
  op.cols.reserve(nnz);
  op.vals.reserve(nnz);
  for (std::int64_t f = 0; f < n; ++f) {
    Entry* row = &scratch[std::size_t(f) * rowcap];
    std::sort(row, row + count[f], [](const Entry& a, const Entry& b) { return a.col < b.col; });
    for (int k = 0; k < count[f]; ++k) {
      if (!op.cols.empty() && std::int64_t(op.cols.size()) > op.row_ptr[f] &&
          op.cols.back() == row[k].col)
        op.vals.back() += row[k].val;
      else {
        op.cols.push_back(row[k].col);
        op.vals.push_back(row[k].val);
      }
    }
    op.row_ptr[f + 1] = std::int64_t(op.cols.size());
  }
  // monotone scheme: off-diagonal entries must be nonnegative
  for (std::int64_t r = 0; r < n; ++r)
    for (std::int64_t k = op.row_ptr[r]; k < op.row_ptr[r + 1]; ++k)
      if (op.cols[k] != r && op.vals[k] < 0)
        throw std::logic_error("assemble_sublaplacian: negative off-diagonal stencil weight");
  return op;
}

SparseOperator assemble_horizontal_stiffness(const GridSpec& spec) {
  spec.validate();
  const std::int64_t n = spec.size();
  const int dim = spec.dim();
  const int N = spec.N;
  const int la = spec.l_axis();
  const auto stride = axis_strides(spec);
  const int nl = spec.cells[la];

  std::vector<Triplet> trip;
  trip.reserve(std::size_t(n) * (9 * 4 * N) / 2);

  std::vector<int> idx(dim, 0);
  std::vector<double> coord(dim);
  for (int a = 0; a < dim; ++a) coord[a] = spec.coord(a, 0);

  for (std::int64_t f = 0; f < n; ++f) {
    auto add_side = [&](int ax, int dir, double shift_rate) {
      const double h = spec.spacing(ax);
      Entry loc[3];
      int m = 0;
      loc[m++] = {std::int32_t(f), -1.0 / h};
      const int ia = idx[ax] + dir;
      if (ia >= 0 && ia < spec.cells[ax]) {
        const LBracket br = l_bracket(spec, coord[la] + dir * shift_rate * h);
        const std::int64_t base = f + std::int64_t(dir) * stride[ax] - std::int64_t(idx[la]);
        if (br.k0 >= 0 && br.k0 < nl && 1.0 - br.xi > 0)
          loc[m++] = {std::int32_t(base + br.k0), (1.0 - br.xi) / h};
        if (br.k0 + 1 >= 0 && br.k0 + 1 < nl && br.xi > 0)
          loc[m++] = {std::int32_t(base + br.k0 + 1), br.xi / h};
      }
      // 0.5 * (sum loc)^2, both forward and backward sides are enumerated
      for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
          trip.push_back({loc[a].col, loc[b].col, 0.5 * loc[a].val * loc[b].val});
    };

    for (int j = 0; j < N; ++j) {
      add_side(j, +1, 2.0 * coord[N + j]);
      add_side(j, -1, 2.0 * coord[N + j]);
      add_side(N + j, +1, -2.0 * coord[j]);
      add_side(N + j, -1, -2.0 * coord[j]);
    }

    for (int a = dim - 1; a >= 0; --a) {
      if (++idx[a] < spec.cells[a]) {
        coord[a] = spec.coord(a, idx[a]);
        break;
      }
      idx[a] = 0;
      coord[a] = spec.coord(a, 0);
    }
  }

  std::sort(trip.begin(), trip.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });

  SparseOperator op;
  op.n = n;
  op.rows.assign(std::size_t(n), {});
  op.row_ptr.assign(std::size_t(n) + 1, 0);
  std::int64_t cur = -1;
  for (const Triplet& t : trip) {
    if (t.row != cur) {
      for (std::int64_t r = cur + 1; r <= t.row; ++r) op.row_ptr[r] = std::int64_t(op.cols.size());
      cur = t.row;
      op.cols.push_back(t.col);
      op.vals.push_back(t.val);
    } else if (op.cols.back() == t.col) {
      op.vals.back() += t.val;
    } else {
      op.cols.push_back(t.col);
      op.vals.push_back(t.val);
    }
  }
  for (std::int64_t r = cur + 1; r <= n; ++r) op.row_ptr[r] = std::int64_t(op.cols.size());
  return op;
}

SparseOperator shifted_identity_minus(const SparseOperator& a, double dt) {
  SparseOperator m = a;
  bool diag_seen;
  for (std::int64_t r = 0; r < m.n; ++r) {
    diag_seen = false;
    for (std::int64_t k = m.row_ptr[r]; k < m.row_ptr[r + 1]; ++k) {
      m.vals[k] = -dt * m.vals[k];
      if (m.cols[k] == r) {
        m.vals[k] += 1.0;
        diag_seen = true;
      }
    }
    if (!diag_seen) throw std::logic_error("shifted_identity_minus: missing diagonal");
  }
  return m;
}

}  // namespace hheat
