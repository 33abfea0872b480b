#include "rebel/regen.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>

#include "rebel/rng.hpp"
#include "rebel/stats.hpp"

namespace rebel {

BlockPartition atomic_blocks(const ChainPath& path,
                             const std::function<bool(std::span<const double>)>& atom) {
  const std::size_t n = path.length();
  std::vector<std::size_t> times;
  for (std::size_t i = 0; i < n; ++i)
    if (atom(path.state(i))) times.push_back(i + 1);
  if (times.empty())
    throw NoRegenerationError("atomic_blocks: the atom is never visited", 0);
  return partition_from_times(std::move(times), n);
}

std::function<bool(std::span<const double>)> atom_equals(double value) {
  return [value](std::span<const double> x) { return x[0] == value; };
}

TransitionDensity::TransitionDensity(const ChainPath& path, std::vector<double> bandwidth) {
  const std::size_t n = path.length();
  const std::size_t d = path.dim;
  if (n < 2) throw DegenerateDensityError("transition density needs at least 2 states");
  dim_ = d;
  states_.resize(n, d);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < d; ++c) states_(i, c) = path.state(i)[c];

  bool constant_path = true;
  for (std::size_t i = 1; i < n && constant_path; ++i)
    constant_path = (states_.row(i) == states_.row(0));
  if (constant_path)
    throw DegenerateDensityError("transition density: all states identical");

  if (bandwidth.empty()) {
    // Normal-reference rule per coordinate: 1.06 sd n^(-1/5).
    bandwidth.resize(d);
    const double scale = std::pow(static_cast<double>(n), -0.2);
    for (std::size_t c = 0; c < d; ++c) {
      const double mean = states_.col(c).mean();
      const double var =
          (states_.col(c).array() - mean).square().sum() / static_cast<double>(n - 1);
      if (!(var > 0.0))
        throw DegenerateDensityError("transition density: coordinate " + std::to_string(c) +
                                     " has zero spread");
      bandwidth[c] = 1.06 * std::sqrt(var) * scale;
    }
  } else {
    if (bandwidth.size() != d)
      throw ValidationError("bandwidth: expected one entry per coordinate");
    for (double h : bandwidth)
      if (!(h > 0.0)) throw ValidationError("bandwidth: entries must be positive");
  }
  bandwidth_ = std::move(bandwidth);
}

TransitionDensity TransitionDensity::custom(
    std::size_t dim,
    std::function<double(std::span<const double>, std::span<const double>)> fn) {
  TransitionDensity td;
  td.dim_ = dim;
  td.custom_fn_ = std::move(fn);
  return td;
}

Eigen::VectorXd TransitionDensity::kernel_row(std::span<const double> x) const {
  static constexpr double kInvSqrt2Pi = 0.3989422804014327;
  const auto n = states_.rows();
  Eigen::VectorXd w = Eigen::VectorXd::Ones(n);
  for (std::size_t c = 0; c < dim_; ++c) {
    const double h = bandwidth_[c];
    w.array() *= (-0.5 * ((states_.col(c).array() - x[c]) / h).square()).exp() *
                 (kInvSqrt2Pi / h);
  }
  return w;
}

double TransitionDensity::evaluate(std::span<const double> x,
                                   std::span<const double> y) const {
  if (custom_fn_) return std::max(custom_fn_(x, y), kFloor);
  const auto n = states_.rows();
  const Eigen::VectorXd wx = kernel_row(x);
  const Eigen::VectorXd wy = kernel_row(y);
  const double denom = wx.head(n - 1).sum();
  if (!(denom > 0.0)) return kFloor;
  const double numer = wx.head(n - 1).dot(wy.tail(n - 1));
  return std::max(numer / denom, kFloor);
}

Eigen::MatrixXd TransitionDensity::grid_values(const Eigen::MatrixXd& xs,
                                               const Eigen::MatrixXd& ys) const {
  const auto rx = xs.rows();
  const auto ry = ys.rows();
  Eigen::MatrixXd out(rx, ry);
  if (custom_fn_) {
    std::vector<double> xbuf(dim_), ybuf(dim_);
    for (Eigen::Index i = 0; i < rx; ++i) {
      for (std::size_t c = 0; c < dim_; ++c) xbuf[c] = xs(i, c);
      for (Eigen::Index j = 0; j < ry; ++j) {
        for (std::size_t c = 0; c < dim_; ++c) ybuf[c] = ys(j, c);
        out(i, j) = std::max(custom_fn_(xbuf, ybuf), kFloor);
      }
    }
    return out;
  }
  const auto n = states_.rows();
  Eigen::MatrixXd a(rx, n - 1);
  Eigen::MatrixXd b(ry, n - 1);
  std::vector<double> buf(dim_);
  for (Eigen::Index i = 0; i < rx; ++i) {
    for (std::size_t c = 0; c < dim_; ++c) buf[c] = xs(i, c);
    a.row(i) = kernel_row(buf).head(n - 1);
  }
  for (Eigen::Index j = 0; j < ry; ++j) {
    for (std::size_t c = 0; c < dim_; ++c) buf[c] = ys(j, c);
    b.row(j) = kernel_row(buf).tail(n - 1);
  }
  out.noalias() = a * b.transpose();
  const Eigen::VectorXd denom = a.rowwise().sum();
  for (Eigen::Index i = 0; i < rx; ++i) {
    const double d = denom(i);
    for (Eigen::Index j = 0; j < ry; ++j)
      out(i, j) = (d > 0.0) ? std::max(out(i, j) / d, kFloor) : kFloor;
  }
  return out;
}

std::vector<double> TransitionDensity::pair_values(
    const ChainPath& path, const std::vector<std::size_t>& indices) const {
  const std::size_t n = path.length();
  for (std::size_t i : indices)
    if (i + 1 >= n) throw ValidationError("pair_values: index beyond last transition");
  std::vector<double> out(indices.size());
  if (custom_fn_) {
    for (std::size_t t = 0; t < indices.size(); ++t)
      out[t] = evaluate(path.state(indices[t]), path.state(indices[t] + 1));
    return out;
  }
  if (static_cast<std::size_t>(states_.rows()) != n || dim_ != path.dim)
    throw ValidationError("pair_values: path does not match the estimation sample");

  std::vector<std::size_t> order(indices.size());
  for (std::size_t t = 0; t < order.size(); ++t) order[t] = t;
  std::sort(order.begin(), order.end(),
            [&](std::size_t u, std::size_t v) { return indices[u] < indices[v]; });

  Eigen::VectorXd row_k, row_next;
  std::size_t have = static_cast<std::size_t>(-1);
  double last_val = 0.0;
  std::size_t last_idx = static_cast<std::size_t>(-1);
  for (std::size_t t : order) {
    const std::size_t k = indices[t];
    if (k == last_idx) {  // duplicate index
      out[t] = last_val;
      continue;
    }
    if (have == k)
      row_k.swap(row_next);
    else
      row_k = kernel_row(path.state(k));
    row_next = kernel_row(path.state(k + 1));
    have = k + 1;
    const double denom = row_k.head(n - 1).sum();
    double v = kFloor;
    if (denom > 0.0)
      v = std::max(row_k.head(n - 1).dot(row_next.tail(n - 1)) / denom, kFloor);
    out[t] = v;
    last_val = v;
    last_idx = k;
  }
  return out;
}

bool SmallSet::contains(std::span<const double> x) const {
  for (std::size_t c = 0; c < lo.size(); ++c)
    if (x[c] < lo[c] || x[c] > hi[c]) return false;
  return true;
}

double SmallSet::volume() const {
  double v = 1.0;
  for (std::size_t c = 0; c < lo.size(); ++c) v *= (hi[c] - lo[c]);
  return v;
}

double SmallSet::phi(std::span<const double> y) const {
  if (custom_phi) return custom_phi(y);
  return contains(y) ? 1.0 / volume() : 0.0;
}

std::string SmallSet::to_json() const {
  nlohmann::json j;
  j["lo"] = lo;
  j["hi"] = hi;
  j["delta"] = delta;
  j["grid_per_axis"] = grid_per_axis;
  j["expected_regenerations"] = expected_regenerations;
  j["phi"] = custom_phi ? "custom" : "uniform";
  return j.dump();
}

Eigen::MatrixXd box_grid(const CandidateBox& box, int per_axis) {
  const std::size_t d = box.lo.size();
  if (per_axis < 2) throw ValidationError("box_grid: need at least 2 points per axis");
  std::size_t rows = 1;
  for (std::size_t c = 0; c < d; ++c) rows *= static_cast<std::size_t>(per_axis);
  Eigen::MatrixXd grid(rows, d);
  for (std::size_t r = 0; r < rows; ++r) {
    std::size_t rem = r;
    for (std::size_t c = 0; c < d; ++c) {
      const std::size_t idx = rem % static_cast<std::size_t>(per_axis);
      rem /= static_cast<std::size_t>(per_axis);
      grid(r, c) = box.lo[c] + (box.hi[c] - box.lo[c]) * static_cast<double>(idx) /
                                   static_cast<double>(per_axis - 1);
    }
  }
  return grid;
}

int default_grid_per_axis(std::size_t dim) {
  // Keep points-per-side near the scalar default of 50 (2500 pair evaluations).
  const double per_axis = std::pow(2500.0, 1.0 / (2.0 * static_cast<double>(dim)));
  return std::max(3, static_cast<int>(per_axis + 1e-9));
}

SmallSet select_small_set(const ChainPath& path, const TransitionDensity& density,
                          const std::vector<CandidateBox>& candidates,
                          const SmallSetOptions& options) {
  const std::size_t n = path.length();
  const std::size_t d = path.dim;
  if (candidates.empty()) throw ValidationError("select_small_set: no candidates");
  for (const auto& c : candidates) {
    if (c.lo.size() != d || c.hi.size() != d)
      throw ValidationError("select_small_set: candidate dimension mismatch");
    for (std::size_t k = 0; k < d; ++k)
      if (!(c.lo[k] < c.hi[k]))
        throw ValidationError("select_small_set: candidate box has empty extent");
  }

  // Transitions that start and end inside at least one candidate; the density
  // at these sample pairs is shared across candidates.
  std::vector<SmallSet> probes(candidates.size());
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    probes[c].lo = candidates[c].lo;
    probes[c].hi = candidates[c].hi;
  }
  std::vector<std::vector<std::size_t>> member(candidates.size());
  std::vector<std::size_t> visit_count(candidates.size(), 0);
  std::vector<std::size_t> pooled;
  std::vector<char> pooled_mark(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = path.state(i);
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      if (!probes[c].contains(x)) continue;
      ++visit_count[c];
      if (i + 1 < n && probes[c].contains(path.state(i + 1))) {
        member[c].push_back(i);
        if (!pooled_mark[i]) {
          pooled_mark[i] = 1;
          pooled.push_back(i);
        }
      }
    }
  }
  std::sort(pooled.begin(), pooled.end());
  const std::vector<double> pooled_vals = density.pair_values(path, pooled);
  std::vector<double> pair_val(n, 0.0);
  for (std::size_t t = 0; t < pooled.size(); ++t) pair_val[pooled[t]] = pooled_vals[t];

  bool any = false;
  SmallSet best;
  double best_expected = -1.0;
  double best_volume = 0.0;
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    if (visit_count[c] < 2) continue;
    SmallSet s{candidates[c].lo, candidates[c].hi};
    const int per_axis =
        options.grid_per_axis > 0 ? options.grid_per_axis : default_grid_per_axis(d);
    const Eigen::MatrixXd grid = box_grid(candidates[c], per_axis);
    const Eigen::MatrixXd vals = density.grid_values(grid, grid);
    const double vol = s.volume();
    s.delta = std::min(vol * vals.minCoeff(), 1.0);
    s.grid_per_axis = per_axis;
    if (!(s.delta > 0.0)) continue;
    double expected = 0.0;
    for (std::size_t i : member[c]) expected += s.delta * (1.0 / vol) / pair_val[i];
    s.expected_regenerations = expected;
    if (expected < options.min_expected) continue;
    any = true;
    if (expected > best_expected ||
        (expected == best_expected && vol < best_volume)) {
      best = std::move(s);
      best_expected = expected;
      best_volume = vol;
    }
  }
  if (!any)
    throw NoViableSmallSetError(
        "select_small_set: no candidate reaches the minimum expected renewal count");
  return best;
}

BlockPartition split_chain(const ChainPath& path, const SmallSet& set,
                           const TransitionDensity& density, std::uint64_t seed) {
  const std::size_t n = path.length();
  if (set.lo.size() != path.dim)
    throw ValidationError("split_chain: small set dimension mismatch");
  if (!(set.delta > 0.0 && set.delta <= 1.0))
    throw ValidationError("split_chain: delta must lie in (0, 1]");

  std::vector<std::size_t> eligible;       // visits with a drawable successor
  std::vector<std::size_t> need_density;   // subset where phi(successor) > 0
  for (std::size_t i = 0; i + 1 < n; ++i)
    if (set.contains(path.state(i))) {
      eligible.push_back(i);
      if (set.phi(path.state(i + 1)) > 0.0) need_density.push_back(i);
    }

  const std::vector<double> dens_vals = density.pair_values(path, need_density);
  std::vector<double> pair_val(n, 0.0);
  for (std::size_t t = 0; t < need_density.size(); ++t)
    pair_val[need_density[t]] = dens_vals[t];

  SplitRng rng(seed);
  std::vector<std::size_t> times;
  std::size_t clamped = 0;
  for (std::size_t i : eligible) {
    const double u = rng.next_uniform();
    const double phi = set.phi(path.state(i + 1));
    double param = 0.0;
    if (phi > 0.0) {
      param = set.delta * phi / pair_val[i];
      if (param > 1.0) {
        param = 1.0;
        ++clamped;
      }
    }
    if (u < param) times.push_back(i + 1);  // renewal at 1-based time i+1
  }
  if (times.size() < 2)
    throw NoRegenerationError("split_chain: fewer than 2 renewals (" +
                                  std::to_string(times.size()) + ")",
                              times.size());
  BlockPartition p = partition_from_times(std::move(times), n);
  p.visits = eligible.size();
  p.clamped_params = clamped;
  return p;
}

std::vector<CandidateBox> quantile_candidates(const ChainPath& path) {
  const std::size_t d = path.dim;
  std::vector<std::vector<double>> coord(d);
  for (std::size_t c = 0; c < d; ++c) {
    coord[c].reserve(path.length());
    for (std::size_t i = 0; i < path.length(); ++i) coord[c].push_back(path.state(i)[c]);
  }
  std::vector<CandidateBox> out;
  for (int step = 1; step <= 8; ++step) {
    const double f = 0.1 * step;
    CandidateBox box;
    box.lo.resize(d);
    box.hi.resize(d);
    bool ok = true;
    for (std::size_t c = 0; c < d; ++c) {
      box.lo[c] = stats::empirical_quantile(coord[c], 0.5 - f / 2.0);
      box.hi[c] = stats::empirical_quantile(coord[c], 0.5 + f / 2.0);
      if (!(box.lo[c] < box.hi[c])) ok = false;
    }
    if (ok) out.push_back(std::move(box));
  }
  if (out.empty())
    throw NoViableSmallSetError("quantile_candidates: sample spread too small");
  return out;
}

CandidateBox repeat_interval(double lo, double hi, std::size_t dim) {
  CandidateBox box;
  box.lo.assign(dim, lo);
  box.hi.assign(dim, hi);
  return box;
}

OrderResult estimate_order(const ChainPath& path, int max_k, const OrderContext& ctx) {
  if (max_k < 1) throw ValidationError("estimate_order: max_k must be >= 1");
  if (!ctx.moment_g) throw ValidationError("estimate_order: moment required");
  const std::size_t d = path.dim;
  OrderResult result;
  std::vector<CandidateBox> base =
      ctx.candidates.empty() ? quantile_candidates(path) : ctx.candidates;

  for (int k = 1; k <= max_k; ++k) {
    const ChainPath stacked = stack(path, static_cast<std::size_t>(k));
    const std::size_t dk = stacked.dim;
    std::vector<CandidateBox> cands;
    for (const auto& b : base) {
      CandidateBox e;
      for (int rep = 0; rep < k; ++rep) {
        e.lo.insert(e.lo.end(), b.lo.begin(), b.lo.end());
        e.hi.insert(e.hi.end(), b.hi.begin(), b.hi.end());
      }
      cands.push_back(std::move(e));
    }
    SmallSetOptions opts;
    opts.grid_per_axis =
        ctx.grid_per_axis > 0 ? ctx.grid_per_axis : default_grid_per_axis(dk);
    BlockPartition part;
    try {
      TransitionDensity density(stacked);
      const SmallSet set = select_small_set(stacked, density, cands, opts);
      part = split_chain(stacked, set, density, SplitRng::derive(ctx.seed, k));
    } catch (const Error& e) {
      throw OrderTestInconclusiveError(
          "estimate_order: order " + std::to_string(k) + " failed (" + e.what() + ")",
          result.trace);
    }

    OrderTestRecord rec;
    rec.k = k;
    rec.blocks = part.complete_count;
    if (part.complete_count < ctx.min_blocks)
      throw OrderTestInconclusiveError(
          "estimate_order: fewer than " + std::to_string(ctx.min_blocks) +
              " blocks at order " + std::to_string(k),
          result.trace);

    // Truncated plug-in for the centering value, then lag-1 regression of the
    // per-block moment sums through the origin.
    const std::size_t l = part.complete_count;
    std::vector<double> y(l);
    double total_sum = 0.0;
    double total_len = 0.0;
    std::vector<double> block_sum(l), block_len(l);
    for (std::size_t j = 0; j < l; ++j) {
      const Block& b = part.complete(j);
      double s = 0.0;
      for (std::size_t i = b.begin; i < b.end; ++i)
        s += ctx.moment_g(stacked.state(i).first(d));
      block_sum[j] = s;
      block_len[j] = static_cast<double>(b.size());
      total_sum += s;
      total_len += block_len[j];
    }
    const double theta = total_sum / total_len;
    for (std::size_t j = 0; j < l; ++j) y[j] = block_sum[j] - theta * block_len[j];

    double sxx = 0.0, sxy = 0.0;
    for (std::size_t j = 1; j < l; ++j) {
      sxx += y[j - 1] * y[j - 1];
      sxy += y[j - 1] * y[j];
    }
    const double m = static_cast<double>(l - 1);  // regression pairs
    bool accepted;
    if (sxx > 0.0 && m > 1.0) {
      rec.rho = sxy / sxx;
      double rss = 0.0;
      for (std::size_t j = 1; j < l; ++j) {
        const double res = y[j] - rec.rho * y[j - 1];
        rss += res * res;
      }
      const double s2 = rss / (m - 1.0);
      if (s2 > 0.0) {
        rec.t_stat = rec.rho / std::sqrt(s2 / sxx);
        rec.p_value = stats::student_t_two_sided_p(m - 1.0, rec.t_stat);
      } else {
        rec.t_stat = 0.0;
        rec.p_value = 1.0;
      }
      accepted = rec.p_value >= ctx.level;
    } else {
      // No usable variation: nothing contradicts independence.
      rec.rho = 0.0;
      rec.t_stat = 0.0;
      rec.p_value = 1.0;
      accepted = true;
    }
    rec.accepted = accepted;
    result.trace.push_back(rec);
    if (accepted) {
      result.order = k;
      result.exhausted = false;
      return result;
    }
  }
  result.order = max_k;
  result.exhausted = true;
  return result;
}

}  // namespace rebel
