#include "netreduce/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "netreduce/error.hpp"

namespace netreduce {

namespace {

void check_k(int k, std::size_t n) {
  if (k < 1 || static_cast<std::size_t>(k) > n) {
    throw Error(ErrorCode::InvalidK, "k=" + std::to_string(k) + " must lie in [1, " + std::to_string(n) + "]");
  }
}

/// Uniform double in [0, 1) from the top 53 bits; identical on every platform.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double t = a[i] - b[i];
    s += t * t;
  }
  return s;
}

std::vector<double> seed_plus_plus(const FeatureMatrix& f, int k, std::mt19937_64& rng) {
  const std::size_t n = f.order.size();
  const std::size_t p = f.dims;
  std::vector<double> centroids;
  centroids.reserve(static_cast<std::size_t>(k) * p);
  std::vector<bool> chosen(n, false);

  auto take = [&](std::size_t i) {
    chosen[i] = true;
    auto r = f.row(i);
    centroids.insert(centroids.end(), r.begin(), r.end());
  };

  take(std::min(n - 1, static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n))));
  std::vector<double> nearest(n);
  for (std::size_t i = 0; i < n; ++i) nearest[i] = squared_distance(f.row(i), {centroids.data(), p});

  for (int c = 1; c < k; ++c) {
    const double total = std::accumulate(nearest.begin(), nearest.end(), 0.0);
    std::size_t pick = n;
    if (total > 0.0) {
      const double target = uniform01(rng) * total;
      double cumulative = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        cumulative += nearest[i];
        if (nearest[i] > 0.0 && cumulative > target) {
          pick = i;
          break;
        }
      }
      if (pick == n) {  // rounding at the tail
        for (std::size_t i = n; i-- > 0;) {
          if (nearest[i] > 0.0) {
            pick = i;
            break;
          }
        }
      }
    } else {
      // Fewer distinct points than k: duplicate the first unchosen point.
      for (std::size_t i = 0; i < n; ++i) {
        if (!chosen[i]) {
          pick = i;
          break;
        }
      }
    }
    take(pick);
    std::span<const double> added{centroids.data() + static_cast<std::size_t>(c) * p, p};
    for (std::size_t i = 0; i < n; ++i) nearest[i] = std::min(nearest[i], squared_distance(f.row(i), added));
  }
  return centroids;
}

}  // namespace

double within_cluster_ss(const FeatureMatrix& f, const Labels& labels) {
  const std::size_t n = f.order.size();
  const std::size_t p = f.dims;
  int clusters = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
  std::vector<double> sums(static_cast<std::size_t>(clusters) * p, 0.0);
  std::vector<double> counts(static_cast<std::size_t>(clusters), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    auto r = f.row(i);
    for (std::size_t t = 0; t < p; ++t) sums[labels[i] * p + t] += r[t];
    counts[labels[i]] += 1.0;
  }
  for (std::size_t c = 0; c < counts.size(); ++c) {
    for (std::size_t t = 0; t < p; ++t) {
      if (counts[c] > 0) sums[c * p + t] /= counts[c];
    }
  }
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += squared_distance(f.row(i), {sums.data() + labels[i] * p, p});
  return total;
}

KMeansResult kmeans(const FeatureMatrix& f, int k, std::uint64_t seed, int max_iter) {
  const std::size_t n = f.order.size();
  check_k(k, n);
  if (max_iter < 1) throw Error(ErrorCode::InvalidParameter, "max_iter must be positive");
  for (double v : f.rows) {
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidParameter, "features must be finite");
  }

  const std::size_t p = f.dims;
  const auto kk = static_cast<std::size_t>(k);
  std::mt19937_64 rng(seed);
  std::vector<double> centroids = seed_plus_plus(f, k, rng);

  KMeansResult result;
  Labels labels(n, -1);
  std::vector<double> dist(n);
  std::vector<int> sizes(kk);

  for (int iter = 0; iter < max_iter; ++iter) {
    Labels next(n);
    std::fill(sizes.begin(), sizes.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      int arg = 0;
      for (std::size_t c = 0; c < kk; ++c) {
        double dd = squared_distance(f.row(i), {centroids.data() + c * p, p});
        if (dd < best) {
          best = dd;
          arg = static_cast<int>(c);
        }
      }
      next[i] = arg;
      dist[i] = best;
      ++sizes[arg];
    }

    for (std::size_t c = 0; c < kk; ++c) {
      if (sizes[c] > 0) continue;
      std::size_t donor = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (sizes[next[i]] > 1 && (donor == n || dist[i] > dist[donor])) donor = i;
      }
      --sizes[next[donor]];
      next[donor] = static_cast<int>(c);
      sizes[c] = 1;
      dist[donor] = 0.0;
    }

    const bool changed = next != labels;
    labels = std::move(next);

    std::fill(centroids.begin(), centroids.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      auto r = f.row(i);
      for (std::size_t t = 0; t < p; ++t) centroids[labels[i] * p + t] += r[t];
    }
    for (std::size_t c = 0; c < kk; ++c) {
      for (std::size_t t = 0; t < p; ++t) centroids[c * p + t] /= sizes[c];
    }

    double wcss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      wcss += squared_distance(f.row(i), {centroids.data() + labels[i] * p, p});
    }
    result.wcss_history.push_back(wcss);
    result.iterations = iter + 1;
    if (!changed) break;
  }
  result.labels = std::move(labels);
  return result;
}

std::vector<int> finite_blocks(const DistanceMatrix& d) {
  const std::size_t n = d.size();
  std::vector<int> block(n, -1);
  int next = 0;
  std::vector<std::size_t> stack;
  for (std::size_t s = 0; s < n; ++s) {
    if (block[s] >= 0) continue;
    block[s] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      std::size_t i = stack.back();
      stack.pop_back();
      for (std::size_t j = 0; j < n; ++j) {
        if (block[j] < 0 && std::isfinite(d(i, j))) {
          block[j] = next;
          stack.push_back(j);
        }
      }
    }
    ++next;
  }
  return block;
}

double medoid_cost(const DistanceMatrix& d, const std::vector<std::size_t>& medoids) {
  double total = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    double best = kInfinity;
    for (auto m : medoids) best = std::min(best, d(i, m));
    total += best;
  }
  return total;
}

KMedoidsResult kmedoids(const DistanceMatrix& d, int k, std::uint64_t /*seed*/, int max_iter) {
  const std::size_t n = d.size();
  check_k(k, n);
  if (max_iter < 0) throw Error(ErrorCode::InvalidParameter, "max_iter must be nonnegative");

  const std::vector<int> block = finite_blocks(d);
  const int block_count = n ? *std::max_element(block.begin(), block.end()) + 1 : 0;
  if (k < block_count) {
    throw Error(ErrorCode::InfeasibleClusterCount,
                "k=" + std::to_string(k) + " is below the " + std::to_string(block_count) +
                    " infinity-separated blocks");
  }

  // BUILD, part 1: the 1-medoid of each block.
  std::vector<std::size_t> medoids;
  std::vector<bool> is_medoid(n, false);
  for (int b = 0; b < block_count; ++b) {
    std::size_t best = n;
    double best_sum = kInfinity;
    for (std::size_t i = 0; i < n; ++i) {
      if (block[i] != b) continue;
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (block[j] == b) s += d(i, j);
      }
      if (best == n || s < best_sum) {
        best = i;
        best_sum = s;
      }
    }
    medoids.push_back(best);
    is_medoid[best] = true;
  }
  std::vector<double> nearest(n, kInfinity);
  for (std::size_t j = 0; j < n; ++j) {
    for (auto m : medoids) nearest[j] = std::min(nearest[j], d(j, m));
  }

  // BUILD, part 2: greedy additions by largest total reduction.
  while (medoids.size() < static_cast<std::size_t>(k)) {
    std::size_t best = n;
    double best_gain = -1.0;
    for (std::size_t c = 0; c < n; ++c) {
      if (is_medoid[c]) continue;
      double gain = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double dc = d(j, c);
        if (dc < nearest[j]) gain += nearest[j] - dc;
      }
      if (gain > best_gain) {
        best_gain = gain;
        best = c;
      }
    }
    medoids.push_back(best);
    is_medoid[best] = true;
    for (std::size_t j = 0; j < n; ++j) nearest[j] = std::min(nearest[j], d(j, best));
  }

  KMedoidsResult result;
  result.build_cost = std::accumulate(nearest.begin(), nearest.end(), 0.0);
  double cost = result.build_cost;
  result.cost_history.push_back(cost);

  // SWAP, evaluating every candidate against all medoids in one pass.
  const std::size_t kk = medoids.size();
  std::vector<std::size_t> near_slot(n);
  std::vector<double> dn(n), ds(n), delta(kk);
  for (int iter = 0; iter < max_iter; ++iter) {
    for (std::size_t o = 0; o < n; ++o) {
      dn[o] = ds[o] = kInfinity;
      near_slot[o] = 0;
      for (std::size_t s = 0; s < kk; ++s) {
        const double dd = d(o, medoids[s]);
        if (dd < dn[o]) {
          ds[o] = dn[o];
          dn[o] = dd;
          near_slot[o] = s;
        } else if (dd < ds[o]) {
          ds[o] = dd;
        }
      }
    }

    double best_delta = 0.0;
    std::size_t best_slot = kk, best_candidate = n;
    const double tolerance = 1e-12 * std::max(1.0, cost);
    for (std::size_t c = 0; c < n; ++c) {
      if (is_medoid[c]) continue;
      double shared = 0.0;
      std::fill(delta.begin(), delta.end(), 0.0);
      for (std::size_t o = 0; o < n; ++o) {
        const double doc = d(o, c);
        const double gain_if_kept = std::min(doc - dn[o], 0.0);
        shared += gain_if_kept;
        delta[near_slot[o]] += (std::min(ds[o], doc) - dn[o]) - gain_if_kept;
      }
      for (std::size_t s = 0; s < kk; ++s) {
        if (block[medoids[s]] != block[c]) continue;
        const double total = shared + delta[s];
        if (total < best_delta - tolerance) {
          best_delta = total;
          best_slot = s;
          best_candidate = c;
        }
      }
    }
    if (best_slot == kk) break;

    is_medoid[medoids[best_slot]] = false;
    medoids[best_slot] = best_candidate;
    is_medoid[best_candidate] = true;
    cost = medoid_cost(d, medoids);
    result.cost_history.push_back(cost);
  }

  std::sort(medoids.begin(), medoids.end());
  result.labels.assign(n, 0);
  for (std::size_t o = 0; o < n; ++o) {
    double best = kInfinity;
    for (std::size_t s = 0; s < kk; ++s) {
      const double dd = d(o, medoids[s]);
      if (dd < best) {
        best = dd;
        result.labels[o] = static_cast<int>(s);
      }
    }
  }
  result.medoids = std::move(medoids);
  result.cost = cost;
  return result;
}

DbscanResult dbscan(const DistanceMatrix& d, double eps, int min_pts) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw Error(ErrorCode::InvalidParameter, "eps must be positive and finite");
  if (min_pts < 1) throw Error(ErrorCode::InvalidParameter, "min_pts must be at least 1");
  const std::size_t n = d.size();

  auto neighbors = [&](std::size_t i) {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < n; ++j) {
      if (d(i, j) <= eps) out.push_back(j);
    }
    return out;
  };

  constexpr int kUnvisited = -2;
  constexpr int kNoise = -1;
  std::vector<int> label(n, kUnvisited);
  int cluster = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (label[i] != kUnvisited) continue;
    auto seeds = neighbors(i);
    if (seeds.size() < static_cast<std::size_t>(min_pts)) {
      label[i] = kNoise;
      continue;
    }
    label[i] = cluster;
    for (std::size_t q = 0; q < seeds.size(); ++q) {
      const std::size_t j = seeds[q];
      if (label[j] == kNoise) label[j] = cluster;  // border point
      if (label[j] != kUnvisited) continue;
      label[j] = cluster;
      auto more = neighbors(j);
      if (more.size() >= static_cast<std::size_t>(min_pts)) {
        seeds.insert(seeds.end(), more.begin(), more.end());
      }
    }
    ++cluster;
  }

  DbscanResult result;
  result.density_clusters = cluster;
  result.labels.resize(n);
  int next = cluster;
  for (std::size_t i = 0; i < n; ++i) {
    if (label[i] == kNoise) {
      result.noise.push_back(i);
      result.labels[i] = next++;
    } else {
      result.labels[i] = label[i];
    }
  }
  return result;
}

std::string_view to_string(Linkage linkage) noexcept {
  switch (linkage) {
    case Linkage::Single: return "single";
    case Linkage::Complete: return "complete";
    case Linkage::Average: return "average";
    case Linkage::Ward: return "ward";
  }
  return "single";
}

Labels agglomerative(const DistanceMatrix& d, int k, Linkage linkage) {
  const std::size_t n = d.size();
  check_k(k, n);

  // Active clusters live at the slot of their smallest member, so slot order
  // is the tie-break order.
  std::vector<double> dis(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double v = d(i, j);
      dis[i * n + j] = linkage == Linkage::Ward ? v * v : v;
    }
  }
  auto at = [&](std::size_t i, std::size_t j) -> double& { return dis[i * n + j]; };

  std::vector<bool> active(n, true);
  std::vector<double> size(n, 1.0);
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);

  // Row cache: best partner j > i for each active i.
  std::vector<std::size_t> best_j(n, n);
  std::vector<double> best_d(n, kInfinity);
  auto rescan = [&](std::size_t i) {
    best_j[i] = n;
    best_d[i] = kInfinity;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!active[j]) continue;
      if (best_j[i] == n || at(i, j) < best_d[i]) {
        best_j[i] = j;
        best_d[i] = at(i, j);
      }
    }
  };
  for (std::size_t i = 0; i < n; ++i) rescan(i);

  for (std::size_t clusters = n; clusters > static_cast<std::size_t>(k); --clusters) {
    std::size_t a = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (!active[i] || best_j[i] == n) continue;
      if (a == n || best_d[i] < best_d[a]) a = i;
    }
    const std::size_t b = best_j[a];
    const double dab = best_d[a];
    if (!std::isfinite(dab)) {
      throw Error(ErrorCode::InfeasibleClusterCount,
                  "cannot reach k=" + std::to_string(k) + " clusters without merging across +inf; " +
                      std::to_string(clusters) + " blocks remain");
    }

    const double na = size[a], nb = size[b];
    for (std::size_t x = 0; x < n; ++x) {
      if (!active[x] || x == a || x == b) continue;
      const double dax = at(a, x), dbx = at(b, x);
      double merged = 0.0;
      switch (linkage) {
        case Linkage::Single: merged = std::min(dax, dbx); break;
        case Linkage::Complete: merged = std::max(dax, dbx); break;
        case Linkage::Average: merged = (na * dax + nb * dbx) / (na + nb); break;
        case Linkage::Ward: {
          const double nx = size[x];
          merged = ((na + nx) * dax + (nb + nx) * dbx - nx * dab) / (na + nb + nx);
          break;
        }
      }
      at(a, x) = at(x, a) = merged;
    }
    active[b] = false;
    size[a] = na + nb;
    parent[b] = a;

    rescan(a);
    for (std::size_t i = 0; i < a; ++i) {
      if (!active[i]) continue;
      if (best_j[i] == a || best_j[i] == b) {
        rescan(i);
      } else if (at(i, a) < best_d[i] || (at(i, a) == best_d[i] && a < best_j[i])) {
        best_j[i] = a;
        best_d[i] = at(i, a);
      }
    }
    for (std::size_t i = a + 1; i < b; ++i) {
      if (active[i] && best_j[i] == b) rescan(i);
    }
  }

  // Resolve each point to its surviving slot; number clusters by slot.
  auto root = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x];
    return x;
  };
  std::vector<int> slot_label(n, -1);
  int next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (active[i]) slot_label[i] = next++;
  }
  Labels labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = slot_label[root(i)];
  return labels;
}

std::vector<int> allocate_cluster_budget(const std::vector<int>& group_sizes, int k) {
  const std::size_t groups = group_sizes.size();
  long long total = 0;
  for (int s : group_sizes) {
    if (s < 1) throw Error(ErrorCode::InvalidParameter, "group sizes must be positive");
    total += s;
  }
  if (k < 1 || k > total) {
    throw Error(ErrorCode::InvalidK, "k=" + std::to_string(k) + " must lie in [1, " + std::to_string(total) + "]");
  }
  if (static_cast<std::size_t>(k) < groups) {
    throw Error(ErrorCode::InfeasibleClusterCount,
                "k=" + std::to_string(k) + " is below the group count " + std::to_string(groups));
  }

  std::vector<double> quota(groups);
  std::vector<int> alloc(groups);
  long long assigned = 0;
  for (std::size_t g = 0; g < groups; ++g) {
    quota[g] = static_cast<double>(k) * group_sizes[g] / static_cast<double>(total);
    alloc[g] = std::clamp(static_cast<int>(std::floor(quota[g])), 1, group_sizes[g]);
    assigned += alloc[g];
  }
  while (assigned < k) {
    std::size_t best = groups;
    for (std::size_t g = 0; g < groups; ++g) {
      if (alloc[g] >= group_sizes[g]) continue;
      if (best == groups || quota[g] - alloc[g] > quota[best] - alloc[best]) best = g;
    }
    ++alloc[best];
    ++assigned;
  }
  while (assigned > k) {
    std::size_t best = groups;
    for (std::size_t g = 0; g < groups; ++g) {
      if (alloc[g] <= 1) continue;
      if (best == groups || quota[g] - alloc[g] < quota[best] - alloc[best]) best = g;
    }
    --alloc[best];
    --assigned;
  }
  return alloc;
}

}  // namespace netreduce
