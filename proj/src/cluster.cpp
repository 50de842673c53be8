#include "vlmd/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vlmd/metrics.hpp"

namespace vlmd {

namespace {

struct ActiveCluster {
  int id = 0;                // scipy-style id
  std::vector<int> members;  // sorted leaf indices
};

// Canonical cluster-pair distance: flat reduction over original pairwise
// distances, outer loop over the cluster holding the smaller leading member.
// The oracle in the tests implements the same convention independently, so
// heights can be compared exactly.
double pair_distance(const Matrix& d0, const std::vector<int>& a,
                     const std::vector<int>& b, Linkage linkage) {
  const std::vector<int>* first = &a;
  const std::vector<int>* second = &b;
  if (first->front() > second->front()) std::swap(first, second);
  double acc = linkage == Linkage::kSingle
                   ? std::numeric_limits<double>::infinity()
                   : (linkage == Linkage::kComplete ? 0.0 : 0.0);
  for (int i : *first) {
    for (int j : *second) {
      const double d = d0(i, j);
      switch (linkage) {
        case Linkage::kAverage:
          acc += d;
          break;
        case Linkage::kSingle:
          acc = std::min(acc, d);
          break;
        case Linkage::kComplete:
          acc = std::max(acc, d);
          break;
      }
    }
  }
  if (linkage == Linkage::kAverage)
    acc /= static_cast<double>(first->size() * second->size());
  return acc;
}

}  // namespace

Dendrogram agglomerate(const Matrix& distances,
                       const std::vector<std::string>& labels,
                       Linkage linkage) {
  const int n = static_cast<int>(distances.rows());
  if (distances.cols() != n)
    throw DimensionError("agglomerate: distance matrix must be square");
  if (n < 2) throw DimensionError("agglomerate: need at least 2 items");
  if (!distances.allFinite())
    throw InvalidInputError("agglomerate: non-finite distance");
  if (!labels.empty() && static_cast<int>(labels.size()) != n)
    throw DimensionError("agglomerate: label count mismatch");

  Dendrogram out;
  out.leaf_labels = labels;
  if (out.leaf_labels.empty())
    for (int i = 0; i < n; ++i)
      out.leaf_labels.push_back("item_" + std::to_string(i + 1));

  std::vector<ActiveCluster> active(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    active[static_cast<size_t>(i)].id = i;
    active[static_cast<size_t>(i)].members = {i};
  }

  // Pairwise distances over the active list, refreshed only for the merged
  // cluster's row each step.
  std::vector<std::vector<double>> dist(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    dist[static_cast<size_t>(i)].resize(static_cast<size_t>(n), 0.0);
    for (int j = 0; j < n; ++j)
      if (i != j) dist[static_cast<size_t>(i)][static_cast<size_t>(j)] = distances(i, j);
  }

  int next_id = n;
  while (active.size() > 1) {
    size_t best_i = 0, best_j = 1;
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i + 1 < active.size(); ++i) {
      for (size_t j = i + 1; j < active.size(); ++j) {
        const double d = dist[i][j];
        if (d < best) {
          best = d;
          best_i = i;
          best_j = j;
        }
      }
    }

    ActiveCluster merged;
    merged.id = next_id++;
    merged.members = active[best_i].members;
    merged.members.insert(merged.members.end(), active[best_j].members.begin(),
                          active[best_j].members.end());
    std::sort(merged.members.begin(), merged.members.end());
    out.merges.push_back({std::min(active[best_i].id, active[best_j].id),
                          std::max(active[best_i].id, active[best_j].id), best,
                          static_cast<int>(merged.members.size())});

    // Drop the two merged rows/cols (higher index first), append the new one.
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(best_j));
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(best_i));
    dist.erase(dist.begin() + static_cast<std::ptrdiff_t>(best_j));
    dist.erase(dist.begin() + static_cast<std::ptrdiff_t>(best_i));
    for (auto& row : dist) {
      row.erase(row.begin() + static_cast<std::ptrdiff_t>(best_j));
      row.erase(row.begin() + static_cast<std::ptrdiff_t>(best_i));
    }
    std::vector<double> new_row(active.size() + 1, 0.0);
    for (size_t i = 0; i < active.size(); ++i) {
      new_row[i] =
          pair_distance(distances, merged.members, active[i].members, linkage);
      dist[i].push_back(new_row[i]);
    }
    active.push_back(std::move(merged));
    dist.push_back(std::move(new_row));
  }
  return out;
}

Dendrogram cluster_coefficients(const CoefficientMatrix& A,
                                const std::vector<std::string>& labels,
                                Linkage linkage) {
  const int c = static_cast<int>(A.cols());
  if (c < 2) throw DimensionError("cluster_coefficients: need >= 2 channels");
  Matrix d = Matrix::Zero(c, c);
  for (int i = 0; i < c; ++i)
    for (int j = i + 1; j < c; ++j)
      d(i, j) = d(j, i) = (A.col(i) - A.col(j)).norm();
  return agglomerate(d, labels, linkage);
}

Dendrogram cluster_modes(const Matrix& mode, const std::vector<std::string>& labels,
                         Linkage linkage, ClusterDiagnostics* diagnostics) {
  const int c = static_cast<int>(mode.cols());
  if (c < 2) throw DimensionError("cluster_modes: need >= 2 channels");
  if (mode.rows() < 3) throw InvalidInputError("cluster_modes: need T >= 3");

  std::vector<bool> flat(static_cast<size_t>(c), false);
  for (int i = 0; i < c; ++i) {
    const double var = (mode.col(i).array() - mode.col(i).mean()).square().sum();
    flat[static_cast<size_t>(i)] = var <= 0.0;
  }
  if (diagnostics) {
    diagnostics->zero_variance_channels.clear();
    for (int i = 0; i < c; ++i)
      if (flat[static_cast<size_t>(i)])
        diagnostics->zero_variance_channels.push_back(i);
  }

  Matrix d = Matrix::Zero(c, c);
  for (int i = 0; i < c; ++i) {
    for (int j = i + 1; j < c; ++j) {
      double dij;
      if (flat[static_cast<size_t>(i)] || flat[static_cast<size_t>(j)])
        dij = 1.0;  // zero-variance channels carry no correlation signal
      else
        dij = 1.0 - pearson(mode.col(i), mode.col(j));
      d(i, j) = d(j, i) = dij;
    }
  }
  return agglomerate(d, labels, linkage);
}

namespace {

struct TreeNode {
  int id;
  double height;
  int leaf_count;
  int left = -1;   // indices into the node pool, -1 for leaves
  int right = -1;
  int leaf = -1;   // leaf index when a tip
};

std::string sanitize(const std::string& s) {
  std::string out = s;
  for (char& ch : out)
    if (ch == ',' || ch == '(' || ch == ')' || ch == ':' || ch == ';' ||
        ch == ' ')
      ch = '_';
  return out;
}

void write_newick(const std::vector<TreeNode>& pool,
                  const std::vector<std::string>& labels, int node,
                  double parent_height, int cut_below, std::string& out) {
  const TreeNode& nd = pool[static_cast<size_t>(node)];
  const bool tip = nd.leaf >= 0 || node < cut_below;
  if (!tip) {
    out += '(';
    write_newick(pool, labels, nd.left, nd.height, cut_below, out);
    out += ',';
    write_newick(pool, labels, nd.right, nd.height, cut_below, out);
    out += ')';
  } else if (nd.leaf >= 0) {
    out += sanitize(labels[static_cast<size_t>(nd.leaf)]);
  } else {
    // collapsed subtree: representative label plus the hidden leaf count
    int rep = node;
    while (pool[static_cast<size_t>(rep)].leaf < 0)
      rep = pool[static_cast<size_t>(rep)].left;
    out += sanitize(labels[static_cast<size_t>(pool[static_cast<size_t>(rep)].leaf)]);
    out += "+" + std::to_string(nd.leaf_count - 1);
  }
  out += ':';
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", parent_height - nd.height);
  out += buf;
}

}  // namespace

std::string to_newick(const Dendrogram& d, int max_leaves) {
  const int n = static_cast<int>(d.leaf_labels.size());
  if (static_cast<int>(d.merges.size()) != n - 1)
    throw DimensionError("to_newick: merge count inconsistent with leaves");

  std::vector<TreeNode> pool;
  pool.reserve(static_cast<size_t>(2 * n - 1));
  for (int i = 0; i < n; ++i) pool.push_back({i, 0.0, 1, -1, -1, i});
  for (const auto& m : d.merges) {
    TreeNode nd;
    nd.id = n + static_cast<int>(&m - d.merges.data());
    nd.height = m.height;
    nd.left = m.cluster_a;
    nd.right = m.cluster_b;
    nd.leaf_count = m.size;
    pool.push_back(nd);
  }

  // With truncation, every node formed before the cut becomes a tip.
  const int root = static_cast<int>(pool.size()) - 1;
  const int keep_merges =
      (max_leaves > 1 && max_leaves < n) ? max_leaves - 1 : n - 1;
  const int cut_below = static_cast<int>(pool.size()) - keep_merges;

  const TreeNode& r = pool[static_cast<size_t>(root)];
  std::string body;
  if (n == 1) {
    body = sanitize(d.leaf_labels[0]) + ":0";
  } else {
    body += '(';
    write_newick(pool, d.leaf_labels, r.left, r.height, cut_below, body);
    body += ',';
    write_newick(pool, d.leaf_labels, r.right, r.height, cut_below, body);
    body += ')';
  }
  return body + ";";
}

}  // namespace vlmd
