#pragma once

#include <string>
#include <vector>

#include "vlmd/types.hpp"

//
// Agglomerative clustering of channels, used to read structure out of a
// decomposition: coefficient profiles (columns of A) under Euclidean
// distance, or per-mode channel series under correlation distance
// d = 1 - pearson (range [0,2]). Cluster-pair distances are recomputed as
// flat sums over the original pairwise distances (lexicographic member
// order), so merge heights are exact, not recurrence-accumulated; O(N^3)
// overall, fine for a few thousand leaves.
//

namespace vlmd {

enum class Linkage { kAverage, kSingle, kComplete };

struct Merge {
  int cluster_a = 0;  // scipy-style ids: leaves 0..N-1, merge i forms N+i
  int cluster_b = 0;
  double height = 0.0;
  int size = 0;  // leaves in the merged cluster
};

struct Dendrogram {
  std::vector<Merge> merges;  // N-1 entries, non-decreasing heights
  std::vector<std::string> leaf_labels;
};

struct ClusterDiagnostics {
  std::vector<int> zero_variance_channels;
};

// Core agglomeration over a symmetric distance matrix (diagonal ignored).
// Ties broken toward the lowest (a, b) pair.
Dendrogram agglomerate(const Matrix& distances,
                       const std::vector<std::string>& labels,
                       Linkage linkage = Linkage::kAverage);

// Channels clustered by their latent-coefficient profiles (columns of A).
Dendrogram cluster_coefficients(const CoefficientMatrix& A,
                                const std::vector<std::string>& labels,
                                Linkage linkage = Linkage::kAverage);

// Channels clustered by one intrinsic mode's series (T x C). Zero-variance
// channels sit at distance 1 from everything and are reported.
Dendrogram cluster_modes(const Matrix& mode, const std::vector<std::string>& labels,
                         Linkage linkage = Linkage::kAverage,
                         ClusterDiagnostics* diagnostics = nullptr);

// Newick serialization with branch lengths; max_leaves > 0 truncates to the
// subtrees below that many tips (each truncated subtree becomes one tip
// labeled with its leaf count).
std::string to_newick(const Dendrogram& d, int max_leaves = 0);

}  // namespace vlmd
