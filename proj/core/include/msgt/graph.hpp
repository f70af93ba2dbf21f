#pragma once

#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "msgt/tensor.hpp"

namespace msgt {

// Gene-symbol vocabulary with dense 0-based ids. Symbols are case-sensitive
// exact strings; no alias resolution.
class GeneVocab {
 public:
  int add(const std::string& name);               // returns existing id if known
  std::optional<int> find(const std::string& name) const;
  int id_of(const std::string& name) const;       // throws on unknown symbol
  const std::string& name_of(int id) const;
  int size() const { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& names() const { return names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, int> index_;
};

// Undirected simple graph over one vocabulary. Edges are stored once as
// ordered (lo, hi) pairs; adjacency lists are sorted and deduplicated so every
// traversal is reproducible.
class GeneGraph {
 public:
  GeneGraph() = default;
  explicit GeneGraph(GeneVocab vocab);

  GeneVocab& vocab() { return vocab_; }
  const GeneVocab& vocab() const { return vocab_; }
  int node_count() const { return vocab_.size(); }
  int edge_count() const { return static_cast<int>(edges_.size()); }

  // Returns false (not an error) when the edge is a duplicate or a self-loop.
  bool add_edge(int a, int b);
  bool has_edge(int a, int b) const;
  const std::set<std::pair<int, int>>& edges() const { return edges_; }
  const std::vector<int>& adjacency(int id) const;

  // Called after vocab changes so adjacency covers every node.
  void sync_vocab();

 private:
  GeneVocab vocab_;
  std::set<std::pair<int, int>> edges_;
  std::vector<std::vector<int>> adj_;
};

struct LoadStats {
  std::size_t self_loops_dropped = 0;
  std::size_t duplicates_collapsed = 0;
};

// Reads a whitespace-separated edge list (two gene symbols per line, `#`
// comments ignored). vocab may carry symbols from a previously loaded view so
// ids stay aligned; pass an empty GeneVocab for a fresh one.
GeneGraph load_view(std::istream& in, const std::string& source_name,
                    GeneVocab vocab = GeneVocab(), LoadStats* stats = nullptr);
GeneGraph load_view_file(const std::string& path, GeneVocab vocab = GeneVocab(),
                         LoadStats* stats = nullptr);

// SL view plus omics views over a shared global id space. The SL view is
// always views()[0]; its genes are the core set between which SL edges are
// predicted.
class MultiViewGraph {
 public:
  MultiViewGraph(GeneGraph sl, std::vector<GeneGraph> omics);

  int view_count() const { return static_cast<int>(views_.size()); }
  const GeneGraph& view(int i) const { return views_.at(i); }
  const GeneGraph& sl_view() const { return views_.front(); }
  const GeneVocab& global_vocab() const { return global_; }
  int global_size() const { return global_.size(); }

  // membership(i) is a boolean vector over global ids.
  const std::vector<bool>& membership(int view) const { return membership_.at(view); }
  bool in_view(int view, int global_id) const { return membership_.at(view)[global_id]; }

  // Global id -> view-local id, -1 when the gene is absent from the view.
  int to_local(int view, int global_id) const { return global_to_local_.at(view)[global_id]; }
  // View-local id -> global id.
  int to_global(int view, int local_id) const { return local_to_global_.at(view)[local_id]; }
  const std::vector<int>& local_to_global(int view) const { return local_to_global_.at(view); }

 private:
  std::vector<GeneGraph> views_;
  GeneVocab global_;
  std::vector<std::vector<bool>> membership_;
  std::vector<std::vector<int>> global_to_local_;
  std::vector<std::vector<int>> local_to_global_;
};

MultiViewGraph build_multiview(GeneGraph sl, std::vector<GeneGraph> omics);

// Per-gene feature rows aligned to a global vocabulary. Missing values are
// zeroed on ingestion; z-scoring is applied explicitly before training.
class FeatureTable {
 public:
  FeatureTable() = default;
  FeatureTable(int genes, int dim) : data_(genes, dim) {}

  int gene_count() const { return data_.rows(); }
  int dim() const { return data_.cols(); }
  Tensor& matrix() { return data_; }
  const Tensor& matrix() const { return data_; }

  // Column-wise z-score with statistics taken over `stat_genes` only (the
  // training genes), applied to every row. Constant columns are centered only.
  void zscore(const std::vector<int>& stat_genes);

 private:
  Tensor data_;
};

// Parses `gene,f1,...,fD0` CSV; rows are reordered to match `vocab`. Genes in
// the vocab but absent from the file get zero rows (counted in
// `missing_genes`); file genes outside the vocab are ignored.
FeatureTable load_features(std::istream& in, const std::string& source_name,
                           const GeneVocab& vocab, std::size_t* missing_genes = nullptr);
FeatureTable load_features_file(const std::string& path, const GeneVocab& vocab,
                                std::size_t* missing_genes = nullptr);

// Symmetric GCN normalization with self-loops: D^{-1/2} (A + I) D^{-1/2}
// where D is the degree of (A + I).
Tensor normalized_adjacency(const GeneGraph& g);
SparseMatrix normalized_adjacency_sparse(const GeneGraph& g);

// Raw degrees (no self-loops), the transition-probability denominators.
std::vector<int> degree_vector(const GeneGraph& g);

// Sorted, deduplicated neighbor list; throws on out-of-range ids.
const std::vector<int>& neighbors(const GeneGraph& g, int id);

}  // namespace msgt
