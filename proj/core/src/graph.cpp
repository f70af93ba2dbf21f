#include "msgt/graph.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace msgt {

int GeneVocab::add(const std::string& name) {
  auto it = index_.find(name);
  if (it != index_.end()) return it->second;
  const int id = static_cast<int>(names_.size());
  names_.push_back(name);
  index_.emplace(name, id);
  return id;
}

std::optional<int> GeneVocab::find(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

int GeneVocab::id_of(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw std::out_of_range("unknown gene symbol: " + name);
  return it->second;
}

const std::string& GeneVocab::name_of(int id) const {
  if (id < 0 || id >= size())
    throw std::out_of_range("gene id " + std::to_string(id) + " out of range [0, " +
                            std::to_string(size()) + ")");
  return names_[id];
}

GeneGraph::GeneGraph(GeneVocab vocab) : vocab_(std::move(vocab)) {
  adj_.resize(vocab_.size());
}

void GeneGraph::sync_vocab() {
  if (static_cast<int>(adj_.size()) < vocab_.size()) adj_.resize(vocab_.size());
}

bool GeneGraph::add_edge(int a, int b) {
  if (a < 0 || a >= node_count() || b < 0 || b >= node_count())
    throw std::out_of_range("add_edge: id out of range");
  if (a == b) return false;
  const auto e = std::minmax(a, b);
  if (!edges_.emplace(e.first, e.second).second) return false;
  auto insert_sorted = [](std::vector<int>& v, int x) {
    v.insert(std::lower_bound(v.begin(), v.end(), x), x);
  };
  insert_sorted(adj_[a], b);
  insert_sorted(adj_[b], a);
  return true;
}

bool GeneGraph::has_edge(int a, int b) const {
  if (a == b) return false;
  const auto e = std::minmax(a, b);
  return edges_.count({e.first, e.second}) > 0;
}

const std::vector<int>& GeneGraph::adjacency(int id) const {
  if (id < 0 || id >= node_count())
    throw std::out_of_range("adjacency: gene id " + std::to_string(id) +
                            " out of range [0, " + std::to_string(node_count()) + ")");
  return adj_[id];
}

GeneGraph load_view(std::istream& in, const std::string& source_name, GeneVocab vocab,
                    LoadStats* stats) {
  GeneGraph g(std::move(vocab));
  LoadStats local;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos) continue;
    if (line[start] == '#') continue;
    std::istringstream ls(line);
    std::string a, b, extra;
    if (!(ls >> a >> b))
      throw std::runtime_error(source_name + ":" + std::to_string(line_no) +
                               ": expected two gene symbols, got: " + line);
    if (ls >> extra)
      throw std::runtime_error(source_name + ":" + std::to_string(line_no) +
                               ": trailing content after edge: " + extra);
    const int ia = g.vocab().add(a);
    g.sync_vocab();
    const int ib = g.vocab().add(b);
    g.sync_vocab();
    if (ia == ib) {
      ++local.self_loops_dropped;
      continue;
    }
    if (!g.add_edge(ia, ib)) ++local.duplicates_collapsed;
  }
  if (local.self_loops_dropped > 0)
    std::cerr << "warning: " << source_name << ": dropped " << local.self_loops_dropped
              << " self-loop edge(s)\n";
  if (stats) *stats = local;
  if (g.edge_count() == 0)
    throw std::runtime_error(source_name + ": empty edge set after validation");
  return g;
}

GeneGraph load_view_file(const std::string& path, GeneVocab vocab, LoadStats* stats) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open edge list: " + path);
  return load_view(in, path, std::move(vocab), stats);
}

namespace {

std::string lowered(const std::string& s) {
  std::string out = s;
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

MultiViewGraph::MultiViewGraph(GeneGraph sl, std::vector<GeneGraph> omics) {
  views_.reserve(1 + omics.size());
  views_.push_back(std::move(sl));
  for (auto& o : omics) views_.push_back(std::move(o));

  std::unordered_map<std::string, std::string> casefold;  // lowered -> first spelling
  for (const GeneGraph& v : views_) {
    for (const std::string& name : v.vocab().names()) {
      const std::string low = lowered(name);
      auto it = casefold.find(low);
      if (it == casefold.end()) {
        casefold.emplace(low, name);
      } else if (it->second != name) {
        throw std::runtime_error("gene-name collision with inconsistent casing: '" +
                                 it->second + "' vs '" + name + "'");
      }
      global_.add(name);
    }
  }

  const int n = global_.size();
  membership_.assign(views_.size(), std::vector<bool>(n, false));
  global_to_local_.assign(views_.size(), std::vector<int>(n, -1));
  local_to_global_.resize(views_.size());
  for (std::size_t i = 0; i < views_.size(); ++i) {
    const GeneVocab& vv = views_[i].vocab();
    local_to_global_[i].resize(vv.size());
    for (int local = 0; local < vv.size(); ++local) {
      const int global = global_.id_of(vv.name_of(local));
      membership_[i][global] = true;
      global_to_local_[i][global] = local;
      local_to_global_[i][local] = global;
    }
  }
}

MultiViewGraph build_multiview(GeneGraph sl, std::vector<GeneGraph> omics) {
  if (sl.edge_count() == 0) throw std::runtime_error("build_multiview: SL view is empty");
  return MultiViewGraph(std::move(sl), std::move(omics));
}

void FeatureTable::zscore(const std::vector<int>& stat_genes) {
  if (stat_genes.empty()) throw std::invalid_argument("zscore: no statistics genes");
  const int d = dim();
  std::vector<double> mean(d, 0.0), var(d, 0.0);
  for (int g : stat_genes)
    for (int j = 0; j < d; ++j) mean[j] += data_.at(g, j);
  for (int j = 0; j < d; ++j) mean[j] /= static_cast<double>(stat_genes.size());
  for (int g : stat_genes)
    for (int j = 0; j < d; ++j) {
      const double c = data_.at(g, j) - mean[j];
      var[j] += c * c;
    }
  for (int j = 0; j < d; ++j) {
    var[j] /= static_cast<double>(stat_genes.size());
    if (var[j] <= 0.0) var[j] = 1.0;
  }
  for (int i = 0; i < gene_count(); ++i)
    for (int j = 0; j < d; ++j)
      data_.at(i, j) = (data_.at(i, j) - mean[j]) / std::sqrt(var[j]);
}

FeatureTable load_features(std::istream& in, const std::string& source_name,
                           const GeneVocab& vocab, std::size_t* missing_genes) {
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error(source_name + ": empty feature file");
  // header: gene,f1,...,fD0
  std::vector<std::string> header;
  {
    std::istringstream hs(line);
    std::string field;
    while (std::getline(hs, field, ',')) header.push_back(field);
  }
  if (header.size() < 2 || header[0] != "gene")
    throw std::runtime_error(source_name + ": header must start with 'gene,'");
  const int d0 = static_cast<int>(header.size()) - 1;

  FeatureTable table(vocab.size(), d0);
  std::vector<bool> seen(vocab.size(), false);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string field;
    if (!std::getline(ls, field, ','))
      throw std::runtime_error(source_name + ":" + std::to_string(line_no) + ": bad row");
    const auto id = vocab.find(field);
    int col = 0;
    std::vector<double> row(d0, 0.0);
    while (std::getline(ls, field, ',')) {
      if (col >= d0)
        throw std::runtime_error(source_name + ":" + std::to_string(line_no) +
                                 ": more than " + std::to_string(d0) + " feature fields");
      if (!field.empty()) {
        try {
          std::size_t pos = 0;
          row[col] = std::stod(field, &pos);
          if (pos != field.size()) throw std::invalid_argument(field);
        } catch (const std::exception&) {
          throw std::runtime_error(source_name + ":" + std::to_string(line_no) +
                                   ": non-numeric feature value: " + field);
        }
        if (!std::isfinite(row[col]))
          row[col] = 0.0;  // missing/degenerate values become zero pre-normalization
      }
      ++col;
    }
    if (!id.has_value()) continue;  // gene outside this run's vocabulary
    seen[*id] = true;
    for (int j = 0; j < d0; ++j) table.matrix().at(*id, j) = row[j];
  }
  std::size_t missing = 0;
  for (bool s : seen)
    if (!s) ++missing;
  if (missing_genes) *missing_genes = missing;
  return table;
}

FeatureTable load_features_file(const std::string& path, const GeneVocab& vocab,
                                std::size_t* missing_genes) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open feature file: " + path);
  return load_features(in, path, vocab, missing_genes);
}

Tensor normalized_adjacency(const GeneGraph& g) {
  const int n = g.node_count();
  std::vector<double> inv_sqrt(n);
  for (int i = 0; i < n; ++i)
    inv_sqrt[i] = 1.0 / std::sqrt(static_cast<double>(g.adjacency(i).size()) + 1.0);
  Tensor a(n, n);
  for (int i = 0; i < n; ++i) {
    a.at(i, i) = inv_sqrt[i] * inv_sqrt[i];
    for (int j : g.adjacency(i)) a.at(i, j) = inv_sqrt[i] * inv_sqrt[j];
  }
  return a;
}

SparseMatrix normalized_adjacency_sparse(const GeneGraph& g) {
  const int n = g.node_count();
  std::vector<double> inv_sqrt(n);
  for (int i = 0; i < n; ++i)
    inv_sqrt[i] = 1.0 / std::sqrt(static_cast<double>(g.adjacency(i).size()) + 1.0);
  SparseMatrix s;
  s.rows = n;
  s.cols = n;
  s.row_ptr.assign(n + 1, 0);
  for (int i = 0; i < n; ++i) {
    // column order ascending, diagonal included, matching the dense layout
    const auto& nb = g.adjacency(i);
    std::size_t pos = 0;
    auto push = [&](int j, double v) {
      s.col_idx.push_back(j);
      s.vals.push_back(v);
    };
    while (pos < nb.size() && nb[pos] < i) {
      push(nb[pos], inv_sqrt[i] * inv_sqrt[nb[pos]]);
      ++pos;
    }
    push(i, inv_sqrt[i] * inv_sqrt[i]);
    while (pos < nb.size()) {
      push(nb[pos], inv_sqrt[i] * inv_sqrt[nb[pos]]);
      ++pos;
    }
    s.row_ptr[i + 1] = static_cast<int>(s.col_idx.size());
  }
  return s;
}

std::vector<int> degree_vector(const GeneGraph& g) {
  std::vector<int> d(g.node_count());
  for (int i = 0; i < g.node_count(); ++i) d[i] = static_cast<int>(g.adjacency(i).size());
  return d;
}

const std::vector<int>& neighbors(const GeneGraph& g, int id) { return g.adjacency(id); }

}  // namespace msgt
