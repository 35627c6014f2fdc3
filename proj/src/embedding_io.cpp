#include <cstdio>
#include <fstream>
#include <sstream>

#include "flatstruct/skipgram.hpp"

namespace flatstruct {

void write_embeddings(const Graph& g, const EmbeddingMatrix& emb, std::ostream& out) {
  if (emb.node_count() != g.node_count()) {
    throw std::invalid_argument("embedding does not match the graph's node count");
  }
  out << emb.node_count() << ' ' << emb.dim << '\n';
  char buf[32];
  for (NodeId v = 0; v < emb.node_count(); ++v) {
    out << g.label(v);
    for (double x : emb.row(v)) {
      std::snprintf(buf, sizeof buf, "%.9g", x);
      out << ' ' << buf;
    }
    out << '\n';
  }
}

void save_embeddings(const Graph& g, const EmbeddingMatrix& emb, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_embeddings(g, emb, out);
}

LoadedEmbedding read_embeddings(std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw ParseError("embedding file is empty");
  std::istringstream header(line);
  std::size_t count = 0, dim = 0;
  std::string extra;
  if (!(header >> count >> dim) || (header >> extra) || dim == 0) {
    throw ParseError("embedding line 1: expected header \"<count> <dimension>\"");
  }
  LoadedEmbedding out;
  out.matrix.dim = dim;
  out.matrix.values.reserve(count * dim);
  out.labels.reserve(count);
  while (out.labels.size() < count) {
    ++line_no;
    if (!std::getline(in, line)) {
      throw ParseError("embedding line " + std::to_string(line_no) + ": file ends after " +
                       std::to_string(out.labels.size()) + " of " + std::to_string(count) +
                       " rows");
    }
    std::istringstream row(line);
    std::string label;
    if (!(row >> label)) {
      throw ParseError("embedding line " + std::to_string(line_no) + ": empty row");
    }
    std::size_t got = 0;
    double x;
    while (row >> x) {
      out.matrix.values.push_back(x);
      ++got;
    }
    if (got != dim || !row.eof()) {
      throw ParseError("embedding line " + std::to_string(line_no) + ": expected " +
                       std::to_string(dim) + " values");
    }
    out.labels.push_back(std::move(label));
  }
  return out;
}

LoadedEmbedding load_embeddings(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read embedding file " + path);
  return read_embeddings(in);
}

}  // namespace flatstruct
