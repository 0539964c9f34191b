#include <charconv>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "cparls/errors.hpp"
#include "cparls/sparse_tensor.hpp"

namespace cparls {
namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

// Splits on whitespace into `tokens`; returns false for blank/comment lines.
bool tokenize(const std::string& line, std::vector<std::string_view>& tokens) {
  tokens.clear();
  const char* p = line.data();
  const char* end = p + line.size();
  while (p < end && is_space(*p)) ++p;
  if (p == end || *p == '#') return false;
  while (p < end) {
    const char* start = p;
    while (p < end && !is_space(*p)) ++p;
    tokens.emplace_back(start, static_cast<std::size_t>(p - start));
    while (p < end && is_space(*p)) ++p;
  }
  return true;
}

[[noreturn]] void malformed(std::size_t line_no, const std::string& why) {
  throw DataError("line " + std::to_string(line_no) + ": " + why);
}

}  // namespace

FrosttReadResult parse_frostt(std::istream& in, const FrosttReadOptions& opts) {
  std::vector<index_t> coords;
  std::vector<double> values;
  std::vector<index_t> maxima;
  std::size_t order = 0;
  std::size_t dropped = 0;
  bool saw_data = false;

  std::string line;
  std::vector<std::string_view> tokens;
  std::vector<index_t> row;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!tokenize(line, tokens)) continue;
    if (!saw_data) {
      if (tokens.size() < 2) malformed(line_no, "expected at least one coordinate and a value");
      order = tokens.size() - 1;
      maxima.assign(order, 0);
      saw_data = true;
      if (opts.shape && opts.shape->size() != order) {
        malformed(line_no, "has " + std::to_string(order) + " coordinates but the explicit shape has " +
                               std::to_string(opts.shape->size()) + " modes");
      }
    }
    if (tokens.size() != order + 1) {
      malformed(line_no, "expected " + std::to_string(order + 1) + " tokens, found " +
                             std::to_string(tokens.size()));
    }
    row.resize(order);
    for (std::size_t k = 0; k < order; ++k) {
      const std::string_view tok = tokens[k];
      index_t c = 0;
      auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), c);
      if (ec != std::errc() || ptr != tok.data() + tok.size()) {
        malformed(line_no, "non-integer coordinate '" + std::string(tok) + "'");
      }
      if (c < 1) malformed(line_no, "coordinate " + std::to_string(c) + " is below 1");
      if (opts.shape && c > (*opts.shape)[k]) {
        malformed(line_no, "coordinate " + std::to_string(c) + " exceeds mode size " +
                               std::to_string((*opts.shape)[k]));
      }
      row[k] = c - 1;
    }
    const std::string_view vtok = tokens[order];
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(vtok.data(), vtok.data() + vtok.size(), v);
    if (ec != std::errc() || ptr != vtok.data() + vtok.size()) {
      malformed(line_no, "non-numeric value '" + std::string(vtok) + "'");
    }
    for (std::size_t k = 0; k < order; ++k) maxima[k] = std::max(maxima[k], row[k] + 1);
    if (v == 0.0) {
      ++dropped;
      continue;
    }
    coords.insert(coords.end(), row.begin(), row.end());
    values.push_back(v);
  }
  if (!saw_data) throw DataError("empty tensor input");

  std::vector<index_t> shape = opts.shape ? *opts.shape : maxima;
  FrosttReadResult result;
  result.tensor = SparseTensor(std::move(shape), std::move(coords), std::move(values));
  result.dropped_zeros = dropped;
  return result;
}

FrosttReadResult read_frostt_file(const std::string& path, const FrosttReadOptions& opts) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open tensor file '" + path + "'");
  return parse_frostt(in, opts);
}

void write_frostt(std::ostream& out, const SparseTensor& t) {
  char buf[64];
  std::string line;
  for (std::size_t e = 0; e < t.nnz(); ++e) {
    line.clear();
    for (int k = 0; k < t.order(); ++k) {
      auto [p, ec] = std::to_chars(buf, buf + sizeof buf, t.coord(e, k) + 1);
      line.append(buf, p);
      line.push_back(' ');
    }
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, t.values()[e]);
    line.append(buf, p);
    line.push_back('\n');
    out << line;
  }
}

}  // namespace cparls
