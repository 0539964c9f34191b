#include "cparls/kruskal.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "cparls/errors.hpp"

namespace cparls {
namespace {

void write_number(std::string& line, double v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  line.append(buf, p);
}

bool next_content_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    auto pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos || line[pos] == '#') continue;
    return true;
  }
  return false;
}

std::vector<double> parse_numbers(const std::string& line) {
  std::vector<double> out;
  const char* p = line.data();
  const char* end = p + line.size();
  while (p < end) {
    while (p < end && (*p == ' ' || *p == '\t' || *p == '\r')) ++p;
    if (p == end) break;
    double v = 0.0;
    auto [q, ec] = std::from_chars(p, end, v);
    if (ec != std::errc() || (q < end && *q != ' ' && *q != '\t' && *q != '\r')) {
      throw DataError("malformed number in model file: '" + line + "'");
    }
    out.push_back(v);
    p = q;
  }
  return out;
}

}  // namespace

double KruskalModel::value_at(std::span<const index_t> multi) const {
  double sum = 0.0;
  for (int j = 0; j < rank(); ++j) {
    double prod = lambda(j);
    for (int k = 0; k < order(); ++k) prod *= factors[k](multi[k], j);
    sum += prod;
  }
  return sum;
}

void KruskalModel::normalize() {
  for (Matrix& a : factors) lambda.array() *= normalize_columns(a).array();
}

void KruskalModel::validate() const {
  if (factors.empty()) throw DataError("model has no factors");
  if (!lambda.allFinite()) throw DataError("model weights are not finite");
  for (std::size_t k = 0; k < factors.size(); ++k) {
    if (factors[k].cols() != lambda.size()) {
      throw DataError("factor " + std::to_string(k) + " has " + std::to_string(factors[k].cols()) +
                      " columns, expected " + std::to_string(lambda.size()));
    }
    if (!factors[k].allFinite()) throw DataError("factor " + std::to_string(k) + " has non-finite entries");
  }
}

KruskalModel make_model(std::vector<Matrix> factors) {
  KruskalModel m;
  const Eigen::Index r = factors.empty() ? 0 : factors.front().cols();
  m.factors = std::move(factors);
  m.lambda = Vector::Ones(r);
  m.validate();
  return m;
}

void write_factor(std::ostream& out, const Matrix& a) {
  std::string line = std::to_string(a.rows()) + " " + std::to_string(a.cols()) + "\n";
  out << line;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    line.clear();
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      if (j) line.push_back(' ');
      write_number(line, a(i, j));
    }
    line.push_back('\n');
    out << line;
  }
}

Matrix read_factor(std::istream& in) {
  std::string line;
  if (!next_content_line(in, line)) throw DataError("missing factor header");
  std::istringstream header(line);
  Eigen::Index n = 0, r = 0;
  if (!(header >> n >> r) || n < 1 || r < 1) throw DataError("malformed factor header '" + line + "'");
  Matrix a(n, r);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!next_content_line(in, line)) throw DataError("factor block truncated");
    auto row = parse_numbers(line);
    if (static_cast<Eigen::Index>(row.size()) != r) {
      throw DataError("factor row has " + std::to_string(row.size()) + " values, expected " + std::to_string(r));
    }
    for (Eigen::Index j = 0; j < r; ++j) a(i, j) = row[static_cast<std::size_t>(j)];
  }
  return a;
}

void write_kruskal(std::ostream& out, const KruskalModel& model) {
  std::string line;
  for (int j = 0; j < model.rank(); ++j) {
    if (j) line.push_back(' ');
    write_number(line, model.lambda(j));
  }
  line.push_back('\n');
  out << line;
  for (const Matrix& a : model.factors) write_factor(out, a);
}

KruskalModel read_kruskal(std::istream& in) {
  std::string line;
  if (!next_content_line(in, line)) throw DataError("empty model file");
  auto lam = parse_numbers(line);
  if (lam.empty()) throw DataError("model file has no weights");
  KruskalModel m;
  m.lambda = Eigen::Map<Vector>(lam.data(), static_cast<Eigen::Index>(lam.size()));
  while (true) {
    std::streampos pos = in.tellg();
    if (!next_content_line(in, line)) break;
    in.clear();
    in.seekg(pos);
    m.factors.push_back(read_factor(in));
  }
  m.validate();
  return m;
}

void write_kruskal_file(const std::string& path, const KruskalModel& model) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write model file '" + path + "'");
  write_kruskal(out, model);
}

KruskalModel read_kruskal_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open model file '" + path + "'");
  return read_kruskal(in);
}

}  // namespace cparls
