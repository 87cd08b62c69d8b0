#include "spanforest/io.hpp"

#include <charconv>
#include <cstddef>
#include <cstdio>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <system_error>
#include <utility>
#include <vector>

namespace spanforest::io {

namespace {

[[noreturn]] void fail_at(const std::string& path, int line,
                          const std::string& message) {
  throw std::runtime_error(path + ":" + std::to_string(line) + ": " + message);
}

std::string strip(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(strip(line.substr(start)));
      break;
    }
    out.push_back(strip(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return out;
}

double parse_double(const std::string& field, const std::string& path,
                    int line) {
  double v = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc{} || ptr != end)
    fail_at(path, line, "expected a number, got '" + field + "'");
  return v;
}

long parse_long(const std::string& field, const std::string& path, int line) {
  long v = 0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc{} || ptr != end)
    fail_at(path, line, "expected an integer, got '" + field + "'");
  return v;
}

std::ifstream open_for_read(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path + " for reading");
  return in;
}

std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Eigen::MatrixXd load_matrix_csv(const std::string& path, bool skip_header) {
  std::ifstream in = open_for_read(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  int line_no = 0;
  std::size_t cols = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (skip_header && line_no == 1) continue;
    if (strip(line).empty()) continue;
    const std::vector<std::string> fields = split_csv(line);
    if (cols == 0) cols = fields.size();
    if (fields.size() != cols)
      fail_at(path, line_no,
              "expected " + std::to_string(cols) + " fields, got " +
                  std::to_string(fields.size()));
    std::vector<double> row(cols);
    for (std::size_t c = 0; c < cols; ++c)
      row[c] = parse_double(fields[c], path, line_no);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error(path + ": no data rows");
  Eigen::MatrixXd m(static_cast<int>(rows.size()), static_cast<int>(cols));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < cols; ++c)
      m(static_cast<int>(r), static_cast<int>(c)) = rows[r][c];
  return m;
}

void save_matrix_csv(const std::string& path, const Eigen::MatrixXd& m) {
  std::ofstream out = open_for_write(path);
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) {
      if (c > 0) out << ',';
      out << format_double(m(r, c));
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("failed writing " + path);
}

Partition load_labels_csv(const std::string& path) {
  std::ifstream in = open_for_read(path);
  std::string line;
  int line_no = 0;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
  ++line_no;
  if (strip(line) != "index,label")
    fail_at(path, line_no, "expected header 'index,label'");

  std::vector<std::pair<long, long>> entries;
  while (std::getline(in, line)) {
    ++line_no;
    if (strip(line).empty()) continue;
    const std::vector<std::string> fields = split_csv(line);
    if (fields.size() != 2) fail_at(path, line_no, "expected 'index,label'");
    entries.emplace_back(parse_long(fields[0], path, line_no),
                         parse_long(fields[1], path, line_no));
  }
  if (entries.empty()) throw std::runtime_error(path + ": no label rows");

  const long n = static_cast<long>(entries.size());
  std::vector<int> labels(n, 0);
  std::vector<char> seen(n, 0);
  for (const auto& [idx, lab] : entries) {
    if (idx < 0 || idx >= n)
      throw std::runtime_error(path + ": index " + std::to_string(idx) +
                               " outside 0.." + std::to_string(n - 1));
    if (seen[idx])
      throw std::runtime_error(path + ": duplicate index " +
                               std::to_string(idx));
    seen[idx] = 1;
    labels[idx] = static_cast<int>(lab);
  }
  return Partition(std::move(labels));
}

void save_labels_csv(const std::string& path, const Partition& partition) {
  std::ofstream out = open_for_write(path);
  out << "index,label\n";
  for (int i = 0; i < partition.n(); ++i)
    out << i << ',' << partition.label(i) << '\n';
  if (!out) throw std::runtime_error("failed writing " + path);
}

nlohmann::json tree_to_json(const AugmentedTree& tree) {
  return nlohmann::json{{"parent", tree.parents()}};
}

AugmentedTree tree_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("parent") || !j["parent"].is_array())
    throw std::runtime_error("tree JSON must be {\"parent\": [...]}");
  std::vector<int> parent;
  parent.reserve(j["parent"].size());
  for (const auto& v : j["parent"]) {
    if (!v.is_number_integer())
      throw std::runtime_error("tree JSON: non-integer parent entry");
    parent.push_back(v.get<int>());
  }
  return AugmentedTree(std::move(parent));
}

nlohmann::json sample_to_json(const McmcSample& sample) {
  std::vector<double> sigma(sample.sigma_tilde.begin(),
                            sample.sigma_tilde.end());
  return nlohmann::json{{"iteration", sample.iteration},
                        {"parent", sample.tree.parents()},
                        {"sigma_tilde", std::move(sigma)},
                        {"gamma2", sample.gamma2}};
}

McmcSample sample_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("iteration") || !j.contains("parent") ||
      !j.contains("sigma_tilde") || !j.contains("gamma2"))
    throw std::runtime_error(
        "sample JSON needs iteration, parent, sigma_tilde, gamma2");
  AugmentedTree tree = tree_from_json(nlohmann::json{{"parent", j["parent"]}});
  const auto& sig = j["sigma_tilde"];
  if (!sig.is_array() || static_cast<int>(sig.size()) != tree.n())
    throw std::runtime_error(
        "sample JSON: sigma_tilde length does not match the tree");
  Eigen::VectorXd sigma(tree.n());
  for (int i = 0; i < tree.n(); ++i) {
    if (!sig[i].is_number())
      throw std::runtime_error("sample JSON: non-numeric sigma_tilde entry");
    sigma[i] = sig[i].get<double>();
  }
  if (!j["gamma2"].is_number())
    throw std::runtime_error("sample JSON: gamma2 must be a number");
  if (!j["iteration"].is_number_integer())
    throw std::runtime_error("sample JSON: iteration must be an integer");
  return McmcSample{std::move(tree), std::move(sigma),
                    j["gamma2"].get<double>(), j["iteration"].get<int>()};
}

void save_samples_jsonl(const std::string& path,
                        const std::vector<McmcSample>& samples) {
  std::ofstream out = open_for_write(path);
  for (const McmcSample& smp : samples) out << sample_to_json(smp).dump() << '\n';
  if (!out) throw std::runtime_error("failed writing " + path);
}

void for_each_sample_jsonl(const std::string& path,
                           const std::function<void(const McmcSample&)>& fn) {
  std::ifstream in = open_for_read(path);
  std::string line;
  int line_no = 0;
  bool any = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (strip(line).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      fail_at(path, line_no, std::string("invalid JSON: ") + e.what());
    }
    std::optional<McmcSample> smp;
    try {
      smp.emplace(sample_from_json(j));
    } catch (const std::exception& e) {
      fail_at(path, line_no, e.what());
    }
    fn(*smp);
    any = true;
  }
  if (!any) throw std::runtime_error(path + ": no samples");
}

std::vector<McmcSample> load_samples_jsonl(const std::string& path) {
  std::vector<McmcSample> samples;
  for_each_sample_jsonl(
      path, [&samples](const McmcSample& smp) { samples.push_back(smp); });
  return samples;
}

}  // namespace spanforest::io
