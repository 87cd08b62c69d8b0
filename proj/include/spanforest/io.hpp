#pragma once
// File I/O: CSV matrices and labels, JSON trees, and JSONL sample streams.
// All numeric CSV output uses 17 significant digits, so values round-trip
// through the loaders bit-exactly. Parse errors carry file:line context.

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "spanforest/core.hpp"
#include "spanforest/mcmc.hpp"

namespace spanforest::io {

// Numeric CSV with one row per observation; no header unless skip_header.
// Ragged or non-numeric rows raise std::runtime_error with the line number.
Eigen::MatrixXd load_matrix_csv(const std::string& path,
                                bool skip_header = false);
void save_matrix_csv(const std::string& path, const Eigen::MatrixXd& m);

// Labels CSV with header "index,label"; index is the 0-based data row.
Partition load_labels_csv(const std::string& path);
void save_labels_csv(const std::string& path, const Partition& partition);

// Tree JSON: {"parent": [-1, ...]} (any value at index 0 is accepted and
// normalized to the -1 sentinel).
nlohmann::json tree_to_json(const AugmentedTree& tree);
AugmentedTree tree_from_json(const nlohmann::json& j);

nlohmann::json sample_to_json(const McmcSample& sample);
McmcSample sample_from_json(const nlohmann::json& j);

// JSONL sample streams (one sample per line).
void save_samples_jsonl(const std::string& path,
                        const std::vector<McmcSample>& samples);
std::vector<McmcSample> load_samples_jsonl(const std::string& path);
// Streaming variant for long chains.
void for_each_sample_jsonl(const std::string& path,
                           const std::function<void(const McmcSample&)>& fn);

// Formats a double with enough digits to round-trip exactly.
std::string format_double(double v);

}  // namespace spanforest::io
