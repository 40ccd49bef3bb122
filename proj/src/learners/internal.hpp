#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "learner.hpp"

namespace attrikit {

nlohmann::json tree_nodes_to_json(const std::vector<TreeNode>& nodes);
std::vector<TreeNode> tree_nodes_from_json(const nlohmann::json& arr);

} // namespace attrikit

namespace attrikit::detail {

void check_fit_inputs(const Matrix& x, const std::vector<int>& y);
void check_width(const Model& m, const Matrix& x);
void require_positive(double v, const char* what);
void require_count(size_t v, const char* what);
void require_rate(double v, const char* what);

} // namespace attrikit::detail
