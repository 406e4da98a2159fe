#pragma once

#include <vector>

#include <Eigen/Dense>

namespace quasiherm {

/**
 * Minimum-cost perfect matching on a square cost matrix (Hungarian method,
 * shortest augmenting paths with row/column potentials, O(n^3)).
 *
 * Returns `col_of_row` with col_of_row[i] = column assigned to row i.
 * Ties are broken towards the lowest column index, so the result is a
 * deterministic function of the cost matrix.
 */
std::vector<int> min_cost_assignment(const Eigen::MatrixXd& cost);

}  // namespace quasiherm
