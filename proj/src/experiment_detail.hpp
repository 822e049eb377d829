#pragma once

#include <string>
#include <vector>

#include "votefusion/experiment.hpp"

namespace votefusion::detail {

// Observed votes of a partial-policy pattern, 'x' for unseen positions.
std::string partial_history_label(const ObservationGraph& graph, int position, std::uint32_t pattern);

Table roc_table(const std::string& name, const RocCurve& curve, VotingMode mode, const std::vector<int>& ordering);
Table skipped_table(const std::string& name, const RocCurve& curve);
// Active histories only.
Table public_threshold_table(const std::string& name, const VotePolicy& policy);

}  // namespace votefusion::detail
