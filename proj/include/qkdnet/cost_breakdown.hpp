#pragma once

#include <string>
#include <vector>

namespace qkdnet {

/// Capital cost of one architecture, split by where the equipment sits.
struct CostBreakdown {
  double local = 0.0;     ///< user-to-node access links
  double backbone = 0.0;  ///< node-to-node trunks, or user-pair chains without a backbone
  double node = 0.0;      ///< trusted-node equipment
  double total = 0.0;
  std::vector<std::string> warnings;
};

}  // namespace qkdnet
