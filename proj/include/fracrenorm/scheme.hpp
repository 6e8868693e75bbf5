#pragma once

#include <vector>

namespace fr {

// One refinement step of a finitely ramified self-similar structure:
// copies[i][x] is the refined id of boundary vertex x in copy i, and
// boundary_image[x] is where boundary vertex x sits in the refinement.
struct ReplicationScheme {
  int boundary_size = 0;
  int refined_size = 0;
  std::vector<std::vector<int>> copies;
  std::vector<int> boundary_image;
};

}  // namespace fr
