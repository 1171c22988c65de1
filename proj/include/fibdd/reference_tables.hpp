#pragma once

#include <string>
#include <vector>

#include "fibdd/fibrec.hpp"

namespace fibdd::fibrec {

/// Known-good category tables for the supported protocols, used as fixtures
/// by the validate command and the test suite. Column labels index the
/// subscript of the recursion's right factor (m = n - 1 when building U_n);
/// reading them as n itself contradicts the explicit depth-3 recursion
/// U_3^A = U_1^B U_2^A, which takes precedence.
struct ReferenceTable {
  int num_drives;
  int num_layers;
  char category;                              // whose conjugate column is tabulated
  std::vector<std::vector<int>> locations;    // rows in (i,j) order, columns m = 2..
  /// Offset added to the corresponding location row before comparison. The
  /// n_s = 1 tables quote L_{1,2} displaced by one slot relative to the
  /// mod-2 location values; everything else is quoted directly.
  std::vector<int> location_display_offset;
  std::string conjugates;                     // category letters, columns m = 2..
};

const std::vector<ReferenceTable>& reference_tables();

struct TableCheck {
  bool matched = true;
  std::string report;  // human-readable diff, one block per table
};

/// Compare a freshly derived plan set against the bundled tables.
TableCheck check_against_references();

}  // namespace fibdd::fibrec
