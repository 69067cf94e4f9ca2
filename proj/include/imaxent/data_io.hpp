#pragma once

#include <string>
#include <vector>

namespace imaxent {

//! Reads observations from a text file: one value per line, or a delimited
//! file with a zero-based column selector. Rows that fail to parse are
//! rejected with their line numbers.
std::vector<double> load_observations(const std::string& path, int column = -1, char delimiter = ',');

} // namespace imaxent
