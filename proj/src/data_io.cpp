#include "imaxent/data_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace imaxent {

namespace {

bool parse_number(std::string token, double& out)
{
  // trim surrounding whitespace
  const auto first = token.find_first_not_of(" \t\r");
  if (first == std::string::npos)
    return false;
  const auto last = token.find_last_not_of(" \t\r");
  token = token.substr(first, last - first + 1);
  const char* begin = token.data();
  const char* end = begin + token.size();
  const auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

} // namespace

std::vector<double> load_observations(const std::string& path, int column, char delimiter)
{
  std::ifstream in(path);
  if (!in)
    throw std::invalid_argument("cannot open data file " + path);

  std::vector<double> values;
  std::vector<long> bad_lines;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos)
      continue; // blank line

    std::string token;
    if (column < 0) {
      token = line;
    } else {
      std::stringstream ss(line);
      std::string field;
      int idx = -1;
      bool found = false;
      while (std::getline(ss, field, delimiter)) {
        if (++idx == column) {
          token = field;
          found = true;
          break;
        }
      }
      if (!found) {
        bad_lines.push_back(line_no);
        continue;
      }
    }

    double v = 0.0;
    if (parse_number(token, v))
      values.push_back(v);
    else
      bad_lines.push_back(line_no);
  }

  if (!bad_lines.empty()) {
    std::ostringstream msg;
    msg << path << ": " << bad_lines.size() << " non-numeric row(s) at line";
    msg << (bad_lines.size() > 1 ? "s " : " ");
    for (std::size_t i = 0; i < bad_lines.size() && i < 10; ++i)
      msg << (i ? ", " : "") << bad_lines[i];
    if (bad_lines.size() > 10)
      msg << ", ...";
    throw std::invalid_argument(msg.str());
  }
  if (values.empty())
    throw std::invalid_argument(path + ": no observations found");
  return values;
}

} // namespace imaxent
