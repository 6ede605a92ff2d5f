#include "expu/distribution.hpp"

#include <cmath>
#include <sstream>

#include "expu/error.hpp"

namespace expu {

InputDistribution::InputDistribution(std::vector<double> pmf) : pmf_(std::move(pmf)) {
  if (pmf_.empty()) throw Error(ErrorCode::InvalidDistribution, "empty pmf");
  double sum = 0.0;
  for (double p : pmf_) {
    if (!(p >= 0.0)) throw Error(ErrorCode::InvalidDistribution, "negative or NaN probability");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw Error(ErrorCode::InvalidDistribution, "pmf does not sum to 1");
}

InputDistribution InputDistribution::uniform(std::size_t size) {
  return InputDistribution(std::vector<double>(size, 1.0 / static_cast<double>(size)));
}

InputDistribution InputDistribution::parse(const std::string& text) {
  std::vector<double> pmf;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      pmf.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorCode::ParseError, "bad probability \"" + item + "\"");
    }
  }
  return InputDistribution(std::move(pmf));
}

}  // namespace expu
