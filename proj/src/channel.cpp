#include "expu/channel.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "expu/error.hpp"

namespace expu {

namespace {

constexpr double kRowSumTolerance = 1e-12;

std::string cell(std::size_t r, std::size_t c) {
  return "row " + std::to_string(r) + ", column " + std::to_string(c);
}

}  // namespace

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NegativeEntry: return "NegativeEntry";
    case ErrorCode::RowSumViolation: return "RowSumViolation";
    case ErrorCode::DegenerateAlphabet: return "DegenerateAlphabet";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::RhoOutOfRange: return "RhoOutOfRange";
    case ErrorCode::RhoMaxTooSmall: return "RhoMaxTooSmall";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::SizeOverflow: return "SizeOverflow";
    case ErrorCode::KeepTooLarge: return "KeepTooLarge";
    case ErrorCode::InvalidDistribution: return "InvalidDistribution";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

Channel validate_channel(const std::vector<std::vector<double>>& rows) {
  if (rows.size() < 2 || rows.front().size() < 2) {
    throw Error(ErrorCode::DegenerateAlphabet, "channel needs at least 2 inputs and 2 outputs");
  }
  const std::size_t outputs = rows.front().size();
  std::vector<double> flat;
  flat.reserve(rows.size() * outputs);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != outputs) {
      throw Error(ErrorCode::LengthMismatch, "row " + std::to_string(r) + " has " +
                                                 std::to_string(rows[r].size()) + " entries, expected " +
                                                 std::to_string(outputs));
    }
    for (std::size_t c = 0; c < outputs; ++c) {
      if (!(rows[r][c] >= 0.0)) throw Error(ErrorCode::NegativeEntry, cell(r, c));
    }
    double sum = 0.0;
    for (std::size_t c = 0; c < outputs; ++c) {
      const double v = rows[r][c];
      if (v > 1.0) throw Error(ErrorCode::RowSumViolation, cell(r, c) + " exceeds 1");
      sum += v;
      flat.push_back(v);
    }
    if (std::abs(sum - 1.0) > kRowSumTolerance) {
      std::ostringstream os;
      os.precision(17);
      os << "row " << r << " sums to " << sum;
      throw Error(ErrorCode::RowSumViolation, os.str());
    }
  }
  return Channel::from_rows(rows);
}

Channel Channel::from_rows(const std::vector<std::vector<double>>& rows) {
  // from_rows is only reached through validate_channel or the named
  // constructors, so the invariants hold here.
  const std::size_t inputs = rows.size();
  const std::size_t outputs = rows.front().size();
  std::vector<double> flat;
  flat.reserve(inputs * outputs);
  for (const auto& row : rows) flat.insert(flat.end(), row.begin(), row.end());
  return Channel(inputs, outputs, std::move(flat));
}

Channel Channel::bsc(double p) { return validate_channel({{1.0 - p, p}, {p, 1.0 - p}}); }

Channel Channel::bec(double erasure) {
  return validate_channel({{1.0 - erasure, 0.0, erasure}, {0.0, 1.0 - erasure, erasure}});
}

std::vector<double> Channel::transposed() const {
  std::vector<double> t(matrix_.size());
  for (std::size_t x = 0; x < inputs_; ++x)
    for (std::size_t y = 0; y < outputs_; ++y) t[y * inputs_ + x] = matrix_[x * outputs_ + y];
  return t;
}

Channel parse_channel_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  if (!doc.is_object() || !doc.contains("matrix") || !doc["matrix"].is_array()) {
    throw Error(ErrorCode::ParseError, "expected an object with a \"matrix\" array");
  }
  std::vector<std::vector<double>> rows;
  const auto& m = doc["matrix"];
  for (std::size_t r = 0; r < m.size(); ++r) {
    if (!m[r].is_array()) throw Error(ErrorCode::ParseError, "row " + std::to_string(r) + " is not an array");
    std::vector<double> row;
    for (std::size_t c = 0; c < m[r].size(); ++c) {
      if (!m[r][c].is_number()) throw Error(ErrorCode::ParseError, cell(r, c) + " is not a number");
      row.push_back(m[r][c].get<double>());
    }
    rows.push_back(std::move(row));
  }
  auto declared = [&](const char* key, std::size_t actual) {
    if (!doc.contains(key)) return;
    if (!doc[key].is_number_integer() || doc[key].get<long long>() != static_cast<long long>(actual)) {
      throw Error(ErrorCode::ParseError, std::string("\"") + key + "\" does not match the matrix shape");
    }
  };
  declared("inputs", rows.size());
  declared("outputs", rows.empty() ? 0 : rows.front().size());
  return validate_channel(rows);
}

Channel load_channel(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_channel_json(buf.str());
}

double bhattacharyya(const Channel& ch, Symbol a, Symbol b) {
  if (a >= ch.input_size() || b >= ch.input_size()) {
    throw Error(ErrorCode::IndexOutOfRange, "input symbol out of range");
  }
  if (a == b) return 1.0;
  double z = 0.0;
  for (std::size_t y = 0; y < ch.output_size(); ++y) {
    z += std::sqrt(ch(a, static_cast<Symbol>(y))) * std::sqrt(ch(b, static_cast<Symbol>(y)));
  }
  return std::min(z, 1.0);
}

BhattMatrix::BhattMatrix(const Channel& ch) : size_(ch.input_size()), z_(size_ * size_) {
  for (std::size_t a = 0; a < size_; ++a) {
    for (std::size_t b = a; b < size_; ++b) {
      const double z = bhattacharyya(ch, static_cast<Symbol>(a), static_cast<Symbol>(b));
      z_[a * size_ + b] = z;
      z_[b * size_ + a] = z;
    }
  }
}

BhattMatrix bhattacharyya_matrix(const Channel& ch) { return BhattMatrix(ch); }

double bhattacharyya_seq(const BhattMatrix& bm, std::span<const Symbol> x, std::span<const Symbol> x2) {
  if (x.size() != x2.size()) throw Error(ErrorCode::LengthMismatch, "sequences differ in length");
  double z = 1.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] >= bm.size() || x2[i] >= bm.size()) throw Error(ErrorCode::IndexOutOfRange, "input symbol out of range");
    z *= bm(x[i], x2[i]);
    if (z == 0.0) return 0.0;
  }
  return z;
}

double sequence_likelihood(const Channel& ch, std::span<const Symbol> x, std::span<const Symbol> y) {
  if (x.size() != y.size()) throw Error(ErrorCode::LengthMismatch, "sequences differ in length");
  double p = 1.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] >= ch.input_size() || y[i] >= ch.output_size()) {
      throw Error(ErrorCode::IndexOutOfRange, "symbol out of range");
    }
    p *= ch(x[i], y[i]);
  }
  return p;
}

}  // namespace expu
