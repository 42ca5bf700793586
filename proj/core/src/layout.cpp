#include "ccdc/layout.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

namespace ccdc {

SystemLayout::SystemLayout(std::vector<Factor> factors) : factors_(std::move(factors)) {
  std::set<std::string> seen;
  total_dim_ = 1;
  for (const auto& f : factors_) {
    if (f.dim < 1) throw std::invalid_argument("SystemLayout: factor dim must be >= 1: " + f.label);
    if (!seen.insert(f.label).second)
      throw std::invalid_argument("SystemLayout: duplicate label " + f.label);
    total_dim_ *= f.dim;
  }
  strides_.assign(factors_.size(), 1);
  for (int i = static_cast<int>(factors_.size()) - 2; i >= 0; --i)
    strides_[i] = strides_[i + 1] * factors_[i + 1].dim;
}

bool SystemLayout::has_label(const std::string& label) const {
  return std::any_of(factors_.begin(), factors_.end(),
                     [&](const Factor& f) { return f.label == label; });
}

int SystemLayout::position(const std::string& label) const {
  for (size_t i = 0; i < factors_.size(); ++i)
    if (factors_[i].label == label) return static_cast<int>(i);
  throw std::invalid_argument("SystemLayout: unknown label " + label);
}

int SystemLayout::dim_of(const std::string& label) const { return factors_[position(label)].dim; }

std::vector<std::string> SystemLayout::labels() const {
  std::vector<std::string> out;
  out.reserve(factors_.size());
  for (const auto& f : factors_) out.push_back(f.label);
  return out;
}

int SystemLayout::dim_of(const std::vector<std::string>& labels) const {
  int d = 1;
  for (const auto& l : labels) d *= dim_of(l);
  return d;
}

bool SystemLayout::operator==(const SystemLayout& other) const {
  if (factors_.size() != other.factors_.size()) return false;
  for (size_t i = 0; i < factors_.size(); ++i)
    if (factors_[i].label != other.factors_[i].label || factors_[i].dim != other.factors_[i].dim)
      return false;
  return true;
}

SystemLayout SystemLayout::concat(const SystemLayout& other) const {
  std::vector<Factor> all = factors_;
  all.insert(all.end(), other.factors_.begin(), other.factors_.end());
  return SystemLayout(std::move(all));
}

int SystemLayout::flat(const std::vector<int>& multi) const {
  if (multi.size() != factors_.size())
    throw std::invalid_argument("SystemLayout::flat: wrong multi-index length");
  int idx = 0;
  for (size_t i = 0; i < multi.size(); ++i) idx += multi[i] * strides_[i];
  return idx;
}

std::vector<int> SystemLayout::multi(int flat_index) const {
  std::vector<int> out(factors_.size());
  for (size_t i = 0; i < factors_.size(); ++i) {
    out[i] = flat_index / strides_[i];
    flat_index -= out[i] * strides_[i];
  }
  return out;
}

std::string SystemLayout::to_string() const {
  std::ostringstream ss;
  ss << "[";
  for (size_t i = 0; i < factors_.size(); ++i) {
    if (i) ss << ", ";
    ss << factors_[i].label << ":" << factors_[i].dim;
  }
  ss << "]";
  return ss.str();
}

}  // namespace ccdc
