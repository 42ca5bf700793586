#pragma once

#include <string>
#include <vector>

namespace ccdc {

/// Ordered list of labeled tensor factors. The first factor is the most
/// significant index of the computational basis (row-major composite index).
class SystemLayout {
 public:
  struct Factor {
    std::string label;
    int dim;
  };

  SystemLayout() = default;
  explicit SystemLayout(std::vector<Factor> factors);

  static SystemLayout single(const std::string& label, int dim) {
    return SystemLayout({{label, dim}});
  }

  int size() const { return static_cast<int>(factors_.size()); }
  int total_dim() const { return total_dim_; }
  const std::vector<Factor>& factors() const { return factors_; }
  const Factor& factor(int i) const { return factors_.at(i); }

  bool has_label(const std::string& label) const;
  /// Position of a label; throws std::invalid_argument if absent.
  int position(const std::string& label) const;
  int dim_of(const std::string& label) const;

  std::vector<std::string> labels() const;
  /// Product of dims over a subset of labels.
  int dim_of(const std::vector<std::string>& labels) const;

  /// Layouts are equal when factor labels, order and dims all agree.
  bool operator==(const SystemLayout& other) const;
  bool operator!=(const SystemLayout& other) const { return !(*this == other); }

  /// Concatenation; labels must stay unique.
  SystemLayout concat(const SystemLayout& other) const;

  /// Flat index of a multi-index (first factor most significant).
  int flat(const std::vector<int>& multi) const;
  /// Inverse of flat().
  std::vector<int> multi(int flat_index) const;

  /// Stride of factor i: flat index increment when component i increments.
  int stride(int i) const { return strides_.at(i); }

  std::string to_string() const;

 private:
  std::vector<Factor> factors_;
  std::vector<int> strides_;
  int total_dim_ = 1;
};

}  // namespace ccdc
