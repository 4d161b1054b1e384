#ifndef HDPREF_DATASET_HPP
#define HDPREF_DATASET_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace hdpref {

using Index = Eigen::Index;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

enum class Direction { higher_better, lower_better };

/// Tabular input before normalization. Absent cells are missing values.
struct RawTable {
  std::vector<std::string> column_names;
  std::vector<Direction> directions;
  std::vector<std::vector<std::optional<double>>> rows;

  Index num_rows() const { return static_cast<Index>(rows.size()); }
  Index num_cols() const { return static_cast<Index>(column_names.size()); }
  void validate() const;
};

/// Ordered list of distinct column indices into a parent dataset.
class DimensionSet {
 public:
  DimensionSet() = default;
  explicit DimensionSet(std::vector<Index> indices);

  static DimensionSet all(Index d);
  static DimensionSet range(Index first, Index count);

  const std::vector<Index>& indices() const { return indices_; }
  Index size() const { return static_cast<Index>(indices_.size()); }
  bool empty() const { return indices_.empty(); }
  Index operator[](Index i) const { return indices_[static_cast<std::size_t>(i)]; }
  auto begin() const { return indices_.begin(); }
  auto end() const { return indices_.end(); }

  bool contains(Index dim) const;
  /// Throws std::out_of_range if any index is outside [0, d).
  void check_bounds(Index d) const;

  void push_back(Index dim);
  void remove(Index dim);
  DimensionSet sorted() const;

  friend bool operator==(const DimensionSet&, const DimensionSet&) = default;

 private:
  std::vector<Index> indices_;
};

DimensionSet set_union(const DimensionSet& a, const DimensionSet& b);
DimensionSet set_difference(const DimensionSet& a, const DimensionSet& b);

/// Normalized table: every value lies in (0, 1] and every column attains 1.
/// Rows carry an origin id that survives projection and skyline filtering.
class Dataset {
 public:
  Dataset() = default;
  Dataset(RowMatrix values, std::vector<std::string> attribute_names,
          std::vector<std::int64_t> origin_ids);
  /// Names default to D1..Dd and origin ids to 0..n-1.
  explicit Dataset(RowMatrix values);

  Index size() const { return values_.rows(); }
  Index dims() const { return values_.cols(); }
  const RowMatrix& values() const { return values_; }
  auto row(Index i) const { return values_.row(i); }
  double operator()(Index i, Index j) const { return values_(i, j); }

  const std::vector<std::string>& attribute_names() const { return names_; }
  const std::vector<std::int64_t>& origin_ids() const { return origin_ids_; }
  std::int64_t origin_id(Index row) const { return origin_ids_[static_cast<std::size_t>(row)]; }
  /// Row index holding the given origin id, if any.
  std::optional<Index> row_of(std::int64_t origin_id) const;

  /// Rows at the given positions, keeping their origin ids.
  Dataset select_rows(const std::vector<Index>& rows) const;

 private:
  void build_lookup();

  RowMatrix values_;
  std::vector<std::string> names_;
  std::vector<std::int64_t> origin_ids_;
  std::unordered_map<std::int64_t, Index> lookup_;
};

/// Imputes missing cells with the column minimum, flips lower-better columns
/// via (max - x), then maps each column with (x - min + δ)/(max - min + δ),
/// δ = delta_fraction·(max - min). Constant columns become all ones.
Dataset load_table(const RawTable& raw, double delta_fraction = 0.01);

/// Rows not dominated by any other row, in their original order.
std::vector<Index> skyline_rows(const RowMatrix& values);
Dataset skyline(const Dataset& data);

Dataset project(const Dataset& data, const DimensionSet& dims);

/// Header row of names, an optional row of {max,min} direction tokens, then
/// data rows. Empty cells are missing.
RawTable read_csv(std::istream& in);
RawTable read_csv_file(const std::string& path);
void write_csv(std::ostream& out, const Dataset& data);

}  // namespace hdpref

#endif  // HDPREF_DATASET_HPP
