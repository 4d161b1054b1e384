#include "hdpref/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace hdpref {

void RawTable::validate() const {
  if (rows.empty()) throw std::invalid_argument("raw table: no rows");
  if (column_names.empty()) throw std::invalid_argument("raw table: no columns");
  if (directions.size() != column_names.size()) {
    throw std::invalid_argument("raw table: one direction per column required");
  }
  std::unordered_set<std::string> seen;
  for (const auto& name : column_names) {
    if (!seen.insert(name).second) throw std::invalid_argument("raw table: duplicate column " + name);
  }
  for (const auto& row : rows) {
    if (row.size() != column_names.size()) {
      throw std::invalid_argument("raw table: ragged row");
    }
  }
}

DimensionSet::DimensionSet(std::vector<Index> indices) : indices_(std::move(indices)) {
  std::unordered_set<Index> seen;
  for (Index i : indices_) {
    if (i < 0) throw std::out_of_range("dimension set: negative index");
    if (!seen.insert(i).second) throw std::invalid_argument("dimension set: duplicate index");
  }
}

DimensionSet DimensionSet::all(Index d) { return range(0, d); }

DimensionSet DimensionSet::range(Index first, Index count) {
  std::vector<Index> idx(static_cast<std::size_t>(count));
  std::iota(idx.begin(), idx.end(), first);
  return DimensionSet(std::move(idx));
}

bool DimensionSet::contains(Index dim) const {
  return std::find(indices_.begin(), indices_.end(), dim) != indices_.end();
}

void DimensionSet::check_bounds(Index d) const {
  for (Index i : indices_) {
    if (i < 0 || i >= d) throw std::out_of_range("dimension index out of range");
  }
}

void DimensionSet::push_back(Index dim) {
  if (contains(dim)) throw std::invalid_argument("dimension set: duplicate index");
  indices_.push_back(dim);
}

void DimensionSet::remove(Index dim) {
  auto it = std::find(indices_.begin(), indices_.end(), dim);
  if (it != indices_.end()) indices_.erase(it);
}

DimensionSet DimensionSet::sorted() const {
  auto idx = indices_;
  std::sort(idx.begin(), idx.end());
  return DimensionSet(std::move(idx));
}

DimensionSet set_union(const DimensionSet& a, const DimensionSet& b) {
  DimensionSet out = a;
  for (Index i : b) {
    if (!out.contains(i)) out.push_back(i);
  }
  return out;
}

DimensionSet set_difference(const DimensionSet& a, const DimensionSet& b) {
  std::vector<Index> out;
  for (Index i : a) {
    if (!b.contains(i)) out.push_back(i);
  }
  return DimensionSet(std::move(out));
}

Dataset::Dataset(RowMatrix values, std::vector<std::string> attribute_names,
                 std::vector<std::int64_t> origin_ids)
    : values_(std::move(values)), names_(std::move(attribute_names)), origin_ids_(std::move(origin_ids)) {
  if (values_.rows() < 1 || values_.cols() < 1) throw std::invalid_argument("dataset: empty");
  if (static_cast<Index>(names_.size()) != values_.cols()) {
    throw std::invalid_argument("dataset: one name per column required");
  }
  if (static_cast<Index>(origin_ids_.size()) != values_.rows()) {
    throw std::invalid_argument("dataset: one origin id per row required");
  }
  for (Index j = 0; j < values_.cols(); ++j) {
    const auto col = values_.col(j);
    if (!(col.minCoeff() > 0.0) || col.maxCoeff() != 1.0) {
      throw std::invalid_argument("dataset: column " + names_[static_cast<std::size_t>(j)] +
                                  " is not normalized to (0,1] with maximum 1");
    }
  }
  build_lookup();
}

namespace {
std::vector<std::string> default_names(Index d) {
  std::vector<std::string> names;
  for (Index j = 0; j < d; ++j) names.push_back("D" + std::to_string(j + 1));
  return names;
}
std::vector<std::int64_t> default_ids(Index n) {
  std::vector<std::int64_t> ids(static_cast<std::size_t>(n));
  std::iota(ids.begin(), ids.end(), std::int64_t{0});
  return ids;
}
}  // namespace

Dataset::Dataset(RowMatrix values)
    : Dataset(values, default_names(values.cols()), default_ids(values.rows())) {}

void Dataset::build_lookup() {
  lookup_.clear();
  lookup_.reserve(origin_ids_.size());
  for (std::size_t i = 0; i < origin_ids_.size(); ++i) {
    if (!lookup_.emplace(origin_ids_[i], static_cast<Index>(i)).second) {
      throw std::invalid_argument("dataset: duplicate origin id");
    }
  }
}

std::optional<Index> Dataset::row_of(std::int64_t origin_id) const {
  auto it = lookup_.find(origin_id);
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

Dataset Dataset::select_rows(const std::vector<Index>& rows) const {
  RowMatrix v(static_cast<Index>(rows.size()), dims());
  std::vector<std::int64_t> ids;
  ids.reserve(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    v.row(static_cast<Index>(k)) = values_.row(rows[k]);
    ids.push_back(origin_ids_[static_cast<std::size_t>(rows[k])]);
  }
  return Dataset(std::move(v), names_, std::move(ids));
}

Dataset load_table(const RawTable& raw, double delta_fraction) {
  raw.validate();
  if (!(delta_fraction > 0.0 && delta_fraction <= 0.1)) {
    throw std::invalid_argument("load_table: delta_fraction must lie in (0, 0.1]");
  }
  const Index n = raw.num_rows();
  const Index d = raw.num_cols();
  RowMatrix values(n, d);

  for (Index j = 0; j < d; ++j) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (Index i = 0; i < n; ++i) {
      const auto& cell = raw.rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      if (cell) {
        lo = std::min(lo, *cell);
        hi = std::max(hi, *cell);
      }
    }
    if (lo > hi) {
      throw std::invalid_argument("load_table: column " + raw.column_names[static_cast<std::size_t>(j)] +
                                  " has no observed values");
    }
    const bool flip = raw.directions[static_cast<std::size_t>(j)] == Direction::lower_better;
    const double range = hi - lo;
    const double delta = delta_fraction * range;
    for (Index i = 0; i < n; ++i) {
      const auto& cell = raw.rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      // Missing cells take the observed minimum before any direction flip.
      double x = cell.value_or(lo);
      if (range == 0.0) {
        values(i, j) = 1.0;
        continue;
      }
      // After flipping, (hi - x) spans [0, range].
      const double shifted = flip ? (hi - x) : (x - lo);
      values(i, j) = (shifted + delta) / (range + delta);
    }
  }

  std::vector<std::int64_t> ids(static_cast<std::size_t>(n));
  std::iota(ids.begin(), ids.end(), std::int64_t{0});
  return Dataset(std::move(values), raw.column_names, std::move(ids));
}

std::vector<Index> skyline_rows(const RowMatrix& values) {
  const Index n = values.rows();
  const Eigen::VectorXd sums = values.rowwise().sum();
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  // A dominator always has a strictly larger sum, so scanning in decreasing
  // sum order only needs to compare against already accepted rows.
  // Equal rounded sums fall back to lexicographic order, which also puts a
  // dominator first.
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    if (sums(a) != sums(b)) return sums(a) > sums(b);
    for (Index j = 0; j < values.cols(); ++j) {
      if (values(a, j) != values(b, j)) return values(a, j) > values(b, j);
    }
    return false;
  });

  std::vector<Index> kept;
  for (Index p : order) {
    const auto row = values.row(p);
    bool dominated = false;
    for (Index q : kept) {
      const auto other = values.row(q);
      if ((other.array() >= row.array()).all() && (other.array() > row.array()).any()) {
        dominated = true;
        break;
      }
    }
    if (!dominated) kept.push_back(p);
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

Dataset skyline(const Dataset& data) { return data.select_rows(skyline_rows(data.values())); }

Dataset project(const Dataset& data, const DimensionSet& dims) {
  if (dims.empty()) throw std::invalid_argument("project: empty dimension set");
  dims.check_bounds(data.dims());
  RowMatrix v(data.size(), dims.size());
  std::vector<std::string> names;
  for (Index k = 0; k < dims.size(); ++k) {
    v.col(k) = data.values().col(dims[k]);
    names.push_back(data.attribute_names()[static_cast<std::size_t>(dims[k])]);
  }
  return Dataset(std::move(v), std::move(names), data.origin_ids());
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cell.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(cell);
      cell.clear();
    } else if (c != '\r') {
      cell.push_back(c);
    }
  }
  cells.push_back(cell);
  return cells;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

}  // namespace

RawTable read_csv(std::istream& in) {
  RawTable table;
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("csv: missing header row");
  for (auto& name : split_csv_line(line)) table.column_names.push_back(trim(name));
  const std::size_t d = table.column_names.size();
  table.directions.assign(d, Direction::higher_better);

  bool first = true;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto cells = split_csv_line(line);
    if (cells.size() != d) {
      throw std::invalid_argument("csv: line " + std::to_string(line_no) + " has " +
                                  std::to_string(cells.size()) + " cells, expected " + std::to_string(d));
    }
    if (first) {
      first = false;
      const bool is_meta = std::all_of(cells.begin(), cells.end(), [](const std::string& c) {
        const auto t = trim(c);
        return t == "max" || t == "min";
      });
      if (is_meta) {
        for (std::size_t j = 0; j < d; ++j) {
          table.directions[j] = trim(cells[j]) == "min" ? Direction::lower_better : Direction::higher_better;
        }
        continue;
      }
    }
    std::vector<std::optional<double>> row;
    row.reserve(d);
    for (const auto& c : cells) {
      const auto t = trim(c);
      if (t.empty()) {
        row.emplace_back(std::nullopt);
        continue;
      }
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(t, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != t.size()) {
        throw std::invalid_argument("csv: line " + std::to_string(line_no) + ": not a number: " + t);
      }
      row.emplace_back(v);
    }
    table.rows.push_back(std::move(row));
  }
  table.validate();
  return table;
}

RawTable read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_csv(in);
}

void write_csv(std::ostream& out, const Dataset& data) {
  const auto& names = data.attribute_names();
  for (std::size_t j = 0; j < names.size(); ++j) out << (j ? "," : "") << names[j];
  out << '\n' << std::setprecision(17);
  for (Index i = 0; i < data.size(); ++i) {
    for (Index j = 0; j < data.dims(); ++j) out << (j ? "," : "") << data(i, j);
    out << '\n';
  }
}

}  // namespace hdpref
