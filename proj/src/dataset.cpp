#include "regdiag/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace regdiag {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string shortest(double value) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, end);
}

}  // namespace

std::string_view to_string(ColumnKind kind) {
    switch (kind) {
        case ColumnKind::categorical: return "categorical";
        case ColumnKind::numeric: return "numeric";
        case ColumnKind::binary: return "binary";
    }
    return "unknown";
}

Column Column::categorical(std::string name, const std::vector<std::optional<std::string>>& values) {
    std::vector<std::string> dictionary;
    std::vector<std::int32_t> codes;
    codes.reserve(values.size());
    std::unordered_map<std::string, std::int32_t> index;
    for (const auto& v : values) {
        if (!v || v->empty()) {
            codes.push_back(-1);
            continue;
        }
        auto [it, inserted] = index.try_emplace(*v, static_cast<std::int32_t>(dictionary.size()));
        if (inserted) dictionary.push_back(*v);
        codes.push_back(it->second);
    }
    return categorical(std::move(name), std::move(dictionary), std::move(codes));
}

Column Column::categorical(std::string name, std::vector<std::string> dictionary,
                           std::vector<std::int32_t> codes) {
    const auto n = static_cast<std::int32_t>(dictionary.size());
    for (auto code : codes) {
        if (code < -1 || code >= n) throw std::invalid_argument("categorical code out of range in " + name);
    }
    for (const auto& label : dictionary) {
        if (label.empty()) throw std::invalid_argument("empty categorical label in " + name);
    }
    Column c(std::move(name), ColumnKind::categorical);
    c.dictionary_ = std::move(dictionary);
    c.codes_ = std::move(codes);
    return c;
}

Column Column::numeric(std::string name, const std::vector<std::optional<double>>& values) {
    std::vector<double> numbers;
    numbers.reserve(values.size());
    for (const auto& v : values) numbers.push_back(v ? *v : kNaN);
    return numeric(std::move(name), std::move(numbers));
}

Column Column::numeric(std::string name, std::vector<double> values) {
    for (double v : values) {
        if (std::isinf(v)) throw std::invalid_argument("non-finite numeric value in " + name);
    }
    Column c(std::move(name), ColumnKind::numeric);
    c.numbers_ = std::move(values);
    return c;
}

Column Column::binary(std::string name, std::vector<std::int8_t> values) {
    for (auto v : values) {
        if (v < -1 || v > 1) throw std::invalid_argument("binary column holds a value outside {0,1,null}: " + name);
    }
    Column c(std::move(name), ColumnKind::binary);
    c.bits_ = std::move(values);
    return c;
}

std::size_t Column::size() const noexcept {
    switch (kind_) {
        case ColumnKind::categorical: return codes_.size();
        case ColumnKind::numeric: return numbers_.size();
        case ColumnKind::binary: return bits_.size();
    }
    return 0;
}

bool Column::is_null(std::size_t row) const {
    switch (kind_) {
        case ColumnKind::categorical: return codes_.at(row) < 0;
        case ColumnKind::numeric: return std::isnan(numbers_.at(row));
        case ColumnKind::binary: return bits_.at(row) < 0;
    }
    return false;
}

std::size_t Column::null_count() const {
    switch (kind_) {
        case ColumnKind::categorical:
            return static_cast<std::size_t>(std::count(codes_.begin(), codes_.end(), -1));
        case ColumnKind::numeric:
            return static_cast<std::size_t>(
                std::count_if(numbers_.begin(), numbers_.end(), [](double v) { return std::isnan(v); }));
        case ColumnKind::binary:
            return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::int8_t{-1}));
    }
    return 0;
}

std::span<const std::int32_t> Column::codes() const {
    if (kind_ != ColumnKind::categorical) throw std::logic_error(name_ + " is not categorical");
    return codes_;
}

const std::vector<std::string>& Column::dictionary() const {
    if (kind_ != ColumnKind::categorical) throw std::logic_error(name_ + " is not categorical");
    return dictionary_;
}

std::span<const double> Column::numbers() const {
    if (kind_ != ColumnKind::numeric) throw std::logic_error(name_ + " is not numeric");
    return numbers_;
}

std::span<const std::int8_t> Column::bits() const {
    if (kind_ != ColumnKind::binary) throw std::logic_error(name_ + " is not binary");
    return bits_;
}

std::optional<std::string> Column::token(std::size_t row) const {
    if (is_null(row)) return std::nullopt;
    switch (kind_) {
        case ColumnKind::categorical: return dictionary_[static_cast<std::size_t>(codes_[row])];
        case ColumnKind::numeric: return shortest(numbers_[row]);
        case ColumnKind::binary: return bits_[row] ? "1" : "0";
    }
    return std::nullopt;
}

Column Column::as_categorical() const {
    switch (kind_) {
        case ColumnKind::categorical: return *this;
        case ColumnKind::binary: {
            std::vector<std::int32_t> codes(bits_.begin(), bits_.end());
            return categorical(name_, {"0", "1"}, std::move(codes));
        }
        case ColumnKind::numeric: break;
    }
    throw std::logic_error(name_ + " is numeric and has no categorical view");
}

Column Column::take(std::span<const std::size_t> rows) const {
    Column out(name_, kind_);
    switch (kind_) {
        case ColumnKind::categorical:
            out.dictionary_ = dictionary_;
            out.codes_.reserve(rows.size());
            for (auto r : rows) out.codes_.push_back(codes_.at(r));
            break;
        case ColumnKind::numeric:
            out.numbers_.reserve(rows.size());
            for (auto r : rows) out.numbers_.push_back(numbers_.at(r));
            break;
        case ColumnKind::binary:
            out.bits_.reserve(rows.size());
            for (auto r : rows) out.bits_.push_back(bits_.at(r));
            break;
    }
    return out;
}

Column Column::renamed(std::string name) const {
    Column out = *this;
    out.name_ = std::move(name);
    return out;
}

bool operator==(const Column& a, const Column& b) {
    if (a.name_ != b.name_ || a.kind_ != b.kind_ || a.size() != b.size()) return false;
    switch (a.kind_) {
        case ColumnKind::categorical:
            for (std::size_t i = 0; i < a.codes_.size(); ++i) {
                const auto ca = a.codes_[i];
                const auto cb = b.codes_[i];
                if ((ca < 0) != (cb < 0)) return false;
                if (ca >= 0 && a.dictionary_[static_cast<std::size_t>(ca)] != b.dictionary_[static_cast<std::size_t>(cb)])
                    return false;
            }
            return true;
        case ColumnKind::numeric:
            for (std::size_t i = 0; i < a.numbers_.size(); ++i) {
                const double x = a.numbers_[i];
                const double y = b.numbers_[i];
                if (std::isnan(x) != std::isnan(y)) return false;
                if (!std::isnan(x) && x != y) return false;
            }
            return true;
        case ColumnKind::binary: return a.bits_ == b.bits_;
    }
    return false;
}

Dataset::Dataset(std::string name, std::vector<Column> columns) : name_(std::move(name)) {
    row_count_ = columns.empty() ? 0 : columns.front().size();
    std::unordered_set<std::string> seen;
    columns_.reserve(columns.size());
    for (auto& c : columns) {
        if (c.size() != row_count_)
            throw std::invalid_argument("column " + c.name() + " has " + std::to_string(c.size()) +
                                        " rows, expected " + std::to_string(row_count_));
        if (!seen.insert(c.name()).second) throw std::invalid_argument("duplicate column name " + c.name());
        columns_.push_back(std::make_shared<const Column>(std::move(c)));
    }
}

const Column& Dataset::column(std::string_view name) const {
    if (const auto* c = find(name)) return *c;
    throw std::out_of_range("no column named " + std::string(name) + " in dataset " + name_);
}

const Column* Dataset::find(std::string_view name) const {
    for (const auto& c : columns_) {
        if (c->name() == name) return c.get();
    }
    return nullptr;
}

std::vector<std::string> Dataset::column_names() const {
    std::vector<std::string> names;
    names.reserve(columns_.size());
    for (const auto& c : columns_) names.push_back(c->name());
    return names;
}

Dataset Dataset::select(std::span<const std::string> names) const {
    Dataset out;
    out.name_ = name_;
    out.row_count_ = row_count_;
    std::unordered_set<std::string_view> seen;
    for (const auto& n : names) {
        if (!seen.insert(n).second) throw std::invalid_argument("column selected twice: " + n);
        bool found = false;
        for (const auto& c : columns_) {
            if (c->name() == n) {
                out.columns_.push_back(c);
                found = true;
                break;
            }
        }
        if (!found) throw std::out_of_range("no column named " + n + " in dataset " + name_);
    }
    return out;
}

Dataset Dataset::take(std::span<const std::size_t> rows) const {
    for (auto r : rows) {
        if (r >= row_count_) throw std::out_of_range("row index out of range");
    }
    Dataset out;
    out.name_ = name_;
    out.row_count_ = rows.size();
    out.columns_.reserve(columns_.size());
    for (const auto& c : columns_) out.columns_.push_back(std::make_shared<const Column>(c->take(rows)));
    return out;
}

Dataset Dataset::with_column(Column column) const {
    if (!columns_.empty() && column.size() != row_count_)
        throw std::invalid_argument("column " + column.name() + " length does not match dataset");
    if (has_column(column.name())) throw std::invalid_argument("duplicate column name " + column.name());
    Dataset out = *this;
    if (out.columns_.empty()) out.row_count_ = column.size();
    out.columns_.push_back(std::make_shared<const Column>(std::move(column)));
    return out;
}

Dataset Dataset::renamed(std::string name) const {
    Dataset out = *this;
    out.name_ = std::move(name);
    return out;
}

bool operator==(const Dataset& a, const Dataset& b) {
    if (a.name_ != b.name_ || a.row_count_ != b.row_count_ || a.columns_.size() != b.columns_.size()) return false;
    for (std::size_t i = 0; i < a.columns_.size(); ++i) {
        if (!(*a.columns_[i] == *b.columns_[i])) return false;
    }
    return true;
}

Dataset derive_indicator_metric(const Dataset& dataset, std::string_view source_column, double lower,
                                double upper, std::string target_name) {
    const Column& source = dataset.column(source_column);
    if (source.kind() != ColumnKind::numeric)
        throw std::invalid_argument("indicator source " + std::string(source_column) + " is not numeric");
    if (dataset.has_column(target_name))
        throw std::invalid_argument("indicator column " + target_name + " already exists");
    std::vector<std::int8_t> bits;
    bits.reserve(source.size());
    for (double v : source.numbers()) {
        if (std::isnan(v))
            bits.push_back(-1);
        else
            bits.push_back(lower <= v && v < upper ? 1 : 0);
    }
    return dataset.with_column(Column::binary(std::move(target_name), std::move(bits)));
}

}  // namespace regdiag
