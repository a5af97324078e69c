#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace regdiag {

enum class ColumnKind { categorical, numeric, binary };

std::string_view to_string(ColumnKind kind);

/// One named, typed, null-aware column.
///
/// Storage depends on the kind:
///   categorical: dictionary of labels plus one code per row (-1 = null)
///   numeric:     one double per row (NaN = null; non-null values are finite)
///   binary:      one int8 per row in {0, 1} (-1 = null)
class Column {
public:
    static Column categorical(std::string name, const std::vector<std::optional<std::string>>& values);
    /// Codes index into `dictionary`; -1 marks null. Empty labels are not allowed.
    static Column categorical(std::string name, std::vector<std::string> dictionary,
                              std::vector<std::int32_t> codes);
    static Column numeric(std::string name, const std::vector<std::optional<double>>& values);
    /// NaN marks null.
    static Column numeric(std::string name, std::vector<double> values);
    /// -1 marks null.
    static Column binary(std::string name, std::vector<std::int8_t> values);

    const std::string& name() const noexcept { return name_; }
    ColumnKind kind() const noexcept { return kind_; }
    std::size_t size() const noexcept;

    bool is_null(std::size_t row) const;
    std::size_t null_count() const;

    // Kind-specific views. Calling the wrong one throws std::logic_error.
    std::span<const std::int32_t> codes() const;
    const std::vector<std::string>& dictionary() const;
    std::span<const double> numbers() const;
    std::span<const std::int8_t> bits() const;

    /// Text token for the row (binary "0"/"1", numeric shortest round-trip form),
    /// or nullopt for null.
    std::optional<std::string> token(std::size_t row) const;

    /// Categorical view of a categorical or binary column; binary maps to
    /// labels "0" and "1". Numeric columns throw std::logic_error.
    Column as_categorical() const;

    Column take(std::span<const std::size_t> rows) const;
    Column renamed(std::string name) const;

    /// Logical equality: same name, kind, and per-row values. Dictionary order
    /// and unused dictionary entries are ignored.
    friend bool operator==(const Column& a, const Column& b);

private:
    Column(std::string name, ColumnKind kind) : name_(std::move(name)), kind_(kind) {}

    std::string name_;
    ColumnKind kind_;
    std::vector<std::string> dictionary_;
    std::vector<std::int32_t> codes_;
    std::vector<double> numbers_;
    std::vector<std::int8_t> bits_;
};

/// Immutable table of equally long, uniquely named columns. Columns are shared
/// between datasets derived with `select`, so projection is cheap.
class Dataset {
public:
    Dataset() = default;
    Dataset(std::string name, std::vector<Column> columns);

    const std::string& name() const noexcept { return name_; }
    std::size_t row_count() const noexcept { return row_count_; }
    std::size_t column_count() const noexcept { return columns_.size(); }

    const Column& column(std::size_t index) const { return *columns_.at(index); }
    /// Throws std::out_of_range when absent.
    const Column& column(std::string_view name) const;
    const Column* find(std::string_view name) const;
    bool has_column(std::string_view name) const { return find(name) != nullptr; }
    std::vector<std::string> column_names() const;

    Dataset select(std::span<const std::string> names) const;
    Dataset take(std::span<const std::size_t> rows) const;
    Dataset with_column(Column column) const;
    Dataset renamed(std::string name) const;

    friend bool operator==(const Dataset& a, const Dataset& b);

private:
    std::string name_;
    std::size_t row_count_ = 0;
    std::vector<std::shared_ptr<const Column>> columns_;
};

/// Adds a binary column that is 1 iff lower <= value < upper (null stays null).
/// The source column must be numeric; `target_name` must be new.
Dataset derive_indicator_metric(const Dataset& dataset, std::string_view source_column, double lower,
                                double upper, std::string target_name);

}  // namespace regdiag
