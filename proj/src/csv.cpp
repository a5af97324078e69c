#include "regdiag/csv.hpp"

#include <charconv>
#include <cmath>
#include <deque>
#include <fstream>
#include <istream>
#include <iterator>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "regdiag/errors.hpp"

namespace regdiag {

namespace {

struct StringHash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept { return std::hash<std::string_view>{}(s); }
};

// Per-column token dictionary built while scanning. Code 0 is reserved for the
// empty token (null) so kind inference only has to inspect distinct tokens.
struct ColumnBuilder {
    std::string name;
    std::vector<std::string> tokens{""};
    std::unordered_map<std::string, std::int32_t, StringHash, std::equal_to<>> index{{"", 0}};
    std::vector<std::int32_t> codes;

    void add(std::string_view token) {
        auto it = index.find(token);
        if (it == index.end()) {
            const auto code = static_cast<std::int32_t>(tokens.size());
            tokens.emplace_back(token);
            it = index.emplace(std::string(token), code).first;
        }
        codes.push_back(it->second);
    }
};

std::optional<double> parse_finite(std::string_view token) {
    double value = 0.0;
    const char* first = token.data();
    const char* last = first + token.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || !std::isfinite(value)) return std::nullopt;
    return value;
}

Column finish(ColumnBuilder& b) {
    bool binary = true;
    bool numeric = true;
    std::vector<double> numbers(b.tokens.size(), std::nan(""));
    std::vector<std::int8_t> bits(b.tokens.size(), -1);
    for (std::size_t i = 1; i < b.tokens.size(); ++i) {
        const auto& t = b.tokens[i];
        if (t == "0" || t == "false") {
            bits[i] = 0;
        } else if (t == "1" || t == "true") {
            bits[i] = 1;
        } else {
            binary = false;
        }
        if (numeric) {
            if (auto v = parse_finite(t))
                numbers[i] = *v;
            else
                numeric = false;
        }
    }
    if (binary) {
        std::vector<std::int8_t> values;
        values.reserve(b.codes.size());
        for (auto c : b.codes) values.push_back(bits[static_cast<std::size_t>(c)]);
        return Column::binary(std::move(b.name), std::move(values));
    }
    if (numeric) {
        std::vector<double> values;
        values.reserve(b.codes.size());
        for (auto c : b.codes) values.push_back(numbers[static_cast<std::size_t>(c)]);
        return Column::numeric(std::move(b.name), std::move(values));
    }
    std::vector<std::string> dictionary(std::make_move_iterator(b.tokens.begin() + 1),
                                        std::make_move_iterator(b.tokens.end()));
    for (auto& c : b.codes) c -= 1;
    return Column::categorical(std::move(b.name), std::move(dictionary), std::move(b.codes));
}

// Splits one record starting at `pos`; returns false at end of input.
class RecordReader {
public:
    explicit RecordReader(std::string_view text) : text_(text) {}

    bool next(std::vector<std::string_view>& fields) {
        fields.clear();
        scratch_.clear();
        if (pos_ >= text_.size()) return false;
        ++record_;
        while (true) {
            if (pos_ < text_.size() && text_[pos_] == '"') {
                fields.push_back(quoted());
            } else {
                std::size_t start = pos_;
                while (pos_ < text_.size() && text_[pos_] != ',' && text_[pos_] != '\n' && text_[pos_] != '\r') {
                    if (text_[pos_] == '"') throw ParseError(record_, "unexpected quote inside unquoted field");
                    ++pos_;
                }
                fields.push_back(text_.substr(start, pos_ - start));
            }
            if (pos_ >= text_.size()) return true;
            const char c = text_[pos_];
            if (c == ',') {
                ++pos_;
                continue;
            }
            if (c == '\r') ++pos_;
            if (pos_ < text_.size() && text_[pos_] == '\n') ++pos_;
            return true;
        }
    }

    std::size_t record() const noexcept { return record_; }

private:
    std::string_view quoted() {
        ++pos_;
        std::string value;
        while (true) {
            if (pos_ >= text_.size()) throw ParseError(record_, "unterminated quoted field");
            const char c = text_[pos_++];
            if (c == '"') {
                if (pos_ < text_.size() && text_[pos_] == '"') {
                    value.push_back('"');
                    ++pos_;
                } else {
                    break;
                }
            } else {
                value.push_back(c);
            }
        }
        if (pos_ < text_.size() && text_[pos_] != ',' && text_[pos_] != '\n' && text_[pos_] != '\r')
            throw ParseError(record_, "characters after closing quote");
        scratch_.push_back(std::move(value));
        return scratch_.back();
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t record_ = 0;
    // Unescaped quoted values; a deque keeps views stable across push_back.
    std::deque<std::string> scratch_;
};

bool needs_quotes(std::string_view s) {
    return s.find_first_of(",\"\r\n") != std::string_view::npos;
}

void write_field(std::ostream& out, std::string_view s) {
    if (!needs_quotes(s)) {
        out << s;
        return;
    }
    out << '"';
    for (char c : s) {
        if (c == '"') out << '"';
        out << c;
    }
    out << '"';
}

}  // namespace

Dataset load_dataset(std::string_view text, std::string name) {
    if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
    RecordReader reader(text);
    std::vector<std::string_view> fields;
    if (!reader.next(fields)) throw ParseError(1, "missing header row");

    std::vector<ColumnBuilder> builders(fields.size());
    std::unordered_set<std::string_view> seen;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (fields[i].empty()) throw ParseError(1, "empty column name at position " + std::to_string(i + 1));
        if (!seen.insert(fields[i]).second) throw ParseError(1, "duplicate column name " + std::string(fields[i]));
        builders[i].name = std::string(fields[i]);
    }

    while (reader.next(fields)) {
        if (fields.size() != builders.size())
            throw ParseError(reader.record(), "expected " + std::to_string(builders.size()) + " fields, found " +
                                                  std::to_string(fields.size()));
        for (std::size_t i = 0; i < fields.size(); ++i) builders[i].add(fields[i]);
    }

    std::vector<Column> columns;
    columns.reserve(builders.size());
    for (auto& b : builders) columns.push_back(finish(b));
    return Dataset(std::move(name), std::move(columns));
}

Dataset load_dataset(std::istream& source, std::string name) {
    std::string text{std::istreambuf_iterator<char>(source), std::istreambuf_iterator<char>()};
    return load_dataset(std::string_view(text), std::move(name));
}

Dataset load_dataset_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return load_dataset(std::string_view(buffer.str()), path.stem().string());
}

void write_csv(const Dataset& dataset, std::ostream& out) {
    for (std::size_t j = 0; j < dataset.column_count(); ++j) {
        if (j) out << ',';
        write_field(out, dataset.column(j).name());
    }
    out << '\n';
    for (std::size_t i = 0; i < dataset.row_count(); ++i) {
        for (std::size_t j = 0; j < dataset.column_count(); ++j) {
            if (j) out << ',';
            const Column& col = dataset.column(j);
            auto token = col.token(i);
            if (!token) continue;
            if (col.kind() == ColumnKind::numeric && (*token == "0" || *token == "1" || *token == "-0"))
                *token += ".0";
            write_field(out, *token);
        }
        out << '\n';
    }
}

std::string to_csv(const Dataset& dataset) {
    std::ostringstream out;
    write_csv(dataset, out);
    return out.str();
}

}  // namespace regdiag
