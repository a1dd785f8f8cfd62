#pragma once

#include <cstddef>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace curtailkit::detail {

/// Chunked line splitter over an input stream. Lines are returned without the
/// trailing LF (and without a CR before it); views stay valid until the next call.
class LineReader {
public:
    explicit LineReader(std::istream& in, std::size_t chunk_size = 1 << 20);

    bool next(std::string_view& line);
    /// 1-based number of the line most recently returned.
    std::size_t line_number() const noexcept { return line_number_; }

private:
    bool refill();

    std::istream& in_;
    std::vector<char> buffer_;
    std::size_t begin_ = 0;
    std::size_t end_ = 0;
    std::size_t line_number_ = 0;
    bool eof_ = false;
    std::string carry_;
};

/// Splits on `delimiter` with no quoting; returns the number of fields written
/// (which may exceed `out.size()` to signal too many fields).
std::size_t split_plain(std::string_view line, char delimiter, std::string_view* out, std::size_t capacity) noexcept;

/// Splits one CSV record, honouring double-quoted fields with `""` escapes.
std::vector<std::string> split_quoted(std::string_view line, char delimiter);

bool parse_double(std::string_view text, double& out) noexcept;

} // namespace curtailkit::detail
