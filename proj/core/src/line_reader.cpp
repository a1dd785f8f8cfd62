#include "line_reader.hpp"

#include <charconv>
#include <cstring>

namespace curtailkit::detail {

LineReader::LineReader(std::istream& in, std::size_t chunk_size) : in_(in), buffer_(chunk_size) {}

bool LineReader::refill() {
    if (eof_) {
        return false;
    }
    in_.read(buffer_.data(), static_cast<std::streamsize>(buffer_.size()));
    const auto got = static_cast<std::size_t>(in_.gcount());
    begin_ = 0;
    end_ = got;
    if (got < buffer_.size()) {
        eof_ = true;
    }
    return got > 0;
}

bool LineReader::next(std::string_view& line) {
    carry_.clear();
    bool carrying = false;
    for (;;) {
        if (begin_ == end_ && !refill()) {
            if (!carrying) {
                return false;
            }
            line = carry_;
            break;
        }
        const char* base = buffer_.data() + begin_;
        const auto* nl = static_cast<const char*>(std::memchr(base, '\n', end_ - begin_));
        if (nl == nullptr) {
            carry_.append(base, end_ - begin_);
            carrying = true;
            begin_ = end_;
            continue;
        }
        const auto len = static_cast<std::size_t>(nl - base);
        if (carrying) {
            carry_.append(base, len);
            line = carry_;
        } else {
            line = std::string_view(base, len);
        }
        begin_ += len + 1;
        break;
    }
    if (!line.empty() && line.back() == '\r') {
        line.remove_suffix(1);
    }
    ++line_number_;
    return true;
}

std::size_t split_plain(std::string_view line, char delimiter, std::string_view* out, std::size_t capacity) noexcept {
    std::size_t count = 0;
    std::size_t pos = 0;
    for (;;) {
        const std::size_t next = line.find(delimiter, pos);
        if (count < capacity) {
            out[count] = line.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos);
        }
        ++count;
        if (next == std::string_view::npos) {
            return count;
        }
        pos = next + 1;
    }
}

std::vector<std::string> split_quoted(std::string_view line, char delimiter) {
    std::vector<std::string> fields;
    std::string current;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    current.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                current.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == delimiter) {
            fields.push_back(std::move(current));
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    fields.push_back(std::move(current));
    return fields;
}

bool parse_double(std::string_view text, double& out) noexcept {
    if (text.empty()) {
        return false;
    }
    if (text.front() == '+') {
        text.remove_prefix(1);
    }
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc() && ptr == text.data() + text.size();
}

} // namespace curtailkit::detail
