// csv.cpp

#include "adfs/csv.hpp"

#include <charconv>
#include <cmath>

namespace adfs::csv {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

std::string escape(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
    std::string out;
    out.reserve(field.size() + 2);
    out.push_back('"');
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

void Writer::separator() {
    if (row_started_) out_ << ',';
    row_started_ = true;
}

void Writer::header(std::initializer_list<std::string_view> names) {
    for (auto n : names) *this << n;
    end_row();
}

Writer& Writer::operator<<(double v) {
    separator();
    out_ << format_double(v);
    return *this;
}

Writer& Writer::operator<<(std::int64_t v) {
    separator();
    out_ << v;
    return *this;
}

Writer& Writer::operator<<(std::string_view v) {
    separator();
    out_ << escape(v);
    return *this;
}

void Writer::end_row() {
    out_ << "\r\n";
    row_started_ = false;
}

}  // namespace adfs::csv
