// csv.hpp — RFC-4180 rows with round-trippable doubles

#pragma once

#include <cstdint>
#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>

namespace adfs::csv {

// %.17g, '.' decimal separator regardless of locale; "nan", "inf", "-inf" otherwise.
std::string format_double(double v);

// Quotes a field when it contains a comma, quote, CR or LF.
std::string escape(std::string_view field);

class Writer {
public:
    explicit Writer(std::ostream& out) : out_(out) {}

    void header(std::initializer_list<std::string_view> names);

    Writer& operator<<(double v);
    Writer& operator<<(std::int64_t v);
    Writer& operator<<(int v) { return *this << static_cast<std::int64_t>(v); }
    Writer& operator<<(bool v) { return *this << static_cast<std::int64_t>(v ? 1 : 0); }
    Writer& operator<<(std::string_view v);
    Writer& operator<<(const char* v) { return *this << std::string_view(v); }

    // Terminates the current row with CRLF.
    void end_row();

private:
    void separator();

    std::ostream& out_;
    bool row_started_{false};
};

}  // namespace adfs::csv
