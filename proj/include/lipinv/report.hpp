/**
 * Deterministic report emission: JSON with 17-significant-digit numeric
 * formatting (so identical runs are byte-identical), column-oriented data
 * series for plotting, and the human-readable one-line summaries.
 */

#ifndef LIPINV_REPORT_HPP
#define LIPINV_REPORT_HPP

#include <algorithm>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "certificate.hpp"
#include "inverter.hpp"

namespace lipinv {

namespace detail {

inline void json_escape(std::ostream& os, const std::string& s)
{
    os << '"';
    for (char c : s) {
        switch (c) {
            case '"': os << "\\\""; break;
            case '\\': os << "\\\\"; break;
            case '\n': os << "\\n"; break;
            case '\t': os << "\\t"; break;
            case '\r': os << "\\r"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    os << buf;
                } else {
                    os << c;
                }
        }
    }
    os << '"';
}

inline void dump_json_17g(std::ostream& os, const Json& j, int indent, int depth)
{
    const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
    const std::string closing(static_cast<std::size_t>(indent * depth), ' ');
    switch (j.type()) {
        case Json::value_t::object: {
            if (j.empty()) {
                os << "{}";
                return;
            }
            // Json keeps insertion order; emit sorted so the bytes do not
            // depend on construction history.
            std::vector<std::string> keys;
            keys.reserve(j.size());
            for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
            std::sort(keys.begin(), keys.end());
            os << "{\n";
            for (std::size_t i = 0; i < keys.size(); ++i) {
                os << pad;
                json_escape(os, keys[i]);
                os << ": ";
                dump_json_17g(os, j.at(keys[i]), indent, depth + 1);
                if (i + 1 < keys.size()) os << ',';
                os << '\n';
            }
            os << closing << '}';
            return;
        }
        case Json::value_t::array: {
            if (j.empty()) {
                os << "[]";
                return;
            }
            os << "[\n";
            for (std::size_t i = 0; i < j.size(); ++i) {
                os << pad;
                dump_json_17g(os, j[i], indent, depth + 1);
                if (i + 1 < j.size()) os << ',';
                os << '\n';
            }
            os << closing << ']';
            return;
        }
        case Json::value_t::string: json_escape(os, j.get<std::string>()); return;
        case Json::value_t::boolean: os << (j.get<bool>() ? "true" : "false"); return;
        case Json::value_t::number_integer: os << j.get<std::int64_t>(); return;
        case Json::value_t::number_unsigned: os << j.get<std::uint64_t>(); return;
        case Json::value_t::number_float: os << format_17g(j.get<double>()); return;
        default: os << "null"; return;
    }
}

}  // namespace detail

/** Serialize with stable key order and 17-significant-digit doubles. */
inline std::string dump_report(const Json& j)
{
    std::ostringstream os;
    detail::dump_json_17g(os, j, 2, 0);
    os << '\n';
    return os.str();
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content)
{
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    require(out.good(), ErrorKind::InvalidArgument, "cannot write '" + path.string() + "'");
    out << content;
}

/** Two-column series, e.g. t vs m(t) or step vs residual. */
inline std::string format_series(const std::string& xlabel, const std::string& ylabel,
                                 const std::vector<double>& xs, const std::vector<double>& ys)
{
    require(xs.size() == ys.size(), ErrorKind::InvalidArgument, "series columns differ in length");
    std::ostringstream os;
    os << "# " << xlabel << ' ' << ylabel << '\n';
    for (std::size_t i = 0; i < xs.size(); ++i) os << format_17g(xs[i]) << ' ' << format_17g(ys[i]) << '\n';
    return os.str();
}

inline std::string profile_series(const RadialProfile& p) { return format_series("t", "value", p.radii, p.values); }

inline std::string trace_series(const InversionResult& r)
{
    std::ostringstream os;
    os << "# step s residual step_size newton_iters\n";
    for (const auto& st : r.trace)
        os << st.step_count << ' ' << format_17g(st.s) << ' ' << format_17g(st.residual) << ' '
           << format_17g(st.step_size) << ' ' << st.newton_iters << '\n';
    return os.str();
}

inline std::string timestamp_utc()
{
    std::time_t now = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    return buf;
}

/** One-line, human-readable verdict summary. */
inline std::string summary_line(const Certificate& c)
{
    std::ostringstream os;
    os << '[' << c.criterion << "] " << verdict_name(c.verdict);
    if (!c.label.empty() && c.label != verdict_name(c.verdict)) os << " (" << c.label << ")";
    if (!c.notes.empty()) os << " — " << c.notes.front();
    return os.str();
}

}  // namespace lipinv

#endif  // LIPINV_REPORT_HPP
