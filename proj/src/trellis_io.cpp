#include "trellis/trellis_io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "trellis/errors.hpp"

namespace trellis {

namespace {

std::vector<std::string_view> split_words(std::string_view line)
{
    std::vector<std::string_view> words;
    std::size_t pos = 0;
    while (pos < line.size()) {
        while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t' || line[pos] == '\r')) ++pos;
        const auto start = pos;
        while (pos < line.size() && line[pos] != ' ' && line[pos] != '\t' && line[pos] != '\r') ++pos;
        if (pos > start) words.push_back(line.substr(start, pos - start));
    }
    return words;
}

std::string_view keyed(std::string_view word, std::string_view key, std::size_t line_no)
{
    if (word.size() <= key.size() || word.substr(0, key.size()) != key || word[key.size()] != '=')
        throw ParseError("line " + std::to_string(line_no) + ": expected " + std::string(key) + "=<value>");
    return word.substr(key.size() + 1);
}

long long parse_integer(std::string_view text, std::size_t line_no)
{
    long long value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw ParseError("line " + std::to_string(line_no) + ": bad integer '" + std::string(text) + "'");
    return value;
}

} // namespace

std::string format_real(double value)
{
    std::array<char, 32> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), ptr);
}

double parse_real(std::string_view text)
{
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw ParseError("bad real number '" + std::string(text) + "'");
    return value;
}

Trellis read_trellis(std::istream& in)
{
    std::string line;
    std::size_t line_no = 0;
    std::optional<TrellisBuilder> builder;
    std::unordered_map<long long, VertexId> vertices;
    std::unordered_map<long long, bool> edge_ids;

    while (std::getline(in, line)) {
        ++line_no;
        const auto words = split_words(line);
        if (words.empty() || words[0].front() == '#') continue;
        const auto where = "line " + std::to_string(line_no) + ": ";

        if (words[0] == "trellis") {
            if (builder) throw ParseError(where + "duplicate header");
            if (words.size() != 2) throw ParseError(where + "expected 'trellis rank=<n>'");
            builder.emplace(static_cast<int>(parse_integer(keyed(words[1], "rank", line_no), line_no)));
            continue;
        }
        if (!builder) throw ParseError(where + "missing 'trellis rank=<n>' header");

        try {
            if (words[0] == "v") {
                if (words.size() != 3) throw ParseError(where + "expected 'v <id> depth=<i>'");
                const auto id = parse_integer(words[1], line_no);
                const auto depth = parse_integer(keyed(words[2], "depth", line_no), line_no);
                if (!vertices.emplace(id, builder->add_vertex(static_cast<int>(depth))).second)
                    throw ParseError(where + "duplicate vertex id " + std::to_string(id));
            } else if (words[0] == "e") {
                if (words.size() != 6)
                    throw ParseError(where + "expected 'e <id> <init> <fin> lambda=<value> clabel=<value>'");
                const auto id = parse_integer(words[1], line_no);
                if (!edge_ids.emplace(id, true).second) throw ParseError(where + "duplicate edge id " + std::to_string(id));
                const auto init = vertices.find(parse_integer(words[2], line_no));
                const auto fin = vertices.find(parse_integer(words[3], line_no));
                if (init == vertices.end() || fin == vertices.end())
                    throw ParseError(where + "edge refers to an undeclared vertex");
                builder->add_edge(init->second, fin->second, parse_real(keyed(words[4], "lambda", line_no)),
                                  parse_real(keyed(words[5], "clabel", line_no)));
            } else {
                throw ParseError(where + "unknown record '" + std::string(words[0]) + "'");
            }
        } catch (const ParseError&) {
            throw;
        } catch (const Error& err) {
            throw ParseError(where + err.what());
        }
    }
    if (!builder) throw ParseError("empty trellis file");
    return builder->build();
}

void write_trellis(std::ostream& out, const Trellis& t)
{
    out << "trellis rank=" << t.rank() << '\n';
    for (VertexId v = 0; v < t.num_vertices(); ++v) out << "v " << v << " depth=" << t.depth(v) << '\n';
    for (const Edge& e : t.edges())
        out << "e " << e.id << ' ' << e.init << ' ' << e.fin << " lambda=" << format_real(e.lambda)
            << " clabel=" << format_real(e.clabel) << '\n';
}

Trellis load_trellis(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw Error("cannot open trellis file " + path.string());
    return read_trellis(in);
}

void save_trellis(const std::filesystem::path& path, const Trellis& trellis)
{
    std::ofstream out(path);
    if (!out) throw Error("cannot write trellis file " + path.string());
    write_trellis(out, trellis);
}

std::vector<double> read_reals(std::istream& in)
{
    std::vector<double> values;
    std::string line;
    while (std::getline(in, line)) {
        const auto words = split_words(line);
        if (words.empty() || words[0].front() == '#') continue;
        if (words.size() != 1) throw ParseError("expected one real per line, got '" + line + "'");
        values.push_back(parse_real(words[0]));
    }
    return values;
}

std::vector<double> load_reals(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw Error("cannot open file " + path.string());
    return read_reals(in);
}

void write_reals(std::ostream& out, const std::vector<double>& values)
{
    for (double v : values) out << format_real(v) << '\n';
}

} // namespace trellis
