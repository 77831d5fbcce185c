#include "gridseg/matpower.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>
#include <vector>

#include "gridseg/error.hpp"

namespace gridseg {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

struct Row {
    std::size_t line;
    std::vector<double> values;
};

struct Matrix {
    std::size_t line;
    std::vector<Row> rows;
};

/// Line-oriented scanner over MATPOWER text with `%` comments stripped.
class Scanner {
public:
    explicit Scanner(std::string_view text) {
        std::size_t start = 0;
        while (start <= text.size()) {
            auto end = text.find('\n', start);
            if (end == std::string_view::npos) {
                end = text.size();
            }
            auto line = text.substr(start, end - start);
            line = strip_comment(line);
            lines_.push_back(std::string(line));
            start = end + 1;
        }
    }

    std::size_t line_count() const { return lines_.size(); }
    const std::string& line(std::size_t i) const { return lines_[i]; }

private:
    static std::string_view strip_comment(std::string_view line) {
        bool quoted = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '\'') {
                quoted = !quoted;
            } else if (line[i] == '%' && !quoted) {
                return line.substr(0, i);
            }
        }
        return line;
    }

    std::vector<std::string> lines_;
};

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
        s.remove_prefix(1);
    }
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
        s.remove_suffix(1);
    }
    return s;
}

double parse_number(std::string_view token, std::size_t line) {
    std::string buffer(token);
    char* end = nullptr;
    double value = std::strtod(buffer.c_str(), &end);
    if (end == buffer.c_str() || *end != '\0') {
        throw ParseError(line, "invalid number '" + buffer + "'");
    }
    return value;
}

/// Splits the body of a numeric matrix into rows. Rows end at ';' or at a
/// line break; empty rows are dropped.
void append_rows(std::string_view body, std::size_t line, std::vector<Row>& rows) {
    std::size_t start = 0;
    while (start <= body.size()) {
        auto end = body.find(';', start);
        if (end == std::string_view::npos) {
            end = body.size();
        }
        auto chunk = body.substr(start, end - start);
        Row row{line, {}};
        std::size_t pos = 0;
        while (pos < chunk.size()) {
            while (pos < chunk.size() &&
                   (std::isspace(static_cast<unsigned char>(chunk[pos])) || chunk[pos] == ',')) {
                ++pos;
            }
            auto token_start = pos;
            while (pos < chunk.size() &&
                   !(std::isspace(static_cast<unsigned char>(chunk[pos])) || chunk[pos] == ',')) {
                ++pos;
            }
            if (pos > token_start) {
                row.values.push_back(parse_number(chunk.substr(token_start, pos - token_start), line));
            }
        }
        if (!row.values.empty()) {
            rows.push_back(std::move(row));
        }
        start = end + 1;
    }
}

struct RawCase {
    std::string function_name;
    std::optional<double> base_mva;
    std::optional<Matrix> bus;
    std::optional<Matrix> gen;
    std::optional<Matrix> branch;
};

RawCase scan(std::string_view text) {
    Scanner scanner(text);
    RawCase raw;
    std::size_t i = 0;
    const auto n = scanner.line_count();
    while (i < n) {
        const auto line_no = i + 1;
        auto line = trim(scanner.line(i));
        if (line.starts_with("function")) {
            auto eq = line.find('=');
            auto name = trim(eq == std::string_view::npos ? line.substr(8) : line.substr(eq + 1));
            raw.function_name = std::string(name);
            ++i;
            continue;
        }
        if (!line.starts_with("mpc.")) {
            ++i;
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ParseError(line_no, "expected '=' in assignment");
        }
        auto field = trim(line.substr(4, eq - 4));
        auto rhs = trim(line.substr(eq + 1));

        if (!rhs.empty() && (rhs.front() == '[' || rhs.front() == '{')) {
            const char close = rhs.front() == '[' ? ']' : '}';
            const bool numeric = rhs.front() == '[';
            const bool wanted = field == "bus" || field == "gen" || field == "branch";
            Matrix matrix{line_no, {}};
            auto body = rhs.substr(1);
            std::size_t j = i;
            bool closed = false;
            while (true) {
                auto close_pos = body.find(close);
                auto content = close_pos == std::string_view::npos ? body : body.substr(0, close_pos);
                if (numeric && wanted) {
                    append_rows(content, j + 1, matrix.rows);
                }
                if (close_pos != std::string_view::npos) {
                    closed = true;
                    break;
                }
                if (++j >= n) {
                    break;
                }
                body = scanner.line(j);
            }
            if (!closed) {
                throw ParseError(line_no, "unterminated matrix mpc." + std::string(field));
            }
            if (field == "bus") {
                raw.bus = std::move(matrix);
            } else if (field == "gen") {
                raw.gen = std::move(matrix);
            } else if (field == "branch") {
                raw.branch = std::move(matrix);
            }
            i = j + 1;
            continue;
        }

        if (field == "baseMVA") {
            auto value = rhs;
            if (auto semi = value.find(';'); semi != std::string_view::npos) {
                value = trim(value.substr(0, semi));
            }
            raw.base_mva = parse_number(value, line_no);
        }
        ++i;
    }
    return raw;
}

void require_columns(const Row& row, std::size_t needed, const char* matrix) {
    if (row.values.size() < needed) {
        throw ParseError(row.line, std::string("mpc.") + matrix + " row has " +
                                       std::to_string(row.values.size()) + " columns, expected at least " +
                                       std::to_string(needed));
    }
}

int as_id(double value, std::size_t line, const char* what) {
    if (value != std::floor(value) || value < 1 || value > 2147483647.0) {
        throw ParseError(line, std::string("invalid ") + what + " id");
    }
    return static_cast<int>(value);
}

} // namespace

GridCase parse_matpower(std::string_view text, std::string name) {
    auto raw = scan(text);
    if (!raw.base_mva) {
        throw ParseError(0, "missing mpc.baseMVA");
    }
    if (!raw.bus) {
        throw ParseError(0, "missing matrix mpc.bus");
    }
    if (!raw.gen) {
        throw ParseError(0, "missing matrix mpc.gen");
    }
    if (!raw.branch) {
        throw ParseError(0, "missing matrix mpc.branch");
    }

    std::vector<Bus> buses;
    std::unordered_map<int, std::size_t> seen;
    for (const auto& row : raw.bus->rows) {
        require_columns(row, 10, "bus");
        const auto& v = row.values;
        Bus bus;
        bus.id = as_id(v[0], row.line, "bus");
        switch (static_cast<int>(v[1])) {
        case 1:
            bus.type = BusType::PQ;
            break;
        case 2:
            bus.type = BusType::PV;
            break;
        case 3:
            bus.type = BusType::Slack;
            break;
        default:
            throw ParseError(row.line, "unsupported bus type " + std::to_string(static_cast<int>(v[1])));
        }
        bus.pd = v[2];
        bus.qd = v[3];
        bus.gs = v[4];
        bus.bs = v[5];
        bus.area = static_cast<int>(v[6]);
        bus.vm = v[7];
        bus.va = v[8] * kDegToRad;
        bus.base_kv = v[9];
        if (!seen.emplace(bus.id, buses.size()).second) {
            throw ParseError(row.line, "duplicate bus id " + std::to_string(bus.id));
        }
        buses.push_back(bus);
    }

    std::vector<Generator> generators;
    for (const auto& row : raw.gen->rows) {
        require_columns(row, 8, "gen");
        const auto& v = row.values;
        Generator gen;
        gen.bus = as_id(v[0], row.line, "bus");
        if (!seen.contains(gen.bus)) {
            throw ParseError(row.line, "generator refers to missing bus " + std::to_string(gen.bus));
        }
        gen.pg = v[1];
        gen.qg = v[2];
        gen.vg = v[5];
        gen.in_service = v[7] > 0;
        generators.push_back(gen);
    }

    std::vector<Branch> branches;
    for (const auto& row : raw.branch->rows) {
        require_columns(row, 11, "branch");
        const auto& v = row.values;
        Branch br;
        br.index = branches.size();
        br.from = as_id(v[0], row.line, "bus");
        br.to = as_id(v[1], row.line, "bus");
        for (int end : {br.from, br.to}) {
            if (!seen.contains(end)) {
                throw ParseError(row.line, "branch refers to missing bus " + std::to_string(end));
            }
        }
        br.r = v[2];
        br.x = v[3];
        br.b = v[4];
        br.tap = v[8];
        br.shift = v[9] * kDegToRad;
        br.in_service = v[10] > 0;
        branches.push_back(br);
    }

    if (name.empty()) {
        name = raw.function_name;
    }
    return GridCase(std::move(name), *raw.base_mva, std::move(buses), std::move(branches),
                    std::move(generators));
}

GridCase load_matpower(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open case file " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    auto grid = parse_matpower(buffer.str());
    if (grid.name().empty()) {
        return GridCase(path.stem().string(), grid.base_mva(),
                        {grid.buses().begin(), grid.buses().end()},
                        {grid.branches().begin(), grid.branches().end()},
                        {grid.generators().begin(), grid.generators().end()});
    }
    return grid;
}

} // namespace gridseg
