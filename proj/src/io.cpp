#include "qincompat/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace qincompat {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double parse_double(const std::string& s) {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == 0) throw DomainError("cannot parse '" + s + "' as a number");
    return v;
}

Json cmatrix_to_json(const CMatrix& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            row.push_back(Json::array({m(i, j).real(), m(i, j).imag()}));
        rows.push_back(std::move(row));
    }
    return rows;
}

CMatrix cmatrix_from_json(const Json& j) {
    if (!j.is_array() || j.empty()) throw DomainError("matrix JSON must be a non-empty array");
    const auto rows = j.size();
    const auto cols = j.at(0).size();
    CMatrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        const Json& row = j.at(r);
        if (!row.is_array() || row.size() != cols)
            throw DomainError("matrix JSON rows must have equal length");
        for (std::size_t c = 0; c < cols; ++c) {
            const Json& cell = row.at(c);
            if (cell.is_number()) {
                m(r, c) = Complex(cell.get<double>(), 0.0);
            } else if (cell.is_array() && cell.size() == 2) {
                m(r, c) = Complex(cell.at(0).get<double>(), cell.at(1).get<double>());
            } else {
                throw DomainError("matrix entries must be numbers or [re, im] pairs");
            }
        }
    }
    return m;
}

Json rmatrix_to_json(const RMatrix& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

RMatrix rmatrix_from_json(const Json& j) {
    if (!j.is_array() || j.empty()) throw DomainError("matrix JSON must be a non-empty array");
    const auto rows = j.size();
    const auto cols = j.at(0).size();
    RMatrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) m(r, c) = j.at(r).at(c).get<double>();
    return m;
}

Json estimation_to_json(const EstimationResult& res) {
    Json j;
    j["n_params"] = res.n_params;
    j["labels"] = res.labels;
    j["Jc"] = rmatrix_to_json(res.Jc);
    j["Jq"] = rmatrix_to_json(res.Jq);
    j["J"] = rmatrix_to_json(res.J);
    j["U"] = rmatrix_to_json(res.U);
    j["R"] = res.R;
    j["effective_rank"] = res.effective_rank;
    j["rank_reduced"] = res.rank_reduced;
    return j;
}

Json scaling_fit_to_json(const ScalingFit& fit) {
    Json j;
    j["amplitude"] = fit.amplitude;
    j["power"] = fit.power;
    j["log_power"] = fit.log_power;
    j["log_arg_scale"] = fit.log_arg_scale;
    j["log_offset"] = fit.log_offset;
    j["residual"] = fit.residual;
    j["window"] = Json::array({fit.window_lo, fit.window_hi});
    j["stderr_log_amplitude"] = fit.stderrs[0];
    j["stderr_log_power"] = fit.stderrs[1];
    j["stderr_power"] = fit.stderrs[2];
    return j;
}

std::pair<std::vector<std::string>, std::vector<std::string>> estimation_to_csv_row(
    const EstimationResult& res) {
    std::vector<std::string> names, values;
    auto label = [&](int i) {
        return i < static_cast<int>(res.labels.size()) ? res.labels[i] : std::to_string(i);
    };
    names.push_back("R");
    values.push_back(format_double(res.R));
    auto push_matrix = [&](const char* tag, const RMatrix& m) {
        for (int a = 0; a < res.n_params; ++a)
            for (int b = 0; b < res.n_params; ++b) {
                names.push_back(std::string(tag) + "_" + label(a) + "_" + label(b));
                values.push_back(format_double(m(a, b)));
            }
    };
    push_matrix("Jc", res.Jc);
    push_matrix("Jq", res.Jq);
    push_matrix("J", res.J);
    push_matrix("U", res.U);
    return {names, values};
}

int CsvTable::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return static_cast<int>(i);
    return -1;
}

std::vector<double> CsvTable::numeric_column(const std::string& name) const {
    const int idx = column_index(name);
    if (idx < 0) throw DomainError("CSV has no column named '" + name + "'");
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& row : rows) out.push_back(parse_double(row.at(idx)));
    return out;
}

std::string csv_to_string(const CsvTable& table) {
    std::ostringstream os;
    for (const auto& c : table.comments) os << "# " << c << "\n";
    for (std::size_t i = 0; i < table.columns.size(); ++i)
        os << table.columns[i] << (i + 1 < table.columns.size() ? "," : "");
    os << "\n";
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            os << row[i] << (i + 1 < row.size() ? "," : "");
        os << "\n";
    }
    return os.str();
}

void write_csv(const CsvTable& table, const std::string& path) {
    write_text_file(path, csv_to_string(table));
}

CsvTable parse_csv(const std::string& text) {
    CsvTable table;
    std::istringstream is(text);
    std::string line;
    bool have_header = false;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::string c = line.substr(1);
            if (!c.empty() && c[0] == ' ') c.erase(0, 1);
            table.comments.push_back(c);
            continue;
        }
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.push_back("");
        if (!have_header) {
            table.columns = std::move(cells);
            have_header = true;
        } else {
            table.rows.push_back(std::move(cells));
        }
    }
    if (!have_header) throw DomainError("CSV has no header row");
    return table;
}

CsvTable read_csv(const std::string& path) { return parse_csv(read_text_file(path)); }

CsvTable sweep_to_csv(const std::vector<SweepRow>& rows, ParamSet selector) {
    CsvTable t;
    t.comments.push_back("qincompat-sweep v1");
    t.comments.push_back(std::string("selector=") +
                         (selector == ParamSet::h_phi ? "h_phi" : "beta_h_phi"));
    t.columns = {"h",     "T",      "R",      "rank",  "Jc_bb", "Jc_bh", "Jc_hh",
                 "Jq_hh", "Jq_pp",  "U_hp",   "status"};
    for (const auto& row : rows) {
        std::vector<std::string> cells;
        cells.push_back(format_double(row.h));
        cells.push_back(format_double(row.T));
        cells.push_back(row.error.empty() ? format_double(row.R) : "nan");
        cells.push_back(std::to_string(row.effective_rank));
        cells.push_back(format_double(row.matrices.Jc(0, 0)));
        cells.push_back(format_double(row.matrices.Jc(0, 1)));
        cells.push_back(format_double(row.matrices.Jc(1, 1)));
        cells.push_back(format_double(row.matrices.Jq(1, 1)));
        cells.push_back(format_double(row.matrices.Jq(2, 2)));
        cells.push_back(format_double(row.matrices.U(1, 2)));
        std::string status = row.error.empty() ? "ok" : row.error;
        for (char& c : status)
            if (c == ',' || c == '\n') c = ';';
        cells.push_back(std::move(status));
        t.rows.push_back(std::move(cells));
    }
    return t;
}

std::string read_text_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw DomainError("cannot open file: " + path);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DomainError("cannot write file: " + path);
    f << text;
}

} // namespace qincompat
