#include "blockip/io.hpp"

#include <fstream>
#include <sstream>

namespace blockip {

namespace {

struct LineReader {
    std::istream& in;
    std::string name;
    size_t line_no = 0;
    std::string line;

    bool next() {
        while (std::getline(in, line)) {
            ++line_no;
            size_t pos = line.find('#');
            if (pos != std::string::npos) line = line.substr(0, pos);
            size_t a = line.find_first_not_of(" \t\r");
            if (a == std::string::npos) continue;
            size_t b = line.find_last_not_of(" \t\r");
            line = line.substr(a, b - a + 1);
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw parse_error(name + ":" + std::to_string(line_no) + ": " + msg);
    }

    std::string expect_line() {
        if (!next()) fail("unexpected end of file");
        return line;
    }

    std::vector<std::string> tokens() const {
        std::vector<std::string> out;
        std::istringstream ss(line);
        std::string t;
        while (ss >> t) out.push_back(t);
        return out;
    }

    i64 to_int(const std::string& t) const {
        try {
            size_t used = 0;
            i64 v = std::stoll(t, &used);
            if (used != t.size()) fail("bad integer '" + t + "'");
            return v;
        } catch (const parse_error&) {
            throw;
        } catch (const std::exception&) {
            fail("bad integer '" + t + "'");
        }
    }

    std::vector<i64> int_row(size_t expected) {
        expect_line();
        auto ts = tokens();
        if (ts.size() != expected)
            fail("expected " + std::to_string(expected) + " entries, got " +
                 std::to_string(ts.size()));
        std::vector<i64> out;
        out.reserve(ts.size());
        for (const auto& t : ts) out.push_back(to_int(t));
        return out;
    }
};

void expect_header(LineReader& r, const std::string& kind) {
    std::string h = r.expect_line();
    if (h != "blockip " + kind + " v1")
        r.fail("expected header 'blockip " + kind + " v1'");
}

SmallMatrix read_block(LineReader& r, const std::string& label) {
    std::string l = r.expect_line();
    auto ts = r.tokens();
    if (ts.size() != 3 || ts[0] != label)
        r.fail("expected '" + label + " <rows> <cols>'");
    int rows = (int)r.to_int(ts[1]), cols = (int)r.to_int(ts[2]);
    if (rows < 0 || cols < 0) r.fail("negative dimension");
    std::vector<i64> entries;
    entries.reserve((size_t)rows * cols);
    for (int i = 0; i < rows; ++i) {
        auto row = r.int_row((size_t)cols);
        entries.insert(entries.end(), row.begin(), row.end());
    }
    return SmallMatrix(rows, cols, std::move(entries));
}

std::vector<i64> read_labeled_ints(LineReader& r, const std::string& label,
                                   size_t expected) {
    r.expect_line();
    auto ts = r.tokens();
    if (ts.empty() || ts[0] != label) r.fail("expected '" + label + " ...'");
    if (ts.size() != expected + 1)
        r.fail(label + ": expected " + std::to_string(expected) + " entries, got " +
               std::to_string(ts.size() - 1));
    std::vector<i64> out;
    for (size_t i = 1; i < ts.size(); ++i) out.push_back(r.to_int(ts[i]));
    return out;
}

std::vector<Bound> read_bounds(LineReader& r, const std::string& label,
                               size_t expected) {
    r.expect_line();
    auto ts = r.tokens();
    if (ts.empty() || ts[0] != label) r.fail("expected '" + label + " ...'");
    if (ts.size() != expected + 1)
        r.fail(label + ": expected " + std::to_string(expected) + " entries, got " +
               std::to_string(ts.size() - 1));
    std::vector<Bound> out;
    for (size_t i = 1; i < ts.size(); ++i) {
        if (ts[i] == "-inf") out.push_back(Bound::neg_inf());
        else if (ts[i] == "+inf" || ts[i] == "inf") out.push_back(Bound::pos_inf());
        else out.push_back(Bound::finite(r.to_int(ts[i])));
    }
    return out;
}

void expect_end(LineReader& r) {
    if (r.expect_line() != "end") r.fail("expected 'end'");
}

std::string bound_str(const Bound& b) {
    switch (b.kind) {
        case Bound::Kind::NegInf: return "-inf";
        case Bound::Kind::PosInf: return "+inf";
        default: return std::to_string(b.value);
    }
}

void append_matrix_rows(std::ostringstream& os, const SmallMatrix& m) {
    for (int r = 0; r < m.rows(); ++r) {
        for (int c = 0; c < m.cols(); ++c) {
            if (c) os << ' ';
            os << m.at(r, c);
        }
        os << '\n';
    }
}

}  // namespace

/////////////////////////////////////////////////////////////////////////////

IPInstance parse_instance(std::istream& in, const std::string& name) {
    LineReader r{in, name, 0, {}};
    expect_header(r, "instance");
    std::string mode = r.expect_line();

    if (mode == "blocks") {
        bool three = false;
        std::string l = r.expect_line();
        auto ts = r.tokens();
        if (ts.size() == 2 && ts[0] == "three_block") {
            three = r.to_int(ts[1]) != 0;
            r.expect_line();
            ts = r.tokens();
        }
        if (ts.size() != 2 || ts[0] != "n") r.fail("expected 'n <count>'");
        int n = (int)r.to_int(ts[1]);
        SmallMatrix A = read_block(r, "A");
        SmallMatrix B = read_block(r, "B");
        SmallMatrix C = read_block(r, "C");
        SmallMatrix D = read_block(r, "D");
        FourBlockSpec spec;
        try {
            spec = FourBlockSpec(A, B, C, D, n);
        } catch (const dim_error& e) {
            r.fail(e.what());
        }
        auto b = read_labeled_ints(r, "b", (size_t)spec.num_rows());
        auto lo = read_bounds(r, "lower", (size_t)spec.num_cols());
        auto hi = read_bounds(r, "upper", (size_t)spec.num_cols());
        auto w = read_labeled_ints(r, "w", (size_t)spec.num_cols());
        expect_end(r);
        try {
            return IPInstance::from_spec(spec, three, b, lo, hi, w);
        } catch (const dim_error& e) {
            r.fail(e.what());
        }
    }

    if (mode.rfind("matrix", 0) == 0) {
        auto ts = r.tokens();
        if (ts.size() != 3) r.fail("expected 'matrix <rows> <cols>'");
        int rows = (int)r.to_int(ts[1]), cols = (int)r.to_int(ts[2]);
        std::vector<i64> entries;
        for (int i = 0; i < rows; ++i) {
            auto row = r.int_row((size_t)cols);
            entries.insert(entries.end(), row.begin(), row.end());
        }
        SmallMatrix m(rows, cols, std::move(entries));
        auto b = read_labeled_ints(r, "b", (size_t)rows);
        auto lo = read_bounds(r, "lower", (size_t)cols);
        auto hi = read_bounds(r, "upper", (size_t)cols);
        auto w = read_labeled_ints(r, "w", (size_t)cols);
        expect_end(r);
        try {
            return IPInstance::from_matrix(m, b, lo, hi, w);
        } catch (const dim_error& e) {
            r.fail(e.what());
        }
    }

    r.fail("expected 'blocks' or 'matrix <rows> <cols>'");
}

IPInstance parse_instance_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error(path + ": cannot open");
    return parse_instance(in, path);
}

std::string serialize_instance(const IPInstance& inst) {
    std::ostringstream os;
    os << "blockip instance v1\n";
    if (inst.is_block()) {
        const FourBlockSpec& s = *inst.spec;
        os << "blocks\n";
        os << "three_block " << (inst.three_block ? 1 : 0) << '\n';
        os << "n " << s.n << '\n';
        os << "A " << s.A.rows() << ' ' << s.A.cols() << '\n';
        append_matrix_rows(os, s.A);
        os << "B " << s.B.rows() << ' ' << s.B.cols() << '\n';
        append_matrix_rows(os, s.B);
        os << "C " << s.C.rows() << ' ' << s.C.cols() << '\n';
        append_matrix_rows(os, s.C);
        os << "D " << s.D.rows() << ' ' << s.D.cols() << '\n';
        append_matrix_rows(os, s.D);
    } else {
        os << "matrix " << inst.matrix->rows() << ' ' << inst.matrix->cols() << '\n';
        append_matrix_rows(os, *inst.matrix);
    }
    os << "b";
    for (i64 e : inst.b) os << ' ' << e;
    os << "\nlower";
    for (const auto& b : inst.lower) os << ' ' << bound_str(b);
    os << "\nupper";
    for (const auto& b : inst.upper) os << ' ' << bound_str(b);
    os << "\nw";
    for (i64 e : inst.w) os << ' ' << e;
    os << "\nend\n";
    return os.str();
}

/////////////////////////////////////////////////////////////////////////////

SmallMatrix parse_matrix(std::istream& in, const std::string& name) {
    LineReader r{in, name, 0, {}};
    expect_header(r, "matrix");
    r.expect_line();
    auto ts = r.tokens();
    if (ts.size() != 4 || ts[0] != "rows" || ts[2] != "cols")
        r.fail("expected 'rows <r> cols <c>'");
    int rows = (int)r.to_int(ts[1]), cols = (int)r.to_int(ts[3]);
    std::vector<i64> entries;
    for (int i = 0; i < rows; ++i) {
        auto row = r.int_row((size_t)cols);
        entries.insert(entries.end(), row.begin(), row.end());
    }
    expect_end(r);
    return SmallMatrix(rows, cols, std::move(entries));
}

SmallMatrix parse_matrix_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error(path + ": cannot open");
    return parse_matrix(in, path);
}

std::string serialize_matrix(const SmallMatrix& m) {
    std::ostringstream os;
    os << "blockip matrix v1\n";
    os << "rows " << m.rows() << " cols " << m.cols() << '\n';
    append_matrix_rows(os, m);
    os << "end\n";
    return os.str();
}

/////////////////////////////////////////////////////////////////////////////

std::vector<std::vector<i64>> parse_vectors(std::istream& in,
                                            const std::string& name) {
    LineReader r{in, name, 0, {}};
    expect_header(r, "vectors");
    r.expect_line();
    auto ts = r.tokens();
    if (ts.size() != 4 || ts[0] != "count" || ts[2] != "dim")
        r.fail("expected 'count <m> dim <k>'");
    size_t count = (size_t)r.to_int(ts[1]);
    size_t dim = (size_t)r.to_int(ts[3]);
    std::vector<std::vector<i64>> out;
    for (size_t i = 0; i < count; ++i) out.push_back(r.int_row(dim));
    expect_end(r);
    return out;
}

std::vector<std::vector<i64>> parse_vectors_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error(path + ": cannot open");
    return parse_vectors(in, path);
}

std::string serialize_vectors(const std::vector<std::vector<i64>>& vectors) {
    std::ostringstream os;
    os << "blockip vectors v1\n";
    os << "count " << vectors.size() << " dim "
       << (vectors.empty() ? 0 : vectors.front().size()) << '\n';
    for (const auto& v : vectors) {
        for (size_t c = 0; c < v.size(); ++c) {
            if (c) os << ' ';
            os << v[c];
        }
        os << '\n';
    }
    os << "end\n";
    return os.str();
}

/////////////////////////////////////////////////////////////////////////////

std::string serialize_basis(const GraverSet& basis) {
    std::ostringstream os;
    os << "blockip basis v1\n";
    os << "rows " << basis.matrix.rows() << " cols " << basis.matrix.cols() << '\n';
    append_matrix_rows(os, basis.matrix);
    os << "method "
       << (basis.method == GraverMethod::enumeration ? "enumeration" : "completion")
       << '\n';
    os << "radius " << basis.radius << '\n';
    os << "certified " << (basis.certified_complete ? 1 : 0) << '\n';
    os << "count " << basis.elements.size() << '\n';
    os << "max_norm " << basis.max_norm() << '\n';
    os << "elements\n";
    for (const auto& g : basis.elements) {
        for (size_t c = 0; c < g.size(); ++c) {
            if (c) os << ' ';
            os << g[c];
        }
        os << '\n';
    }
    os << "end\n";
    return os.str();
}

GraverSet parse_basis(std::istream& in, const std::string& name) {
    LineReader r{in, name, 0, {}};
    expect_header(r, "basis");
    r.expect_line();
    auto ts = r.tokens();
    if (ts.size() != 4 || ts[0] != "rows" || ts[2] != "cols")
        r.fail("expected 'rows <r> cols <c>'");
    int rows = (int)r.to_int(ts[1]), cols = (int)r.to_int(ts[3]);
    std::vector<i64> entries;
    for (int i = 0; i < rows; ++i) {
        auto row = r.int_row((size_t)cols);
        entries.insert(entries.end(), row.begin(), row.end());
    }
    GraverSet gs;
    gs.matrix = SmallMatrix(rows, cols, std::move(entries));

    r.expect_line();
    ts = r.tokens();
    if (ts.size() != 2 || ts[0] != "method") r.fail("expected 'method ...'");
    gs.method = ts[1] == "enumeration" ? GraverMethod::enumeration
                                       : GraverMethod::completion;
    auto radius = read_labeled_ints(r, "radius", 1);
    gs.radius = radius[0];
    auto cert = read_labeled_ints(r, "certified", 1);
    gs.certified_complete = cert[0] != 0;
    auto count = read_labeled_ints(r, "count", 1);
    read_labeled_ints(r, "max_norm", 1);
    if (r.expect_line() != "elements") r.fail("expected 'elements'");
    for (i64 i = 0; i < count[0]; ++i)
        gs.elements.push_back(r.int_row((size_t)cols));
    expect_end(r);
    return gs;
}

GraverSet parse_basis_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error(path + ": cannot open");
    return parse_basis(in, path);
}

/////////////////////////////////////////////////////////////////////////////

std::string serialize_result(const IPInstance& inst, const SolveResult& res) {
    std::ostringstream os;
    os << "blockip result v1\n";
    os << "status " << to_string(res.status) << '\n';
    // an optimum found under caps that are not known to dominate the true
    // norm bounds is only a heuristic answer
    const char* label = res.status == SolveStatus::optimal && !res.certified
                            ? "heuristic"
                            : to_string(res.status);
    os << "label " << label << '\n';
    os << "certified " << (res.certified ? 1 : 0) << '\n';
    if (res.objective) os << "objective " << *res.objective << '\n';
    if (res.status == SolveStatus::infeasible)
        os << "phase_one_objective " << res.phase_one_objective << '\n';
    if (res.solution) {
        os << "x";
        for (i64 e : *res.solution) os << ' ' << e;
        os << '\n';
    }
    os << "steps " << res.stats.augmentation_steps << '\n';
    os << "dp_states " << res.stats.dp_states << '\n';
    os << "guesses " << res.stats.guesses << '\n';
    os << "nodes " << res.stats.nodes << '\n';

    if (res.solution) {
        std::vector<i64> hx = inst.constraint_matrix().apply(*res.solution);
        bool residual_zero = hx == inst.b;
        bool bounds_ok = true;
        for (int c = 0; c < inst.num_vars(); ++c)
            if (!within(inst.lower[c], (*res.solution)[c], inst.upper[c]))
                bounds_ok = false;
        bool obj_ok = !res.objective ||
                      inst.objective(*res.solution) == *res.objective;
        os << "check constraint_residual_zero " << (residual_zero ? 1 : 0) << '\n';
        os << "check bounds_ok " << (bounds_ok ? 1 : 0) << '\n';
        os << "check objective_match " << (obj_ok ? 1 : 0) << '\n';
    }
    os << "end\n";
    return os.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw parse_error(path + ": cannot open for writing");
    out << content;
    if (!out) throw parse_error(path + ": write failed");
}

}  // namespace blockip
