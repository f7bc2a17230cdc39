#include "fpk/document.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fpk {

namespace {

using json = nlohmann::ordered_json;

bool valid_identifier(const std::string& s) {
    if (s.empty()) return false;
    if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
    for (char c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
    return s != "sin" && s != "cos" && s != "exp";
}

const json& field(const json& j, const std::string& name) {
    auto it = j.find(name);
    if (it == j.end()) throw SchemaError(name, "missing");
    return *it;
}

int int_field(const json& j, const std::string& name) {
    const json& v = field(j, name);
    if (!v.is_number_integer()) throw SchemaError(name, "must be an integer");
    return v.get<int>();
}

std::vector<std::vector<std::string>> string_matrix(const json& j, const std::string& name,
                                                    int rows, int cols) {
    const json& v = field(j, name);
    if (!v.is_array() || static_cast<int>(v.size()) != rows)
        throw SchemaError(name, "must be an array of " + std::to_string(rows) + " rows");
    std::vector<std::vector<std::string>> out;
    for (int i = 0; i < rows; ++i) {
        const json& row = v[i];
        std::string where = name + "[" + std::to_string(i) + "]";
        if (!row.is_array() || static_cast<int>(row.size()) != cols)
            throw SchemaError(where, "must be an array of " + std::to_string(cols) + " strings");
        std::vector<std::string> entries;
        for (int a = 0; a < cols; ++a) {
            if (!row[a].is_string())
                throw SchemaError(where + "[" + std::to_string(a) + "]", "must be a string");
            entries.push_back(row[a].get<std::string>());
        }
        out.push_back(std::move(entries));
    }
    return out;
}

Expr parse_entry(const std::string& text, const Chart& chart, const std::string& where) {
    try {
        return parse_expr(text, chart);
    } catch (const UnknownCoordinate& e) {
        throw SyntaxError(e.position, where + ": unknown coordinate '" + e.name + "'");
    } catch (const SyntaxError& e) {
        throw SyntaxError(e.position, where + ": " + e.message);
    }
}

} // namespace

ManifoldDocument parse_document(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError("document", e.what());
    }
    if (!j.is_object()) throw SchemaError("document", "top level must be an object");

    static const char* known[] = {"n",  "k",  "coordinates", "box", "seed",      "alpha",
                                  "phi", "xi", "eta",         "g",   "tolerances"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* name : known) ok = ok || it.key() == name;
        if (!ok) throw SchemaError(it.key(), "unknown field");
    }

    ManifoldDocument doc;
    doc.n = int_field(j, "n");
    doc.k = int_field(j, "k");
    if (doc.n < 0) throw SchemaError("n", "must be nonnegative");
    if (doc.k < 0) throw SchemaError("k", "must be nonnegative");
    int d = 2 * doc.n + doc.k;
    if (d < 1) throw SchemaError("n", "chart dimension 2n+k must be positive");

    {
        const json& v = field(j, "coordinates");
        if (!v.is_array() || static_cast<int>(v.size()) != d)
            throw SchemaError("coordinates", "must list 2n+k = " + std::to_string(d) + " names");
        for (int i = 0; i < d; ++i) {
            if (!v[i].is_string() || !valid_identifier(v[i].get<std::string>()))
                throw SchemaError("coordinates[" + std::to_string(i) + "]",
                                  "must be an identifier");
            doc.coordinates.push_back(v[i].get<std::string>());
        }
        for (int i = 0; i < d; ++i)
            for (int a = i + 1; a < d; ++a)
                if (doc.coordinates[i] == doc.coordinates[a])
                    throw SchemaError("coordinates[" + std::to_string(a) + "]",
                                      "duplicate name '" + doc.coordinates[a] + "'");
    }

    {
        const json& v = field(j, "box");
        if (!v.is_array() || static_cast<int>(v.size()) != d)
            throw SchemaError("box", "must list one [lo, hi] per coordinate");
        for (int i = 0; i < d; ++i) {
            std::string where = "box[" + std::to_string(i) + "]";
            if (!v[i].is_array() || v[i].size() != 2 || !v[i][0].is_number() ||
                !v[i][1].is_number())
                throw SchemaError(where, "must be [lo, hi]");
            Interval iv{v[i][0].get<double>(), v[i][1].get<double>()};
            if (!(iv.lo < iv.hi)) throw SchemaError(where, "requires lo < hi");
            doc.box.push_back(iv);
        }
    }

    {
        const json& v = field(j, "seed");
        if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0))
            throw SchemaError("seed", "must be a nonnegative integer");
        doc.seed = v.get<std::uint64_t>();
    }

    {
        const json& v = field(j, "alpha");
        if (!v.is_array() || static_cast<int>(v.size()) != doc.k)
            throw SchemaError("alpha", "must list k = " + std::to_string(doc.k) + " reals");
        for (int i = 0; i < doc.k; ++i) {
            if (!v[i].is_number())
                throw SchemaError("alpha[" + std::to_string(i) + "]", "must be a number");
            doc.alpha.push_back(v[i].get<double>());
        }
    }

    doc.phi = string_matrix(j, "phi", d, d);
    doc.xi = string_matrix(j, "xi", doc.k, d);
    doc.eta = string_matrix(j, "eta", doc.k, d);
    doc.g = string_matrix(j, "g", d, d);

    {
        std::string bad;
        for (int i = 0; i < d; ++i)
            for (int a = i + 1; a < d; ++a)
                if (doc.g[i][a] != doc.g[a][i]) {
                    if (!bad.empty()) bad += ", ";
                    bad += "(" + std::to_string(i) + "," + std::to_string(a) + ")";
                }
        if (!bad.empty()) throw SchemaError("g", "not symmetric at " + bad);
    }

    if (j.contains("tolerances")) {
        const json& v = j["tolerances"];
        if (!v.is_object()) throw SchemaError("tolerances", "must be an object");
        for (auto it = v.begin(); it != v.end(); ++it) {
            if (it.key() != "identity" && it.key() != "hamiltonian" && it.key() != "top_power")
                throw SchemaError("tolerances." + it.key(), "unknown tolerance");
            if (!it.value().is_number() || !(it.value().get<double>() > 0.0))
                throw SchemaError("tolerances." + it.key(), "must be a positive number");
            doc.tolerances[it.key()] = it.value().get<double>();
        }
    }

    return doc;
}

std::string emit_document(const ManifoldDocument& doc) {
    json j;
    j["n"] = doc.n;
    j["k"] = doc.k;
    j["coordinates"] = doc.coordinates;
    json box = json::array();
    for (const Interval& iv : doc.box) box.push_back(json::array({iv.lo, iv.hi}));
    j["box"] = box;
    j["seed"] = doc.seed;
    j["alpha"] = doc.alpha;
    j["phi"] = doc.phi;
    j["xi"] = doc.xi;
    j["eta"] = doc.eta;
    j["g"] = doc.g;
    if (!doc.tolerances.empty()) j["tolerances"] = doc.tolerances;
    return j.dump(2) + "\n";
}

FpkStructure to_structure(const ManifoldDocument& doc) {
    int d = 2 * doc.n + doc.k;
    ChartPtr chart = make_chart(doc.coordinates, doc.box, doc.seed);

    ExprMatrix phi(d, d);
    for (int i = 0; i < d; ++i)
        for (int a = 0; a < d; ++a)
            phi(i, a) = parse_entry(doc.phi[i][a], *chart,
                                    "phi[" + std::to_string(i) + "][" + std::to_string(a) + "]");

    std::vector<VectorField> xi;
    for (int i = 0; i < doc.k; ++i) {
        ExprVector v(d);
        for (int a = 0; a < d; ++a)
            v(a) = parse_entry(doc.xi[i][a], *chart,
                               "xi[" + std::to_string(i) + "][" + std::to_string(a) + "]");
        xi.push_back(make_vector_field(chart, std::move(v)));
    }

    std::vector<KForm> eta;
    for (int i = 0; i < doc.k; ++i) {
        KForm form = make_kform(chart, 1);
        for (int a = 0; a < d; ++a)
            add_term(form, {a},
                     parse_entry(doc.eta[i][a], *chart,
                                 "eta[" + std::to_string(i) + "][" + std::to_string(a) + "]"));
        eta.push_back(std::move(form));
    }

    ExprMatrix g(d, d);
    for (int i = 0; i < d; ++i)
        for (int a = i; a < d; ++a) {
            g(i, a) = parse_entry(doc.g[i][a], *chart,
                                  "g[" + std::to_string(i) + "][" + std::to_string(a) + "]");
            g(a, i) = g(i, a);
        }

    return make_fpk_structure(chart, make_end_field(chart, std::move(phi)), std::move(xi),
                              std::move(eta), make_metric_field(chart, std::move(g)), doc.alpha,
                              doc.n, doc.k);
}

ManifoldDocument from_structure(const FpkStructure& s) {
    ManifoldDocument doc;
    doc.n = s.n;
    doc.k = s.k;
    doc.coordinates = s.chart->coordinates();
    doc.box = s.chart->box();
    doc.seed = s.chart->seed();
    doc.alpha = s.alpha;
    int d = s.chart->dimension();

    for (int i = 0; i < d; ++i) {
        std::vector<std::string> row;
        for (int a = 0; a < d; ++a) row.push_back(to_string(s.phi.matrix(i, a)));
        doc.phi.push_back(std::move(row));
    }
    for (int i = 0; i < s.k; ++i) {
        std::vector<std::string> row;
        for (int a = 0; a < d; ++a) row.push_back(to_string(s.xi[i].components(a)));
        doc.xi.push_back(std::move(row));
    }
    for (int i = 0; i < s.k; ++i) {
        ExprVector cov = covector(s.eta[i]);
        std::vector<std::string> row;
        for (int a = 0; a < d; ++a) row.push_back(to_string(cov(a)));
        doc.eta.push_back(std::move(row));
    }
    for (int i = 0; i < d; ++i) {
        std::vector<std::string> row;
        for (int a = 0; a < d; ++a) row.push_back(to_string(s.g.matrix(i, a)));
        doc.g.push_back(std::move(row));
    }
    return doc;
}

ManifoldDocument read_document(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("document", "cannot read '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_document(buffer.str());
}

void write_document(const ManifoldDocument& doc, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw SchemaError("document", "cannot write '" + path + "'");
    out << emit_document(doc);
}

FpkStructure load_document(const std::string& path) { return to_structure(read_document(path)); }

} // namespace fpk
