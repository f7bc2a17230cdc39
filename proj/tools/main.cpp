#include <cctype>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fpk/catalog.hpp"
#include "fpk/document.hpp"
#include "fpk/hamiltonian.hpp"
#include "fpk/symplectization.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace fpk;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

void print_report(const CheckReport& r) {
    std::printf("[%s] %-34s max %-12s (tol %s, %d samples)\n", r.pass ? "PASS" : "FAIL",
                r.identity.c_str(), fmt(r.max_residual).c_str(), fmt(r.tolerance).c_str(),
                r.samples_used);
    if (!r.note.empty()) std::printf("       note: %s\n", r.note.c_str());
    if (!r.pass && !r.witness.empty()) {
        std::printf("       witness:");
        for (const auto& [name, v] : r.witness) std::printf(" %s = %s", name.c_str(), fmt(v).c_str());
        std::printf("\n");
    }
}

json report_json(const CheckReport& r) {
    json w = json::object();
    for (const auto& [name, v] : r.witness) w[name] = v;
    json j;
    j["identity"] = r.identity;
    j["pass"] = r.pass;
    j["max_residual"] = r.max_residual;
    j["tolerance"] = r.tolerance;
    j["samples_used"] = r.samples_used;
    j["witness"] = w;
    j["note"] = r.note;
    return j;
}

struct Session {
    std::string command;
    std::string document_path;
    int samples = kDefaultSamples;
    double tol_flag = 0.0; // 0 means "not given"
    std::int64_t seed_flag = -1;
    std::string json_path;

    ManifoldDocument doc;
    FpkStructure s;
    double identity_tol = kDefaultTol;
    double hamiltonian_tol = kHamiltonianTol;
    double top_tol = kTopPowerTol;

    std::vector<CheckReport> reports;
    json extra = json::object();

    void load() {
        doc = read_document(document_path);
        if (seed_flag >= 0) doc.seed = static_cast<std::uint64_t>(seed_flag);
        s = to_structure(doc);
        if (doc.tolerances.count("identity")) identity_tol = doc.tolerances.at("identity");
        if (doc.tolerances.count("hamiltonian")) hamiltonian_tol = doc.tolerances.at("hamiltonian");
        if (doc.tolerances.count("top_power")) top_tol = doc.tolerances.at("top_power");
        if (tol_flag > 0.0) {
            identity_tol = tol_flag;
            hamiltonian_tol = tol_flag;
            top_tol = tol_flag;
        }
    }

    void take(std::vector<CheckReport> batch) {
        for (auto& r : batch) reports.push_back(std::move(r));
    }

    int finish() {
        bool all_pass = true;
        for (const auto& r : reports) {
            print_report(r);
            all_pass = all_pass && r.pass;
        }
        std::printf("%s\n", all_pass ? "all identities hold" : "FAILURES present");
        if (!json_path.empty()) {
            json out;
            out["command"] = command;
            out["document"] = document_path;
            out["samples"] = samples;
            out["seed"] = doc.seed;
            json tols;
            tols["identity"] = identity_tol;
            tols["hamiltonian"] = hamiltonian_tol;
            tols["top_power"] = top_tol;
            out["tolerances"] = tols;
            out["pass"] = all_pass;
            for (auto it = extra.begin(); it != extra.end(); ++it) out[it.key()] = it.value();
            json rs = json::array();
            for (const auto& r : reports) rs.push_back(report_json(r));
            out["reports"] = rs;
            std::ofstream f(json_path);
            if (!f) throw SchemaError("json", "cannot write '" + json_path + "'");
            f << out.dump(2) << "\n";
            std::printf("json report written to %s\n", json_path.c_str());
        }
        return all_pass ? 0 : 1;
    }
};

std::vector<Expr> parse_fn_list(const std::string& text, const Chart& chart) {
    std::vector<Expr> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t comma = text.find(',', start);
        std::string piece =
            comma == std::string::npos ? text.substr(start) : text.substr(start, comma - start);
        out.push_back(parse_expr(piece, chart));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

std::string default_emit_path(const std::string& name) {
    std::string out;
    for (char c : name) {
        if (std::isalnum(static_cast<unsigned char>(c)))
            out += c;
        else if (!out.empty() && out.back() != '_')
            out += '_';
    }
    while (!out.empty() && out.back() == '_') out.pop_back();
    return out + ".json";
}

int run_catalog(const std::string& emit_name, std::string out_path, Session& sess) {
    auto entries = catalog_structures();
    if (emit_name.empty()) {
        std::printf("catalog structures:\n");
        for (const auto& [label, unused] : entries) std::printf("  %s\n", label.c_str());
        return 0;
    }
    for (const auto& [label, s] : entries) {
        if (label != emit_name) continue;
        if (out_path.empty()) out_path = default_emit_path(label);
        write_document(from_structure(s), out_path);
        std::printf("wrote %s\n", out_path.c_str());
        if (!sess.json_path.empty()) {
            json out;
            out["command"] = "catalog";
            out["emitted"] = label;
            out["path"] = out_path;
            std::ofstream f(sess.json_path);
            if (!f) throw SchemaError("json", "cannot write '" + sess.json_path + "'");
            f << out.dump(2) << "\n";
        }
        return 0;
    }
    std::fprintf(stderr, "unknown catalog structure '%s'; valid names:\n", emit_name.c_str());
    for (const auto& [label, unused] : entries) std::fprintf(stderr, "  %s\n", label.c_str());
    return 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"f.pk-structure validation engine"};
    app.require_subcommand(1);

    Session sess;
    std::string f_text, g_text, fns_text, emit_name, out_path;

    auto add_common = [&](CLI::App* cmd, bool needs_document) {
        if (needs_document)
            cmd->add_option("document", sess.document_path, "manifold document (JSON)")
                ->required();
        cmd->add_option("--samples", sess.samples, "sample count per identity")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--tol", sess.tol_flag, "tolerance override for every suite run")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--seed", sess.seed_flag, "override the document seed")
            ->check(CLI::NonNegativeNumber);
        cmd->add_option("--json", sess.json_path, "write a machine-readable report here");
    };

    auto* validate = app.add_subcommand("validate", "run the structure axiom suites");
    add_common(validate, true);

    auto* classify = app.add_subcommand("classify", "closure, alpha fit, normality");
    add_common(classify, true);

    auto* hamiltonian = app.add_subcommand("hamiltonian", "solve for the Hamiltonian field of f");
    add_common(hamiltonian, true);
    hamiltonian->add_option("--f", f_text, "Hamiltonian function")->required();

    auto* bracket = app.add_subcommand("bracket", "Jacobi bracket {f,g} with oracle checks");
    add_common(bracket, true);
    bracket->add_option("--f", f_text, "first function")->required();
    bracket->add_option("--g", g_text, "second function")->required();

    auto* jacobi = app.add_subcommand("jacobi-suite", "bracket laws over a function list");
    add_common(jacobi, true);
    jacobi->add_option("--fns", fns_text, "comma-separated functions")->required();

    auto* symplectize = app.add_subcommand("symplectize", "build omega and check its identities");
    add_common(symplectize, true);

    auto* catalog = app.add_subcommand("catalog", "list or emit built-in structures");
    catalog->add_option("--emit", emit_name, "structure to write as a document");
    catalog->add_option("--out", out_path, "output path (defaults to a name-derived file)");
    catalog->add_option("--json", sess.json_path, "write a machine-readable report here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (catalog->parsed()) return run_catalog(emit_name, out_path, sess);

        sess.load();
        if (validate->parsed()) {
            sess.command = "validate";
            sess.take(validate_fpk(sess.s, sess.samples, sess.identity_tol));
            sess.take(verify_fundamental_form(sess.s, sess.samples, sess.identity_tol));
        } else if (classify->parsed()) {
            sess.command = "classify";
            Classification c = fpk::classify(sess.s, sess.samples, sess.identity_tol);
            std::printf("almost_K: %s\n", c.almost_K ? "yes" : "no");
            std::printf("almost_S: %s\n", c.almost_S ? "yes" : "no");
            std::printf("normal: %s\n", c.normal ? "yes" : "no");
            std::printf("cr_integrable: %s\n", c.cr_integrable ? "yes" : "no");
            std::string fitted;
            for (double a : c.fitted_alpha) fitted += (fitted.empty() ? "" : ", ") + fmt(a);
            std::printf("fitted alpha: (%s)\n", fitted.c_str());
            sess.extra["almost_K"] = c.almost_K;
            sess.extra["almost_S"] = c.almost_S;
            sess.extra["normal"] = c.normal;
            sess.extra["cr_integrable"] = c.cr_integrable;
            sess.extra["fitted_alpha"] = c.fitted_alpha;
            sess.extra["declared_alpha"] = sess.s.alpha;
            sess.take(std::move(c.reports));
        } else if (hamiltonian->parsed()) {
            sess.command = "hamiltonian";
            Expr f = parse_expr(f_text, *sess.s.chart);
            HamiltonianField hf = hamiltonian_field(sess.s, default_eta_choice(sess.s), f,
                                                    sess.samples, sess.hamiltonian_tol);
            json comps = json::object();
            for (int a = 0; a < sess.s.chart->dimension(); ++a) {
                std::string text = to_string(hf.field.components(a));
                std::printf("X_f[%s] = %s\n", sess.s.chart->coordinate(a).c_str(), text.c_str());
                comps[sess.s.chart->coordinate(a)] = text;
            }
            sess.extra["f"] = f_text;
            sess.extra["field"] = comps;
            sess.take(std::move(hf.residuals));
        } else if (bracket->parsed()) {
            sess.command = "bracket";
            Expr f = parse_expr(f_text, *sess.s.chart);
            Expr g = parse_expr(g_text, *sess.s.chart);
            EtaChoice choice = default_eta_choice(sess.s);
            Expr fg = jacobi_bracket(sess.s, choice, f, g);
            std::printf("{f,g} = %s\n", to_string(fg).c_str());
            sess.extra["f"] = f_text;
            sess.extra["g"] = g_text;
            sess.extra["bracket"] = to_string(fg);
            sess.take(verify_bracket(sess.s, choice, f, g, sess.samples, sess.hamiltonian_tol));
        } else if (jacobi->parsed()) {
            sess.command = "jacobi-suite";
            std::vector<Expr> fns = parse_fn_list(fns_text, *sess.s.chart);
            sess.extra["functions"] = json::array();
            for (const Expr& fn : fns) sess.extra["functions"].push_back(to_string(fn));
            sess.take(verify_jacobi_suite(sess.s, default_eta_choice(sess.s), fns, sess.samples,
                                          sess.hamiltonian_tol));
        } else if (symplectize->parsed()) {
            sess.command = "symplectize";
            Symplectization sp = build_symplectization(sess.s);
            std::printf("tau = %s\n", to_string(sp.tau).c_str());
            json tbox = json::array();
            int d = sess.s.chart->dimension();
            for (int j = 0; j < sess.s.k; ++j) {
                const Interval& iv = sp.chart->box(d + j);
                std::printf("t%d box = [%s, %s]\n", j + 1, fmt(iv.lo).c_str(), fmt(iv.hi).c_str());
                tbox.push_back(json::array({iv.lo, iv.hi}));
            }
            sess.extra["tau"] = to_string(sp.tau);
            sess.extra["t_box"] = tbox;
            std::vector<CheckReport> rs;
            rs.push_back(verify_expansion(sp, sess.s, sess.samples, sess.identity_tol));
            rs.push_back(verify_top_power(sp, sess.s, sess.samples, sess.top_tol));
            sess.take(std::move(rs));
        }
        return sess.finish();
    } catch (const SchemaError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const SyntaxError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const UnknownCoordinate& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}
