#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include <json.hpp>

#include "fpk/catalog.hpp"
#include "fpk/document.hpp"

using namespace fpk;
using json = nlohmann::ordered_json;

namespace {

json good_json() {
    return json::parse(emit_document(from_structure(generalized_heisenberg(1, 1, {1.0}))));
}

std::string expect_schema_error(const json& j) {
    try {
        parse_document(j.dump());
    } catch (const SchemaError& e) {
        return e.what();
    }
    return "";
}

std::filesystem::path temp_file(const std::string& tag) {
    return std::filesystem::temp_directory_path() / ("fpk_doc_test_" + tag);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct CliResult {
    int exit_code = -1;
    std::string output;
};

CliResult run_cli(const std::string& args) {
    std::string cmd = std::string("'") + FPK_CLI_PATH + "' " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return {};
    CliResult result;
    char buf[4096];
    std::size_t got;
    while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) result.output.append(buf, got);
    int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

} // namespace

TEST(Document, GoodDocumentRoundTrips) {
    json j = good_json();
    std::string text = j.dump(2) + "\n";
    ManifoldDocument doc = parse_document(text);
    EXPECT_EQ(emit_document(doc), text);
    FpkStructure s = to_structure(doc);
    EXPECT_EQ(s.n, 1);
    EXPECT_EQ(s.k, 1);
    EXPECT_EQ(emit_document(from_structure(s)), text);
}

TEST(Document, TolerancesRoundTrip) {
    json j = good_json();
    j["tolerances"] = {{"hamiltonian", 1e-6}, {"identity", 1e-8}};
    ManifoldDocument doc = parse_document(j.dump());
    ASSERT_EQ(doc.tolerances.size(), 2u);
    EXPECT_DOUBLE_EQ(doc.tolerances.at("identity"), 1e-8);
    EXPECT_DOUBLE_EQ(doc.tolerances.at("hamiltonian"), 1e-6);
    std::string text = emit_document(doc);
    EXPECT_EQ(emit_document(parse_document(text)), text);
}

TEST(Document, SchemaRejectsMissingAndMistypedFields) {
    {
        json j = good_json();
        j.erase("n");
        EXPECT_NE(expect_schema_error(j).find("at n: missing"), std::string::npos);
    }
    {
        json j = good_json();
        j["k"] = -1;
        EXPECT_NE(expect_schema_error(j).find("at k:"), std::string::npos);
    }
    {
        json j = good_json();
        j["n"] = 1.5;
        EXPECT_NE(expect_schema_error(j).find("must be an integer"), std::string::npos);
    }
    {
        json j = good_json();
        j["seed"] = -4;
        EXPECT_NE(expect_schema_error(j).find("at seed:"), std::string::npos);
    }
    {
        json j = good_json();
        j["extra"] = 1;
        EXPECT_NE(expect_schema_error(j).find("at extra: unknown field"), std::string::npos);
    }
    EXPECT_THROW(parse_document("[1, 2]"), SchemaError);
    EXPECT_THROW(parse_document("{ not json"), SchemaError);
}

TEST(Document, SchemaRejectsBadCoordinatesAndBox) {
    {
        json j = good_json();
        j["coordinates"] = {"x1", "y1"};
        EXPECT_NE(expect_schema_error(j).find("must list 2n+k"), std::string::npos);
    }
    {
        json j = good_json();
        j["coordinates"] = {"x1", "y1", "x1"};
        EXPECT_NE(expect_schema_error(j).find("duplicate"), std::string::npos);
    }
    {
        json j = good_json();
        j["coordinates"] = {"x1", "y1", "sin"};
        EXPECT_FALSE(expect_schema_error(j).empty());
    }
    {
        json j = good_json();
        j["coordinates"] = {"x1", "y1", "2z"};
        EXPECT_FALSE(expect_schema_error(j).empty());
    }
    {
        json j = good_json();
        j["box"][2] = {1.0, -1.0};
        EXPECT_NE(expect_schema_error(j).find("lo < hi"), std::string::npos);
    }
    {
        json j = good_json();
        j["box"][2] = {1.0};
        EXPECT_NE(expect_schema_error(j).find("[lo, hi]"), std::string::npos);
    }
    {
        json j = good_json();
        j["box"].erase(2);
        EXPECT_NE(expect_schema_error(j).find("one [lo, hi] per coordinate"), std::string::npos);
    }
}

TEST(Document, SchemaRejectsBadFieldMatrices) {
    {
        json j = good_json();
        j["alpha"] = {1.0, 2.0};
        EXPECT_NE(expect_schema_error(j).find("at alpha:"), std::string::npos);
    }
    {
        json j = good_json();
        j["alpha"] = {"one"};
        EXPECT_NE(expect_schema_error(j).find("must be a number"), std::string::npos);
    }
    {
        json j = good_json();
        j["phi"].erase(2);
        EXPECT_NE(expect_schema_error(j).find("at phi:"), std::string::npos);
    }
    {
        json j = good_json();
        j["phi"][0] = {"0", "0"};
        EXPECT_FALSE(expect_schema_error(j).empty());
    }
    {
        json j = good_json();
        j["phi"][0][1] = 7;
        EXPECT_NE(expect_schema_error(j).find("must be a string"), std::string::npos);
    }
    {
        json j = good_json();
        j["xi"] = json::array();
        EXPECT_NE(expect_schema_error(j).find("at xi:"), std::string::npos);
    }
    {
        json j = good_json();
        j["g"][0][1] = "42";
        std::string msg = expect_schema_error(j);
        EXPECT_NE(msg.find("not symmetric at (0,1)"), std::string::npos) << msg;
    }
    {
        json j = good_json();
        j["g"][0][1] = "42";
        j["g"][0][2] = "43";
        std::string msg = expect_schema_error(j);
        EXPECT_NE(msg.find("(0,1), (0,2)"), std::string::npos) << msg;
    }
}

TEST(Document, SchemaRejectsBadTolerances) {
    {
        json j = good_json();
        j["tolerances"] = {{"wavelet", 1e-9}};
        EXPECT_NE(expect_schema_error(j).find("tolerances.wavelet"), std::string::npos);
    }
    {
        json j = good_json();
        j["tolerances"] = {{"identity", 0.0}};
        EXPECT_NE(expect_schema_error(j).find("positive"), std::string::npos);
    }
    {
        json j = good_json();
        j["tolerances"] = 3;
        EXPECT_NE(expect_schema_error(j).find("must be an object"), std::string::npos);
    }
}

TEST(Document, ExpressionErrorsNameTheField) {
    {
        json j = good_json();
        j["phi"][0][1] = "x1 +";
        ManifoldDocument doc = parse_document(j.dump());
        try {
            to_structure(doc);
            FAIL() << "expected SyntaxError";
        } catch (const SyntaxError& e) {
            EXPECT_NE(std::string(e.what()).find("phi[0][1]"), std::string::npos) << e.what();
        }
    }
    {
        json j = good_json();
        j["eta"][0][2] = "w + 1";
        ManifoldDocument doc = parse_document(j.dump());
        try {
            to_structure(doc);
            FAIL() << "expected SyntaxError";
        } catch (const SyntaxError& e) {
            std::string msg = e.what();
            EXPECT_NE(msg.find("eta[0][2]"), std::string::npos) << msg;
            EXPECT_NE(msg.find("unknown coordinate 'w'"), std::string::npos) << msg;
        }
    }
}

TEST(Document, ReadWriteErrors) {
    EXPECT_THROW(read_document("/nonexistent/path/doc.json"), SchemaError);
    ManifoldDocument doc = parse_document(good_json().dump());
    EXPECT_THROW(write_document(doc, "/nonexistent/path/doc.json"), SchemaError);
}

TEST(DocumentCli, ValidateIsDeterministic) {
    auto doc_path = temp_file("determinism.json");
    write_text(doc_path, emit_document(from_structure(generalized_heisenberg(1, 1, {1.0}))));
    auto json1 = temp_file("det1_report.json");
    auto json2 = temp_file("det2_report.json");
    CliResult a = run_cli("validate '" + doc_path.string() + "' --json '" + json1.string() + "'");
    CliResult b = run_cli("validate '" + doc_path.string() + "' --json '" + json2.string() + "'");
    EXPECT_EQ(a.exit_code, 0) << a.output;
    EXPECT_EQ(b.exit_code, 0);
    std::string a_text = a.output.substr(0, a.output.find("json report written"));
    std::string b_text = b.output.substr(0, b.output.find("json report written"));
    EXPECT_EQ(a_text, b_text);
    EXPECT_EQ(read_text(json1), read_text(json2));
    EXPECT_NE(a.output.find("all identities hold"), std::string::npos);
    EXPECT_NE(read_text(json1).find("\"command\": \"validate\""), std::string::npos);
}

TEST(DocumentCli, SeedFlagChangesSampling) {
    auto doc_path = temp_file("seedflag.json");
    write_text(doc_path, emit_document(from_structure(generalized_heisenberg(1, 1, {1.0}))));
    auto json1 = temp_file("seed17_report.json");
    auto json2 = temp_file("seed18_report.json");
    CliResult a = run_cli("validate '" + doc_path.string() + "' --seed 17 --json '" +
                          json1.string() + "'");
    CliResult b = run_cli("validate '" + doc_path.string() + "' --seed 18 --json '" +
                          json2.string() + "'");
    EXPECT_EQ(a.exit_code, 0) << a.output;
    EXPECT_EQ(b.exit_code, 0);
    EXPECT_NE(read_text(json1), read_text(json2));
    EXPECT_NE(read_text(json1).find("\"seed\": 17"), std::string::npos);
}

TEST(DocumentCli, IdentityFailureExitsOne) {
    json j = good_json();
    j["g"][1][1] = "2";
    auto doc_path = temp_file("broken_metric.json");
    write_text(doc_path, j.dump(2) + "\n");
    CliResult r = run_cli("validate '" + doc_path.string() + "'");
    EXPECT_EQ(r.exit_code, 1) << r.output;
    EXPECT_NE(r.output.find("FAILURES present"), std::string::npos);
    EXPECT_NE(r.output.find("[FAIL]"), std::string::npos);
    EXPECT_NE(r.output.find("witness:"), std::string::npos);
}

TEST(DocumentCli, UsageAndSchemaErrorsExitTwo) {
    EXPECT_EQ(run_cli("validate /nonexistent/doc.json").exit_code, 2);
    EXPECT_EQ(run_cli("frobnicate").exit_code, 2);
    EXPECT_EQ(run_cli("validate").exit_code, 2);

    auto bad_path = temp_file("malformed.json");
    write_text(bad_path, "{ not json at all");
    EXPECT_EQ(run_cli("validate '" + bad_path.string() + "'").exit_code, 2);

    auto doc_path = temp_file("gooddoc.json");
    write_text(doc_path, good_json().dump(2) + "\n");
    CliResult bad_expr = run_cli("bracket '" + doc_path.string() + "' --f 'x1 +' --g 1");
    EXPECT_EQ(bad_expr.exit_code, 2) << bad_expr.output;
    CliResult bad_coord = run_cli("hamiltonian '" + doc_path.string() + "' --f 'q + 1'");
    EXPECT_EQ(bad_coord.exit_code, 2) << bad_coord.output;
    EXPECT_EQ(run_cli("catalog --emit no_such_structure").exit_code, 2);
}

TEST(DocumentCli, StructuralErrorsExitThree) {
    json j = good_json();
    j["alpha"][0] = 0.0;
    auto doc_path = temp_file("zero_alpha.json");
    write_text(doc_path, j.dump(2) + "\n");
    CliResult sympl = run_cli("symplectize '" + doc_path.string() + "'");
    EXPECT_EQ(sympl.exit_code, 3) << sympl.output;
    CliResult ham = run_cli("hamiltonian '" + doc_path.string() + "' --f x1");
    EXPECT_EQ(ham.exit_code, 3) << ham.output;
}

TEST(DocumentCli, ToleranceResolutionPrecedence) {
    json j = good_json();
    std::string g00 = j["g"][0][0].get<std::string>();
    j["g"][0][0] = g00 + " + 0.000001";
    j["tolerances"] = {{"identity", 1e-3}};
    auto doc_path = temp_file("tolerance_precedence.json");
    write_text(doc_path, j.dump(2) + "\n");

    CliResult relaxed = run_cli("validate '" + doc_path.string() + "'");
    EXPECT_EQ(relaxed.exit_code, 0) << relaxed.output;

    CliResult strict = run_cli("validate '" + doc_path.string() + "' --tol 0.000000001");
    EXPECT_EQ(strict.exit_code, 1) << strict.output;
}

TEST(DocumentCli, BracketPrintsSimplifiedConstant) {
    auto doc_path = temp_file("bracket_doc.json");
    write_text(doc_path, emit_document(from_structure(generalized_heisenberg(1, 1, {1.0}))));
    CliResult r = run_cli("bracket '" + doc_path.string() + "' --f 1 --g z1");
    EXPECT_EQ(r.exit_code, 0) << r.output;
    EXPECT_NE(r.output.find("{f,g} = 1"), std::string::npos) << r.output;
}

TEST(DocumentCli, CatalogEmitMatchesFixtures) {
    for (const char* name : {"standard_contact_1.json", "generalized_heisenberg_1_2_1_2.json"}) {
        std::string label = name == std::string("standard_contact_1.json")
                                ? "standard_contact(1)"
                                : "generalized_heisenberg(1,2,(1,2))";
        auto out_path = temp_file(name);
        CliResult r = run_cli("catalog --emit '" + label + "' --out '" + out_path.string() + "'");
        EXPECT_EQ(r.exit_code, 0) << r.output;
        std::string fixture = read_text(std::filesystem::path(FPK_FIXTURE_DIR) / name);
        ASSERT_FALSE(fixture.empty()) << name;
        EXPECT_EQ(read_text(out_path), fixture) << name;
    }
}

TEST(DocumentCli, CatalogEmitLoadEmitIsFixedPoint) {
    auto out_path = temp_file("roundtrip.json");
    CliResult r = run_cli("catalog --emit 'generalized_heisenberg(2,2,(0,1))' --out '" +
                          out_path.string() + "'");
    ASSERT_EQ(r.exit_code, 0) << r.output;
    std::string first = read_text(out_path);
    ManifoldDocument doc = parse_document(first);
    EXPECT_EQ(emit_document(from_structure(to_structure(doc))), first);
}

TEST(DocumentCli, CatalogListsStructures) {
    CliResult r = run_cli("catalog");
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_NE(r.output.find("standard_contact(1)"), std::string::npos);
    EXPECT_NE(r.output.find("symplectic_base_example(2,(1,1))"), std::string::npos);
}
