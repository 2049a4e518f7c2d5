#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "doctest.h"
#include "json.hpp"

namespace {

struct Run {
    int code;
    std::string out;
};

Run run(const std::string& args) {
    const std::string cmd = std::string(SARANFK_CLI) + " " + args + " 2>&1";
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p);
    std::string out;
    std::array<char, 4096> buf;
    while (std::size_t n = std::fread(buf.data(), 1, buf.size(), p)) out.append(buf.data(), n);
    const int status = pclose(p);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream in(s);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

// Strips the wall-time field from every record.
std::string without_times(const std::string& report) {
    std::string out;
    for (const auto& l : lines(report)) {
        auto j = nlohmann::ordered_json::parse(l);
        j.erase("wall_time_ms");
        out += j.dump() + "\n";
    }
    return out;
}

}  // namespace

TEST_CASE("eval") {
    auto r = run("eval 2f1 --a 1 --b 1 --c 2 --z 0.5");
    CHECK(r.code == 0);
    CHECK(r.out.find("value: 1.3862943611198") != std::string::npos);
    CHECK(r.out.find("converged: true") != std::string::npos);

    r = run("eval fk --alpha1 1.2 --alpha2 0.7 --beta1 0.4 --beta2 2 --gamma1 1.5 --gamma2 2.5 --gamma3 0.9 "
            "--x 0 --y 0 --z 0");
    CHECK(r.code == 0);
    CHECK(r.out.find("value: 1\n") != std::string::npos);

    r = run("eval fk --alpha1 1 --alpha2 1 --beta1 1 --beta2 1 --gamma1 1 --gamma2 1 --gamma3 1 "
            "--x 0.5 --y 0.5 --z 0.3");
    CHECK(r.code == 2);
    CHECK(r.out.find("outside D_K") != std::string::npos);

    r = run("eval qgamma --x 1 --q 0.5");
    CHECK(r.code == 0);
    CHECK(r.out.find("value: 1") != std::string::npos);

    r = run("eval 2f1 --a 1 --b 1 --z 0.5");
    CHECK(r.code == 2);
    CHECK(r.out.find("--c") != std::string::npos);

    CHECK(run("eval nosuch --a 1").code == 2);
    CHECK(run("eval 2f1 --a 1 --b 1 --c 2 --z 0.5 --bogus 3").code == 2);
    CHECK(run("eval 2f1 --a 1 --b 1 --c -1 --z 0.5").code == 2);
}

TEST_CASE("list") {
    auto r = run("list");
    CHECK(r.code == 0);
    CHECK(lines(r.out).size() == 26);
    bool found = false;
    for (const auto& l : lines(r.out)) {
        if (l.rfind("fk-erdelyi ", 0) == 0) found = l.find("Theorem 1.1") != std::string::npos;
    }
    CHECK(found);
    r = run("list --format json");
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j.is_array());
    CHECK(j.size() == 26);
}

TEST_CASE("verify exit codes and records") {
    auto r = run("verify --identities bogus-id");
    CHECK(r.code == 2);

    r = run("verify --identities fk-erdelyi --samples 5 --format human");
    CHECK(r.code == 0);
    CHECK(r.out.find("triple-integral") != std::string::npos);

    r = run("verify --identities euler-1 --tol 1e-30");
    CHECK(r.code == 1);
    const auto rec = nlohmann::json::parse(lines(r.out).at(0));
    CHECK(rec["pass"] == false);
    CHECK_FALSE(rec["failures"].empty());

    CHECK(run("verify --identities euler-1 --format yaml").code == 2);
    CHECK(run("verify --identities euler-1 --q 1.5").code == 2);
    CHECK(run("frobnicate").code == 2);
}

TEST_CASE("q sweep gives one record per base") {
    const auto r = run("verify --identities euler-1,phik-cross-form --q 0.3 --q 0.7");
    CHECK(r.code == 0);
    const auto ls = lines(r.out);
    REQUIRE(ls.size() == 3);
    CHECK(nlohmann::json::parse(ls[0])["id"] == "euler-1");
    CHECK(nlohmann::json::parse(ls[0])["q"].is_null());
    CHECK(nlohmann::json::parse(ls[1])["id"] == "phik-cross-form@q=0.3");
    CHECK(nlohmann::json::parse(ls[2])["q"] == 0.7);
}

TEST_CASE("reports are reproducible and convertible") {
    const std::string path = "cli_report_test.jsonl";
    const std::string args = "verify --identities fk-discrete,bateman,qfk-phi3 --seed 7 --output " + path;
    CHECK(run(args).code == 0);
    std::stringstream a, b;
    a << std::ifstream(path).rdbuf();
    CHECK(run(args).code == 0);
    b << std::ifstream(path).rdbuf();
    CHECK(lines(a.str()).size() == 3);
    CHECK(without_times(a.str()) == without_times(b.str()));
    // registry order, whatever the order on the command line
    CHECK(nlohmann::json::parse(lines(a.str())[0])["id"] == "bateman");

    auto r = run("report " + path + " --format csv");
    CHECK(r.code == 0);
    CHECK(lines(r.out).size() == 4);
    r = run("report " + path + " --format json");
    CHECK(r.out == b.str());
    CHECK(run("report does-not-exist.jsonl").code == 2);
}

TEST_CASE("verify all") {
    const auto r = run("verify --identities all --seed 42");
    CHECK(r.code == 0);
    CHECK(lines(r.out).size() == 26);
}
