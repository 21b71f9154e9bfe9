#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

namespace {

struct Run {
    int code = -1;
    std::string out;
};

Run ntk(const std::string& args, const std::string& env = "")
{
    const std::string cmd = env + (env.empty() ? "" : " ") + NTK_PATH + std::string(" ") + args + " 2>/dev/null";
    Run r;
    FILE* f = popen(cmd.c_str(), "r");
    REQUIRE(f != nullptr);
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, f)) > 0) r.out.append(buf, n);
    const int st = pclose(f);
    r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

std::string body(const std::string& csv)
{
    std::istringstream in(csv);
    std::string line, out;
    while (std::getline(in, line))
        if (line.empty() || line[0] != '#') out += line + "\n";
    return out;
}

} // namespace

TEST_CASE("usage errors exit with 2")
{
    CHECK(ntk("no-such-command").code == 2);
    CHECK(ntk("bounds --p 7 --eps abc").code == 2);
    CHECK(ntk("bounds --p 8 --eps 0.1").code == 2);
    CHECK(ntk("tor-scan --p 2 --min-d x --max-d 10").code == 2);
}

TEST_CASE("budget errors exit with 3")
{
    CHECK(ntk("tor-report --D -23 --p 2", "NT_ENUM_CAP=1 NT_BSGS_CAP=1").code == 3);
}

TEST_CASE("bounds table")
{
    const Run r = ntk("bounds --p 7 --eps 0.1");
    REQUIRE(r.code == 0);
    CHECK(r.out.find("# ntk ") == 0);
    CHECK(r.out.find("2935393") != std::string::npos);
}

TEST_CASE("quad-maxima first rows")
{
    const Run r = ntk("quad-maxima --stat genus --eps 0.05 --max-d 100000");
    REQUIRE(r.code == 0);
    const std::string b = body(r.out);
    std::istringstream in(b);
    std::string line;
    std::getline(in, line); /* column names */
    const char* want[] = {"-3,", "-23,", "-47,", "-71,"};
    for (const char* w : want) {
        REQUIRE(std::getline(in, line));
        CHECK(line.rfind(w, 0) == 0);
    }
}

TEST_CASE("cubic-enum")
{
    const Run r = ntk("cubic-enum --f 1983163");
    REQUIRE(r.code == 0);
    const std::string b = body(r.out);
    std::size_t rows = 0;
    for (char c : b) rows += c == '\n';
    CHECK(rows == 17);
}

TEST_CASE("json output")
{
    const Run r = ntk("tor-family --p 2 --count 3 --format json");
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["command"] == "tor-family");
    CHECK(j["rows"].size() == 3);
    CHECK(j["config"].contains("count"));
}

TEST_CASE("reruns are byte-identical and independent of the worker count")
{
    const Run a = ntk("tor-scan --p 2 --min-d 3 --max-d 4000 --n 12 --workers 1");
    const Run b = ntk("tor-scan --p 2 --min-d 3 --max-d 4000 --n 12 --workers 1");
    const Run c = ntk("tor-scan --p 2 --min-d 3 --max-d 4000 --n 12 --workers 3");
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(body(a.out) == body(c.out));
}

TEST_CASE("fixtures-check reports every row")
{
    const Run r = ntk("fixtures-check --format json");
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["rows"].size() > 100);
}
