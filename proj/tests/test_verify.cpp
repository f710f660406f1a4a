#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "treelaw/verify.hpp"

using namespace treelaw;

TEST_SUITE("verify") {

TEST_CASE("the check registry is populated and unique") {
    const std::vector<std::string> names = available_checks();
    CHECK(names.size() >= 10);
    const std::set<std::string> unique(names.begin(), names.end());
    CHECK(unique.size() == names.size());
    CHECK(std::find(names.begin(), names.end(), "resolvent-identity") != names.end());
    CHECK(std::find(names.begin(), names.end(), "kesten-mckay-mass") != names.end());
}

TEST_CASE("unknown names are rejected with the available list") {
    CHECK_THROWS_WITH_AS(run_check("no-such-check"), doctest::Contains("available checks"),
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(run_check("no-such-check"), doctest::Contains("resolvent-identity"),
                         std::invalid_argument);
}

TEST_CASE("closed-form checks pass and report their numbers") {
    const CheckResult res = run_check("resolvent-identity");
    CHECK(res.name == "resolvent-identity");
    CHECK(res.pass);
    CHECK(res.details.find("lhs") != std::string::npos);
    CHECK(res.details.find("rhs") != std::string::npos);
    CHECK(res.details.find("err") != std::string::npos);

    CHECK(run_check("kesten-mckay-mass").pass);
    CHECK(run_check("dyson-gaussian-m2").pass);
    CHECK(run_check("regime-table").pass);
}

}  // TEST_SUITE
