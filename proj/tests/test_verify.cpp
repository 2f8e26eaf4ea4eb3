#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <stripwall/verify.hpp>

#include <algorithm>

using namespace stripwall;

TEST_CASE("injected boundary sign fault is caught and named") {
  VerifyOptions o;
  o.fast = true;
  o.inject_boundary_sign_fault = true;
  const VerifyReport r = run_verify(o);
  CHECK_FALSE(r.all_passed());
  const auto f = r.failures();
  CHECK(std::find(f.begin(), f.end(), "energy.gradient_consistency") != f.end());
  // nothing outside the energy gradient checks is affected
  for (const auto& name : f) CHECK(name.rfind("energy.", 0) == 0);
  const nlohmann::json j = to_json(r, o);
  CHECK(j["passed"] == false);
  CHECK(j["fault_injection"] == "boundary-sign");
  CHECK(j["checks"].size() == r.checks.size());
}

TEST_CASE("seeded runs are reproducible") {
  VerifyOptions o;
  o.fast = true;
  o.seed = 7;
  const VerifyReport a = run_verify(o), b = run_verify(o);
  REQUIRE(a.checks.size() == b.checks.size());
  CHECK(a.all_passed());
  for (std::size_t i = 0; i < a.checks.size(); ++i) CHECK(a.checks[i].value == b.checks[i].value);
}
