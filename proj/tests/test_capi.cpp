#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>

#include "dynlab.h"

namespace {

struct Owned {
  char* ptr = nullptr;
  ~Owned() { dynlab_string_free(ptr); }
  std::string str() const { return ptr ? std::string(ptr) : std::string(); }
};

} // namespace

TEST_CASE("version string") {
  CHECK(std::string(dynlab_version()) == "0.1.0");
}

TEST_CASE("system handles and error reporting") {
  dynlab_system* sys = nullptr;
  Owned err;
  CHECK(dynlab_system_create(R"({"variant":"cyclic_rotation","modulus":5})",
                             &sys, &err.ptr) == DYNLAB_OK);
  REQUIRE(sys != nullptr);
  CHECK(dynlab_system_minimal_by_construction(sys) == 1);
  CHECK(dynlab_system_period_hint(sys) == 5);
  dynlab_system_destroy(sys);

  dynlab_system* bad = nullptr;
  Owned bad_err;
  CHECK(dynlab_system_create("{not json", &bad, &bad_err.ptr) ==
        DYNLAB_ERR_PARSE);
  CHECK(bad == nullptr);
  CHECK_FALSE(bad_err.str().empty());

  Owned invalid_err;
  CHECK(dynlab_system_create(R"({"variant":"full_shift","alphabet_size":1})",
                             &bad, &invalid_err.ptr) ==
        DYNLAB_ERR_INVALID_ARGUMENT);
}

TEST_CASE("return and transfer windows through the C surface") {
  dynlab_system* shift = nullptr;
  dynlab_system* rot = nullptr;
  REQUIRE(dynlab_system_create(R"({"variant":"full_shift","alphabet_size":2})",
                               &shift, nullptr) == DYNLAB_OK);
  REQUIRE(dynlab_system_create(R"({"variant":"cyclic_rotation","modulus":3})",
                               &rot, nullptr) == DYNLAB_OK);
  const char* point = R"({"variant":"shift","generator":{"variant":"eventually_periodic","preperiod":"","period":"01"},"offset":0})";
  dynlab_window* w = nullptr;
  REQUIRE(dynlab_return_set(shift, point,
                            R"({"variant":"cylinder","word":"0"})", 10, &w,
                            nullptr) == DYNLAB_OK);
  CHECK(dynlab_window_horizon(w) == 10);
  CHECK(dynlab_window_count(w) == 5);
  CHECK(dynlab_window_test(w, 2) == 1);
  CHECK(dynlab_window_test(w, 3) == 0);

  Owned text;
  REQUIRE(dynlab_window_to_text(w, &text.ptr) == DYNLAB_OK);
  dynlab_window* round = nullptr;
  REQUIRE(dynlab_window_from_text(text.ptr, &round, nullptr) == DYNLAB_OK);
  CHECK(dynlab_window_count(round) == 5);
  dynlab_window_destroy(round);
  dynlab_window_destroy(w);

  dynlab_window* transfer = nullptr;
  REQUIRE(dynlab_transfer_set(
              shift, rot, point, R"({"variant":"cyclic","residue":0})",
              R"({"variant":"cylinder","word":"01"})",
              R"({"variant":"residue_set","residues":[0]})", 60, &transfer,
              nullptr) == DYNLAB_OK);
  CHECK(dynlab_window_count(transfer) == 10); // multiples of 6 below 60
  dynlab_window_destroy(transfer);
  dynlab_system_destroy(shift);
  dynlab_system_destroy(rot);
}

TEST_CASE("set generator windows and family checks") {
  dynlab_setgen* gen = nullptr;
  REQUIRE(dynlab_setgen_create(
              R"({"variant":"arithmetic_progression","start":0,"step":4})",
              &gen, nullptr) == DYNLAB_OK);
  dynlab_window* w = nullptr;
  REQUIRE(dynlab_setgen_window(gen, 100, &w, nullptr) == DYNLAB_OK);
  CHECK(dynlab_window_count(w) == 25);

  Owned verdict;
  REQUIRE(dynlab_check_family(
              w, R"({"family":"syndetic","parameters":{"gap":4}})",
              &verdict.ptr, nullptr) == DYNLAB_OK);
  CHECK(verdict.str().find("\"outcome\":\"verified\"") != std::string::npos);

  Owned refuted;
  REQUIRE(dynlab_check_family(
              w, R"({"family":"thick","parameters":{"run_length":2}})",
              &refuted.ptr, nullptr) == DYNLAB_OK);
  CHECK(refuted.str().find("\"outcome\":\"refuted\"") != std::string::npos);

  Owned err;
  CHECK(dynlab_check_family(w, R"({"family":"nope","parameters":{}})",
                            &err.ptr, &err.ptr) ==
        DYNLAB_ERR_INVALID_ARGUMENT);
  dynlab_window_destroy(w);
  dynlab_setgen_destroy(gen);
}

TEST_CASE("experiments end to end") {
  const char* cfg = R"({
    "kind": "criterion-scan",
    "x_system": {"variant": "full_shift", "alphabet_size": 2},
    "y_system": {"variant": "cyclic_rotation", "modulus": 3},
    "depth": 1,
    "horizon": 2000
  })";
  Owned report;
  REQUIRE(dynlab_run_experiment(cfg, &report.ptr, nullptr) == DYNLAB_OK);
  CHECK(dynlab_report_exit_code(report.ptr) == 0);

  Owned csv;
  REQUIRE(dynlab_report_to_csv(report.ptr, &csv.ptr, nullptr) == DYNLAB_OK);
  CHECK(csv.str().rfind("claim_id,outcome", 0) == 0);

  Owned err;
  CHECK(dynlab_run_experiment(R"({"kind":"criterion-scan"})", &report.ptr,
                              &err.ptr) == DYNLAB_ERR_INVALID_ARGUMENT);
  CHECK(err.str().find("x_system") != std::string::npos);
  CHECK(dynlab_report_exit_code("not json") == -1);
}
