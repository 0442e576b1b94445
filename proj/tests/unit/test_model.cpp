#include <doctest.h>

#include <sstream>

#include "fcc/model.hpp"
#include "../support/random_params.hpp"

using namespace fcc;

TEST_CASE("build_system, light-load parameters") {
  const SwitchedSystem sys = build_system(testing::light_load());
  CHECK(sys.A1 == Mat2{-4000, -4000, 10000, 0});
  CHECK(sys.A2 == Mat2{-4000, 4000, -10000, 0});
  CHECK(sys.b1 == Vec2{400000, 0});
  CHECK(sys.half_period == 600e-6);
  CHECK(det(sys.A1) == doctest::Approx(4e7).epsilon(1e-15));
}

TEST_CASE("build_system, unit parameters and zero forcing") {
  const SwitchedSystem sys = build_system({1, 1, 1, 0, 2});
  CHECK(sys.A1 == Mat2{-1, -1, 1, 0});
  CHECK(sys.A2 == Mat2{-1, 1, -1, 0});
  CHECK(sys.b1 == Vec2{0, 0});
}

TEST_CASE("validation names the violated bound") {
  auto message = [](CircuitParams p) {
    try {
      validate(p);
    } catch (const InvalidParams& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message({1, -1, 1, 1, 1}) == "L must be > 0");
  CHECK(message({0, 1, 1, 1, 1}) == "R must be > 0");
  CHECK(message({1, 1, 0, 1, 1}) == "C must be > 0");
  CHECK(message({1, 1, 1, 1, 0}) == "T must be > 0");
  CHECK(message({1, 1, 1, -1, 1}) == "Vdc must be >= 0");
  CHECK(message({1, 1, 1, NAN, 1}) == "Vdc must be >= 0");
  CHECK(message({1, 1, 1, 0, 1}).empty());
  CHECK_THROWS_AS((void)build_system({1, -1, 1, 1, 1}), InvalidParams);
  CHECK_THROWS_AS((void)reduced_params({1, 1, 1, 1, -2}), InvalidParams);
}

TEST_CASE("reduced_params") {
  const ReducedParams f1 = reduced_params(testing::light_load());
  CHECK(f1.a == doctest::Approx(2.4).epsilon(1e-15));
  CHECK(f1.b == doctest::Approx(2.4).epsilon(1e-15));
  CHECK(f1.c == doctest::Approx(6.0).epsilon(1e-15));
  CHECK(f1.disc == doctest::Approx(-51.84).epsilon(1e-14));

  const ReducedParams rep = reduced_params({2, 1, 1, 0, 2});
  CHECK(rep.a == 2.0);
  CHECK(rep.b == 1.0);
  CHECK(rep.c == 1.0);
  CHECK(rep.disc == 0.0);

  const ReducedParams real = reduced_params({10, 1, 10, 0, 2});
  CHECK(real.a == 10.0);
  CHECK(real.b == 1.0);
  CHECK(real.c == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(real.disc == doctest::Approx(99.6).epsilon(1e-15));
}

TEST_CASE("reduced parameters round-trip through the system matrices") {
  for (const CircuitParams& p : testing::property_tuples(200, 99)) {
    const SwitchedSystem sys = build_system(p);
    const ReducedParams rp = reduced_params(p);
    CHECK(rp.a > 0);
    CHECK(rp.b > 0);
    CHECK(rp.c > 0);
    CHECK(rp.disc == rp.a * rp.a - 4.0 * rp.b * rp.c);
    CHECK(rp.disc < rp.a * rp.a);
    CHECK(rp.a == doctest::Approx(-sys.half_period * sys.A1.m11()).epsilon(4e-16));
    CHECK(rp.b == doctest::Approx(-sys.half_period * sys.A1.m12()).epsilon(4e-16));
    CHECK(rp.c == doctest::Approx(sys.half_period * sys.A1.m21()).epsilon(4e-16));
    const Mat2 d = Mat2::diagonal(1, -1);
    CHECK(sys.A2 == d * sys.A1 * d);
    CHECK(det(sys.A1) > 0);
    CHECK(det(sys.A2) > 0);
  }
}

TEST_CASE("parameter file format") {
  const CircuitParams p = parse_params(
      "# nominal set\n"
      "R = 2\n"
      "L: 10e-3\n"
      "C 100e-6   # flying capacitor\n"
      "\n"
      "Vdc=100\r\n"
      "T = 800e-5\n");
  CHECK(p.R == 2.0);
  CHECK(p.L == 10e-3);
  CHECK(p.C == 100e-6);
  CHECK(p.Vdc == 100.0);
  CHECK(p.T == 800e-5);

  const CircuitParams partial = parse_params("R = 5\n", testing::light_load());
  CHECK(partial.R == 5.0);
  CHECK(partial.L == testing::light_load().L);

  CHECK_THROWS_AS((void)parse_params("D = 0.3\n"), InvalidParams);
  CHECK_THROWS_AS((void)parse_params("duty_cycle = 0.5\n"), InvalidParams);
  CHECK_THROWS_AS((void)parse_params("Q = 1\n"), InvalidParams);
  CHECK_THROWS_AS((void)parse_params("R = abc\n"), InvalidParams);
  CHECK_THROWS_AS((void)parse_params("R\n"), InvalidParams);
  CHECK_THROWS_AS((void)load_params_file("/nonexistent/params.txt"), IoError);
}

TEST_CASE("parameters print in SI units") {
  std::ostringstream s;
  s << CircuitParams{1, 2, 3, 4, 5};
  CHECK(s.str() == "R=1 L=2 C=3 Vdc=4 T=5");
}
