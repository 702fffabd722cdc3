#include <doctest.h>

#include <cmath>
#include <limits>

#include "couponalloc/csv.hpp"
#include "couponalloc/io.hpp"
#include "couponalloc/synthgen.hpp"
#include "fixtures.hpp"

using namespace couponalloc;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::current_path() / "io_scratch" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("format_double round-trips exactly") {
  Rng rng(3);
  for (int i = 0; i < 2000; ++i) {
    const double v = (rng.uniform() - 0.5) * std::pow(10.0, rng.uniform() * 40.0 - 20.0);
    CHECK(std::stod(csv::format_double(v)) == v);
  }
  for (double v : {0.0, 1.0, -2.5, 0.1, 1e-300, 1e300, std::numeric_limits<double>::min()}) {
    CHECK(std::stod(csv::format_double(v)) == v);
  }
  CHECK(csv::format_double(0.5) == "0.5");
  CHECK(csv::format_double(3.0) == "3");
}

TEST_CASE("dataset, catalog and effect matrices round-trip") {
  const auto dir = scratch("roundtrip");
  const auto cat = CouponCatalog::standard();
  const auto g = synthgen::generate(synthgen::default_model(cat), 300, cat, 1.0 / 7.0, 9);

  io::save_dataset(g.dataset, dir / "d.csv");
  const auto ds = io::load_dataset(dir / "d.csv", 1.0 / 7.0);
  REQUIRE(ds.size() == g.dataset.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    CHECK(ds.rows[i].customer_id == g.dataset.rows[i].customer_id);
    CHECK(ds.rows[i].features == g.dataset.rows[i].features);
    CHECK(ds.rows[i].arm == g.dataset.rows[i].arm);
    CHECK(ds.rows[i].outcome == g.dataset.rows[i].outcome);
  }

  io::save_catalog(cat, dir / "c.csv");
  const auto c = io::load_catalog(dir / "c.csv");
  REQUIRE(c.size() == cat.size());
  for (CouponId j = 1; j <= 6; ++j) {
    CHECK(c.label(j) == cat.label(j));
    CHECK(c.cost(j) == cat.cost(j));
  }

  io::save_cate(g.true_cate, dir / "t.csv", "tau");
  const auto t = io::load_cate(dir / "t.csv", "tau");
  CHECK(t.customer_ids() == g.true_cate.customer_ids());
  CHECK(t.values() == g.true_cate.values());
  CHECK_THROWS_WITH_AS(io::load_cate(dir / "t.csv", "pihat"), doctest::Contains("pihat_1"), Error);
}

TEST_CASE("cluster statistics, allocations and plans round-trip") {
  const auto dir = scratch("stats");
  Eigen::MatrixXd means(2, 3), se(2, 3);
  means << 1.0 / 3.0, 2, 3, -0.1, 5e-7, 6;
  se << 0.1, 0.2, 0.3, 0.4, 0.5, 0.6;
  const auto st = fixtures::make_stats({3, 2}, means, se);
  io::save_stats(st, dir / "s");
  const auto back = io::load_stats(dir / "s");
  CHECK(back.means == st.means);
  CHECK(back.stderrs == st.stderrs);
  CHECK(back.cov == st.cov);
  CHECK(back.sizes == st.sizes);
  CHECK(back.members == st.members);

  allocation::FractionalAllocation w;
  w.w = Eigen::MatrixXd::Zero(2, 3);
  w.w(0, 1) = 0.7;
  w.w(1, 2) = 1.0 / 3.0;
  w.budget = 12.5;
  io::save_allocation(w, dir / "w.csv");
  const auto wb = io::load_allocation(dir / "w.csv", 2, 3, 12.5);
  CHECK(wb.w == w.w);
  CHECK(wb.budget == 12.5);
  CHECK_THROWS_AS(io::load_allocation(dir / "w.csv", 1, 3, 12.5), Error);

  const auto cat = CouponCatalog::standard();
  const auto plan = make_plan({{4, 2}, {1, 6}, {9, 1}}, cat);
  io::save_plan(plan, dir / "p.csv");
  const auto pb = io::load_plan(dir / "p.csv", cat);
  CHECK(pb.assignments == plan.assignments);
  CHECK(pb.consumed_cost == plan.consumed_cost);
}

TEST_CASE("read errors name the file and the column") {
  const auto dir = scratch("errors");
  io::write_text(dir / "bad.csv", "customer_id,f0,arm,outcome\n1,0.5,2,abc\n");
  CHECK_THROWS_WITH_AS(io::load_dataset(dir / "bad.csv", 1.0 / 7.0),
                       doctest::Contains("bad.csv"), Error);
  CHECK_THROWS_WITH_AS(io::load_dataset(dir / "bad.csv", 1.0 / 7.0),
                       doctest::Contains("outcome"), Error);

  io::write_text(dir / "noarm.csv", "customer_id,f0,outcome\n1,0.5,2\n");
  CHECK_THROWS_WITH_AS(io::load_dataset(dir / "noarm.csv", 1.0 / 7.0),
                       doctest::Contains("arm"), Error);

  CHECK_THROWS_WITH_AS(io::load_catalog(dir / "absent.csv"), doctest::Contains("absent.csv"),
                       Error);
  io::write_text(dir / "cat.csv", "coupon_id,label,unit_cost\n1,a,5\n1,b,6\n");
  CHECK_THROWS_WITH_AS(io::load_catalog(dir / "cat.csv"), doctest::Contains("cat.csv"), Error);

  io::write_text(dir / "plan.csv", "customer_id,coupon_id\n1,2\n1,3\n");
  CHECK_THROWS_WITH_AS(io::load_plan(dir / "plan.csv", CouponCatalog::standard()),
                       doctest::Contains("appears twice"), Error);
}
