#include <catch_amalgamated.hpp>

#include <numeric>
#include <random>

#include "omega_spectra/ptr.hpp"

using namespace omega_spectra;

namespace {

std::vector<std::size_t> periodic(const std::vector<std::size_t>& period, std::size_t n) {
  std::vector<std::size_t> a(n);
  for (std::size_t i = 0; i < n; ++i) a[i] = period[i % period.size()];
  return a;
}

// f-value element of x: the element sitting at position source[pos(x)].
std::map<Nat, Nat> values_of(const std::vector<Nat>& order, const std::vector<Nat>& source) {
  std::map<Nat, Nat> v;
  for (std::size_t i = 0; i < order.size(); ++i) v[order[i]] = order.at(source.at(i));
  return v;
}

UnitString block_source(const std::vector<std::vector<Nat>>& shapes, const std::vector<std::size_t>& word) {
  auto f = block_function(shapes, word);
  auto t = alpha_within(f, f.eval_bound());
  return UnitString::blocks(t);
}

}  // namespace

TEST_CASE("interleave search") {
  auto a01 = periodic({0, 1}, 40);
  auto r = interleave_search(a01, {0}, 0);
  CHECK(r.fillers == std::vector<std::vector<std::size_t>>{{}});

  r = interleave_search(a01, {1, 1}, 0);
  CHECK(r.fillers == std::vector<std::vector<std::size_t>>{{0}, {0}});

  auto a012 = periodic({0, 1, 2}, 40);
  r = interleave_search(a012, {2, 0}, 0);
  CHECK(r.fillers == std::vector<std::vector<std::size_t>>{{0, 1}, {}});

  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::size_t> period(1 + rng() % 5);
    for (auto& p : period) p = rng() % 3;
    period.push_back(0), period.push_back(1), period.push_back(2);
    auto a = periodic(period, 300);
    std::vector<std::size_t> sigma(1 + rng() % 6);
    for (auto& s : sigma) s = rng() % 3;
    std::size_t from = rng() % 20;
    auto res = interleave_search(a, sigma, from);
    std::vector<std::size_t> glued;
    for (std::size_t i = 0; i < sigma.size(); ++i) {
      glued.insert(glued.end(), res.fillers[i].begin(), res.fillers[i].end());
      glued.push_back(sigma[i]);
      // earliest match: the filler never contains the symbol it precedes
      CHECK(std::find(res.fillers[i].begin(), res.fillers[i].end(), sigma[i]) == res.fillers[i].end());
    }
    CHECK(std::equal(glued.begin(), glued.end(), a.begin() + from));
    CHECK(res.end == from + glued.size());
  }

  CHECK_THROWS_AS(interleave_search(periodic({0}, 10), {1}, 0), Error);
}

TEST_CASE("value target on a finite-range source") {
  std::vector<Nat> f(200);
  for (Nat n = 0; n < 200; ++n) f[n] = n % 2;
  auto src = UnitString::points(f);
  std::vector<Nat> pres = {1, 3, 5, 0, 7, 9};
  // 0 sits at position 3 (value position 1); move it to value position 0.
  PtrSplit split{3, 4, {}};
  FreshSupplier fresh(11);
  auto tgt = value_target(0);
  auto r = ptr_apply(pres, split, tgt, src, fresh);
  CHECK(r.order == std::vector<Nat>{1, 3, 5, 11, 0, 13, 7, 9});
  auto before = values_of(pres, f), after = values_of(r.order, f);
  CHECK(after[0] == 1);
  for (Nat x : {1, 3, 5, 7, 9}) CHECK(before[x] == after[x]);
  CHECK(ptr_check(pres, split, r, tgt, src).empty());
}

TEST_CASE("empty C and D leave the presentation alone") {
  auto src = UnitString::points(std::vector<Nat>(50, 0));
  std::vector<Nat> pres = {1, 3, 5};
  FreshSupplier fresh(7);
  auto r = ptr_apply(pres, PtrSplit{3, 3, {}}, value_target(0), src, fresh);
  CHECK(r.order == pres);
  CHECK(r.fillers.empty());
  CHECK(fresh.peek() == 7);
}

TEST_CASE("shape swap on an alternating two-type source") {
  // I0 = a swapped pair, I1 = a fixed point, alpha = 0101...
  std::vector<std::vector<Nat>> shapes = {{1, 0}, {0}};
  auto src = block_source(shapes, periodic({0, 1}, 60));
  // Presentation: first 6 blocks (positions 0..8). C = blocks 2,3 (I0 + I1), D = blocks 4,5.
  std::vector<Nat> pres;
  for (Nat i = 0; i < src.end(5); ++i) pres.push_back(2 * i + 1);
  const std::size_t b_end = src.begin(2), c_end = src.begin(4);
  PtrSplit split{b_end, c_end, {}};
  FreshSupplier fresh(1001);
  auto tgt = shape_target({1, 0}, &src);
  auto r = ptr_apply(pres, split, tgt, src, fresh);
  CHECK(ptr_check(pres, split, r, tgt, src).empty());

  // Independent look at the result: blocks from the presentation's own function.
  auto after = FinitePresentation::induced(r.order, src.values);
  auto c_first = after.position(pres[b_end]);
  auto blk0 = after.block_at(c_first);
  auto blk1 = after.block_at(blk0.hi + 1);
  CHECK(iso_type(blk0, FBlock::from_shape({0})));
  CHECK(iso_type(blk1, FBlock::from_shape({1, 0})));
  CHECK(blk1.hi + 1 - c_first == c_end - b_end);
  auto vb = values_of(pres, src.values), va = values_of(r.order, src.values);
  for (std::size_t i = 0; i < pres.size(); ++i)
    if (i < b_end || i >= c_end) CHECK(vb[pres[i]] == va[pres[i]]);
}

TEST_CASE("position target reproduces the q-before / 1-after pattern") {
  // Single recurring type of size 3 (q = 2).
  std::vector<std::vector<Nat>> shapes = {{1, 2, 0}};
  auto src = block_source(shapes, std::vector<std::size_t>(40, 0));
  std::vector<Nat> pres;
  for (Nat i = 0; i < 9; ++i) pres.push_back(2 * i + 1);
  pres[6] = 0;  // anchor at the left end of the third block
  PtrSplit split{6, 9, {}};
  FreshSupplier fresh(101);
  auto tgt = position_target(0, 0, 3, BlockEnd::Right, true, &src, 0);
  auto r = ptr_apply(pres, split, tgt, src, fresh);
  CHECK(ptr_check(pres, split, r, tgt, src).empty());
  auto after = FinitePresentation::induced(r.order, src.values);
  auto p0 = after.position(0);
  CHECK(p0 % 3 == 2);
  CHECK(r.c_new.size() == 3);
  CHECK(after.position(r.c_new[0]) + 2 == p0);  // two new before the anchor
  CHECK(after.position(r.c_new[2]) == p0 + 3);  // one new after the old companions

  // And back: anchor to the left end, one new before and two after.
  std::vector<Nat> pres2 = r.order;
  auto c_lo = after.position(r.c_group.front());
  PtrSplit split2{c_lo, c_lo + r.c_group.size(), {}};
  auto tgt2 = position_target(0, p0 - c_lo, r.c_group.size(), BlockEnd::Left, true, &src, 0);
  auto r2 = ptr_apply(pres2, split2, tgt2, src, fresh);
  CHECK(ptr_check(pres2, split2, r2, tgt2, src).empty());
  auto after2 = FinitePresentation::induced(r2.order, src.values);
  CHECK(after2.position(0) % 3 == 0);
  CHECK(r2.c_new.size() == 3);
  CHECK(after2.position(r2.c_new[0]) + 1 == after2.position(r2.c_group[1]));
}

TEST_CASE("stretching a d b^m e group keeps the anchor's value") {
  // 0 1^m 2 with growing m; b = 1 is a swapped pair so its two ends differ.
  std::vector<std::vector<Nat>> shapes = {{0}, {1, 0}, {1, 2, 0}};
  std::vector<std::size_t> w;
  for (std::size_t m = 1; m <= 10; ++m) {
    w.push_back(0);
    w.insert(w.end(), m, 1);
    w.push_back(2);
  }
  auto src = block_source(shapes, w);
  // Group: the first occurrence 0 1 2 at positions [0, 6): d(1) b(2) e(3), anchor at the b run start.
  std::vector<Nat> pres = {1, 0, 3, 5, 7, 9};
  StretchSpec spec{0, 1, 2, 1, 1, 0, BlockEnd::Right};
  TargetCondition tgt{"stretch", stretch_placer(spec, 1, 2, 3), nullptr};
  PtrSplit split{0, 6, {}};
  FreshSupplier fresh(11);
  auto r = ptr_apply(pres, split, tgt, src, fresh);
  CHECK(ptr_check(pres, split, r, tgt, src).empty());
  REQUIRE(r.c_exponent);
  CHECK(*r.c_exponent == 2);
  auto after = FinitePresentation::induced(r.order, src.values);
  CHECK(at_block_end(after, src, 0, 1, BlockEnd::Right));
  CHECK(r.c_group.size() == 1 + 4 + 3);

  // Keeping the anchor offset (D-style stretch) leaves f(anchor) alone.
  StretchSpec keep{0, 1, 2, 1, 1, 0, std::nullopt};
  PtrSplit split2{0, 0, {PtrSplit::Group{0, 6, stretch_placer(keep, 1, 2, 3)}}};
  FreshSupplier fresh2(11);
  auto r2 = ptr_apply(pres, split2, TargetCondition{}, src, fresh2);
  CHECK(ptr_check(pres, split2, r2, TargetCondition{}, src).empty());
  CHECK(r2.d_group_exponent[0] == std::optional<std::size_t>(2));
  CHECK(values_of(pres, src.values)[0] == values_of(r2.order, src.values)[0]);
}

TEST_CASE("randomized PtR over periodic sources") {
  const std::vector<std::vector<Nat>> catalog = {{0}, {1, 0}, {1, 2, 0}, {0, 0}, {1, 1}};
  std::mt19937_64 rng(20240611);
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t sigma = 1 + rng() % 4;
    std::vector<std::vector<Nat>> shapes;
    std::vector<std::size_t> pick(catalog.size());
    std::iota(pick.begin(), pick.end(), 0);
    std::shuffle(pick.begin(), pick.end(), rng);
    for (std::size_t i = 0; i < sigma; ++i) shapes.push_back(catalog[pick[i]]);
    std::vector<std::size_t> period(sigma);
    std::iota(period.begin(), period.end(), 0);
    for (std::size_t extra = rng() % 4; extra > 0; --extra) period.push_back(rng() % sigma);
    std::shuffle(period.begin(), period.end(), rng);
    auto src = block_source(shapes, periodic(period, 400));

    const std::size_t units = 4 + rng() % 12;
    std::vector<Nat> pres;
    for (Nat p = 0; p < src.begin(units); ++p) pres.push_back(2 * p + 1);
    std::size_t ub = rng() % units, uc = ub + rng() % (units - ub + 1);
    if (uc == ub && uc < units) ++uc;
    PtrSplit split{src.begin(ub), src.begin(uc), {}};
    // one rigid D group of up to 3 units
    if (uc + 1 < units) {
      std::size_t g_lo = uc + rng() % (units - uc - 1), g_hi = std::min(units, g_lo + 1 + rng() % 3);
      split.d_groups.push_back({src.begin(g_lo), src.begin(g_hi), {}});
    }
    const std::size_t c_size = split.c_end - split.b_end;
    const std::size_t anchor_off = c_size ? rng() % c_size : 0;
    const Nat anchor = c_size ? pres[split.b_end + anchor_off] : 0;
    auto tgt = position_target(rng() % sigma, anchor_off, c_size, rng() % 2 ? BlockEnd::Left : BlockEnd::Right, false, &src, anchor);

    FreshSupplier fresh(10001);
    auto r = ptr_apply(pres, split, tgt, src, fresh);
    INFO("trial " << trial);
    CHECK(ptr_check(pres, split, r, tgt, src).empty());

    auto vb = values_of(pres, src.values), va = values_of(r.order, src.values);
    for (std::size_t i = 0; i < pres.size(); ++i)
      if (i < split.b_end || i >= split.c_end) CHECK(vb[pres[i]] == va[pres[i]]);
    CHECK(std::equal(pres.begin(), pres.begin() + split.b_end, r.order.begin()));
    for (Nat x : r.order)
      if (x > 10000) CHECK(x % 2 == 1);
  }
}
