#include <doctest.h>

#include "otfs/downlink.hpp"
#include "otfs/equalizers.hpp"
#include "support.hpp"

using namespace otfs;
using namespace testing;

namespace {

const Grid kPaperGrid = make_grid(16, 16, 7500.0);

ChannelRealization flat_channel(cd h) {
  const std::vector<int> zero{0};
  Eigen::VectorXcd g(1);
  g << h;
  return {static_profile(1, zero), g};
}

// Two equal-gain taps of opposite sign at delays 0 and 1: D^{k,0} = 0 for every k.
ChannelRealization singular_channel() {
  const std::vector<int> taps{0, 1};
  Eigen::VectorXcd g(2);
  g << 1.0, -1.0;
  return {static_profile(2, taps), g};
}

ChannelProfile small_profile() { return ChannelProfile({{0, 0}, {1, 1}, {3, 2}, {2, 3}}); }

Frame<double> dd_frame(const Grid& g, const Vec& v) { return frame_from_vec<double>(g, v, Domain::DelayDoppler); }

const PowerAllocation kPower(0.75, 0.25);

}  // namespace

TEST_CASE("PowerAllocation validation") {
  CHECK_NOTHROW(PowerAllocation(0.75, 0.25));
  CHECK_THROWS_AS(PowerAllocation(0.7, 0.25), InvalidArgument);
  CHECK_THROWS_AS(PowerAllocation(1.0, 0.0), InvalidArgument);
  CHECK_THROWS_AS(PowerAllocation(-0.5, 1.5), InvalidArgument);
  const auto oma = PowerAllocation::oma();
  CHECK(oma.gamma0_sq == 1.0);
  CHECK(oma.gamma1_sq == 0.0);
}

TEST_CASE("fd_le_equalize inverts the channel") {
  Engine rng(21);
  SUBCASE("flat unit channel") {
    const Grid g = make_grid(4, 4, 1.0);
    const auto ch = build_block_circulant(flat_channel(1.0), g);
    const Vec s = random_vector(16, rng);
    const auto out = fd_le_equalize(ch.apply(dd_frame(g, s)), diagonalize(ch));
    CHECK(max_abs(out.vec() - s) < 1e-14);
  }
  SUBCASE("worked example channel, noiseless") {
    const Grid g = make_grid(4, 3, 1.0);
    Eigen::VectorXcd gains(2);
    gains << cd(0.8, -0.3), cd(-0.4, 0.9);
    const auto ch = build_block_circulant(ChannelRealization{ChannelProfile({{0, 0}, {1, 3}}), gains}, g);
    const Vec s = random_vector(12, rng);
    const auto out = fd_le_equalize(ch.apply(dd_frame(g, s)), diagonalize(ch));
    CHECK(max_abs(out.vec() - s) < 1e-10);
    CHECK(max_abs(out.vec() - ch.dense().inverse() * ch.dense() * s) < 1e-10);
  }
  SUBCASE("zero in, zero out") {
    const auto ch = build_block_circulant(random_realization(table1_profile(), 3), kPaperGrid);
    const auto out = fd_le_equalize(make_frame<double>(kPaperGrid, Domain::DelayDoppler), diagonalize(ch));
    CHECK(max_abs(out.values) == 0.0);
  }
}

TEST_CASE("fd_le_equalize equals the dense inverse on noisy observations") {
  Engine rng(22);
  for (auto [n, m] : {std::pair{4, 4}, std::pair{8, 8}, std::pair{4, 16}, std::pair{2, 3}}) {
    const Grid g = make_grid(n, m, 1.0);
    std::vector<Tap> taps{{0, 0}, {1 % m, 1 % n}, {m - 1, n - 1}};
    if (taps[1] == taps[0] || taps[2] == taps[1]) taps.pop_back();
    const auto ch = build_block_circulant(random_realization(ChannelProfile(taps), 7 * n + m), g);
    const Vec y = random_vector(n * m, rng);
    const Vec dense = ch.dense().partialPivLu().solve(y);
    CHECK(max_abs(fd_le_equalize(dd_frame(g, y), diagonalize(ch)).vec() - dense) < 1e-9);
  }
}

TEST_CASE("fd_le_equalize singular and domain errors") {
  const Grid g = make_grid(4, 4, 1.0);
  const auto ch = build_block_circulant(singular_channel(), g);
  const auto d = diagonalize(ch);
  CHECK(d.min_abs() < 1e-12);
  CHECK_THROWS_AS(fd_le_equalize(make_frame<double>(g, Domain::DelayDoppler), d), SingularChannel);
  CHECK_THROWS_AS(fd_le_equalize(make_frame<double>(g, Domain::TimeFrequency), d), DomainMismatch);
  CHECK(fd_le_sinr(d, 10.0, kPower) == 0.0);
}

TEST_CASE("fd_le_sinr closed-form cases") {
  const Grid g = make_grid(4, 4, 1.0);
  const auto d = diagonalize(build_block_circulant(flat_channel(1.0), g));
  CHECK(fd_le_sinr(d, 1.0, kPower) == doctest::Approx(0.6));
  CHECK(fd_le_sinr(d, 10.0, PowerAllocation::oma()) == doctest::Approx(7.5 / 0.75));
  // gamma0^2 = 3/4 with no interference term
  CHECK(noma_sinr(10.0, kPower, 1.0) == doctest::Approx(7.5 / 3.5));
}

TEST_CASE("phi equals the normalized trace of D^-1 D^-H") {
  const auto ch = build_block_circulant(random_realization(table1_profile(), 23), kPaperGrid);
  const auto d = diagonalize(ch);
  const Vec inv = d.vec().cwiseInverse();
  const double trace = (inv.asDiagonal() * Mat(inv.asDiagonal()).adjoint()).trace().real() / 256.0;
  CHECK(std::abs(trace - d.phi()) < 1e-12 * d.phi());
  // and the dense form: (1/NM) tr((H^H H)^{-1})
  const Mat h = ch.dense();
  const double dense = (h.adjoint() * h).inverse().trace().real() / 256.0;
  CHECK(std::abs(dense - d.phi()) < 1e-9 * d.phi());
}

TEST_CASE("fd_le_sinr matches the empirical per-symbol SINR") {
  const Grid g = make_grid(4, 4, 1.0);
  const auto ch = build_block_circulant(random_realization(small_profile(), 24), g);
  const auto d = diagonalize(ch);
  const double rho = 10.0;
  Engine rng(25);
  constexpr int draws = 100000;
  Eigen::VectorXd err_power = Eigen::VectorXd::Zero(16);
  for (int i = 0; i < draws; ++i) {
    const Vec x0 = random_vector(16, rng, rho);
    const Vec xq = random_vector(16, rng, rho);
    const Vec z = random_vector(16, rng);
    const Vec s = kPower.gamma0() * x0 + kPower.gamma1() * xq;
    const Vec y = flat(ch.apply(dd_frame(g, s).values)) + z;
    const Vec e = fd_le_equalize(dd_frame(g, y), d).vec() - kPower.gamma0() * x0;
    err_power += e.cwiseAbs2();
  }
  const double expected = fd_le_sinr(d, rho, kPower);
  for (int i = 0; i < 16; ++i) {
    const double empirical = rho * kPower.gamma0_sq / (err_power[i] / draws);
    CHECK(empirical == doctest::Approx(expected).epsilon(0.02));
  }
}

TEST_CASE("cholesky_factors") {
  SUBCASE("flat channel") {
    const cd h(0.6, -0.8);
    const auto f = cholesky_factors(build_block_circulant(flat_channel(h), make_grid(3, 4, 1.0)));
    CHECK(max_abs(f.l_factor - Mat::Identity(12, 12)) < 1e-15);
    CHECK((f.lambda.array() - std::norm(h)).abs().maxCoeff() < 1e-15);
  }
  SUBCASE("reconstruction and unit-lower structure") {
    const Grid g = make_grid(4, 4, 1.0);
    const auto ch = build_block_circulant(random_realization(small_profile(), 26), g);
    const auto f = cholesky_factors(ch);
    const Mat h = ch.dense();
    const Mat rebuilt = f.l_factor.adjoint() * f.lambda.cast<cd>().asDiagonal() * f.l_factor;
    CHECK(max_abs(rebuilt - h.adjoint() * h) < 1e-10);
    CHECK(max_abs(f.l_factor.diagonal().array() - cd(1.0)) < 1e-14);
    CHECK(max_abs(Mat(f.l_factor.triangularView<Eigen::StrictlyUpper>())) == 0.0);
    CHECK(f.lambda.minCoeff() > 0.0);
  }
  SUBCASE("last pivot is the total path power; first is 1/phi") {
    for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
      const auto real = random_realization(table1_profile(), seed);
      const auto ch = build_block_circulant(real, kPaperGrid);
      const auto f = cholesky_factors(ch);
      CHECK(std::abs(f.lambda[255] - real.total_power()) < 1e-12);
      CHECK(f.lambda[0] == doctest::Approx(1.0 / diagonalize(ch).phi()).epsilon(1e-9));
      CHECK(f.lambda.minCoeff() > 0.0);
    }
  }
  SUBCASE("rank-deficient channel") {
    CHECK_THROWS_AS(cholesky_factors(build_block_circulant(singular_channel(), make_grid(4, 4, 1.0))), SingularChannel);
  }
}

TEST_CASE("sparse pivot engine agrees with the dense factorization") {
  DfePivotEngine engine(table1_profile(), kPaperGrid);
  for (std::uint64_t seed = 30; seed < 34; ++seed) {
    const auto real = random_realization(table1_profile(), seed);
    const Eigen::VectorXd dense = cholesky_factors(build_block_circulant(real, kPaperGrid)).lambda;
    const Eigen::VectorXd sparse = engine.pivots(real);
    CHECK(((sparse - dense).array() / dense.array()).abs().maxCoeff() < 1e-9);
  }
  const Grid g = make_grid(4, 4, 1.0);
  DfePivotEngine small(small_profile(), g);
  const auto real = random_realization(small_profile(), 35);
  CHECK((small.pivots(real) - cholesky_factors(build_block_circulant(real, g)).lambda).cwiseAbs().maxCoeff() < 1e-12);
  CHECK_THROWS_AS(small.pivots(random_realization(table1_profile(), 1)), InvalidArgument);
}

TEST_CASE("fd_dfe_equalize") {
  Engine rng(40);
  SUBCASE("flat channel, genie: one-tap equalizer") {
    const Grid g = make_grid(2, 3, 1.0);
    const cd h(0.5, 0.5);
    const auto ch = build_block_circulant(flat_channel(h), g);
    const Vec x = random_vector(6, rng), z = random_vector(6, rng);
    const Vec y = h * x + z;
    const auto out = fd_dfe_equalize(dd_frame(g, y), ch, DfeFeedback<double>::genie(x));
    CHECK(max_abs(out.vec() - (x + z / h)) < 1e-14);
  }
  SUBCASE("random channel, genie: x + L (H^H H)^{-1} H^H z") {
    const Grid g = make_grid(4, 4, 1.0);
    const auto ch = build_block_circulant(random_realization(small_profile(), 41), g);
    const auto f = cholesky_factors(ch);
    const Mat h = ch.dense();
    const Vec x = random_vector(16, rng);
    const Vec noiseless = fd_dfe_equalize(dd_frame(g, h * x), ch, f, DfeFeedback<double>::genie(x)).vec();
    CHECK(max_abs(noiseless - x) < 1e-10);

    const Vec z = random_vector(16, rng);
    const Vec noisy = fd_dfe_equalize(dd_frame(g, h * x + z), ch, f, DfeFeedback<double>::genie(x)).vec();
    const Vec expected = x + f.l_factor * (h.adjoint() * h).inverse() * h.adjoint() * z;
    CHECK(max_abs(noisy - expected) < 1e-10);
  }
  SUBCASE("hard decisions on a noiseless QPSK frame equal the genie output") {
    const auto ch = build_block_circulant(random_realization(table1_profile(), 42), kPaperGrid);
    const auto alphabet = qpsk_alphabet<double>();
    Vec x(256);
    std::uniform_int_distribution<int> pick(0, 3);
    for (int i = 0; i < 256; ++i) x[i] = alphabet[pick(rng)];
    const auto y = ch.apply(dd_frame(kPaperGrid, x));
    const auto f = cholesky_factors(ch);
    const Vec genie = fd_dfe_equalize(y, ch, f, DfeFeedback<double>::genie(x)).vec();
    const Vec hard = fd_dfe_equalize(y, ch, f, DfeFeedback<double>::hard_decision()).vec();
    CHECK(max_abs(genie - hard) < 1e-9);
    CHECK(max_abs(genie - x) < 1e-9);
  }
  SUBCASE("argument errors") {
    const Grid g = make_grid(2, 2, 1.0);
    const auto ch = build_block_circulant(flat_channel(1.0), g);
    CHECK_THROWS_AS(fd_dfe_equalize(make_frame<double>(g, Domain::DelayDoppler), ch, DfeFeedback<double>::genie(Vec(3))),
                    InvalidArgument);
    CHECK_THROWS_AS(fd_dfe_equalize(make_frame<double>(g, Domain::TimeFrequency), ch, DfeFeedback<double>::hard_decision()),
                    DomainMismatch);
    CHECK_THROWS_AS(fd_dfe_equalize(make_frame<double>(g, Domain::DelayDoppler),
                                    build_block_circulant(singular_channel(), g), DfeFeedback<double>::hard_decision()),
                    SingularChannel);
  }
}

TEST_CASE("fd_dfe_sinrs") {
  SUBCASE("flat unit channel: every symbol sees the FD-LE SINR") {
    const auto ch = build_block_circulant(flat_channel(1.0), make_grid(3, 3, 1.0));
    const auto s = fd_dfe_sinrs(cholesky_factors(ch), 4.0, kPower);
    CHECK((s.array() - fd_le_sinr(diagonalize(ch), 4.0, kPower)).abs().maxCoeff() < 1e-14);
  }
  SUBCASE("last symbol uses the total path power") {
    const auto real = random_realization(table1_profile(), 50);
    const auto s = fd_dfe_sinrs(cholesky_factors(build_block_circulant(real, kPaperGrid)), 10.0, kPower);
    CHECK(s[255] == doctest::Approx(noma_sinr(10.0, kPower, 1.0 / real.total_power())).epsilon(1e-12));
  }
  SUBCASE("interference-plus-noise covariance is rho g1^2 I + Lambda^{-1}") {
    const Grid g = make_grid(4, 4, 1.0);
    const auto ch = build_block_circulant(random_realization(small_profile(), 51), g);
    const auto f = cholesky_factors(ch);
    const Mat h = ch.dense();
    const double rho = 5.0;
    const Mat p = f.l_factor * (h.adjoint() * h).inverse() * h.adjoint();
    const Mat cov = rho * kPower.gamma1_sq * Mat::Identity(16, 16) + p * p.adjoint();
    const Mat expected = rho * kPower.gamma1_sq * Mat::Identity(16, 16) +
                         Mat(f.lambda.cwiseInverse().cast<cd>().asDiagonal());
    CHECK(max_abs(cov - expected) < 1e-8);
    const auto s = fd_dfe_sinrs(f, rho, kPower);
    for (int i = 0; i < 16; ++i) CHECK(s[i] == doctest::Approx(rho * kPower.gamma0_sq / cov(i, i).real()));
  }
  SUBCASE("vanished pivots report zero SINR") {
    Eigen::VectorXd lambda(2);
    lambda << 0.0, 1.0;
    const auto s = fd_dfe_sinrs(lambda, 10.0, kPower);
    CHECK(s[0] == 0.0);
    CHECK(s[1] > 0.0);
  }
}

TEST_CASE("static_dfe_sinrs") {
  const Grid g2 = make_grid(1, 2, 1.0);
  const cd ha(0.9, 0.2), hb(-0.3, 0.4);
  const std::vector<int> taps{0, 1};
  Eigen::VectorXcd gains(2);
  gains << ha, hb;
  const ChannelRealization two{static_profile(2, taps), gains};
  const StaticChannel sc = make_static_channel(two, g2, true);
  // A_0 = [[ha, hb], [hb, ha]]; Gram = [[s, c], [c, s]] with s = |ha|^2+|hb|^2, c = 2 Re(conj(ha) hb).
  const double s = std::norm(ha) + std::norm(hb);
  const double c = 2.0 * (std::conj(ha) * hb).real();
  CHECK(sc.pivots[1] == doctest::Approx(s).epsilon(1e-14));
  CHECK(sc.pivots[0] == doctest::Approx((s * s - c * c) / s).epsilon(1e-12));

  const auto sinr = static_dfe_sinrs(sc, 3.0, kPower);
  CHECK(sinr[1] == doctest::Approx(noma_sinr(3.0, kPower, 1.0 / s)));

  const StaticChannel flat = make_static_channel(flat_channel(cd(0, 1)), make_grid(4, 8, 1.0), true);
  CHECK((static_dfe_sinrs(flat, 2.0, kPower).array() - noma_sinr(2.0, kPower, 1.0)).abs().maxCoeff() < 1e-14);

  const std::vector<int> noma_taps{0, 1, 2, 3};
  const auto real = random_realization(static_profile(4, noma_taps), 52);
  const StaticChannel rs = make_static_channel(real, kPaperGrid, true);
  CHECK(std::abs(rs.pivots[15] - real.total_power()) < 1e-12);

  CHECK_THROWS_AS(static_dfe_sinrs(make_static_channel(real, kPaperGrid, false), 1.0, kPower), InvalidArgument);
}

TEST_CASE("SINRs are nondecreasing in rho and in gamma0^2") {
  const auto ch = build_block_circulant(random_realization(table1_profile(), 60), kPaperGrid);
  const auto d = diagonalize(ch);
  const auto f = cholesky_factors(ch);
  double previous_le = 0.0;
  Eigen::VectorXd previous_dfe = Eigen::VectorXd::Zero(256);
  for (double rho : {0.1, 1.0, 10.0, 100.0, 1e4}) {
    const double le = fd_le_sinr(d, rho, kPower);
    const Eigen::VectorXd dfe = fd_dfe_sinrs(f, rho, kPower);
    CHECK(le >= previous_le);
    CHECK((dfe.array() >= previous_dfe.array()).all());
    previous_le = le;
    previous_dfe = dfe;
  }
  double previous = 0.0;
  for (double g0 : {0.55, 0.65, 0.75, 0.85, 0.95}) {
    const double le = fd_le_sinr(d, 10.0, PowerAllocation(g0, 1.0 - g0));
    CHECK(le >= previous);
    previous = le;
  }
}
