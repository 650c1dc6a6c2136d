#include <cmath>
#include <complex>
#include <map>
#include <numbers>

#include "doctest.h"
#include "swapsim/optics.hpp"
#include "swapsim/source.hpp"

using namespace swapsim;
using std::numbers::pi;

namespace {

bool close(cplx a, cplx b, double tol = 1e-12) { return std::abs(a - b) <= tol; }

// Probability of each (slot multiset) keyed by a readable reduction.
double outcome_probability(const std::vector<OccupancyOutcome>& dist,
                           const std::vector<Slot>& slots) {
  for (const auto& o : dist)
    if (o.slots == slots) return o.probability;
  return 0.0;
}

}  // namespace

TEST_CASE("channel validation rejects out-of-range transmission") {
  ChannelParams ch;
  ch.transmission = 1.5;
  CHECK_THROWS_AS(ch.validate("channel.alice"), std::invalid_argument);
  ch.transmission = 0.9;
  ch.length_km = -1.0;
  CHECK_THROWS_AS(ch.validate("channel.alice"), std::invalid_argument);
}

TEST_CASE("analyzer kept port halves the amplitude and adds the phase") {
  const double alpha = 0.3;
  const StateVector in = StateVector::single(make_ket({{PhotonLabel::A, 0}}));
  const StateVector out = analyzer_evolve(in, PhotonLabel::A, alpha);
  CHECK(close(out.amplitude(make_ket({{PhotonLabel::A, 0}})), cplx(0.5, 0.0)));
  CHECK(close(out.amplitude(make_ket({{PhotonLabel::A, 1}})), std::polar(0.5, alpha)));
  CHECK(out.norm2() == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("unitary analyzer keeps the norm and flips the lost-port sign") {
  const double alpha = 1.2;
  const StateVector in = StateVector::single(make_ket({{PhotonLabel::A, 1}}));
  const StateVector out = analyzer_evolve_unitary(in, PhotonLabel::A, alpha);
  CHECK(out.norm2() == doctest::Approx(1.0).epsilon(1e-12));

  BasisKet lost_early;
  lost_early = lost_early.with(PhotonLabel::A, Slot{Mode::lost_a, 1});
  BasisKet lost_late;
  lost_late = lost_late.with(PhotonLabel::A, Slot{Mode::lost_a, 2});
  CHECK(close(out.amplitude(lost_early), cplx(0.5, 0.0)));
  CHECK(close(out.amplitude(lost_late), -std::polar(0.5, alpha)));
}

TEST_CASE("coupler splits each input line into E and F with i cross terms") {
  const StateVector b_in = StateVector::single(make_ket({{PhotonLabel::B, 0}}));
  const StateVector b_out = bsa_beamsplitter(b_in);
  BasisKet be, bf;
  be = be.with(PhotonLabel::B, Slot{Mode::bsa_e, 0});
  bf = bf.with(PhotonLabel::B, Slot{Mode::bsa_f, 0});
  const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
  CHECK(close(b_out.amplitude(be), cplx(inv_sqrt2, 0.0)));
  CHECK(close(b_out.amplitude(bf), cplx(0.0, inv_sqrt2)));

  const StateVector c_in = StateVector::single(make_ket({{PhotonLabel::C, 0}}));
  const StateVector c_out = bsa_beamsplitter(c_in);
  BasisKet ce, cf;
  ce = ce.with(PhotonLabel::C, Slot{Mode::bsa_e, 0});
  cf = cf.with(PhotonLabel::C, Slot{Mode::bsa_f, 0});
  CHECK(close(c_out.amplitude(ce), cplx(0.0, inv_sqrt2)));
  CHECK(close(c_out.amplitude(cf), cplx(inv_sqrt2, 0.0)));

  // A photon already off its home line cannot enter the coupler.
  StateVector moved(b_out);
  CHECK_THROWS_AS((void)bsa_beamsplitter(moved), std::invalid_argument);
}

TEST_CASE("same-bin photons bunch at the coupler") {
  const StateVector in = tensor(StateVector::single(make_ket({{PhotonLabel::B, 0}})),
                                StateVector::single(make_ket({{PhotonLabel::C, 0}})));
  const auto dist = arrival_distribution(bsa_beamsplitter(in));

  double total = 0.0;
  for (const auto& o : dist) total += o.probability;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));

  CHECK(outcome_probability(dist, {{Mode::bsa_e, 0}, {Mode::bsa_e, 0}}) ==
        doctest::Approx(0.5).epsilon(1e-12));
  CHECK(outcome_probability(dist, {{Mode::bsa_f, 0}, {Mode::bsa_f, 0}}) ==
        doctest::Approx(0.5).epsilon(1e-12));
  // The Hong-Ou-Mandel null: never one photon on each output.
  CHECK(outcome_probability(dist, {{Mode::bsa_e, 0}, {Mode::bsa_f, 0}}) == 0.0);
}

TEST_CASE("different-bin photons split uniformly over the four patterns") {
  const StateVector in = tensor(StateVector::single(make_ket({{PhotonLabel::B, 0}})),
                                StateVector::single(make_ket({{PhotonLabel::C, 1}})));
  const auto dist = arrival_distribution(bsa_beamsplitter(in));
  CHECK(outcome_probability(dist, {{Mode::bsa_e, 0}, {Mode::bsa_e, 1}}) ==
        doctest::Approx(0.25).epsilon(1e-12));
  CHECK(outcome_probability(dist, {{Mode::bsa_e, 0}, {Mode::bsa_f, 1}}) ==
        doctest::Approx(0.25).epsilon(1e-12));
  CHECK(outcome_probability(dist, {{Mode::bsa_e, 1}, {Mode::bsa_f, 0}}) ==
        doctest::Approx(0.25).epsilon(1e-12));
  CHECK(outcome_probability(dist, {{Mode::bsa_f, 0}, {Mode::bsa_f, 1}}) ==
        doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("bell states produce their signature coupler patterns") {
  const auto bc_state = [](BellFamily f) {
    return bell_state({f, 0.0}, PhotonLabel::B, PhotonLabel::C);
  };

  // psi-: one photon on each output, different bins, probability 1.
  {
    const auto dist = arrival_distribution(bsa_beamsplitter(bc_state(BellFamily::psi_minus)));
    double split = 0.0;
    for (const auto& o : dist) {
      REQUIRE(o.slots.size() == 2);
      const bool cross = o.slots[0].mode != o.slots[1].mode;
      const bool diff_bin = o.slots[0].bin != o.slots[1].bin;
      if (cross && diff_bin) split += o.probability;
    }
    CHECK(split == doctest::Approx(1.0).epsilon(1e-12));
  }

  // psi+: both photons on one output, different bins.
  {
    const auto dist = arrival_distribution(bsa_beamsplitter(bc_state(BellFamily::psi_plus)));
    double same_mode_diff_bin = 0.0;
    for (const auto& o : dist) {
      const bool same_mode = o.slots[0].mode == o.slots[1].mode;
      const bool diff_bin = o.slots[0].bin != o.slots[1].bin;
      if (same_mode && diff_bin) same_mode_diff_bin += o.probability;
    }
    CHECK(same_mode_diff_bin == doctest::Approx(1.0).epsilon(1e-12));
  }

  // phi family: bunched, same output and same bin.
  for (const auto family : {BellFamily::phi_plus, BellFamily::phi_minus}) {
    const auto dist = arrival_distribution(bsa_beamsplitter(bc_state(family)));
    double bunched = 0.0;
    for (const auto& o : dist)
      if (o.slots[0] == o.slots[1]) bunched += o.probability;
    CHECK(bunched == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("swapped pairs interfere with the analyzer phase difference") {
  // psi+ on (A, D) through both analyzers, kept ports only: coincidence
  // weights per arrival-time window follow 1 : 2 : 2+2cos(alpha-beta) : 2 : 1
  // in units of 1/32.
  const double alpha = 0.7, beta = 0.2;
  StateVector s = bell_state({BellFamily::psi_plus, 0.0}, PhotonLabel::A, PhotonLabel::D);
  s = analyzer_evolve(s, PhotonLabel::A, alpha);
  s = analyzer_evolve(s, PhotonLabel::D, beta);

  std::map<int, double> window;
  for (const auto& o : arrival_distribution(s)) {
    REQUIRE(o.slots.size() == 2);
    int bin_a = 0, bin_d = 0;
    for (const Slot& slot : o.slots) {
      if (slot.mode == Mode::line_a) bin_a = slot.bin;
      if (slot.mode == Mode::line_d) bin_d = slot.bin;
    }
    window[bin_a - bin_d] += o.probability;
  }

  const double unit = 1.0 / 32.0;
  CHECK(window[-2] == doctest::Approx(unit).epsilon(1e-12));
  CHECK(window[-1] == doctest::Approx(2.0 * unit).epsilon(1e-12));
  CHECK(window[0] ==
        doctest::Approx((2.0 + 2.0 * std::cos(alpha - beta)) * unit).epsilon(1e-12));
  CHECK(window[1] == doctest::Approx(2.0 * unit).epsilon(1e-12));
  CHECK(window[2] == doctest::Approx(unit).epsilon(1e-12));
}

TEST_CASE("the full chain conserves probability") {
  SourceParams p;
  p.delta = 0.5;
  StateVector s = tensor(ideal_pair_state(1, p), ideal_pair_state(2, p));
  s = analyzer_evolve_unitary(s, PhotonLabel::A, 0.8);
  s = analyzer_evolve_unitary(s, PhotonLabel::D, 1.9);
  s = bsa_beamsplitter(s);
  CHECK(s.norm2() == doctest::Approx(1.0).epsilon(1e-12));

  double total = 0.0;
  for (const auto& o : arrival_distribution(s)) total += o.probability;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("channel thinning keeps each photon independently") {
  ChannelParams ch;
  ch.transmission = 1.0;
  RngStream rng(21, 0, 0);
  CHECK(apply_transmission(5, ch, rng) == 5);
  ch.transmission = 0.0;
  CHECK(apply_transmission(5, ch, rng) == 0);

  ch.transmission = 0.7;
  std::int64_t kept = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) kept += apply_transmission(1, ch, rng);
  CHECK(static_cast<double>(kept) / n == doctest::Approx(0.7).epsilon(0.02));
}
