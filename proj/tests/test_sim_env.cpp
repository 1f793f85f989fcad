#include "selfplay/sim_env.hpp"

#include <doctest.h>

#include <cmath>
#include <map>

using namespace selfplay;

TEST_CASE("answer_probabilities follows the skill-difficulty logistic") {
  SimWorld world = make_default_world();

  SUBCASE("skill equal to difficulty gives p_correct 0.5") {
    world.bin_difficulty(0) = world.solver_skill;
    CHECK(correct_probability(world, 0) == doctest::Approx(0.5).epsilon(1e-12));
  }

  SUBCASE("a +10 margin saturates") {
    world.bin_difficulty(0) = world.solver_skill - 10.0;
    CHECK(correct_probability(world, 0) > 0.9999);
  }

  SUBCASE("ln 3 margin with 3 distractors: 0.75 correct, 1/12 each") {
    world.bin_difficulty(0) = world.solver_skill - std::log(3.0);
    const Vector probs = answer_probabilities(world, 0);
    CHECK(probs(0) == doctest::Approx(0.75).epsilon(1e-12));
    for (int d = 1; d <= 3; ++d) CHECK(probs(d) == doctest::Approx(1.0 / 12.0).epsilon(1e-12));
  }

  SUBCASE("sums to one for every bin") {
    for (int bin = 0; bin < world.n_bins; ++bin)
      CHECK(answer_probabilities(world, bin).sum() == doctest::Approx(1.0).epsilon(1e-12));
  }

  CHECK_THROWS(answer_probabilities(world, world.n_bins));
  CHECK_THROWS(answer_probabilities(world, -1));
}

TEST_CASE("solve draws N samples deterministically") {
  SimWorld world = make_default_world();

  SUBCASE("saturated world answers correct with zero entropy") {
    world.solver_skill = 30.0;
    world.solver_skill_ref = 30.0;
    Rng rng(3);
    const auto samples = solve(world, world.n_bins - 1, rng);
    REQUIRE(samples.size() == 5);
    for (const auto& s : samples) {
      CHECK(s.canonical == "correct");
      CHECK(s.words_before_answer == 3);
    }
    const auto dist = build_distribution(samples, 5);
    CHECK(dist.entropy_nats == 0.0);
  }

  SUBCASE("fixed seed reproduces the sample list") {
    Rng a(42), b(42);
    const auto sa = solve(world, 3, a);
    const auto sb = solve(world, 3, b);
    REQUIRE(sa.size() == sb.size());
    for (std::size_t i = 0; i < sa.size(); ++i) {
      CHECK(sa[i].canonical == sb[i].canonical);
      CHECK(sa[i].words_before_answer == sb[i].words_before_answer);
    }
  }

  SUBCASE("configurable words distribution") {
    world.words_lo = 2;
    world.words_hi = 9;
    Rng rng(8);
    bool varied = false;
    int first = -1;
    for (int trial = 0; trial < 50; ++trial) {
      for (const auto& s : solve(world, 3, rng)) {
        CHECK(s.words_before_answer >= 2);
        CHECK(s.words_before_answer <= 9);
        if (first < 0) first = s.words_before_answer;
        varied |= s.words_before_answer != first;
      }
    }
    CHECK(varied);
  }
}

TEST_CASE("category canonicals round-trip") {
  CHECK(category_canonical(0) == "correct");
  CHECK(category_canonical(2) == "d2");
  CHECK(category_index("correct") == 0);
  CHECK(category_index("d3") == 3);
  CHECK_THROWS(category_index("nope"));
}

TEST_CASE("composition enumeration is stars-and-bars complete") {
  CHECK(composition_count(5, 2) == 6);
  CHECK(composition_count(5, 4) == 56);
  CHECK(composition_count(2, 2) == 3);

  int visited = 0;
  std::vector<std::vector<int>> all;
  for_each_composition(5, 2, [&](std::span<const int> counts) {
    ++visited;
    all.emplace_back(counts.begin(), counts.end());
    CHECK(counts[0] + counts[1] == 5);
  });
  CHECK(visited == 6);
  CHECK(all.front() == std::vector<int>{5, 0});
  CHECK(all.back() == std::vector<int>{0, 5});

  // probabilities over all compositions sum to 1
  SimWorld world = make_default_world();
  const Vector probs = answer_probabilities(world, 4);
  double total = 0.0;
  for_each_composition(5, 4, [&](std::span<const int> counts) {
    total += composition_probability(counts, probs);
  });
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("exact_expected_rewards closed cases") {
  SolverRewardParams sp;
  ProposerRewardParams pp;

  SUBCASE("p_correct = 1 collapses to the single unanimous outcome") {
    SimWorld world = make_default_world(4, 3, 0.0, 2.0, 5);
    world.bin_difficulty.setConstant(-1e9);  // p_correct == 1 numerically
    const auto expected = exact_expected_rewards(world, 0, sp, pp);
    CHECK(expected.entropy_nats == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(expected.solver_reward_mean == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(expected.proposer_reward ==
          doctest::Approx(std::exp(-pp.mu_h * pp.mu_h / (2 * pp.sigma_h * pp.sigma_h)))
              .epsilon(1e-12));
  }

  SUBCASE("N=2, one distractor, p=0.5: hand enumeration") {
    SimWorld world = make_default_world(1, 1, 0.0, 1.0, 2);
    world.bin_difficulty(0) = 0.0;  // p_correct = 0.5
    const auto expected = exact_expected_rewards(world, 0, sp, pp);
    // outcomes 2-0, 1-1, 0-2 with probabilities 0.25, 0.5, 0.25
    CHECK(expected.entropy_nats == doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-12));
    const double r_half = std::pow(0.5, sp.gamma);
    CHECK(expected.solver_reward_mean == doctest::Approx(0.5 * 1.0 + 0.5 * r_half).epsilon(1e-12));
    const double g0 = proposer_reward(0.0, pp);
    const double gln2 = proposer_reward(std::log(2.0), pp);
    CHECK(expected.proposer_reward == doctest::Approx(0.5 * g0 + 0.5 * gln2).epsilon(1e-12));
  }

  SUBCASE("enumeration cap is enforced") {
    SimWorld world = make_default_world();
    CHECK_THROWS(exact_expected_rewards(world, 0, sp, pp, 10));
  }
}

TEST_CASE("Monte Carlo solve() agrees with the enumeration oracle") {
  // quick 3-sigma cross-check; the acceptance suite sweeps 20 random worlds
  SimWorld world = make_default_world();
  SolverRewardParams sp;
  ProposerRewardParams pp;
  const int bin = 3;
  const auto expected = exact_expected_rewards(world, bin, sp, pp);

  Rng rng(2024);
  const int trials = 50000;
  double sum_h = 0.0, sum_h2 = 0.0;
  double sum_r = 0.0, sum_r2 = 0.0;
  double sum_p = 0.0, sum_p2 = 0.0;
  for (int t = 0; t < trials; ++t) {
    const auto samples = solve(world, bin, rng);
    std::vector<std::optional<AnswerSample>> gens(samples.begin(), samples.end());
    const auto score = score_samples(gens, world.n_answers, sp, pp);
    double mean_r = 0.0;
    for (double r : score.solver_rewards) mean_r += r;
    mean_r /= static_cast<double>(score.solver_rewards.size());
    sum_h += score.entropy_nats;
    sum_h2 += score.entropy_nats * score.entropy_nats;
    sum_r += mean_r;
    sum_r2 += mean_r * mean_r;
    sum_p += score.proposer_reward;
    sum_p2 += score.proposer_reward * score.proposer_reward;
  }
  auto check3 = [&](double sum, double sum2, double exact) {
    const double mean = sum / trials;
    const double var = sum2 / trials - mean * mean;
    const double se = std::sqrt(std::max(var, 0.0) / trials);
    CHECK(std::abs(mean - exact) <= 3.0 * se + 1e-9);
  };
  check3(sum_h, sum_h2, expected.entropy_nats);
  check3(sum_r, sum_r2, expected.solver_reward_mean);
  check3(sum_p, sum_p2, expected.proposer_reward);
}

TEST_CASE("expected entropy decreases as p_correct saturates") {
  SolverRewardParams sp;
  ProposerRewardParams pp;
  SimWorld world = make_default_world(1, 3, 0.0, 1.0, 5);
  double previous = -1.0;
  // skill - difficulty from uniform answers (0 margin gives p=0.5 > 0.25)
  // down toward saturation; expected entropy must fall monotonically.
  const double uniform_margin = -std::log(3.0);  // p_correct = 0.25 = 1/(1+M)
  for (double margin = uniform_margin; margin <= 8.0; margin += 0.25) {
    world.bin_difficulty(0) = -margin;  // skill 0
    const double h = exact_expected_rewards(world, 0, sp, pp).entropy_nats;
    if (previous >= 0.0) CHECK(h <= previous + 1e-12);
    previous = h;
  }
}

TEST_CASE("reward landscape rows") {
  ProposerRewardParams pp;
  const auto rows = reward_landscape(5, 2, 0.7, pp);
  REQUIRE(rows.size() == 6);

  CHECK(rows[0].counts == std::vector<int>{5, 0});
  CHECK(rows[0].entropy_nats == 0.0);
  CHECK(rows[0].solver_continuous_mean == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rows[0].solver_discrete_mean == doctest::Approx(1.0).epsilon(1e-12));

  // row count is stars-and-bars for wider category counts too
  CHECK(reward_landscape(5, 4, 0.7, pp).size() == 56);

  const auto& r32 = rows[2];
  CHECK(r32.counts == std::vector<int>{3, 2});
  const double expected_cont = (3 * std::pow(0.6, 0.7) + 2 * std::pow(0.4, 0.7)) / 5.0;
  CHECK(r32.solver_continuous_mean == doctest::Approx(expected_cont).epsilon(1e-12));
  CHECK(r32.solver_discrete_mean == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(r32.entropy_nats ==
        doctest::Approx(-(0.6 * std::log(0.6) + 0.4 * std::log(0.4))).epsilon(1e-12));
}

TEST_CASE("best_bin picks the interior of a monotone grid") {
  ProposerRewardParams pp;

  SUBCASE("grid spanning saturated-easy to saturated-hard peaks strictly inside") {
    // Needs enough distractors that full confusion overshoots the entropy
    // band; with few categories the confused end lands inside the band and
    // legitimately wins (the default 3-distractor world behaves that way).
    const SimWorld world = make_default_world(8, 12, 0.0, 6.0, 5);
    const int best = best_bin(world, pp);
    CHECK(best > 0);
    CHECK(best < world.n_bins - 1);
  }

  SUBCASE("all-easy world pushes to the hardest bin") {
    SimWorld world = make_default_world(6, 3, 0.0, 1.0, 5);
    world.bin_difficulty = Vector::LinSpaced(6, -20.0, -10.0);  // H near 0 everywhere
    CHECK(best_bin(world, pp) == 5);
  }

  SUBCASE("identical difficulties tie-break to the lower index") {
    SimWorld world = make_default_world(2, 3, 0.0, 1.0, 5);
    world.bin_difficulty(0) = 0.7;
    world.bin_difficulty(1) = 0.7;
    CHECK(best_bin(world, pp) == 0);
  }
}

TEST_CASE("expected skill gradient: positive above uniform, zero at uniform") {
  SolverRewardParams sp;
  SimWorld world = make_default_world(1, 3, 0.0, 1.0, 5);

  SUBCASE("uniform answers give zero gradient by symmetry") {
    world.bin_difficulty(0) = std::log(3.0);  // p_correct = 0.25
    CHECK(std::abs(expected_skill_gradient(world, 0, sp)) < 1e-12);
  }

  SUBCASE("rich get richer above the uniform point") {
    for (double margin : {0.1, 0.5, 1.0, 2.0, 4.0}) {
      world.bin_difficulty(0) = -margin;
      CHECK(expected_skill_gradient(world, 0, sp) > 0.0);
    }
  }

  SUBCASE("oracle agrees with a Monte Carlo REINFORCE estimate") {
    world.bin_difficulty(0) = -0.8;
    const double exact = expected_skill_gradient(world, 0, sp);
    Rng rng(77);
    const int trials = 60000;
    double sum = 0.0, sum2 = 0.0;
    for (int t = 0; t < trials; ++t) {
      const auto samples = solve(world, 0, rng);
      std::vector<std::optional<AnswerSample>> gens(samples.begin(), samples.end());
      const auto score = score_samples(gens, world.n_answers, sp, ProposerRewardParams{});
      double g = 0.0;
      for (std::size_t i = 0; i < samples.size(); ++i)
        g += score.solver_rewards[i] *
             skill_score(world, 0, category_index(samples[i].canonical));
      g /= static_cast<double>(samples.size());
      sum += g;
      sum2 += g * g;
    }
    const double mean = sum / trials;
    const double se = std::sqrt((sum2 / trials - mean * mean) / trials);
    CHECK(std::abs(mean - exact) <= 3.0 * se);
  }
}

TEST_CASE("solver KL is zero at the reference and grows with skill drift") {
  SimWorld world = make_default_world();
  CHECK(solver_kl(world, 3) == 0.0);
  CHECK(solver_kl_grad(world, 3) == doctest::Approx(0.0).epsilon(1e-12));

  world.solver_skill += 0.5;
  CHECK(solver_kl(world, 3) > 0.0);
  CHECK(solver_kl_grad(world, 3) > 0.0);

  // finite-difference check of the gradient
  const double h = 1e-6;
  SimWorld plus = world, minus = world;
  plus.solver_skill += h;
  minus.solver_skill -= h;
  const double fd = (solver_kl(plus, 3) - solver_kl(minus, 3)) / (2.0 * h);
  CHECK(solver_kl_grad(world, 3) == doctest::Approx(fd).epsilon(1e-6));
}

TEST_CASE("world validation") {
  SimWorld world = make_default_world();
  validate(world);
  world.bin_difficulty(2) = world.bin_difficulty(1) - 1.0;
  CHECK_THROWS(validate(world));

  world = make_default_world();
  world.n_distractors = 0;
  CHECK_THROWS(validate(world));

  world = make_default_world();
  world.words_hi = world.words_lo - 1;
  CHECK_THROWS(validate(world));
}
