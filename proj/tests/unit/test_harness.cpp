#include <cmath>

#include <gtest/gtest.h>

#include "qdpa/harness.hpp"

using namespace qdpa;

namespace {

RunConfig small_config(int k_max = 3, std::uint64_t frames = 300)
{
    RunConfig cfg;
    cfg.k_max = k_max;
    cfg.seeds = {1, 2};
    cfg.learning.training_frames = frames;
    cfg.workers = 1;
    return cfg;
}

} // namespace

TEST(TrainOneFbs, FirstGreedyActionAndUpdate)
{
    RunConfig cfg = small_config(1, 1);
    cfg.learning.epsilon_explore = 0.0;
    Deployment dep(cfg, 1);
    dep.activate_next();
    const std::size_t s = dep.states()[0];
    const TrainingTrace t = dep.train_newest();
    ASSERT_EQ(t.actions.size(), 1u);
    EXPECT_EQ(t.actions[0], 0u);
    EXPECT_DOUBLE_EQ(dep.tables()[0].value(s, 0), t.rewards[0]);
    EXPECT_EQ(dep.tables()[0].visits(s, 0), 1u);
}

TEST(TrainOneFbs, SameSeedSameTrace)
{
    const RunConfig cfg = small_config(2, 500);
    Deployment a(cfg, 7), b(cfg, 7);
    for (int k = 1; k <= 2; ++k) {
        const TrainingTrace ta = train_one_fbs(a, k);
        const TrainingTrace tb = train_one_fbs(b, k);
        EXPECT_EQ(ta.rewards, tb.rewards);
        EXPECT_EQ(ta.actions, tb.actions);
    }
    EXPECT_EQ(a.tables(), b.tables());
}

TEST(TrainOneFbs, RejectsOutOfOrderJoin)
{
    const RunConfig cfg = small_config();
    Deployment dep(cfg, 1);
    EXPECT_THROW(train_one_fbs(dep, 2), invalid_input);
}

TEST(TrainOneFbs, FrozenAgentsKeepTheirTables)
{
    for (LearningMode mode : {LearningMode::Independent, LearningMode::Cooperative}) {
        RunConfig cfg = small_config(4, 400);
        cfg.learning.mode = mode;
        Deployment dep(cfg, 3);
        train_one_fbs(dep, 1);
        train_one_fbs(dep, 2);
        const std::vector<QTable> before = dep.tables();
        train_one_fbs(dep, 3);
        dep.evaluate_greedy();
        train_one_fbs(dep, 4);
        EXPECT_EQ(dep.tables()[0], before[0]);
        EXPECT_EQ(dep.tables()[1], before[1]);
    }
}

TEST(TrainOneFbs, CooperativeMessageCount)
{
    RunConfig cfg = small_config(3, 250);
    cfg.learning.mode = LearningMode::Cooperative;
    cfg.state_model = StateSetModel::Full;
    Deployment dep(cfg, 2);
    EXPECT_EQ(train_one_fbs(dep, 1).cl_messages, 0u);
    EXPECT_EQ(train_one_fbs(dep, 2).cl_messages, 250u * 4u * 1u);
    EXPECT_EQ(train_one_fbs(dep, 3).cl_messages, 250u * 4u * 2u);

    cfg.learning.mode = LearningMode::Independent;
    Deployment il(cfg, 2);
    train_one_fbs(il, 1);
    EXPECT_EQ(train_one_fbs(il, 2).cl_messages, 0u);
}

TEST(TrainOneFbs, QValuesStayWithinValueBound)
{
    RunConfig cfg = small_config(5, 2000);
    Deployment dep(cfg, 4);
    for (int k = 1; k <= 5; ++k) {
        train_one_fbs(dep, k);
        const double vmax = value_bound(reward_bound(dep.scenario(), cfg.reward), cfg.learning.beta);
        for (const QTable& q : dep.tables()) EXPECT_LE(q.sup_norm(), vmax);
    }
}

TEST(RunIncremental, SingleFbsWithGreedyGivesTwoRecords)
{
    RunConfig cfg = small_config(1, 100);
    cfg.seeds = {5};
    const RunResult r = run_incremental(cfg);
    ASSERT_EQ(r.records.size(), 2u);
    EXPECT_EQ(r.records[0].method, "qdpa");
    EXPECT_EQ(r.records[1].method, "greedy");
    EXPECT_EQ(r.records[0].k_active, 1);
    EXPECT_EQ(r.records[1].k_active, 1);
}

TEST(RunIncremental, RecordCountWithoutBaselines)
{
    RunConfig cfg = small_config(10, 50);
    cfg.baselines.greedy = false;
    const RunResult r = run_incremental(cfg);
    EXPECT_EQ(r.records.size(), 20u);
}

TEST(RunIncremental, DeterministicAcrossWorkerCounts)
{
    RunConfig cfg = small_config(4, 300);
    cfg.seeds = {1, 2, 3};
    const RunResult a = run_incremental(cfg);
    cfg.workers = 3;
    const RunResult b = run_incremental(cfg);
    EXPECT_EQ(a.records, b.records);
}

TEST(RunIncremental, RecordsRecomputeFromPowers)
{
    RunConfig cfg = small_config(4, 300);
    cfg.baselines.exhaustive = true;
    const RunResult r = run_incremental(cfg);
    for (const MetricsRecord& rec : r.records) {
        ScenarioConfig sc = cfg.scenario;
        sc.seed = rec.seed;
        const Network net = build_scenario(sc, rec.k_active).network();
        const LinkReport links = evaluate_links(net, rec.powers_w);
        EXPECT_NEAR(links.r0, rec.mue_rate, 1e-9 * std::abs(rec.mue_rate));
        EXPECT_NEAR(links.fue_sum_rate(), rec.fue_sum_rate, 1e-9 * std::abs(rec.fue_sum_rate));
    }
}

TEST(RunIncremental, GreedyHasTheLowestMueRate)
{
    RunConfig cfg = small_config(4, 500);
    cfg.seeds = {1, 2, 3};
    cfg.baselines.exhaustive = true;
    const RunResult r = run_incremental(cfg);
    for (std::uint64_t seed : cfg.seeds) {
        for (int k = 1; k <= cfg.k_max; ++k) {
            double greedy = 0.0, lowest_other = 1e300;
            for (const auto& rec : r.records) {
                if (rec.seed != seed || rec.k_active != k) continue;
                if (rec.method == "greedy") {
                    greedy = rec.mue_rate;
                } else {
                    lowest_other = std::min(lowest_other, rec.mue_rate);
                }
            }
            EXPECT_LE(greedy, lowest_other + 1e-12);
        }
    }
}

TEST(RunIncremental, ExhaustiveBeyondBudgetIsSkippedWithWarning)
{
    RunConfig cfg = small_config(3, 50);
    cfg.seeds = {1};
    cfg.baselines.exhaustive = true;
    cfg.baselines.exhaustive_budget = 200; // 11^3 > 200 >= 11^2
    const RunResult r = run_incremental(cfg);
    int exhaustive = 0;
    for (const auto& rec : r.records) exhaustive += rec.method.rfind("exhaustive", 0) == 0 ? 1 : 0;
    EXPECT_EQ(exhaustive, 2);
    ASSERT_EQ(r.seeds[0].warnings.size(), 1u);
}

TEST(RunConfig, Validation)
{
    RunConfig cfg;
    cfg.seeds.clear();
    EXPECT_THROW(validate(cfg), invalid_input);
    cfg = {};
    cfg.k_max = 11;
    EXPECT_THROW(validate(cfg), invalid_input);
}

TEST(Ranking, CompetitionRanks)
{
    EXPECT_EQ(competition_ranks({3.0, 1.0, 3.0, 2.0}, true), (std::vector<int>{1, 4, 1, 3}));
    EXPECT_EQ(competition_ranks({3.0, 1.0, 3.0, 2.0}, false), (std::vector<int>{3, 1, 3, 2}));
}

TEST(Ranking, IdenticalConfigurationsTie)
{
    RunConfig cfg = small_config(2, 100);
    const Comparison c = sweep({{"a", cfg}, {"b", cfg}});
    ASSERT_EQ(c.ranking.size(), 2u);
    EXPECT_EQ(c.ranking[0].rank_power, c.ranking[1].rank_power);
    EXPECT_EQ(c.ranking[0].rank_sum_rate, c.ranking[1].rank_sum_rate);
    EXPECT_EQ(c.ranking[0].rank_mue_rate, c.ranking[1].rank_mue_rate);
    EXPECT_EQ(c.ranking[0].rank_sum_rate, 1);
}

TEST(Ranking, FourConfigurationsInTableOrder)
{
    const Comparison c = compare_configurations(small_config(2, 100));
    ASSERT_EQ(c.ranking.size(), 4u);
    EXPECT_EQ(c.ranking[0].label, "IL+X1");
    EXPECT_EQ(c.ranking[1].label, "CL+X1");
    EXPECT_EQ(c.ranking[2].label, "IL+X2");
    EXPECT_EQ(c.ranking[3].label, "CL+X2");
}

TEST(Aggregate, SeriesPerMethodAndK)
{
    const RunResult r = run_incremental(small_config(3, 100));
    const auto series = aggregate(r.records);
    EXPECT_EQ(series.size(), 6u);
    for (const auto& p : series) {
        EXPECT_EQ(p.n, 2u);
        if (p.method != "greedy") continue;
        EXPECT_NEAR(p.fbs_sum_power_mw_mean, p.k_active * 31.6227766, 1e-6);
    }
}

TEST(Theory, ReportsTheoreticalAndPracticalLength)
{
    const TheoryReport t = theory_report(RunConfig{});
    EXPECT_EQ(t.l_practical, 2000u);
    EXPECT_GT(t.r_max, 0.0);
    EXPECT_NEAR(t.epsilon, 0.1 * t.v_max, 1e-9 * t.v_max);
    EXPECT_EQ(t.l_theoretical, training_length(t.t_iterations, 32, 11));
    EXPECT_NEAR(t.practical_seconds_per_fbs, 4.0, 1e-12);
}
