#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "radar_slam/errors.hpp"
#include "radar_slam/manager.hpp"

#include "oracles.hpp"

using namespace radar_slam;

namespace {

const Eigen::Matrix2d kR = Eigen::Vector2d(0.25, 3e-4).asDiagonal();

AugmentedState state_with_landmarks(const Pose& pose,
                                    const std::vector<Eigen::Vector2d>& landmarks,
                                    double block_var = 0.3) {
    AugmentedState state;
    state.set_pose(pose);
    for (const Eigen::Vector2d& lm : landmarks) {
        state.append_landmark(lm, Eigen::MatrixXd::Zero(2, state.dim()),
                              block_var * Eigen::Matrix2d::Identity());
    }
    return state;
}

RadarDetection detection_at(const Pose& pose, const Eigen::Vector2d& point,
                            double amplitude = 0.5) {
    const RangeBearing rb = measure(pose, point);
    RadarDetection z;
    z.r = rb.r;
    z.phi = rb.phi;
    z.amplitude = amplitude;
    z.R = kR;
    return z;
}

LandmarkRecord make_record(int index, long id, int m_rem) {
    LandmarkRecord rec;
    rec.landmark_index = index;
    rec.id = id;
    rec.hit_window = BoolRing(static_cast<std::size_t>(m_rem));
    rec.in_range_window = BoolRing(static_cast<std::size_t>(m_rem));
    return rec;
}

}  // namespace

TEST_CASE("sift partitions detections around registered landmarks") {
    ManagerConfig cfg;

    SUBCASE("no landmarks sends everything to the remainder") {
        AugmentedState state;
        std::vector<RadarDetection> zs;
        for (int i = 0; i < 5; ++i) {
            zs.push_back(detection_at(state.pose(), {5.0 + i, 2.0}));
        }
        const SiftResult out = sift(zs, state, cfg);
        CHECK(out.candidates.empty());
        CHECK(out.remainder.size() == 5);
    }

    SUBCASE("a detection projecting onto a landmark is a candidate") {
        AugmentedState state = state_with_landmarks({0.0, 0.0, 0.0}, {{7.0, 3.0}});
        const SiftResult out = sift({detection_at(state.pose(), {7.0, 3.0})}, state, cfg);
        CHECK(out.candidates.size() == 1);
        CHECK(out.remainder.empty());
    }

    SUBCASE("random sets match the brute-force distance partition") {
        std::mt19937 gen(19);
        std::uniform_real_distribution<double> pos(-15.0, 15.0);
        for (int trial = 0; trial < 30; ++trial) {
            std::vector<Eigen::Vector2d> lms;
            for (int i = 0; i < 3; ++i) {
                lms.emplace_back(pos(gen), pos(gen));
            }
            const Pose pose{pos(gen) / 4.0, pos(gen) / 4.0, pos(gen) / 10.0};
            AugmentedState state = state_with_landmarks(pose, lms);

            std::vector<RadarDetection> zs;
            std::vector<Eigen::Vector2d> points;
            for (int i = 0; i < 40; ++i) {
                Eigen::Vector2d p(pos(gen), pos(gen));
                if ((p - Eigen::Vector2d(pose.x, pose.y)).norm() < 0.5) {
                    continue;
                }
                points.push_back(p);
                zs.push_back(detection_at(pose, p));
            }
            const SiftResult out = sift(zs, state, cfg);
            CHECK(out.candidates.size() + out.remainder.size() == zs.size());

            std::size_t expected_candidates = 0;
            for (const Eigen::Vector2d& p : points) {
                bool near = false;
                for (const Eigen::Vector2d& lm : lms) {
                    if ((p - lm).norm() < cfg.gamma_s) {
                        near = true;
                    }
                }
                expected_candidates += near ? 1 : 0;
            }
            CHECK(out.candidates.size() == expected_candidates);
        }
    }
}

TEST_CASE("associate_and_update") {
    ManagerConfig cfg;

    SUBCASE("empty candidate set changes nothing") {
        AugmentedState state = state_with_landmarks({0.0, 0.0, 0.0}, {{5.0, 5.0}});
        const AugmentedState before = state;
        const AssociationOutcome out = associate_and_update(state, {}, cfg);
        CHECK(out.association_count == 0);
        CHECK(out.hits == std::vector<bool>{false});
        CHECK(state.mean() == before.mean());
        CHECK(state.covariance() == before.covariance());
    }

    SUBCASE("a near-exact detection pulls the landmark and shrinks the trace") {
        AugmentedState state = state_with_landmarks({0.0, 0.0, 0.0}, {{8.0, 0.0}});
        const Eigen::Vector2d target(8.3, 0.1);
        RadarDetection z = detection_at(state.pose(), target);
        z.R = Eigen::Vector2d(1e-4, 1e-6).asDiagonal();

        const double trace_before = state.covariance().trace();
        const double dist_before = (state.landmark(0) - target).norm();
        const AssociationOutcome out = associate_and_update(state, {z}, cfg);

        REQUIRE(out.association_count == 1);
        CHECK(out.hits[0]);
        CHECK((state.landmark(0) - target).norm() < dist_before);
        CHECK(state.covariance().trace() < trace_before);
        CHECK(out.max_trace_increase <= 1e-9);
    }

    SUBCASE("zero innovation leaves the mean exactly in place") {
        AugmentedState state = state_with_landmarks({0.0, 0.0, 0.0}, {{8.0, 0.0}});
        const Eigen::VectorXd mean_before = state.mean();
        RadarDetection z = detection_at(state.pose(), {8.0, 0.0});
        associate_and_update(state, {z}, cfg);
        CHECK(state.mean() == mean_before);
    }

    SUBCASE("contested detections go to the smaller distance") {
        // Two landmarks straddling one detection; the nearer one must win.
        AugmentedState state =
            state_with_landmarks({0.0, 0.0, 0.0}, {{10.0, 1.2}, {10.0, -0.8}});
        RadarDetection z = detection_at(state.pose(), {10.0, 0.0});

        AugmentedState probe = state;
        const double d0 = log_likelihood_distance(z, probe, 0);
        const double d1 = log_likelihood_distance(z, probe, 1);
        REQUIRE(d0 < cfg.beta);
        REQUIRE(d1 < cfg.beta);

        const AssociationOutcome out = associate_and_update(state, {z}, cfg);
        REQUIRE(out.association_count == 1);
        const int winner = d0 < d1 ? 0 : 1;
        CHECK(out.detection_to_landmark[0] == winner);
        CHECK(out.hits[winner]);
        CHECK_FALSE(out.hits[1 - winner]);
    }

    SUBCASE("assignment matches the exhaustive minimum-cost oracle") {
        std::mt19937 gen(37);
        std::uniform_real_distribution<double> jitter(-1.0, 1.0);
        for (int trial = 0; trial < 25; ++trial) {
            const int n_lm = 2 + trial % 3;
            std::vector<Eigen::Vector2d> lms;
            for (int i = 0; i < n_lm; ++i) {
                lms.emplace_back(8.0 + 3.0 * i, 2.0 * jitter(gen));
            }
            AugmentedState state = state_with_landmarks({0.0, 0.0, 0.0}, lms);

            std::vector<RadarDetection> zs;
            for (int i = 0; i < n_lm + 1; ++i) {
                const Eigen::Vector2d p =
                    lms[i % n_lm] + Eigen::Vector2d(jitter(gen), jitter(gen));
                zs.push_back(detection_at(state.pose(), p));
            }

            // Gate matrix on the predicted state.
            std::vector<std::vector<double>> cost(zs.size(),
                                                  std::vector<double>(n_lm, 1e300));
            for (std::size_t d = 0; d < zs.size(); ++d) {
                for (int n = 0; n < n_lm; ++n) {
                    const double dist = log_likelihood_distance(zs[d], state, n);
                    if (dist < cfg.beta) {
                        cost[d][n] = dist;
                    }
                }
            }

            const AssociationOutcome out = associate_and_update(state, zs, cfg);

            // Exhaustive: every gated detection assigned somewhere, total cost
            // minimal. Choices are independent, so enumerate per detection.
            for (std::size_t d = 0; d < zs.size(); ++d) {
                int best = -1;
                for (int n = 0; n < n_lm; ++n) {
                    if (cost[d][n] < 1e300 && (best == -1 || cost[d][n] < cost[d][best])) {
                        best = n;
                    }
                }
                CHECK(out.detection_to_landmark[d] == best);
            }
        }
    }
}

TEST_CASE("removal_pass applies the M/N rule with the range guard") {
    ManagerConfig cfg;  // 10/2 removal

    SUBCASE("a consistently hit landmark is kept") {
        auto rec = make_record(0, 1, cfg.m_rem);
        for (int i = 0; i < 10; ++i) {
            rec.hit_window.push(true);
            rec.in_range_window.push(true);
        }
        CHECK(removal_pass({rec}, cfg).empty());
    }

    SUBCASE("one hit in ten in-range frames is removed") {
        auto rec = make_record(0, 1, cfg.m_rem);
        for (int i = 0; i < 9; ++i) {
            rec.hit_window.push(false);
            rec.in_range_window.push(true);
        }
        rec.hit_window.push(true);
        rec.in_range_window.push(true);
        CHECK(removal_pass({rec}, cfg) == std::vector<int>{0});
    }

    SUBCASE("out of range at any window frame blocks removal") {
        auto rec = make_record(0, 1, cfg.m_rem);
        for (int i = 0; i < 10; ++i) {
            rec.hit_window.push(false);
            rec.in_range_window.push(i != 4);
        }
        CHECK(removal_pass({rec}, cfg).empty());
    }

    SUBCASE("a partially filled window never fires") {
        auto rec = make_record(0, 1, cfg.m_rem);
        for (int i = 0; i < 9; ++i) {
            rec.hit_window.push(false);
            rec.in_range_window.push(true);
        }
        CHECK(removal_pass({rec}, cfg).empty());
    }
}

TEST_CASE("dbscan") {
    SUBCASE("two nearby points form one cluster") {
        const std::vector<Eigen::Vector2d> pts{{0.0, 0.0}, {1.0, 0.0}};
        const std::vector<int> labels = dbscan_labels(pts, 2.5, 2);
        CHECK(labels[0] == 0);
        CHECK(labels[1] == 0);
    }
    SUBCASE("an isolated point is noise") {
        const std::vector<Eigen::Vector2d> pts{{0.0, 0.0}, {1.0, 0.0}, {50.0, 50.0}};
        const std::vector<int> labels = dbscan_labels(pts, 2.5, 2);
        CHECK(labels[2] == -1);
    }
    SUBCASE("random instances match the reference implementation") {
        std::mt19937 gen(41);
        std::uniform_real_distribution<double> pos(-20.0, 20.0);
        std::uniform_int_distribution<int> count(0, 200);
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<Eigen::Vector2d> pts;
            const int n = count(gen);
            for (int i = 0; i < n; ++i) {
                pts.emplace_back(pos(gen), pos(gen));
            }
            const std::vector<int> ours = dbscan_labels(pts, 2.5, 2 + trial % 3);
            const std::vector<int> ref =
                test_oracles::dbscan_reference(pts, 2.5, 2 + trial % 3);
            CHECK(test_oracles::same_partition(ours, ref));
        }
    }
}

TEST_CASE("cluster_detections picks the strongest member as center") {
    ManagerConfig cfg;
    const Pose pose{0.0, 0.0, 0.0};
    std::vector<RadarDetection> zr = {
        detection_at(pose, {10.0, 0.0}, 0.3),
        detection_at(pose, {10.5, 0.5}, 0.9),
        detection_at(pose, {10.2, -0.4}, 0.5),
        detection_at(pose, {-15.0, -15.0}, 0.7),  // isolated -> noise
    };
    const ClusterResult out = cluster_detections(zr, pose, cfg);
    REQUIRE(out.clusters.size() == 1);
    CHECK(out.noise_count == 1);
    CHECK(out.clusters[0].members.size() == 3);
    CHECK(out.clusters[0].center().amplitude == doctest::Approx(0.9));
    CHECK((out.centers_global[0] - Eigen::Vector2d(10.5, 0.5)).norm() < 1e-9);
}

TEST_CASE("confirm") {
    ManagerConfig cfg;
    const Pose pose{0.0, 0.0, 0.0};

    const auto make_cluster = [&](const Eigen::Vector2d& where, int size) {
        Cluster c;
        for (int i = 0; i < size; ++i) {
            c.members.push_back(
                detection_at(pose, where + Eigen::Vector2d(0.05 * i, 0.0), 0.1 * i));
        }
        c.center_index = size - 1;
        return c;
    };
    const auto make_result = [&](const std::vector<Cluster>& clusters) {
        ClusterResult out;
        out.clusters = clusters;
        for (const Cluster& c : clusters) {
            out.centers_global.push_back(
                project_detection(pose, c.center().r, c.center().phi));
        }
        return out;
    };

    SUBCASE("rule 1 confirms a large eligible cluster immediately") {
        AugmentedState state;  // no landmarks: vacuously eligible
        std::vector<CandidateTrack> tracks;
        const auto confirmed =
            confirm(make_result({make_cluster({12.0, 3.0}, 7)}), tracks, state, cfg);
        REQUIRE(confirmed.size() == 1);
        CHECK(confirmed[0].rule == 1);
        CHECK(tracks.empty());
    }

    SUBCASE("rule 2 with 3/2 logic confirms on the second qualifying frame") {
        cfg.m_init = 3;
        cfg.n_init = 2;
        AugmentedState state;
        std::vector<CandidateTrack> tracks;

        // Frame k: a 3-member cluster spawns a track.
        auto first = confirm(make_result({make_cluster({12.0, 3.0}, 3)}), tracks, state, cfg);
        CHECK(first.empty());
        REQUIRE(tracks.size() == 1);

        // Frame k+1: a nearby cluster hits the track -> confirmed.
        auto second =
            confirm(make_result({make_cluster({12.4, 3.2}, 3)}), tracks, state, cfg);
        REQUIRE(second.size() == 1);
        CHECK(second[0].rule == 2);
        CHECK(tracks.empty());
    }

    SUBCASE("a cluster near a registered landmark is ineligible") {
        AugmentedState state = state_with_landmarks(pose, {{12.0, 3.0}});
        std::vector<CandidateTrack> tracks;
        const auto confirmed =
            confirm(make_result({make_cluster({12.1, 3.1}, 7)}), tracks, state, cfg);
        CHECK(confirmed.empty());
        CHECK(tracks.empty());  // gate also blocks track spawning
    }

    SUBCASE("rule 1 never depends on track history") {
        AugmentedState state;
        std::vector<CandidateTrack> tracks;
        // Seed an unrelated track far away.
        confirm(make_result({make_cluster({-14.0, -8.0}, 3)}), tracks, state, cfg);
        REQUIRE(tracks.size() == 1);
        const auto confirmed =
            confirm(make_result({make_cluster({12.0, 3.0}, 8)}), tracks, state, cfg);
        REQUIRE(confirmed.size() == 1);
        CHECK(confirmed[0].rule == 1);
    }

    SUBCASE("stale tracks are dropped after m_init consecutive misses") {
        AugmentedState state;
        std::vector<CandidateTrack> tracks;
        confirm(make_result({make_cluster({12.0, 3.0}, 3)}), tracks, state, cfg);
        REQUIRE(tracks.size() == 1);
        for (int i = 0; i < cfg.m_init; ++i) {
            confirm(make_result({}), tracks, state, cfg);
        }
        CHECK(tracks.empty());
    }
}

TEST_CASE("include_landmark") {
    SUBCASE("mean lands on the polar-to-global projection") {
        AugmentedState state;
        RadarDetection center;
        center.r = 5.0;
        center.phi = 0.0;
        center.R = kR;
        include_landmark(state, center);
        REQUIRE(state.landmark_count() == 1);
        CHECK((state.landmark(0) - Eigen::Vector2d(5.0, 0.0)).norm() < 1e-12);
    }

    SUBCASE("zero prior covariance leaves only the measurement part") {
        AugmentedState state;
        state.set_covariance(Eigen::Matrix3d::Zero());
        RadarDetection center;
        center.r = 4.0;
        center.phi = 0.3;
        center.R = kR;
        include_landmark(state, center);

        const auto [g_pose, g_center] = inclusion_jacobians({0.0, 0.0, 0.0}, 4.0, 0.3);
        const Eigen::Matrix2d expected = g_center * kR * g_center.transpose();
        CHECK(state.covariance().bottomRightCorner<2, 2>().isApprox(expected, 1e-12));
        CHECK(state.covariance().topRightCorner<3, 2>().isZero());
    }

    SUBCASE("covariance equals the full jacobian product") {
        std::mt19937 gen(43);
        std::normal_distribution<double> dist;
        AugmentedState state = state_with_landmarks({1.0, -2.0, 0.7}, {{5.0, 5.0}});
        Eigen::MatrixXd a(5, 5);
        for (int k = 0; k < a.size(); ++k) {
            a(k / 5, k % 5) = dist(gen);
        }
        state.set_covariance(a * a.transpose());

        RadarDetection center;
        center.r = 7.0;
        center.phi = -0.4;
        center.R = kR;

        const int n = state.dim();
        const auto [g_pose, g_center] =
            inclusion_jacobians(state.pose(), center.r, center.phi);
        Eigen::MatrixXd j1 = Eigen::MatrixXd::Zero(n + 2, n);
        j1.topLeftCorner(n, n).setIdentity();
        j1.bottomLeftCorner(2, 3) = g_pose;
        Eigen::MatrixXd j2 = Eigen::MatrixXd::Zero(n + 2, 2);
        j2.bottomRows(2) = g_center;
        const Eigen::MatrixXd expected = j1 * state.covariance() * j1.transpose() +
                                         j2 * center.R * j2.transpose();

        include_landmark(state, center);
        CHECK(state.covariance().isApprox(expected, 1e-12));
    }

    SUBCASE("jacobians of the projection match finite differences") {
        std::mt19937 gen(47);
        std::uniform_real_distribution<double> pos(-8.0, 8.0);
        std::uniform_real_distribution<double> heading(-2.0, 2.0);
        std::uniform_real_distribution<double> range(1.0, 18.0);
        for (int trial = 0; trial < 120; ++trial) {
            const Pose pose{pos(gen), pos(gen), heading(gen)};
            const double r = range(gen);
            const double phi = heading(gen) / 2.0;

            const auto [g_pose, g_center] = inclusion_jacobians(pose, r, phi);

            Eigen::VectorXd x(3);
            x << pose.x, pose.y, pose.theta;
            const Eigen::MatrixXd fd_pose = test_oracles::numeric_jacobian(
                [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
                    return project_detection({v(0), v(1), v(2)}, r, phi);
                },
                x);
            CHECK(test_oracles::max_relative_error(g_pose, fd_pose) < 1e-5);

            Eigen::VectorXd c(2);
            c << r, phi;
            const Eigen::MatrixXd fd_center = test_oracles::numeric_jacobian(
                [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
                    return project_detection(pose, v(0), v(1));
                },
                c);
            CHECK(test_oracles::max_relative_error(g_center, fd_center) < 1e-5);
        }
    }
}

TEST_CASE("merge_pass") {
    ManagerConfig cfg;  // gamma_m = 1.5

    const auto build = [](const std::vector<Eigen::Vector2d>& lms,
                          const std::vector<double>& traces) {
        AugmentedState state;
        for (std::size_t i = 0; i < lms.size(); ++i) {
            state.append_landmark(lms[i], Eigen::MatrixXd::Zero(2, state.dim()),
                                  (traces[i] / 2.0) * Eigen::Matrix2d::Identity());
        }
        std::vector<LandmarkRecord> records;
        for (std::size_t i = 0; i < lms.size(); ++i) {
            records.push_back(make_record(static_cast<int>(i), 10 + static_cast<long>(i), 10));
        }
        return std::make_pair(state, records);
    };

    SUBCASE("a close pair keeps the better-estimated landmark") {
        auto [state, records] = build({{5.0, 0.0}, {5.5, 0.0}}, {0.2, 0.8});
        const auto merged = merge_pass(state, records, cfg);
        REQUIRE(merged.size() == 1);
        CHECK(merged[0].first == 10);   // smaller trace survives
        CHECK(merged[0].second == 11);
        REQUIRE(state.landmark_count() == 1);
        CHECK(state.landmark(0) == Eigen::Vector2d(5.0, 0.0));
        CHECK(records.size() == 1);
        CHECK(records[0].id == 10);
    }

    SUBCASE("distant landmarks are untouched") {
        auto [state, records] = build({{5.0, 0.0}, {9.0, 0.0}}, {0.2, 0.8});
        CHECK(merge_pass(state, records, cfg).empty());
        CHECK(state.landmark_count() == 2);
    }

    SUBCASE("the 1.0/1.0/2.0 chain resolves to the outer pair") {
        // d(A,B) = d(B,C) = 1.0 < gamma_m, d(A,C) = 2.0, equal traces.
        auto [state, records] =
            build({{0.0, 0.0}, {1.0, 0.0}, {2.0, 0.0}}, {0.4, 0.4, 0.4});
        const auto merged = merge_pass(state, records, cfg);

        // Policy: nearest pair first (tie -> lexicographic), equal traces keep
        // the lower index. (A,B) merges to A, then d(A,C) = 2.0 stops.
        REQUIRE(merged.size() == 1);
        CHECK(merged[0].first == 10);
        CHECK(merged[0].second == 11);
        REQUIRE(state.landmark_count() == 2);
        CHECK(state.landmark(0) == Eigen::Vector2d(0.0, 0.0));
        CHECK(state.landmark(1) == Eigen::Vector2d(2.0, 0.0));

        // Exhaustive merge-order oracle: enumerate every legal merge sequence
        // and make sure the policy's outcome is one of them.
        struct Item {
            Eigen::Vector2d p;
            long id;
        };
        std::vector<std::vector<long>> outcomes;
        std::function<void(std::vector<Item>)> explore = [&](std::vector<Item> items) {
            bool any = false;
            for (std::size_t i = 0; i < items.size(); ++i) {
                for (std::size_t j = i + 1; j < items.size(); ++j) {
                    if ((items[i].p - items[j].p).norm() < cfg.gamma_m) {
                        any = true;
                        for (int victim : {static_cast<int>(i), static_cast<int>(j)}) {
                            std::vector<Item> next = items;
                            next.erase(next.begin() + victim);
                            explore(std::move(next));
                        }
                    }
                }
            }
            if (!any) {
                std::vector<long> ids;
                for (const Item& it : items) {
                    ids.push_back(it.id);
                }
                outcomes.push_back(ids);
            }
        };
        explore({{{0.0, 0.0}, 10}, {{1.0, 0.0}, 11}, {{2.0, 0.0}, 12}});

        std::vector<long> ours;
        for (const LandmarkRecord& rec : records) {
            ours.push_back(rec.id);
        }
        CHECK(std::find(outcomes.begin(), outcomes.end(), ours) != outcomes.end());
        CHECK(ours == std::vector<long>{10, 12});
    }

    SUBCASE("post-condition: no pair closer than gamma_m remains") {
        std::mt19937 gen(53);
        std::uniform_real_distribution<double> pos(-6.0, 6.0);
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<Eigen::Vector2d> lms;
            std::vector<double> traces;
            for (int i = 0; i < 8; ++i) {
                lms.emplace_back(pos(gen), pos(gen));
                traces.push_back(0.1 + 0.05 * i);
            }
            auto [state, records] = build(lms, traces);
            merge_pass(state, records, cfg);
            for (int i = 0; i < state.landmark_count(); ++i) {
                for (int j = i + 1; j < state.landmark_count(); ++j) {
                    CHECK((state.landmark(i) - state.landmark(j)).norm() >= cfg.gamma_m);
                }
            }
            CHECK(records.size() == static_cast<std::size_t>(state.landmark_count()));
        }
    }
}

TEST_CASE("manager config validation") {
    ManagerConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.n_init = 6;  // > m_init
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
}
