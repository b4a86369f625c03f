#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <doctest.h>

#include "policyflow/analyser.hpp"
#include "policyflow/errors.hpp"
#include "policyflow/graph.hpp"
#include "test_support.hpp"

using namespace policyflow;

namespace {

ParsedFlow case_flow(FlowCase flow_case, std::size_t segment_index = 0) {
    ParsedFlow flow;
    flow.sender = "someone";
    flow.data_type = "something";
    flow.receiver = "someone else";
    flow.flow_case = flow_case;
    flow.data_category = "Contact";
    flow.consumer_type = "First Party";
    flow.purpose = "Unspecified";
    flow.method = "Active";
    flow.segment_index = segment_index;
    flow.provenance = {segment_index};
    return flow;
}

FlowStats table_stats(std::string policy_id, double u2f, double f2f, double t2f,
                      double u2t, double f2t, double t2t, double incomplete,
                      std::size_t total_flows) {
    FlowStats stats;
    stats.policy_id = std::move(policy_id);
    stats.total_flows = total_flows;
    stats.freq[FlowCase::user_to_first] = u2f;
    stats.freq[FlowCase::first_to_first] = f2f;
    stats.freq[FlowCase::third_to_first] = t2f;
    stats.freq[FlowCase::user_to_third] = u2t;
    stats.freq[FlowCase::first_to_third] = f2t;
    stats.freq[FlowCase::third_to_third] = t2t;
    stats.freq[FlowCase::incomplete] = incomplete;
    return stats;
}

// The ten-policy frequency table the risk-score examples are derived from.
std::vector<FlowStats> oem_corpus() {
    return {
        table_stats("audi", 0.17, 0.04, 0.00, 0.11, 0.36, 0.20, 0.13, 56),
        table_stats("ford", 0.19, 0.11, 0.11, 0.36, 0.08, 0.06, 0.08, 109),
        table_stats("honda", 0.38, 0.01, 0.13, 0.30, 0.05, 0.01, 0.12, 348),
        table_stats("hyundai", 0.20, 0.25, 0.00, 0.14, 0.35, 0.00, 0.06, 65),
        table_stats("kia", 0.37, 0.02, 0.00, 0.08, 0.54, 0.00, 0.00, 63),
        table_stats("lexus", 0.22, 0.00, 0.00, 0.76, 0.00, 0.00, 0.02, 45),
        table_stats("nissan", 0.33, 0.01, 0.11, 0.26, 0.24, 0.01, 0.04, 141),
        table_stats("polestar", 0.025, 0.15, 0.10, 0.15, 0.125, 0.00, 0.45, 80),
        table_stats("renault", 0.50, 0.00, 0.00, 0.00, 0.00, 0.00, 0.50, 4),
        table_stats("vauxhall", 0.31, 0.10, 0.10, 0.41, 0.01, 0.03, 0.01, 142),
    };
}

ParsedFlow labeled_flow(std::string data_type, std::string category, std::string purpose) {
    ParsedFlow flow = case_flow(FlowCase::user_to_first);
    flow.data_type = std::move(data_type);
    flow.data_category = std::move(category);
    flow.purpose = std::move(purpose);
    return flow;
}

}  // namespace

TEST_CASE("compute_flow_stats") {
    SUBCASE("uniform split across two cases") {
        std::vector<ParsedFlow> flows = {
            case_flow(FlowCase::user_to_first, 0), case_flow(FlowCase::user_to_first, 1),
            case_flow(FlowCase::user_to_third, 2), case_flow(FlowCase::user_to_third, 3)};
        auto stats = compute_flow_stats("demo", flows);
        REQUIRE(stats.policy_id == "demo");
        REQUIRE(stats.total_flows == 4);
        REQUIRE_FALSE(stats.zero_flows());
        REQUIRE(stats.freq.at(FlowCase::user_to_first) == doctest::Approx(0.5).epsilon(1e-12));
        REQUIRE(stats.freq.at(FlowCase::user_to_third) == doctest::Approx(0.5).epsilon(1e-12));
        REQUIRE(stats.freq.at(FlowCase::first_to_first) == 0.0);
        REQUIRE(stats.freq.at(FlowCase::incomplete) == 0.0);
        REQUIRE(stats.first_party_total() == doctest::Approx(0.5).epsilon(1e-12));
        REQUIRE(stats.third_party_total() == doctest::Approx(0.5).epsilon(1e-12));
    }

    SUBCASE("empty records mark zero flows") {
        auto stats = compute_flow_stats("empty", {});
        REQUIRE(stats.zero_flows());
        REQUIRE(stats.total_flows == 0);
        REQUIRE(stats.freq.size() == 7);
        for (const auto& [flow_case, value] : stats.freq) REQUIRE(value == 0.0);
    }

    SUBCASE("frequencies sum to one and are permutation invariant") {
        std::mt19937 rng(4242u);
        const FlowCase cases[] = {
            FlowCase::user_to_first, FlowCase::first_to_first, FlowCase::third_to_first,
            FlowCase::user_to_third, FlowCase::first_to_third, FlowCase::third_to_third,
            FlowCase::incomplete};
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<ParsedFlow> flows;
            std::size_t count = 1 + rng() % 40;
            for (std::size_t i = 0; i < count; ++i)
                flows.push_back(case_flow(cases[rng() % 7], i));
            auto stats = compute_flow_stats("trial", flows);
            double sum = 0.0;
            for (const auto& [flow_case, value] : stats.freq) sum += value;
            REQUIRE(std::abs(sum - 1.0) < 1e-9);

            std::shuffle(flows.begin(), flows.end(), rng);
            REQUIRE(compute_flow_stats("trial", flows) == stats);
        }
    }
}

TEST_CASE("compute_risk_scores") {
    SUBCASE("published spot anchors reproduce from the frequency table") {
        auto scores = compute_risk_scores(oem_corpus());
        REQUIRE(scores.size() == 10);
        // max u2f 0.50, max f2f 0.25, max t2f 0.13 -> denominator 1.1675
        REQUIRE(scores[2].policy_id == "honda");
        REQUIRE(scores[2].first_party_score ==
                doctest::Approx((0.38 + 1.5 * 0.01 + 2.25 * 0.13) / 1.1675).epsilon(1e-12));
        REQUIRE(std::abs(scores[2].first_party_score - 0.59) < 0.005);
        // max u2t 0.76, max f2t 0.54, max t2t 0.20 -> denominator 2.02
        REQUIRE(scores[0].policy_id == "audi");
        REQUIRE(scores[0].third_party_score ==
                doctest::Approx((0.11 + 1.5 * 0.36 + 2.25 * 0.20) / 2.02).epsilon(1e-12));
        REQUIRE(std::abs(scores[0].third_party_score - 0.54) < 0.005);
        // Renault has no third-party flows at all.
        REQUIRE(scores[8].third_party_score == 0.0);
        for (const auto& entry : scores) {
            REQUIRE(entry.first_party_score >= 0.0);
            REQUIRE(entry.first_party_score <= 1.0);
            REQUIRE(entry.third_party_score >= 0.0);
            REQUIRE(entry.third_party_score <= 1.0);
            REQUIRE(entry.overall_score >= 0.0);
            REQUIRE(entry.overall_score <= 1.0);
        }
    }

    SUBCASE("single policy attaining every maximum scores one") {
        auto scores = compute_risk_scores(
            {table_stats("solo", 0.2, 0.1, 0.05, 0.1, 0.05, 0.0, 0.5, 20)});
        REQUIRE(scores.size() == 1);
        REQUIRE(scores[0].first_party_score == doctest::Approx(1.0).epsilon(1e-12));
        REQUIRE(scores[0].third_party_score == doctest::Approx(1.0).epsilon(1e-12));
        REQUIRE(scores[0].overall_score == doctest::Approx(1.0).epsilon(1e-12));
    }

    SUBCASE("zero denominators score zero") {
        auto scores = compute_risk_scores(
            {table_stats("a", 0, 0, 0, 0, 0, 0, 0, 5), table_stats("b", 0, 0, 0, 0, 0, 0, 0, 7)});
        for (const auto& entry : scores) {
            REQUIRE(entry.first_party_score == 0.0);
            REQUIRE(entry.third_party_score == 0.0);
            REQUIRE(entry.overall_score == 0.0);
        }
    }

    SUBCASE("zero-flow policies are excluded from maxima and score zero") {
        auto pathological = table_stats("zero", 0.9, 0.9, 0.9, 0.9, 0.9, 0.9, 0.9, 0);
        auto normal = table_stats("real", 0.3, 0.0, 0.0, 0.2, 0.0, 0.0, 0.5, 10);
        auto scores = compute_risk_scores({pathological, normal});
        REQUIRE(scores[0].first_party_score == 0.0);
        REQUIRE(scores[0].third_party_score == 0.0);
        REQUIRE(scores[0].overall_score == 0.0);
        // "real" sets every maximum itself, so it scores 1 in each family.
        REQUIRE(scores[1].first_party_score == doctest::Approx(1.0).epsilon(1e-12));
        REQUIRE(scores[1].third_party_score == doctest::Approx(1.0).epsilon(1e-12));
        REQUIRE(scores[1].overall_score == doctest::Approx(1.0).epsilon(1e-12));
    }

    SUBCASE("empty corpus throws") {
        REQUIRE_THROWS_AS(compute_risk_scores({}), EmptyCorpus);
    }

    SUBCASE("scaling all weights leaves scores unchanged") {
        std::mt19937 rng(777u);
        std::uniform_real_distribution<double> real(0.0, 0.4);
        for (double c : {0.001, 0.1, 3.0, 1e6}) {
            std::vector<FlowStats> corpus;
            for (int i = 0; i < 6; ++i)
                corpus.push_back(table_stats("p" + std::to_string(i), real(rng), real(rng),
                                             real(rng), real(rng), real(rng), real(rng),
                                             real(rng), 10 + i));
            RiskWeights base;
            RiskWeights scaled = base;
            scaled.user_to_first *= c;
            scaled.first_to_first *= c;
            scaled.third_to_first *= c;
            scaled.user_to_third *= c;
            scaled.first_to_third *= c;
            scaled.third_to_third *= c;
            scaled.overall_first *= c;
            scaled.overall_third *= c;
            scaled.overall_incomplete *= c;
            auto plain = compute_risk_scores(corpus, base);
            auto boosted = compute_risk_scores(corpus, scaled);
            REQUIRE(plain.size() == boosted.size());
            for (std::size_t i = 0; i < plain.size(); ++i) {
                REQUIRE(std::abs(plain[i].first_party_score - boosted[i].first_party_score) <
                        1e-12);
                REQUIRE(std::abs(plain[i].third_party_score - boosted[i].third_party_score) <
                        1e-12);
                REQUIRE(std::abs(plain[i].overall_score - boosted[i].overall_score) < 1e-12);
            }
        }
    }
}

TEST_CASE("category_distribution counts distinct normalized data types") {
    SUBCASE("case variants collapse") {
        std::vector<ParsedFlow> flows = {labeled_flow("vin", "Other", "Unspecified"),
                                         labeled_flow("VIN", "Other", "Unspecified")};
        auto distribution = category_distribution(flows);
        REQUIRE(distribution.size() == 1);
        REQUIRE(distribution.at("Other") == 1);
    }
    SUBCASE("distinct types accumulate per category") {
        std::vector<ParsedFlow> flows = {
            labeled_flow("gps location", "Location", "Unspecified"),
            labeled_flow("location history", "Location", "Unspecified"),
            labeled_flow("gps location", "Location", "Advertising"),
            labeled_flow("email address", "Contact", "Unspecified")};
        auto distribution = category_distribution(flows);
        REQUIRE(distribution.at("Location") == 2);
        REQUIRE(distribution.at("Contact") == 1);
    }
    SUBCASE("empty input yields an empty map") {
        REQUIRE(category_distribution({}).empty());
    }
}

TEST_CASE("category_purpose_matrix") {
    SUBCASE("single record single cell") {
        auto matrix = category_purpose_matrix({labeled_flow("gps", "Location", "Advertising")});
        REQUIRE(matrix.size() == 1);
        REQUIRE(matrix.at({"Location", "Advertising"}) == 1);
    }
    SUBCASE("row sums equal per-category record counts and order does not matter") {
        std::mt19937 rng(99u);
        const char* categories[] = {"Location", "Contact", "Health"};
        const char* purposes[] = {"Advertising", "Marketing", "Unspecified"};
        std::vector<ParsedFlow> flows;
        std::map<std::string, std::size_t> per_category;
        for (int i = 0; i < 60; ++i) {
            std::string category = categories[rng() % 3];
            std::string purpose = purposes[rng() % 3];
            flows.push_back(labeled_flow("type" + std::to_string(i), category, purpose));
            ++per_category[category];
        }
        auto matrix = category_purpose_matrix(flows);
        std::map<std::string, std::size_t> row_sums;
        for (const auto& [cell, count] : matrix) row_sums[cell.first] += count;
        REQUIRE(row_sums == per_category);

        std::shuffle(flows.begin(), flows.end(), rng);
        REQUIRE(category_purpose_matrix(flows) == matrix);
    }
}

TEST_CASE("network_summary counts nodes by class") {
    SUBCASE("minimal flow graph") {
        ParsedFlow flow = case_flow(FlowCase::user_to_first);
        flow.sender = "you";
        flow.data_type = "email address";
        flow.receiver = "we";
        flow.sender_party = PartyAttribute::user_party;
        flow.receiver_party = PartyAttribute::first_party;
        auto graph = build_graph({flow}, "minimal");
        auto summary = network_summary(graph);
        REQUIRE(summary == NetworkSummary{2, 1, 0, 1, 0, 1});
    }
    SUBCASE("unknown endpoints are counted separately") {
        ParsedFlow flow = case_flow(FlowCase::incomplete);
        flow.sender = std::nullopt;
        flow.data_type = "cookie";
        flow.receiver = "acme";
        flow.sender_party = PartyAttribute::unknown;
        flow.receiver_party = PartyAttribute::third_party;
        auto graph = build_graph({flow}, "gap");
        auto summary = network_summary(graph);
        REQUIRE(summary.edges == 2);
        REQUIRE(summary.unknown_party_nodes == 1);
        REQUIRE(summary.third_party_nodes == 1);
        REQUIRE(summary.data_type_nodes == 1);
    }
    SUBCASE("empty graph is all zeros") {
        REQUIRE(network_summary(DataFlowGraph{}) == NetworkSummary{});
    }
}
