#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "policyflow/config.hpp"
#include "policyflow/errors.hpp"
#include "policyflow/knowledge.hpp"
#include "policyflow/run.hpp"
#include "policyflow/segmenter.hpp"
#include "policyflow/text.hpp"

namespace {

using policyflow::IoError;

constexpr const char* kKinds[] = {"data_category", "consumer_type", "purpose", "method"};

void emit(const std::string& output_path, const std::string& content) {
    if (output_path.empty()) {
        std::cout << content;
        return;
    }
    policyflow::write_file_atomic(output_path, content);
}

std::string require_readable(const std::string& path) {
    if (!std::filesystem::exists(path)) throw IoError("file not found: " + path);
    return policyflow::read_file(path);
}

policyflow::RunConfig config_with_overrides(const std::string& config_path,
                                            const std::vector<std::string>& overrides) {
    auto config = config_path.empty() ? policyflow::RunConfig{}
                                      : policyflow::load_config(config_path);
    for (const auto& assignment : overrides) policyflow::apply_override(config, assignment);
    return config;
}

void cmd_segment(const std::string& input, const std::string& format,
                 const std::string& output) {
    auto segments = policyflow::segment_html(require_readable(input));
    emit(output, format == "json" ? policyflow::segments_to_ndjson(segments)
                                  : policyflow::segments_to_text(segments));
}

void cmd_kb_validate(const std::string& kb_dir) {
    for (const char* kind : kKinds) {
        auto path = (std::filesystem::path(kb_dir) / (std::string(kind) + ".json")).string();
        auto typology = policyflow::load_typology(path);
        policyflow::validate_typology(typology);
        std::cout << "OK " << kind << " (" << typology.nodes.size() << " nodes)\n";
    }
}

void cmd_kb_build(const std::string& kb_dir, const std::string& output) {
    policyflow::LocalEmbedder embedder;
    nlohmann::ordered_json root;
    root["dimension"] = policyflow::LocalEmbedder::kDim;
    nlohmann::ordered_json typologies = nlohmann::ordered_json::array();
    for (const char* kind : kKinds) {
        auto path = (std::filesystem::path(kb_dir) / (std::string(kind) + ".json")).string();
        auto typology = policyflow::load_typology(path);
        policyflow::validate_typology(typology);
        nlohmann::ordered_json block;
        block["kind"] = typology.kind;
        nlohmann::ordered_json nodes = nlohmann::ordered_json::array();
        for (const auto& node : typology.nodes) {
            nlohmann::ordered_json row;
            row["name"] = node.name;
            row["vector"] = embedder.embed(policyflow::render_node(node));
            nodes.push_back(std::move(row));
        }
        block["nodes"] = std::move(nodes);
        typologies.push_back(std::move(block));
    }
    root["typologies"] = std::move(typologies);
    emit(output, root.dump(2) + "\n");
}

void cmd_analyze(const std::string& config_path, const std::vector<std::string>& overrides) {
    auto config = config_with_overrides(config_path, overrides);
    auto run = policyflow::analyze_run(config);
    policyflow::write_run_artifacts(config, run);
    std::cout << policyflow::render_report_text(run);
    std::cout << "artifacts written to " << config.output_dir << "\n";
}

void cmd_compare(const std::vector<std::string>& report_paths, const std::string& output) {
    std::vector<std::string> texts;
    texts.reserve(report_paths.size());
    for (const auto& path : report_paths) texts.push_back(require_readable(path));
    emit(output, policyflow::compare_reports(texts));
}

void cmd_report(const std::string& config_path, const std::vector<std::string>& overrides,
                const std::string& output_dir) {
    auto config = config_with_overrides(config_path, overrides);
    if (!output_dir.empty()) config.output_dir = output_dir;
    auto run = policyflow::reload_run(config);
    auto root = std::filesystem::path(config.output_dir);
    policyflow::write_file_atomic(root / "report.json",
                                  policyflow::render_report_json(config, run));
    policyflow::write_file_atomic(root / "report.csv", policyflow::render_report_csv(run));
    std::cout << policyflow::render_report_text(run);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"data-flow analysis of privacy policies"};
    app.require_subcommand(1);

    auto* segment = app.add_subcommand("segment", "split a policy HTML file into segments");
    std::string segment_input;
    std::string segment_format = "text";
    std::string segment_output;
    segment->add_option("input", segment_input, "policy HTML file")->required();
    segment->add_option("--format", segment_format, "output format")
        ->check(CLI::IsMember({"text", "json"}));
    segment->add_option("-o,--output", segment_output, "output file (default stdout)");
    segment->callback([&] { cmd_segment(segment_input, segment_format, segment_output); });

    auto* kb = app.add_subcommand("kb", "typology knowledge base utilities");
    kb->require_subcommand(1);
    std::string kb_dir = "data/kb";
    kb->add_option("--kb-dir", kb_dir, "typology directory");
    auto* kb_validate = kb->add_subcommand("validate", "check the typology files");
    kb_validate->callback([&] { cmd_kb_validate(kb_dir); });
    auto* kb_build = kb->add_subcommand("build", "embed every typology node");
    std::string kb_output;
    kb_build->add_option("-o,--output", kb_output, "output file (default stdout)");
    kb_build->callback([&] { cmd_kb_build(kb_dir, kb_output); });

    auto* analyze = app.add_subcommand("analyze", "run the pipeline over configured policies");
    std::string analyze_config;
    std::vector<std::string> analyze_overrides;
    analyze->add_option("--config", analyze_config, "config file")->required();
    analyze->add_option("--set", analyze_overrides, "key=value override");
    analyze->callback([&] { cmd_analyze(analyze_config, analyze_overrides); });

    auto* compare = app.add_subcommand("compare", "merge run reports into one CSV");
    std::vector<std::string> compare_reports;
    std::string compare_output;
    compare->add_option("reports", compare_reports, "report.json files")->required();
    compare->add_option("-o,--output", compare_output, "output file (default stdout)");
    compare->callback([&] { cmd_compare(compare_reports, compare_output); });

    auto* report = app.add_subcommand("report", "regenerate reports from run artifacts");
    std::string report_config;
    std::vector<std::string> report_overrides;
    std::string report_dir;
    report->add_option("--config", report_config, "config file");
    report->add_option("--set", report_overrides, "key=value override");
    report->add_option("--output-dir", report_dir, "run artifact directory");
    report->callback([&] { cmd_report(report_config, report_overrides, report_dir); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const policyflow::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
