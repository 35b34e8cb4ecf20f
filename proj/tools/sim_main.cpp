// readapt-sim: batch simulator, fixture generator, and event-log analyzer.
//
// Exit codes: 0 success, 2 typed domain errors, 1 I/O and usage errors.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <memory>
#include <string>

#include <CLI11.hpp>
#include <readapt/readapt.hpp>

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        readapt::fail(readapt::ErrorCode::io_error, "cannot read " + path);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void print_report(const readapt::SimulationReport& rep) {
    std::printf("student %s: %d sessions played, %zu features opened, %zu mastered, "
                "max streak %d, %d rollbacks\n",
                rep.student_id.c_str(), rep.sessions_played, rep.sessions_to_unlock.size(),
                rep.sessions_to_max.size(), rep.max_repetition_streak, rep.rollback_count);
}

struct SimulateArgs {
    std::string graph_file;
    std::string lexicon_file;
    std::string out_dir;
    std::string http_url;
    std::string config_file;
    int sessions = 1;
    double ability = 0.0;
    double learning_rate = 0.0;
    double difficulty_scale = 1.0;
    double skip_prob = 0.0;
    std::uint64_t seed = 1;
    int age = 0;
    int students = 1;
};

int run_simulate(const SimulateArgs& a) {
    using namespace readapt;
    jsonx::json graph_doc = jsonx::parse_bytes(read_file(a.graph_file), a.graph_file);
    jsonx::json lexicon_doc = jsonx::parse_bytes(read_file(a.lexicon_file), a.lexicon_file);
    AdaptationConfig cfg;
    if (!a.config_file.empty())
        cfg = adaptation_config_from_bytes(read_file(a.config_file));

    std::unique_ptr<Engine> engine;
    std::unique_ptr<SessionBackend> backend;
    if (!a.http_url.empty()) {
        if (!a.config_file.empty())
            std::fprintf(stderr, "note: --config is ignored with --http; "
                                 "the remote service follows its own config\n");
        backend = std::make_unique<HttpBackend>(a.http_url);
    } else {
        EngineOptions opt;
        opt.data_dir = std::filesystem::path(a.out_dir) / "engine-data";
        opt.config = cfg;
        // Logical clock: in-process batch runs stamp synthetic time so reruns
        // produce byte-identical event logs.
        opt.clock = [t = std::int64_t{1735689600000}]() mutable { return t += 1000; };
        engine = std::make_unique<Engine>(std::move(opt));
        backend = std::make_unique<EngineBackend>(*engine);
    }

    SyntheticStudentSpec spec;
    spec.ability = a.ability;
    spec.learning_rate = a.learning_rate;
    spec.difficulty_scale = a.difficulty_scale;
    spec.skip_prob = a.skip_prob;
    spec.seed = a.seed;
    spec.age_level = a.age;
    spec.sessions = a.sessions;

    if (a.students == 1) {
        print_report(simulate(*backend, graph_doc, lexicon_doc, spec, a.out_dir));
    } else {
        for (const SimulationReport& rep :
             simulate_cohort(*backend, graph_doc, lexicon_doc, spec, a.students, a.out_dir))
            print_report(rep);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"batch simulator for the readapt adaptivity engine"};
    app.require_subcommand(1);

    SimulateArgs sim_args;
    CLI::App* sim = app.add_subcommand("simulate",
                                       "drive a synthetic student through plan/play/submit");
    sim->add_option("--graph", sim_args.graph_file, "feature graph document")->required();
    sim->add_option("--lexicon", sim_args.lexicon_file, "lexicon document")->required();
    sim->add_option("--sessions", sim_args.sessions, "session budget")->required();
    sim->add_option("--ability", sim_args.ability, "latent skill, logit scale")->required();
    sim->add_option("--learning-rate", sim_args.learning_rate,
                    "ability gain per play of a feature")
        ->required();
    sim->add_option("--seed", sim_args.seed, "response RNG seed")->required();
    sim->add_option("--http", sim_args.http_url,
                    "base URL of a running service; default is in-process");
    sim->add_option("--out", sim_args.out_dir, "output directory")->required();
    sim->add_option("--age", sim_args.age, "student age level (default 0)");
    sim->add_option("--difficulty-scale", sim_args.difficulty_scale,
                    "difficulty per unit of rank (default 1.0)");
    sim->add_option("--skip-prob", sim_args.skip_prob,
                    "chance a fetched plan is abandoned unsubmitted");
    sim->add_option("--config", sim_args.config_file,
                    "adaptation config for the in-process engine");
    sim->add_option("--students", sim_args.students, "cohort size (default 1)");

    std::string shape = "chain", fixture_out;
    int features = 0, entries = 8;
    std::uint64_t fixture_seed = 1;
    double edge_prob = 0.5;
    CLI::App* fixture =
        app.add_subcommand("fixture", "generate a synthetic graph + lexicon pair");
    fixture->add_option("--shape", shape, "chain|diamond|wide|random")->required();
    fixture->add_option("--features", features, "feature count")->required();
    fixture->add_option("--seed", fixture_seed, "generator seed")->required();
    fixture->add_option("--out", fixture_out, "output directory")->required();
    fixture->add_option("--entries", entries, "lexicon entries per feature (default 8)");
    fixture->add_option("--edge-prob", edge_prob, "edge probability for random shape");

    std::string log_file, analyze_out;
    CLI::App* analyze =
        app.add_subcommand("analyze", "recompute a run report from its event log");
    analyze->add_option("--log", log_file, "event log (JSON lines)")->required();
    analyze->add_option("--out", analyze_out, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        using namespace readapt;
        if (sim->parsed())
            return run_simulate(sim_args);
        if (fixture->parsed()) {
            FixtureDocs docs = generate_fixture(features, fixture_shape_from_string(shape),
                                                entries, fixture_seed, edge_prob);
            write_fixture(docs, fixture_out);
            std::printf("wrote %s/graph.json and %s/lexicon.json\n", fixture_out.c_str(),
                        fixture_out.c_str());
            return 0;
        }
        SimulationReport rep = analyze_log(log_file);
        std::filesystem::create_directories(analyze_out);
        write_report_json(rep, std::filesystem::path(analyze_out) / "report.json");
        write_trajectory_csv(rep, std::filesystem::path(analyze_out) / "trajectory.csv");
        print_report(rep);
        return 0;
    } catch (const readapt::DomainError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return e.code() == readapt::ErrorCode::io_error ? 1 : 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 1;
    }
}
