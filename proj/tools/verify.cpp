// verify: run one verification suite from a JSON descriptor.
#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "tubeh/tubeh.hpp"

int main(int argc, char** argv) {
    using namespace tubeh;
    CLI::App app{"Tube-domain Hardy space verification suites"};
    std::string descriptor, out_dir;
    bool list = false;
    std::uint64_t seed = 0;
    int threads = 0;
    app.add_option("descriptor", descriptor, "experiment descriptor (JSON)");
    app.add_option("--out", out_dir, "output directory (overrides the descriptor)");
    app.add_flag("--list-suites", list, "list the available suites and exit");
    auto* seed_opt = app.add_option("--seed", seed, "seed (overrides the descriptor)");
    app.add_option("--threads", threads, "worker threads (0 = hardware)")->check(CLI::NonNegativeNumber);
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : harness::kExitInvalid;
    }
    if (list) {
        std::cout << harness::list_suites();
        return 0;
    }
    if (descriptor.empty()) {
        std::cerr << "error: a descriptor path is required\n" << app.help();
        return harness::kExitInvalid;
    }
    set_thread_count(threads);

    harness::Descriptor D;
    try {
        if (const char* b = std::getenv("TUBEH_BUDGET")) {
            char* end = nullptr;
            const unsigned long long v = std::strtoull(b, &end, 10);
            if (end == b || *end != '\0' || v == 0) fail(ErrorKind::DescriptorInvalid, "TUBEH_BUDGET: must be a positive integer");
            set_grid_budget(static_cast<std::size_t>(v));
        }
        D = harness::load_descriptor(descriptor);
        if (*seed_opt) {
            D.seed = seed;
            D.data_seed = seed;
        }
        if (!out_dir.empty()) D.output = out_dir;
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return harness::kExitInvalid;
    }

    try {
        ExperimentReport rep;
        const int code = harness::execute(D, D.output, &rep);
        if (code == harness::kExitPass) {
            std::cout << "PASS suite=" << D.suite << " report=" << (std::filesystem::path(D.output) / "report.json").string() << "\n";
        } else {
            const std::string stage = rep.failed_stage.value_or("?");
            std::cout << "FAIL suite=" << D.suite << " stage=" << stage;
            if (const auto* s = rep.stage(stage); s && s->error) std::cout << " error=\"" << *s->error << "\"";
            std::cout << "\n";
        }
        return code;
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return harness::kExitStageFailure;
    }
}
