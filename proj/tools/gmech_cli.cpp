#include <algorithm>
#include <atomic>
#include <cstddef>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "gmech/scenario.hpp"

namespace {

int run_many(const std::vector<std::string>& configs, const std::string& outdir, int jobs) {
    std::atomic<std::size_t> next{0};
    std::atomic<int> worst{0};
    std::mutex err_mtx;

    const auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= configs.size()) return;
            std::ostringstream local_err;
            const int code = gmech::run_scenario(configs[i], outdir, local_err);
            if (code != 0) {
                std::lock_guard<std::mutex> lock(err_mtx);
                std::cerr << configs[i] << ": " << local_err.str();
                int cur = worst.load();
                while (cur < code && !worst.compare_exchange_weak(cur, code)) {
                }
            }
        }
    };

    const int nthreads = std::min<int>(jobs, static_cast<int>(configs.size()));
    if (nthreads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(nthreads));
        for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return worst.load();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Geometric mechanics scenario runner"};
    app.require_subcommand(1);

    std::vector<std::string> configs;
    std::string outdir;
    int jobs = 1;

    CLI::App* run = app.add_subcommand("run", "Run one or more scenario configs");
    run->add_option("config", configs, "Config file(s) (JSON)")->required()->expected(-1);
    run->add_option("--jobs", jobs, "Run configs in parallel with N threads")
        ->check(CLI::PositiveNumber);
    run->add_option("--outdir", outdir, "Directory for relative output paths");

    CLI::App* list = app.add_subcommand("list", "List available systems");

    CLI11_PARSE(app, argc, argv);

    if (list->parsed()) {
        std::cout << gmech::list_systems();
        return 0;
    }
    return run_many(configs, outdir, jobs);
}
