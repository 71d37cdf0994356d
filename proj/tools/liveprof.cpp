#include "liveprof/error.hpp"
#include "liveprof/profile_json.hpp"
#include "liveprof/report.hpp"
#include "liveprof/session.hpp"
#include "liveprof/sync_server.hpp"
#include "liveprof/tcp_server.hpp"
#include "liveprof/text_view.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <pthread.h>
#include <sstream>
#include <string>
#include <thread>

namespace fs = std::filesystem;
using namespace liveprof;

namespace {

constexpr const char* kIndexHtml =
    "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\"><title>liveprof</title></head><body>\n"
    "<h1>liveprof</h1>\n<p>Profiles: <a href=\"/snapshot\">/snapshot</a>. Live clients connect to this port "
    "and exchange line-delimited JSON.</p>\n</body></html>\n";

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << data;
    if (!out) throw IoError("cannot write " + path.string());
}

std::string describe(const ExecError& e) {
    std::string s = e.kind + ": " + e.message;
    if (e.span.line > 0) s += " (line " + std::to_string(e.span.line) + ", column " + std::to_string(e.span.column) + ")";
    return s;
}

/// Prints what one execution changed, in REPL form.
void print_result(const Session& session, const ExecResult& r, std::ostream& out, std::ostream& err) {
    for (const auto& name : r.changed) {
        const TablePtr t = session.find(name);
        if (!t) continue;
        out << shape_line(name, *t) << '\n';
        const bool temporary = session.temp_output() && session.temp_output()->name == name;
        out << profile_text(profile_table(*t, r.epoch, temporary));
    }
    for (const auto& plot : r.plots) {
        if (const TablePtr t = session.find(plot.table)) out << plot_text(*t, plot);
    }
    if (r.error) err << describe(*r.error) << '\n';
}

/// Net paren depth of a line, skipping string literals, backtick names and
/// comments. Used to keep reading while an expression is still open.
int paren_delta(const std::string& line) {
    int depth = 0;
    char quote = 0;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quote) {
            if (c == '\\' && quote == '"') ++i;
            else if (c == quote) quote = 0;
        } else if (c == '"' || c == '`') {
            quote = c;
        } else if (c == '#') {
            break;
        } else if (c == '(') {
            ++depth;
        } else if (c == ')') {
            --depth;
        }
    }
    return depth;
}

int cmd_repl(const std::optional<fs::path>& script) {
    Session session;
    if (script) {
        session.set_base_dir(fs::absolute(*script).parent_path());
        try {
            const ExecResult r = session.execute(read_file(*script));
            print_result(session, r, std::cout, std::cerr);
        } catch (const Error& e) {
            std::cerr << e.what() << '\n';
        }
    }
    std::string pending;
    int depth = 0;
    std::string line;
    while (true) {
        std::cout << (pending.empty() ? "> " : ". ") << std::flush;
        if (!std::getline(std::cin, line)) break;
        pending += line;
        pending += '\n';
        depth += paren_delta(line);
        if (depth > 0) continue;
        const ExecResult r = session.execute(pending);
        print_result(session, r, std::cout, std::cout);
        pending.clear();
        depth = 0;
    }
    std::cout << '\n';
    return 0;
}

int cmd_run(const fs::path& script, const fs::path& out_dir) {
    std::string source;
    try {
        source = read_file(script);
        fs::create_directories(out_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    Session session(fs::absolute(script).parent_path());
    const ExecResult r = session.execute(source);
    for (const auto& [name, binding] : session.env()) {
        const std::string json = dump_canonical(to_json(profile_table(*binding.table, binding.last_epoch)));
        try {
            write_file(out_dir / (name + ".json"), json + "\n");
        } catch (const Error& e) {
            std::cerr << "error: " << e.what() << '\n';
            return 1;
        }
    }
    if (r.error) {
        std::cerr << script.string() << ": " << describe(*r.error) << '\n';
        return 1;
    }
    return 0;
}

int cmd_report(const fs::path& csv, const std::string& format, const std::optional<fs::path>& out) {
    try {
        const Json payload = report_json(csv);
        const std::string text = format == "html" ? render_html(payload) : dump_canonical(payload) + "\n";
        if (out) write_file(*out, text);
        else std::cout << text;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

int cmd_serve(std::uint16_t port, bool open, const std::optional<fs::path>& assets) {
    // Route termination signals to a dedicated thread so every other thread
    // runs with them blocked.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    std::string index = kIndexHtml;
    try {
        if (assets) index = read_file(*assets / "index.html");
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }

    ServerLoop loop;
    TcpServer server(loop, index);
    try {
        server.listen(port);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    const std::string url = "http://127.0.0.1:" + std::to_string(server.port()) + "/";
    std::cout << "listening on " << url << std::endl;
    if (open) {
        const std::string cmd = "xdg-open " + url + " >/dev/null 2>&1 &";
        if (std::system(cmd.c_str()) != 0) std::cerr << "could not open a browser\n";
    }

    std::thread waiter([&] {
        int sig = 0;
        sigwait(&signals, &sig);
        server.stop();
    });
    server.serve();
    // serve() returned on its own only if accept failed; wake the waiter.
    pthread_kill(waiter.native_handle(), SIGTERM);
    waiter.join();
    return 0;
}

std::uint16_t default_port() {
    if (const char* env = std::getenv("LIVEPROF_PORT")) {
        try {
            const unsigned long v = std::stoul(env);
            if (v <= 65535) return static_cast<std::uint16_t>(v);
        } catch (const std::exception&) {
        }
        std::cerr << "warning: ignoring invalid LIVEPROF_PORT '" << env << "'\n";
    }
    return 8765;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Continuous data profiling workbench"};
    app.require_subcommand(1);

    auto* serve = app.add_subcommand("serve", "Serve the live profiling protocol and UI");
    std::uint16_t port = default_port();
    bool open = false;
    std::optional<fs::path> assets;
    serve->add_option("--port", port, "TCP port (default $LIVEPROF_PORT or 8765)");
    serve->add_flag("--open", open, "Open the UI in a browser");
    serve->add_option("--assets", assets, "Directory holding index.html")->check(CLI::ExistingDirectory);

    auto* repl = app.add_subcommand("repl", "Interactive session in the terminal");
    std::optional<fs::path> repl_script;
    repl->add_option("script", repl_script, "Script to run first")->check(CLI::ExistingFile);

    auto* run = app.add_subcommand("run", "Execute a script and write one profile per table");
    fs::path run_script;
    fs::path run_out;
    run->add_option("script", run_script, "Script file")->required();
    run->add_option("--out", run_out, "Output directory")->required();

    auto* report = app.add_subcommand("report", "One-shot static profile of a CSV file");
    fs::path report_csv;
    std::string format = "json";
    std::optional<fs::path> report_out;
    report->add_option("csv", report_csv, "CSV file")->required();
    report->add_option("--format", format, "json or html")->check(CLI::IsMember({"json", "html"}));
    report->add_option("--out", report_out, "Output file (default stdout)");

    CLI11_PARSE(app, argc, argv);

    if (*serve) return cmd_serve(port, open, assets);
    if (*repl) return cmd_repl(repl_script);
    if (*run) return cmd_run(run_script, run_out);
    return cmd_report(report_csv, format, report_out);
}
