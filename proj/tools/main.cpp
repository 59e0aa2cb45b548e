#include "commands.hpp"

#include "maxshape/errors.hpp"
#include "maxshape/parallel.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace maxshape;
using nlohmann::json;

namespace {

int fail(const std::string& kind, const std::string& message, int code)
{
    json e;
    e["error"] = {{"kind", kind}, {"message", message}};
    std::cout << e.dump(2) << std::endl;
    return code;
}

// core errors carry "Kind: message"
std::string kind_of(const std::string& what, const std::string& fallback)
{
    const auto p = what.find(':');
    if (p == std::string::npos || what.find(' ') < p) return fallback;
    return what.substr(0, p);
}

std::vector<char> parse_routes(const std::string& s)
{
    std::vector<char> r;
    std::string tok;
    for (size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == ',') {
            if (tok != "A" && tok != "B" && tok != "C") throw cli::ConfigError("routes must be a list of A, B, C");
            if (std::find(r.begin(), r.end(), tok[0]) == r.end()) r.push_back(tok[0]);
            tok.clear();
        } else if (!std::isspace(static_cast<unsigned char>(s[i]))) {
            tok += s[i];
        }
    }
    return r;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Dielectric Maxwell scattering on star-shaped surfaces with shape derivatives"};
    app.require_subcommand(1);
    std::string config, routes = "A,B,C", suite;
    auto* solve = app.add_subcommand("solve", "solve the scattering problem and write the far field");
    auto* dsolve = app.add_subcommand("dsolve", "shape derivative of the far field by routes A, B, C");
    auto* validate = app.add_subcommand("validate", "run a property suite");
    auto* mie = app.add_subcommand("mie", "Mie series far field and radius derivative of a sphere");
    for (auto* c : {solve, dsolve, validate, mie}) c->add_option("--config", config, "JSON config file")->required();
    dsolve->add_option("--routes", routes, "comma separated subset of A,B,C");
    validate->add_option("--suite", suite, "surfcalc, bio, solver or shapederiv")
        ->required()
        ->check(CLI::IsMember({"surfcalc", "bio", "solver", "shapederiv"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        return fail("ConfigError", e.what(), 2);
    }

    try {
        configure_threads_from_env();
    } catch (const std::exception&) {
        return fail("ConfigError", "MAXSHAPE_THREADS must be an integer", 2);
    }

    try {
        const cli::RunConfig cfg = cli::load_config(config);
        json out;
        if (*solve) out = cli::run_solve(cfg);
        else if (*dsolve) out = cli::run_dsolve(cfg, parse_routes(routes));
        else if (*mie) out = cli::run_mie(cfg);
        else out = cli::run_validate(cfg, suite);
        std::cout << out.dump(2) << std::endl;
        if (*validate && !out["passed"].get<bool>()) return 3;
        return 0;
    } catch (const cli::ConfigError& e) {
        return fail("ConfigError", e.what(), 2);
    } catch (const InputError& e) {
        return fail(kind_of(e.what(), "InputError"), e.what(), 2);
    } catch (const Error& e) {
        return fail(kind_of(e.what(), "NumericalError"), e.what(), 3);
    } catch (const std::exception& e) {
        return fail("NumericalError", e.what(), 3);
    }
}
