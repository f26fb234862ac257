// SPDX-License-Identifier: Apache-2.0
//
// semiblind: data-aided GMM channel estimation for multi-user MIMO uplinks
// Copyright (C) 2026 The semiblind authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "semiblind/experiment_config.hpp"

#include "semiblind/errors.hpp"
#include "semiblind/random.hpp"

#include <fstream>
#include <set>

namespace semiblind {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

[[noreturn]] void config_fail(const std::string &path, const std::string &message)
{
    fail(ErrorCode::config_error, path + ": " + message);
}

std::string join(const std::string &path, const std::string &key)
{
    return path.empty() ? key : path + "." + key;
}

template <typename Enum, std::size_t N>
Enum parse_enum(const json &value, const std::string &path, const std::array<std::pair<const char *, Enum>, N> &names)
{
    if (!value.is_string())
        config_fail(path, "expected a string");
    const auto text = value.get<std::string>();
    for (const auto &[name, e] : names)
        if (text == name)
            return e;
    std::string allowed;
    for (const auto &[name, e] : names)
        allowed += std::string(allowed.empty() ? "" : ", ") + name;
    config_fail(path, "unknown value '" + text + "' (allowed: " + allowed + ")");
}

template <typename Enum, std::size_t N>
const char *enum_name(Enum e, const std::array<std::pair<const char *, Enum>, N> &names)
{
    for (const auto &[name, v] : names)
        if (v == e)
            return name;
    return "unknown";
}

constexpr std::array<std::pair<const char *, PathGainModel>, 2> kGainModels{{
    {"rayleigh", PathGainModel::rayleigh},
    {"unit_modulus", PathGainModel::unit_modulus},
}};
constexpr std::array<std::pair<const char *, PilotType>, 2> kPilotTypes{{
    {"identity", PilotType::identity},
    {"dft", PilotType::dft},
}};
constexpr std::array<std::pair<const char *, EigenSolverMethod>, 2> kSolvers{{
    {"full", EigenSolverMethod::full},
    {"subspace_iteration", EigenSolverMethod::subspace_iteration},
}};
constexpr std::array<std::pair<const char *, InitStrategy>, 2> kInits{{
    {"kmeans++", InitStrategy::kmeans_plus_plus},
    {"random_responsibility", InitStrategy::random_responsibility},
}};
constexpr std::array<std::pair<const char *, SweepType>, 3> kSweepTypes{{
    {"snr", SweepType::snr_db},
    {"snapshots", SweepType::snapshots},
    {"users", SweepType::users},
}};

// Reads the fields of one JSON object, remembering which keys were consumed so
// that leftovers can be reported.
class SectionReader {
public:
    SectionReader(const json &doc, std::string path) : doc_(doc), path_(std::move(path))
    {
        if (!doc_.is_object())
            config_fail(path_, "expected an object");
    }

    const json *find(const std::string &key)
    {
        used_.insert(key);
        const auto it = doc_.find(key);
        return it == doc_.end() ? nullptr : &*it;
    }

    std::string path(const std::string &key) const { return join(path_, key); }

    template <typename T>
    void read(const std::string &key, T &out)
    {
        const json *v = find(key);
        if (v)
            convert(*v, path(key), out);
    }

    template <typename Enum, std::size_t N>
    void read_enum(const std::string &key, Enum &out, const std::array<std::pair<const char *, Enum>, N> &names)
    {
        if (const json *v = find(key))
            out = parse_enum(*v, path(key), names);
    }

    void finish() const
    {
        for (const auto &item : doc_.items())
            if (!used_.count(item.key()))
                config_fail(join(path_, item.key()), "unknown field");
    }

private:
    static void convert(const json &v, const std::string &path, int &out)
    {
        if (!v.is_number_integer())
            config_fail(path, "expected an integer");
        const auto x = v.get<std::int64_t>();
        if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
            config_fail(path, "integer out of range");
        out = static_cast<int>(x);
    }

    static void convert(const json &v, const std::string &path, unsigned &out)
    {
        if (!v.is_number_integer() || v.get<std::int64_t>() < 0)
            config_fail(path, "expected a nonnegative integer");
        out = v.get<unsigned>();
    }

    static void convert(const json &v, const std::string &path, std::int64_t &out)
    {
        if (!v.is_number_integer())
            config_fail(path, "expected an integer");
        out = v.get<std::int64_t>();
    }

    static void convert(const json &v, const std::string &path, std::uint64_t &out)
    {
        if (!v.is_number_unsigned())
            config_fail(path, "expected a nonnegative integer");
        out = v.get<std::uint64_t>();
    }

    static void convert(const json &v, const std::string &path, double &out)
    {
        if (!v.is_number())
            config_fail(path, "expected a number");
        out = v.get<double>();
    }

    static void convert(const json &v, const std::string &path, bool &out)
    {
        if (!v.is_boolean())
            config_fail(path, "expected true or false");
        out = v.get<bool>();
    }

    static void convert(const json &v, const std::string &path, std::string &out)
    {
        if (!v.is_string())
            config_fail(path, "expected a string");
        out = v.get<std::string>();
    }

    static void convert(const json &v, const std::string &path, std::optional<double> &out)
    {
        if (v.is_null())
        {
            out.reset();
            return;
        }
        double x;
        convert(v, path, x);
        out = x;
    }

    static void convert(const json &v, const std::string &path, std::vector<double> &out)
    {
        if (!v.is_array())
            config_fail(path, "expected an array of numbers");
        out.clear();
        for (std::size_t i = 0; i < v.size(); ++i)
        {
            double x;
            convert(v[i], path + "[" + std::to_string(i) + "]", x);
            out.push_back(x);
        }
    }

    const json &doc_;
    std::string path_;
    std::set<std::string> used_;
};

const json &require_section(const json &doc, const std::string &name)
{
    const auto it = doc.find(name);
    if (it == doc.end())
        config_fail(name, "missing required section");
    return *it;
}

void check(bool ok, const std::string &path, const std::string &message)
{
    if (!ok)
        config_fail(path, message);
}

void parse_scenario(const json &doc, ScenarioSection &s)
{
    SectionReader r(doc, "scenario");
    if (const json *g = r.find("geometry"))
    {
        SectionReader gr(*g, "scenario.geometry");
        gr.read("vertical_count", s.geometry.vertical_count);
        gr.read("horizontal_count", s.geometry.horizontal_count);
        gr.read("vertical_spacing", s.geometry.vertical_spacing);
        gr.read("horizontal_spacing", s.geometry.horizontal_spacing);
        gr.finish();
    }
    r.read("cluster_count_min", s.cluster_count_min);
    r.read("cluster_count_max", s.cluster_count_max);
    r.read("paths_per_cluster", s.paths_per_cluster);
    r.read("angular_spread_deg", s.angular_spread_deg);
    r.read("azimuth_deg", s.azimuth_deg);
    r.read("elevation_deg", s.elevation_deg);
    r.read("cluster_power_fractions", s.cluster_power_fractions);
    r.read_enum("gain_model", s.gain_model, kGainModels);
    r.read("train_count", s.train_count);
    r.read("test_count", s.test_count);
    r.read("normalization", s.normalization);
    r.finish();

    check(s.geometry.vertical_count > 0, "scenario.geometry.vertical_count", "must be positive");
    check(s.geometry.horizontal_count > 0, "scenario.geometry.horizontal_count", "must be positive");
    check(s.geometry.vertical_spacing > 0, "scenario.geometry.vertical_spacing", "must be positive");
    check(s.geometry.horizontal_spacing > 0, "scenario.geometry.horizontal_spacing", "must be positive");
    check(s.cluster_count_min >= 1, "scenario.cluster_count_min", "must be at least 1");
    check(s.cluster_count_max >= s.cluster_count_min, "scenario.cluster_count_max", "must be >= cluster_count_min");
    check(s.paths_per_cluster >= 1, "scenario.paths_per_cluster", "must be at least 1");
    check(s.angular_spread_deg > 0, "scenario.angular_spread_deg", "must be positive");
    check(s.azimuth_deg.size() == 2 && s.azimuth_deg[0] <= s.azimuth_deg[1], "scenario.azimuth_deg",
          "expected [lo, hi] with lo <= hi");
    check(s.elevation_deg.size() == 2 && s.elevation_deg[0] <= s.elevation_deg[1], "scenario.elevation_deg",
          "expected [lo, hi] with lo <= hi");
    check(s.cluster_power_fractions.empty() ||
              static_cast<int>(s.cluster_power_fractions.size()) >= s.cluster_count_max,
          "scenario.cluster_power_fractions", "needs one entry per possible cluster");
    check(s.train_count >= 1, "scenario.train_count", "must be positive");
    check(s.test_count >= 1, "scenario.test_count", "must be positive");
    check(!s.normalization || *s.normalization > 0, "scenario.normalization", "must be positive");
}

void parse_system(const json &doc, SystemSection &s, int antennas)
{
    SectionReader r(doc, "system");
    if (const json *m = r.find("antennas"))
    {
        int declared = 0;
        if (!m->is_number_integer())
            config_fail("system.antennas", "expected an integer");
        declared = m->get<int>();
        check(declared == antennas, "system.antennas",
              "disagrees with the array geometry (M = " + std::to_string(antennas) + ")");
    }
    r.read("users", s.users);
    r.read("snapshots", s.snapshots);
    r.read("snr_db", s.snr_db);
    r.read("symbol_powers", s.symbol_powers);
    r.read_enum("pilot_type", s.pilot_type, kPilotTypes);
    r.read("include_pilots", s.include_pilots);
    r.read_enum("eigen_solver", s.eigen_solver, kSolvers);
    r.finish();

    check(s.users >= 1 && s.users <= antennas, "system.users", "must satisfy 1 <= J <= M");
    check(s.snapshots >= 1, "system.snapshots", "must be at least 1");
    if (!s.symbol_powers.empty())
    {
        double sum = 0.0;
        for (double p : s.symbol_powers)
            sum += p;
        check(static_cast<int>(s.symbol_powers.size()) == s.users && std::abs(sum - 1.0) <= 1e-12,
              "system.symbol_powers", "needs J entries summing to 1");
    }
}

void parse_gmm(const json &doc, GmmSection &s)
{
    SectionReader r(doc, "gmm");
    r.read("components", s.components);
    r.read("max_iterations", s.max_iterations);
    r.read("rel_tolerance", s.rel_tolerance);
    r.read("covariance_floor", s.covariance_floor);
    r.read_enum("init", s.init_strategy, kInits);
    r.read("kmeans_iterations", s.kmeans_iterations);
    r.read("chunk_size", s.chunk_size);
    r.finish();

    check(s.components >= 1, "gmm.components", "must be at least 1");
    check(s.max_iterations >= 1, "gmm.max_iterations", "must be at least 1");
    check(s.rel_tolerance > 0, "gmm.rel_tolerance", "must be positive");
    check(s.covariance_floor > 0, "gmm.covariance_floor", "must be positive");
    check(s.kmeans_iterations >= 0, "gmm.kmeans_iterations", "must be nonnegative");
    check(s.chunk_size >= 1, "gmm.chunk_size", "must be positive");
}

void parse_sweep(const json &doc, SweepSection &s, int antennas)
{
    SectionReader r(doc, "sweep");
    if (!doc.contains("type"))
        config_fail("sweep.type", "missing; exactly one of snr, snapshots, users is required");
    r.read_enum("type", s.type, kSweepTypes);
    r.read("grid", s.grid);
    if (const json *e = r.find("estimators"))
    {
        if (!e->is_array())
            config_fail("sweep.estimators", "expected an array of estimator names");
        s.estimators.clear();
        for (std::size_t i = 0; i < e->size(); ++i)
        {
            const std::string path = "sweep.estimators[" + std::to_string(i) + "]";
            if (!(*e)[i].is_string())
                config_fail(path, "expected a string");
            const auto kind = parse_estimator((*e)[i].get<std::string>());
            if (!kind)
                config_fail(path, "unknown estimator '" + (*e)[i].get<std::string>() +
                                      "' (allowed: ls, ml, scov, sub_scov, proj_scov, gmm, sub_gmm, proj_gmm)");
            s.estimators.push_back(*kind);
        }
    }
    r.read("trials", s.trials);
    r.finish();

    check(!s.grid.empty(), "sweep.grid", "must not be empty");
    check(!s.estimators.empty(), "sweep.estimators", "must not be empty");
    check(s.trials >= 1, "sweep.trials", "must be at least 1");
    for (std::size_t i = 0; i < s.grid.size(); ++i)
    {
        const double v = s.grid[i];
        const std::string path = "sweep.grid[" + std::to_string(i) + "]";
        if (s.type == SweepType::snr_db)
            check(std::isfinite(v), path, "SNR must be finite");
        else
            check(v >= 1 && v == std::round(v), path, "must be a positive integer");
        if (s.type == SweepType::users)
            check(v <= antennas, path, "user count exceeds M");
    }
}

void parse_bench(const json &doc, BenchSection &s)
{
    SectionReader r(doc, "bench");
    r.read("snr_db", s.snr_db);
    r.read("repetitions", s.repetitions);
    r.finish();
    check(!s.snr_db.empty(), "bench.snr_db", "must not be empty");
    check(s.repetitions >= 1, "bench.repetitions", "must be at least 1");
}

void parse_io(const json &doc, IoSection &s)
{
    SectionReader r(doc, "io");
    r.read("train", s.train);
    r.read("test", s.test);
    r.read("model", s.model);
    r.read("fit_report", s.fit_report);
    r.read("output", s.output);
    r.read("bench_output", s.bench_output);
    r.finish();
}

} // namespace

ClusterScenario ScenarioSection::cluster_scenario() const
{
    constexpr double deg = kPi / 180.0;
    ClusterScenario c;
    c.cluster_count_min = cluster_count_min;
    c.cluster_count_max = cluster_count_max;
    c.paths_per_cluster = paths_per_cluster;
    c.angular_spread = angular_spread_deg * deg;
    c.azimuth = {azimuth_deg.at(0) * deg, azimuth_deg.at(1) * deg};
    c.elevation = {elevation_deg.at(0) * deg, elevation_deg.at(1) * deg};
    c.cluster_power_fractions = cluster_power_fractions;
    c.gain_model = gain_model;
    return c;
}

SystemConfig ExperimentConfig::system_config() const
{
    SystemConfig c;
    c.antennas = antennas();
    c.users = system.users;
    c.snapshots = system.snapshots;
    c.snr_db = system.snr_db;
    c.symbol_powers = system.symbol_powers;
    c.pilot_type = system.pilot_type;
    return c;
}

EmConfig ExperimentConfig::em_config() const
{
    EmConfig c;
    c.component_count = gmm.components;
    c.max_iterations = gmm.max_iterations;
    c.rel_tolerance = gmm.rel_tolerance;
    c.covariance_floor = gmm.covariance_floor;
    c.init_strategy = gmm.init_strategy;
    c.kmeans_iterations = gmm.kmeans_iterations;
    c.chunk_size = gmm.chunk_size;
    c.seed = gmm_seed();
    c.threads = threads;
    return c;
}

SweepSpec ExperimentConfig::sweep_spec() const
{
    SweepSpec s;
    s.type = sweep.type;
    s.grid = sweep.grid;
    s.estimators = sweep.estimators;
    s.trials = sweep.trials;
    s.seed = sweep_seed();
    s.include_pilots = system.include_pilots;
    s.eigen_solver = system.eigen_solver;
    s.threads = threads;
    return s;
}

std::uint64_t ExperimentConfig::train_seed() const { return derive_seed(seed, {1}); }
std::uint64_t ExperimentConfig::test_seed() const { return derive_seed(seed, {2}); }
std::uint64_t ExperimentConfig::gmm_seed() const { return derive_seed(seed, {3}); }
std::uint64_t ExperimentConfig::sweep_seed() const { return derive_seed(seed, {4}); }
std::uint64_t ExperimentConfig::bench_seed() const { return derive_seed(seed, {5}); }

ExperimentConfig parse_config(const json &doc)
{
    if (!doc.is_object())
        config_fail("<root>", "expected a JSON object");
    ExperimentConfig c;
    SectionReader root(doc, "");
    root.read("seed", c.seed);
    root.read("threads", c.threads);

    root.find("scenario");
    parse_scenario(require_section(doc, "scenario"), c.scenario);
    const int m = c.antennas();
    root.find("system");
    parse_system(require_section(doc, "system"), c.system, m);
    root.find("gmm");
    parse_gmm(require_section(doc, "gmm"), c.gmm);
    root.find("sweep");
    parse_sweep(require_section(doc, "sweep"), c.sweep, m);
    if (const json *b = root.find("bench"))
        parse_bench(*b, c.bench);
    root.find("io");
    parse_io(require_section(doc, "io"), c.io);
    root.finish();
    return c;
}

ordered_json to_json(const ExperimentConfig &c)
{
    ordered_json j;
    j["seed"] = c.seed;
    j["threads"] = c.threads;

    const auto &s = c.scenario;
    ordered_json scenario;
    scenario["geometry"] = {
        {"vertical_count", s.geometry.vertical_count},
        {"horizontal_count", s.geometry.horizontal_count},
        {"vertical_spacing", s.geometry.vertical_spacing},
        {"horizontal_spacing", s.geometry.horizontal_spacing},
    };
    scenario["cluster_count_min"] = s.cluster_count_min;
    scenario["cluster_count_max"] = s.cluster_count_max;
    scenario["paths_per_cluster"] = s.paths_per_cluster;
    scenario["angular_spread_deg"] = s.angular_spread_deg;
    scenario["azimuth_deg"] = s.azimuth_deg;
    scenario["elevation_deg"] = s.elevation_deg;
    scenario["cluster_power_fractions"] = s.cluster_power_fractions;
    scenario["gain_model"] = enum_name(s.gain_model, kGainModels);
    scenario["train_count"] = s.train_count;
    scenario["test_count"] = s.test_count;
    scenario["normalization"] = s.normalization ? ordered_json(*s.normalization) : ordered_json(nullptr);
    j["scenario"] = scenario;

    j["system"] = {
        {"antennas", c.antennas()},
        {"users", c.system.users},
        {"snapshots", c.system.snapshots},
        {"snr_db", c.system.snr_db},
        {"symbol_powers", c.system.symbol_powers},
        {"pilot_type", enum_name(c.system.pilot_type, kPilotTypes)},
        {"include_pilots", c.system.include_pilots},
        {"eigen_solver", enum_name(c.system.eigen_solver, kSolvers)},
    };
    j["gmm"] = {
        {"components", c.gmm.components},
        {"max_iterations", c.gmm.max_iterations},
        {"rel_tolerance", c.gmm.rel_tolerance},
        {"covariance_floor", c.gmm.covariance_floor},
        {"init", enum_name(c.gmm.init_strategy, kInits)},
        {"kmeans_iterations", c.gmm.kmeans_iterations},
        {"chunk_size", c.gmm.chunk_size},
    };
    ordered_json estimators = ordered_json::array();
    for (auto kind : c.sweep.estimators)
        estimators.push_back(std::string(estimator_name(kind)));
    j["sweep"] = {
        {"type", enum_name(c.sweep.type, kSweepTypes)},
        {"grid", c.sweep.grid},
        {"estimators", estimators},
        {"trials", c.sweep.trials},
    };
    j["bench"] = {
        {"snr_db", c.bench.snr_db},
        {"repetitions", c.bench.repetitions},
    };
    j["io"] = {
        {"train", c.io.train},
        {"test", c.io.test},
        {"model", c.io.model},
        {"fit_report", c.io.fit_report},
        {"output", c.io.output},
        {"bench_output", c.io.bench_output},
    };
    return j;
}

void apply_override(json &doc, const std::string &assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        config_fail(assignment, "override must look like section.key=value");
    const std::string key = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);

    json value = json::parse(text, nullptr, false);
    if (value.is_discarded())
        value = text;

    json *node = &doc;
    std::size_t start = 0;
    while (true)
    {
        const auto dot = key.find('.', start);
        const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (part.empty())
            config_fail(key, "empty path component in override");
        if (!node->is_object())
            config_fail(key, "override path crosses a non-object value");
        if (dot == std::string::npos)
        {
            (*node)[part] = value;
            return;
        }
        node = &(*node)[part];
        start = dot + 1;
    }
}

ExperimentConfig load_config_file(const std::string &path, const std::vector<std::string> &overrides)
{
    std::ifstream in(path);
    if (!in)
        fail(ErrorCode::io_error, "cannot open config file '" + path + "'");
    json doc = json::parse(in, nullptr, false, true);
    if (doc.is_discarded())
        config_fail(path, "not valid JSON");
    for (const auto &o : overrides)
        apply_override(doc, o);
    return parse_config(doc);
}

} // namespace semiblind
