#include "aqc/io.hpp"

#include <bit>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "aqc/rng.hpp"

static_assert(std::endian::native == std::endian::little,
              "binary sample format is little-endian");

namespace aqc {

std::string format_double(double v) {
    char buf[32];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc()) throw std::runtime_error("format_double failed");
    return std::string(buf, end);
}

namespace {

std::uint64_t meta_u64(const SampleSet& s, const std::string& key) {
    for (const auto& [k, v] : s.meta)
        if (k == key) return std::stoull(v);
    throw std::runtime_error("samples file missing meta key: " + key);
}

void write_meta_block(std::ostream& os, const SampleSet& s) {
    os << "# aqc_samples v1\n";
    for (const auto& [k, v] : s.meta) os << "# " << k << "=" << v << "\n";
    os << "# shifts=";
    for (std::size_t i = 0; i < s.shifts.size(); ++i)
        os << (i ? "," : "") << format_double(s.shifts[i]);
    os << "\n# flagged_ids=";
    bool first = true;
    for (const auto& r : s.records)
        if (r.flagged) {
            os << (first ? "" : ",") << r.realization_id;
            first = false;
        }
    os << "\n";
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(item);
    return out;
}

}  // namespace

void save_samples_csv(const SampleSet& s, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    write_meta_block(os, s);
    os << "realization_id,shift_m,eta\n";
    for (const auto& r : s.records)
        for (std::size_t j = 0; j < s.shifts.size(); ++j)
            os << r.realization_id << "," << format_double(s.shifts[j]) << ","
               << format_double(r.etas[j]) << "\n";
    if (!os) throw std::runtime_error("write failed: " + path);
}

SampleSet load_samples_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open: " + path);
    SampleSet s;
    std::vector<std::uint64_t> flagged_ids;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto eq = line.find('=');
            if (eq == std::string::npos) continue;
            const std::string key = line.substr(2, eq - 2);
            const std::string val = line.substr(eq + 1);
            if (key == "shifts") {
                for (const auto& t : split(val, ','))
                    s.shifts.push_back(std::stod(t));
            } else if (key == "flagged_ids") {
                for (const auto& t : split(val, ','))
                    if (!t.empty()) flagged_ids.push_back(std::stoull(t));
            } else {
                s.meta.emplace_back(key, val);
            }
            continue;
        }
        if (line.rfind("realization_id", 0) == 0) continue;
        const auto cols = split(line, ',');
        if (cols.size() != 3)
            throw std::runtime_error("malformed sample row: " + line);
        const std::uint64_t id = std::stoull(cols[0]);
        if (s.records.empty() || s.records.back().realization_id != id) {
            s.records.push_back({id, 0, {}, false});
        }
        s.records.back().etas.push_back(std::stod(cols[2]));
    }
    const std::uint64_t master = meta_u64(s, "master_seed");
    for (auto& r : s.records) r.seed = split_seed(master, r.realization_id);
    for (std::uint64_t id : flagged_ids)
        for (auto& r : s.records)
            if (r.realization_id == id) r.flagged = true;
    s.validate();
    return s;
}

void save_samples_binary(const SampleSet& s, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    for (const auto& r : s.records)
        os.write(reinterpret_cast<const char*>(r.etas.data()),
                 static_cast<std::streamsize>(sizeof(double) * r.etas.size()));
    if (!os) throw std::runtime_error("write failed: " + path);

    nlohmann::json side;
    side["format"] = "aqc_samples_f64le v1";
    side["shifts"] = s.shifts;
    nlohmann::json meta = nlohmann::json::object();
    for (const auto& [k, v] : s.meta) meta[k] = v;
    side["meta"] = meta;
    std::vector<std::uint64_t> ids, seeds, flagged;
    for (const auto& r : s.records) {
        ids.push_back(r.realization_id);
        seeds.push_back(r.seed);
        if (r.flagged) flagged.push_back(r.realization_id);
    }
    side["realization_ids"] = ids;
    side["seeds"] = seeds;
    side["flagged_ids"] = flagged;
    std::ofstream js(path + ".json");
    js << side.dump(2) << "\n";
    if (!js) throw std::runtime_error("write failed: " + path + ".json");
}

SampleSet load_samples_binary(const std::string& path) {
    std::ifstream js(path + ".json");
    if (!js) throw std::runtime_error("cannot open: " + path + ".json");
    nlohmann::json side;
    js >> side;
    SampleSet s;
    s.shifts = side["shifts"].get<std::vector<double>>();
    for (auto it = side["meta"].begin(); it != side["meta"].end(); ++it)
        s.meta.emplace_back(it.key(), it.value().get<std::string>());
    const auto ids = side["realization_ids"].get<std::vector<std::uint64_t>>();
    const auto seeds = side["seeds"].get<std::vector<std::uint64_t>>();
    const auto flagged = side["flagged_ids"].get<std::vector<std::uint64_t>>();

    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open: " + path);
    for (std::size_t i = 0; i < ids.size(); ++i) {
        SampleRecord r;
        r.realization_id = ids[i];
        r.seed = seeds[i];
        r.etas.resize(s.shifts.size());
        is.read(reinterpret_cast<char*>(r.etas.data()),
                static_cast<std::streamsize>(sizeof(double) * r.etas.size()));
        if (!is) throw std::runtime_error("truncated sample data: " + path);
        for (std::uint64_t f : flagged)
            if (f == r.realization_id) r.flagged = true;
        s.records.push_back(std::move(r));
    }
    s.validate();
    return s;
}

void save_grid_dump(const std::vector<double>& values, int grid_n,
                    double grid_step, std::uint64_t seed, double shift,
                    const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    os.write(reinterpret_cast<const char*>(values.data()),
             static_cast<std::streamsize>(sizeof(double) * values.size()));
    nlohmann::json side;
    side["grid_n"] = grid_n;
    side["grid_step_m"] = grid_step;
    side["seed"] = seed;
    side["shift_m"] = shift;
    side["layout"] = "row-major f64 little-endian";
    std::ofstream js(path + ".json");
    js << side.dump(2) << "\n";
}

void save_table_csv(
    const std::string& path, const std::vector<std::string>& columns,
    const std::vector<std::vector<double>>& rows,
    const std::vector<std::pair<std::string, std::string>>& meta) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    for (const auto& [k, v] : meta) os << "# " << k << "=" << v << "\n";
    for (std::size_t i = 0; i < columns.size(); ++i)
        os << (i ? "," : "") << columns[i];
    os << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            os << (i ? "," : "") << format_double(row[i]);
        os << "\n";
    }
    if (!os) throw std::runtime_error("write failed: " + path);
}

}  // namespace aqc
