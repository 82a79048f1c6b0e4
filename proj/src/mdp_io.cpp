#include "oams/mdp_io.hpp"

#include "oams/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace oams {

std::string format_real(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", x);
    return buf;
}

nlohmann::json to_json(const Mdp& m) {
    nlohmann::json doc;
    doc["num_states"] = m.num_states();
    doc["num_actions"] = m.num_actions();
    auto& rewards = doc["rewards"] = nlohmann::json::array();
    auto& trans = doc["transitions"] = nlohmann::json::array();
    for (int s = 0; s < m.num_states(); ++s) {
        nlohmann::json rs = nlohmann::json::array();
        nlohmann::json ts = nlohmann::json::array();
        for (int a = 0; a < m.num_actions(); ++a) {
            rs.push_back(m.reward(s, a));
            const auto row = m.row(s, a);
            ts.push_back(std::vector<double>(row.begin(), row.end()));
        }
        rewards.push_back(std::move(rs));
        trans.push_back(std::move(ts));
    }
    return doc;
}

std::string mdp_to_text(const Mdp& m) {
    // Hand-rolled so every number carries 17 significant digits.
    const int n = m.num_states();
    const int na = m.num_actions();
    std::ostringstream os;
    os << "{\n  \"num_states\": " << n << ",\n  \"num_actions\": " << na << ",\n  \"rewards\": [\n";
    for (int s = 0; s < n; ++s) {
        os << "    [";
        for (int a = 0; a < na; ++a) os << (a ? ", " : "") << format_real(m.reward(s, a));
        os << "]" << (s + 1 < n ? "," : "") << "\n";
    }
    os << "  ],\n  \"transitions\": [\n";
    for (int s = 0; s < n; ++s) {
        os << "    [\n";
        for (int a = 0; a < na; ++a) {
            os << "      [";
            const auto row = m.row(s, a);
            for (int k = 0; k < n; ++k) os << (k ? ", " : "") << format_real(row[k]);
            os << "]" << (a + 1 < na ? "," : "") << "\n";
        }
        os << "    ]" << (s + 1 < n ? "," : "") << "\n";
    }
    os << "  ]\n}\n";
    return os.str();
}

namespace {

int positive_int(const nlohmann::json& doc, const char* key) {
    if (!doc.contains(key) || !doc[key].is_number_integer() || doc[key].get<long>() < 1)
        throw Error(ErrorKind::InvalidMdp, std::string("field '") + key + "' must be a positive integer");
    return doc[key].get<int>();
}

} // namespace

Mdp mdp_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw Error(ErrorKind::InvalidMdp, "MDP document must be an object");
    const int n = positive_int(doc, "num_states");
    const int na = positive_int(doc, "num_actions");
    const auto& rj = doc.value("rewards", nlohmann::json());
    const auto& tj = doc.value("transitions", nlohmann::json());
    if (!rj.is_array() || rj.size() != static_cast<std::size_t>(n))
        throw Error(ErrorKind::InvalidMdp, "rewards must be an S x A array");
    if (!tj.is_array() || tj.size() != static_cast<std::size_t>(n))
        throw Error(ErrorKind::InvalidMdp, "transitions must be an S x A x S array");

    std::vector<double> rewards;
    std::vector<double> trans;
    rewards.reserve(static_cast<std::size_t>(n) * na);
    trans.reserve(static_cast<std::size_t>(n) * na * n);
    for (int s = 0; s < n; ++s) {
        if (!rj[s].is_array() || rj[s].size() != static_cast<std::size_t>(na))
            throw Error(ErrorKind::InvalidMdp, "rewards row " + std::to_string(s) + " must have A entries");
        if (!tj[s].is_array() || tj[s].size() != static_cast<std::size_t>(na))
            throw Error(ErrorKind::InvalidMdp, "transitions[" + std::to_string(s) + "] must have A rows");
        for (int a = 0; a < na; ++a) {
            if (!rj[s][a].is_number())
                throw Error(ErrorKind::InvalidMdp, "reward (s=" + std::to_string(s) + ", a=" + std::to_string(a) +
                                                       ") is not a number");
            rewards.push_back(rj[s][a].get<double>());
            const auto& row = tj[s][a];
            const std::string where = "(s=" + std::to_string(s) + ", a=" + std::to_string(a) + ")";
            if (!row.is_array() || row.size() != static_cast<std::size_t>(n))
                throw Error(ErrorKind::InvalidMdp, "transition row " + where + " must have S entries");
            double total = 0.0;
            for (int k = 0; k < n; ++k) {
                if (!row[k].is_number()) throw Error(ErrorKind::InvalidMdp, "transition row " + where + " has a non-number");
                trans.push_back(row[k].get<double>());
                total += trans.back();
            }
            if (!(std::fabs(total - 1.0) <= 1e-9)) {
                std::ostringstream os;
                os.precision(17);
                os << "transition row " << where << " sums to " << total << ", not 1 within 1e-9";
                throw Error(ErrorKind::InvalidMdp, os.str());
            }
        }
    }
    return Mdp(n, na, std::move(rewards), std::move(trans));
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::IoError, "cannot open '" + path.string() + "' for reading");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& value) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec) throw Error(ErrorKind::IoError, "cannot create directory '" + path.parent_path().string() + "'");
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::IoError, "cannot open '" + path.string() + "' for writing");
    out << value;
    if (!out) throw Error(ErrorKind::IoError, "write to '" + path.string() + "' failed");
}

Mdp load_mdp(const std::filesystem::path& path) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorKind::InvalidMdp, "'" + path.string() + "': " + e.what());
    }
    try {
        return mdp_from_json(doc);
    } catch (const Error& e) {
        throw Error(e.kind(), "'" + path.string() + "': " + e.what());
    }
}

void save_mdp(const Mdp& m, const std::filesystem::path& path) { write_text_file(path, mdp_to_text(m)); }

} // namespace oams
