#include "gramcent/matrix_io.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

namespace gramcent {

namespace {

int parse_count(const std::string& text, const std::string& what) {
    std::size_t pos = 0;
    long value = 0;
    try {
        value = std::stol(text, &pos);
    } catch (const std::exception&) {
        throw ValidationError("cannot parse " + what + " from '" + text + "'");
    }
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos != text.size() || value < 1 || value > 1000000) {
        throw ValidationError("invalid " + what + " '" + text + "'");
    }
    return static_cast<int>(value);
}

}  // namespace

Network read_matrix(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ValidationError("matrix file is empty");
    const int n = parse_count(line, "node count");

    Eigen::MatrixXd adj(n, n);
    for (int j = 0; j < n; ++j) {
        if (!std::getline(in, line)) {
            throw ValidationError("matrix file ends after " + std::to_string(j) +
                                  " of " + std::to_string(n) + " rows");
        }
        std::istringstream row(line);
        for (int i = 0; i < n; ++i) {
            if (!(row >> adj(j, i))) {
                throw ValidationError("row " + std::to_string(j + 1) + " has fewer than " +
                                      std::to_string(n) + " entries");
            }
        }
        double extra;
        if (row >> extra) {
            throw ValidationError("row " + std::to_string(j + 1) + " has more than " +
                                  std::to_string(n) + " entries");
        }
    }
    return network_from_matrix(adj);
}

Network read_edge_list(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ValidationError("edge list file is empty");
    if (line.rfind("n=", 0) != 0) {
        throw ValidationError("edge list must start with 'n=<count>', got '" + line + "'");
    }
    const int n = parse_count(line.substr(2), "node count");

    Eigen::MatrixXd adj = Eigen::MatrixXd::Zero(n, n);
    std::set<std::pair<int, int>> seen;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream fields(line);
        long i = 0, j = 0;
        double w = 0.0;
        if (!(fields >> i >> j >> w)) {
            throw ValidationError("line " + std::to_string(lineno) +
                                  ": expected 'i j w', got '" + line + "'");
        }
        std::string extra;
        if (fields >> extra) {
            throw ValidationError("line " + std::to_string(lineno) + ": trailing content '" +
                                  extra + "'");
        }
        if (i < 1 || i > n || j < 1 || j > n) {
            throw ValidationError("line " + std::to_string(lineno) + ": node id out of range 1.." +
                                  std::to_string(n));
        }
        if (!seen.insert({static_cast<int>(i), static_cast<int>(j)}).second) {
            throw ValidationError("line " + std::to_string(lineno) + ": duplicate edge " +
                                  std::to_string(i) + " -> " + std::to_string(j));
        }
        adj(j - 1, i - 1) = w;
    }
    return network_from_matrix(adj);
}

Network read_network(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open '" + path.string() + "'");
    std::string first;
    if (!std::getline(in, first)) throw ValidationError("'" + path.string() + "' is empty");
    in.seekg(0);
    if (first.rfind("n=", 0) == 0) return read_edge_list(in);
    return read_matrix(in);
}

void write_matrix(const Network& net, std::ostream& out) {
    const Eigen::MatrixXd& adj = net.adjacency();
    const int n = net.size();
    out << n << "\n";
    char buf[64];
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g", adj(j, i));
            out << (i ? " " : "") << buf;
        }
        out << "\n";
    }
}

}  // namespace gramcent
