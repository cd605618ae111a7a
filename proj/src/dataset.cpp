#include "wprior/dataset.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace wprior {

Dataset Dataset::prefix(std::size_t n) const {
    if (n > points.size()) throw std::out_of_range("Dataset::prefix: n exceeds size");
    Dataset d;
    d.points.assign(points.begin(), points.begin() + static_cast<std::ptrdiff_t>(n));
    d.origin = origin;
    return d;
}

Dataset Dataset::concat(const Dataset& other) const {
    Dataset d = *this;
    d.points.insert(d.points.end(), other.points.begin(), other.points.end());
    return d;
}

Dataset Dataset::with(const Observation& extra) const {
    Dataset d = *this;
    d.points.push_back(extra);
    return d;
}

Dataset make_scalar_dataset(const std::vector<double>& xs) {
    Dataset d;
    d.points.reserve(xs.size());
    for (double x : xs) d.points.push_back(scalar_obs(x));
    return d;
}

void write_csv(std::ostream& out, const Dataset& data, ObsSpace space) {
    out.precision(17);
    for (const Observation& p : data.points) {
        if (space == ObsSpace::RealPair)
            out << p.x << ',' << p.y << '\n';
        else
            out << p.x << '\n';
    }
}

void write_csv_file(const std::string& path, const Dataset& data, ObsSpace space) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    write_csv(out, data, space);
}

Dataset read_csv(std::istream& in) {
    Dataset d;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        Observation obs;
        std::istringstream row(line);
        std::string field;
        if (!std::getline(row, field, ',')) continue;
        try {
            obs.x = std::stod(field);
            if (std::getline(row, field, ',')) obs.y = std::stod(field);
        } catch (const std::exception&) {
            throw std::runtime_error("bad CSV value at line " + std::to_string(lineno));
        }
        d.points.push_back(obs);
    }
    return d;
}

Dataset read_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    return read_csv(in);
}

}  // namespace wprior
