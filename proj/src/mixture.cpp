#include "hlab/mixture.hpp"

#include <cmath>
#include <fstream>

#include "json.hpp"

namespace hlab {

Mixture::Mixture(std::vector<Atom> atoms, Support support)
    : atoms_(std::move(atoms)), support_(support) {
  if (atoms_.empty()) throw InvalidArgument("mixture needs at least one atom");
  double total = 0.0;
  for (const auto& a : atoms_) {
    if (!(a.weight >= 0.0)) throw InvalidArgument("mixture weights must be nonnegative");
    if (a.phi.rank() != 1) throw InvalidArgument("mixture atoms must be one-particle fields");
    if (!(a.phi.grid() == atoms_.front().phi.grid())) throw InvalidArgument("mixture atoms on different grids");
    const double norm = l2_norm(a.phi);
    if (support_ == Support::sphere && std::abs(norm - 1.0) > 1e-10) {
      throw InvalidArgument("sphere-supported mixture needs unit-norm atoms");
    }
    if (support_ == Support::ball && norm > 1.0 + 1e-10) {
      throw InvalidArgument("ball-supported mixture needs atoms of norm at most one");
    }
    total += a.weight;
  }
  if (std::abs(total - 1.0) > 1e-12) throw InvalidArgument("mixture weights must sum to one");
}

const GridSpec& Mixture::grid() const {
  if (atoms_.empty()) throw InvalidArgument("empty mixture has no grid");
  return atoms_.front().phi.grid();
}

void write_mixture(const std::string& path, const Mixture& mu) {
  nlohmann::json j;
  j["support"] = mu.support() == Support::sphere ? "sphere" : "ball";
  j["atoms"] = nlohmann::json::array();
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const std::string file = path + ".atom" + std::to_string(i) + ".hlab";
    write_field(file, mu.atoms()[i].phi);
    // Store the basename so the manifest can be moved with its atoms.
    const auto slash = file.find_last_of('/');
    j["atoms"].push_back({{"weight", mu.atoms()[i].weight},
                          {"file", slash == std::string::npos ? file : file.substr(slash + 1)}});
  }
  std::ofstream out(path);
  if (!out) throw FormatError("cannot open " + path + " for writing");
  out << j.dump(2) << '\n';
}

Mixture read_mixture(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("bad mixture manifest " + path + ": " + e.what());
  }
  const auto slash = path.find_last_of('/');
  const std::string dir = slash == std::string::npos ? "" : path.substr(0, slash + 1);
  std::vector<Atom> atoms;
  try {
    for (const auto& a : j.at("atoms")) {
      atoms.push_back({a.at("weight").get<double>(), read_field(dir + a.at("file").get<std::string>())});
    }
    const auto support = j.at("support").get<std::string>();
    if (support != "sphere" && support != "ball") throw FormatError("unknown support " + support);
    return Mixture(std::move(atoms), support == "sphere" ? Support::sphere : Support::ball);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("bad mixture manifest " + path + ": " + e.what());
  }
}

}  // namespace hlab
