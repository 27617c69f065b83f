#include "bpmp/instance_io.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "bpmp/errors.hpp"

namespace bpmp {

using nlohmann::json;

json instance_to_json(const Instance& inst) {
  json doc;
  doc["n"] = inst.n();
  doc["dist"] = inst.dist_matrix();
  json reqs = json::array();
  for (const Request& r : inst.requests()) {
    reqs.push_back({{"from", r.origin}, {"to", r.destination}, {"weight", r.weight}});
  }
  doc["requests"] = std::move(reqs);
  const Parameters& prm = inst.params();
  doc["params"] = {{"p", prm.p}, {"c", prm.c}, {"v", prm.v}, {"Q", prm.Q}, {"D", prm.D}};
  return doc;
}

Instance instance_from_json(const json& doc) {
  try {
    const int n = doc.at("n").get<int>();
    auto dist = doc.at("dist").get<std::vector<std::vector<double>>>();
    std::vector<Request> requests;
    int id = 1;
    for (const json& r : doc.at("requests")) {
      requests.push_back(Request{id++, r.at("from").get<int>(), r.at("to").get<int>(),
                                 r.at("weight").get<double>()});
    }
    const json& p = doc.at("params");
    Parameters params{p.at("p").get<double>(), p.at("c").get<double>(),
                      p.at("v").get<double>(), p.at("Q").get<double>(),
                      p.at("D").get<double>()};
    Instance inst(n, std::move(dist), std::move(requests), params);
    const ValidationReport report = validate_instance(inst);
    if (!report.ok()) {
      std::string msg = "invalid instance:";
      for (const std::string& e : report.errors) msg += "\n  " + e;
      throw InvalidInstanceError(msg);
    }
    return inst;
  } catch (const json::exception& e) {
    throw InvalidInstanceError(std::string("malformed instance document: ") + e.what());
  }
}

Instance load_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInstanceError("cannot open instance file " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw InvalidInstanceError("cannot parse " + path.string() + ": " + e.what());
  }
  return instance_from_json(doc);
}

std::string instance_to_string(const Instance& inst) {
  return instance_to_json(inst).dump(2) + "\n";
}

void save_instance(const Instance& inst, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << instance_to_string(inst);
}

std::string instance_digest(const Instance& inst) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : instance_to_json(inst).dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace bpmp
