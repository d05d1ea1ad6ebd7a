#include "mtl/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "mtl/error.hpp"

namespace mtl {

namespace {

constexpr const char* kMagic = "MTL1";

void put_le(std::string& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof bits);
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((bits >> (8 * b)) & 0xff));
}

double get_le(const unsigned char* p) {
  std::uint64_t bits = 0;
  for (int b = 7; b >= 0; --b) bits = (bits << 8) | p[b];
  double v;
  std::memcpy(&v, &bits, sizeof v);
  return v;
}

std::vector<double> parse_numbers(const std::string& rest, const std::string& key) {
  std::istringstream in(rest);
  std::vector<double> out;
  std::string tok;
  while (in >> tok) {
    char* end = nullptr;
    double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0') throw Error("MTL1: bad number '" + tok + "' for " + key);
    out.push_back(v);
  }
  return out;
}

void dump_value(const Json& j, int indent, int level, std::string& out) {
  const std::string pad(static_cast<std::size_t>(indent) * (level + 1), ' ');
  const std::string close_pad(static_cast<std::size_t>(indent) * level, ' ');
  const char* nl = indent > 0 ? "\n" : "";
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{";
      out += nl;
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) {
          out += ",";
          out += nl;
        }
        first = false;
        out += pad;
        out += Json(it.key()).dump();
        out += indent > 0 ? ": " : ":";
        dump_value(it.value(), indent, level + 1, out);
      }
      out += nl;
      out += close_pad;
      out += "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      bool scalar = true;
      for (const auto& e : j)
        if (e.is_structured()) scalar = false;
      if (scalar) {
        out += "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) out += ", ";
          dump_value(j[i], indent, level + 1, out);
        }
        out += "]";
        return;
      }
      out += "[";
      out += nl;
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) {
          out += ",";
          out += nl;
        }
        out += pad;
        dump_value(j[i], indent, level + 1, out);
      }
      out += nl;
      out += close_pad;
      out += "]";
      return;
    }
    case Json::value_t::number_float:
      out += std::isfinite(j.get<double>()) ? format_double(j.get<double>()) : "null";
      return;
    default:
      out += j.dump();
  }
}

Json term_json(const SystemSpec& spec, const MonomialTerm& term) {
  Json t;
  t["polynomial"] = term.describe(spec.labels);
  t["coefficient"] = term.coefficient;
  Json p = Json::array(), q = Json::array(), beta = Json::array();
  for (int j = 0; j < spec.components; ++j) {
    p.push_back(term.exponents[j].first);
    q.push_back(term.exponents[j].second);
    beta.push_back(term.beta(j));
  }
  t["p"] = p;
  t["q"] = q;
  t["beta"] = beta;
  t["alpha"] = term.alpha();
  return t;
}

}  // namespace

std::string format_double(double v) {
  if (v == 0.0) return std::signbit(v) ? "-0" : "0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string encode_profile(const ProfileFile& file) {
  std::string out;
  out += kMagic;
  out += "\n";
  out += "dimension " + std::to_string(file.grid.dimension) + "\n";
  out += "components " + std::to_string(file.components) + "\n";
  out += "half_width " + format_double(file.grid.half_width) + "\n";
  out += "points " + std::to_string(file.grid.points) + "\n";
  auto row = [&](const std::string& key, auto get) {
    out += key;
    for (int j = 0; j < file.components; ++j) out += " " + format_double(get(j));
    out += "\n";
  };
  row("omega", [&](int j) { return file.omega[j]; });
  row("residual_l2", [&](int j) { return file.residuals[j].l2; });
  row("residual_linf", [&](int j) { return file.residuals[j].linf; });
  out += "\n";
  for (const auto& p : file.profiles)
    for (double v : p) put_le(out, v);
  return out;
}

ProfileFile decode_profile(const std::string& bytes) {
  ProfileFile file;
  std::size_t pos = 0;
  auto next_line = [&]() -> std::string {
    std::size_t nl = bytes.find('\n', pos);
    if (nl == std::string::npos) throw Error("MTL1: truncated header");
    std::string line = bytes.substr(pos, nl - pos);
    pos = nl + 1;
    return line;
  };
  if (next_line() != kMagic) throw Error("MTL1: bad magic");
  bool have_d = false, have_m = false, have_l = false, have_n = false;
  for (std::string line = next_line(); !line.empty(); line = next_line()) {
    const std::size_t sp = line.find(' ');
    const std::string key = line.substr(0, sp);
    const std::string rest = sp == std::string::npos ? "" : line.substr(sp + 1);
    const auto nums = parse_numbers(rest, key);
    auto single = [&]() {
      if (nums.size() != 1) throw Error("MTL1: expected one value for " + key);
      return nums[0];
    };
    if (key == "dimension") {
      file.grid.dimension = static_cast<int>(single());
      have_d = true;
    } else if (key == "components") {
      file.components = static_cast<int>(single());
      have_m = true;
    } else if (key == "half_width") {
      file.grid.half_width = single();
      have_l = true;
    } else if (key == "points") {
      file.grid.points = static_cast<int>(single());
      have_n = true;
    } else if (key == "omega") {
      file.omega = nums;
    } else if (key == "residual_l2") {
      file.residuals.resize(nums.size());
      for (std::size_t j = 0; j < nums.size(); ++j) file.residuals[j].l2 = nums[j];
    } else if (key == "residual_linf") {
      file.residuals.resize(nums.size());
      for (std::size_t j = 0; j < nums.size(); ++j) file.residuals[j].linf = nums[j];
    } else {
      throw Error("MTL1: unknown header key '" + key + "'");
    }
  }
  if (!have_d || !have_m || !have_l || !have_n) throw Error("MTL1: incomplete header");
  file.grid.validate();
  const auto m = static_cast<std::size_t>(file.components);
  if (file.omega.size() != m || file.residuals.size() != m) throw Error("MTL1: header rows disagree with components");
  const std::size_t n = file.grid.size();
  if (bytes.size() - pos != m * n * 8)
    throw Error("MTL1: body has " + std::to_string(bytes.size() - pos) + " bytes, expected " +
                std::to_string(m * n * 8));
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + pos);
  file.profiles.assign(m, RealField(n));
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t i = 0; i < n; ++i, p += 8) file.profiles[j][i] = get_le(p);
  return file;
}

ProfileFile profile_from_bound_state(const BoundState& bs) {
  ProfileFile file;
  file.grid = bs.grid;
  file.components = bs.components();
  file.omega = bs.omega;
  file.residuals = bs.residuals;
  file.profiles = bs.profiles;
  return file;
}

void write_profile(const std::filesystem::path& path, const ProfileFile& file) {
  write_file_atomic(path, encode_profile(file));
}

ProfileFile read_profile(const std::filesystem::path& path) { return decode_profile(read_file(path)); }

std::string dump_json(const Json& j, int indent) {
  std::string out;
  dump_value(j, indent, 0, out);
  out += "\n";
  return out;
}

std::uint64_t spec_hash(const SystemSpec& spec) {
  std::string canon = "d=" + std::to_string(spec.dimension) + ";m=" + std::to_string(spec.components) + ";";
  for (int j = 0; j < spec.components; ++j)
    canon += spec.label(j) + ":" + format_double(spec.lambdas[j]) + "," + format_double(spec.omegas[j]) + ";";
  for (const auto& t : spec.terms) {
    canon += format_double(t.coefficient);
    for (const auto& [p, q] : t.exponents) canon += "," + std::to_string(p) + "/" + std::to_string(q);
    canon += ";";
  }
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : canon) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string spec_hash_hex(const SystemSpec& spec) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(spec_hash(spec)));
  return buf;
}

Json structural_to_json(const SystemSpec& spec, const StructuralVerdict& v) {
  Json s;
  s["check"] = v.check;
  s["applies"] = v.applies;
  s["reason"] = v.reason;
  Json pair = Json::array();
  for (int j : v.pair) pair.push_back(spec.label(j));
  s["pair"] = pair;
  Json inputs = Json::object();
  for (const auto& [k, val] : v.inputs) inputs[k] = val;
  s["inputs"] = inputs;
  return s;
}

Json report_to_json(const SystemSpec& spec, const BoundState& bs, const InstabilityReport& report) {
  Json j;
  j["format"] = "mtl-report/1";
  Json sys;
  sys["dimension"] = spec.dimension;
  sys["components"] = spec.components;
  sys["labels"] = spec.labels;
  sys["lambda"] = spec.lambdas;
  sys["omega"] = spec.omegas;
  Json terms = Json::array();
  for (const auto& t : spec.terms) terms.push_back(term_json(spec, t));
  sys["terms"] = terms;
  j["system"] = sys;

  Json ground;
  ground["grid"] = {{"dimension", bs.grid.dimension}, {"half_width", bs.grid.half_width}, {"points", bs.grid.points}};
  ground["mass_integrals"] = bs.mass_integrals;
  ground["gradient_integrals"] = bs.gradient_integrals;
  ground["term_integrals"] = bs.term_integrals;
  j["bound_state"] = ground;

  j["reference"] = spec.label(report.reference);
  Json perm = Json::array();
  for (int o : report.order) perm.push_back(spec.label(o));
  j["permutation"] = perm;
  j["k_ratios"] = report.k_ratios;
  Json rows = Json::array();
  for (int r = 0; r < report.matrix.n; ++r) {
    Json row = Json::array();
    for (int c = 0; c < report.matrix.n; ++c) row.push_back(report.matrix(r, c));
    rows.push_back(row);
  }
  j["matrix"] = rows;
  j["eigenvalues"] = report.eigen.values;
  Json vecs = Json::array();
  for (const auto& v : report.eigen.vectors) vecs.push_back(v);
  j["eigenvectors"] = vecs;
  j["determinant"] = report.determinant;
  j["tolerance"] = report.tolerance;
  j["min_eigenvalue"] = report.min_eigenvalue;
  j["verdict"] = to_string(report.verdict);
  Json st = Json::array();
  for (const auto& v : report.structural) st.push_back(structural_to_json(spec, v));
  j["structural_verdicts"] = st;
  if (report.direction) {
    j["direction"] = {{"lambda_prime", report.direction->lambda_prime},
                      {"gamma_prime", report.direction->gamma_prime}};
  } else {
    j["direction"] = nullptr;
  }
  Json prov;
  prov["spec_hash"] = spec_hash_hex(spec);
  Json res = Json::array();
  for (const auto& r : bs.residuals) res.push_back({{"l2", r.l2}, {"linf", r.linf}});
  prov["residuals"] = res;
  prov["certification_threshold"] = bs.certification_threshold;
  j["provenance"] = prov;
  return j;
}

std::string trace_to_csv(const SimulationTrace& trace) {
  std::string out = "time,mass,hamiltonian";
  const std::size_t m = trace.component_masses.size();
  for (std::size_t j = 0; j < m; ++j) out += ",mass_" + std::to_string(j + 1);
  out += ",orbit_distance,virial,virial_rate\n";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    out += format_double(trace.times[i]);
    out += "," + format_double(trace.total_mass[i]);
    out += "," + format_double(trace.hamiltonian[i]);
    for (std::size_t j = 0; j < m; ++j) out += "," + format_double(trace.component_masses[j][i]);
    const double d = i < trace.orbit_distance.size() ? trace.orbit_distance[i] : std::nan("");
    out += "," + (std::isfinite(d) ? format_double(d) : std::string("nan"));
    out += "," + format_double(trace.virial[i]);
    out += "," + format_double(trace.virial_rate[i]);
    out += "\n";
  }
  return out;
}

Json events_to_json(const std::vector<Event>& events) {
  Json arr = Json::array();
  for (const auto& e : events)
    arr.push_back({{"time", e.time}, {"kind", to_string(e.kind)}, {"detail", e.detail}, {"value", e.value}});
  return arr;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace mtl
