#include "loadflow/report.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

namespace loadflow {

using nlohmann::json;

namespace {

json optional_number(const std::optional<double>& x) { return x ? json(*x) : json(nullptr); }

std::string exponent_label(double p) {
  if (p == kInfinity) return "inf";
  return p == 1.0 ? "1" : p == 2.0 ? "2" : std::to_string(p);
}

json details(const std::vector<PriorConditionDetail>& list) {
  json out = json::array();
  for (const auto& d : list) {
    out.push_back({{"p", exponent_label(d.p)},
                   {"q", exponent_label(d.q)},
                   {"matrix_norm", d.matrix_norm},
                   {"injection_norm", d.injection_norm},
                   {"product", d.product},
                   {"ok", d.ok}});
  }
  return out;
}

void emit(const json& node, int depth, std::string& out) {
  const std::string pad(2 * depth + 2, ' ');
  const std::string close(2 * depth, ' ');
  switch (node.type()) {
    case json::value_t::object: {
      if (node.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [key, value] : node.items()) {
        if (!first) out += ",\n";
        first = false;
        out += pad + json(key).dump() + ": ";
        emit(value, depth + 1, out);
      }
      out += "\n" + close + "}";
      return;
    }
    case json::value_t::array: {
      if (node.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (size_t i = 0; i < node.size(); ++i) {
        if (i) out += ",\n";
        out += pad;
        emit(node[i], depth + 1, out);
      }
      out += "\n" + close + "]";
      return;
    }
    case json::value_t::number_float: {
      const double x = node.get<double>();
      if (!std::isfinite(x)) {
        out += "null";
        return;
      }
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", x);
      out += buf;
      return;
    }
    default:
      out += node.dump();
  }
}

}  // namespace

std::string dump_report(const json& doc) {
  std::string out;
  emit(doc, 0, out);
  return out + "\n";
}

json to_json(const TheoremCheck& c) {
  return {{"xi_s_hat", c.xi_s_hat}, {"xi_delta_s", c.xi_delta_s}, {"u_min", c.u_min},
          {"delta", c.delta},       {"ok", c.ok},                 {"rho", optional_number(c.rho)}};
}

json to_json(const CorollaryCheck& c) {
  return {{"xi_s", c.xi_s}, {"ok", c.ok}, {"rho", optional_number(c.rho)}};
}

json to_json(const PriorCheck& c) {
  return {{"bolognani_ok", c.plain_ok},
          {"improved_ok", c.scaled_ok},
          {"bolognani_detail", details(c.plain)},
          {"improved_detail", details(c.scaled)}};
}

json to_json(const CertificateReport& r) {
  return {{"corollary", to_json(r.corollary)},
          {"theorem", r.theorem ? to_json(*r.theorem) : json(nullptr)},
          {"prior", to_json(r.prior)}};
}

json to_json(const SolveResult& r) {
  return {{"converged", r.converged},
          {"iterations", r.iterations},
          {"final_step", r.final_step},
          {"residual", r.residual},
          {"residual_plain", r.residual_plain},
          {"certified", r.certified},
          {"contained_in_d", r.certified ? json(r.contained_in_d) : json(nullptr)}};
}

json to_json(const SweepBoundaries& b) {
  return {{"corollary", optional_number(b.corollary)},
          {"improved", optional_number(b.scaled_prior)},
          {"prior", optional_number(b.plain_prior)},
          {"theorem_lower", optional_number(b.theorem_lower)},
          {"theorem_upper", optional_number(b.theorem_upper)}};
}

json voltage_table(const NetworkDescription& net, const ComplexVector& v,
                   const ZeroLoadProfile& w) {
  json rows = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    rows.push_back({{"bus", net.buses[k + 1].id},
                    {"v_re", v[k].real()},
                    {"v_im", v[k].imag()},
                    {"v_abs", std::abs(v[k])},
                    {"angle_deg", std::arg(v[k]) * 180.0 / std::numbers::pi},
                    {"w_abs", std::abs(w.w[k])},
                    {"u_abs", std::abs(v[k] / w.w[k])}});
  }
  return rows;
}

}  // namespace loadflow
