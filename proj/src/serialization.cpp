#include "swave/serialization.hpp"

#include <cmath>

#include "swave/errors.hpp"

namespace swave {

using nlohmann::json;

namespace {

json pairs_to_json(const std::vector<std::pair<double, double>>& terms) {
  json arr = json::array();
  for (const auto& [k, amp] : terms) arr.push_back(json::array({k, amp}));
  return arr;
}

std::vector<std::pair<double, double>> pairs_from_json(const json& j, const char* what) {
  std::vector<std::pair<double, double>> out;
  if (!j.is_array()) throw InvalidArgument(std::string(what) + " must be an array of [k, amplitude]");
  for (const auto& item : j) {
    if (!item.is_array() || item.size() != 2) {
      throw InvalidArgument(std::string(what) + " entries must be [k, amplitude] pairs");
    }
    out.emplace_back(item[0].get<double>(), item[1].get<double>());
  }
  return out;
}

}  // namespace

json to_json(const SmoothFunction& f) {
  return json{{"poly", f.poly}, {"sin", pairs_to_json(f.sin_terms)}, {"cos", pairs_to_json(f.cos_terms)}};
}

SmoothFunction smooth_from_json(const json& j) {
  SmoothFunction f;
  if (j.contains("poly")) f.poly = j.at("poly").get<std::vector<double>>();
  if (j.contains("sin")) f.sin_terms = pairs_from_json(j.at("sin"), "sin");
  if (j.contains("cos")) f.cos_terms = pairs_from_json(j.at("cos"), "cos");
  return f;
}

json to_json(const CoefficientSpec& spec) {
  json j;
  switch (spec.kind) {
    case CoefficientSpec::Kind::Smooth:
      j = to_json(spec.smooth);
      j["kind"] = "smooth";
      break;
    case CoefficientSpec::Kind::DiracDelta:
      j = json{{"kind", "delta"}, {"x0", spec.x0}};
      break;
    case CoefficientSpec::Kind::DiracPower:
      j = json{{"kind", "delta_power"}, {"x0", spec.x0}, {"k", spec.power}};
      break;
    case CoefficientSpec::Kind::Sum: {
      json terms = json::array();
      for (const auto& t : spec.terms) terms.push_back(json{{"weight", t.weight}, {"spec", to_json(t.spec)}});
      j = json{{"kind", "sum"}, {"terms", terms}};
      break;
    }
  }
  j["nonneg"] = spec.nonneg_required;
  return j;
}

CoefficientSpec spec_from_json(const json& j, bool default_nonneg) {
  if (!j.is_object()) throw InvalidArgument("coefficient spec must be a JSON object");
  const std::string kind = j.value("kind", std::string("smooth"));
  const bool nonneg = j.value("nonneg", default_nonneg);
  CoefficientSpec spec;
  if (kind == "smooth") {
    spec = CoefficientSpec::from_smooth(smooth_from_json(j), nonneg);
  } else if (kind == "delta") {
    spec = CoefficientSpec::delta(j.at("x0").get<double>(), nonneg);
  } else if (kind == "delta_power") {
    spec = CoefficientSpec::delta_power(j.at("x0").get<double>(), j.at("k").get<int>(), nonneg);
  } else if (kind == "sum") {
    std::vector<CoefficientSpec::Term> terms;
    for (const auto& t : j.at("terms")) {
      terms.push_back({t.value("weight", 1.0), spec_from_json(t.at("spec"), nonneg)});
    }
    spec = CoefficientSpec::sum(std::move(terms), nonneg);
  } else {
    throw InvalidArgument("unknown coefficient kind '" + kind + "'");
  }
  spec.validate();
  return spec;
}

json number_or_sentinel(double x) {
  if (std::isinf(x)) return x > 0 ? json("+inf") : json("-inf");
  if (std::isnan(x)) return json("nan");
  return json(x);
}

}  // namespace swave
