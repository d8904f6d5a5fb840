#include "llab/driving_spec.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <string>

namespace llab {

namespace {

std::string trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

double number_arg(const std::string& text, const std::string& form) {
  const std::string arg = trim(text);
  char* end = nullptr;
  const double v = std::strtod(arg.c_str(), &end);
  require(!arg.empty() && end == arg.c_str() + arg.size() && std::isfinite(v),
          "spec '" + form + "': expected a finite number, got '" + arg + "'");
  return v;
}

CirclePath bm_path(double kappa, const SpecContext& context) {
  require(kappa >= 0.0, "spec 'bm:<kappa>': kappa must be >= 0");
  const Index steps = std::max(context.min_steps, min_steps_for(kappa, 1.0));
  return sample_circle_bm(kappa, steps, 1.0, context.seed);
}

}  // namespace

MeasureS1 parse_measure_spec(std::string_view raw, const SpecContext& context) {
  const std::string text = trim(raw);
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  const std::string arg = colon == std::string::npos ? std::string() : text.substr(colon + 1);
  if (head == "uniform" && colon == std::string::npos) return MeasureS1::uniform(context.bins);
  if (head == "dirac") return MeasureS1::dirac(number_arg(arg, "dirac:<angle>"));
  if (head == "cosine") {
    const double a = number_arg(arg, "cosine:<a>");
    require(std::abs(a) <= 1.0, "spec 'cosine:<a>': a must lie in [-1, 1]");
    return MeasureS1::cosine(a, context.bins);
  }
  if (head == "bm") {
    const auto path = bm_path(number_arg(arg, "bm:<kappa>"), context);
    return average_occupation(occupation_measure(path, 1.0, context.bins));
  }
  throw ValidationError("unknown measure spec '" + text +
                        "' (expected uniform, dirac:<angle>, cosine:<a> or bm:<kappa>)");
}

DrivingMeasure parse_driving_spec(std::string_view raw, const SpecContext& context) {
  const std::string text = trim(raw);
  if (text.rfind("slabs:", 0) == 0) {
    std::string body = trim(std::string_view(text).substr(6));
    require(body.size() >= 2 && body.front() == '[' && body.back() == ']',
            "spec 'slabs:[...]': expected a bracketed, comma-separated list");
    body = body.substr(1, body.size() - 2);
    std::vector<MeasureS1> slabs;
    std::size_t start = 0;
    while (start <= body.size()) {
      const auto comma = body.find(',', start);
      const auto item = trim(std::string_view(body).substr(start, comma - start));
      require(!item.empty(), "spec 'slabs:[...]': empty slab entry");
      require(item.rfind("bm:", 0) != 0, "spec 'slabs:[...]': bm:<kappa> is not allowed inside slabs");
      slabs.push_back(parse_measure_spec(item, context));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    return DrivingMeasure::from_slabs(std::move(slabs));
  }
  if (text.rfind("bm:", 0) == 0) {
    return dirac_path_measure(bm_path(number_arg(text.substr(3), "bm:<kappa>"), context), context.bins);
  }
  return DrivingMeasure::from_slabs({parse_measure_spec(text, context)});
}

}  // namespace llab
