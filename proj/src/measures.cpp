#include "playstyle/measures.hpp"

#include <algorithm>
#include <cmath>

#include "playstyle/bytes.hpp"
#include "playstyle/errors.hpp"

namespace playstyle {

namespace {

struct StateComparison {
  const std::string* code = nullptr;
  std::size_t count_a = 0;
  std::size_t count_b = 0;
  double value = 0.0;  // distance for w2/bd metrics, affinity for bc
};

struct EncoderPairView {
  const EncoderStates* a = nullptr;
  const EncoderStates* b = nullptr;
  std::size_t intersection = 0;
  std::size_t union_size = 0;
  std::vector<StateComparison> comparisons;  // sorted by code
};

struct PairView {
  std::vector<EncoderPairView> per_encoder;
  std::size_t intersection_total = 0;
  std::size_t union_total = 0;
};

void check_compatible(const EncodedDataset& a, const EncodedDataset& b) {
  if (a.encoder_ids != b.encoder_ids) {
    throw EncoderMismatch("datasets were encoded with different multiscale encoders");
  }
  if (a.kind != b.kind || a.space != b.space) {
    throw SpaceMismatch("datasets use different action spaces");
  }
  if (a.record_count == 0 || b.record_count == 0) {
    throw ValidationError("cannot measure an empty dataset");
  }
}

/// Per-state policy metric between the two sample bags.
double state_value(PolicyMetric metric, GroundMetric ground, ActionKind kind, int space,
                   const std::vector<Action>& sa, const std::vector<Action>& sb) {
  if (kind == ActionKind::discrete) {
    const CategoricalDistribution pa = estimate_categorical(sa, space);
    const CategoricalDistribution pb = estimate_categorical(sb, space);
    switch (metric) {
      case PolicyMetric::w2:
        return w2_categorical(pa, pb, ground);
      case PolicyMetric::bhattacharyya_distance:
        return bhattacharyya_categorical(pa, pb).distance;
      case PolicyMetric::bhattacharyya_coefficient:
        return bhattacharyya_categorical(pa, pb).coefficient;
    }
  } else {
    const GaussianFit pa = estimate_gaussian(sa);
    const GaussianFit pb = estimate_gaussian(sb);
    switch (metric) {
      case PolicyMetric::w2:
        return w2_gaussian(pa, pb);
      case PolicyMetric::bhattacharyya_distance:
        return bhattacharyya_gaussian(pa, pb).distance;
      case PolicyMetric::bhattacharyya_coefficient:
        return bhattacharyya_gaussian(pa, pb).coefficient;
    }
  }
  return 0.0;
}

PairView build_pair_view(const EncodedDataset& a, const EncodedDataset& b, bool need_values,
                         PolicyMetric metric, GroundMetric ground) {
  check_compatible(a, b);
  PairView view;
  view.per_encoder.resize(a.per_encoder.size());
  for (std::size_t e = 0; e < a.per_encoder.size(); ++e) {
    EncoderPairView& pv = view.per_encoder[e];
    pv.a = &a.per_encoder[e];
    pv.b = &b.per_encoder[e];

    const auto& small = pv.a->by_code.size() <= pv.b->by_code.size() ? pv.a->by_code
                                                                     : pv.b->by_code;
    const auto& large = pv.a->by_code.size() <= pv.b->by_code.size() ? pv.b->by_code
                                                                     : pv.a->by_code;
    for (const auto& [code, samples] : small) {
      const auto other = large.find(code);
      if (other == large.end()) continue;
      StateComparison cmp;
      cmp.code = &code;
      const bool small_is_a = &small == &pv.a->by_code;
      cmp.count_a = small_is_a ? samples.size() : other->second.size();
      cmp.count_b = small_is_a ? other->second.size() : samples.size();
      pv.comparisons.push_back(cmp);
    }
    std::sort(pv.comparisons.begin(), pv.comparisons.end(),
              [](const StateComparison& x, const StateComparison& y) { return *x.code < *y.code; });
    pv.intersection = pv.comparisons.size();
    pv.union_size = pv.a->by_code.size() + pv.b->by_code.size() - pv.intersection;
    view.intersection_total += pv.intersection;
    view.union_total += pv.union_size;

    if (need_values) {
      for (StateComparison& cmp : pv.comparisons) {
        cmp.value = state_value(metric, ground, a.kind, a.space, pv.a->by_code.at(*cmp.code),
                                pv.b->by_code.at(*cmp.code));
      }
    }
  }
  return view;
}

void fill_report_sizes(ComparisonReport& report, const PairView& view,
                       const std::vector<std::string>& encoder_ids, int threshold_t,
                       bool detailed) {
  report.intersection_states = view.intersection_total;
  report.union_states = view.union_total;
  for (std::size_t e = 0; e < view.per_encoder.size(); ++e) {
    const EncoderPairView& pv = view.per_encoder[e];
    EncoderPairStats stats;
    stats.states_a = pv.a->by_code.size();
    stats.states_b = pv.b->by_code.size();
    stats.intersection_states = pv.intersection;
    stats.union_states = pv.union_size;
    for (const StateComparison& cmp : pv.comparisons) {
      if (cmp.count_a >= static_cast<std::size_t>(threshold_t) &&
          cmp.count_b >= static_cast<std::size_t>(threshold_t)) {
        ++stats.comparable_states;
      }
      if (detailed) stats.per_state.emplace_back(to_hex(*cmp.code), cmp.value);
    }
    report.per_encoder.emplace(encoder_ids[e], std::move(stats));
  }
}

/// Symmetrized expected policy distance over the threshold-filtered
/// intersection. Encoders whose filtered intersection is empty contribute
/// nothing; with no comparable encoder at all the measure is undefined.
std::optional<double> distance_value(const PairView& view, const MeasureConfig& cfg) {
  double sum_ab = 0.0, sum_ba = 0.0;
  std::size_t comparable_encoders = 0;
  for (const EncoderPairView& pv : view.per_encoder) {
    double num_ab = 0.0, num_ba = 0.0, den_ab = 0.0, den_ba = 0.0;
    for (const StateComparison& cmp : pv.comparisons) {
      if (cmp.count_a < static_cast<std::size_t>(cfg.threshold_t) ||
          cmp.count_b < static_cast<std::size_t>(cfg.threshold_t)) {
        continue;
      }
      const double wa = cfg.distance_weighting == StateWeighting::frequency
                            ? static_cast<double>(cmp.count_a)
                            : 1.0;
      const double wb = cfg.distance_weighting == StateWeighting::frequency
                            ? static_cast<double>(cmp.count_b)
                            : 1.0;
      // d(A|B) conditions on B's visitation, d(B|A) on A's.
      num_ab += wb * cmp.value;
      den_ab += wb;
      num_ba += wa * cmp.value;
      den_ba += wa;
    }
    if (den_ab > 0.0) {
      sum_ab += num_ab / den_ab;
      sum_ba += num_ba / den_ba;
      ++comparable_encoders;
    }
  }
  if (comparable_encoders == 0) return std::nullopt;
  const double d_ab = sum_ab / static_cast<double>(comparable_encoders);
  const double d_ba = sum_ba / static_cast<double>(comparable_encoders);
  return 0.5 * d_ab + 0.5 * d_ba;
}

/// Weighted mean of per-state kernel (or affinity) values over the raw
/// multiscale intersection.
std::optional<double> intersection_mean(const PairView& view, const MeasureConfig& cfg,
                                        bool apply_kernel, double dbar) {
  double num = 0.0, den = 0.0;
  for (const EncoderPairView& pv : view.per_encoder) {
    for (const StateComparison& cmp : pv.comparisons) {
      const double w = cfg.similarity_weighting == StateWeighting::frequency
                           ? static_cast<double>(cmp.count_a + cmp.count_b)
                           : 1.0;
      double v = cmp.value;
      if (apply_kernel) v = perceptual_kernel(dbar > 0.0 ? v / dbar : 0.0);
      num += w * v;
      den += w;
    }
  }
  if (den == 0.0) return std::nullopt;
  return num / den;
}

/// Kernel (or affinity) mass of the intersection spread over the union.
double union_value(const PairView& view, const MeasureConfig& cfg, bool apply_kernel,
                   double dbar) {
  if (cfg.similarity_weighting == StateWeighting::frequency) {
    const auto inter = intersection_mean(view, cfg, apply_kernel, dbar);
    if (!inter) return 0.0;
    const double jaccard = static_cast<double>(view.intersection_total) /
                           static_cast<double>(view.union_total);
    return jaccard * *inter;
  }
  double sum = 0.0;
  for (const EncoderPairView& pv : view.per_encoder) {
    for (const StateComparison& cmp : pv.comparisons) {
      double v = cmp.value;
      if (apply_kernel) v = perceptual_kernel(dbar > 0.0 ? v / dbar : 0.0);
      sum += v;
    }
  }
  return sum / static_cast<double>(view.union_total);
}

}  // namespace

std::string measure_name(Measure m) {
  switch (m) {
    case Measure::distance: return "pd";
    case Measure::intersection_similarity: return "ps-int";
    case Measure::intersection_similarity_bd: return "ps-int-bd";
    case Measure::intersection_similarity_bc: return "ps-int-bc";
    case Measure::jaccard: return "jaccard";
    case Measure::similarity: return "ps-union";
    case Measure::similarity_bc: return "ps-union-bc";
  }
  return "?";
}

Measure parse_measure(const std::string& name) {
  if (name == "pd") return Measure::distance;
  if (name == "ps-int") return Measure::intersection_similarity;
  if (name == "ps-int-bd") return Measure::intersection_similarity_bd;
  if (name == "ps-int-bc") return Measure::intersection_similarity_bc;
  if (name == "jaccard") return Measure::jaccard;
  if (name == "ps-union") return Measure::similarity;
  if (name == "ps-union-bc") return Measure::similarity_bc;
  throw ValidationError("unknown measure '" + name + "'");
}

bool measure_uses_scaling(Measure m) {
  return m == Measure::intersection_similarity || m == Measure::intersection_similarity_bd ||
         m == Measure::similarity;
}

std::map<std::string, std::vector<std::string>> intersection_states(const EncodedDataset& a,
                                                                    const EncodedDataset& b,
                                                                    int t) {
  check_compatible(a, b);
  std::map<std::string, std::vector<std::string>> out;
  for (std::size_t e = 0; e < a.per_encoder.size(); ++e) {
    std::vector<std::string> codes;
    for (const auto& [code, samples] : a.per_encoder[e].by_code) {
      if (samples.size() < static_cast<std::size_t>(t)) continue;
      const auto other = b.per_encoder[e].by_code.find(code);
      if (other == b.per_encoder[e].by_code.end() ||
          other->second.size() < static_cast<std::size_t>(t)) {
        continue;
      }
      codes.push_back(code);
    }
    std::sort(codes.begin(), codes.end());
    out.emplace(a.encoder_ids[e], std::move(codes));
  }
  return out;
}

double scaling_constant(std::span<const double> distances) {
  if (distances.empty()) return 0.0;
  double sum = 0.0;
  for (double d : distances) sum += d;
  return sum / static_cast<double>(distances.size());
}

std::vector<std::optional<ComparisonReport>> evaluate_batch(
    const EncodedDataset& query, std::span<const EncodedDataset* const> candidates, Measure m,
    const MeasureConfig& cfg, bool detailed) {
  if (m == Measure::distance && cfg.metric == PolicyMetric::bhattacharyya_coefficient) {
    throw ValidationError("the distance measure needs a distance metric, not an affinity");
  }
  PolicyMetric metric = cfg.metric;
  switch (m) {
    case Measure::distance: break;
    case Measure::intersection_similarity:
    case Measure::similarity: metric = PolicyMetric::w2; break;
    case Measure::intersection_similarity_bd: metric = PolicyMetric::bhattacharyya_distance; break;
    case Measure::intersection_similarity_bc:
    case Measure::similarity_bc: metric = PolicyMetric::bhattacharyya_coefficient; break;
    case Measure::jaccard: break;
  }
  const bool need_values = m != Measure::jaccard;

  std::vector<PairView> views;
  views.reserve(candidates.size());
  for (const EncodedDataset* candidate : candidates) {
    views.push_back(build_pair_view(query, *candidate, need_values, metric, cfg.ground));
  }

  // One scale for the whole batch, accumulated in a deterministic order
  // (candidate order, encoder order, codes sorted).
  std::optional<double> dbar;
  if (measure_uses_scaling(m)) {
    std::vector<double> observed;
    for (const PairView& view : views) {
      for (const EncoderPairView& pv : view.per_encoder) {
        for (const StateComparison& cmp : pv.comparisons) observed.push_back(cmp.value);
      }
    }
    dbar = scaling_constant(observed);
  }

  std::vector<std::optional<ComparisonReport>> out;
  out.reserve(views.size());
  for (const PairView& view : views) {
    std::optional<double> value;
    switch (m) {
      case Measure::distance: {
        const auto d = distance_value(view, cfg);
        if (d) value = -*d;  // negative similarity for ranking
        break;
      }
      case Measure::intersection_similarity:
      case Measure::intersection_similarity_bd:
        value = intersection_mean(view, cfg, /*apply_kernel=*/true, *dbar);
        break;
      case Measure::intersection_similarity_bc:
        value = intersection_mean(view, cfg, /*apply_kernel=*/false, 0.0);
        break;
      case Measure::jaccard:
        value = static_cast<double>(view.intersection_total) /
                static_cast<double>(view.union_total);
        break;
      case Measure::similarity:
        value = union_value(view, cfg, /*apply_kernel=*/true, *dbar);
        break;
      case Measure::similarity_bc:
        value = union_value(view, cfg, /*apply_kernel=*/false, 0.0);
        break;
    }
    if (!value) {
      out.push_back(std::nullopt);
      continue;
    }
    ComparisonReport report;
    report.measure_name = measure_name(m);
    report.value = *value;
    report.dbar = dbar;
    fill_report_sizes(report, view, query.encoder_ids, cfg.threshold_t, detailed);
    out.push_back(std::move(report));
  }
  return out;
}

ComparisonReport evaluate_pair(const EncodedDataset& a, const EncodedDataset& b, Measure m,
                               const MeasureConfig& cfg, bool detailed) {
  const EncodedDataset* candidates[] = {&b};
  auto results = evaluate_batch(a, candidates, m, cfg, detailed);
  if (!results.front()) {
    throw NoComparableStates("no state is shared by both datasets under any encoder");
  }
  return std::move(*results.front());
}

}  // namespace playstyle
