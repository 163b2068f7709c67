#include "tailmon/uncertainty.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tailmon/stats.hpp"

namespace tailmon {

const char* to_string(UncertaintyState s) {
  return s == UncertaintyState::Low ? "LOW" : "ELEVATED";
}

const char* to_string(UncertaintyLabel l) {
  switch (l) {
    case UncertaintyLabel::Low: return "LOW";
    case UncertaintyLabel::Medium: return "MEDIUM";
    case UncertaintyLabel::High: return "HIGH";
  }
  return "?";
}

double model_dispersion(std::span<const double> member_preds, double scale_s) {
  if (!(scale_s > 0.0))
    throw std::invalid_argument("model_dispersion: scale_s must be > 0");
  const double sd = sample_sd(member_preds);
  return std::min(1.0, sd / (3.0 * scale_s));
}

double combine_uncertainty(double u_model, double u_ood, double u_drift,
                           const UncertaintyWeights& w) {
  return w.model * u_model + w.ood * u_ood + w.drift * u_drift;
}

UncertaintyLabel uncertainty_label(double u, const UncertaintyParams& p) {
  if (u <= p.label_low_max) return UncertaintyLabel::Low;
  if (u <= p.label_medium_max) return UncertaintyLabel::Medium;
  return UncertaintyLabel::High;
}

DriftTracker::DriftTracker(int n_symbols, UncertaintyParams params)
    : symbols_(n_symbols), params_(params) {}

void DriftTracker::record_outcome(int symbol, bool breach) {
  auto& st = symbols_.at(symbol);
  st.breaches.push_back(breach);
  if (static_cast<int>(st.breaches.size()) > params_.drift_window)
    st.breaches.pop_front();
}

void DriftTracker::record_u(int symbol, double u) {
  auto& st = symbols_.at(symbol);
  st.u_history.push_back(u);
  if (static_cast<int>(st.u_history.size()) > params_.u_history_window)
    st.u_history.pop_front();
}

double DriftTracker::drift_score(int symbol, double alpha) const {
  const auto& st = symbols_.at(symbol);
  const int n = static_cast<int>(st.breaches.size());
  if (n < params_.drift_min_obs) return 0.0;
  int hits = 0;
  for (bool b : st.breaches) hits += b ? 1 : 0;
  const double p_hat = static_cast<double>(hits) / n;
  return std::min(1.0, std::max(p_hat - alpha, 0.0) / (2.0 * alpha));
}

UncertaintyState DriftTracker::uncertainty_state(int symbol, double u) const {
  const auto& st = symbols_.at(symbol);
  if (static_cast<int>(st.u_history.size()) < params_.state_min_history)
    return UncertaintyState::Low;
  std::vector<double> hist(st.u_history.begin(), st.u_history.end());
  const double tau = empirical_quantile(hist, params_.state_quantile);
  return u <= tau ? UncertaintyState::Low : UncertaintyState::Elevated;
}

int DriftTracker::outcome_count(int symbol) const {
  return static_cast<int>(symbols_.at(symbol).breaches.size());
}

int DriftTracker::u_history_count(int symbol) const {
  return static_cast<int>(symbols_.at(symbol).u_history.size());
}

}  // namespace tailmon
